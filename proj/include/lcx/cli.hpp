#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lcx/io.hpp"

namespace lcx::cli {

/// Runs one `lcx` invocation. args excludes the program name.
/// Returns the exit code: 0 success, 2 for rejected input (precondition,
/// domain, usage, failed verification), 1 for internal failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Independent re-check of a certificate document produced by run().
/// Returns {"verified": bool, "checks": {...}}.
io::json verify_document(const io::json& doc);

/// Canonical JSON for a --fn argument (`gallery:<id>`, `gallery:affine:a,b`,
/// `gallery:pwl:x:y,...`, `neg:<spec>`, inline JSON or a JSON file path).
io::json function_spec(const std::string& text);

}  // namespace lcx::cli
