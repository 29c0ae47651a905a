#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "lcx/gallery.hpp"

namespace lcx {

enum class LscVerdict { consistent, violated };

inline const char* to_string(LscVerdict v) {
  return v == LscVerdict::consistent ? "consistent with lsc at x_bar (sampling heuristic, not a proof)"
                                     : "lsc violated at x_bar";
}

template <class Scalar>
struct LscProbeOptions {
  Scalar initial_radius = Scalar(0.5);
  int samples_per_radius = 16;  // per direction
  int directions = 8;           // 2-D only
  Scalar tol = Scalar(1e-9);
  Scalar stall_fraction = Scalar(0.1);  // last rise below this share of the gap counts as stalled
};

template <class Scalar>
struct LscProbeReport {
  Point<Scalar> x_bar;
  ExtReal<Scalar> value_at_point;
  std::vector<Scalar> radii;
  std::vector<ExtReal<Scalar>> liminf_estimates;
  LscVerdict verdict = LscVerdict::consistent;
  Scalar tol{};
};

/// One-sided falsifier for lower semicontinuity at x_bar.
///
/// Level j samples the punctured ball of radius r0 * 2^-j and records the
/// minimum of f there. The estimates rise towards the liminf as the radius
/// shrinks; the probe reports a violation when the finest estimate is still
/// below f(x_bar) - tol and the last rise has stalled (less than
/// stall_fraction of the remaining gap). A continuous f gives a shrinking
/// gap with a rise proportional to it; a jump gives a rise of zero.
/// Lower semicontinuity can only be refuted this way: a "consistent"
/// verdict is evidence, never a proof.
template <class Scalar>
LscProbeReport<Scalar> lsc_probe(const GalleryFunction<Scalar>& f, const Point<Scalar>& x_bar, int levels,
                                 const std::optional<Grid<Scalar>>& box = std::nullopt,
                                 const LscProbeOptions<Scalar>& opts = {}) {
  if (levels < 2) fail(ErrorKind::usage, "lsc_probe needs at least 2 refinement levels");
  if (box && !box->contains(x_bar)) fail(ErrorKind::domain, "lsc_probe: point outside box");
  LscProbeReport<Scalar> report;
  report.x_bar = x_bar;
  report.value_at_point = f(x_bar);
  report.tol = opts.tol;

  std::vector<Point<Scalar>> dirs;
  if (f.dim() == 1) {
    Point<Scalar> d(1);
    d << 1;
    dirs.push_back(d);
    dirs.push_back(-d);
  } else {
    for (int q = 0; q < opts.directions; ++q) {
      const Scalar angle = Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(q) / Scalar(opts.directions);
      Point<Scalar> d(2);
      d << std::cos(angle), std::sin(angle);
      const Scalar n = box ? lp_norm(d, box->norm()) : d.norm();
      dirs.push_back(d / n);
    }
  }

  for (int level = 0; level < levels; ++level) {
    const Scalar r = opts.initial_radius * std::ldexp(Scalar(1), -level);
    ExtReal<Scalar> lowest = ExtReal<Scalar>::pos_inf();
    for (const auto& d : dirs) {
      for (int s = 1; s <= opts.samples_per_radius; ++s) {
        const Point<Scalar> x = x_bar + d * (r * Scalar(s) / Scalar(opts.samples_per_radius));
        if (box && !box->contains(x)) continue;
        lowest = std::min(lowest, f(x));
      }
    }
    report.radii.push_back(r);
    report.liminf_estimates.push_back(lowest);
  }

  const Scalar fx = report.value_at_point.value();
  const Scalar last = report.liminf_estimates.back().value();
  const Scalar prev = report.liminf_estimates[report.liminf_estimates.size() - 2].value();
  if (fx == -infinity<Scalar>() || last == infinity<Scalar>()) return report;
  const Scalar gap = fx - last;
  const Scalar rise = last == prev ? Scalar(0) : last - prev;
  if (gap > opts.tol && !(rise > opts.stall_fraction * gap)) report.verdict = LscVerdict::violated;
  return report;
}

}  // namespace lcx
