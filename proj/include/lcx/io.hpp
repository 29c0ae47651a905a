#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "lcx/lcx.hpp"

namespace lcx::io {

using json = nlohmann::json;

/// Numbers with +-inf written as the strings "inf" / "-inf".
json number(double v);
double to_number(const json& j);

json to_json(const Pointd& p);
Pointd point_from_json(const json& j);
json to_json(const VectorXd& v);
VectorXd vector_from_json(const json& j);

Norm parse_norm(const std::string& s);
json to_json(Norm p);
Norm norm_from_json(const json& j);

json to_json(const Gridd& g);
Gridd grid_from_json(const json& j);

/// `lo:hi:n` or `lo1:hi1:n1,lo2:hi2:n2`.
Gridd parse_grid(const std::string& spec, Norm p);

/// {"kind":"samples","grid":{...},"values":[...]}
json to_json(const SampledFunctiond& f);
SampledFunctiond sampled_from_json(const json& j);

json to_json(const SubgradientCandidated& c);
SubgradientCandidated candidate_from_json(const json& j);

json to_json(const GridMinorantd& m);
json to_json(const MaximalityCertificate<double>& c);
json to_json(const CheckReport<double>& r);
json to_json(const CalmnessCertificate<double>& c);
json to_json(const EkelandResult<double>& r);
json to_json(const DensityScan<double>& d);
json to_json(const ExtremumCertificate<double>& c);
json to_json(const AffineTwoSidedReport<double>& r);
json to_json(const LcConvexityReport<double>& r);

/// Full-precision decimal form used in every CSV column.
std::string format_number(double v);

/// x (one column per axis), f, lower, upper.
void write_envelope_csv(std::ostream& os, const SampledFunctiond& f, const VectorXd& lower, const VectorXd& upper);

/// scan node coordinates, x_delta coordinates, distance, epsilon, gap.
void write_density_csv(std::ostream& os, const Gridd& g, const DensityScan<double>& d);

/// Generic columns: header names then rows of numbers.
void write_columns_csv(std::ostream& os, const std::vector<std::string>& header, const std::vector<VectorXd>& cols);

}  // namespace lcx::io
