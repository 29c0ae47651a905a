#include "lcx/io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace lcx::io {

json number(double v) {
  if (v == infinity<double>()) return "inf";
  if (v == -infinity<double>()) return "-inf";
  return v;
}

double to_number(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return infinity<double>();
    if (s == "-inf") return -infinity<double>();
  }
  fail(ErrorKind::usage, "expected a number or \"inf\"/\"-inf\", got " + j.dump());
}

json to_json(const Pointd& p) {
  json a = json::array();
  for (Index i = 0; i < p.size(); ++i) a.push_back(number(p(i)));
  return a;
}

Pointd point_from_json(const json& j) {
  if (j.is_number()) return Pointd::Constant(1, j.get<double>());
  if (!j.is_array() || j.empty() || j.size() > 2) fail(ErrorKind::usage, "point must have 1 or 2 coordinates");
  Pointd p(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) p(static_cast<Index>(i)) = to_number(j[i]);
  return p;
}

json to_json(const VectorXd& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(number(v(i)));
  return a;
}

VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) fail(ErrorKind::usage, "expected an array of numbers");
  VectorXd v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = to_number(j[i]);
  return v;
}

Norm parse_norm(const std::string& s) {
  if (s == "1") return Norm::l1;
  if (s == "2") return Norm::l2;
  if (s == "inf") return Norm::linf;
  fail(ErrorKind::usage, "norm must be one of 1, 2, inf");
}

json to_json(Norm p) {
  switch (p) {
    case Norm::l1: return 1;
    case Norm::l2: return 2;
    case Norm::linf: return "inf";
  }
  return nullptr;
}

Norm norm_from_json(const json& j) {
  if (j.is_number_integer()) return parse_norm(std::to_string(j.get<int>()));
  if (j.is_string()) return parse_norm(j.get<std::string>());
  fail(ErrorKind::usage, "bad norm " + j.dump());
}

json to_json(const Gridd& g) {
  json nodes = json::array();
  for (int a = 0; a < g.dim(); ++a) nodes.push_back(g.nodes(a));
  return {{"dim", g.dim()}, {"lower", to_json(g.lower())}, {"upper", to_json(g.upper())},
          {"nodes", nodes},  {"norm", to_json(g.norm())}};
}

Gridd grid_from_json(const json& j) {
  const Pointd lo = point_from_json(j.at("lower"));
  const Pointd hi = point_from_json(j.at("upper"));
  const auto& n = j.at("nodes");
  std::array<Index, 2> nodes{1, 1};
  if (n.is_number()) {
    nodes[0] = n.get<Index>();
  } else {
    for (std::size_t a = 0; a < n.size() && a < 2; ++a) nodes[a] = n[a].get<Index>();
  }
  const Norm p = j.contains("norm") ? norm_from_json(j["norm"]) : Norm::l2;
  if (j.contains("dim") && j["dim"].get<int>() != lo.size()) fail(ErrorKind::usage, "grid dim disagrees with bounds");
  return Gridd(lo, hi, nodes, p);
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    fail(ErrorKind::usage, "not a number: '" + s + "'");
  }
  if (used != s.size()) fail(ErrorKind::usage, "not a number: '" + s + "'");
  return v;
}

}  // namespace

Gridd parse_grid(const std::string& spec, Norm p) {
  const auto axes = split(spec, ',');
  if (axes.empty() || axes.size() > 2) fail(ErrorKind::usage, "grid spec must be lo:hi:n or lo1:hi1:n1,lo2:hi2:n2");
  Pointd lo(static_cast<Index>(axes.size())), hi(static_cast<Index>(axes.size()));
  std::array<Index, 2> n{1, 1};
  for (std::size_t a = 0; a < axes.size(); ++a) {
    const auto parts = split(axes[a], ':');
    if (parts.size() != 3) fail(ErrorKind::usage, "grid axis must be lo:hi:n, got '" + axes[a] + "'");
    lo(static_cast<Index>(a)) = parse_double(parts[0]);
    hi(static_cast<Index>(a)) = parse_double(parts[1]);
    const double count = parse_double(parts[2]);
    if (count != std::floor(count)) fail(ErrorKind::usage, "node count must be an integer");
    n[a] = static_cast<Index>(count);
  }
  return Gridd(lo, hi, n, p);
}

json to_json(const SampledFunctiond& f) {
  json j = {{"kind", "samples"}, {"grid", to_json(f.grid())}, {"values", to_json(f.values())}};
  if (!f.name().empty()) j["name"] = f.name();
  return j;
}

SampledFunctiond sampled_from_json(const json& j) {
  if (j.value("kind", "samples") != "samples") fail(ErrorKind::usage, "expected kind \"samples\"");
  return SampledFunctiond(grid_from_json(j.at("grid")), vector_from_json(j.at("values")), j.value("name", ""));
}

json to_json(const SubgradientCandidated& c) {
  json j;
  if (auto* cone = std::get_if<SubgradientCandidated::Cone>(&c.form)) {
    j["form"] = "cone";
    j["slope"] = number(cone->slope);
  } else if (auto* a = std::get_if<SubgradientCandidated::Affine>(&c.form)) {
    j["form"] = "affine";
    j["slope"] = to_json(a->slope);
  } else {
    j["form"] = "grid";
    j["increments"] = to_json(std::get<SubgradientCandidated::GridForm>(c.form).increments);
  }
  j["base"] = to_json(c.base);
  j["anchor"] = number(c.anchor);
  j["orientation"] = c.orientation == Orientation::lower ? "lower" : "upper";
  return j;
}

SubgradientCandidated candidate_from_json(const json& j) {
  SubgradientCandidated c;
  const auto form = j.at("form").get<std::string>();
  if (form == "cone") c.form = SubgradientCandidated::Cone{to_number(j.at("slope"))};
  else if (form == "affine") c.form = SubgradientCandidated::Affine{point_from_json(j.at("slope"))};
  else if (form == "grid") c.form = SubgradientCandidated::GridForm{vector_from_json(j.at("increments"))};
  else fail(ErrorKind::usage, "unknown candidate form '" + form + "'");
  c.base = point_from_json(j.at("base"));
  c.anchor = to_number(j.at("anchor"));
  c.orientation = j.value("orientation", "lower") == "upper" ? Orientation::upper : Orientation::lower;
  return c;
}

json to_json(const GridMinorantd& m) {
  return {{"grid", to_json(m.grid)}, {"values", to_json(m.values)}, {"lipschitz_budget", number(m.lipschitz_budget)}};
}

json to_json(const MaximalityCertificate<double>& c) {
  json j = {{"status", to_string(c.status)},
            {"class", kMaximalityClass},
            {"lp_objective_gap", number(c.lp_objective_gap)},
            {"lipschitz_budget", number(c.lipschitz_budget)},
            {"tol_lp", number(c.tol_lp)},
            {"tol_feas", number(c.tol_feas)},
            {"degenerate_warning", c.degenerate_warning}};
  j["pin"] = c.pin ? json(*c.pin) : json(nullptr);
  j["improvement"] = c.improvement ? to_json(c.improvement->values) : json(nullptr);
  return j;
}

json to_json(const CheckReport<double>& r) {
  return {{"ok", r.ok}, {"worst_slack", number(r.worst_slack)}, {"argmin", r.argmin}, {"tol", number(r.tol)}};
}

json to_json(const CalmnessCertificate<double>& c) {
  json seq = json::array(), h = json::array(), n = json::array();
  for (double m : c.modulus_sequence) seq.push_back(number(m));
  for (double s : c.spacings) h.push_back(number(s));
  for (Index k : c.node_counts) n.push_back(k);
  return {{"x_bar", to_json(c.x_bar)},      {"modulus", number(c.modulus)},
          {"modulus_sequence", seq},        {"spacings", h},
          {"node_counts", n},               {"verdict", to_string(c.verdict)},
          {"k_cap", number(c.k_cap)},       {"stabilization_rel", number(c.stabilization_rel)}};
}

json to_json(const EkelandResult<double>& r) {
  const auto& res = r.residuals;
  return {{"x_bar", r.x_bar},
          {"x_delta", r.x_delta},
          {"epsilon", number(r.epsilon)},
          {"delta", number(r.delta)},
          {"lambda", number(r.lambda)},
          {"iterations", r.iterations()},
          {"path", r.path},
          {"residuals",
           {{"descent_slack", number(res.descent_slack)},
            {"distance", number(res.distance)},
            {"strict_min_slack", number(res.strict_min_slack)},
            {"support_gap", number(res.support_gap)},
            {"minorant_excess", number(res.minorant_excess)}}},
          {"invariants_hold", r.invariants_hold()},
          {"tol", number(r.tol)},
          {"support", to_json(r.support)}};
}

json to_json(const DensityScan<double>& d) {
  json pts = json::array();
  for (const auto& p : d.points) {
    pts.push_back({{"scan_node", p.scan_node},
                   {"x_delta", p.result.x_delta},
                   {"gap", number(p.gap)},
                   {"epsilon", number(p.result.epsilon)},
                   {"distance", number(p.result.residuals.distance)},
                   {"invariants_hold", p.result.invariants_hold()}});
  }
  return {{"points", pts},
          {"certified", d.certified},
          {"covering_radius", number(d.covering_radius)},
          {"covering_argmax", d.covering_argmax},
          {"k", number(d.k)},
          {"delta", number(d.delta)},
          {"stride", d.stride},
          {"all_invariants_hold", d.all_invariants_hold()}};
}

namespace {

json to_json(const SlopeInterval<double>& s) {
  return {{"s_plus", number(s.right)}, {"s_minus", number(s.left)}, {"one_sided", s.one_sided}};
}

}  // namespace

json to_json(const ExtremumCertificate<double>& c) {
  json j = {{"kind", to_string(c.kind)},
            {"x_bar", c.x_bar},
            {"holds", c.holds},
            {"status", c.status()},
            {"hypothesis_met", c.hypothesis_met},
            {"direct_verdict", c.direct_verdict},
            {"membership_verdict", c.membership_verdict},
            {"consistent", c.consistent},
            {"boundary", c.boundary},
            {"worst_slack", number(c.worst_slack)},
            {"reading", c.reading},
            {"tol", number(c.tol)}};
  j["witness"] = c.witness ? to_json(*c.witness) : json(nullptr);
  j["violating_node"] = c.violating_node ? json(*c.violating_node) : json(nullptr);
  j["zero_maximality"] = c.zero_maximality ? json(to_string(*c.zero_maximality)) : json(nullptr);
  json iv = json::array();
  for (const auto& s : c.intervals) iv.push_back(to_json(s));
  j["intervals"] = iv;
  j["classical_interval"] = c.classical_interval ? to_json(*c.classical_interval) : json(nullptr);
  return j;
}

json to_json(const AffineTwoSidedReport<double>& r) {
  return {{"status", to_string(r.status)},
          {"lower_holds", r.lower_holds},
          {"upper_holds", r.upper_holds},
          {"lower_worst", number(r.lower_worst)},
          {"upper_worst", number(r.upper_worst)},
          {"slope_gap", number(r.slope_gap)},
          {"max_affine_deviation", number(r.max_affine_deviation)},
          {"tol", number(r.tol)}};
}

json to_json(const LcConvexityReport<double>& r) {
  json probes = json::array();
  for (const auto& p : r.lsc_reports) {
    json est = json::array();
    for (const auto& e : p.liminf_estimates) est.push_back(number(e.value()));
    probes.push_back({{"x_bar", to_json(p.x_bar)},
                      {"value", number(p.value_at_point.value())},
                      {"liminf_estimates", est},
                      {"verdict", to_string(p.verdict)}});
  }
  json j = {{"verdict", r.verdict()},
            {"lc_convex", r.lc_convex},
            {"lsc_consistent", r.lsc_consistent},
            {"boundary_attained", r.boundary_attained},
            {"lsc_probes", probes}};
  j["witness_k"] = r.witness_k ? number(*r.witness_k) : json(nullptr);
  j["witness"] = r.witness ? to_json(r.witness->values()) : json(nullptr);
  return j;
}

std::string format_number(double v) {
  if (v == infinity<double>()) return "inf";
  if (v == -infinity<double>()) return "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_columns_csv(std::ostream& os, const std::vector<std::string>& header, const std::vector<VectorXd>& cols) {
  for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
  os << '\n';
  const Index rows = cols.empty() ? 0 : cols.front().size();
  for (Index r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << format_number(cols[c](r));
    os << '\n';
  }
}

void write_envelope_csv(std::ostream& os, const SampledFunctiond& f, const VectorXd& lower, const VectorXd& upper) {
  const auto& g = f.grid();
  const MatrixX<double> X = g.coordinates();
  std::vector<std::string> header;
  std::vector<VectorXd> cols;
  for (int a = 0; a < g.dim(); ++a) {
    header.push_back(g.dim() == 1 ? "x" : "x" + std::to_string(a));
    cols.emplace_back(X.row(a).transpose());
  }
  header.insert(header.end(), {"f", "lower", "upper"});
  cols.insert(cols.end(), {f.values(), lower, upper});
  write_columns_csv(os, header, cols);
}

void write_density_csv(std::ostream& os, const Gridd& g, const DensityScan<double>& d) {
  const auto n = static_cast<Index>(d.points.size());
  std::vector<std::string> header;
  std::vector<VectorXd> cols;
  for (int a = 0; a < g.dim(); ++a) {
    const std::string s = g.dim() == 1 ? "" : std::to_string(a);
    header.push_back("x_bar" + s);
    header.push_back("x_delta" + s);
  }
  for (int a = 0; a < g.dim(); ++a) {
    VectorXd bar(n), del(n);
    for (Index i = 0; i < n; ++i) {
      const auto& p = d.points[static_cast<std::size_t>(i)];
      bar(i) = g.node(p.scan_node)(a);
      del(i) = g.node(p.result.x_delta)(a);
    }
    cols.push_back(bar);
    cols.push_back(del);
  }
  VectorXd dist(n), eps(n), gap(n);
  for (Index i = 0; i < n; ++i) {
    const auto& p = d.points[static_cast<std::size_t>(i)];
    dist(i) = p.result.residuals.distance;
    eps(i) = p.result.epsilon;
    gap(i) = p.gap;
  }
  header.insert(header.end(), {"distance", "epsilon", "gap"});
  cols.insert(cols.end(), {dist, eps, gap});
  write_columns_csv(os, header, cols);
}

}  // namespace lcx::io
