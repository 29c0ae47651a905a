#include "lcx/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

namespace lcx::cli {

using io::json;
using io::number;
using io::to_number;

namespace {

struct Options {
  std::string command;
  std::string fn, fn2, grid, norm = "2", at, cand, cand2, slopes, rule, kind, out, csv, verify_file;
  std::optional<double> k, K, eps, delta, lambda, slope;
  int levels = 5;
  long stride = 10;
  std::optional<double> tol_feas, tol_lp;
  unsigned long seed = 0;
  bool verify = false;
  bool list = false;
  bool thin = false;
  bool norm_given = false;
};

// ---------------------------------------------------------------------------
// function sources

struct Source {
  std::optional<GalleryFunctiond> gallery;
  std::optional<SampledFunctiond> samples;
  json spec;

  int dim() const { return gallery ? gallery->dim() : samples->grid().dim(); }

  SampledFunctiond on(const Gridd& g) const {
    if (gallery) return sample(*gallery, g);
    if (!(samples->grid().lower() == g.lower() && samples->grid().upper() == g.upper() &&
          samples->size() == g.size()))
      fail(ErrorKind::usage, "sampled function does not live on the requested grid");
    return SampledFunctiond(g, samples->values(), samples->name());
  }
};

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

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::usage, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::usage, "'" + path + "' is not valid JSON: " + e.what());
  }
}

Source source_from_spec(const json& spec) {
  const auto kind = spec.value("kind", "");
  Source s;
  s.spec = spec;
  if (kind == "samples") {
    s.samples = io::sampled_from_json(spec);
    return s;
  }
  if (kind == "neg") {
    auto inner = source_from_spec(spec.at("of"));
    if (inner.samples) {
      s.samples = negate(*inner.samples);
    } else {
      auto g = *inner.gallery;
      s.gallery = GalleryFunctiond::custom("neg_" + g.name(), g.dim(), [g](const Pointd& x) { return -g(x); });
    }
    return s;
  }
  if (kind != "gallery") fail(ErrorKind::usage, "function spec needs kind gallery, samples or neg");
  const auto id = spec.at("id").get<std::string>();
  if (id == "affine") {
    s.gallery = GalleryFunctiond::affine(to_number(spec.at("a")), to_number(spec.at("b")));
  } else if (id == "pwl") {
    std::vector<std::pair<double, double>> knots;
    for (const auto& k : spec.at("knots")) knots.emplace_back(to_number(k.at(0)), to_number(k.at(1)));
    s.gallery = GalleryFunctiond::piecewise_linear(knots);
  } else {
    auto g = GalleryFunctiond::from_id(id);
    if (!g) fail(ErrorKind::usage, "unknown gallery id '" + id + "'");
    s.gallery = *g;
  }
  return s;
}

Gridd default_grid(int dim, Norm p) {
  return dim == 1 ? io::parse_grid("-1:1:201", p) : io::parse_grid("-1:1:41,-1:1:41", p);
}

// ---------------------------------------------------------------------------
// shared run state

struct Context {
  Options o;
  Tolerances tol;
  Source src;
  Gridd grid;
  SampledFunctiond f;
  json input;
  std::ostream* out;
};

Pointd parse_point(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.empty() || parts.size() > 2) fail(ErrorKind::usage, "--at takes x or x,y");
  Pointd p(static_cast<Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) p(static_cast<Index>(i)) = parse_double(parts[i]);
  return p;
}

Index require_at(const Context& c) {
  if (c.o.at.empty()) fail(ErrorKind::usage, c.o.command + " needs --at");
  return c.grid.require_node(parse_point(c.o.at));
}

/// `cone:k`, `affine:s` / `affine:s1,s2`, or a candidate JSON (inline or file).
SubgradientCandidated parse_candidate(const std::string& s, const SampledFunctiond& f, Index at) {
  const Pointd base = f.grid().node(at);
  if (!s.empty() && (s.front() == '{' || s.find(':') == std::string::npos)) {
    auto c = io::candidate_from_json(s.front() == '{' ? json::parse(s) : read_json_file(s));
    if (f.grid().require_node(c.base) != at) fail(ErrorKind::usage, "candidate base differs from --at");
    return c;
  }
  const auto colon = s.find(':');
  const auto form = s.substr(0, colon);
  const auto args = split(s.substr(colon + 1), ',');
  if (form == "cone" && args.size() == 1) return SubgradientCandidated::cone(base, f[at], parse_double(args[0]));
  if (form == "affine" && static_cast<Index>(args.size()) == f.grid().dim()) {
    Pointd slope(f.grid().dim());
    for (std::size_t i = 0; i < args.size(); ++i) slope(static_cast<Index>(i)) = parse_double(args[i]);
    return SubgradientCandidated::affine(base, f[at], slope);
  }
  fail(ErrorKind::usage, "candidate must be cone:k or affine:s[,s2], got '" + s + "'");
}

void write_csv_file(const std::string& path, const std::function<void(std::ostream&)>& writer) {
  std::ofstream os(path);
  if (!os) fail(ErrorKind::usage, "cannot write '" + path + "'");
  writer(os);
}

json document(const Context& c, json result) {
  return {{"command", c.o.command}, {"input", c.input}, {"result", std::move(result)}};
}

Index max_node(const SampledFunctiond& f) {
  Index best = -1;
  for (Index j = 0; j < f.size(); ++j)
    if (f.is_finite(j) && (best < 0 || f[j] > f[best])) best = j;
  return best;
}

Index min_node(const SampledFunctiond& f) {
  Index best = -1;
  for (Index j = 0; j < f.size(); ++j)
    if (f.is_finite(j) && (best < 0 || f[j] < f[best])) best = j;
  return best;
}

// ---------------------------------------------------------------------------
// commands

json cmd_envelope(Context& c) {
  if (!c.o.k) fail(ErrorKind::usage, "envelope needs --k");
  const double k = *c.o.k;
  const auto lower = lipschitz_lower_envelope(c.f, k);
  const auto upper = lipschitz_upper_envelope(c.f, k);
  double up = 0, lo = 0;
  for (Index j = 0; j < c.f.size(); ++j) {
    if (!c.f.is_finite(j)) continue;
    up = std::max(up, std::abs(upper[j] - c.f[j]));
    lo = std::max(lo, std::abs(c.f[j] - lower[j]));
  }
  auto writer = [&](std::ostream& os) { io::write_envelope_csv(os, c.f, lower.values(), upper.values()); };
  if (!c.o.csv.empty()) write_csv_file(c.o.csv, writer);
  else if (c.o.out.empty()) writer(*c.out);
  return document(c, {{"k", number(k)},
                      {"lower", io::to_json(lower.values())},
                      {"upper", io::to_json(upper.values())},
                      {"max_upper_minus_f", number(up)},
                      {"max_f_minus_lower", number(lo)}});
}

json cmd_modulus(Context& c) {
  const double m = lipschitz_modulus(c.f).value();
  json pair = nullptr;
  const auto dom = c.f.effective_domain();
  double best = -1;
  for (std::size_t a = 0; a < dom.size(); ++a)
    for (std::size_t b = a + 1; b < dom.size(); ++b) {
      const double q = std::abs(c.f[dom[a]] - c.f[dom[b]]) / c.grid.distance(dom[a], dom[b]);
      if (q > best) {
        best = q;
        pair = {dom[a], dom[b]};
      }
    }
  return document(c, {{"modulus", number(m)}, {"attained_at", pair}});
}

std::vector<double> default_k_schedule() {
  std::vector<double> ks;
  for (int i = 0; i <= 12; ++i) ks.push_back(std::ldexp(1.0, i));
  return ks;
}

json cmd_lctest(Context& c) {
  if (!c.src.gallery) fail(ErrorKind::usage, "lctest needs a closed-form function (gallery or neg:gallery)");
  const auto ks = c.o.k ? std::vector<double>{*c.o.k} : default_k_schedule();
  const auto r = lc_convexity_test(*c.src.gallery, c.grid, ks);
  json res = io::to_json(r);
  res["k_schedule"] = ks;
  return document(c, res);
}

json cmd_maximal(Context& c) {
  if (c.grid.dim() != 1) fail(ErrorKind::usage, "maximal runs on 1-D grids only");
  require_proper_no_neg_inf(c.f, "maximal");
  VectorXd seed;
  std::optional<Index> pin;
  double seed_lip = 0;
  if (!c.o.at.empty()) {
    const Index at = require_at(c);
    const auto cand = c.o.cand.empty() ? cone_subgradient(c.f, at) : parse_candidate(c.o.cand, c.f, at);
    seed = (cand.increments(c.grid).array() + c.f[at]).matrix();
    seed_lip = cand.lipschitz_bound(c.grid);
    pin = at;
  } else {
    seed = VectorXd::Constant(c.f.size(), c.f[min_node(c.f)]);
  }
  const double K = c.o.K ? *c.o.K : std::max(default_lipschitz_budget(c.f), seed_lip);
  MaximalMinorantOptions<double> opts;
  opts.pin = pin;
  opts.tol = c.tol;
  const auto r = maximal_minorant(c.f, GridMinorantd{c.grid, seed, K}, K, opts);
  const auto touch = touching_nodes(r.minorant.values, c.f, c.f.feasibility_tolerance(c.tol));
  if (!c.o.csv.empty())
    write_csv_file(c.o.csv, [&](std::ostream& os) {
      io::write_columns_csv(os, {"x", "f", "seed", "v"},
                            {c.grid.coordinates().row(0).transpose(), c.f.values(), seed, r.minorant.values});
    });
  c.input["K"] = number(K);
  return document(c, {{"seed", io::to_json(seed)},
                      {"minorant", io::to_json(r.minorant)},
                      {"certificate", io::to_json(r.certificate)},
                      {"touching", touch}});
}

Gridd slope_grid(const Context& c) {
  return io::parse_grid(c.o.slopes.empty() ? "-4:4:161" : c.o.slopes, Norm::l2);
}

json cmd_lft(Context& c) {
  const Gridd slopes = slope_grid(c);
  const auto r = legendre_fenchel(c.f, slopes);
  json res = {{"slopes", io::to_json(slopes)},
              {"conjugate", io::to_json(r.conjugate.values())},
              {"argmax", r.argmax},
              {"boundary_attained", r.boundary_attained},
              {"any_boundary", r.any_boundary()}};
  if (c.o.slope) {
    const auto m = affine_maximal_minorant(c.f, *c.o.slope, c.tol);
    const auto v = validate(m, c.f, c.f.feasibility_tolerance(c.tol));
    res["affine_minorant"] = {{"slope", number(*c.o.slope)},
                              {"values", io::to_json(m.values)},
                              {"valid", v.ok()},
                              {"touching", touching_nodes(m.values, c.f, c.f.feasibility_tolerance(c.tol))}};
  }
  if (!c.o.csv.empty())
    write_csv_file(c.o.csv, [&](std::ostream& os) {
      io::write_columns_csv(os, {"s", "conjugate"}, {slopes.coordinates().row(0).transpose(), r.conjugate.values()});
    });
  c.input["slopes"] = io::to_json(slopes);
  return document(c, res);
}

json cmd_calm(Context& c) {
  if (!c.src.gallery) fail(ErrorKind::usage, "calm refines the grid and needs a closed-form function");
  if (c.o.at.empty()) fail(ErrorKind::usage, "calm needs --at");
  const double cap = c.o.K ? *c.o.K : 100.0;
  const auto cert = subdifferentiability_oracle(*c.src.gallery, parse_point(c.o.at), c.grid, c.o.levels, cap);
  c.input["levels"] = c.o.levels;
  c.input["K"] = number(cap);
  return document(c, io::to_json(cert));
}

json cmd_subgrad(Context& c) {
  const Index at = require_at(c);
  const std::string kind = c.o.kind.empty() ? "sub" : c.o.kind;
  const double t = c.f.feasibility_tolerance(c.tol);
  c.input["kind"] = kind;
  if (kind == "affine") {
    if (c.o.cand.empty() || c.o.cand2.empty()) fail(ErrorKind::usage, "subgrad --kind affine needs --cand and --cand2");
    const auto c1 = parse_candidate(c.o.cand, c.f, at);
    const auto c2 = parse_candidate(c.o.cand2, c.f, at);
    auto* a1 = std::get_if<SubgradientCandidated::Affine>(&c1.form);
    auto* a2 = std::get_if<SubgradientCandidated::Affine>(&c2.form);
    if (!a1 || !a2) fail(ErrorKind::usage, "two-sided test takes affine candidates");
    const auto r = affine_two_sided_test(c.f, at, a1->slope, a2->slope, c.tol);
    return document(c, {{"x_bar", at},
                        {"lower", io::to_json(c1)},
                        {"upper", io::to_json(c2)},
                        {"report", io::to_json(r)}});
  }
  if (kind != "sub" && kind != "super") fail(ErrorKind::usage, "--kind must be sub, super or affine");
  const bool super = kind == "super";
  SubgradientCandidated cand = c.o.cand.empty() ? (super ? cone_supergradient(c.f, at) : cone_subgradient(c.f, at))
                                                : parse_candidate(c.o.cand, c.f, at);
  // a user-written candidate for a supergradient check is read as the convex form
  if (super && !c.o.cand.empty() && cand.orientation == Orientation::lower) {
    cand = negate(cand);
    cand.anchor = c.f[at];
  }
  const auto r = super ? check_supergradient(c.f, cand, t) : check_subgradient(c.f, cand, t);
  return document(c, {{"x_bar", at}, {"candidate", io::to_json(cand)}, {"check", io::to_json(r)}});
}

json cmd_maxcheck(Context& c) {
  if (c.grid.dim() != 1) fail(ErrorKind::usage, "maxcheck runs on 1-D grids only");
  const Index at = require_at(c);
  const auto cand = c.o.cand.empty() ? cone_subgradient(c.f, at) : parse_candidate(c.o.cand, c.f, at);
  const double K = c.o.K ? *c.o.K : std::max(default_lipschitz_budget(c.f), cand.lipschitz_bound(c.grid));
  const auto cert = check_maximality(c.f, cand, K, c.tol);
  c.input["K"] = number(K);
  return document(c, {{"x_bar", at}, {"candidate", io::to_json(cand)}, {"certificate", io::to_json(cert)}});
}

/// The cone E_k^- f(x_bar) - k ||x - x_bar||, a concave minorant of f.
VectorXd ekeland_minorant(const SampledFunctiond& f, Index at, double k) {
  const auto env = lipschitz_lower_envelope(f, k);
  return sample(ConeFunctiond{f.grid().node(at), k, env[at]}, f.grid());
}

json cmd_ekeland(Context& c) {
  const Index at = require_at(c);
  require_proper_no_neg_inf(c.f, "ekeland");
  const double k = c.o.k ? *c.o.k : 1.0;
  const VectorXd h = ekeland_minorant(c.f, at, k);
  const double gap = c.f[at] - h(at);
  double eps = c.o.eps ? *c.o.eps : gap;
  if (!(eps > 0)) eps = c.f.feasibility_tolerance(c.tol);
  const double delta = c.o.delta ? *c.o.delta : std::sqrt(eps);
  const auto r = ekeland_refine(c.f, h, at, eps, delta, c.tol);
  if (!c.o.csv.empty())
    write_csv_file(c.o.csv, [&](std::ostream& os) {
      io::write_columns_csv(os, {"x", "f", "h", "h_bar"},
                            {c.grid.coordinates().row(0).transpose(), c.f.values(), h, r.h_bar});
    });
  c.input["k"] = number(k);
  c.input["eps"] = number(eps);
  c.input["delta"] = number(delta);
  json res = io::to_json(r);
  res["gap"] = number(gap);
  res["x_delta_point"] = io::to_json(c.grid.node(r.x_delta));
  return document(c, res);
}

json cmd_density(Context& c) {
  const double k = c.o.k ? *c.o.k : 1.0;
  double h = c.grid.spacing(0);
  for (int a = 1; a < c.grid.dim(); ++a) h = std::min(h, c.grid.spacing(a));
  const double delta = c.o.delta ? *c.o.delta : 2 * h;
  const auto d = density_scan(c.f, c.o.eps, delta, k, static_cast<Index>(c.o.stride), c.tol);
  if (!c.o.csv.empty()) write_csv_file(c.o.csv, [&](std::ostream& os) { io::write_density_csv(os, c.grid, d); });
  c.input["k"] = number(k);
  c.input["delta"] = number(delta);
  c.input["stride"] = c.o.stride;
  c.input["eps"] = c.o.eps ? number(*c.o.eps) : json(nullptr);
  json res = io::to_json(d);
  res["bound"] = number(delta + double(c.o.stride) * h);
  return document(c, res);
}

json cmd_extremum(Context& c) {
  const Index at = require_at(c);
  const std::string kind = c.o.kind.empty() ? "min" : c.o.kind;
  c.input["kind"] = kind;
  if (kind == "min") return document(c, io::to_json(global_min_certificate(c.f, at, c.o.thin, c.tol)));
  if (kind == "max") return document(c, io::to_json(global_max_certificate(c.f, at, c.o.thin, c.tol)));
  if (kind == "maxnec") {
    const double k = c.o.k ? *c.o.k : calmness_modulus(c.f, at);
    const GridMinorantd h{c.grid, sample(ConeFunctiond{c.grid.node(at), k, c.f[at]}, c.grid), k};
    c.input["k"] = number(k);
    return document(c, io::to_json(max_necessary_condition(c.f, at, {h}, c.tol)));
  }
  fail(ErrorKind::usage, "--kind must be min, max or maxnec");
}

json cmd_calculus(Context& c, const std::optional<Source>& src2) {
  const Index at = require_at(c);
  const std::string rule = c.o.rule.empty() ? "scaling" : c.o.rule;
  c.input["rule"] = rule;
  if (rule == "scaling") {
    const double lambda = c.o.lambda ? *c.o.lambda : 2.0;
    auto cand = c.o.cand.empty() ? (lambda > 0 ? cone_subgradient(c.f, at) : cone_supergradient(c.f, at))
                                 : parse_candidate(c.o.cand, c.f, at);
    if (lambda < 0 && !c.o.cand.empty() && cand.orientation == Orientation::lower) {
      cand = negate(cand);
      cand.anchor = c.f[at];
    }
    const auto r = calculus_scaling_check(c.f, at, lambda, cand, c.tol);
    c.input["lambda"] = number(lambda);
    return document(c, {{"holds", r.ok},
                        {"candidate", io::to_json(cand)},
                        {"scaled_candidate", io::to_json(scale(cand, lambda))},
                        {"check", io::to_json(r)}});
  }
  if (!src2) fail(ErrorKind::usage, "calculus --rule " + rule + " needs --fn2");
  const auto f2 = src2->on(c.grid);
  if (rule == "sum") {
    const auto c1 = c.o.cand.empty() ? cone_subgradient(c.f, at) : parse_candidate(c.o.cand, c.f, at);
    const auto c2 = c.o.cand2.empty() ? cone_subgradient(f2, at) : parse_candidate(c.o.cand2, f2, at);
    const auto r = calculus_sum_check(c.f, f2, at, c1, c2, c.tol);
    return document(c, {{"holds", r.ok},
                        {"c1", io::to_json(c1)},
                        {"c2", io::to_json(c2)},
                        {"sum", io::to_json(sum(c1, c2, c.grid))},
                        {"check", io::to_json(r)}});
  }
  if (rule == "domination") {
    const auto l1 = c.o.cand.empty() ? cone_subgradient(c.f, at) : parse_candidate(c.o.cand, c.f, at);
    const auto d = calculus_domination_check(c.f, f2, at, l1, c.tol);
    return document(c, {{"holds", d.holds},
                        {"l1", io::to_json(l1)},
                        {"minorant", io::to_json(d.minorant)},
                        {"certificate", io::to_json(d.certificate)},
                        {"domination_slack", number(d.domination_slack)},
                        {"pin_gap", number(d.pin_gap)},
                        {"valid", d.valid}});
  }
  fail(ErrorKind::usage, "--rule must be scaling, sum or domination");
}

// ---------------------------------------------------------------------------
// independent verification

struct Checks {
  json items = json::object();
  bool all = true;
  void add(const std::string& name, bool ok) {
    items[name] = ok;
    all = all && ok;
  }
  json result() const { return {{"verified", all}, {"checks", items}}; }
};

/// max over finite pairs of |v_i - v_j| - k ||x_i - x_j||.
double lipschitz_excess(const Gridd& g, const VectorXd& v, double k) {
  double worst = -infinity<double>();
  for (Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i))) continue;
    for (Index j = i + 1; j < v.size(); ++j)
      if (std::isfinite(v(j))) worst = std::max(worst, std::abs(v(i) - v(j)) - k * g.distance(i, j));
  }
  return worst;
}

/// min over finite x of f(x) - support(x).
double support_slack(const SampledFunctiond& f, const VectorXd& support) {
  double worst = infinity<double>();
  for (Index x = 0; x < f.size(); ++x)
    if (f[x] != infinity<double>()) worst = std::min(worst, f[x] - support(x));
  return worst;
}

/// l(x - x_bar) recomputed from the candidate fields, orientation applied.
VectorXd candidate_values(const json& cand, const Gridd& g) {
  const Pointd base = io::point_from_json(cand.at("base"));
  const auto form = cand.at("form").get<std::string>();
  VectorXd v(g.size());
  if (form == "grid") {
    v = io::vector_from_json(cand.at("increments"));
  } else {
    for (Index j = 0; j < g.size(); ++j) {
      const Pointd d = g.node(j) - base;
      v(j) = form == "cone" ? -to_number(cand.at("slope")) * lp_norm(d, g.norm())
                            : io::point_from_json(cand.at("slope")).dot(d);
    }
  }
  return cand.value("orientation", "lower") == "upper" ? VectorXd(-v) : v;
}

Tolerances tolerances_of(const json& input) {
  Tolerances t;
  t.feas_rel = input.at("tolerances").at("feas_rel").get<double>();
  t.lp_rel = input.at("tolerances").at("lp_rel").get<double>();
  return t;
}

json verify_impl(const json& doc) {
  const auto& input = doc.at("input");
  const auto& res = doc.at("result");
  const std::string cmd = doc.at("command").get<std::string>();
  const Source src = source_from_spec(input.at("fn"));
  const Gridd g = io::grid_from_json(input.at("grid"));
  const SampledFunctiond f = src.on(g);
  const Tolerances tol = tolerances_of(input);
  const double tf = f.feasibility_tolerance(tol);
  Checks ch;

  if (cmd == "envelope") {
    const double k = to_number(res.at("k"));
    const VectorXd lo = io::vector_from_json(res.at("lower")), up = io::vector_from_json(res.at("upper"));
    ch.add("lower_below_f", support_slack(f, lo) >= -tf);
    ch.add("upper_above_f", support_slack(negate(f), -up) >= -tf);
    ch.add("lower_k_lipschitz", lipschitz_excess(g, lo, k) <= tf);
    ch.add("upper_k_lipschitz", lipschitz_excess(g, up, k) <= tf);
    bool attained = true;
    for (Index x = 0; x < g.size(); ++x) {
      double best = infinity<double>();
      for (Index y : f.effective_domain()) best = std::min(best, f[y] + k * g.distance(x, y));
      attained = attained && std::abs(best - lo(x)) <= tf;
    }
    ch.add("lower_equals_inf_convolution", attained);
  } else if (cmd == "modulus") {
    const double m = to_number(res.at("modulus"));
    ch.add("pairs_within_modulus", lipschitz_excess(g, f.values(), m) <= tf);
    if (!res.at("attained_at").is_null()) {
      const Index a = res["attained_at"][0].get<Index>(), b = res["attained_at"][1].get<Index>();
      ch.add("modulus_attained", std::abs(f[a] - f[b]) / g.distance(a, b) >= m - tf);
    }
  } else if (cmd == "lctest") {
    const bool claimed = res.at("lc_convex").get<bool>();
    if (!res.at("witness").is_null()) {
      const VectorXd w = io::vector_from_json(res["witness"]);
      const double k = to_number(res.at("witness_k"));
      ch.add("witness_finite", w.allFinite());
      ch.add("witness_below_f", support_slack(f, w) >= -tf);
      ch.add("witness_k_lipschitz", lipschitz_excess(g, w, k) <= tf);
    }
    bool lsc = true;
    for (const auto& p : res.at("lsc_probes")) lsc = lsc && p.at("verdict").get<std::string>() == to_string(LscVerdict::consistent);
    ch.add("verdict_matches_evidence", claimed == (!res.at("witness").is_null() && lsc));
  } else if (cmd == "maximal" || cmd == "maxcheck") {
    const double K = to_number(input.at("K"));
    const auto& cert = res.at("certificate");
    MaximalMinorantOptions<double> opts;
    opts.tol = tol;
    if (!cert.at("pin").is_null()) opts.pin = cert["pin"].get<Index>();
    VectorXd v;
    if (cmd == "maximal") {
      v = io::vector_from_json(res.at("minorant").at("values"));
    } else {
      const Index at = res.at("x_bar").get<Index>();
      v = (candidate_values(res.at("candidate"), g).array() + f[at]).matrix();
    }
    const GridMinorantd m{g, v, K};
    const auto val = validate(m, f, tf);
    ch.add("minorant", val.minorant());
    ch.add("concave", val.concave());
    ch.add("k_lipschitz", val.lipschitz());
    if (opts.pin) ch.add("pinned", std::abs(v(*opts.pin) - f[*opts.pin]) <= tf);
    const auto again = certify_maximality(f, m, K, opts);
    ch.add("status_reproduced", to_string(again.status) == cert.at("status").get<std::string>());
    if (!cert.at("improvement").is_null()) {
      const VectorXd better = io::vector_from_json(cert["improvement"]);
      ch.add("improvement_dominates", (better - v).minCoeff() >= -tf && (better - v).maxCoeff() > tf);
      ch.add("improvement_valid", validate(GridMinorantd{g, better, K}, f, tf).ok());
    }
  } else if (cmd == "lft") {
    const Gridd slopes = io::grid_from_json(input.at("slopes"));
    const VectorXd conj = io::vector_from_json(res.at("conjugate"));
    const auto argmax = res.at("argmax").get<std::vector<Index>>();
    bool young = true, equality = true;
    for (Index i = 0; i < slopes.size(); ++i) {
      const double s = slopes.coordinate(0, i);
      for (Index x : f.effective_domain()) young = young && f[x] + conj(i) >= s * g.coordinate(0, x) - tf;
      const Index a = argmax[static_cast<std::size_t>(i)];
      equality = equality && std::abs(f[a] + conj(i) - s * g.coordinate(0, a)) <= tf;
    }
    ch.add("fenchel_young", young);
    ch.add("equality_at_argmax", equality);
    if (res.contains("affine_minorant")) {
      const VectorXd v = io::vector_from_json(res["affine_minorant"].at("values"));
      ch.add("affine_below_f", support_slack(f, v) >= -tf);
      ch.add("affine_touches", !res["affine_minorant"].at("touching").empty());
    }
  } else if (cmd == "calm") {
    const auto seq = res.at("modulus_sequence");
    const Pointd x_bar = io::point_from_json(res.at("x_bar"));
    bool ok = true;
    for (std::size_t level = 0; level < seq.size(); ++level) {
      const Gridd gl = g.refined(static_cast<int>(level));
      const auto fl = src.on(gl);
      const Index at = gl.require_node(x_bar);
      const double m = to_number(seq[level]);
      double tight = 0;
      for (Index x = 0; x < gl.size(); ++x) {
        if (x == at || fl[x] == infinity<double>()) continue;
        const double d = gl.distance(x, at);
        ok = ok && fl[x] >= fl[at] - m * d - fl.feasibility_tolerance(tol);
        tight = std::max(tight, (fl[at] - fl[x]) / d);
      }
      ok = ok && std::abs(tight - m) <= fl.feasibility_tolerance(tol) * (1 + m);
    }
    ch.add("moduli_reproduced", ok);
    std::vector<double> m;
    for (const auto& v : seq) m.push_back(to_number(v));
    const double cap = to_number(res.at("k_cap")), rel_cap = to_number(res.at("stabilization_rel"));
    const double a = m[m.size() - 2], b = m.back();
    const double rel = a == b ? 0.0 : std::abs(b - a) / std::max(std::abs(a), std::abs(b));
    std::string verdict = "inconclusive";
    if (std::all_of(m.begin(), m.end(), [&](double v) { return v <= cap; }) && rel <= rel_cap)
      verdict = "subdifferentiable";
    else if (std::is_sorted(m.begin(), m.end()) && (b > cap || rel > rel_cap))
      verdict = "diverging";
    ch.add("verdict_reproduced", verdict == res.at("verdict").get<std::string>());
  } else if (cmd == "subgrad") {
    const Index at = res.at("x_bar").get<Index>();
    if (input.at("kind") == "affine") {
      const VectorXd lower = (candidate_values(res.at("lower"), g).array() + f[at]).matrix();
      const VectorXd upper = (candidate_values(res.at("upper"), g).array() + f[at]).matrix();
      const bool lo_ok = support_slack(f, lower) >= -tf;
      double up_slack = infinity<double>();
      for (Index x = 0; x < f.size(); ++x) up_slack = std::min(up_slack, upper(x) - f[x]);
      const bool up_ok = up_slack >= -tf;
      const auto& rep = res.at("report");
      ch.add("lower_reproduced", lo_ok == rep.at("lower_holds").get<bool>());
      ch.add("upper_reproduced", up_ok == rep.at("upper_holds").get<bool>());
    } else {
      const VectorXd l = candidate_values(res.at("candidate"), g);
      double worst = infinity<double>();
      const bool super = input.at("kind") == "super";
      for (Index x = 0; x < f.size(); ++x) {
        if ((super ? -f[x] : f[x]) == infinity<double>()) continue;
        const double slack = super ? l(x) - (f[x] - f[at]) : (f[x] - f[at]) - l(x);
        worst = std::min(worst, slack);
      }
      ch.add("verdict_reproduced", (worst >= -tf) == res.at("check").at("ok").get<bool>());
    }
  } else if (cmd == "ekeland") {
    const Index at = res.at("x_bar").get<Index>(), xd = res.at("x_delta").get<Index>();
    const double k = to_number(input.at("k")), eps = to_number(input.at("eps")), delta = to_number(input.at("delta"));
    const VectorXd h = ekeland_minorant(f, at, k);
    const double lambda = eps / delta;
    auto gfun = [&](Index x) { return f[x] - h(x); };
    ch.add("h_below_f", support_slack(f, h) >= -tf);
    ch.add("epsilon_gap", h(at) + eps >= f[at] - tf);
    const double dist = g.distance(xd, at);
    ch.add("descent", gfun(xd) + lambda * dist <= gfun(at) + tf);
    ch.add("distance", dist <= delta + tf);
    bool fixed = true;
    for (Index x : f.effective_domain()) fixed = fixed && gfun(xd) <= gfun(x) + lambda * g.distance(x, xd) + tf;
    ch.add("fixed_point", fixed);
    VectorXd hbar(f.size());
    for (Index x = 0; x < f.size(); ++x) hbar(x) = h(x) - lambda * g.distance(x, xd) + (f[xd] - h(xd));
    ch.add("support_touches", std::abs(hbar(xd) - f[xd]) <= 1e-12 * std::max(1.0, f.sup_norm()));
    ch.add("support_below_f", support_slack(f, hbar) >= -tf);
  } else if (cmd == "density") {
    const double k = to_number(input.at("k")), delta = to_number(input.at("delta"));
    bool ok = true;
    std::vector<Index> certified;
    for (const auto& p : res.at("points")) {
      const Index at = p.at("scan_node").get<Index>(), xd = p.at("x_delta").get<Index>();
      const double lambda = to_number(p.at("epsilon")) / delta;
      const VectorXd h = ekeland_minorant(f, at, k);
      VectorXd hbar(f.size());
      for (Index x = 0; x < f.size(); ++x) hbar(x) = h(x) - lambda * g.distance(x, xd) + (f[xd] - h(xd));
      ok = ok && support_slack(f, hbar) >= -tf && g.distance(at, xd) <= delta + tf;
      certified.push_back(xd);
    }
    ch.add("points_supported", ok);
    double radius = 0;
    for (Index x : f.effective_domain()) {
      double nearest = infinity<double>();
      for (Index c : certified) nearest = std::min(nearest, g.distance(x, c));
      radius = std::max(radius, nearest);
    }
    ch.add("covering_radius_reproduced", std::abs(radius - to_number(res.at("covering_radius"))) <= 1e-12);
  } else if (cmd == "extremum") {
    const Index at = res.at("x_bar").get<Index>();
    const std::string kind = input.at("kind").get<std::string>();
    if (kind == "maxnec") {
      const Index hi = max_node(f);
      ch.add("hypothesis_reproduced", (f[hi] <= f[at] + tf) == res.at("hypothesis_met").get<bool>());
    } else {
      const bool is_min = kind == "min";
      bool extremal = true;
      for (Index x = 0; x < f.size(); ++x) {
        if (f[x] == (is_min ? infinity<double>() : -infinity<double>())) continue;
        extremal = extremal && (is_min ? f[x] >= f[at] - tf : f[x] <= f[at] + tf);
      }
      ch.add("verdict_reproduced", extremal == res.at("holds").get<bool>());
      ch.add("consistent", res.at("consistent").get<bool>());
    }
  } else if (cmd == "calculus") {
    const Index at = g.require_node(io::point_from_json(input.at("at")));
    const std::string rule = input.at("rule").get<std::string>();
    if (rule == "scaling") {
      const double lambda = to_number(input.at("lambda"));
      const VectorXd l = candidate_values(res.at("scaled_candidate"), g);
      const auto lf = scale(f, lambda);
      const double slack = support_slack(lf, (l.array() + lf[at]).matrix());
      ch.add("verdict_reproduced", (slack >= -std::abs(lambda) * tf) == res.at("holds").get<bool>());
    } else {
      const Source src2 = source_from_spec(input.at("fn2"));
      const auto f2 = src2.on(g);
      if (rule == "sum") {
        const auto fs = add(f, f2);
        const VectorXd l = candidate_values(res.at("c1"), g) + candidate_values(res.at("c2"), g);
        const double slack = support_slack(fs, (l.array() + fs[at]).matrix());
        const double t = tf + f2.feasibility_tolerance(tol);
        ch.add("verdict_reproduced", (slack >= -t) == res.at("holds").get<bool>());
      } else {
        const VectorXd v = io::vector_from_json(res.at("minorant").at("values"));
        const double K = to_number(res.at("minorant").at("lipschitz_budget"));
        const VectorXd seed = (candidate_values(res.at("l1"), g).array() + f2[at]).matrix();
        const double t2 = f2.feasibility_tolerance(tol);
        ch.add("valid", validate(GridMinorantd{g, v, K}, f2, t2).ok());
        ch.add("dominates_l1", (v - seed).minCoeff() >= -t2);
        ch.add("pinned", std::abs(v(at) - f2[at]) <= t2);
        MaximalMinorantOptions<double> opts;
        opts.pin = at;
        opts.tol = tol;
        ch.add("maximal", certify_maximality(f2, GridMinorantd{g, v, K}, K, opts).status ==
                              MaximalityStatus::maximal);
      }
    }
  } else {
    fail(ErrorKind::usage, "no verifier for command '" + cmd + "'");
  }
  return ch.result();
}

// ---------------------------------------------------------------------------
// argument parsing

void add_options(CLI::App* sub, Options& o, const std::vector<std::string>& names) {
  for (const auto& n : names) {
    if (n == "fn") sub->add_option("--fn", o.fn, "function: gallery:<id>, neg:<spec>, JSON or file");
    else if (n == "fn2") sub->add_option("--fn2", o.fn2, "second function");
    else if (n == "grid") sub->add_option("--grid", o.grid, "lo:hi:n or lo1:hi1:n1,lo2:hi2:n2");
    else if (n == "norm") sub->add_option("--norm", o.norm, "1, 2 or inf");
    else if (n == "k") sub->add_option("--k", o.k, "Lipschitz / cone slope");
    else if (n == "K") sub->add_option("--K", o.K, "Lipschitz budget or modulus cap");
    else if (n == "at") sub->add_option("--at", o.at, "base point x or x,y");
    else if (n == "eps") sub->add_option("--eps", o.eps, "epsilon");
    else if (n == "delta") sub->add_option("--delta", o.delta, "delta");
    else if (n == "levels") sub->add_option("--levels", o.levels, "refinement levels");
    else if (n == "stride") sub->add_option("--stride", o.stride, "scan stride");
    else if (n == "cand") sub->add_option("--cand", o.cand, "cone:k, affine:s[,s2] or candidate JSON");
    else if (n == "cand2") sub->add_option("--cand2", o.cand2, "second candidate");
    else if (n == "slopes") sub->add_option("--slopes", o.slopes, "slope grid lo:hi:n");
    else if (n == "slope") sub->add_option("--slope", o.slope, "slope of an affine minorant");
    else if (n == "rule") sub->add_option("--rule", o.rule, "scaling, sum or domination");
    else if (n == "lambda") sub->add_option("--lambda", o.lambda, "scaling factor");
    else if (n == "kind") sub->add_option("--kind", o.kind, "variant of the command");
    else if (n == "thin") sub->add_flag("--thin", o.thin, "also run the pinned maximality check (1-D)");
  }
  sub->add_option("--tol-feas", o.tol_feas, "relative feasibility tolerance");
  sub->add_option("--tol-lp", o.tol_lp, "relative LP tolerance");
  sub->add_option("--out", o.out, "write JSON here instead of stdout");
  sub->add_option("--csv", o.csv, "write plot CSV here");
  sub->add_option("--seed", o.seed, "seed recorded with the run");
  sub->add_flag("--verify", o.verify, "re-check the result with the independent verifier");
}

const std::map<std::string, std::pair<std::string, std::vector<std::string>>>& command_table() {
  static const std::map<std::string, std::pair<std::string, std::vector<std::string>>> table = {
      {"envelope", {"Lipschitz lower/upper envelopes as CSV", {"fn", "grid", "norm", "k"}}},
      {"modulus", {"grid Lipschitz modulus", {"fn", "grid", "norm"}}},
      {"lctest", {"LC-convexity evidence: Lipschitz lower bound + lsc probes", {"fn", "grid", "norm", "k"}}},
      {"maximal", {"raise a seed to a maximal concave K-Lipschitz minorant (1-D)", {"fn", "grid", "at", "cand", "K"}}},
      {"lft", {"discrete Legendre-Fenchel transform (1-D)", {"fn", "grid", "slopes", "slope"}}},
      {"calm", {"calmness moduli under refinement", {"fn", "grid", "norm", "at", "levels", "K"}}},
      {"subgrad", {"check a sub/supergradient candidate", {"fn", "grid", "norm", "at", "cand", "cand2", "kind"}}},
      {"maxcheck", {"maximality of a subgradient (1-D)", {"fn", "grid", "at", "cand", "K"}}},
      {"ekeland", {"Ekeland refinement to a support point", {"fn", "grid", "norm", "at", "k", "eps", "delta"}}},
      {"density", {"Ekeland refinement from a grid of start points", {"fn", "grid", "norm", "k", "eps", "delta", "stride"}}},
      {"extremum", {"global extremum certificates", {"fn", "grid", "norm", "at", "kind", "k", "thin"}}},
      {"calculus", {"calculus rules for subgradients",
                    {"fn", "fn2", "grid", "norm", "at", "rule", "lambda", "cand", "cand2"}}},
  };
  return table;
}

int run_command(Options& o, std::ostream& out, std::ostream& err) {
  Context c{o, {}, {}, Gridd::line(0, 1, 2), SampledFunctiond(Gridd::line(0, 1, 2), VectorXd::Zero(2)), {}, &out};
  if (const char* env = std::getenv("LCX_TOL_FEAS")) c.tol.feas_rel = parse_double(env);
  if (o.tol_feas) c.tol.feas_rel = *o.tol_feas;
  if (o.tol_lp) c.tol.lp_rel = *o.tol_lp;
  if (!(c.tol.feas_rel > 0) || !(c.tol.lp_rel > 0)) fail(ErrorKind::usage, "tolerances must be > 0");
  if (o.fn.empty()) fail(ErrorKind::usage, o.command + " needs --fn");

  const Norm p = io::parse_norm(o.norm);
  c.src = source_from_spec(function_spec(o.fn));
  if (c.src.samples) {
    c.grid = o.norm_given ? c.src.samples->grid().with_norm(p) : c.src.samples->grid();
  } else {
    c.grid = o.grid.empty() ? default_grid(c.src.dim(), p) : io::parse_grid(o.grid, p);
  }
  c.f = c.src.on(c.grid);
  std::optional<Source> src2;
  if (!o.fn2.empty()) src2 = source_from_spec(function_spec(o.fn2));

  c.input = {{"fn", c.src.spec},
             {"grid", io::to_json(c.grid)},
             {"tolerances", {{"feas_rel", c.tol.feas_rel}, {"lp_rel", c.tol.lp_rel}}},
             {"seed", o.seed}};
  if (!o.at.empty()) c.input["at"] = io::to_json(parse_point(o.at));
  if (src2) c.input["fn2"] = src2->spec;

  json doc;
  const auto& cmd = o.command;
  if (cmd == "envelope") doc = cmd_envelope(c);
  else if (cmd == "modulus") doc = cmd_modulus(c);
  else if (cmd == "lctest") doc = cmd_lctest(c);
  else if (cmd == "maximal") doc = cmd_maximal(c);
  else if (cmd == "lft") doc = cmd_lft(c);
  else if (cmd == "calm") doc = cmd_calm(c);
  else if (cmd == "subgrad") doc = cmd_subgrad(c);
  else if (cmd == "maxcheck") doc = cmd_maxcheck(c);
  else if (cmd == "ekeland") doc = cmd_ekeland(c);
  else if (cmd == "density") doc = cmd_density(c);
  else if (cmd == "extremum") doc = cmd_extremum(c);
  else if (cmd == "calculus") doc = cmd_calculus(c, src2);

  bool verified = true;
  if (o.verify) {
    // round-trip through text so the verifier sees exactly what a file would hold
    const auto v = verify_document(json::parse(doc.dump()));
    verified = v.at("verified").get<bool>();
    doc["verification"] = v;
  }
  const bool csv_only = cmd == "envelope" && o.out.empty() && o.csv.empty();
  if (!o.out.empty()) {
    std::ofstream os(o.out);
    if (!os) fail(ErrorKind::usage, "cannot write '" + o.out + "'");
    os << doc.dump(2) << '\n';
  } else if (!csv_only) {
    out << doc.dump(2) << '\n';
  }
  if (!verified) {
    err << "error: verify: independent re-check failed: " << doc["verification"]["checks"].dump() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace

json function_spec(const std::string& text) {
  if (text.rfind("neg:", 0) == 0) return {{"kind", "neg"}, {"of", function_spec(text.substr(4))}};
  if (text.rfind("gallery:", 0) == 0) {
    const std::string rest = text.substr(8);
    if (rest.rfind("affine:", 0) == 0) {
      const auto ab = split(rest.substr(7), ',');
      if (ab.size() != 2) fail(ErrorKind::usage, "gallery:affine:a,b expects two numbers");
      return {{"kind", "gallery"}, {"id", "affine"}, {"a", parse_double(ab[0])}, {"b", parse_double(ab[1])}};
    }
    if (rest.rfind("pwl:", 0) == 0) {
      json knots = json::array();
      for (const auto& k : split(rest.substr(4), ',')) {
        const auto xy = split(k, ':');
        if (xy.size() != 2) fail(ErrorKind::usage, "pwl knots are x:y pairs separated by commas");
        knots.push_back({parse_double(xy[0]), parse_double(xy[1])});
      }
      return {{"kind", "gallery"}, {"id", "pwl"}, {"knots", knots}};
    }
    if (!GalleryFunctiond::from_id(rest)) fail(ErrorKind::usage, "unknown gallery id '" + rest + "'");
    return {{"kind", "gallery"}, {"id", rest}};
  }
  if (!text.empty() && text.front() == '{') {
    try {
      return json::parse(text);
    } catch (const json::exception& e) {
      fail(ErrorKind::usage, std::string("inline function JSON is invalid: ") + e.what());
    }
  }
  return read_json_file(text);
}

json verify_document(const json& doc) {
  try {
    return verify_impl(doc);
  } catch (const json::exception& e) {
    fail(ErrorKind::usage, std::string("malformed certificate: ") + e.what());
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"lcx: abstract convexity with Lipschitz concave functions on grids"};
  app.require_subcommand(0, 1);
  app.add_option("--verify", o.verify_file, "re-check a certificate JSON file");
  bool list = false;
  auto* gal = app.add_subcommand("gallery", "list gallery functions or print one sampled on a grid");
  gal->add_flag("--list", list, "print the gallery ids");
  gal->add_option("--fn", o.fn, "function to sample");
  gal->add_option("--grid", o.grid, "grid for sampling");
  gal->add_option("--norm", o.norm, "1, 2 or inf");
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, entry] : command_table()) {
    subs[name] = app.add_subcommand(name, entry.first);
    add_options(subs[name], o, entry.second);
  }

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << '\n';
    const auto used = app.get_subcommands();
    err << (used.empty() ? app.help() : used.front()->help());
    return 2;
  }

  try {
    if (gal->parsed()) {
      if (list || o.fn.empty()) {
        for (const auto& id : gallery_ids()) out << id << '\n';
        return 0;
      }
      const Norm p = io::parse_norm(o.norm);
      const auto src = source_from_spec(function_spec(o.fn));
      const Gridd g = o.grid.empty() ? default_grid(src.dim(), p) : io::parse_grid(o.grid, p);
      out << io::to_json(src.on(g)).dump(2) << '\n';
      return 0;
    }
    for (const auto& [name, sub] : subs) {
      if (!sub->parsed()) continue;
      o.command = name;
      if (auto* opt = sub->get_option_no_throw("--norm")) o.norm_given = opt->count() > 0;
      return run_command(o, out, err);
    }
    if (!o.verify_file.empty()) {
      const auto v = verify_document(read_json_file(o.verify_file));
      out << v.dump(2) << '\n';
      if (!v.at("verified").get<bool>()) {
        err << "error: verify: independent re-check failed\n";
        return 2;
      }
      return 0;
    }
    err << "error: usage: no subcommand given\n" << app.help();
    return 2;
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    err << "error: usage: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace lcx::cli
