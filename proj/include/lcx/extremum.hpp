#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lcx/maximal.hpp"
#include "lcx/subdiff.hpp"

namespace lcx {

enum class ExtremumKind { global_min_iff, global_max_iff, max_necessary, min_necessary };

inline const char* to_string(ExtremumKind k) {
  switch (k) {
    case ExtremumKind::global_min_iff: return "global_min_iff";
    case ExtremumKind::global_max_iff: return "global_max_iff";
    case ExtremumKind::max_necessary: return "max_necessary";
    case ExtremumKind::min_necessary: return "min_necessary";
  }
  return "?";
}

template <class Scalar>
struct SlopeInterval {
  Scalar right{0};  // s+ : forward difference quotient (-inf on the right edge)
  Scalar left{0};   // s- : backward difference quotient (+inf on the left edge)
  bool one_sided = false;

  bool contains_zero(Scalar tol) const { return right <= tol && left >= -tol; }
};

template <class Scalar>
struct ExtremumCertificate {
  ExtremumKind kind = ExtremumKind::global_min_iff;
  Index x_bar = -1;
  bool holds = false;
  bool hypothesis_met = true;
  bool direct_verdict = false;      // node scan
  bool membership_verdict = false;  // zero functional through check_subgradient
  bool consistent = true;
  bool boundary = false;            // x_bar on the box edge
  std::optional<SubgradientCandidate<Scalar>> witness;
  std::optional<Index> violating_node;
  Scalar worst_slack{0};
  std::optional<MaximalityStatus> zero_maximality;  // thin-subdifferential reading, 1-D only
  std::vector<SlopeInterval<Scalar>> intervals;
  std::optional<SlopeInterval<Scalar>> classical_interval;
  std::string reading;
  Scalar tol{0};

  std::string status() const {
    if (!consistent) return "inconsistent";
    if (!hypothesis_met) return "hypothesis not met";
    return holds ? "holds" : "fails";
  }
};

template <class Scalar>
SlopeInterval<Scalar> mirror(const SlopeInterval<Scalar>& s) {
  return {-s.left, -s.right, s.one_sided};
}

template <class Scalar>
ExtremumCertificate<Scalar> mirror(const ExtremumCertificate<Scalar>& c) {
  auto out = c;
  if (out.witness) out.witness = negate(*out.witness);
  for (auto& i : out.intervals) i = mirror(i);
  if (out.classical_interval) out.classical_interval = mirror(*out.classical_interval);
  return out;
}

/// x_bar is a global minimizer iff 0 is a subgradient there.
///
/// Both sides are evaluated independently: a node scan for the minimum and
/// check_subgradient on the zero functional. Disagreement marks the
/// certificate inconsistent. With thin_check on a 1-D grid the zero support
/// is also run through check_maximality; that reading breaks down at box
/// edges, where the truncated function gains extra minorants.
template <class Scalar>
ExtremumCertificate<Scalar> global_min_certificate(const SampledFunction<Scalar>& f, Index x_bar,
                                                   bool thin_check = false, const Tolerances& tolerances = {}) {
  if (x_bar < 0 || x_bar >= f.size()) fail(ErrorKind::domain, "x_bar is not a grid node");
  if (!f.is_finite(x_bar)) fail(ErrorKind::domain, "global_min_certificate: f(x_bar) must be finite");
  const auto& g = f.grid();
  ExtremumCertificate<Scalar> c;
  c.kind = ExtremumKind::global_min_iff;
  c.x_bar = x_bar;
  c.tol = f.feasibility_tolerance(tolerances);
  c.boundary = g.on_boundary(x_bar);

  Index lowest = -1;
  for (Index x = 0; x < f.size(); ++x)
    if (f.is_finite(x) || f[x] < 0)
      if (lowest < 0 || f[x] < f[lowest]) lowest = x;
  c.direct_verdict = f[x_bar] <= f[lowest] + c.tol;

  const auto zero = SubgradientCandidate<Scalar>::affine(g.node(x_bar), f[x_bar], Point<Scalar>::Zero(g.dim()));
  const auto check = check_subgradient(f, zero, c.tol);
  c.membership_verdict = check.ok;
  c.worst_slack = check.worst_slack;
  c.consistent = c.direct_verdict == c.membership_verdict;
  c.holds = c.consistent && c.direct_verdict;
  if (c.holds) c.witness = zero;
  else c.violating_node = lowest;

  if (thin_check && g.dim() == 1 && c.holds && !f.has_neg_inf()) {
    const Scalar K = std::max(Scalar(0), default_lipschitz_budget(f));
    c.zero_maximality = check_maximality(f, zero, K, tolerances).status;
  }
  c.reading = "min over finite nodes vs. zero functional in the subdifferential";
  return c;
}

/// Mirror of global_min_certificate through the sub/super symmetry.
template <class Scalar>
ExtremumCertificate<Scalar> global_max_certificate(const SampledFunction<Scalar>& f, Index x_bar,
                                                   bool thin_check = false, const Tolerances& tolerances = {}) {
  auto op = [thin_check, &tolerances](const SampledFunction<Scalar>& s, Index x) {
    return global_min_certificate(s, x, thin_check, tolerances);
  };
  auto c = superdifferential_dual(op)(f, x_bar);
  c.kind = ExtremumKind::global_max_iff;
  c.reading = "max over finite nodes vs. zero functional in the superdifferential";
  return c;
}

/// One-sided difference quotients of a 1-D grid function at node j.
template <class Scalar>
SlopeInterval<Scalar> difference_interval(const VectorX<Scalar>& h, Index j, Scalar step) {
  SlopeInterval<Scalar> s;
  const Index n = h.size();
  s.left = j > 0 ? (h(j) - h(j - 1)) / step : infinity<Scalar>();
  s.right = j + 1 < n ? (h(j + 1) - h(j)) / step : -infinity<Scalar>();
  s.one_sided = j == 0 || j + 1 == n;
  return s;
}

/// At a global maximum x_bar, 0 lies in the classical superdifferential
/// [s+, s-] of every concave minorant supporting f at x_bar.
///
/// The hypothesis (x_bar is a node-wise maximum) is checked, not assumed;
/// when it fails the certificate reports it and holds = false.
template <class Scalar>
ExtremumCertificate<Scalar> max_necessary_condition(const SampledFunction<Scalar>& f, Index x_bar,
                                                    const std::vector<GridMinorant<Scalar>>& minorants,
                                                    const Tolerances& tolerances = {}) {
  const auto& g = f.grid();
  if (g.dim() != 1) fail(ErrorKind::usage, "max_necessary_condition runs on 1-D grids only");
  if (x_bar < 0 || x_bar >= f.size()) fail(ErrorKind::domain, "x_bar is not a grid node");
  if (!f.is_finite(x_bar)) fail(ErrorKind::domain, "f(x_bar) must be finite");
  if (minorants.empty()) fail(ErrorKind::usage, "at least one supporting minorant is required");
  ExtremumCertificate<Scalar> c;
  c.kind = ExtremumKind::max_necessary;
  c.x_bar = x_bar;
  c.tol = f.feasibility_tolerance(tolerances);
  c.boundary = g.on_boundary(x_bar);
  c.reading = "global maximum at x_bar implies 0 in the superdifferential of each supporting concave minorant";

  for (const auto& h : minorants) {
    const auto v = validate(GridMinorant<Scalar>{h.grid, h.values, infinity<Scalar>()}, f, c.tol);
    if (!v.minorant()) fail(ErrorKind::precondition, "supplied function is not a minorant of f");
    if (!v.concave()) fail(ErrorKind::precondition, "supplied minorant is not concave");
    if (std::abs(h.values(x_bar) - f[x_bar]) > c.tol)
      fail(ErrorKind::precondition, "supplied minorant does not support f at x_bar");
  }

  Index highest = x_bar;
  for (Index x = 0; x < f.size(); ++x)
    if (f[x] > f[highest]) highest = x;
  c.hypothesis_met = f[highest] <= f[x_bar] + c.tol;
  c.direct_verdict = c.hypothesis_met;
  if (!c.hypothesis_met) c.violating_node = highest;

  const Scalar step = g.spacing(0);
  const Scalar slope_tol = c.tol / step;
  bool all = true;
  SlopeInterval<Scalar> common{-infinity<Scalar>(), infinity<Scalar>(), false};
  for (const auto& h : minorants) {
    const auto s = difference_interval(h.values, x_bar, step);
    c.intervals.push_back(s);
    all = all && s.contains_zero(slope_tol);
    common.right = std::max(common.right, s.right);
    common.left = std::min(common.left, s.left);
    common.one_sided = common.one_sided || s.one_sided;
  }
  c.classical_interval = common;
  c.membership_verdict = all;
  c.holds = c.hypothesis_met && all;
  // the implication only runs one way: a maximum with 0 outside an interval is a bug
  c.consistent = !c.hypothesis_met || all;
  return c;
}

// ---------------------------------------------------------------------------
// Calculus rules

/// lambda D f(x_bar) is contained in D (lambda f)(x_bar), lambda > 0; for
/// lambda < 0 the candidate must be a supergradient and lands in the
/// subdifferential of lambda f.
template <class Scalar>
CheckReport<Scalar> calculus_scaling_check(const SampledFunction<Scalar>& f, Index x_bar, Scalar lambda,
                                           const SubgradientCandidate<Scalar>& cand, const Tolerances& tol = {}) {
  if (lambda == Scalar(0)) fail(ErrorKind::precondition, "scaling by zero is excluded");
  const auto& g = f.grid();
  if (g.require_node(cand.base) != x_bar) fail(ErrorKind::usage, "candidate is not based at x_bar");
  const Scalar t = f.feasibility_tolerance(tol);
  const auto pre = lambda > 0 ? check_subgradient(f, cand, t) : check_supergradient(f, cand, t);
  if (!pre.ok)
    fail(ErrorKind::precondition, lambda > 0 ? "candidate is not a subgradient of f at x_bar"
                                             : "candidate is not a supergradient of f at x_bar");
  const auto scaled = scale(f, lambda);
  return check_subgradient(scaled, scale(cand, lambda), std::abs(lambda) * t);
}

/// D f1(x_bar) + D f2(x_bar) is contained in D (f1 + f2)(x_bar).
/// The sum is checked with the sum of the two input tolerances.
template <class Scalar>
CheckReport<Scalar> calculus_sum_check(const SampledFunction<Scalar>& f1, const SampledFunction<Scalar>& f2,
                                       Index x_bar, const SubgradientCandidate<Scalar>& c1,
                                       const SubgradientCandidate<Scalar>& c2, const Tolerances& tol = {}) {
  if (!(f1.grid() == f2.grid())) fail(ErrorKind::usage, "functions live on different grids");
  const auto& g = f1.grid();
  if (g.require_node(c1.base) != x_bar || g.require_node(c2.base) != x_bar)
    fail(ErrorKind::usage, "candidates are not based at x_bar");
  const Scalar t1 = f1.feasibility_tolerance(tol), t2 = f2.feasibility_tolerance(tol);
  if (!check_subgradient(f1, c1, t1).ok) fail(ErrorKind::precondition, "c1 is not a subgradient of f1 at x_bar");
  if (!check_subgradient(f2, c2, t2).ok) fail(ErrorKind::precondition, "c2 is not a subgradient of f2 at x_bar");
  return check_subgradient(add(f1, f2), sum(c1, c2, g), t1 + t2);
}

template <class Scalar>
struct DominationCheck {
  bool holds = false;
  GridMinorant<Scalar> minorant;
  MaximalityCertificate<Scalar> certificate;
  Scalar domination_slack{0};  // min (v - support of l1)
  Scalar pin_gap{0};           // |v(x_bar) - f2(x_bar)|
  bool valid = false;          // independent validate() of the LP output
};

/// For f1 <= f2 touching at x_bar and l1 in D f1(x_bar): raises l1's support
/// to a maximal minorant of f2 pinned at x_bar and checks it dominates l1.
template <class Scalar>
DominationCheck<Scalar> calculus_domination_check(const SampledFunction<Scalar>& f1, const SampledFunction<Scalar>& f2,
                                                  Index x_bar, const SubgradientCandidate<Scalar>& l1,
                                                  const Tolerances& tol = {}) {
  if (!(f1.grid() == f2.grid())) fail(ErrorKind::usage, "functions live on different grids");
  const auto& g = f1.grid();
  if (g.dim() != 1) fail(ErrorKind::usage, "calculus_domination_check runs on 1-D grids only");
  if (g.require_node(l1.base) != x_bar) fail(ErrorKind::usage, "candidate is not based at x_bar");
  if (!f1.is_finite(x_bar) || !f2.is_finite(x_bar)) fail(ErrorKind::domain, "f1(x_bar), f2(x_bar) must be finite");
  const Scalar t = std::max(f1.feasibility_tolerance(tol), f2.feasibility_tolerance(tol));
  if (std::abs(f1[x_bar] - f2[x_bar]) > t) fail(ErrorKind::precondition, "f1(x_bar) differs from f2(x_bar)");
  if (max_excess(f1.values(), f2) > t) fail(ErrorKind::precondition, "f1 is not below f2");
  if (!check_subgradient(f1, l1, f1.feasibility_tolerance(tol)).ok)
    fail(ErrorKind::precondition, "l1 is not a subgradient of f1 at x_bar");

  const VectorX<Scalar> seed = (l1.increments(g).array() + f2[x_bar]).matrix();
  const Scalar K = std::max(default_lipschitz_budget(f2), l1.lipschitz_bound(g));
  MaximalMinorantOptions<Scalar> opts;
  opts.pin = x_bar;
  opts.tol = tol;
  auto res = maximal_minorant(f2, GridMinorant<Scalar>{g, seed, K}, K, opts);

  DominationCheck<Scalar> out{false, std::move(res.minorant), std::move(res.certificate), 0, 0, false};
  out.domination_slack = (out.minorant.values - seed).minCoeff();
  out.pin_gap = std::abs(out.minorant.values(x_bar) - f2[x_bar]);
  out.valid = validate(out.minorant, f2, f2.feasibility_tolerance(tol)).ok();
  const Scalar tf = f2.feasibility_tolerance(tol);
  out.holds = out.valid && out.certificate.status == MaximalityStatus::maximal && out.domination_slack >= -tf &&
              out.pin_gap <= tf;
  return out;
}

}  // namespace lcx
