#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "lcx/envelopes.hpp"
#include "lcx/maximal.hpp"

namespace lcx {

/// lower: l is concave and l(x - x_bar) bounds f - f(x_bar) from below (subgradient).
/// upper: l is convex and bounds it from above (supergradient).
enum class Orientation { lower, upper };

/// An element l of the cone of Lipschitz concave functions vanishing at the
/// origin (or its negative, for supergradients), attached to a base point.
///
/// The supporting function is h(x) = l(x - x_bar) + anchor. Three forms:
///   Cone     l(d) = -k ||d||
///   Affine   l(d) = s . d
///   GridForm l sampled at x_j - x_bar for every node x_j of one grid
template <class Scalar>
struct SubgradientCandidate {
  struct Cone {
    Scalar slope{0};
  };
  struct Affine {
    Point<Scalar> slope;
  };
  struct GridForm {
    VectorX<Scalar> increments;
  };

  std::variant<Cone, Affine, GridForm> form;
  Point<Scalar> base;
  Scalar anchor{0};
  Orientation orientation = Orientation::lower;

  static SubgradientCandidate cone(const Point<Scalar>& base, Scalar anchor, Scalar k) {
    if (!(k >= 0)) fail(ErrorKind::precondition, "cone slope must be >= 0");
    return {Cone{k}, base, anchor, Orientation::lower};
  }

  static SubgradientCandidate affine(const Point<Scalar>& base, Scalar anchor, const Point<Scalar>& s) {
    if (s.size() != base.size()) fail(ErrorKind::usage, "slope dimension mismatch");
    return {Affine{s}, base, anchor, Orientation::lower};
  }

  /// Samples d -> fn(d) at every node; the value at the base node is forced to 0.
  template <class Fn>
  static SubgradientCandidate from_functional(const Grid<Scalar>& g, Index base_node, Scalar anchor, Fn&& fn) {
    const Point<Scalar> base = g.node(base_node);
    VectorX<Scalar> inc(g.size());
    for (Index j = 0; j < g.size(); ++j) inc(j) = fn(Point<Scalar>(g.node(j) - base));
    inc(base_node) = 0;
    return {GridForm{std::move(inc)}, base, anchor, Orientation::lower};
  }

  Scalar sign() const { return orientation == Orientation::lower ? Scalar(1) : Scalar(-1); }

  /// Values l(x_j - x_bar) for every node of g, orientation applied.
  VectorX<Scalar> increments(const Grid<Scalar>& g) const {
    VectorX<Scalar> v(g.size());
    if (auto* c = std::get_if<Cone>(&form)) {
      for (Index j = 0; j < g.size(); ++j) v(j) = -c->slope * g.distance(g.node(j), base);
    } else if (auto* a = std::get_if<Affine>(&form)) {
      for (Index j = 0; j < g.size(); ++j) v(j) = a->slope.dot(g.node(j) - base);
    } else {
      const auto& inc = std::get<GridForm>(form).increments;
      if (inc.size() != g.size()) fail(ErrorKind::usage, "grid-form candidate evaluated on a foreign grid");
      v = inc;
    }
    return orientation == Orientation::lower ? v : VectorX<Scalar>(-v);
  }

  /// h(x_j) = l(x_j - x_bar) + anchor.
  VectorX<Scalar> support(const Grid<Scalar>& g) const { return (increments(g).array() + anchor).matrix(); }

  /// Lipschitz constant of l, structural for cones and affine forms.
  Scalar lipschitz_bound(const Grid<Scalar>& g) const {
    if (auto* c = std::get_if<Cone>(&form)) return c->slope;
    if (auto* a = std::get_if<Affine>(&form)) {
      // dual norm of s
      switch (g.norm()) {
        case Norm::l1: return a->slope.cwiseAbs().maxCoeff();
        case Norm::linf: return a->slope.cwiseAbs().sum();
        case Norm::l2: return a->slope.norm();
      }
    }
    const VectorX<Scalar> v = increments(g);
    const detail::DistanceTable<Scalar> dist(g);
    Scalar k(0);
    for (Index i = 0; i < g.size(); ++i)
      for (Index j = i + 1; j < g.size(); ++j) k = std::max(k, std::abs(v(i) - v(j)) / dist(i, j));
    return k;
  }
};

using SubgradientCandidated = SubgradientCandidate<double>;

template <class Scalar>
SubgradientCandidate<Scalar> negate(const SubgradientCandidate<Scalar>& c) {
  auto out = c;
  out.orientation = c.orientation == Orientation::lower ? Orientation::upper : Orientation::lower;
  out.anchor = -c.anchor;
  return out;
}

/// lambda * l; a negative factor flips the orientation.
template <class Scalar>
SubgradientCandidate<Scalar> scale(const SubgradientCandidate<Scalar>& c, Scalar lambda) {
  using C = SubgradientCandidate<Scalar>;
  if (lambda == Scalar(0)) fail(ErrorKind::precondition, "scaling by zero is excluded");
  if (lambda < 0) return scale(negate(c), -lambda);
  auto out = c;
  out.anchor = lambda * c.anchor;
  std::visit(
      [lambda](auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, typename C::Cone>) f.slope *= lambda;
        else if constexpr (std::is_same_v<F, typename C::Affine>) f.slope *= lambda;
        else f.increments *= lambda;
      },
      out.form);
  return out;
}

/// l1 + l2 at a common base point; structural when both forms agree.
template <class Scalar>
SubgradientCandidate<Scalar> sum(const SubgradientCandidate<Scalar>& a, const SubgradientCandidate<Scalar>& b,
                                 const Grid<Scalar>& g) {
  using C = SubgradientCandidate<Scalar>;
  if (a.base != b.base) fail(ErrorKind::precondition, "summed candidates must share the base point");
  if (a.orientation == b.orientation) {
    auto* ca = std::get_if<typename C::Cone>(&a.form);
    auto* cb = std::get_if<typename C::Cone>(&b.form);
    if (ca && cb) return {typename C::Cone{ca->slope + cb->slope}, a.base, a.anchor + b.anchor, a.orientation};
    auto* fa = std::get_if<typename C::Affine>(&a.form);
    auto* fb = std::get_if<typename C::Affine>(&b.form);
    if (fa && fb) {
      // affine forms commute with orientation, so fold it into the slope
      return {typename C::Affine{Point<Scalar>(fa->slope + fb->slope)}, a.base, a.anchor + b.anchor, a.orientation};
    }
  }
  return {typename C::GridForm{a.increments(g) + b.increments(g)}, a.base, a.anchor + b.anchor, Orientation::lower};
}

// ---------------------------------------------------------------------------
// Calmness

/// Least k with f(x) >= f(x_bar) - k ||x - x_bar|| on every node.
template <class Scalar>
Scalar calmness_modulus(const SampledFunction<Scalar>& f, Index x_bar) {
  if (x_bar < 0 || x_bar >= f.size()) fail(ErrorKind::domain, "x_bar is not a grid node");
  if (!f.is_finite(x_bar)) fail(ErrorKind::domain, "calmness_modulus: f(x_bar) must be finite");
  const detail::DistanceTable<Scalar> dist(f.grid());
  Scalar k(0);
  for (Index x = 0; x < f.size(); ++x) {
    if (x == x_bar || f[x] == infinity<Scalar>()) continue;
    const Scalar drop = f[x_bar] - f[x];
    if (drop > 0) k = std::max(k, drop / dist(x, x_bar));
  }
  return k;
}

enum class CalmnessVerdict { subdifferentiable, diverging, inconclusive };

inline const char* to_string(CalmnessVerdict v) {
  switch (v) {
    case CalmnessVerdict::subdifferentiable: return "subdifferentiable";
    case CalmnessVerdict::diverging: return "diverging";
    case CalmnessVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

template <class Scalar>
struct CalmnessCertificate {
  Point<Scalar> x_bar;
  Scalar modulus{0};  // finest-level estimate
  std::vector<Scalar> modulus_sequence;
  std::vector<Scalar> spacings;
  std::vector<Index> node_counts;
  CalmnessVerdict verdict = CalmnessVerdict::inconclusive;
  Scalar k_cap{0};
  Scalar stabilization_rel{0.1};
};

/// Refinement study of the calmness modulus at x_bar.
///
/// Every finite grid gives a finite modulus, so the verdict reads the trend:
///   subdifferentiable  all moduli <= K_cap and the last relative change <= 10%
///   diverging          moduli non-decreasing and either the last one exceeds
///                      K_cap or the last relative change is still > 10%
///   inconclusive       anything else
template <class Scalar>
CalmnessCertificate<Scalar> subdifferentiability_oracle(const GalleryFunction<Scalar>& f, const Point<Scalar>& x_bar,
                                                        const Grid<Scalar>& base, int levels, Scalar k_cap) {
  if (levels < 2) fail(ErrorKind::usage, "subdifferentiability_oracle needs at least 2 levels");
  CalmnessCertificate<Scalar> cert;
  cert.x_bar = x_bar;
  cert.k_cap = k_cap;
  for (int level = 0; level < levels; ++level) {
    const Grid<Scalar> g = base.refined(level);
    const auto s = sample(f, g);
    const Index at = g.require_node(x_bar);
    cert.modulus_sequence.push_back(calmness_modulus(s, at));
    cert.spacings.push_back(g.spacing(0));
    cert.node_counts.push_back(g.size());
  }
  const auto& m = cert.modulus_sequence;
  cert.modulus = m.back();
  const Scalar prev = m[m.size() - 2], last = m.back();
  const Scalar rel = last == prev ? Scalar(0) : std::abs(last - prev) / std::max(std::abs(last), std::abs(prev));
  const bool bounded = std::all_of(m.begin(), m.end(), [&](Scalar v) { return v <= k_cap; });
  const bool monotone = std::is_sorted(m.begin(), m.end());
  if (bounded && rel <= cert.stabilization_rel)
    cert.verdict = CalmnessVerdict::subdifferentiable;
  else if (monotone && (last > k_cap || rel > cert.stabilization_rel))
    cert.verdict = CalmnessVerdict::diverging;
  else
    cert.verdict = CalmnessVerdict::inconclusive;
  return cert;
}

/// Cone(K) at x_bar with K the calmness modulus; its support touches f at x_bar.
template <class Scalar>
SubgradientCandidate<Scalar> cone_subgradient(const SampledFunction<Scalar>& f, Index x_bar) {
  const Scalar k = calmness_modulus(f, x_bar);
  return SubgradientCandidate<Scalar>::cone(f.grid().node(x_bar), f[x_bar], k);
}

// ---------------------------------------------------------------------------
// Membership and maximality

template <class Scalar>
struct CheckReport {
  bool ok = false;
  Scalar worst_slack{0};  // min over nodes of f(x) - f(x_bar) - l(x - x_bar)
  Index argmin = -1;
  Scalar tol{0};
};

/// f(x) - f(x_bar) >= l(x - x_bar) on every node, to within tol.
template <class Scalar>
CheckReport<Scalar> check_subgradient(const SampledFunction<Scalar>& f, const SubgradientCandidate<Scalar>& cand,
                                      Scalar tol) {
  const auto& g = f.grid();
  const Index at = g.require_node(cand.base);
  if (!f.is_finite(at)) fail(ErrorKind::domain, "candidate anchored at a node where f is not finite");
  CheckReport<Scalar> r;
  r.tol = tol;
  const VectorX<Scalar> l = cand.increments(g);
  r.worst_slack = infinity<Scalar>();
  for (Index x = 0; x < g.size(); ++x) {
    if (f[x] == infinity<Scalar>()) continue;
    const Scalar slack = (f[x] - f[at]) - l(x);
    if (slack < r.worst_slack) {
      r.worst_slack = slack;
      r.argmin = x;
    }
  }
  r.ok = r.worst_slack >= -r.tol;
  return r;
}

template <class Scalar>
CheckReport<Scalar> check_subgradient(const SampledFunction<Scalar>& f, const SubgradientCandidate<Scalar>& cand) {
  return check_subgradient(f, cand, f.feasibility_tolerance());
}

/// f(x) - f(x_bar) <= l(x - x_bar) on every node (the mirrored check).
template <class Scalar>
CheckReport<Scalar> check_supergradient(const SampledFunction<Scalar>& f, const SubgradientCandidate<Scalar>& cand,
                                        Scalar tol) {
  return check_subgradient(negate(f), negate(cand), tol);
}

template <class Scalar>
CheckReport<Scalar> check_supergradient(const SampledFunction<Scalar>& f, const SubgradientCandidate<Scalar>& cand) {
  return check_subgradient(negate(f), negate(cand));
}

/// Maximality of a subgradient in the thin-subdifferential sense, via the
/// pinned maximal-minorant LP seeded with the candidate's support.
template <class Scalar>
MaximalityCertificate<Scalar> check_maximality(const SampledFunction<Scalar>& f,
                                               const SubgradientCandidate<Scalar>& cand, Scalar K,
                                               const Tolerances& tol = {}) {
  if (f.grid().dim() != 1) fail(ErrorKind::usage, "check_maximality runs on 1-D grids only");
  if (cand.orientation != Orientation::lower)
    fail(ErrorKind::precondition, "check_maximality expects a subgradient; mirror supergradients first");
  const auto member = check_subgradient(f, cand, f.feasibility_tolerance(tol));
  if (!member.ok) fail(ErrorKind::precondition, "candidate is not a subgradient of f at x_bar");
  const Index at = f.grid().require_node(cand.base);
  // anchor the support at f(x_bar) so the pin is attained by the seed itself
  VectorX<Scalar> support = (cand.increments(f.grid()).array() + f[at]).matrix();
  MaximalMinorantOptions<Scalar> opts;
  opts.pin = at;
  opts.tol = tol;
  return certify_maximality(f, GridMinorant<Scalar>{f.grid(), std::move(support), K}, K, opts);
}

// ---------------------------------------------------------------------------
// Sub/super symmetry

template <class T>
const T& mirror(const T& t) {
  return t;
}

template <class Scalar>
SampledFunction<Scalar> mirror(const SampledFunction<Scalar>& f) {
  return negate(f);
}

template <class Scalar>
SubgradientCandidate<Scalar> mirror(const SubgradientCandidate<Scalar>& c) {
  return negate(c);
}

template <class Scalar>
GridMinorant<Scalar> mirror(const GridMinorant<Scalar>& m) {
  return {m.grid, -m.values, m.lipschitz_budget};
}

template <class Scalar>
MaximalityCertificate<Scalar> mirror(const MaximalityCertificate<Scalar>& c) {
  auto out = c;
  if (out.improvement) out.improvement = mirror(*out.improvement);
  return out;
}

/// Wraps an operation on subgradients into its superdifferential counterpart:
/// arguments are negated (functions and candidates), op runs on -f, and the
/// result is negated back. Applying the wrapper twice gives op again.
template <class Op>
auto superdifferential_dual(Op op) {
  return [op](const auto&... args) { return mirror(op(mirror(args)...)); };
}

namespace ops {

inline constexpr auto calmness_modulus = [](const auto& f, Index x_bar) { return lcx::calmness_modulus(f, x_bar); };
inline constexpr auto cone_subgradient = [](const auto& f, Index x_bar) { return lcx::cone_subgradient(f, x_bar); };
inline constexpr auto check_subgradient = [](const auto& f, const auto& cand) {
  return lcx::check_subgradient(f, cand);
};
inline constexpr auto check_maximality = [](const auto& f, const auto& cand, auto K) {
  return lcx::check_maximality(f, cand, K);
};

}  // namespace ops

/// Cone supergradient: the mirror of cone_subgradient on -f.
template <class Scalar>
SubgradientCandidate<Scalar> cone_supergradient(const SampledFunction<Scalar>& f, Index x_bar) {
  return superdifferential_dual(ops::cone_subgradient)(f, x_bar);
}

// ---------------------------------------------------------------------------
// Two-sided affine test

enum class AffineTestStatus { affine_confirmed, hypothesis_not_met, slopes_differ };

inline const char* to_string(AffineTestStatus s) {
  switch (s) {
    case AffineTestStatus::affine_confirmed: return "affine confirmed";
    case AffineTestStatus::hypothesis_not_met: return "hypothesis not met";
    case AffineTestStatus::slopes_differ: return "sandwich holds but slopes differ";
  }
  return "?";
}

template <class Scalar>
struct AffineTwoSidedReport {
  AffineTestStatus status = AffineTestStatus::hypothesis_not_met;
  bool lower_holds = false;
  bool upper_holds = false;
  Scalar lower_worst{0};  // min of f - (s1 . d + f(x_bar))
  Scalar upper_worst{0};  // min of (s2 . d + f(x_bar)) - f
  Scalar slope_gap{0};
  Scalar max_affine_deviation{0};
  Scalar tol{0};
};

/// If s1 is a linear subgradient and s2 a linear supergradient at x_bar then f is affine.
template <class Scalar>
AffineTwoSidedReport<Scalar> affine_two_sided_test(const SampledFunction<Scalar>& f, Index x_bar,
                                                   const Point<Scalar>& s1, const Point<Scalar>& s2,
                                                   const Tolerances& tol = {}) {
  const auto& g = f.grid();
  if (s1.size() != g.dim() || s2.size() != g.dim()) fail(ErrorKind::usage, "slope dimension mismatch");
  if (x_bar < 0 || x_bar >= f.size() || !f.is_finite(x_bar)) fail(ErrorKind::domain, "x_bar must be a finite node");
  AffineTwoSidedReport<Scalar> r;
  r.tol = f.feasibility_tolerance(tol);
  r.lower_worst = r.upper_worst = infinity<Scalar>();
  const Point<Scalar> base = g.node(x_bar);
  for (Index x = 0; x < g.size(); ++x) {
    const Point<Scalar> d = g.node(x) - base;
    if (f[x] == infinity<Scalar>()) {
      r.upper_worst = -infinity<Scalar>();
      continue;
    }
    r.lower_worst = std::min(r.lower_worst, f[x] - (s1.dot(d) + f[x_bar]));
    r.upper_worst = std::min(r.upper_worst, (s2.dot(d) + f[x_bar]) - f[x]);
    r.max_affine_deviation = std::max(r.max_affine_deviation, std::abs(f[x] - (s1.dot(d) + f[x_bar])));
  }
  r.lower_holds = r.lower_worst >= -r.tol;
  r.upper_holds = r.upper_worst >= -r.tol;
  r.slope_gap = (s1 - s2).cwiseAbs().maxCoeff();
  if (!r.lower_holds || !r.upper_holds) {
    r.status = AffineTestStatus::hypothesis_not_met;
    return r;
  }
  Scalar h = g.spacing(0);
  for (int a = 1; a < g.dim(); ++a) h = std::min(h, g.spacing(a));
  const bool same = r.slope_gap <= Scalar(2) * r.tol / h;
  r.status = same && r.max_affine_deviation <= r.tol ? AffineTestStatus::affine_confirmed
                                                     : AffineTestStatus::slopes_differ;
  return r;
}

}  // namespace lcx
