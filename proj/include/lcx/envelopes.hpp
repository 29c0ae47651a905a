#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "lcx/gallery.hpp"
#include "lcx/lsc_probe.hpp"
#include "lcx/minorant.hpp"

namespace lcx {

namespace detail {

/// Re-applies a monotone grid operator until its output is bitwise stable,
/// or max_passes runs out.
///
/// Envelopes are idempotent in exact arithmetic; rounding in d(x,y) + d(y,z)
/// can move a value by one ulp per application. Usually the iteration settles
/// in a pass or two. When it keeps creeping, the drift stays at ulp scale.
template <class Scalar, class Op>
VectorX<Scalar> stabilize(const Grid<Scalar>& g, VectorX<Scalar> v, Op op, int max_passes = 64) {
  for (int pass = 0; pass < max_passes; ++pass) {
    VectorX<Scalar> next = op(SampledFunction<Scalar>(g, v));
    if (next == v) break;
    v = std::move(next);
  }
  return v;
}

template <class Scalar>
VectorX<Scalar> lower_envelope_pass(const SampledFunction<Scalar>& f, Scalar k) {
  const auto& g = f.grid();
  const detail::DistanceTable<Scalar> dist(g);
  const auto dom = f.effective_domain();
  VectorX<Scalar> out(g.size());
  for (Index x = 0; x < g.size(); ++x) {
    Scalar best = infinity<Scalar>();
    for (Index y : dom) best = std::min(best, f[y] + k * dist(x, y));
    out(x) = best;
  }
  return out;
}

template <class Scalar>
VectorX<Scalar> upper_envelope_pass(const SampledFunction<Scalar>& f, Scalar k) {
  const auto& g = f.grid();
  const detail::DistanceTable<Scalar> dist(g);
  const auto dom = f.effective_domain();
  VectorX<Scalar> out(g.size());
  for (Index x = 0; x < g.size(); ++x) {
    Scalar best = -infinity<Scalar>();
    for (Index y : dom) best = std::max(best, f[y] - k * dist(x, y));
    out(x) = best;
  }
  return out;
}

}  // namespace detail

/// Cone with apex at node y, slope k and level f(y). Whether it minorizes f is
/// for the caller to check: it does iff f is calm at y with modulus <= k.
template <class Scalar>
ConeFunction<Scalar> cone_minorant(const SampledFunction<Scalar>& f, Index y, Scalar k) {
  if (!(k >= 0)) fail(ErrorKind::precondition, "cone slope must be >= 0");
  if (y < 0 || y >= f.size()) fail(ErrorKind::domain, "cone apex is not a grid node");
  if (!f.is_finite(y)) fail(ErrorKind::domain, "cone apex value must be finite");
  return {f.grid().node(y), k, f[y]};
}

/// Least k-Lipschitz majorant: x -> max_y f(y) - k ||x - y|| over finite nodes.
/// Nodes where f = +inf take no part in the maximum.
template <class Scalar>
SampledFunction<Scalar> lipschitz_upper_envelope(const SampledFunction<Scalar>& f, Scalar k) {
  if (!(k >= 0)) fail(ErrorKind::precondition, "Lipschitz constant must be >= 0");
  require_proper_no_neg_inf(f, "lipschitz_upper_envelope");
  auto op = [k](const SampledFunction<Scalar>& s) { return detail::upper_envelope_pass(s, k); };
  return SampledFunction<Scalar>(f.grid(), detail::stabilize(f.grid(), op(f), op), f.name());
}

/// Greatest k-Lipschitz minorant (inf-convolution with k||.||): x -> min_y f(y) + k ||x - y||.
template <class Scalar>
SampledFunction<Scalar> lipschitz_lower_envelope(const SampledFunction<Scalar>& f, Scalar k) {
  if (!(k >= 0)) fail(ErrorKind::precondition, "Lipschitz constant must be >= 0");
  require_proper_no_neg_inf(f, "lipschitz_lower_envelope");
  auto op = [k](const SampledFunction<Scalar>& s) { return detail::lower_envelope_pass(s, k); };
  return SampledFunction<Scalar>(f.grid(), detail::stabilize(f.grid(), op(f), op), f.name());
}

/// Grid Lipschitz modulus: max |f(x) - f(y)| / ||x - y|| over finite node pairs.
template <class Scalar>
ExtReal<Scalar> lipschitz_modulus(const SampledFunction<Scalar>& f) {
  const detail::DistanceTable<Scalar> dist(f.grid());
  const auto dom = f.effective_domain();
  Scalar m(0);
  for (std::size_t a = 0; a < dom.size(); ++a)
    for (std::size_t b = a + 1; b < dom.size(); ++b)
      m = std::max(m, std::abs(f[dom[a]] - f[dom[b]]) / dist(dom[a], dom[b]));
  return ExtReal<Scalar>(m);
}

// ---------------------------------------------------------------------------
// LC-convexity evidence

template <class Scalar>
struct LcConvexityReport {
  std::optional<Scalar> witness_k;
  std::optional<SampledFunction<Scalar>> witness;  // E_k^- f, a k-Lipschitz lower bound
  std::vector<LscProbeReport<Scalar>> lsc_reports;
  bool lsc_consistent = true;
  bool boundary_attained = false;  // min of the sample sits on the box edge
  bool lc_convex = false;

  std::string verdict() const {
    if (lc_convex) return "LC-convex (grid evidence)";
    if (!witness_k) return "no Lipschitz lower bound found on the schedule";
    return "lsc violated at a probe point";
  }
};

/// Default lsc probe points: the nodes at 1/4, 1/2 and 3/4 of each axis.
template <class Scalar>
std::vector<Point<Scalar>> default_probe_points(const Grid<Scalar>& g) {
  std::vector<Point<Scalar>> pts;
  const Index q[3] = {1, 2, 3};
  if (g.dim() == 1) {
    for (Index a : q) pts.push_back(g.node(g.flat_index((g.nodes(0) - 1) * a / 4)));
  } else {
    for (Index a : q)
      for (Index b : q) pts.push_back(g.node(g.flat_index((g.nodes(0) - 1) * a / 4, (g.nodes(1) - 1) * b / 4)));
  }
  return pts;
}

/// Grid evidence for LC-convexity: a Lipschitz lower bound (first k in the
/// schedule for which E_k^- of the sample is finite) plus lsc probes.
template <class Scalar>
LcConvexityReport<Scalar> lc_convexity_test(const GalleryFunction<Scalar>& f, const Grid<Scalar>& g,
                                            const std::vector<Scalar>& k_schedule,
                                            std::vector<Point<Scalar>> probe_points = {}, int probe_levels = 6) {
  if (k_schedule.empty()) fail(ErrorKind::usage, "k schedule is empty");
  for (std::size_t i = 0; i < k_schedule.size(); ++i) {
    if (!(k_schedule[i] >= 0)) fail(ErrorKind::usage, "k schedule entries must be >= 0");
    if (i > 0 && !(k_schedule[i] > k_schedule[i - 1])) fail(ErrorKind::usage, "k schedule must be increasing");
  }
  LcConvexityReport<Scalar> report;
  const auto s = sample(f, g);

  if (!s.has_neg_inf() && s.is_proper()) {
    for (Scalar k : k_schedule) {
      auto env = lipschitz_lower_envelope(s, k);
      if (env.values().allFinite()) {
        report.witness_k = k;
        report.witness = std::move(env);
        break;
      }
    }
    Index argmin = 0;
    for (Index j = 0; j < s.size(); ++j)
      if (s[j] < s[argmin]) argmin = j;
    report.boundary_attained = g.on_boundary(argmin);
  }

  if (probe_points.empty()) probe_points = default_probe_points(g);
  LscProbeOptions<Scalar> opts;
  Scalar width = g.upper(0) - g.lower(0);
  for (int a = 1; a < g.dim(); ++a) width = std::min(width, g.upper(a) - g.lower(a));
  opts.initial_radius = width / Scalar(4);
  for (const auto& p : probe_points) {
    report.lsc_reports.push_back(lsc_probe(f, p, probe_levels, std::optional<Grid<Scalar>>(g), opts));
    if (report.lsc_reports.back().verdict == LscVerdict::violated) report.lsc_consistent = false;
  }
  report.lc_convex = report.witness_k.has_value() && report.lsc_consistent;
  return report;
}

// ---------------------------------------------------------------------------
// Legendre-Fenchel transform and affine maximal minorants

template <class Scalar>
struct ConjugateResult {
  SampledFunction<Scalar> conjugate;   // on the slope grid
  std::vector<Index> argmax;           // node of f attaining the sup, per slope
  std::vector<bool> boundary_attained; // argmax on the box edge: truncation likely
  bool any_boundary() const { return std::find(boundary_attained.begin(), boundary_attained.end(), true) != boundary_attained.end(); }
};

/// f*(s) = max over finite nodes x of s x - f(x); ties go to the smallest node index.
template <class Scalar>
ConjugateResult<Scalar> legendre_fenchel(const SampledFunction<Scalar>& f, const Grid<Scalar>& slopes) {
  if (f.grid().dim() != 1 || slopes.dim() != 1) fail(ErrorKind::usage, "conjugates are 1-D only");
  require_proper_no_neg_inf(f, "legendre_fenchel");
  const auto& g = f.grid();
  const auto dom = f.effective_domain();
  VectorX<Scalar> conj(slopes.size());
  std::vector<Index> arg(static_cast<std::size_t>(slopes.size()));
  std::vector<bool> edge(static_cast<std::size_t>(slopes.size()));
  for (Index i = 0; i < slopes.size(); ++i) {
    const Scalar s = slopes.coordinate(0, i);
    Scalar best = -infinity<Scalar>();
    Index where = dom.front();
    for (Index x : dom) {
      const Scalar v = s * g.coordinate(0, x) - f[x];
      if (v > best) {
        best = v;
        where = x;
      }
    }
    conj(i) = best;
    arg[static_cast<std::size_t>(i)] = where;
    edge[static_cast<std::size_t>(i)] = where == 0 || where == g.size() - 1;
  }
  return {SampledFunction<Scalar>(slopes, std::move(conj), f.name().empty() ? "" : f.name() + "*"), std::move(arg),
          std::move(edge)};
}

/// Discrete convexity on a 1-D grid: finite nodes contiguous, second differences >= -tol.
template <class Scalar>
bool is_discretely_convex(const SampledFunction<Scalar>& f, Scalar tol) {
  const auto dom = f.effective_domain();
  if (dom.empty()) return false;
  if (dom.back() - dom.front() + 1 != static_cast<Index>(dom.size())) return false;
  for (std::size_t i = 1; i + 1 < dom.size(); ++i)
    if (f[dom[i - 1]] - Scalar(2) * f[dom[i]] + f[dom[i + 1]] < -tol) return false;
  return true;
}

/// The affine minorant x -> s x - f*(s) of a convex f. For convex f it is a
/// maximal LC-minorant and touches f wherever the conjugate sup is attained.
template <class Scalar>
GridMinorant<Scalar> affine_maximal_minorant(const SampledFunction<Scalar>& f, Scalar s, const Tolerances& tol = {}) {
  if (f.grid().dim() != 1) fail(ErrorKind::usage, "affine_maximal_minorant is 1-D only");
  require_proper_no_neg_inf(f, "affine_maximal_minorant");
  if (!is_discretely_convex(f, f.feasibility_tolerance(tol)))
    fail(ErrorKind::precondition, "affine_maximal_minorant: function is not discretely convex");
  const Grid<Scalar> one = Grid<Scalar>::line(s, s + Scalar(1), 2);
  const Scalar conj = legendre_fenchel(f, one).conjugate[0];
  const auto& g = f.grid();
  VectorX<Scalar> v(g.size());
  for (Index j = 0; j < g.size(); ++j) v(j) = s * g.coordinate(0, j) - conj;
  return {g, std::move(v), std::abs(s)};
}

}  // namespace lcx
