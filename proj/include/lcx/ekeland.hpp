#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <type_traits>
#include <stdexcept>
#include <vector>

#include "lcx/envelopes.hpp"
#include "lcx/subdiff.hpp"

namespace lcx {

template <class Scalar>
struct EkelandResiduals {
  Scalar descent_slack{0};     // g(x_bar) - g(x_delta) - lambda ||x_delta - x_bar||, >= -tol
  Scalar distance{0};          // ||x_delta - x_bar||, <= delta
  Scalar strict_min_slack{0};  // min over x != x_delta of g(x) + lambda ||x - x_delta|| - g(x_delta)
  Scalar support_gap{0};       // |h_bar(x_delta) - f(x_delta)|
  Scalar minorant_excess{0};   // max (h_bar - f) over finite nodes
};

template <class Scalar>
struct EkelandResult {
  Index x_bar = -1;
  Index x_delta = -1;
  Scalar epsilon{0};
  Scalar delta{0};
  Scalar lambda{0};  // epsilon / delta
  VectorX<Scalar> h_bar;
  SubgradientCandidate<Scalar> support;  // grid form of h_bar based at x_delta
  EkelandResiduals<Scalar> residuals;
  std::vector<Index> path;  // iterates, starting at x_bar
  Scalar tol{0};
  Scalar scale{1};

  int iterations() const { return static_cast<int>(path.size()) - 1; }

  bool descent_ok() const { return residuals.descent_slack >= -tol; }
  bool distance_ok() const { return residuals.distance <= delta + tol; }
  bool fixed_point_ok() const { return residuals.strict_min_slack >= -tol; }
  bool support_ok() const {
    return residuals.support_gap <= Scalar(1e-12) * scale && residuals.minorant_excess <= tol;
  }
  bool invariants_hold() const { return descent_ok() && distance_ok() && fixed_point_ok() && support_ok(); }
};

/// Constructive Ekeland step on a grid.
///
/// With g = f - h and lambda = eps / delta, iterates
///   x_{n+1} = argmin { g(x) + lambda ||x - x_n|| : g(x) + lambda ||x - x_n|| <= g(x_n) }
/// from x_bar (ties to the smallest node index) until x_n is its own argmin.
/// g strictly decreases along the path, so at most N steps are taken.
/// The returned h_bar(x) = h(x) - lambda ||x - x_delta|| + f(x_delta) - h(x_delta)
/// minorizes f and touches it at x_delta.
template <class Scalar>
EkelandResult<Scalar> ekeland_refine(const SampledFunction<Scalar>& f, const VectorX<std::type_identity_t<Scalar>>& h,
                                     Index x_bar, std::type_identity_t<Scalar> epsilon, std::type_identity_t<Scalar> delta,
                                     const Tolerances& tolerances = {}) {
  const auto& g = f.grid();
  if (h.size() != f.size()) fail(ErrorKind::usage, "minorant has the wrong number of values");
  if (!h.allFinite()) fail(ErrorKind::precondition, "minorant must be real-valued");
  if (!(epsilon > 0) || !(delta > 0)) fail(ErrorKind::precondition, "epsilon and delta must be > 0");
  if (x_bar < 0 || x_bar >= f.size()) fail(ErrorKind::domain, "x_bar is not a grid node");
  if (!f.is_finite(x_bar)) fail(ErrorKind::domain, "f(x_bar) must be finite");
  require_proper_no_neg_inf(f, "ekeland_refine");

  EkelandResult<Scalar> r;
  r.tol = f.feasibility_tolerance(tolerances);
  r.scale = std::max(Scalar(1), f.sup_norm());
  Index worst = -1;
  if (max_excess(h, f, &worst) > r.tol)
    fail(ErrorKind::precondition, "h is not a minorant of f (node " + std::to_string(worst) + ")");
  if (h(x_bar) + epsilon < f[x_bar] - r.tol) fail(ErrorKind::precondition, "epsilon is smaller than f(x_bar) - h(x_bar)");

  r.x_bar = x_bar;
  r.epsilon = epsilon;
  r.delta = delta;
  r.lambda = epsilon / delta;
  const Scalar lambda = r.lambda;
  const detail::DistanceTable<Scalar> dist(g);
  VectorX<Scalar> gap(f.size());
  for (Index x = 0; x < f.size(); ++x) gap(x) = f.is_finite(x) ? f[x] - h(x) : infinity<Scalar>();

  Index cur = x_bar;
  r.path.push_back(cur);
  for (;;) {
    Index best = -1;
    Scalar best_val = infinity<Scalar>();
    for (Index x = 0; x < f.size(); ++x) {
      if (!f.is_finite(x)) continue;
      const Scalar v = gap(x) + lambda * dist(x, cur);
      if (v > gap(cur)) continue;
      if (v < best_val) {
        best_val = v;
        best = x;
      }
    }
    if (best == cur) break;
    cur = best;
    r.path.push_back(cur);
    if (static_cast<Index>(r.path.size()) > f.size() + 1)
      throw std::runtime_error("ekeland_refine: iteration did not terminate within N steps");
  }
  r.x_delta = cur;

  r.h_bar.resize(f.size());
  const Scalar lift = f[cur] - h(cur);
  for (Index x = 0; x < f.size(); ++x) r.h_bar(x) = h(x) - lambda * dist(x, cur) + lift;
  const Point<Scalar> base = g.node(cur);
  VectorX<Scalar> inc = (r.h_bar.array() - f[cur]).matrix();
  inc(cur) = 0;
  r.support = {typename SubgradientCandidate<Scalar>::GridForm{std::move(inc)}, base, f[cur], Orientation::lower};

  auto& res = r.residuals;
  res.distance = dist(cur, x_bar);
  res.descent_slack = gap(x_bar) - (gap(cur) + lambda * res.distance);
  res.strict_min_slack = infinity<Scalar>();
  for (Index x = 0; x < f.size(); ++x) {
    if (x == cur || !f.is_finite(x)) continue;
    res.strict_min_slack = std::min(res.strict_min_slack, gap(x) + lambda * dist(x, cur) - gap(cur));
  }
  res.support_gap = std::abs(r.h_bar(cur) - f[cur]);
  res.minorant_excess = std::max(Scalar(0), max_excess(r.h_bar, f));
  return r;
}

template <class Scalar>
EkelandResult<Scalar> ekeland_refine(const SampledFunction<Scalar>& f, const ConeFunction<Scalar>& h, Index x_bar,
                                     std::type_identity_t<Scalar> epsilon, std::type_identity_t<Scalar> delta,
                                     const Tolerances& tol = {}) {
  return ekeland_refine(f, sample(h, f.grid()), x_bar, epsilon, delta, tol);
}

template <class Scalar>
EkelandResult<Scalar> ekeland_refine(const SampledFunction<Scalar>& f, const GridMinorant<Scalar>& h, Index x_bar,
                                     std::type_identity_t<Scalar> epsilon, std::type_identity_t<Scalar> delta,
                                     const Tolerances& tol = {}) {
  if (!(h.grid == f.grid())) fail(ErrorKind::usage, "minorant and function live on different grids");
  return ekeland_refine(f, h.values, x_bar, epsilon, delta, tol);
}

// ---------------------------------------------------------------------------
// Density of subdifferentiability points

template <class Scalar>
struct DensityPoint {
  Index scan_node = -1;
  Scalar gap{0};  // f(x_bar) - h(x_bar) before refinement
  EkelandResult<Scalar> result;
};

template <class Scalar>
struct DensityScan {
  std::vector<DensityPoint<Scalar>> points;  // in scan-node order
  std::vector<Index> certified;              // distinct x_delta, sorted
  Scalar covering_radius{0};
  Index covering_argmax = -1;
  Scalar k{0};
  Scalar delta{0};
  Index stride{1};

  bool all_invariants_hold() const {
    return std::all_of(points.begin(), points.end(), [](const auto& p) { return p.result.invariants_hold(); });
  }
};

/// Scan nodes: every stride-th node of the effective domain (per axis in 2-D).
template <class Scalar>
std::vector<Index> scan_nodes(const SampledFunction<Scalar>& f, Index stride) {
  const auto& g = f.grid();
  std::vector<Index> out;
  for (Index j = 0; j < f.size(); ++j) {
    if (!f.is_finite(j)) continue;
    const auto mi = g.multi_index(j);
    bool keep = true;
    for (int a = 0; a < g.dim(); ++a) keep = keep && mi[a] % stride == 0;
    if (keep) out.push_back(j);
  }
  return out;
}

/// Runs ekeland_refine from every scan node, with h the cone
/// E_k^- f(x_bar) - k ||x - x_bar|| (concave, below E_k^- f <= f).
/// epsilon defaults to the gap f(x_bar) - h(x_bar); a zero gap uses the
/// feasibility tolerance instead. A supplied epsilon is raised to the gap
/// where needed.
template <class Scalar>
DensityScan<Scalar> density_scan(const SampledFunction<Scalar>& f, std::optional<std::type_identity_t<Scalar>> epsilon,
                                 std::type_identity_t<Scalar> delta, std::type_identity_t<Scalar> k, Index stride = 1,
                                 const Tolerances& tol = {}) {
  require_proper_no_neg_inf(f, "density_scan");
  if (stride < 1) fail(ErrorKind::usage, "stride must be >= 1");
  if (!(delta > 0)) fail(ErrorKind::precondition, "delta must be > 0");
  if (epsilon && !(*epsilon > 0)) fail(ErrorKind::precondition, "epsilon must be > 0");
  const auto env = lipschitz_lower_envelope(f, k);
  if (!env.values().allFinite()) fail(ErrorKind::precondition, "E_k^- f is not finite: no k-Lipschitz lower bound");
  const auto& g = f.grid();
  const Scalar floor_eps = f.feasibility_tolerance(tol);

  DensityScan<Scalar> out;
  out.k = k;
  out.delta = delta;
  out.stride = stride;
  for (Index x : scan_nodes(f, stride)) {
    const ConeFunction<Scalar> cone{g.node(x), k, env[x]};
    const VectorX<Scalar> h = sample(cone, g);
    const Scalar gap = std::max(Scalar(0), f[x] - h(x));
    Scalar eps = epsilon ? std::max(*epsilon, gap) : gap;
    if (!(eps > 0)) eps = floor_eps;
    out.points.push_back({x, gap, ekeland_refine(f, h, x, eps, delta, tol)});
    out.certified.push_back(out.points.back().result.x_delta);
  }
  std::sort(out.certified.begin(), out.certified.end());
  out.certified.erase(std::unique(out.certified.begin(), out.certified.end()), out.certified.end());

  const detail::DistanceTable<Scalar> dist(g);
  for (Index x : f.effective_domain()) {
    Scalar nearest = infinity<Scalar>();
    for (Index c : out.certified) nearest = std::min(nearest, dist(x, c));
    if (nearest > out.covering_radius || out.covering_argmax < 0) {
      out.covering_radius = nearest;
      out.covering_argmax = x;
    }
  }
  return out;
}

}  // namespace lcx
