#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>

#include "lcx/envelopes.hpp"
#include "lcx/lp.hpp"
#include "lcx/minorant.hpp"

namespace lcx {

enum class MaximalityStatus { maximal, improvable };

inline const char* to_string(MaximalityStatus s) { return s == MaximalityStatus::maximal ? "maximal" : "improvable"; }

inline constexpr const char* kMaximalityClass = "grid-concave, K-Lipschitz grid minorants (1-D)";

/// Witness for (non-)maximality of a grid minorant within the finite class
/// {grid-concave, K-Lipschitz, v <= f}. Continuum maximality is not claimed.
template <class Scalar>
struct MaximalityCertificate {
  MaximalityStatus status = MaximalityStatus::maximal;
  std::optional<GridMinorant<Scalar>> improvement;
  Scalar lp_objective_gap{0};
  Scalar lipschitz_budget{0};
  Scalar tol_lp{0};
  Scalar tol_feas{0};
  std::optional<Index> pin;
  bool degenerate_warning = false;
};

template <class Scalar>
struct MaximalMinorantOptions {
  std::optional<Index> pin;                  // enforce v(pin) = f(pin)
  std::optional<VectorX<Scalar>> weights;    // objective weights, default all ones
  Tolerances tol;
  SimplexOptions simplex;
};

template <class Scalar>
struct MaximalMinorantResult {
  GridMinorant<Scalar> minorant;
  MaximalityCertificate<Scalar> certificate;
};

namespace detail {

template <class Scalar>
struct RaiseResult {
  VectorX<Scalar> raise;  // w >= 0 with seed + w optimal
  Scalar gain{0};
  bool warning = false;
};

template <class Scalar>
void require_seed(const SampledFunction<Scalar>& f, const GridMinorant<Scalar>& seed, Scalar K,
                  const MaximalMinorantOptions<Scalar>& opts) {
  if (f.grid().dim() != 1) fail(ErrorKind::usage, "maximal minorants are certified on 1-D grids only");
  require_proper_no_neg_inf(f, "maximal_minorant");
  if (!(K >= 0) || !std::isfinite(K)) fail(ErrorKind::precondition, "Lipschitz budget K must be finite and >= 0");
  if (!(seed.grid == f.grid())) fail(ErrorKind::usage, "seed and function live on different grids");
  if (!seed.values.allFinite()) fail(ErrorKind::precondition, "seed must be real-valued");
  const Scalar tol = f.feasibility_tolerance(opts.tol);
  GridMinorant<Scalar> budgeted{seed.grid, seed.values, K};
  const auto v = validate(budgeted, f, tol);
  if (!v.minorant())
    fail(ErrorKind::precondition, "seed is not a minorant of f (excess " + std::to_string(v.minorant_excess) + ")");
  if (!v.concave()) fail(ErrorKind::precondition, "seed is not concave on the grid");
  if (!v.lipschitz()) fail(ErrorKind::precondition, "seed is not K-Lipschitz for the given budget");
  if (opts.pin) {
    if (*opts.pin < 0 || *opts.pin >= f.size()) fail(ErrorKind::domain, "pin is not a grid node");
    if (!f.is_finite(*opts.pin)) fail(ErrorKind::precondition, "pin node must have a finite value");
  }
  if (opts.weights && (opts.weights->size() != f.size() || (opts.weights->array() <= 0).any()))
    fail(ErrorKind::usage, "objective weights must be positive, one per node");
}

/// Solves max sum w_j (v - seed)_j over the class, in the shifted variable w = v - seed >= 0.
template <class Scalar>
RaiseResult<Scalar> raise_minorant(const SampledFunction<Scalar>& f, const VectorX<Scalar>& seed, Scalar K,
                                   const MaximalMinorantOptions<Scalar>& opts) {
  const Index n = f.size();
  const Scalar h = f.grid().spacing(0);
  const Index finite = static_cast<Index>(f.effective_domain().size());
  const Index rows = finite + std::max<Index>(n - 2, 0) + 2 * (n - 1) + (opts.pin ? 1 : 0);
  LinearProgram<Scalar> lp;
  lp.A = MatrixX<Scalar>::Zero(rows, n);
  lp.b.resize(rows);
  lp.c = opts.weights ? *opts.weights : VectorX<Scalar>::Ones(n);

  // rows whose right-hand side the seed satisfies up to rounding are clamped at 0
  Index r = 0;
  for (Index j = 0; j < n; ++j) {
    if (!f.is_finite(j)) continue;
    lp.A(r, j) = 1;
    lp.b(r++) = std::max(Scalar(0), f[j] - seed(j));
  }
  for (Index j = 1; j + 1 < n; ++j) {
    lp.A(r, j - 1) = 1;
    lp.A(r, j) = -2;
    lp.A(r, j + 1) = 1;
    lp.b(r++) = std::max(Scalar(0), -(seed(j - 1) - Scalar(2) * seed(j) + seed(j + 1)));
  }
  for (Index j = 0; j + 1 < n; ++j) {
    const Scalar step = seed(j + 1) - seed(j);
    lp.A(r, j + 1) = 1;
    lp.A(r, j) = -1;
    lp.b(r++) = std::max(Scalar(0), K * h - step);
    lp.A(r, j) = 1;
    lp.A(r, j + 1) = -1;
    lp.b(r++) = std::max(Scalar(0), K * h + step);
  }
  if (opts.pin) {
    lp.A(r, *opts.pin) = -1;
    lp.b(r++) = -(f[*opts.pin] - seed(*opts.pin));
  }

  const auto sol = solve_lp(lp, opts.simplex);
  switch (sol.status) {
    case LpStatus::optimal: break;
    case LpStatus::infeasible: fail(ErrorKind::precondition, "maximal minorant LP is infeasible (pin unreachable)");
    case LpStatus::unbounded: fail(ErrorKind::improper, "maximal minorant LP is unbounded");
    case LpStatus::iteration_limit: throw std::runtime_error("simplex iteration limit reached");
  }
  RaiseResult<Scalar> out;
  out.raise = sol.x.cwiseMax(Scalar(0));
  out.gain = lp.c.dot(out.raise);
  return out;
}

}  // namespace detail

/// Certifies a candidate minorant: re-solves the LP seeded with it and
/// reports the objective gap. Gap <= tol_lp means no feasible grid function
/// dominates it; otherwise the LP optimizer is returned as the improvement.
template <class Scalar>
MaximalityCertificate<Scalar> certify_maximality(const SampledFunction<Scalar>& f,
                                                 const GridMinorant<Scalar>& candidate, Scalar K,
                                                 const MaximalMinorantOptions<Scalar>& opts = {}) {
  detail::require_seed(f, candidate, K, opts);
  const auto raised = detail::raise_minorant(f, candidate.values, K, opts);
  const VectorX<Scalar> c = opts.weights ? *opts.weights : VectorX<Scalar>::Ones(f.size());

  MaximalityCertificate<Scalar> cert;
  cert.lp_objective_gap = raised.gain;
  cert.lipschitz_budget = K;
  cert.tol_feas = f.feasibility_tolerance(opts.tol);
  cert.tol_lp = Scalar(opts.tol.lp_rel) * std::max(Scalar(1), std::abs(c.dot(candidate.values)));
  cert.pin = opts.pin;
  if (cert.lp_objective_gap <= cert.tol_lp) {
    cert.status = MaximalityStatus::maximal;
    return cert;
  }
  cert.status = MaximalityStatus::improvable;
  GridMinorant<Scalar> better{candidate.grid, candidate.values + raised.raise, K};
  cert.degenerate_warning = !validate(better, f, cert.tol_feas).ok();
  cert.improvement = std::move(better);
  return cert;
}

/// Raises a concave K-Lipschitz seed minorant to a maximal one by maximizing
/// sum_j v_j over {v <= f, v >= seed, grid-concave, |v_i - v_{i+1}| <= K h},
/// optionally pinned at a node. The certificate comes from an independent re-solve.
template <class Scalar>
MaximalMinorantResult<Scalar> maximal_minorant(const SampledFunction<Scalar>& f, const GridMinorant<Scalar>& seed,
                                               Scalar K, const MaximalMinorantOptions<Scalar>& opts = {}) {
  detail::require_seed(f, seed, K, opts);
  const auto raised = detail::raise_minorant(f, seed.values, K, opts);
  GridMinorant<Scalar> out{seed.grid, seed.values + raised.raise, K};
  const Scalar tol = f.feasibility_tolerance(opts.tol);
  const bool valid = validate(out, f, tol).ok();
  if (!valid) {
    // the LP answer itself is off by more than tol_feas: report, don't certify
    MaximalityCertificate<Scalar> cert;
    cert.status = MaximalityStatus::improvable;
    cert.lipschitz_budget = K;
    cert.tol_feas = tol;
    cert.pin = opts.pin;
    cert.degenerate_warning = true;
    return {std::move(out), std::move(cert)};
  }
  auto cert = certify_maximality(f, out, K, opts);
  return {std::move(out), std::move(cert)};
}

/// Default Lipschitz budget: twice the grid modulus of f.
template <class Scalar>
Scalar default_lipschitz_budget(const SampledFunction<Scalar>& f) {
  return Scalar(2) * lipschitz_modulus(f).value();
}

}  // namespace lcx
