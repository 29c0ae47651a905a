#pragma once

// Brute-force reference computations for the tests. Deliberately naive:
// distances come from Grid::distance, every loop is a plain double loop, and
// nothing here calls into the envelope, LP or subdifferential code under test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lcx/lcx.hpp"

namespace oracle {

using lcx::Gridd;
using lcx::Index;
using lcx::Pointd;
using lcx::SampledFunctiond;
using lcx::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

inline Pointd pt(double x) {
  Pointd p(1);
  p << x;
  return p;
}

inline Pointd pt(double x, double y) {
  Pointd p(2);
  p << x, y;
  return p;
}

/// Random piecewise-linear function on [lo, hi] with `pieces` segments and
/// slopes in [-max_slope, max_slope].
inline lcx::GalleryFunctiond random_pwl(std::mt19937_64& rng, double lo, double hi, int pieces, double max_slope) {
  std::uniform_real_distribution<double> slope(-max_slope, max_slope);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> cuts{lo, hi};
  for (int i = 1; i < pieces; ++i) cuts.push_back(lo + (hi - lo) * unit(rng));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<std::pair<double, double>> knots;
  double y = 2.0 * unit(rng) - 1.0;
  knots.emplace_back(cuts[0], y);
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    y += slope(rng) * (cuts[i] - cuts[i - 1]);
    knots.emplace_back(cuts[i], y);
  }
  return lcx::GalleryFunctiond::piecewise_linear(knots);
}

inline VectorXd lower_envelope(const SampledFunctiond& f, double k) {
  const auto& g = f.grid();
  VectorXd out(g.size());
  for (Index x = 0; x < g.size(); ++x) {
    double best = kInf;
    for (Index y = 0; y < g.size(); ++y)
      if (std::isfinite(f[y])) best = std::min(best, f[y] + k * g.distance(x, y));
    out(x) = best;
  }
  return out;
}

inline VectorXd upper_envelope(const SampledFunctiond& f, double k) {
  const auto& g = f.grid();
  VectorXd out(g.size());
  for (Index x = 0; x < g.size(); ++x) {
    double best = -kInf;
    for (Index y = 0; y < g.size(); ++y)
      if (std::isfinite(f[y])) best = std::max(best, f[y] - k * g.distance(x, y));
    out(x) = best;
  }
  return out;
}

inline double modulus(const SampledFunctiond& f) {
  const auto& g = f.grid();
  double m = 0;
  for (Index x = 0; x < g.size(); ++x)
    for (Index y = 0; y < g.size(); ++y)
      if (x != y && std::isfinite(f[x]) && std::isfinite(f[y]))
        m = std::max(m, std::abs(f[x] - f[y]) / g.distance(x, y));
  return m;
}

inline double conjugate(const SampledFunctiond& f, double s) {
  double best = -kInf;
  for (Index x = 0; x < f.size(); ++x)
    if (std::isfinite(f[x])) best = std::max(best, s * f.grid().coordinate(0, x) - f[x]);
  return best;
}

inline double calmness(const SampledFunctiond& f, Index xb) {
  double k = 0;
  for (Index x = 0; x < f.size(); ++x) {
    if (x == xb || f[x] == kInf) continue;
    k = std::max(k, std::max(0.0, f[xb] - f[x]) / f.grid().distance(x, xb));
  }
  return k;
}

/// min over nodes of f(x) - f(x_bar) - l(x - x_bar) for a functional given on displacements.
inline double subgradient_slack(const SampledFunctiond& f, Index xb, const std::function<double(const Pointd&)>& l) {
  const auto& g = f.grid();
  double worst = kInf;
  for (Index x = 0; x < g.size(); ++x) {
    if (f[x] == kInf) continue;
    worst = std::min(worst, f[x] - f[xb] - l(Pointd(g.node(x) - g.node(xb))));
  }
  return worst;
}

/// max c'x s.t. A x <= b, x >= 0 by enumerating every vertex (tiny problems only).
/// Returns -inf when infeasible. Unboundedness is not detected.
inline double lp_by_vertices(const Eigen::MatrixXd& A, const VectorXd& b, const VectorXd& c) {
  const Index m = A.rows(), n = A.cols();
  Eigen::MatrixXd G(m + n, n);
  VectorXd r(m + n);
  G << A, -Eigen::MatrixXd::Identity(n, n);
  r << b, VectorXd::Zero(n);
  double best = -kInf;
  std::vector<int> pick(static_cast<std::size_t>(m + n), 0);
  std::fill(pick.end() - n, pick.end(), 1);
  do {
    Eigen::MatrixXd M(n, n);
    VectorXd rhs(n);
    Index row = 0;
    for (Index i = 0; i < m + n; ++i)
      if (pick[static_cast<std::size_t>(i)]) {
        M.row(row) = G.row(i);
        rhs(row++) = r(i);
      }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible()) continue;
    const VectorXd x = lu.solve(rhs);
    if (((G * x - r).array() <= 1e-9).all()) best = std::max(best, c.dot(x));
  } while (std::next_permutation(pick.begin(), pick.end()));
  return best;
}

}  // namespace oracle
