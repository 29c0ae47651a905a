#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "lcx/core.hpp"

namespace lcx {

/// maximize c'x subject to A x <= b, x >= 0.
template <class Scalar>
struct LinearProgram {
  MatrixX<Scalar> A;
  VectorX<Scalar> b;
  VectorX<Scalar> c;
};

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "?";
}

template <class Scalar>
struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  VectorX<Scalar> x;
  Scalar objective{0};
  long pivots = 0;
  bool used_bland = false;  // degenerate stalling switched the entering rule
};

struct SimplexOptions {
  double eps = 1e-9;
  int stall_limit = 64;  // consecutive degenerate pivots before Bland's rule
  long max_pivots = 0;   // 0: 50 * (m + n)
};

/// Dense two-phase tableau simplex.
///
/// The tableau keeps only nonbasic columns (m+2 rows, n+2 columns): row m is
/// the objective, row m+1 the phase-one objective, column n the artificial
/// variable and column n+1 the right-hand side. Entering variables follow
/// Dantzig's rule until a run of degenerate pivots, then Bland's rule, which
/// cannot cycle. Ties are broken by variable index.
template <class Scalar>
class DenseSimplex {
 public:
  using Tableau = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  DenseSimplex(const LinearProgram<Scalar>& lp, SimplexOptions opts = {})
      : m_(lp.b.size()), n_(lp.c.size()), opts_(opts), eps_(Scalar(opts.eps)) {
    if (lp.A.rows() != m_ || lp.A.cols() != n_) fail(ErrorKind::usage, "LP dimensions are inconsistent");
    D_ = Tableau::Zero(m_ + 2, n_ + 2);
    basic_.resize(static_cast<std::size_t>(m_));
    nonbasic_.resize(static_cast<std::size_t>(n_ + 1));
    D_.topLeftCorner(m_, n_) = lp.A;
    for (Index i = 0; i < m_; ++i) {
      basic_[static_cast<std::size_t>(i)] = n_ + i;
      D_(i, n_) = -1;
      D_(i, n_ + 1) = lp.b(i);
    }
    for (Index j = 0; j < n_; ++j) {
      nonbasic_[static_cast<std::size_t>(j)] = j;
      D_(m_, j) = -lp.c(j);
    }
    nonbasic_[static_cast<std::size_t>(n_)] = -1;
    D_(m_ + 1, n_) = 1;
    if (opts_.max_pivots == 0) opts_.max_pivots = 50 * static_cast<long>(m_ + n_ + 1);
  }

  LpSolution<Scalar> solve() {
    LpSolution<Scalar> out;
    Index r = 0;
    for (Index i = 1; i < m_; ++i)
      if (D_(i, n_ + 1) < D_(r, n_ + 1)) r = i;
    if (m_ > 0 && D_(r, n_ + 1) < -eps_) {
      pivot(r, n_);
      const LpStatus phase1 = run(2);
      if (phase1 == LpStatus::iteration_limit) return finish(out, phase1);
      if (D_(m_ + 1, n_ + 1) < -eps_) return finish(out, LpStatus::infeasible);
      for (Index i = 0; i < m_; ++i) {
        if (basic_[static_cast<std::size_t>(i)] != -1) continue;
        Index s = 0;
        for (Index j = 1; j <= n_; ++j)
          if (std::make_pair(D_(i, j), nonbasic_[static_cast<std::size_t>(j)]) <
              std::make_pair(D_(i, s), nonbasic_[static_cast<std::size_t>(s)]))
            s = j;
        pivot(i, s);
      }
    }
    return finish(out, run(1));
  }

 private:
  LpSolution<Scalar>& finish(LpSolution<Scalar>& out, LpStatus status) {
    out.status = status;
    out.x = VectorX<Scalar>::Zero(n_);
    for (Index i = 0; i < m_; ++i)
      if (basic_[static_cast<std::size_t>(i)] >= 0 && basic_[static_cast<std::size_t>(i)] < n_)
        out.x(basic_[static_cast<std::size_t>(i)]) = D_(i, n_ + 1);
    out.objective = D_(m_, n_ + 1);
    out.pivots = pivots_;
    out.used_bland = used_bland_;
    return out;
  }

  void pivot(Index r, Index s) {
    const Scalar inv = Scalar(1) / D_(r, s);
    const auto pivot_row = D_.row(r).eval();
    for (Index i = 0; i < m_ + 2; ++i) {
      if (i == r || std::abs(D_(i, s)) <= eps_) continue;
      const Scalar factor = D_(i, s) * inv;
      D_.row(i) -= factor * pivot_row;
      D_(i, s) = pivot_row(s) * factor;
    }
    for (Index j = 0; j < n_ + 2; ++j)
      if (j != s) D_(r, j) *= inv;
    for (Index i = 0; i < m_ + 2; ++i)
      if (i != r) D_(i, s) *= -inv;
    D_(r, s) = inv;
    std::swap(basic_[static_cast<std::size_t>(r)], nonbasic_[static_cast<std::size_t>(s)]);
    ++pivots_;
  }

  LpStatus run(int phase) {
    const Index obj = m_ + phase - 1;
    int stalled = 0;
    for (;;) {
      if (pivots_ >= opts_.max_pivots) return LpStatus::iteration_limit;
      const bool bland = stalled >= opts_.stall_limit;
      used_bland_ = used_bland_ || bland;
      Index s = -1;
      for (Index j = 0; j <= n_; ++j) {
        const Index var = nonbasic_[static_cast<std::size_t>(j)];
        if (var == -phase) continue;
        if (bland) {
          if (D_(obj, j) < -eps_ && (s == -1 || var < nonbasic_[static_cast<std::size_t>(s)])) s = j;
        } else if (s == -1 || std::make_pair(D_(obj, j), var) <
                                  std::make_pair(D_(obj, s), nonbasic_[static_cast<std::size_t>(s)])) {
          s = j;
        }
      }
      if (s == -1 || D_(obj, s) >= -eps_) return LpStatus::optimal;
      Index r = -1;
      for (Index i = 0; i < m_; ++i) {
        if (D_(i, s) <= eps_) continue;
        if (r == -1) {
          r = i;
          continue;
        }
        const Scalar ri = D_(i, n_ + 1) / D_(i, s);
        const Scalar rr = D_(r, n_ + 1) / D_(r, s);
        if (ri < rr || (ri == rr && basic_[static_cast<std::size_t>(i)] < basic_[static_cast<std::size_t>(r)])) r = i;
      }
      if (r == -1) return LpStatus::unbounded;
      const bool degenerate = std::abs(D_(r, n_ + 1)) <= eps_;
      stalled = degenerate ? stalled + 1 : 0;
      pivot(r, s);
    }
  }

  Index m_, n_;
  SimplexOptions opts_;
  Scalar eps_;
  Tableau D_;
  std::vector<Index> basic_, nonbasic_;
  long pivots_ = 0;
  bool used_bland_ = false;
};

template <class Scalar>
LpSolution<Scalar> solve_lp(const LinearProgram<Scalar>& lp, SimplexOptions opts = {}) {
  return DenseSimplex<Scalar>(lp, opts).solve();
}

}  // namespace lcx
