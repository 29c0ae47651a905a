#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "lcx/grid.hpp"
#include "lcx/sampled_function.hpp"

namespace lcx {

/// x -> level - slope * ||x - apex||. Concave and slope-Lipschitz in any norm.
template <class Scalar>
struct ConeFunction {
  Point<Scalar> apex;
  Scalar slope{0};
  Scalar level{0};

  Scalar operator()(const Point<Scalar>& x, Norm p) const { return level - slope * lp_norm(x - apex, p); }
};

using ConeFunctiond = ConeFunction<double>;

template <class Scalar>
VectorX<Scalar> sample(const ConeFunction<Scalar>& c, const Grid<Scalar>& g) {
  VectorX<Scalar> v(g.size());
  for (Index j = 0; j < g.size(); ++j) v(j) = c(g.node(j), g.norm());
  return v;
}

/// Real-valued grid function with a Lipschitz budget. In 1-D it is meant to be
/// concave; validate() reports how far it is from satisfying each invariant.
template <class Scalar>
struct GridMinorant {
  Grid<Scalar> grid;
  VectorX<Scalar> values;
  Scalar lipschitz_budget{0};
};

using GridMinorantd = GridMinorant<double>;

template <class Scalar>
struct MinorantValidation {
  Scalar minorant_excess{0};      // max (v - f) over finite nodes; <= tol required
  Scalar concavity_excess{0};     // max second difference (1-D); <= tol required
  Scalar lipschitz_excess{0};     // max |v_i - v_j| - K ||x_i - x_j||; <= tol required
  Index worst_minorant_node = -1;
  Scalar tol{0};

  bool minorant() const { return minorant_excess <= tol; }
  bool concave() const { return concavity_excess <= tol; }
  bool lipschitz() const { return lipschitz_excess <= tol; }
  bool ok() const { return minorant() && concave() && lipschitz(); }
};

/// Maximum second difference v[j-1] - 2 v[j] + v[j+1] over interior nodes of a 1-D grid.
template <class Scalar>
Scalar max_second_difference(const VectorX<Scalar>& v) {
  Scalar worst = -infinity<Scalar>();
  for (Index j = 1; j + 1 < v.size(); ++j) worst = std::max(worst, v(j - 1) - Scalar(2) * v(j) + v(j + 1));
  return v.size() < 3 ? Scalar(0) : worst;
}

/// Independent re-check of the three GridMinorant invariants against f.
///
/// The Lipschitz check runs over all node pairs, not only neighbours, so it
/// does not rely on concavity or on the 1-D structure.
template <class Scalar>
MinorantValidation<Scalar> validate(const GridMinorant<Scalar>& m, const SampledFunction<Scalar>& f, Scalar tol) {
  if (!(m.grid == f.grid())) fail(ErrorKind::usage, "minorant and function live on different grids");
  MinorantValidation<Scalar> r;
  r.tol = tol;
  r.minorant_excess = std::max(Scalar(0), max_excess(m.values, f, &r.worst_minorant_node));
  r.concavity_excess = m.grid.dim() == 1 ? std::max(Scalar(0), max_second_difference(m.values)) : Scalar(0);
  const detail::DistanceTable<Scalar> dist(m.grid);
  Scalar lip(0);
  for (Index i = 0; i < m.values.size(); ++i)
    for (Index j = i + 1; j < m.values.size(); ++j)
      lip = std::max(lip, std::abs(m.values(i) - m.values(j)) - m.lipschitz_budget * dist(i, j));
  r.lipschitz_excess = lip;
  return r;
}

/// Nodes where a minorant touches f to within tol.
template <class Scalar>
std::vector<Index> touching_nodes(const VectorX<Scalar>& v, const SampledFunction<Scalar>& f, Scalar tol) {
  std::vector<Index> out;
  for (Index j = 0; j < f.size(); ++j)
    if (f.is_finite(j) && std::abs(f[j] - v(j)) <= tol) out.push_back(j);
  return out;
}

}  // namespace lcx
