#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lcx/core.hpp"
#include "lcx/grid.hpp"

namespace lcx {

/// Extended-real values on the nodes of a grid; stands in for f : X -> R-bar.
template <class Scalar>
class SampledFunction {
 public:
  SampledFunction(Grid<Scalar> grid, VectorX<Scalar> values, std::string name = {})
      : grid_(std::move(grid)), values_(std::move(values)), name_(std::move(name)) {
    if (values_.size() != grid_.size())
      fail(ErrorKind::usage, "value count " + std::to_string(values_.size()) +
                                 " does not match node count " + std::to_string(grid_.size()));
    if (values_.hasNaN()) fail(ErrorKind::domain, "sampled values contain NaN");
  }

  const Grid<Scalar>& grid() const { return grid_; }
  const VectorX<Scalar>& values() const { return values_; }
  const std::string& name() const { return name_; }
  Index size() const { return values_.size(); }

  Scalar operator[](Index j) const { return values_(j); }
  ExtReal<Scalar> at(Index j) const { return ExtReal<Scalar>(values_(j)); }

  bool is_finite(Index j) const { return std::isfinite(values_(j)); }

  bool is_proper() const {
    for (Index j = 0; j < size(); ++j)
      if (is_finite(j)) return true;
    return false;
  }

  bool has_neg_inf() const {
    for (Index j = 0; j < size(); ++j)
      if (values_(j) == -infinity<Scalar>()) return true;
    return false;
  }

  std::vector<Index> effective_domain() const {
    std::vector<Index> dom;
    for (Index j = 0; j < size(); ++j)
      if (is_finite(j)) dom.push_back(j);
    return dom;
  }

  /// max |f| over finite nodes (0 if none).
  Scalar sup_norm() const {
    Scalar m(0);
    for (Index j = 0; j < size(); ++j)
      if (is_finite(j)) m = std::max(m, std::abs(values_(j)));
    return m;
  }

  Scalar feasibility_tolerance(const Tolerances& tol = {}) const {
    return Scalar(tol.feas_rel) * (Scalar(1) + sup_norm());
  }

 private:
  Grid<Scalar> grid_;
  VectorX<Scalar> values_;
  std::string name_;
};

using SampledFunctiond = SampledFunction<double>;

template <class Scalar>
SampledFunction<Scalar> negate(const SampledFunction<Scalar>& f) {
  return SampledFunction<Scalar>(f.grid(), -f.values(), f.name().empty() ? "" : "-" + f.name());
}

template <class Scalar>
SampledFunction<Scalar> scale(const SampledFunction<Scalar>& f, Scalar lambda) {
  if (lambda == Scalar(0)) fail(ErrorKind::precondition, "scaling by zero is excluded");
  return SampledFunction<Scalar>(f.grid(), lambda * f.values(), f.name());
}

/// Node-wise extended-real sum; (+inf) + (-inf) raises a domain error.
template <class Scalar>
SampledFunction<Scalar> add(const SampledFunction<Scalar>& a, const SampledFunction<Scalar>& b) {
  if (!(a.grid() == b.grid())) fail(ErrorKind::usage, "sum of functions on different grids");
  VectorX<Scalar> v(a.size());
  for (Index j = 0; j < a.size(); ++j) v(j) = (a.at(j) + b.at(j)).value();
  return SampledFunction<Scalar>(a.grid(), std::move(v));
}

/// Throws unless f is proper and never -inf (the envelope precondition).
template <class Scalar>
void require_proper_no_neg_inf(const SampledFunction<Scalar>& f, const char* op) {
  if (f.has_neg_inf()) fail(ErrorKind::precondition, std::string(op) + ": function takes the value -inf");
  if (!f.is_proper()) fail(ErrorKind::improper, std::string(op) + ": function has no finite value");
}

/// Node-wise f <= g with +inf on the right always satisfied.
template <class Scalar>
Scalar max_excess(const VectorX<Scalar>& lower, const SampledFunction<Scalar>& f, Index* argmax = nullptr) {
  Scalar worst = -infinity<Scalar>();
  Index where = -1;
  for (Index j = 0; j < f.size(); ++j) {
    if (f[j] == infinity<Scalar>()) continue;
    const Scalar e = lower(j) - f[j];
    if (e > worst) {
      worst = e;
      where = j;
    }
  }
  if (argmax) *argmax = where;
  return worst;
}

}  // namespace lcx
