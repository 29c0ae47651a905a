#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "lcx/envelopes.hpp"

namespace lcx {

/// Cones c - k ||x - y|| with apexes at grid nodes; the level c is free.
template <class Scalar>
struct ConeFamily {
  Scalar slope{0};
};

/// Affine functions s . x + c with s from a finite set; the intercept is free.
template <class Scalar>
struct AffineFamily {
  std::vector<Point<Scalar>> slopes;
};

template <class Scalar>
using ElementaryFamily = std::variant<ConeFamily<Scalar>, AffineFamily<Scalar>>;

template <class Scalar>
Index parameter_count(const ElementaryFamily<Scalar>& fam, const Grid<Scalar>& g) {
  if (std::holds_alternative<ConeFamily<Scalar>>(fam)) return g.size();
  return static_cast<Index>(std::get<AffineFamily<Scalar>>(fam).slopes.size());
}

/// Values at every node of the member with the given parameter (apex node or
/// slope index) and level.
template <class Scalar>
VectorX<Scalar> member_values(const ElementaryFamily<Scalar>& fam, const Grid<Scalar>& g, Index parameter,
                              Scalar level) {
  VectorX<Scalar> v(g.size());
  if (auto* cone = std::get_if<ConeFamily<Scalar>>(&fam)) {
    const detail::DistanceTable<Scalar> dist(g);
    for (Index x = 0; x < g.size(); ++x) v(x) = level - cone->slope * dist(x, parameter);
  } else {
    const auto& s = std::get<AffineFamily<Scalar>>(fam).slopes.at(static_cast<std::size_t>(parameter));
    if (s.size() != g.dim()) fail(ErrorKind::usage, "affine slope dimension mismatch");
    for (Index x = 0; x < g.size(); ++x) v(x) = s.dot(g.node(x)) + level;
  }
  return v;
}

/// Membership: v is a member iff it equals member_values(...) for some parameter and level.
template <class Scalar>
bool is_member(const ElementaryFamily<Scalar>& fam, const Grid<Scalar>& g, const VectorX<Scalar>& v, Scalar tol) {
  for (Index p = 0; p < parameter_count(fam, g); ++p) {
    const VectorX<Scalar> shape = member_values(fam, g, p, Scalar(0));
    const Scalar level = v(0) - shape(0);
    if (((shape.array() + level) - v.array()).abs().maxCoeff() <= tol) return true;
  }
  return false;
}

namespace detail {

template <class Scalar>
std::optional<VectorX<Scalar>> hull_pass(const SampledFunction<Scalar>& f, const ElementaryFamily<Scalar>& fam) {
  const auto& g = f.grid();
  const auto dom = f.effective_domain();
  const Index params = parameter_count(fam, g);
  if (params == 0) return std::nullopt;
  VectorX<Scalar> hull = VectorX<Scalar>::Constant(g.size(), -infinity<Scalar>());
  for (Index p = 0; p < params; ++p) {
    // highest level for which the member stays below f on every finite node
    const VectorX<Scalar> shape = member_values(fam, g, p, Scalar(0));
    Scalar level = infinity<Scalar>();
    for (Index x : dom) level = std::min(level, f[x] - shape(x));
    hull = hull.cwiseMax((shape.array() + level).matrix());
  }
  // level - shape can round above f
  for (Index x : dom) hull(x) = std::min(hull(x), f[x]);
  return hull;
}

}  // namespace detail

/// Upper envelope of the family members lying below f on the grid.
///
/// Returns nullopt when no member minorizes f ("not fam-convexifiable").
/// The hull map is iterated until its output stops changing (at most 64
/// passes), so family_hull(family_hull(f)) agrees with it up to rounding.
template <class Scalar>
std::optional<SampledFunction<Scalar>> family_hull(const SampledFunction<Scalar>& f,
                                                   const ElementaryFamily<Scalar>& fam) {
  require_proper_no_neg_inf(f, "family_hull");
  auto first = detail::hull_pass(f, fam);
  if (!first) return std::nullopt;
  auto op = [&fam](const SampledFunction<Scalar>& s) { return *detail::hull_pass(s, fam); };
  return SampledFunction<Scalar>(f.grid(), detail::stabilize(f.grid(), std::move(*first), op), f.name());
}

}  // namespace lcx
