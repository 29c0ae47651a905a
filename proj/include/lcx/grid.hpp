#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "lcx/core.hpp"

namespace lcx {

enum class Norm { l1, l2, linf };

inline const char* to_string(Norm p) {
  switch (p) {
    case Norm::l1: return "1";
    case Norm::l2: return "2";
    case Norm::linf: return "inf";
  }
  return "?";
}

/// l_p norm of a displacement vector.
template <class Derived>
typename Derived::Scalar lp_norm(const Eigen::MatrixBase<Derived>& d, Norm p) {
  using std::abs;
  using Scalar = typename Derived::Scalar;
  switch (p) {
    case Norm::l1: return d.cwiseAbs().sum();
    case Norm::linf: return d.size() == 0 ? Scalar(0) : d.cwiseAbs().maxCoeff();
    case Norm::l2: break;
  }
  if (d.size() == 1) return abs(d(0));
  return std::hypot(d(0), d(1));
}

/// Uniform grid on a box in R^1 or R^2 with a chosen l_p norm.
///
/// Node j has coordinates lower + i * h on every axis, computed from the
/// formula (never by accumulation) so they are bit-reproducible. Nodes are
/// ordered row-major: the first axis varies slowest.
template <class Scalar>
class Grid {
 public:
  using PointType = Point<Scalar>;

  Grid(const PointType& lower, const PointType& upper, std::array<Index, 2> nodes,
       Norm norm = Norm::l2)
      : lower_(lower), upper_(upper), nodes_(nodes), norm_(norm) {
    const Index d = lower_.size();
    if (d < 1 || d > 2 || upper_.size() != d) fail(ErrorKind::usage, "grid dimension must be 1 or 2");
    if (d == 1) nodes_[1] = 1;
    spacing_.resize(d);
    for (Index i = 0; i < d; ++i) {
      if (!std::isfinite(lower_(i)) || !std::isfinite(upper_(i)) || !(lower_(i) < upper_(i)))
        fail(ErrorKind::usage, "grid requires finite lower < upper on every axis");
      if (nodes_[i] < 2) fail(ErrorKind::usage, "grid requires at least 2 nodes per axis");
      spacing_(i) = (upper_(i) - lower_(i)) / Scalar(nodes_[i] - 1);
      if (!(spacing_(i) > 0)) fail(ErrorKind::usage, "grid spacing must be positive");
    }
  }

  static Grid line(Scalar lo, Scalar hi, Index n, Norm norm = Norm::l2) {
    PointType lower(1), upper(1);
    lower << lo;
    upper << hi;
    return Grid(lower, upper, {n, 1}, norm);
  }

  static Grid rect(Scalar lo0, Scalar hi0, Index n0, Scalar lo1, Scalar hi1, Index n1,
                   Norm norm = Norm::l2) {
    PointType lower(2), upper(2);
    lower << lo0, lo1;
    upper << hi0, hi1;
    return Grid(lower, upper, {n0, n1}, norm);
  }

  int dim() const { return static_cast<int>(lower_.size()); }
  Index size() const { return dim() == 1 ? nodes_[0] : nodes_[0] * nodes_[1]; }
  Index nodes(int axis) const { return nodes_[axis]; }
  Scalar lower(int axis) const { return lower_(axis); }
  Scalar upper(int axis) const { return upper_(axis); }
  Scalar spacing(int axis) const { return spacing_(axis); }
  Norm norm() const { return norm_; }
  const PointType& lower() const { return lower_; }
  const PointType& upper() const { return upper_; }

  Scalar coordinate(int axis, Index i) const { return lower_(axis) + Scalar(i) * spacing_(axis); }

  std::array<Index, 2> multi_index(Index j) const {
    if (dim() == 1) return {j, 0};
    return {j / nodes_[1], j % nodes_[1]};
  }

  Index flat_index(Index i0, Index i1 = 0) const { return dim() == 1 ? i0 : i0 * nodes_[1] + i1; }

  PointType node(Index j) const {
    const auto mi = multi_index(j);
    PointType x(dim());
    for (int a = 0; a < dim(); ++a) x(a) = coordinate(a, mi[a]);
    return x;
  }

  Scalar distance(const PointType& x, const PointType& y) const { return lp_norm(x - y, norm_); }
  Scalar distance(Index i, Index j) const { return distance(node(i), node(j)); }

  bool contains(const PointType& x) const {
    if (x.size() != dim()) return false;
    for (int a = 0; a < dim(); ++a) {
      const Scalar slack = Scalar(1e-9) * spacing_(a);
      if (x(a) < lower_(a) - slack || x(a) > coordinate(a, nodes_[a] - 1) + slack) return false;
    }
    return true;
  }

  /// Index of the node at x, if x coincides with a node to within 1e-9 of the spacing.
  std::optional<Index> locate(const PointType& x) const {
    if (!contains(x)) return std::nullopt;
    std::array<Index, 2> mi{0, 0};
    for (int a = 0; a < dim(); ++a) {
      const Scalar t = (x(a) - lower_(a)) / spacing_(a);
      const Scalar r = std::round(t);
      if (std::abs(t - r) > Scalar(1e-9)) return std::nullopt;
      mi[a] = static_cast<Index>(r);
      if (mi[a] < 0 || mi[a] >= nodes_[a]) return std::nullopt;
    }
    return flat_index(mi[0], mi[1]);
  }

  /// Like locate(), but a point outside the box is a domain error and a
  /// non-node point is a usage error.
  Index require_node(const PointType& x) const {
    if (x.size() != dim()) fail(ErrorKind::usage, "point dimension does not match grid");
    if (!contains(x)) fail(ErrorKind::domain, "point outside grid box");
    auto j = locate(x);
    if (!j) fail(ErrorKind::usage, "point is not a grid node (no interpolation)");
    return *j;
  }

  bool on_boundary(Index j) const {
    const auto mi = multi_index(j);
    for (int a = 0; a < dim(); ++a)
      if (mi[a] == 0 || mi[a] == nodes_[a] - 1) return true;
    return false;
  }

  /// Grid with every spacing halved `times` times; the old nodes are a subset of the new ones.
  Grid refined(int times) const {
    std::array<Index, 2> n = nodes_;
    for (int a = 0; a < dim(); ++a) n[a] = (nodes_[a] - 1) * (Index(1) << times) + 1;
    return Grid(lower_, upper_, n, norm_);
  }

  Grid with_norm(Norm p) const { return Grid(lower_, upper_, nodes_, p); }

  /// dim x size matrix of node coordinates.
  MatrixX<Scalar> coordinates() const {
    MatrixX<Scalar> X(dim(), size());
    for (Index j = 0; j < size(); ++j) X.col(j) = node(j);
    return X;
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.lower_ == b.lower_ && a.upper_ == b.upper_ && a.nodes_ == b.nodes_ &&
           a.norm_ == b.norm_;
  }

 private:
  PointType lower_, upper_;
  std::array<Index, 2> nodes_;
  Norm norm_;
  VectorX<Scalar> spacing_;
};

using Gridd = Grid<double>;

/// Distance between two points of the grid's box in the grid's norm.
template <class Scalar>
Scalar norm_dist(const Grid<Scalar>& g, const Point<Scalar>& x, const Point<Scalar>& y) {
  if (!g.contains(x) || !g.contains(y)) fail(ErrorKind::domain, "norm_dist: point outside grid box");
  return g.distance(x, y);
}

namespace detail {

/// Pairwise node distances without re-deriving coordinates in the inner loop.
template <class Scalar>
class DistanceTable {
 public:
  explicit DistanceTable(const Grid<Scalar>& g) : norm_(g.norm()), dim_(g.dim()), X_(g.coordinates()) {}

  Scalar operator()(Index i, Index j) const {
    using std::abs;
    if (dim_ == 1) return abs(X_(0, i) - X_(0, j));
    const Scalar a = abs(X_(0, i) - X_(0, j));
    const Scalar b = abs(X_(1, i) - X_(1, j));
    switch (norm_) {
      case Norm::l1: return a + b;
      case Norm::linf: return a > b ? a : b;
      case Norm::l2: break;
    }
    return std::hypot(a, b);
  }

 private:
  Norm norm_;
  int dim_;
  MatrixX<Scalar> X_;
};

}  // namespace detail
}  // namespace lcx
