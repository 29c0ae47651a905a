#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lcx/core.hpp"
#include "lcx/grid.hpp"
#include "lcx/sampled_function.hpp"

namespace lcx {

enum class GalleryId { square, neg_sqrt_abs, abs_diff_2d, sqrt2_abs, abs_1d, affine, piecewise_linear, custom };

/// Closed-form functions used throughout the examples and tests.
template <class Scalar>
class GalleryFunction {
 public:
  using PointType = Point<Scalar>;
  using Evaluator = std::function<ExtReal<Scalar>(const PointType&)>;

  static GalleryFunction square() {
    return {GalleryId::square, "square", 1, [](const PointType& x) { return ExtReal<Scalar>(x(0) * x(0)); }};
  }
  static GalleryFunction neg_sqrt_abs() {
    return {GalleryId::neg_sqrt_abs, "neg_sqrt_abs", 1,
            [](const PointType& x) { return ExtReal<Scalar>(-std::sqrt(std::abs(x(0)))); }};
  }
  static GalleryFunction abs_diff_2d() {
    return {GalleryId::abs_diff_2d, "abs_diff_2d", 2,
            [](const PointType& x) { return ExtReal<Scalar>(std::abs(x(0)) - std::abs(x(1))); }};
  }
  static GalleryFunction sqrt2_abs() {
    return {GalleryId::sqrt2_abs, "sqrt2_abs", 1,
            [](const PointType& x) { return ExtReal<Scalar>(std::sqrt(Scalar(2)) * std::abs(x(0))); }};
  }
  static GalleryFunction abs_1d() {
    return {GalleryId::abs_1d, "abs_1d", 1, [](const PointType& x) { return ExtReal<Scalar>(std::abs(x(0))); }};
  }
  static GalleryFunction affine(Scalar a, Scalar b) {
    return {GalleryId::affine, "affine", 1, [a, b](const PointType& x) { return ExtReal<Scalar>(a * x(0) + b); }};
  }

  /// Linear interpolation through (x_i, y_i), extended linearly past the end knots.
  static GalleryFunction piecewise_linear(std::vector<std::pair<Scalar, Scalar>> knots) {
    if (knots.size() < 2) fail(ErrorKind::usage, "piecewise-linear function needs at least 2 knots");
    std::sort(knots.begin(), knots.end());
    for (std::size_t i = 1; i < knots.size(); ++i)
      if (!(knots[i].first > knots[i - 1].first)) fail(ErrorKind::usage, "piecewise-linear knots must be distinct");
    return {GalleryId::piecewise_linear, "piecewise_linear", 1, [knots](const PointType& x) {
              const Scalar t = x(0);
              auto it = std::upper_bound(knots.begin(), knots.end(), t,
                                         [](Scalar v, const auto& k) { return v < k.first; });
              std::size_t hi = static_cast<std::size_t>(it - knots.begin());
              hi = std::clamp<std::size_t>(hi, 1, knots.size() - 1);
              const auto& [x0, y0] = knots[hi - 1];
              const auto& [x1, y1] = knots[hi];
              return ExtReal<Scalar>(y0 + (y1 - y0) * ((t - x0) / (x1 - x0)));
            }};
  }

  static GalleryFunction custom(std::string name, int dim, Evaluator fn) {
    return {GalleryId::custom, std::move(name), dim, std::move(fn)};
  }

  /// One of the five parameter-free ids, or nullopt.
  static std::optional<GalleryFunction> from_id(const std::string& id) {
    if (id == "square") return square();
    if (id == "neg_sqrt_abs") return neg_sqrt_abs();
    if (id == "abs_diff_2d") return abs_diff_2d();
    if (id == "sqrt2_abs") return sqrt2_abs();
    if (id == "abs_1d") return abs_1d();
    return std::nullopt;
  }

  GalleryId id() const { return id_; }
  const std::string& name() const { return name_; }
  int dim() const { return dim_; }

  ExtReal<Scalar> operator()(const PointType& x) const {
    if (x.size() != dim_) fail(ErrorKind::usage, name_ + ": point dimension mismatch");
    return fn_(x);
  }

 private:
  GalleryFunction(GalleryId id, std::string name, int dim, Evaluator fn)
      : id_(id), name_(std::move(name)), dim_(dim), fn_(std::move(fn)) {}

  GalleryId id_;
  std::string name_;
  int dim_;
  Evaluator fn_;
};

using GalleryFunctiond = GalleryFunction<double>;

inline std::vector<std::string> gallery_ids() {
  return {"square", "neg_sqrt_abs", "abs_diff_2d", "sqrt2_abs", "abs_1d"};
}

template <class Scalar>
ExtReal<Scalar> eval(const GalleryFunction<Scalar>& f, const Point<Scalar>& x) {
  return f(x);
}

/// Gallery evaluation restricted to a box: points outside it are a domain error.
template <class Scalar>
ExtReal<Scalar> eval(const GalleryFunction<Scalar>& f, const Point<Scalar>& x, const Grid<Scalar>& box) {
  if (!box.contains(x)) fail(ErrorKind::domain, f.name() + ": point outside box");
  return f(x);
}

/// Stored value at a node; no interpolation.
template <class Scalar>
ExtReal<Scalar> eval(const SampledFunction<Scalar>& f, const Point<Scalar>& x) {
  return f.at(f.grid().require_node(x));
}

template <class Scalar>
SampledFunction<Scalar> sample(const GalleryFunction<Scalar>& f, const Grid<Scalar>& g) {
  if (f.dim() != g.dim()) fail(ErrorKind::usage, f.name() + ": grid dimension mismatch");
  VectorX<Scalar> v(g.size());
  for (Index j = 0; j < g.size(); ++j) v(j) = f(g.node(j)).value();
  return SampledFunction<Scalar>(g, std::move(v), f.name());
}

}  // namespace lcx
