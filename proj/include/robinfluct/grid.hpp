#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "robinfluct/geometry.hpp"

namespace robinfluct {

/// Values on a vertex-centered tensor grid over a box. Nodes include the
/// faces; flat index order has the last axis fastest.
class GridFunction {
 public:
  GridFunction() = default;
  GridFunction(const BoxDomain& dom, std::span<const int> shape);
  /// Same node count on every axis.
  GridFunction(const BoxDomain& dom, int nodes_per_axis);

  static GridFunction sample(const BoxDomain& dom, std::span<const int> shape,
                             const std::function<double(const Point&)>& f);
  static GridFunction sample(const BoxDomain& dom, int nodes_per_axis,
                             const std::function<double(const Point&)>& f);
  /// Grid with the same layout as `like`, values from f.
  static GridFunction sample_like(const GridFunction& like,
                                  const std::function<double(const Point&)>& f);

  const BoxDomain& domain() const { return dom_; }
  int dim() const { return dom_.dim(); }
  int nodes(int axis) const { return shape_[axis]; }
  const std::array<int, kMaxDim>& shape() const { return shape_; }
  double spacing(int axis) const { return dom_.side(axis) / (shape_[axis] - 1); }
  std::size_t size() const { return values_.size(); }

  std::array<int, kMaxDim> multi_index(std::size_t flat) const;
  std::size_t flat_index(const std::array<int, kMaxDim>& m) const;
  Point node(std::size_t flat) const;
  /// True when the node lies on at least one face.
  bool on_boundary(std::size_t flat) const;
  std::size_t stride(int axis) const { return stride_[axis]; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  bool conforms(const GridFunction& other) const;

  /// Per-node trapezoid weights (product of per-axis h or h/2).
  std::vector<double> trapezoid_weights() const;
  /// Per-node surface weights: for each face containing the node, the
  /// product of tangential trapezoid weights (1 per face when d = 1).
  std::vector<double> surface_weights() const;

  double integral() const;
  /// Trapezoid-rule L2 inner product; throws on nonconforming grids.
  double inner(const GridFunction& other) const;
  double sup_norm() const;
  /// Multilinear interpolation at x in closure(D).
  double interpolate(const Point& x) const;

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(double s);

  /// CSV with one row per node: x0[,x1[,x2]],value, last axis fastest.
  void write_csv(std::ostream& out) const;

 private:
  BoxDomain dom_ = BoxDomain::unit(1);
  std::array<int, kMaxDim> shape_{1, 1, 1};
  std::array<std::size_t, kMaxDim> stride_{1, 1, 1};
  std::vector<double> values_;
};

GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator+(GridFunction a, const GridFunction& b);

}  // namespace robinfluct
