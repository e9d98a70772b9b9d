#pragma once

#include <array>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace robinfluct {

inline constexpr int kMaxDim = 3;

/// A point in R^d, d <= 3. Components beyond the domain dimension are ignored
/// and kept at zero.
using Point = std::array<double, kMaxDim>;

class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Axis-aligned hyperrectangle D = prod_i [lo_i, hi_i] with d in {1, 2, 3}.
///
/// The reflecting boundary is realized exactly by `fold`, which maps R^d onto
/// the closure of D by the even, 2(hi - lo)-periodic reflection per axis. For
/// d = 1 the surface measure on the boundary is the counting measure on the
/// two endpoints.
class BoxDomain {
 public:
  BoxDomain(std::span<const double> lo, std::span<const double> hi);
  BoxDomain(std::initializer_list<std::array<double, 2>> bounds);

  /// Unit cube [0,1]^d.
  static BoxDomain unit(int dim);

  int dim() const { return dim_; }
  double lo(int axis) const { return lo_[axis]; }
  double hi(int axis) const { return hi_[axis]; }
  double side(int axis) const { return hi_[axis] - lo_[axis]; }
  double volume() const;
  double surface_measure() const;
  double min_side() const;
  Point center() const;

  bool contains(const Point& x, double tol = 0.0) const;

  /// Exact reflection map onto closure(D). Identity on closure(D).
  Point fold(const Point& x) const;
  /// Per-axis reflection, exposed for the particle hot loop.
  double fold_axis(double x, int axis) const;

  /// min over axes of the distance to the nearest face; throws for x outside
  /// closure(D).
  double dist_to_boundary(const Point& x) const;
  /// Same as dist_to_boundary without the containment check.
  double dist_to_boundary_unchecked(const Point& x) const;

  /// Lebesgue volume of the boundary strip {x in D : dist(x, dD) < delta},
  /// for 0 < delta < min_side / 2.
  double strip_volume(double delta) const;

  /// Composite 3-point Gauss-Legendre quadrature of f over all 2d faces
  /// against the surface measure. `resolution` cells per tangential axis.
  double surface_quadrature(const std::function<double(const Point&)>& f,
                            int resolution) const;

  bool operator==(const BoxDomain& other) const = default;

 private:
  int dim_ = 0;
  Point lo_{};
  Point hi_{};
};

/// A face of a box: the set {x_axis = lo_axis} (upper == false) or
/// {x_axis = hi_axis} (upper == true).
struct Face {
  int axis;
  bool upper;
};

std::vector<Face> faces(const BoxDomain& dom);

}  // namespace robinfluct
