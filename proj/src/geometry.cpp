#include "robinfluct/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "robinfluct/quadrature.hpp"

namespace robinfluct {

BoxDomain::BoxDomain(std::span<const double> lo, std::span<const double> hi) {
  if (lo.size() != hi.size()) throw DomainError("BoxDomain: lo/hi size mismatch");
  if (lo.empty() || lo.size() > kMaxDim)
    throw DomainError("BoxDomain: dimension must be 1, 2 or 3");
  dim_ = static_cast<int>(lo.size());
  for (int i = 0; i < dim_; ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || !(hi[i] > lo[i]))
      throw DomainError("BoxDomain: axis " + std::to_string(i) + " requires hi > lo");
    lo_[i] = lo[i];
    hi_[i] = hi[i];
  }
}

BoxDomain::BoxDomain(std::initializer_list<std::array<double, 2>> bounds) {
  std::vector<double> lo;
  std::vector<double> hi;
  for (const auto& b : bounds) {
    lo.push_back(b[0]);
    hi.push_back(b[1]);
  }
  *this = BoxDomain(lo, hi);
}

BoxDomain BoxDomain::unit(int dim) {
  std::vector<double> lo(dim, 0.0);
  std::vector<double> hi(dim, 1.0);
  return BoxDomain(lo, hi);
}

double BoxDomain::volume() const {
  double v = 1.0;
  for (int i = 0; i < dim_; ++i) v *= side(i);
  return v;
}

double BoxDomain::surface_measure() const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) {
    double face = 1.0;
    for (int j = 0; j < dim_; ++j)
      if (j != i) face *= side(j);
    s += 2.0 * face;
  }
  return s;
}

double BoxDomain::min_side() const {
  double m = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dim_; ++i) m = std::min(m, side(i));
  return m;
}

Point BoxDomain::center() const {
  Point c{};
  for (int i = 0; i < dim_; ++i) c[i] = 0.5 * (lo_[i] + hi_[i]);
  return c;
}

bool BoxDomain::contains(const Point& x, double tol) const {
  for (int i = 0; i < dim_; ++i)
    if (x[i] < lo_[i] - tol || x[i] > hi_[i] + tol) return false;
  return true;
}

double BoxDomain::fold_axis(double x, int axis) const {
  const double lo = lo_[axis];
  const double hi = hi_[axis];
  if (x >= lo && x <= hi) return x;
  const double len = hi - lo;
  // single reflection covers every step of a well-resolved path
  if (x < lo && x >= lo - len) return lo + (lo - x);
  if (x > hi && x <= hi + len) return hi - (x - hi);
  double r = std::fmod(x - lo, 2.0 * len);
  if (r < 0.0) r += 2.0 * len;
  if (r > len) r = 2.0 * len - r;
  return lo + r;
}

Point BoxDomain::fold(const Point& x) const {
  Point y = x;
  for (int i = 0; i < dim_; ++i) y[i] = fold_axis(x[i], i);
  return y;
}

double BoxDomain::dist_to_boundary_unchecked(const Point& x) const {
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dim_; ++i) d = std::min({d, x[i] - lo_[i], hi_[i] - x[i]});
  return d;
}

double BoxDomain::dist_to_boundary(const Point& x) const {
  if (!contains(x)) throw DomainError("dist_to_boundary: point outside closure(D)");
  return dist_to_boundary_unchecked(x);
}

double BoxDomain::strip_volume(double delta) const {
  if (!(delta > 0.0) || !(delta < 0.5 * min_side()))
    throw DomainError("strip_volume: delta must lie in (0, min_side/2)");
  double inner = 1.0;
  for (int i = 0; i < dim_; ++i) inner *= side(i) - 2.0 * delta;
  return volume() - inner;
}

double BoxDomain::surface_quadrature(const std::function<double(const Point&)>& f,
                                     int resolution) const {
  if (resolution < 2) throw DomainError("surface_quadrature: resolution must be >= 2");
  const auto& rule = gauss_legendre(3);
  double total = 0.0;
  for (const Face& face : faces(*this)) {
    Point x{};
    x[face.axis] = face.upper ? hi_[face.axis] : lo_[face.axis];
    std::vector<int> tangential;
    for (int j = 0; j < dim_; ++j)
      if (j != face.axis) tangential.push_back(j);
    if (tangential.empty()) {
      total += f(x);
      continue;
    }
    // tensor product of composite 3-point rules over the tangential axes
    const int per_axis = resolution * 3;
    std::vector<int> idx(tangential.size(), 0);
    const std::size_t count = [&] {
      std::size_t n = 1;
      for (std::size_t k = 0; k < tangential.size(); ++k) n *= per_axis;
      return n;
    }();
    for (std::size_t flat = 0; flat < count; ++flat) {
      std::size_t rem = flat;
      double w = 1.0;
      for (std::size_t k = 0; k < tangential.size(); ++k) {
        const int ax = tangential[k];
        const int local = static_cast<int>(rem % per_axis);
        rem /= per_axis;
        const int cell = local / 3;
        const int node = local % 3;
        const double h = side(ax) / resolution;
        x[ax] = lo_[ax] + (cell + 0.5) * h + 0.5 * h * rule.nodes[node];
        w *= 0.5 * h * rule.weights[node];
      }
      total += w * f(x);
    }
  }
  return total;
}

std::vector<Face> faces(const BoxDomain& dom) {
  std::vector<Face> out;
  for (int i = 0; i < dom.dim(); ++i) {
    out.push_back({i, false});
    out.push_back({i, true});
  }
  return out;
}

}  // namespace robinfluct
