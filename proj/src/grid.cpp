#include "robinfluct/grid.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "robinfluct/quadrature.hpp"

namespace robinfluct {

GridFunction::GridFunction(const BoxDomain& dom, std::span<const int> shape) : dom_(dom) {
  if (static_cast<int>(shape.size()) != dom.dim())
    throw std::invalid_argument("GridFunction: shape must have one entry per axis");
  std::size_t total = 1;
  for (int a = 0; a < dom.dim(); ++a) {
    if (shape[a] < 3) throw std::invalid_argument("GridFunction: need at least 3 nodes per axis");
    shape_[a] = shape[a];
    total *= static_cast<std::size_t>(shape[a]);
  }
  std::size_t s = 1;
  for (int a = dom.dim() - 1; a >= 0; --a) {
    stride_[a] = s;
    s *= static_cast<std::size_t>(shape_[a]);
  }
  values_.assign(total, 0.0);
}

GridFunction::GridFunction(const BoxDomain& dom, int nodes_per_axis)
    : GridFunction(dom, std::vector<int>(dom.dim(), nodes_per_axis)) {}

GridFunction GridFunction::sample(const BoxDomain& dom, std::span<const int> shape,
                                  const std::function<double(const Point&)>& f) {
  GridFunction g(dom, shape);
  for (std::size_t i = 0; i < g.size(); ++i) g.values_[i] = f(g.node(i));
  return g;
}

GridFunction GridFunction::sample(const BoxDomain& dom, int nodes_per_axis,
                                  const std::function<double(const Point&)>& f) {
  return sample(dom, std::vector<int>(dom.dim(), nodes_per_axis), f);
}

GridFunction GridFunction::sample_like(const GridFunction& like,
                                       const std::function<double(const Point&)>& f) {
  GridFunction g = like;
  for (std::size_t i = 0; i < g.size(); ++i) g.values_[i] = f(g.node(i));
  return g;
}

std::array<int, kMaxDim> GridFunction::multi_index(std::size_t flat) const {
  std::array<int, kMaxDim> m{};
  for (int a = 0; a < dim(); ++a) {
    m[a] = static_cast<int>(flat / stride_[a]);
    flat %= stride_[a];
  }
  return m;
}

std::size_t GridFunction::flat_index(const std::array<int, kMaxDim>& m) const {
  std::size_t f = 0;
  for (int a = 0; a < dim(); ++a) f += static_cast<std::size_t>(m[a]) * stride_[a];
  return f;
}

Point GridFunction::node(std::size_t flat) const {
  const auto m = multi_index(flat);
  Point x{};
  for (int a = 0; a < dim(); ++a)
    x[a] = m[a] == shape_[a] - 1 ? dom_.hi(a) : dom_.lo(a) + m[a] * spacing(a);
  return x;
}

bool GridFunction::on_boundary(std::size_t flat) const {
  const auto m = multi_index(flat);
  for (int a = 0; a < dim(); ++a)
    if (m[a] == 0 || m[a] == shape_[a] - 1) return true;
  return false;
}

bool GridFunction::conforms(const GridFunction& other) const {
  return dom_ == other.dom_ && shape_ == other.shape_;
}

std::vector<double> GridFunction::trapezoid_weights() const {
  std::vector<double> w(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const auto m = multi_index(i);
    double p = 1.0;
    for (int a = 0; a < dim(); ++a) {
      const bool end = m[a] == 0 || m[a] == shape_[a] - 1;
      p *= end ? 0.5 * spacing(a) : spacing(a);
    }
    w[i] = p;
  }
  return w;
}

std::vector<double> GridFunction::surface_weights() const {
  std::vector<double> w(size(), 0.0);
  for (std::size_t i = 0; i < size(); ++i) {
    const auto m = multi_index(i);
    for (int a = 0; a < dim(); ++a) {
      if (m[a] != 0 && m[a] != shape_[a] - 1) continue;
      double p = 1.0;
      for (int b = 0; b < dim(); ++b) {
        if (b == a) continue;
        const bool end = m[b] == 0 || m[b] == shape_[b] - 1;
        p *= end ? 0.5 * spacing(b) : spacing(b);
      }
      w[i] += p;
    }
  }
  return w;
}

double GridFunction::integral() const {
  const auto w = trapezoid_weights();
  std::vector<double> t(size());
  for (std::size_t i = 0; i < size(); ++i) t[i] = w[i] * values_[i];
  return pairwise_sum(t.data(), t.size());
}

double GridFunction::inner(const GridFunction& other) const {
  if (!conforms(other)) throw std::invalid_argument("GridFunction::inner: nonconforming grids");
  const auto w = trapezoid_weights();
  std::vector<double> t(size());
  for (std::size_t i = 0; i < size(); ++i) t[i] = w[i] * values_[i] * other.values_[i];
  return pairwise_sum(t.data(), t.size());
}

double GridFunction::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GridFunction::interpolate(const Point& x) const {
  std::array<int, kMaxDim> base{};
  std::array<double, kMaxDim> frac{};
  for (int a = 0; a < dim(); ++a) {
    const double s = (std::clamp(x[a], dom_.lo(a), dom_.hi(a)) - dom_.lo(a)) / spacing(a);
    int k = std::min(static_cast<int>(std::floor(s)), shape_[a] - 2);
    k = std::max(k, 0);
    base[a] = k;
    frac[a] = s - k;
  }
  double total = 0.0;
  const int corners = 1 << dim();
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::array<int, kMaxDim> m = base;
    for (int a = 0; a < dim(); ++a) {
      if (c & (1 << a)) {
        m[a] += 1;
        w *= frac[a];
      } else {
        w *= 1.0 - frac[a];
      }
    }
    if (w != 0.0) total += w * values_[flat_index(m)];
  }
  return total;
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  if (!conforms(other)) throw std::invalid_argument("GridFunction: nonconforming grids");
  for (std::size_t i = 0; i < size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  if (!conforms(other)) throw std::invalid_argument("GridFunction: nonconforming grids");
  for (std::size_t i = 0; i < size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }

void GridFunction::write_csv(std::ostream& out) const {
  for (int a = 0; a < dim(); ++a) out << 'x' << a << ',';
  out << "value\n" << std::setprecision(17);
  for (std::size_t i = 0; i < size(); ++i) {
    const Point x = node(i);
    for (int a = 0; a < dim(); ++a) out << x[a] << ',';
    out << values_[i] << '\n';
  }
}

}  // namespace robinfluct
