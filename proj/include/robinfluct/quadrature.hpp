#pragma once

#include <functional>
#include <vector>

namespace robinfluct {

/// Gauss-Legendre rule on [-1, 1].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1], computed by Newton iteration on
/// P_n. Results are cached per n.
const QuadratureRule& gauss_legendre(int n);

/// Integral of f over [a, b] with `cells` equal sub-intervals and an n-point
/// Gauss-Legendre rule on each.
double composite_gauss(const std::function<double(double)>& f, double a,
                       double b, int cells, int n);

/// Sum with pairwise (cascade) summation; order depends only on the input
/// length, never on how the caller was scheduled.
double pairwise_sum(const double* data, std::size_t n);

}  // namespace robinfluct
