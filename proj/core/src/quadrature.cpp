#include "hmcert/quadrature.hpp"

#include <stdexcept>

namespace hmcert::quad {

Extrapolation neville_extrapolate(std::span<const double> xs, std::span<const double> ys, double x0) {
  if (xs.size() != ys.size() || xs.empty()) {
    throw std::invalid_argument("neville_extrapolate: mismatched or empty samples");
  }
  const std::size_t n = xs.size();
  std::vector<double> p(ys.begin(), ys.end());
  double previous = p[n - 1];
  double current = p[n - 1];
  // After pass m, p[i] holds the interpolant through points i..i+m.
  for (std::size_t m = 1; m < n; ++m) {
    for (std::size_t i = 0; i + m < n; ++i) {
      const double xi = xs[i];
      const double xj = xs[i + m];
      p[i] = ((x0 - xj) * p[i] - (x0 - xi) * p[i + 1]) / (xi - xj);
    }
    previous = current;
    current = p[0];
  }
  if (n == 1) return {current, 0.0};
  return {current, std::abs(current - previous)};
}

}  // namespace hmcert::quad
