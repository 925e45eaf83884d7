#pragma once

#include <complex>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "hmcert/boundary_param.hpp"

namespace hmcert {

/// Poisson extension w = P[F] of boundary data F, held as the truncated
/// Fourier series w(z) = sum_{k>=0} c_k z^k + sum_{k>0} c_{-k} conj(z)^k.
class HarmonicMap {
 public:
  HarmonicMap() = default;
  /// `coeffs` has 2N+1 entries, c_k stored at index k + N.
  HarmonicMap(int order, std::vector<Point> coeffs, double tail_bound = 0.0,
              double reconstruction_error = 0.0);

  /// Sparse construction, e.g. {{1, 1.0}, {-1, 0.5}} for z + 0.5 conj(z).
  static HarmonicMap from_terms(std::initializer_list<std::pair<int, Point>> terms, int order = 64);

  int order() const noexcept { return order_; }
  Point coeff(int k) const;
  double tail_bound() const noexcept { return tail_bound_; }
  double reconstruction_error() const noexcept { return reconstruction_error_; }
  /// Largest |k| whose coefficient is not negligible; evaluation stops there.
  int effective_order() const noexcept { return effective_; }
  /// Largest disagreement with direct Poisson quadrature seen at build (or -1).
  double poisson_check() const noexcept { return poisson_check_; }
  void set_poisson_check(double v) { poisson_check_ = v; }

 private:
  int order_ = 0;
  int effective_ = 0;
  std::vector<Point> coeffs_;
  double tail_bound_ = 0.0;
  double reconstruction_error_ = 0.0;
  double poisson_check_ = -1.0;
};

/// Discrete Fourier analysis of `boundary` (a 2 pi periodic function of t)
/// from 4N uniform samples. N must be a power of two in [64, 65536].
/// Throws Error{tail_not_decaying} when the last octave holds > 10% of the mass.
HarmonicMap fourier_coefficients(const std::function<Point(double)>& boundary, int N);
HarmonicMap fourier_coefficients(const BoundaryMap& map, int N);

/// Doubles N from `initial_order` until tail_bound < 1e-8 (or N = 65536), then
/// cross-checks against direct Poisson quadrature at 10 fixed interior points.
HarmonicMap harmonic_extension(const BoundaryMap& map, int initial_order = 1024);

Point eval_w(const HarmonicMap& hm, Point z);

struct WirtingerDerivatives {
  Point dz;     // d w / d z
  Point dzbar;  // d w / d conj(z)
};

WirtingerDerivatives wirtinger(const HarmonicMap& hm, Point z);

/// J_w(z) = |w_z|^2 - |w_zbar|^2.
double jacobian_interior(const HarmonicMap& hm, Point z);

struct RadialJacobian {
  std::vector<double> values;
  double limit = 0.0;
  double error = 0.0;
};

/// J along the ray r e^{i tau}, extrapolated to r -> 1 in the variable 1 - r.
RadialJacobian radial_jacobian(const HarmonicMap& hm, double tau, std::span<const double> r_list);

/// Direct quadrature of the Poisson integral; a validation oracle only.
Point poisson_integral(const std::function<Point(double)>& boundary, Point z, double tol = 1e-12);

}  // namespace hmcert
