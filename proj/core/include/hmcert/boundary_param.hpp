#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hmcert/curve.hpp"

namespace hmcert {

/// Safety factor on grid-estimated Lipschitz constants.
inline constexpr double kLipschitzSafety = 1.02;

enum class MapFamily { identity, sin_perturbed, knots };

/// Boundary parametrization spec. All families are scaled so that
/// f(t + 2 pi) = f(t) + curve length.
struct MapSpec {
  MapFamily family = MapFamily::identity;
  double a = 0.0;                  // sin_perturbed: f = c (t - a sin(k t))
  int k = 1;
  std::vector<double> t, f;        // knots over one period, t.back() = t.front() + 2 pi

  static MapSpec identity();
  static MapSpec sin_perturbed(double a, int k);
  static MapSpec knots(std::vector<double> t, std::vector<double> f);

  std::string id() const;
};

namespace detail {
struct ParamImpl;
}

/// Nondecreasing f : R -> R with f(t + 2 pi) = f(t) + increment, Lipschitz
/// with constant lipschitz(). Immutable; copies share state.
class WeakHomeomorphism {
 public:
  double operator()(double t) const;
  /// f'(t), clamped at zero; one-sided at points where f is not differentiable.
  double derivative(double t) const;

  double lipschitz() const;
  bool strict() const;
  double increment() const;
  const MapSpec& source() const;
  /// Mollification level n (0 when not mollified).
  int mollification() const;
  std::string id() const;
  /// Points of [0, 2pi) where f'' may jump (interpolation knots); quadrature
  /// splits there.
  const std::vector<double>& breakpoints() const;

 private:
  friend WeakHomeomorphism build_param(const MapSpec&, double);
  friend WeakHomeomorphism mollify(const WeakHomeomorphism&, int);
  std::shared_ptr<const detail::ParamImpl> impl_;
};

/// Throws Error{not_monotone, wrong_period_increment, invalid_params}.
WeakHomeomorphism build_param(const MapSpec& spec, double curve_length);

/// f_n = (1 - 1/n) (f * bump_{pi/n}) + (1/n) (length / 2 pi) t, with the
/// convolution taken on the periodic part of f.
WeakHomeomorphism mollify(const WeakHomeomorphism& param, int n);

struct LipschitzEstimate {
  double L_lower = 0.0;
  double ell_lower = 0.0;
};

/// Max and min difference quotients on a uniform grid (offsets up to pi).
LipschitzEstimate lipschitz_estimate(const WeakHomeomorphism& param, int grid_n);

/// F = g o f : circle -> curve.
class BoundaryMap {
 public:
  BoundaryMap(JordanCurve curve, WeakHomeomorphism param);

  const JordanCurve& curve() const { return curve_; }
  const WeakHomeomorphism& param() const { return param_; }

  Point F(double t) const { return curve_.position(param_(t)); }
  Point dF(double t) const { return curve_.tangent(param_(t)) * param_.derivative(t); }

 private:
  JordanCurve curve_;
  WeakHomeomorphism param_;
};

/// K_F(t, tau) = f'(tau) K(f(tau), f(t)).
double kernel_KF(const BoundaryMap& map, double t, double tau);

/// Re[conj(F(t) - F(tau)) i F'(tau)] from positions; used to self-test kernel_KF.
double kernel_KF_direct(const BoundaryMap& map, double t, double tau);

}  // namespace hmcert
