#pragma once

#include <functional>
#include <vector>

#include "hmcert/boundary_param.hpp"

namespace hmcert {

inline constexpr double kDefaultTol = 1e-7;

/// Value of T[f](tau) with its quadrature error estimate.
struct TValue {
  double value = 0.0;
  double err_est = 0.0;
};

enum class Route { singular_kernel, cotangent, both_averaged };

std::string_view to_string(Route route) noexcept;

/// Samples of T[f] on the uniform grid tau_i = 2 pi i / n.
struct TProfile {
  std::vector<double> taus;
  std::vector<double> values;
  std::vector<double> errors_est;
  Route route = Route::both_averaged;
  double tol = kDefaultTol;
  double min_value = 0.0;
  double argmin = 0.0;
  /// Largest |singular - cotangent| when route = both_averaged, else 0.
  double max_route_gap = 0.0;

  double max_error() const;
};

/// Integrand of the kernel route, (1/2 pi) K(f(tau), f(t)) / (2 sin^2((t - tau)/2)).
double t_singular_integrand(const BoundaryMap& map, double tau, double t);

/// Integrand of the cotangent route at offset u:
/// (1/2 pi) f'(tau + u) sin(beta(f(tau + u)) - beta(f(tau))) cot(u/2).
double t_cotangent_integrand(const BoundaryMap& map, double tau, double u);

/// T[f](tau) = (1/2 pi) int_0^{2 pi} K(f(tau), f(t)) / (2 sin^2((t - tau)/2)) dt
/// on a mesh graded geometrically toward t = tau. Throws
/// Error{quadrature_not_converged}.
TValue t_singular(const BoundaryMap& map, double tau, double tol = kDefaultTol);

/// The same operator after integrating by parts against cot(u/2).
TValue t_cotangent(const BoundaryMap& map, double tau, double tol = kDefaultTol);

/// Evaluates the chosen route on grid_n points (grid_n >= 64). With
/// both_averaged, throws Error{cross_check_failed} when the routes differ by
/// more than 10 tol anywhere.
TProfile t_profile(const BoundaryMap& map, int grid_n, double tol = kDefaultTol,
                   Route route = Route::both_averaged);

/// J_w(e^{i tau}) = f'(tau) T[f](tau) at the profile grid points.
std::vector<double> boundary_jacobian(const BoundaryMap& map, const TProfile& profile);

/// Largest |a_i - b_i| between two profiles on the same grid.
double profile_distance(const TProfile& a, const TProfile& b);

/// Dominating function Q(t) = (pi L^2 / 4 t^2) int_0^t omega(L u) du.
struct DominatingBound {
  std::function<double(double)> Q;
  double lipschitz = 0.0;
  /// int_{-pi}^{pi} Q, integrated directly.
  double integral_value = 0.0;
  /// The same integral through pi L^2 int_0^pi [omega(Lx)/x - omega(Lx)/pi] dx.
  double integral_identity = 0.0;

  double relative_gap() const;
};

/// Throws Error{dini_violation} when the direct integral does not converge.
DominatingBound dominating_bound(const BoundaryMap& map, const ModulusOfContinuity& omega);

}  // namespace hmcert
