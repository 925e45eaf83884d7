#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace hmcert {

using Point = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Safety factor applied to grid-estimated moduli of continuity, which
/// under-estimate the true supremum.
inline constexpr double kOmegaSafety = 1.05;

/// Tolerance of the unit-speed invariant of the arc-length table.
inline constexpr double kUnitSpeedTol = 1e-8;

// ---------------------------------------------------------------------------
// Curve specification
// ---------------------------------------------------------------------------

enum class CurveFamily { circle, ellipse, polar_formula, polar_samples, points };

struct CurveSpec {
  CurveFamily family = CurveFamily::circle;
  double radius = 1.0;                        // circle
  double a = 1.0, b = 1.0;                    // ellipse semi-axes
  std::string formula_id;                     // polar catalog entry
  std::map<std::string, double> params;       // polar catalog parameters
  std::vector<double> theta, r;               // polar samples
  std::vector<Point> xy;                      // raw closed loop

  static CurveSpec circle(double radius = 1.0);
  static CurveSpec ellipse(double a, double b);
  /// Catalog entry "cosine": r(theta) = r0 * (1 + eps * cos(k * theta)).
  static CurveSpec polar_cosine(double eps, double k, double r0 = 1.0);
  static CurveSpec polar_samples(std::vector<double> theta, std::vector<double> r);
  static CurveSpec points(std::vector<Point> xy);

  /// Short human-readable identifier, e.g. "ellipse(a=2,b=1)".
  std::string id() const;
};

/// Names of the registered polar formulas.
std::vector<std::string> polar_formula_catalog();

// ---------------------------------------------------------------------------
// Modulus of continuity
// ---------------------------------------------------------------------------

/// Nondecreasing function omega on [0, inf) with omega(0) = 0, plus its
/// running integral W(x) = int_0^x omega.
class ModulusOfContinuity {
 public:
  enum class Kind { closed_form, grid_estimated };

  /// `integral` may be empty, in which case W is computed by quadrature.
  /// `slope0` bounds omega(d)/d for small d (infinity when unknown).
  static ModulusOfContinuity closed_form(std::function<double(double)> omega,
                                         std::function<double(double)> integral = {},
                                         double slope0 = std::numeric_limits<double>::infinity());

  /// Builds the piecewise-linear envelope through (k*step, running max of
  /// raw[k]), scaled by `safety`. Beyond the last node the value saturates.
  static ModulusOfContinuity from_grid(double step, const std::vector<double>& raw, double safety);

  double operator()(double delta) const;
  double integral(double x) const;

  Kind kind() const noexcept { return kind_; }
  double safety_factor() const noexcept { return safety_; }
  /// Upper bound of omega(delta)/delta near zero (used by near-singular bounds).
  double initial_slope() const noexcept { return slope0_; }

 private:
  Kind kind_ = Kind::closed_form;
  double safety_ = 1.0;
  double slope0_ = 0.0;
  std::function<double(double)> omega_;
  std::function<double(double)> integral_;
  double step_ = 0.0;
  std::vector<double> values_;
  std::vector<double> cumulative_;
};

// ---------------------------------------------------------------------------
// Jordan curve in arc-length parametrization
// ---------------------------------------------------------------------------

namespace detail {
struct CurveData;
}

class TurningAngle;

/// Closed, simple, positively oriented C^1 curve g : [0, l) -> C with
/// |g'(s)| = 1, extended l-periodically. Immutable; copies share state.
class JordanCurve {
 public:
  double length() const;
  Point position(double s) const;
  Point tangent(double s) const;

  const CurveSpec& source() const;
  double diameter() const;
  /// Largest deviation of the reparametrized speed from 1 seen at build time.
  double speed_defect() const;
  std::size_t table_size() const;

  /// Modulus of continuity of the tangent attached at build time: closed form
  /// for circles, safety-factored grid envelope otherwise.
  const ModulusOfContinuity& tangent_modulus() const;
  const TurningAngle& turning() const;

 private:
  friend JordanCurve build_curve(const CurveSpec& spec);
  std::shared_ptr<const detail::CurveData> data_;
};

/// Continuous lift beta with g'(s) = exp(i beta(s)); beta(s + l) = beta(s) + 2 pi.
class TurningAngle {
 public:
  TurningAngle() = default;
  TurningAngle(double length, std::vector<double> table, std::function<Point(double)> tangent);

  double operator()(double s) const;
  double total_turning() const { return table_.back() - table_.front(); }
  std::size_t size() const { return table_.size() - 1; }
  const std::vector<double>& table() const { return table_; }
  /// Total variation of the turning angle over [s0, s1] (s0 <= s1), read off
  /// the table cells covering the interval.
  double variation(double s0, double s1) const;

 private:
  double length_ = 0.0;
  std::vector<double> table_;
  std::vector<double> var_;  // prefix sums of |table step|
  std::function<Point(double)> tangent_;
};

/// Throws Error{not_closed, self_intersecting, too_few_samples, invalid_spec}.
JordanCurve build_curve(const CurveSpec& spec);

/// K(s,t) = Re[conj(g(t) - g(s)) * i g'(s)], periodic in both arguments.
double kernel_K(const JordanCurve& curve, double s, double t);

/// K >= -1e-10 * diam^2 on all grid pairs. Requires grid_n >= 64.
bool is_convex(const JordanCurve& curve, int grid_n);

/// True when the turning angle is nondecreasing on a grid of grid_n points.
bool turning_angle_monotone(const JordanCurve& curve, int grid_n, double tol = 1e-8);

/// Unwraps arg g' on a dense grid; throws Error{unwrap_failure}.
TurningAngle turning_angle(const JordanCurve& curve);

/// Grid estimate of the modulus of continuity of g'. Requires grid_n >= 256.
/// Circles get their closed form instead.
ModulusOfContinuity modulus_of_continuity(const JordanCurve& curve, int grid_n);

struct DiniResult {
  bool convergent = false;
  double value = 0.0;   // meaningful only when convergent
  int levels = 0;
  double last_ratio = 0.0;
};

/// int_0^k omega(t)/t dt over dyadic shells [k 2^-j, k 2^-j+1], j = 1..60.
DiniResult dini_integral(const ModulusOfContinuity& omega, double k, double rel_tol = 1e-8);

struct KernelBound {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// |K(s,t)| <= int_0^{min(|s-t|, l-|s-t|)} omega.
KernelBound kernel_bound_check(const JordanCurve& curve, const ModulusOfContinuity& omega, double s,
                               double t);

}  // namespace hmcert
