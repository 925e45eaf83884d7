#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hmcert/harmonic.hpp"
#include "hmcert/t_operator.hpp"

namespace hmcert {

enum class Verdict { certified_diffeomorphism, not_certified, inconclusive };
enum class OracleVerdict { univalent_evidence, folding_detected };

std::string_view to_string(Verdict v) noexcept;
std::string_view to_string(OracleVerdict v) noexcept;

/// Outermost radius sampled by the oracle; the closed disk is never touched.
inline constexpr double kOracleMaxRadius = 1.0 - 1e-3;

/// Grid evidence about univalence of w on the open disk. Evidence, not proof.
struct OracleReport {
  int grid_r = 0;
  int grid_theta = 0;
  double max_radius = kOracleMaxRadius;
  double min_interior_J = 0.0;
  bool injective_on_grid = false;
  int boundary_winding = 0;
  /// Collision threshold used by the injectivity test.
  double separation = 0.0;
  OracleVerdict verdict = OracleVerdict::folding_detected;
};

/// Polar grid r_i = max_radius * i / grid_r (i = 0..grid_r), theta_j = 2 pi j / grid_theta.
/// Requires grid_r >= 24 and grid_theta >= 96.
OracleReport univalence_oracle(const HarmonicMap& hm, int grid_r = 32, int grid_theta = 128);

struct Certificate {
  std::string curve_id;
  std::string map_id;
  CurveSpec curve_spec;
  MapSpec map_spec;
  int mollification = 0;

  bool dini_convergent = false;
  double dini_value = 0.0;
  bool convex = false;
  double omega_safety = 1.0;
  double lipschitz = 0.0;

  double min_T = 0.0;
  double argmin_T = 0.0;
  int grid_n = 0;
  double tol = kDefaultTol;
  double margin = 0.0;
  double max_err_est = 0.0;
  double max_route_gap = 0.0;
  Verdict verdict = Verdict::inconclusive;

  std::optional<OracleReport> oracle;
  /// Full profile; exported as CSV, not part of the JSON record.
  TProfile profile;
};

/// margin = max(10 tol, largest quadrature error estimate).
double verdict_margin(const TProfile& profile, double tol);
Verdict verdict_for(double min_value, double margin);

/// Builds the averaged T-profile and applies the margin rule. Throws
/// Error{convexity_contradiction} if a convex curve yields min T <= 0.
Certificate certify(const JordanCurve& curve, const WeakHomeomorphism& param, int grid_n,
                    double tol = kDefaultTol);

/// Same, then runs the oracle on the harmonic extension.
Certificate certify_with_oracle(const JordanCurve& curve, const WeakHomeomorphism& param, int grid_n,
                                double tol = kDefaultTol, int fourier_n = 1024);

struct BoundaryJacobianCheck {
  double min_boundary_J = 0.0;
  double argmin = 0.0;
  double margin = 0.0;
  bool passes = false;
};

/// min over the grid of f'(tau) T(tau) against the certificate margin.
/// Throws Error{not_a_diffeomorphism} unless param.strict().
BoundaryJacobianCheck alessandrini_nesi_check(const JordanCurve& curve, const WeakHomeomorphism& param,
                                              int grid_n, double tol = kDefaultTol);

/// Exploratory: grid minimum of f' T as a stand-in for the essential
/// infimum of the boundary Jacobian, paired with the oracle verdict.
struct ConjectureProbe {
  double ess_inf_J_estimate = 0.0;
  double argmin = 0.0;
  OracleReport oracle;
  std::string note;
};

ConjectureProbe conjecture_probe(const JordanCurve& curve, const WeakHomeomorphism& param, int grid_n,
                                 double tol = kDefaultTol, int fourier_n = 1024);

struct MollifiedStep {
  int n = 0;
  Certificate certificate;
  double distance_to_base = 0.0;
  /// Distance to the previous step's profile (to the base profile for the first step).
  double distance_to_previous = 0.0;
};

struct MollifiedRun {
  Certificate base;
  std::vector<MollifiedStep> steps;
  /// First n with min T[f_n] >= min T[f] / 2, if any.
  std::optional<int> n0;
};

/// n_list must be strictly increasing with entries >= 2. The oracle runs on
/// every mollified extension when `with_oracle` is set.
MollifiedRun mollified_pipeline(const JordanCurve& curve, const WeakHomeomorphism& param,
                                const std::vector<int>& n_list, int grid_n, double tol = kDefaultTol,
                                bool with_oracle = true, int fourier_n = 1024);

}  // namespace hmcert
