#include "hmcert/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <unordered_map>

#include "hmcert/error.hpp"

namespace hmcert {

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::certified_diffeomorphism: return "certified-diffeomorphism";
    case Verdict::not_certified: return "not-certified";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

std::string_view to_string(OracleVerdict v) noexcept {
  switch (v) {
    case OracleVerdict::univalent_evidence: return "univalent-evidence";
    case OracleVerdict::folding_detected: return "folding-detected";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Oracle
// ---------------------------------------------------------------------------

namespace {

int winding_about(const std::vector<Point>& loop, Point c) {
  double total = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Point a = loop[i] - c;
    const Point b = loop[(i + 1) % loop.size()] - c;
    if (a == Point{} || b == Point{}) return 0;
    total += std::arg(b / a);
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

}  // namespace

OracleReport univalence_oracle(const HarmonicMap& hm, int grid_r, int grid_theta) {
  if (grid_r < 24 || grid_theta < 96) {
    throw Error(ErrorCode::invalid_params, "oracle grid needs grid_r >= 24 and grid_theta >= 96");
  }
  OracleReport rep;
  rep.grid_r = grid_r;
  rep.grid_theta = grid_theta;
  rep.max_radius = kOracleMaxRadius;

  const auto nr = static_cast<std::size_t>(grid_r);
  const auto nt = static_cast<std::size_t>(grid_theta);
  // Node 0 is the centre; ring i (1..nr) occupies indices 1 + (i-1) nt ...
  std::vector<Point> img(1 + nr * nt);
  auto idx = [nt](std::size_t i, std::size_t j) { return 1 + (i - 1) * nt + j; };

  img[0] = eval_w(hm, 0.0);
  rep.min_interior_J = jacobian_interior(hm, 0.0);
  for (std::size_t i = 1; i <= nr; ++i) {
    const double r = rep.max_radius * static_cast<double>(i) / static_cast<double>(nr);
    for (std::size_t j = 0; j < nt; ++j) {
      const Point z = std::polar(r, kTwoPi * static_cast<double>(j) / static_cast<double>(nt));
      img[idx(i, j)] = eval_w(hm, z);
      rep.min_interior_J = std::min(rep.min_interior_J, jacobian_interior(hm, z));
    }
  }

  // Threshold: half the smallest image distance between grid neighbours.
  double spacing = std::numeric_limits<double>::infinity();
  double extent = 0.0;
  for (std::size_t j = 0; j < nt; ++j) spacing = std::min(spacing, std::abs(img[idx(1, j)] - img[0]));
  for (std::size_t i = 1; i <= nr; ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      const Point p = img[idx(i, j)];
      extent = std::max(extent, std::abs(p - img[0]));
      spacing = std::min(spacing, std::abs(img[idx(i, (j + 1) % nt)] - p));
      if (i < nr) spacing = std::min(spacing, std::abs(img[idx(i + 1, j)] - p));
    }
  }
  rep.separation = 0.5 * spacing;

  bool injective = rep.separation > 1e-14 * std::max(extent, 1.0);
  if (injective) {
    const double cell = rep.separation;
    auto key = [cell](Point p) {
      const auto cx = static_cast<std::int64_t>(std::floor(p.real() / cell));
      const auto cy = static_cast<std::int64_t>(std::floor(p.imag() / cell));
      return std::pair{cx, cy};
    };
    auto pack = [](std::int64_t x, std::int64_t y) {
      return (static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ull) ^ static_cast<std::uint64_t>(y);
    };
    std::unordered_multimap<std::uint64_t, std::size_t> buckets;
    buckets.reserve(img.size() * 2);
    for (std::size_t a = 0; a < img.size() && injective; ++a) {
      const auto [cx, cy] = key(img[a]);
      for (std::int64_t dx = -1; dx <= 1 && injective; ++dx) {
        for (std::int64_t dy = -1; dy <= 1 && injective; ++dy) {
          const auto range = buckets.equal_range(pack(cx + dx, cy + dy));
          for (auto it = range.first; it != range.second; ++it) {
            if (std::abs(img[it->second] - img[a]) < rep.separation) {
              injective = false;
              break;
            }
          }
        }
      }
      buckets.emplace(pack(cx, cy), a);
    }
  }
  rep.injective_on_grid = injective;

  // Winding of the outermost ring image, sampled more finely than the grid.
  const std::size_t nw = 4 * nt;
  std::vector<Point> loop(nw);
  Point centroid{};
  for (std::size_t j = 0; j < nw; ++j) {
    loop[j] = eval_w(hm, std::polar(rep.max_radius, kTwoPi * static_cast<double>(j) / static_cast<double>(nw)));
    centroid += loop[j];
  }
  centroid /= static_cast<double>(nw);
  rep.boundary_winding = winding_about(loop, centroid);

  const bool folding = rep.min_interior_J < 0.0 || !rep.injective_on_grid || rep.boundary_winding != 1;
  rep.verdict = folding ? OracleVerdict::folding_detected : OracleVerdict::univalent_evidence;
  return rep;
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

double verdict_margin(const TProfile& profile, double tol) { return std::max(10.0 * tol, profile.max_error()); }

Verdict verdict_for(double min_value, double margin) {
  if (min_value > margin) return Verdict::certified_diffeomorphism;
  if (std::abs(min_value) <= margin) return Verdict::inconclusive;
  return Verdict::not_certified;
}

Certificate certify(const JordanCurve& curve, const WeakHomeomorphism& param, int grid_n, double tol) {
  if (grid_n < 64) throw Error(ErrorCode::invalid_params, "certify: grid_n must be >= 64");
  const BoundaryMap map(curve, param);

  Certificate c;
  c.curve_id = curve.source().id();
  c.map_id = param.id();
  c.curve_spec = curve.source();
  c.map_spec = param.source();
  c.mollification = param.mollification();
  c.grid_n = grid_n;
  c.tol = tol;
  c.lipschitz = param.lipschitz();

  const ModulusOfContinuity& omega = curve.tangent_modulus();
  c.omega_safety = omega.safety_factor();
  const DiniResult dini = dini_integral(omega, 0.5 * curve.length());
  c.dini_convergent = dini.convergent;
  c.dini_value = dini.value;
  c.convex = is_convex(curve, 128);

  c.profile = t_profile(map, grid_n, tol, Route::both_averaged);
  c.min_T = c.profile.min_value;
  c.argmin_T = c.profile.argmin;
  c.max_err_est = c.profile.max_error();
  c.max_route_gap = c.profile.max_route_gap;
  c.margin = verdict_margin(c.profile, tol);
  c.verdict = verdict_for(c.min_T, c.margin);

  if (c.convex && c.min_T <= 0.0) {
    throw Error(ErrorCode::convexity_contradiction,
                "convex curve " + c.curve_id + " gave min T = " + std::to_string(c.min_T));
  }
  return c;
}

Certificate certify_with_oracle(const JordanCurve& curve, const WeakHomeomorphism& param, int grid_n, double tol,
                                int fourier_n) {
  Certificate c = certify(curve, param, grid_n, tol);
  const HarmonicMap hm = harmonic_extension(BoundaryMap(curve, param), fourier_n);
  c.oracle = univalence_oracle(hm);
  return c;
}

BoundaryJacobianCheck alessandrini_nesi_check(const JordanCurve& curve, const WeakHomeomorphism& param, int grid_n,
                                              double tol) {
  if (!param.strict()) {
    throw Error(ErrorCode::not_a_diffeomorphism, "boundary parametrization " + param.id() + " is not strictly increasing");
  }
  const BoundaryMap map(curve, param);
  const TProfile p = t_profile(map, grid_n, tol, Route::both_averaged);
  const std::vector<double> J = boundary_jacobian(map, p);
  const auto it = std::min_element(J.begin(), J.end());
  BoundaryJacobianCheck out;
  out.min_boundary_J = *it;
  out.argmin = p.taus[static_cast<std::size_t>(it - J.begin())];
  out.margin = verdict_margin(p, tol);
  out.passes = out.min_boundary_J > out.margin;
  return out;
}

ConjectureProbe conjecture_probe(const JordanCurve& curve, const WeakHomeomorphism& param, int grid_n, double tol,
                                 int fourier_n) {
  const BoundaryMap map(curve, param);
  const TProfile p = t_profile(map, grid_n, tol, Route::both_averaged);
  const std::vector<double> J = boundary_jacobian(map, p);
  const auto it = std::min_element(J.begin(), J.end());
  ConjectureProbe out;
  out.ess_inf_J_estimate = *it;
  out.argmin = p.taus[static_cast<std::size_t>(it - J.begin())];
  out.oracle = univalence_oracle(harmonic_extension(map, fourier_n));
  out.note = "exploratory: essential infimum approximated by the minimum over " + std::to_string(grid_n) +
             " grid points; null sets are invisible";
  return out;
}

MollifiedRun mollified_pipeline(const JordanCurve& curve, const WeakHomeomorphism& param,
                                const std::vector<int>& n_list, int grid_n, double tol, bool with_oracle,
                                int fourier_n) {
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 2 || (i > 0 && n_list[i] <= n_list[i - 1])) {
      throw Error(ErrorCode::invalid_params, "n_list must be strictly increasing with entries >= 2");
    }
  }
  MollifiedRun run;
  run.base = certify(curve, param, grid_n, tol);
  const TProfile* prev = &run.base.profile;
  run.steps.reserve(n_list.size());
  for (int n : n_list) {
    const WeakHomeomorphism fn = mollify(param, n);
    MollifiedStep step;
    step.n = n;
    step.certificate = with_oracle ? certify_with_oracle(curve, fn, grid_n, tol, fourier_n)
                                   : certify(curve, fn, grid_n, tol);
    step.distance_to_base = profile_distance(step.certificate.profile, run.base.profile);
    step.distance_to_previous = profile_distance(step.certificate.profile, *prev);
    if (!run.n0 && step.certificate.min_T >= 0.5 * run.base.min_T) run.n0 = n;
    run.steps.push_back(std::move(step));
    prev = &run.steps.back().certificate.profile;
  }
  return run;
}

}  // namespace hmcert
