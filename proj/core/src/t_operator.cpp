#include "hmcert/t_operator.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>
#include <vector>

#include "hmcert/error.hpp"
#include "hmcert/quadrature.hpp"

namespace hmcert {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxLevels = 60;
constexpr double kMaxTurnPerPiece = kPi / 8.0;
constexpr int kMaxPieces = 64;

double cross(Point a, Point b) { return a.real() * b.imag() - a.imag() * b.real(); }

// Kernel route integrand with f(tau) and g'(f(tau)) hoisted out.
struct SingularIntegrand {
  const BoundaryMap& map;
  double tau;
  double f_tau;
  Point g_tau;
  Point t_tau;

  SingularIntegrand(const BoundaryMap& m, double t0)
      : map(m), tau(t0), f_tau(m.param()(t0)), g_tau(m.curve().position(f_tau)), t_tau(m.curve().tangent(f_tau)) {}

  double kernel(double s) const {
    const JordanCurve& curve = map.curve();
    const double l = curve.length();
    const double d = std::remainder(s - f_tau, l);
    if (std::abs(d) < 1e-3 * l) {
      // K ~ kappa d^2 / 2 here and is later divided by d^2, so the tolerance
      // scales with d^2 (floored at the roundoff of the cross products); one
      // fixed rule is not enough at sharp bends.
      const double tol = std::max(1e-12 * d * d, 1e-15 * std::abs(d));
      const auto r = quad::adaptive([&](double u) { return cross(t_tau, curve.tangent(u)); }, std::min(f_tau, f_tau + d),
                                    std::max(f_tau, f_tau + d), tol, 1e-12, 200);
      return d > 0.0 ? r.value : -r.value;
    }
    const Point diff = curve.position(s) - g_tau;
    return (std::conj(diff) * Point(0.0, 1.0) * t_tau).real();
  }

  // Offset form: t = tau + d.
  double operator()(double d) const {
    const double half = std::sin(0.5 * d);
    return kernel(map.param()(tau + d)) / (2.0 * half * half) / kTwoPi;
  }
};

struct CotangentIntegrand {
  const BoundaryMap& map;
  const TurningAngle& beta;
  double tau;
  double beta_tau;

  CotangentIntegrand(const BoundaryMap& m, double t0)
      : map(m), beta(m.curve().turning()), tau(t0), beta_tau(beta(m.param()(t0))) {}

  double operator()(double u) const {
    const auto& f = map.param();
    const double fp = f.derivative(tau + u);
    if (fp == 0.0) return 0.0;
    return fp * std::sin(beta(f(tau + u)) - beta_tau) / std::tan(0.5 * u) / kTwoPi;
  }
};

// Offsets u in (-pi, pi] with tau + u at a breakpoint of f.
std::vector<double> kink_offsets(const BoundaryMap& map, double tau) {
  std::vector<double> out;
  for (double b : map.param().breakpoints()) out.push_back(std::remainder(b - tau, kTwoPi));
  return out;
}

// Integrates g over [-pi, pi] on dyadic panels [pi 2^-(j+1), pi 2^-j] on
// both sides. A lone Kronrod panel can miss a jump in f'' or a sharp bend of
// the curve, so each panel is first cut at kinks of f and into pieces over
// which the tangent turns by at most kMaxTurnPerPiece. The core |d| < h left
// at the end gets a midpoint estimate; its error is charged at twice the sup
// bound B(h) >= int_core |g|.
template <class G, class Bound>
TValue graded_integral(const BoundaryMap& map, double tau, const G& g, const Bound& core_bound, double tol) {
  const double panel_tol = tol / 128.0;
  const std::vector<double> kinks = kink_offsets(map, tau);
  const auto& f = map.param();
  const TurningAngle& beta = map.curve().turning();
  double value = 0.0;
  double err = 0.0;
  double core = std::numeric_limits<double>::infinity();
  double h = kPi;
  std::vector<double> breaks;
  auto side = [&](auto&& fn, double sign, double lo, double hi) {
    const double s0 = sign > 0 ? f(tau + lo) : f(tau - hi);
    const double s1 = sign > 0 ? f(tau + hi) : f(tau - lo);
    const double turn = beta.variation(s0, s1);
    const int pieces = std::clamp(static_cast<int>(std::ceil(turn / kMaxTurnPerPiece)), 1, kMaxPieces);
    breaks.clear();
    for (int i = 0; i < pieces; ++i) breaks.push_back(lo + (hi - lo) * i / pieces);
    for (double k : kinks) {
      const double d = sign * k;
      if (d > lo && d < hi) breaks.push_back(d);
    }
    breaks.push_back(hi);
    std::sort(breaks.begin(), breaks.end());
    return quad::adaptive_pieces(fn, breaks, panel_tol);
  };
  for (int j = 0; j < kMaxLevels; ++j) {
    const double hi = std::ldexp(kPi, -j);
    h = 0.5 * hi;
    const auto right = side(g, 1.0, h, hi);
    const auto left = side([&g](double d) { return g(-d); }, -1.0, h, hi);
    value += right.value + left.value;
    err += right.error + left.error;
    core = 2.0 * core_bound(h);
    if (j >= 3 && core <= tol / 8.0) break;
  }
  value += h * (g(0.5 * h) + g(-0.5 * h));
  return {value, err + core};
}

double lipschitz_of(const BoundaryMap& map) { return map.param().lipschitz(); }

// Sup of |g| over the core, sampled; used only when omega has no finite
// slope at zero.
template <class G>
double sampled_core(const G& g, double h) {
  double m = 0.0;
  for (int i = 0; i <= 12; ++i) {
    const double d = std::ldexp(h, -i);
    m = std::max({m, std::abs(g(d)), std::abs(g(-d))});
  }
  return 2.0 * 2.0 * h * m;
}

void check_tol(double tol) {
  if (!(tol >= 1e-10)) throw Error(ErrorCode::invalid_params, "tol must be >= 1e-10");
}

}  // namespace

std::string_view to_string(Route route) noexcept {
  switch (route) {
    case Route::singular_kernel: return "singular-kernel";
    case Route::cotangent: return "cotangent";
    case Route::both_averaged: return "both-averaged";
  }
  return "unknown";
}

double TProfile::max_error() const {
  double m = 0.0;
  for (double e : errors_est) m = std::max(m, e);
  return m;
}

double t_singular_integrand(const BoundaryMap& map, double tau, double t) {
  return SingularIntegrand(map, tau)(t - tau);
}

double t_cotangent_integrand(const BoundaryMap& map, double tau, double u) {
  return CotangentIntegrand(map, tau)(u);
}

TValue t_singular(const BoundaryMap& map, double tau, double tol) {
  check_tol(tol);
  const SingularIntegrand g(map, tau);
  const double slope = map.curve().tangent_modulus().initial_slope();
  const double L = lipschitz_of(map);
  auto core = [&](double h) {
    if (std::isfinite(slope)) {
      // |K| <= int_0^{L h} omega <= slope (L h)^2 / 2 on the core.
      const double q = (0.5 * h) / std::sin(0.5 * h);
      return 2.0 * h * slope * L * L * q * q / kTwoPi;
    }
    return sampled_core(g, h);
  };
  const TValue out = graded_integral(map, tau, g, core, tol);
  if (!(out.err_est <= tol) || !std::isfinite(out.value)) {
    throw Error(ErrorCode::quadrature_not_converged,
                "t_singular at tau=" + std::to_string(tau) + ": error estimate " + std::to_string(out.err_est));
  }
  return out;
}

TValue t_cotangent(const BoundaryMap& map, double tau, double tol) {
  check_tol(tol);
  const CotangentIntegrand g(map, tau);
  const double slope = map.curve().tangent_modulus().initial_slope();
  const double L = lipschitz_of(map);
  auto core = [&](double h) {
    if (std::isfinite(slope)) {
      // |f' sin(dbeta) cot(u/2)| <= L * slope * L |u| * 2/|u|.
      return 2.0 * h * slope * L * L / kPi;
    }
    return sampled_core(g, h);
  };
  const TValue out = graded_integral(map, tau, g, core, tol);
  if (!(out.err_est <= tol) || !std::isfinite(out.value)) {
    throw Error(ErrorCode::quadrature_not_converged,
                "t_cotangent at tau=" + std::to_string(tau) + ": error estimate " + std::to_string(out.err_est));
  }
  return out;
}

TProfile t_profile(const BoundaryMap& map, int grid_n, double tol, Route route) {
  if (grid_n < 64) throw Error(ErrorCode::invalid_params, "t_profile: grid_n must be >= 64");
  check_tol(tol);
  TProfile p;
  p.route = route;
  p.tol = tol;
  const auto n = static_cast<std::size_t>(grid_n);
  p.taus.resize(n);
  p.values.resize(n);
  p.errors_est.resize(n);
  std::vector<double> gaps(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) p.taus[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(n);

  auto eval_point = [&](std::size_t i) {
    const double tau = p.taus[i];
    switch (route) {
      case Route::singular_kernel: {
        const TValue v = t_singular(map, tau, tol);
        p.values[i] = v.value;
        p.errors_est[i] = v.err_est;
        break;
      }
      case Route::cotangent: {
        const TValue v = t_cotangent(map, tau, tol);
        p.values[i] = v.value;
        p.errors_est[i] = v.err_est;
        break;
      }
      case Route::both_averaged: {
        const TValue a = t_singular(map, tau, tol);
        const TValue b = t_cotangent(map, tau, tol);
        p.values[i] = 0.5 * (a.value + b.value);
        p.errors_est[i] = std::max(a.err_est, b.err_est);
        gaps[i] = std::abs(a.value - b.value);
        break;
      }
    }
  };

  // Grid points are independent; each worker takes a strided share so the
  // result does not depend on scheduling.
  const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&](std::size_t w) {
    try {
      for (std::size_t i = w; i < n; i += workers) eval_point(i);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  const auto it = std::min_element(p.values.begin(), p.values.end());
  p.min_value = *it;
  p.argmin = p.taus[static_cast<std::size_t>(it - p.values.begin())];
  p.max_route_gap = *std::max_element(gaps.begin(), gaps.end());
  if (route == Route::both_averaged && p.max_route_gap > 10.0 * tol) {
    const auto worst = static_cast<std::size_t>(std::max_element(gaps.begin(), gaps.end()) - gaps.begin());
    throw Error(ErrorCode::cross_check_failed, "routes disagree by " + std::to_string(p.max_route_gap) +
                                                   " at tau=" + std::to_string(p.taus[worst]));
  }
  return p;
}

std::vector<double> boundary_jacobian(const BoundaryMap& map, const TProfile& profile) {
  std::vector<double> out(profile.taus.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = map.param().derivative(profile.taus[i]) * profile.values[i];
  }
  return out;
}

double profile_distance(const TProfile& a, const TProfile& b) {
  if (a.values.size() != b.values.size()) {
    throw Error(ErrorCode::invalid_params, "profile_distance: grids differ");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) d = std::max(d, std::abs(a.values[i] - b.values[i]));
  return d;
}

// ---------------------------------------------------------------------------

double DominatingBound::relative_gap() const {
  const double scale = std::max(std::abs(integral_value), std::abs(integral_identity));
  return scale == 0.0 ? 0.0 : std::abs(integral_value - integral_identity) / scale;
}

DominatingBound dominating_bound(const BoundaryMap& map, const ModulusOfContinuity& omega) {
  const double L = map.param().lipschitz();
  DominatingBound out;
  out.lipschitz = L;
  // int_0^t omega(L u) du = W(L t) / L.
  out.Q = [omega, L](double t) {
    const double a = std::abs(t);
    if (a == 0.0) return 0.0;
    return kPi * L * omega.integral(L * a) / (4.0 * a * a);
  };

  // Breakpoints: dyadic toward zero, plus kinks of a grid envelope.
  std::vector<double> breaks{0.0};
  for (int j = 40; j >= 1; --j) breaks.push_back(std::ldexp(kPi, -j));
  for (int i = 1; i <= 256; ++i) breaks.push_back(kPi * i / 256.0);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  const auto& Q = out.Q;
  const auto direct = quad::adaptive_pieces(Q, breaks, 1e-13, 1e-12);
  auto identity_integrand = [&omega, L](double x) {
    const double w = omega(L * x);
    return w / x - w / kPi;
  };
  const auto ident = quad::adaptive_pieces(identity_integrand, breaks, 1e-13, 1e-12);
  if (!direct.converged || !std::isfinite(direct.value)) {
    throw Error(ErrorCode::dini_violation, "integral of the dominating function did not converge");
  }
  out.integral_value = 2.0 * direct.value;
  out.integral_identity = 2.0 * (kPi * L * L / 4.0) * ident.value;
  return out;
}

}  // namespace hmcert
