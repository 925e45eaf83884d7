#include "hmcert/harmonic.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <random>

#include "hmcert/error.hpp"
#include "hmcert/quadrature.hpp"

namespace hmcert {

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)), size(n) {}
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  ~FftwBuffer() { fftw_free(data); }
  fftw_complex* data;
  std::size_t size;
};

void run_dft(FftwBuffer& in, FftwBuffer& out, int sign) {
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(in.size), in.data, out.data, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(fftw_planner_mutex());
  fftw_destroy_plan(plan);
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

HarmonicMap::HarmonicMap(int order, std::vector<Point> coeffs, double tail_bound, double reconstruction_error)
    : order_(order),
      coeffs_(std::move(coeffs)),
      tail_bound_(tail_bound),
      reconstruction_error_(reconstruction_error) {
  if (coeffs_.size() != static_cast<std::size_t>(2 * order_ + 1)) {
    throw Error(ErrorCode::invalid_params, "HarmonicMap: expected 2N+1 coefficients");
  }
  double scale = 0.0;
  for (const Point& c : coeffs_) scale = std::max(scale, std::abs(c));
  effective_ = 0;
  for (int k = order_; k > 0; --k) {
    if (std::abs(coeff(k)) > 1e-16 * scale || std::abs(coeff(-k)) > 1e-16 * scale) {
      effective_ = k;
      break;
    }
  }
}

HarmonicMap HarmonicMap::from_terms(std::initializer_list<std::pair<int, Point>> terms, int order) {
  std::vector<Point> c(static_cast<std::size_t>(2 * order + 1), Point{});
  for (const auto& [k, v] : terms) {
    if (std::abs(k) > order) throw Error(ErrorCode::invalid_params, "from_terms: |k| exceeds order");
    c[static_cast<std::size_t>(k + order)] += v;
  }
  return HarmonicMap(order, std::move(c));
}

Point HarmonicMap::coeff(int k) const {
  if (std::abs(k) > order_) return {};
  return coeffs_[static_cast<std::size_t>(k + order_)];
}

HarmonicMap fourier_coefficients(const std::function<Point(double)>& boundary, int N) {
  if (!is_power_of_two(N) || N < 64 || N > 65536) {
    throw Error(ErrorCode::invalid_params, "Fourier order must be a power of two in [64, 65536]");
  }
  const std::size_t M = 4 * static_cast<std::size_t>(N);
  FftwBuffer samples(M), spectrum(M);
  std::vector<Point> values(M);
  for (std::size_t j = 0; j < M; ++j) {
    values[j] = boundary(kTwoPi * static_cast<double>(j) / static_cast<double>(M));
    samples.data[j][0] = values[j].real();
    samples.data[j][1] = values[j].imag();
  }
  run_dft(samples, spectrum, FFTW_FORWARD);

  std::vector<Point> c(2 * static_cast<std::size_t>(N) + 1);
  const double inv = 1.0 / static_cast<double>(M);
  for (int k = -N; k <= N; ++k) {
    const std::size_t idx = static_cast<std::size_t>((k + static_cast<long>(M)) % static_cast<long>(M));
    c[static_cast<std::size_t>(k + N)] = Point(spectrum.data[idx][0], spectrum.data[idx][1]) * inv;
  }

  double total = 0.0, last = 0.0, prev = 0.0;
  for (int k = -N; k <= N; ++k) {
    const double a = std::abs(c[static_cast<std::size_t>(k + N)]);
    total += a;
    const int ak = std::abs(k);
    if (ak > N / 2) last += a;
    else if (ak > N / 4) prev += a;
  }
  if (last > 0.1 * total) {
    throw Error(ErrorCode::tail_not_decaying, "last octave holds " + std::to_string(last / total) +
                                                  " of the coefficient mass at N=" + std::to_string(N));
  }
  double tail = last;
  if (prev > 0.0) {
    const double rho = last / prev;
    tail = rho < 0.9 ? last * rho / (1.0 - rho) : 9.0 * last;
  }

  // Reconstruction on the sampling grid from the truncated spectrum.
  for (std::size_t j = 0; j < M; ++j) spectrum.data[j][0] = spectrum.data[j][1] = 0.0;
  for (int k = -N; k <= N; ++k) {
    const std::size_t idx = static_cast<std::size_t>((k + static_cast<long>(M)) % static_cast<long>(M));
    spectrum.data[idx][0] = c[static_cast<std::size_t>(k + N)].real();
    spectrum.data[idx][1] = c[static_cast<std::size_t>(k + N)].imag();
  }
  run_dft(spectrum, samples, FFTW_BACKWARD);
  double recon = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    recon = std::max(recon, std::abs(Point(samples.data[j][0], samples.data[j][1]) - values[j]));
  }
  return HarmonicMap(N, std::move(c), tail, recon);
}

HarmonicMap fourier_coefficients(const BoundaryMap& map, int N) {
  return fourier_coefficients([&map](double t) { return map.F(t); }, N);
}

HarmonicMap harmonic_extension(const BoundaryMap& map, int initial_order) {
  int N = initial_order;
  HarmonicMap hm = fourier_coefficients(map, N);
  while (hm.tail_bound() >= 1e-8 && N < 65536) {
    N *= 2;
    hm = fourier_coefficients(map, N);
  }
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> radius(0.0, 0.9), angle(0.0, kTwoPi);
  double worst = 0.0;
  auto F = [&map](double t) { return map.F(t); };
  for (int i = 0; i < 10; ++i) {
    const Point z = std::polar(radius(rng), angle(rng));
    worst = std::max(worst, std::abs(eval_w(hm, z) - poisson_integral(F, z)));
  }
  hm.set_poisson_check(worst);
  return hm;
}

namespace {

void require_inside(Point z) {
  if (!(std::abs(z) <= 1.0 - 1e-9)) {
    throw Error(ErrorCode::outside_domain, "point lies outside |z| <= 1 - 1e-9");
  }
}

}  // namespace

Point eval_w(const HarmonicMap& hm, Point z) {
  require_inside(z);
  const int n = hm.effective_order();
  Point analytic{}, anti{};
  const Point zb = std::conj(z);
  for (int k = n; k >= 1; --k) {
    analytic = analytic * z + hm.coeff(k);
    anti = anti * zb + hm.coeff(-k);
  }
  return analytic * z + anti * zb + hm.coeff(0);
}

WirtingerDerivatives wirtinger(const HarmonicMap& hm, Point z) {
  require_inside(z);
  const int n = hm.effective_order();
  Point dz{}, dzb{};
  const Point zb = std::conj(z);
  for (int k = n; k >= 1; --k) {
    dz = dz * z + static_cast<double>(k) * hm.coeff(k);
    dzb = dzb * zb + static_cast<double>(k) * hm.coeff(-k);
  }
  return {dz, dzb};
}

double jacobian_interior(const HarmonicMap& hm, Point z) {
  const auto d = wirtinger(hm, z);
  return std::norm(d.dz) - std::norm(d.dzbar);
}

RadialJacobian radial_jacobian(const HarmonicMap& hm, double tau, std::span<const double> r_list) {
  RadialJacobian out;
  std::vector<double> h;
  double prev = 0.0;
  for (double r : r_list) {
    if (!(r > prev && r < 1.0)) throw Error(ErrorCode::invalid_params, "r_list must be increasing in (0,1)");
    if (r > 1.0 - 1e-6) throw Error(ErrorCode::outside_domain, "radial samples must satisfy r <= 1 - 1e-6");
    prev = r;
    out.values.push_back(jacobian_interior(hm, std::polar(r, tau)));
    h.push_back(1.0 - r);
  }
  if (out.values.empty()) return out;
  const auto ex = quad::neville_extrapolate(h, out.values, 0.0);
  out.limit = ex.value;
  out.error = ex.error;
  return out;
}

Point poisson_integral(const std::function<Point(double)>& boundary, Point z, double tol) {
  const double r = std::abs(z);
  if (!(r < 1.0)) throw Error(ErrorCode::outside_domain, "Poisson integral needs |z| < 1");
  const double tau = std::arg(z);
  auto kernel = [r](double u) { return (1.0 - r * r) / (kTwoPi * (1.0 - 2.0 * r * std::cos(u) + r * r)); };
  auto re = [&](double u) { return kernel(u) * boundary(tau + u).real(); };
  auto im = [&](double u) { return kernel(u) * boundary(tau + u).imag(); };
  const std::array<double, 5> breaks = {-std::numbers::pi, -0.5, 0.0, 0.5, std::numbers::pi};
  const double x = quad::adaptive_pieces(re, breaks, tol).value;
  const double y = quad::adaptive_pieces(im, breaks, tol).value;
  return {x, y};
}

}  // namespace hmcert
