#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace hmcert::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  bool converged = true;
};

namespace detail {

// Kronrod abscissae on [0,1]; odd indices are the embedded 7-point Gauss nodes.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline constexpr std::array<double, 5> kGl10X = {
    0.148874338981631210884826001129720, 0.433395394129247190799265943165784,
    0.679409568299024406234327365114874, 0.865063366688984510732096688423493,
    0.973906528517171720077964012084452};
inline constexpr std::array<double, 5> kGl10W = {
    0.295524224714752870173892994651338, 0.269266719309996355091226921569469,
    0.219086362515982043995534934228163, 0.149451349150580593145776339657697,
    0.066671344308688137593568666624173};

}  // namespace detail

/// One Gauss-Kronrod 7/15 panel; `error` is |K15 - G7|.
template <class F>
Result gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * detail::kWgk[7];
  double gauss = fc * detail::kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * detail::kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    kron += detail::kWgk[j] * s;
    if (j % 2 == 1) gauss += detail::kWg[j / 2] * s;
  }
  return {kron * h, std::abs((kron - gauss) * h), 15, true};
}

/// Fixed 10-point Gauss-Legendre rule.
template <class F>
double gauss_legendre10(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t j = 0; j < detail::kGl10X.size(); ++j) {
    const double dx = h * detail::kGl10X[j];
    sum += detail::kGl10W[j] * (f(c - dx) + f(c + dx));
  }
  return sum * h;
}

/// Globally adaptive Gauss-Kronrod: bisects the panel with the largest error
/// estimate until the summed estimate drops below max(abs_tol, rel_tol*|I|).
template <class F>
Result adaptive(F&& f, double a, double b, double abs_tol, double rel_tol = 0.0,
                int max_panels = 400) {
  struct Panel {
    double a, b;
    Result r;
  };
  const auto worse = [](const Panel& x, const Panel& y) { return x.r.error < y.r.error; };

  std::vector<Panel> heap;
  heap.reserve(64);
  heap.push_back({a, b, gk15(f, a, b)});
  double value = heap.front().r.value;
  double error = heap.front().r.error;
  int evals = 15;

  while (error > std::max(abs_tol, rel_tol * std::abs(value))) {
    if (static_cast<int>(heap.size()) >= max_panels) {
      return {value, error, evals, false};
    }
    std::pop_heap(heap.begin(), heap.end(), worse);
    const Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push_back(worst);
      return {value, error, evals, false};
    }
    Panel left{worst.a, mid, gk15(f, worst.a, mid)};
    Panel right{mid, worst.b, gk15(f, mid, worst.b)};
    evals += 30;
    value += left.r.value + right.r.value - worst.r.value;
    error += left.r.error + right.r.error - worst.r.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), worse);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), worse);
  }
  // Re-sum to shed the drift of the running updates.
  value = 0.0;
  error = 0.0;
  for (const auto& p : heap) {
    value += p.r.value;
    error += p.r.error;
  }
  return {value, error, evals, true};
}

/// Adaptive integration over consecutive breakpoints [x0,x1], [x1,x2], ...
template <class F>
Result adaptive_pieces(F&& f, std::span<const double> breaks, double abs_tol, double rel_tol = 0.0) {
  Result total;
  if (breaks.size() < 2) return total;
  const double per = abs_tol / static_cast<double>(breaks.size() - 1);
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    const Result r = adaptive(f, breaks[i], breaks[i + 1], per, rel_tol);
    total.value += r.value;
    total.error += r.error;
    total.evaluations += r.evaluations;
    total.converged = total.converged && r.converged;
  }
  return total;
}

struct Extrapolation {
  double value = 0.0;
  double error = 0.0;
};

/// Neville polynomial extrapolation of samples (xs[i], ys[i]) to x = x0.
/// The error indicator is the change between the last two tableau orders.
Extrapolation neville_extrapolate(std::span<const double> xs, std::span<const double> ys,
                                  double x0 = 0.0);

}  // namespace hmcert::quad
