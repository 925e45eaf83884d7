#include "hmcert/boundary_param.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_interp.h>

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hmcert/error.hpp"

namespace hmcert {

namespace detail {

struct ParamImpl {
  virtual ~ParamImpl() = default;
  virtual double value(double t) const = 0;
  virtual double deriv(double t) const = 0;

  MapSpec spec;
  double increment = 0.0;
  double lipschitz = 0.0;
  bool strict = false;
  int mollification = 0;
  std::vector<double> breaks;  // in [0, 2pi)
};

}  // namespace detail

namespace {

std::string fmt_number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

class LinearParam final : public detail::ParamImpl {
 public:
  explicit LinearParam(double c) : c_(c) {}
  double value(double t) const override { return c_ * t; }
  double deriv(double) const override { return c_; }

 private:
  double c_;
};

class SinParam final : public detail::ParamImpl {
 public:
  SinParam(double c, double a, int k) : c_(c), a_(a), k_(k) {}
  double value(double t) const override { return c_ * (t - a_ * std::sin(k_ * t)); }
  double deriv(double t) const override {
    return std::max(0.0, c_ * (1.0 - a_ * k_ * std::cos(k_ * t)));
  }

 private:
  double c_, a_;
  double k_;
};

// Steffen (monotone cubic) interpolation of knots, extended quasi-periodically.
class KnotParam final : public detail::ParamImpl {
 public:
  KnotParam(const std::vector<double>& t, const std::vector<double>& f, double length)
      : t0_(t.front()), length_(length) {
    const std::size_t m = t.size() - 1;  // knots per period
    for (std::size_t i = 0; i < m; ++i) breaks.push_back(t[i] - kTwoPi * std::floor(t[i] / kTwoPi));
    std::sort(breaks.begin(), breaks.end());
    const std::size_t pad = std::min<std::size_t>(3, m);
    for (std::size_t i = m - pad; i < m; ++i) {
      x_.push_back(t[i] - kTwoPi);
      y_.push_back(f[i] - length);
    }
    for (std::size_t i = 0; i <= m; ++i) {
      x_.push_back(t[i]);
      y_.push_back(f[i]);
    }
    for (std::size_t i = 1; i <= pad; ++i) {
      x_.push_back(t[i] + kTwoPi);
      y_.push_back(f[i] + length);
    }
    interp_ = gsl_interp_alloc(gsl_interp_steffen, x_.size());
    if (interp_ == nullptr || gsl_interp_init(interp_, x_.data(), y_.data(), x_.size()) != GSL_SUCCESS) {
      if (interp_ != nullptr) gsl_interp_free(interp_);
      throw Error(ErrorCode::invalid_params, "monotone interpolation of knots failed");
    }
  }
  KnotParam(const KnotParam&) = delete;
  KnotParam& operator=(const KnotParam&) = delete;
  ~KnotParam() override { gsl_interp_free(interp_); }

  double value(double t) const override {
    const double wraps = std::floor((t - t0_) / kTwoPi);
    const double r = std::clamp(t - wraps * kTwoPi, t0_, t0_ + kTwoPi);
    return gsl_interp_eval(interp_, x_.data(), y_.data(), r, nullptr) + wraps * length_;
  }
  double deriv(double t) const override {
    const double wraps = std::floor((t - t0_) / kTwoPi);
    const double r = std::clamp(t - wraps * kTwoPi, t0_, t0_ + kTwoPi);
    return std::max(0.0, gsl_interp_eval_deriv(interp_, x_.data(), y_.data(), r, nullptr));
  }

 private:
  double t0_, length_;
  std::vector<double> x_, y_;
  gsl_interp* interp_ = nullptr;
};

// Discrete convolution of the periodic part with a C-infinity bump, blended
// with the linear map. Weights sum to one, so linear maps are reproduced and
// f_n' >= c/n holds node by node.
class MollifiedParam final : public detail::ParamImpl {
 public:
  MollifiedParam(std::shared_ptr<const detail::ParamImpl> base, int n)
      : base_(std::move(base)), n_(n), c_(base_->increment / kTwoPi) {
    const int nodes = 64;
    const double h = std::numbers::pi / n;
    double mass = 0.0;
    for (int j = 0; j < nodes; ++j) {
      const double x = -1.0 + (2.0 * j + 1.0) / nodes;
      const double w = std::exp(-1.0 / (1.0 - x * x));
      offsets_.push_back(h * x);
      weights_.push_back(w);
      mass += w;
    }
    for (double& w : weights_) w /= mass;
    blend_ = 1.0 - 1.0 / n_;
  }

  double value(double t) const override {
    double conv = 0.0;
    for (std::size_t j = 0; j < weights_.size(); ++j) {
      const double s = t - offsets_[j];
      conv += weights_[j] * (base_->value(s) - c_ * s);
    }
    return c_ * t + blend_ * conv;
  }
  double deriv(double t) const override {
    double conv = 0.0;
    for (std::size_t j = 0; j < weights_.size(); ++j) conv += weights_[j] * base_->deriv(t - offsets_[j]);
    return c_ / n_ + blend_ * conv;
  }

 private:
  std::shared_ptr<const detail::ParamImpl> base_;
  int n_;
  double c_;
  double blend_ = 0.0;
  std::vector<double> offsets_, weights_;
};

}  // namespace

// ---------------------------------------------------------------------------

MapSpec MapSpec::identity() { return {}; }

MapSpec MapSpec::sin_perturbed(double a, int k) {
  MapSpec s;
  s.family = MapFamily::sin_perturbed;
  s.a = a;
  s.k = k;
  return s;
}

MapSpec MapSpec::knots(std::vector<double> t, std::vector<double> f) {
  MapSpec s;
  s.family = MapFamily::knots;
  s.t = std::move(t);
  s.f = std::move(f);
  return s;
}

std::string MapSpec::id() const {
  switch (family) {
    case MapFamily::identity:
      return "identity";
    case MapFamily::sin_perturbed:
      return "sin-perturbed(a=" + fmt_number(a) + ",k=" + std::to_string(k) + ")";
    case MapFamily::knots:
      return "knots(n=" + std::to_string(t.size()) + ")";
  }
  return "unknown";
}

double WeakHomeomorphism::operator()(double t) const { return impl_->value(t); }
double WeakHomeomorphism::derivative(double t) const { return impl_->deriv(t); }
double WeakHomeomorphism::lipschitz() const { return impl_->lipschitz; }
bool WeakHomeomorphism::strict() const { return impl_->strict; }
double WeakHomeomorphism::increment() const { return impl_->increment; }
const MapSpec& WeakHomeomorphism::source() const { return impl_->spec; }
int WeakHomeomorphism::mollification() const { return impl_->mollification; }
const std::vector<double>& WeakHomeomorphism::breakpoints() const { return impl_->breaks; }

std::string WeakHomeomorphism::id() const {
  std::string out = impl_->spec.id();
  if (impl_->mollification > 0) out += "~n" + std::to_string(impl_->mollification);
  return out;
}

WeakHomeomorphism build_param(const MapSpec& spec, double curve_length) {
  if (!(curve_length > 0.0)) throw Error(ErrorCode::invalid_params, "curve length must be positive");
  const double c = curve_length / kTwoPi;
  std::shared_ptr<detail::ParamImpl> impl;

  switch (spec.family) {
    case MapFamily::identity: {
      impl = std::make_shared<LinearParam>(c);
      impl->lipschitz = c;
      impl->strict = true;
      break;
    }
    case MapFamily::sin_perturbed: {
      if (spec.k < 1) throw Error(ErrorCode::invalid_params, "sin-perturbed: k must be >= 1");
      const double ak = std::abs(spec.a * spec.k);
      if (ak > 1.0) {
        throw Error(ErrorCode::invalid_params,
                    "sin-perturbed: |a*k| = " + fmt_number(ak) + " > 1 breaks monotonicity");
      }
      impl = std::make_shared<SinParam>(c, spec.a, spec.k);
      impl->lipschitz = c * (1.0 + ak);
      impl->strict = ak < 1.0;
      break;
    }
    case MapFamily::knots: {
      const auto& t = spec.t;
      const auto& f = spec.f;
      if (t.size() != f.size() || t.size() < 3) {
        throw Error(ErrorCode::invalid_params, "knots: need matching t and f arrays of length >= 3");
      }
      for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        if (!(t[i + 1] > t[i])) throw Error(ErrorCode::invalid_params, "knots: t must be strictly increasing");
        if (f[i + 1] < f[i]) {
          throw Error(ErrorCode::not_monotone, "knots: f decreases between t[" + std::to_string(i) +
                                                   "] and t[" + std::to_string(i + 1) + "]");
        }
      }
      if (std::abs(t.back() - t.front() - kTwoPi) > 1e-9) {
        throw Error(ErrorCode::invalid_params, "knots: t must span exactly one period 2pi");
      }
      if (std::abs(f.back() - f.front() - curve_length) > 1e-9 * curve_length) {
        throw Error(ErrorCode::wrong_period_increment,
                    "knots: f(2pi) - f(0) = " + fmt_number(f.back() - f.front()) +
                        " but curve length is " + fmt_number(curve_length));
      }
      auto knot = std::make_shared<KnotParam>(t, f, curve_length);
      const int grid = 4096;
      double lmax = c;
      bool strict = true;
      double prev = knot->value(t.front());
      for (int i = 1; i <= grid; ++i) {
        const double x = t.front() + kTwoPi * i / grid;
        const double v = knot->value(x);
        lmax = std::max(lmax, (v - prev) / (kTwoPi / grid));
        prev = v;
        if (!(knot->deriv(x) > 0.0)) strict = false;
      }
      impl = knot;
      impl->lipschitz = lmax * kLipschitzSafety;
      impl->strict = strict;
      break;
    }
  }
  impl->spec = spec;
  impl->increment = curve_length;

  WeakHomeomorphism out;
  out.impl_ = std::move(impl);
  return out;
}

WeakHomeomorphism mollify(const WeakHomeomorphism& param, int n) {
  if (n < 1) throw Error(ErrorCode::invalid_params, "mollify: n must be >= 1");
  auto impl = std::make_shared<MollifiedParam>(param.impl_, n);
  impl->spec = param.impl_->spec;
  impl->increment = param.impl_->increment;
  impl->lipschitz = param.impl_->lipschitz;
  impl->strict = true;
  impl->mollification = n;
  WeakHomeomorphism out;
  out.impl_ = std::move(impl);
  return out;
}

LipschitzEstimate lipschitz_estimate(const WeakHomeomorphism& param, int grid_n) {
  if (grid_n < 256) throw Error(ErrorCode::invalid_params, "lipschitz_estimate: grid_n must be >= 256");
  const double h = kTwoPi / grid_n;
  std::vector<double> vals(static_cast<std::size_t>(grid_n) + static_cast<std::size_t>(grid_n / 2) + 1);
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = param(h * static_cast<double>(i));
  LipschitzEstimate out{0.0, std::numeric_limits<double>::infinity()};
  for (int m = 1; m <= grid_n / 2; ++m) {
    for (int i = 0; i < grid_n; ++i) {
      const double q = (vals[static_cast<std::size_t>(i + m)] - vals[static_cast<std::size_t>(i)]) / (m * h);
      if (m == 1) out.L_lower = std::max(out.L_lower, q);
      out.ell_lower = std::min(out.ell_lower, q);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

BoundaryMap::BoundaryMap(JordanCurve curve, WeakHomeomorphism param)
    : curve_(std::move(curve)), param_(std::move(param)) {
  if (std::abs(param_.increment() - curve_.length()) > 1e-9 * curve_.length()) {
    throw Error(ErrorCode::wrong_period_increment, "parametrization increment does not match curve length");
  }
}

double kernel_KF(const BoundaryMap& map, double t, double tau) {
  const auto& f = map.param();
  return f.derivative(tau) * kernel_K(map.curve(), f(tau), f(t));
}

double kernel_KF_direct(const BoundaryMap& map, double t, double tau) {
  const Point diff = map.F(t) - map.F(tau);
  return (std::conj(diff) * Point(0.0, 1.0) * map.dF(tau)).real();
}

}  // namespace hmcert
