#include "hmcert/curve.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_interp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hmcert/error.hpp"
#include "hmcert/quadrature.hpp"

namespace hmcert {

namespace {

const bool kGslQuiet = [] {
  gsl_set_error_handler_off();
  return true;
}();

double cross(Point a, Point b) { return a.real() * b.imag() - a.imag() * b.real(); }

std::string fmt_number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

// Smooth closed curve z(u), u in [0, period), not yet at unit speed.
class RawCurve {
 public:
  virtual ~RawCurve() = default;
  virtual double period() const = 0;
  virtual Point z(double u) const = 0;
  virtual Point dz(double u) const = 0;
  virtual Point ddz(double u) const = 0;
  // Parameter values where the representation is only finitely smooth.
  virtual std::vector<double> breakpoints() const { return {}; }
};

class CircleCurve final : public RawCurve {
 public:
  explicit CircleCurve(double r) : r_(r) {}
  double period() const override { return kTwoPi; }
  Point z(double u) const override { return std::polar(r_, u); }
  Point dz(double u) const override { return Point(0.0, r_) * std::polar(1.0, u); }
  Point ddz(double u) const override { return -std::polar(r_, u); }

 private:
  double r_;
};

class EllipseCurve final : public RawCurve {
 public:
  EllipseCurve(double a, double b) : a_(a), b_(b) {}
  double period() const override { return kTwoPi; }
  Point z(double u) const override { return {a_ * std::cos(u), b_ * std::sin(u)}; }
  Point dz(double u) const override { return {-a_ * std::sin(u), b_ * std::cos(u)}; }
  Point ddz(double u) const override { return {-a_ * std::cos(u), -b_ * std::sin(u)}; }

 private:
  double a_, b_;
};

class PolarCurve final : public RawCurve {
 public:
  using Fn = std::function<double(double)>;
  PolarCurve(Fn r, Fn dr, Fn ddr) : r_(std::move(r)), dr_(std::move(dr)), ddr_(std::move(ddr)) {}
  double period() const override { return kTwoPi; }
  Point z(double u) const override { return r_(u) * std::polar(1.0, u); }
  Point dz(double u) const override { return Point(dr_(u), r_(u)) * std::polar(1.0, u); }
  Point ddz(double u) const override {
    return Point(ddr_(u) - r_(u), 2.0 * dr_(u)) * std::polar(1.0, u);
  }

 private:
  Fn r_, dr_, ddr_;
};

// Periodic cubic spline through (x_i, y_i) with y_0 == y_{n-1}.
class PeriodicSpline {
 public:
  PeriodicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    interp_ = gsl_interp_alloc(gsl_interp_cspline_periodic, x_.size());
    if (interp_ == nullptr || gsl_interp_init(interp_, x_.data(), y_.data(), x_.size()) != GSL_SUCCESS) {
      if (interp_ != nullptr) gsl_interp_free(interp_);
      throw Error(ErrorCode::invalid_spec, "periodic spline construction failed");
    }
  }
  PeriodicSpline(const PeriodicSpline&) = delete;
  PeriodicSpline& operator=(const PeriodicSpline&) = delete;
  ~PeriodicSpline() { gsl_interp_free(interp_); }

  double period() const { return x_.back() - x_.front(); }
  double value(double x) const { return gsl_interp_eval(interp_, x_.data(), y_.data(), reduce(x), nullptr); }
  double deriv(double x) const {
    return gsl_interp_eval_deriv(interp_, x_.data(), y_.data(), reduce(x), nullptr);
  }
  double deriv2(double x) const {
    return gsl_interp_eval_deriv2(interp_, x_.data(), y_.data(), reduce(x), nullptr);
  }
  const std::vector<double>& knots() const { return x_; }

 private:
  double reduce(double x) const {
    const double p = period();
    double r = x - p * std::floor((x - x_.front()) / p);
    return std::clamp(r, x_.front(), x_.back());
  }
  std::vector<double> x_, y_;
  gsl_interp* interp_ = nullptr;
};

class PolarSampleCurve final : public RawCurve {
 public:
  PolarSampleCurve(std::vector<double> theta, std::vector<double> r) : spline_(std::move(theta), std::move(r)) {}
  double period() const override { return kTwoPi; }
  Point z(double u) const override { return spline_.value(u) * std::polar(1.0, u); }
  Point dz(double u) const override {
    return Point(spline_.deriv(u), spline_.value(u)) * std::polar(1.0, u);
  }
  Point ddz(double u) const override {
    return Point(spline_.deriv2(u) - spline_.value(u), 2.0 * spline_.deriv(u)) * std::polar(1.0, u);
  }
  std::vector<double> breakpoints() const override { return reduced_knots(spline_.knots()); }

  static std::vector<double> reduced_knots(const std::vector<double>& k) {
    const double p = k.back() - k.front();
    std::vector<double> out;
    for (double x : k) out.push_back(x - p * std::floor(x / p));
    return out;
  }

 private:
  PeriodicSpline spline_;
};

class PointCurve final : public RawCurve {
 public:
  PointCurve(const std::vector<double>& u, std::vector<double> x, std::vector<double> y)
      : x_(u, std::move(x)), y_(u, std::move(y)) {}
  double period() const override { return x_.period(); }
  Point z(double u) const override { return {x_.value(u), y_.value(u)}; }
  Point dz(double u) const override { return {x_.deriv(u), y_.deriv(u)}; }
  Point ddz(double u) const override { return {x_.deriv2(u), y_.deriv2(u)}; }
  std::vector<double> breakpoints() const override { return x_.knots(); }

 private:
  PeriodicSpline x_, y_;
};

// ---------------------------------------------------------------------------

std::unique_ptr<RawCurve> make_points_curve(std::vector<Point> pts) {
  // Drop consecutive duplicates.
  std::vector<Point> clean;
  for (const Point& p : pts) {
    if (clean.empty() || std::abs(p - clean.back()) > 0.0) clean.push_back(p);
  }
  double diam = 0.0;
  for (const Point& p : clean) diam = std::max(diam, std::abs(p - clean.front()));
  if (clean.size() >= 2) {
    const double gap = std::abs(clean.back() - clean.front());
    if (gap <= 1e-9 * std::max(diam, 1e-300)) {
      clean.pop_back();
    } else {
      double max_step = 0.0;
      for (std::size_t i = 0; i + 1 < clean.size(); ++i) {
        max_step = std::max(max_step, std::abs(clean[i + 1] - clean[i]));
      }
      if (gap > 3.0 * max_step) {
        throw Error(ErrorCode::not_closed, "closing gap " + fmt_number(gap) +
                                               " exceeds 3x the largest sample spacing");
      }
    }
  }
  if (clean.size() < 16) {
    throw Error(ErrorCode::too_few_samples, "point loop needs at least 16 distinct points, got " +
                                                std::to_string(clean.size()));
  }
  // Orientation by the shoelace formula; clockwise loops are reversed.
  double area2 = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    area2 += cross(clean[i], clean[(i + 1) % clean.size()]);
  }
  if (area2 < 0.0) std::reverse(clean.begin() + 1, clean.end());

  std::vector<double> u{0.0}, x, y;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    x.push_back(clean[i].real());
    y.push_back(clean[i].imag());
    u.push_back(u.back() + std::abs(clean[(i + 1) % clean.size()] - clean[i]));
  }
  x.push_back(clean.front().real());
  y.push_back(clean.front().imag());
  return std::make_unique<PointCurve>(u, std::move(x), std::move(y));
}

std::unique_ptr<RawCurve> make_polar_samples(std::vector<double> theta, std::vector<double> r) {
  if (theta.size() != r.size()) {
    throw Error(ErrorCode::invalid_spec, "polar samples: theta and r differ in length");
  }
  for (std::size_t i = 0; i + 1 < theta.size(); ++i) {
    if (!(theta[i + 1] > theta[i])) {
      throw Error(ErrorCode::invalid_spec, "polar samples: theta must be strictly increasing");
    }
  }
  for (double v : r) {
    if (!(v > 0.0)) throw Error(ErrorCode::invalid_spec, "polar samples: r must be positive");
  }
  if (theta.empty()) throw Error(ErrorCode::too_few_samples, "polar samples: empty");
  const double span = theta.back() - theta.front();
  const double rmax = *std::max_element(r.begin(), r.end());
  if (std::abs(span - kTwoPi) <= 1e-9) {
    if (std::abs(r.back() - r.front()) > 1e-9 * rmax) {
      throw Error(ErrorCode::not_closed, "polar samples: r(theta0 + 2pi) != r(theta0)");
    }
    theta.back() = theta.front() + kTwoPi;
    r.back() = r.front();
  } else if (span > kTwoPi) {
    throw Error(ErrorCode::not_closed, "polar samples: theta spans more than 2pi");
  } else {
    theta.push_back(theta.front() + kTwoPi);
    r.push_back(r.front());
  }
  if (theta.size() - 1 < 16) {
    throw Error(ErrorCode::too_few_samples, "polar samples: need at least 16 distinct samples");
  }
  return std::make_unique<PolarSampleCurve>(std::move(theta), std::move(r));
}

double param_or(const std::map<std::string, double>& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

std::unique_ptr<RawCurve> make_polar_formula(const CurveSpec& spec) {
  if (spec.formula_id == "cosine") {
    const double eps = param_or(spec.params, "eps", 0.0);
    const double k = param_or(spec.params, "k", 1.0);
    const double r0 = param_or(spec.params, "r0", 1.0);
    if (!(r0 > 0.0) || !(eps >= 0.0 && eps < 1.0)) {
      throw Error(ErrorCode::invalid_spec, "polar cosine: need r0 > 0 and 0 <= eps < 1");
    }
    if (!(k >= 1.0) || k != std::round(k)) {
      throw Error(ErrorCode::invalid_spec, "polar cosine: k must be a positive integer");
    }
    return std::make_unique<PolarCurve>(
        [=](double t) { return r0 * (1.0 + eps * std::cos(k * t)); },
        [=](double t) { return -r0 * eps * k * std::sin(k * t); },
        [=](double t) { return -r0 * eps * k * k * std::cos(k * t); });
  }
  throw Error(ErrorCode::invalid_spec, "unknown polar formula_id '" + spec.formula_id + "'");
}

std::unique_ptr<RawCurve> make_raw(const CurveSpec& spec) {
  switch (spec.family) {
    case CurveFamily::circle:
      if (!(spec.radius > 0.0)) throw Error(ErrorCode::invalid_spec, "circle: radius must be positive");
      return std::make_unique<CircleCurve>(spec.radius);
    case CurveFamily::ellipse:
      if (!(spec.a > 0.0 && spec.b > 0.0)) {
        throw Error(ErrorCode::invalid_spec, "ellipse: semi-axes must be positive");
      }
      return std::make_unique<EllipseCurve>(spec.a, spec.b);
    case CurveFamily::polar_formula:
      return make_polar_formula(spec);
    case CurveFamily::polar_samples:
      return make_polar_samples(spec.theta, spec.r);
    case CurveFamily::points:
      return make_points_curve(spec.xy);
  }
  throw Error(ErrorCode::invalid_spec, "unknown curve family");
}

bool segments_cross(Point p1, Point p2, Point q1, Point q2) {
  const double d1 = cross(q2 - q1, p1 - q1);
  const double d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1);
  const double d4 = cross(p2 - p1, q2 - p1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// CurveSpec
// ---------------------------------------------------------------------------

CurveSpec CurveSpec::circle(double radius) {
  CurveSpec s;
  s.family = CurveFamily::circle;
  s.radius = radius;
  return s;
}

CurveSpec CurveSpec::ellipse(double a, double b) {
  CurveSpec s;
  s.family = CurveFamily::ellipse;
  s.a = a;
  s.b = b;
  return s;
}

CurveSpec CurveSpec::polar_cosine(double eps, double k, double r0) {
  CurveSpec s;
  s.family = CurveFamily::polar_formula;
  s.formula_id = "cosine";
  s.params = {{"eps", eps}, {"k", k}, {"r0", r0}};
  return s;
}

CurveSpec CurveSpec::polar_samples(std::vector<double> theta, std::vector<double> r) {
  CurveSpec s;
  s.family = CurveFamily::polar_samples;
  s.theta = std::move(theta);
  s.r = std::move(r);
  return s;
}

CurveSpec CurveSpec::points(std::vector<Point> xy) {
  CurveSpec s;
  s.family = CurveFamily::points;
  s.xy = std::move(xy);
  return s;
}

std::string CurveSpec::id() const {
  switch (family) {
    case CurveFamily::circle:
      return "circle(r=" + fmt_number(radius) + ")";
    case CurveFamily::ellipse:
      return "ellipse(a=" + fmt_number(a) + ",b=" + fmt_number(b) + ")";
    case CurveFamily::polar_formula: {
      std::string out = "polar:" + formula_id + "(";
      bool first = true;
      for (const auto& [k, v] : params) {
        out += (first ? "" : ",") + k + "=" + fmt_number(v);
        first = false;
      }
      return out + ")";
    }
    case CurveFamily::polar_samples:
      return "polar:samples(n=" + std::to_string(theta.size()) + ")";
    case CurveFamily::points:
      return "points(n=" + std::to_string(xy.size()) + ")";
  }
  return "unknown";
}

std::vector<std::string> polar_formula_catalog() { return {"cosine"}; }

// ---------------------------------------------------------------------------
// ModulusOfContinuity
// ---------------------------------------------------------------------------

ModulusOfContinuity ModulusOfContinuity::closed_form(std::function<double(double)> omega,
                                                     std::function<double(double)> integral,
                                                     double slope0) {
  ModulusOfContinuity m;
  m.kind_ = Kind::closed_form;
  m.omega_ = std::move(omega);
  m.integral_ = std::move(integral);
  m.slope0_ = slope0;
  return m;
}

ModulusOfContinuity ModulusOfContinuity::from_grid(double step, const std::vector<double>& raw, double safety) {
  ModulusOfContinuity m;
  m.kind_ = Kind::grid_estimated;
  m.safety_ = safety;
  m.step_ = step;
  m.values_.resize(raw.size());
  double run = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    run = std::max(run, raw[i]);
    m.values_[i] = i == 0 ? 0.0 : safety * run;
  }
  m.cumulative_.assign(raw.size(), 0.0);
  for (std::size_t i = 1; i < raw.size(); ++i) {
    m.cumulative_[i] = m.cumulative_[i - 1] + 0.5 * step * (m.values_[i] + m.values_[i - 1]);
    m.slope0_ = std::max(m.slope0_, m.values_[i] / (step * static_cast<double>(i)));
  }
  return m;
}

double ModulusOfContinuity::operator()(double delta) const {
  if (!(delta > 0.0)) return 0.0;
  if (kind_ == Kind::closed_form) return omega_(delta);
  const double x = delta / step_;
  const std::size_t last = values_.size() - 1;
  if (x >= static_cast<double>(last)) return values_.back();
  const auto i = static_cast<std::size_t>(x);
  const double frac = x - static_cast<double>(i);
  return values_[i] + frac * (values_[i + 1] - values_[i]);
}

double ModulusOfContinuity::integral(double x) const {
  if (!(x > 0.0)) return 0.0;
  if (kind_ == Kind::closed_form) {
    if (integral_) return integral_(x);
    return quad::adaptive(omega_, 0.0, x, 1e-15, 1e-13).value;
  }
  const std::size_t last = values_.size() - 1;
  const double pos = x / step_;
  if (pos >= static_cast<double>(last)) {
    return cumulative_.back() + (x - step_ * static_cast<double>(last)) * values_.back();
  }
  const auto i = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(i);
  const double v_at = values_[i] + frac * (values_[i + 1] - values_[i]);
  return cumulative_[i] + 0.5 * frac * step_ * (values_[i] + v_at);
}

// ---------------------------------------------------------------------------
// Curve data and arc-length table
// ---------------------------------------------------------------------------

namespace detail {

struct CurveData {
  CurveSpec spec;
  std::unique_ptr<RawCurve> raw;

  // Cumulative raw arc length at nodes u_nodes.
  std::vector<double> u_nodes, s_nodes;

  // Uniform table in s: u(s_i) and du/ds at s_i = i * ds.
  double length = 0.0;
  double ds = 0.0;
  std::vector<double> u_tab, du_tab, ddu_tab;

  double diameter = 0.0;
  double speed_defect = 0.0;
  ModulusOfContinuity omega;
  TurningAngle beta;

  double speed(double u) const { return std::abs(raw->dz(u)); }

  // u''(s) = -sigma'(u) / sigma^3 with sigma = |z'(u)|.
  double second(double u) const {
    const Point d = raw->dz(u);
    const double sigma = std::abs(d);
    const double dsigma = (std::conj(d) * raw->ddz(u)).real() / sigma;
    return -dsigma / (sigma * sigma * sigma);
  }

  double s_of_u(double u) const {
    auto it = std::upper_bound(u_nodes.begin(), u_nodes.end(), u);
    std::size_t j = it == u_nodes.begin() ? 0 : static_cast<std::size_t>(it - u_nodes.begin()) - 1;
    j = std::min(j, u_nodes.size() - 2);
    return s_nodes[j] + quad::gauss_legendre10([this](double v) { return speed(v); }, u_nodes[j], u);
  }

  double invert(double s) const {
    auto it = std::upper_bound(s_nodes.begin(), s_nodes.end(), s);
    std::size_t j = it == s_nodes.begin() ? 0 : static_cast<std::size_t>(it - s_nodes.begin()) - 1;
    j = std::min(j, s_nodes.size() - 2);
    const double lo = u_nodes[j], hi = u_nodes[j + 1];
    double u = lo + (hi - lo) * (s - s_nodes[j]) / (s_nodes[j + 1] - s_nodes[j]);
    for (int it2 = 0; it2 < 30; ++it2) {
      const double step = (s_of_u(u) - s) / speed(u);
      const double next = std::clamp(u - step, lo, hi);
      if (std::abs(next - u) <= 1e-16 * raw->period()) {
        u = next;
        break;
      }
      u = next;
    }
    return u;
  }

  // Quintic Hermite evaluation of u(s) on the uniform table.
  double u_of_s(double s, double* du = nullptr) const {
    const double sr = s - length * std::floor(s / length);
    const std::size_t n = u_tab.size() - 1;
    std::size_t i = static_cast<std::size_t>(sr / ds);
    if (i >= n) i = n - 1;
    const double h = ds;
    const double x = (sr - static_cast<double>(i) * ds) / h;
    const double jump = u_tab[i + 1] - u_tab[i];
    const double m0 = du_tab[i] * h, m1 = du_tab[i + 1] * h;
    const double a0 = ddu_tab[i] * h * h, a1 = ddu_tab[i + 1] * h * h;
    const double x2 = x * x, x3 = x2 * x, x4 = x3 * x, x5 = x4 * x;
    if (du != nullptr) {
      const double d5 = 30 * x2 - 60 * x3 + 30 * x4;
      const double d1 = 1 - 18 * x2 + 32 * x3 - 15 * x4;
      const double d2 = x - 4.5 * x2 + 6 * x3 - 2.5 * x4;
      const double d3 = 1.5 * x2 - 4 * x3 + 2.5 * x4;
      const double d4 = -12 * x2 + 28 * x3 - 15 * x4;
      *du = (d5 * jump + d1 * m0 + d2 * a0 + d3 * a1 + d4 * m1) / h;
    }
    const double h5 = 10 * x3 - 15 * x4 + 6 * x5;
    const double h1 = x - 6 * x3 + 8 * x4 - 3 * x5;
    const double h2 = 0.5 * x2 - 1.5 * x3 + 1.5 * x4 - 0.5 * x5;
    const double h3 = 0.5 * x3 - x4 + 0.5 * x5;
    const double h4 = -4 * x3 + 7 * x4 - 3 * x5;
    return u_tab[i] + h5 * jump + h1 * m0 + h2 * a0 + h3 * a1 + h4 * m1;
  }

  Point position(double s) const { return raw->z(u_of_s(s)); }
  Point tangent(double s) const {
    const Point d = raw->dz(u_of_s(s));
    return d / std::abs(d);
  }

  void build_arc_length() {
    const double period = raw->period();
    std::vector<double> nodes;
    const int n_uniform = 1024;
    for (int i = 0; i <= n_uniform; ++i) nodes.push_back(period * i / n_uniform);
    for (double b : raw->breakpoints()) {
      if (b > 0.0 && b < period) nodes.push_back(b);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end(),
                            [&](double x, double y) { return y - x <= 1e-14 * period; }),
                nodes.end());
    nodes.back() = period;
    u_nodes = nodes;
    s_nodes.assign(nodes.size(), 0.0);
    for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
      const double a = nodes[j], b = nodes[j + 1];
      const double mid = 0.5 * (a + b);
      auto sp = [this](double v) { return speed(v); };
      s_nodes[j + 1] = s_nodes[j] + quad::gauss_legendre10(sp, a, mid) + quad::gauss_legendre10(sp, mid, b);
    }
    length = s_nodes.back();

    // Refine the inverse table until the composed speed is one.
    for (std::size_t n = 512;; n *= 2) {
      ds = length / static_cast<double>(n);
      u_tab.assign(n + 1, 0.0);
      du_tab.assign(n + 1, 0.0);
      ddu_tab.assign(n + 1, 0.0);
      for (std::size_t i = 0; i <= n; ++i) {
        const double u = i == n ? period : (i == 0 ? 0.0 : invert(static_cast<double>(i) * ds));
        u_tab[i] = u;
        du_tab[i] = 1.0 / speed(u);
        ddu_tab[i] = second(u);
      }
      double defect = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (double q : {0.25, 0.5, 0.75}) {
          double du = 0.0;
          const double u = u_of_s((static_cast<double>(i) + q) * ds, &du);
          defect = std::max(defect, std::abs(speed(u) * du - 1.0));
        }
      }
      speed_defect = defect;
      if (defect <= 0.5 * kUnitSpeedTol) break;
      if (n >= (std::size_t{1} << 20)) {
        throw Error(ErrorCode::invalid_spec,
                    "arc-length reparametrization did not reach unit speed (defect " +
                        fmt_number(defect) + ")");
      }
    }
  }
};

}  // namespace detail

double JordanCurve::length() const { return data_->length; }
Point JordanCurve::position(double s) const { return data_->position(s); }
Point JordanCurve::tangent(double s) const { return data_->tangent(s); }
const CurveSpec& JordanCurve::source() const { return data_->spec; }
double JordanCurve::diameter() const { return data_->diameter; }
double JordanCurve::speed_defect() const { return data_->speed_defect; }
std::size_t JordanCurve::table_size() const { return data_->u_tab.size() - 1; }
const ModulusOfContinuity& JordanCurve::tangent_modulus() const { return data_->omega; }
const TurningAngle& JordanCurve::turning() const { return data_->beta; }

// ---------------------------------------------------------------------------
// TurningAngle
// ---------------------------------------------------------------------------

TurningAngle::TurningAngle(double length, std::vector<double> table, std::function<Point(double)> tangent)
    : length_(length), table_(std::move(table)), tangent_(std::move(tangent)) {
  var_.assign(table_.size(), 0.0);
  for (std::size_t i = 1; i < table_.size(); ++i) var_[i] = var_[i - 1] + std::abs(table_[i] - table_[i - 1]);
}

double TurningAngle::variation(double s0, double s1) const {
  if (table_.size() < 2 || !(s1 > s0)) return 0.0;
  const double n = static_cast<double>(table_.size() - 1);
  const double per_period = var_.back();
  // Cumulative variation at cell index x (unbounded, periodic extension).
  auto cumulative = [&](double x) {
    const double wraps = std::floor(x / n);
    const auto i = static_cast<std::size_t>(std::clamp(x - wraps * n, 0.0, n));
    return wraps * per_period + var_[i];
  };
  return cumulative(std::ceil(s1 / length_ * n)) - cumulative(std::floor(s0 / length_ * n));
}

double TurningAngle::operator()(double s) const {
  const double wraps = std::floor(s / length_);
  const double sr = s - wraps * length_;
  const double n = static_cast<double>(table_.size() - 1);
  const double x = std::clamp(sr / length_ * n, 0.0, n);
  const auto i = std::min(static_cast<std::size_t>(x), table_.size() - 2);
  const double frac = x - static_cast<double>(i);
  const double approx = table_[i] + frac * (table_[i + 1] - table_[i]);
  const double a = std::arg(tangent_(sr));
  const double lift = a + kTwoPi * std::round((approx - a) / kTwoPi);
  return lift + kTwoPi * wraps;
}

TurningAngle turning_angle(const JordanCurve& curve) {
  const double l = curve.length();
  for (std::size_t n = 4096;; n *= 2) {
    std::vector<double> table(n + 1);
    table[0] = std::arg(curve.tangent(0.0));
    double worst = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      const double a = std::arg(curve.tangent(l * static_cast<double>(i) / static_cast<double>(n)));
      const double step = std::remainder(a - table[i - 1], kTwoPi);
      worst = std::max(worst, std::abs(step));
      table[i] = table[i - 1] + step;
    }
    if (worst <= std::numbers::pi / 4) {
      if (std::abs(table[n] - table[0] - kTwoPi) > 1e-6) {
        throw Error(ErrorCode::unwrap_failure,
                    "total turning " + fmt_number(table[n] - table[0]) + " differs from 2pi");
      }
      // Pin the end exactly to a full turn; the evaluator re-derives the
      // branch from the exact tangent anyway.
      table[n] = table[0] + kTwoPi;
      auto tangent = [c = curve](double s) { return c.tangent(s); };
      return TurningAngle(l, std::move(table), tangent);
    }
    if (n >= (std::size_t{1} << 20)) {
      if (worst > std::numbers::pi / 2) {
        throw Error(ErrorCode::unwrap_failure, "adjacent tangent angles differ by more than pi/2");
      }
      auto tangent = [c = curve](double s) { return c.tangent(s); };
      return TurningAngle(l, std::move(table), tangent);
    }
  }
}

// ---------------------------------------------------------------------------
// build_curve
// ---------------------------------------------------------------------------

JordanCurve build_curve(const CurveSpec& spec) {
  auto data = std::make_shared<detail::CurveData>();
  data->spec = spec;
  data->raw = make_raw(spec);
  data->build_arc_length();

  const double l = data->length;
  std::size_t n_valid = 1024;
  if (spec.family == CurveFamily::points) n_valid = std::clamp<std::size_t>(8 * spec.xy.size(), 1024, 4096);
  if (spec.family == CurveFamily::polar_samples) {
    n_valid = std::clamp<std::size_t>(8 * spec.theta.size(), 1024, 4096);
  }
  std::vector<Point> pts(n_valid);
  for (std::size_t i = 0; i < n_valid; ++i) {
    pts[i] = data->position(l * static_cast<double>(i) / static_cast<double>(n_valid));
  }

  double area2 = 0.0;
  for (std::size_t i = 0; i < n_valid; ++i) area2 += cross(pts[i], pts[(i + 1) % n_valid]);
  if (!(area2 > 0.0)) {
    throw Error(ErrorCode::invalid_spec, "curve is not positively oriented");
  }

  double diam = 0.0;
  for (std::size_t i = 0; i < n_valid; ++i) {
    for (std::size_t j = i + 1; j < n_valid; ++j) diam = std::max(diam, std::abs(pts[i] - pts[j]));
  }
  data->diameter = diam;

  for (std::size_t i = 0; i < n_valid; ++i) {
    const Point p1 = pts[i], p2 = pts[(i + 1) % n_valid];
    for (std::size_t j = i + 2; j < n_valid; ++j) {
      if (i == 0 && j == n_valid - 1) continue;
      if (segments_cross(p1, p2, pts[j], pts[(j + 1) % n_valid])) {
        throw Error(ErrorCode::self_intersecting,
                    "segments " + std::to_string(i) + " and " + std::to_string(j) + " cross");
      }
    }
  }

  JordanCurve curve;
  curve.data_ = data;
  data->beta = turning_angle(curve);
  data->omega = modulus_of_continuity(curve, 1024);
  // The captured curve copies inside TurningAngle would form a reference
  // cycle; rebind them to a non-owning view of the same data.
  const detail::CurveData* raw_view = data.get();
  data->beta = TurningAngle(l, data->beta.table(), [raw_view](double s) { return raw_view->tangent(s); });
  return curve;
}

// ---------------------------------------------------------------------------
// Kernel and derived quantities
// ---------------------------------------------------------------------------

double kernel_K(const JordanCurve& curve, double s, double t) {
  const double l = curve.length();
  const double d = std::remainder(t - s, l);
  const Point ts = curve.tangent(s);
  if (std::abs(d) < 1e-3 * l) {
    // g(t) - g(s) projected on the normal, integrated along the short arc to
    // avoid cancellation between nearby positions.
    return quad::gauss_legendre10([&](double u) { return cross(ts, curve.tangent(u)); }, s, s + d);
  }
  const Point diff = curve.position(t) - curve.position(s);
  return (std::conj(diff) * Point(0.0, 1.0) * ts).real();
}

bool is_convex(const JordanCurve& curve, int grid_n) {
  if (grid_n < 64) throw Error(ErrorCode::invalid_params, "is_convex: grid_n must be >= 64");
  const double l = curve.length();
  const double tol = 1e-10 * curve.diameter() * curve.diameter();
  for (int i = 0; i < grid_n; ++i) {
    const double s = l * i / grid_n;
    for (int j = 0; j < grid_n; ++j) {
      if (kernel_K(curve, s, l * j / grid_n) < -tol) return false;
    }
  }
  return true;
}

bool turning_angle_monotone(const JordanCurve& curve, int grid_n, double tol) {
  const TurningAngle& beta = curve.turning();
  const double l = curve.length();
  double prev = beta(0.0);
  for (int i = 1; i <= grid_n; ++i) {
    const double cur = beta(l * i / grid_n);
    if (cur - prev < -tol) return false;
    prev = cur;
  }
  return true;
}

ModulusOfContinuity modulus_of_continuity(const JordanCurve& curve, int grid_n) {
  if (grid_n < 256) throw Error(ErrorCode::invalid_params, "modulus_of_continuity: grid_n must be >= 256");
  if (curve.source().family == CurveFamily::circle) {
    const double r = curve.source().radius;
    const double half = std::numbers::pi * r;
    auto omega = [r, half](double d) { return 2.0 * std::sin(std::min(d, half) / (2.0 * r)); };
    auto integral = [r, half](double x) {
      const double xc = std::min(x, half);
      // 4r (1 - cos(x/2r)), written without cancellation for small x.
      const double s = std::sin(xc / (4.0 * r));
      return 8.0 * r * s * s + 2.0 * std::max(0.0, x - half);
    };
    return ModulusOfContinuity::closed_form(omega, integral, 1.0 / r);
  }
  const double l = curve.length();
  std::vector<Point> tan(static_cast<std::size_t>(grid_n));
  for (int i = 0; i < grid_n; ++i) tan[static_cast<std::size_t>(i)] = curve.tangent(l * i / grid_n);
  const int half = grid_n / 2;
  std::vector<double> raw(static_cast<std::size_t>(half) + 1, 0.0);
  for (int m = 1; m <= half; ++m) {
    double best = 0.0;
    for (int i = 0; i < grid_n; ++i) {
      best = std::max(best, std::abs(tan[static_cast<std::size_t>((i + m) % grid_n)] -
                                     tan[static_cast<std::size_t>(i)]));
    }
    raw[static_cast<std::size_t>(m)] = best;
  }
  return ModulusOfContinuity::from_grid(l / grid_n, raw, kOmegaSafety);
}

DiniResult dini_integral(const ModulusOfContinuity& omega, double k, double rel_tol) {
  DiniResult out;
  double total = 0.0;
  double prev_inc = 0.0;
  auto integrand = [&](double t) { return omega(t) / t; };
  for (int j = 1; j <= 60; ++j) {
    const double a = std::ldexp(k, -j);
    const double inc = quad::adaptive(integrand, a, 2.0 * a, 1e-300, 1e-12).value;
    total += inc;
    out.levels = j;
    if (j >= 3 && prev_inc > 0.0) {
      const double ratio = inc / prev_inc;
      out.last_ratio = ratio;
      if (ratio < 1.0) {
        const double tail = inc * ratio / (1.0 - ratio);
        if (tail <= rel_tol * total) {
          out.convergent = true;
          out.value = total + tail;
          return out;
        }
      }
    }
    if (inc == 0.0 && j >= 3) {
      out.convergent = true;
      out.value = total;
      return out;
    }
    prev_inc = inc;
  }
  out.convergent = false;
  out.value = total;
  return out;
}

KernelBound kernel_bound_check(const JordanCurve& curve, const ModulusOfContinuity& omega, double s, double t) {
  const double l = curve.length();
  const double d = std::abs(std::remainder(t - s, l));
  KernelBound kb;
  kb.lhs = std::abs(kernel_K(curve, s, t));
  kb.rhs = omega.integral(std::min(d, l - d));
  kb.holds = kb.lhs <= kb.rhs + 1e-10;
  return kb;
}

}  // namespace hmcert
