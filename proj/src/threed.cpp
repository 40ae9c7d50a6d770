#include "alrlab/threed.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace alrlab {

namespace {

double ipow(double base, int exponent) {
  double out = 1.0;
  for (int i = 0; i < exponent; ++i) out *= base;
  return out;
}

double norm3(const Vec3& p) { return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]); }

void require_orders(int n, int m) {
  if (n < 0) throw std::invalid_argument("order n must be nonnegative");
  if (std::abs(m) > n) throw std::invalid_argument("azimuthal order must satisfy |m| <= n");
}

// Legendre coefficient arrays (index = power of t), built so the three-term
// numerator is combined before the single division; through the orders used
// here every quotient lands on an exactly representable value.
std::vector<double> legendre_coefficients(int n) {
  std::vector<double> prev{1.0};
  if (n == 0) return prev;
  std::vector<double> cur{0.0, 1.0};
  for (int k = 1; k < n; ++k) {
    std::vector<double> next(k + 2, 0.0);
    for (int j = 0; j <= k; ++j) {
      if (cur[j] != 0.0) next[j + 1] += (2.0 * k + 1.0) * cur[j];
    }
    for (int j = 0; j < k; ++j) {
      if (prev[j] != 0.0) next[j] -= k * prev[j];
    }
    for (double& c : next) c /= (k + 1.0);
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

// Assembles grad(S) x position for the order-(n, m) solid harmonic.
std::array<Poly3, 3> cross_family(int n, int m) {
  Poly3 s = solid_harmonic(n, m);
  std::array<Poly3, 3> grad{s.derivative(0), s.derivative(1), s.derivative(2)};
  std::array<Poly3, 3> pos{Poly3::variable(0), Poly3::variable(1), Poly3::variable(2)};
  std::array<Poly3, 3> w;
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3;
    int k = (i + 2) % 3;
    w[i] = grad[j] * pos[k] - grad[k] * pos[j];
  }
  return w;
}

Vec3 eval_vector(const std::array<Poly3, 3>& f, const Vec3& p) {
  return {f[0].eval(p), f[1].eval(p), f[2].eval(p)};
}

}  // namespace

Poly3 Poly3::constant(double c) {
  Poly3 p;
  p.add_term(0, 0, 0, c);
  return p;
}

Poly3 Poly3::variable(int axis) {
  if (axis < 0 || axis > 2) throw std::invalid_argument("axis must be 0, 1, or 2");
  Poly3 p;
  p.add_term(axis == 0 ? 1 : 0, axis == 1 ? 1 : 0, axis == 2 ? 1 : 0, 1.0);
  return p;
}

void Poly3::add_term(int px, int py, int pz, double c) {
  if (px < 0 || py < 0 || pz < 0) throw std::invalid_argument("monomial powers must be >= 0");
  if (c == 0.0) return;
  std::array<int, 3> key{px, py, pz};
  double& slot = terms_[key];
  slot += c;
  if (slot == 0.0) terms_.erase(key);
}

double Poly3::coefficient(int px, int py, int pz) const {
  auto it = terms_.find({px, py, pz});
  return it == terms_.end() ? 0.0 : it->second;
}

int Poly3::total_degree() const {
  int deg = 0;
  for (const auto& [pw, c] : terms_) deg = std::max(deg, pw[0] + pw[1] + pw[2]);
  return deg;
}

double Poly3::max_abs_coefficient() const {
  double out = 0.0;
  for (const auto& [pw, c] : terms_) out = std::max(out, std::abs(c));
  return out;
}

Poly3 Poly3::operator+(const Poly3& other) const {
  Poly3 out = *this;
  for (const auto& [pw, c] : other.terms_) out.add_term(pw[0], pw[1], pw[2], c);
  return out;
}

Poly3 Poly3::operator-(const Poly3& other) const {
  Poly3 out = *this;
  for (const auto& [pw, c] : other.terms_) out.add_term(pw[0], pw[1], pw[2], -c);
  return out;
}

Poly3 Poly3::operator*(const Poly3& other) const {
  Poly3 out;
  for (const auto& [pa, ca] : terms_)
    for (const auto& [pb, cb] : other.terms_)
      out.add_term(pa[0] + pb[0], pa[1] + pb[1], pa[2] + pb[2], ca * cb);
  return out;
}

Poly3 Poly3::scaled(double factor) const {
  Poly3 out;
  for (const auto& [pw, c] : terms_) out.add_term(pw[0], pw[1], pw[2], c * factor);
  return out;
}

Poly3 Poly3::derivative(int axis) const {
  if (axis < 0 || axis > 2) throw std::invalid_argument("axis must be 0, 1, or 2");
  Poly3 out;
  for (const auto& [pw, c] : terms_) {
    if (pw[axis] == 0) continue;
    std::array<int, 3> q = pw;
    --q[axis];
    out.add_term(q[0], q[1], q[2], c * pw[axis]);
  }
  return out;
}

double Poly3::eval(const Vec3& p) const {
  double out = 0.0;
  for (const auto& [pw, c] : terms_)
    out += c * ipow(p[0], pw[0]) * ipow(p[1], pw[1]) * ipow(p[2], pw[2]);
  return out;
}

Poly3 solid_harmonic(int n, int m) {
  require_orders(n, m);
  const int mu = std::abs(m);
  constexpr double kPi = 3.14159265358979323846;

  // mu-th derivative of the degree-n Legendre polynomial.
  std::vector<double> d = legendre_coefficients(n);
  for (int step = 0; step < mu; ++step) {
    std::vector<double> next(d.size() - 1, 0.0);
    for (size_t j = 1; j < d.size(); ++j) next[j - 1] = d[j] * static_cast<double>(j);
    d = std::move(next);
  }

  // Angular factor: Re/Im of (x + i y)^mu via the pair recurrence.
  Poly3 re = Poly3::constant(1.0);
  Poly3 im;
  Poly3 x = Poly3::variable(0);
  Poly3 y = Poly3::variable(1);
  for (int k = 0; k < mu; ++k) {
    Poly3 re_next = x * re - y * im;
    im = x * im + y * re;
    re = std::move(re_next);
  }
  Poly3 angular = (m >= 0) ? re : im;

  // z-and-radius factor: sum_j d_j z^j (x^2+y^2+z^2)^{(n-mu-j)/2}; the
  // surviving j share the parity of n - mu, so the exponent is integral.
  Poly3 r2;
  r2.add_term(2, 0, 0, 1.0);
  r2.add_term(0, 2, 0, 1.0);
  r2.add_term(0, 0, 2, 1.0);
  Poly3 radial;
  for (size_t j = 0; j < d.size(); ++j) {
    if (d[j] == 0.0) continue;
    int rest = n - mu - static_cast<int>(j);
    if (rest % 2 != 0) continue;
    Poly3 term = Poly3::constant(d[j]);
    for (int k = 0; k < static_cast<int>(j); ++k) term = term * Poly3::variable(2);
    for (int k = 0; k < rest / 2; ++k) term = term * r2;
    radial = radial + term;
  }

  double norm;
  if (mu == 0) {
    norm = std::sqrt((2.0 * n + 1.0) / (4.0 * kPi));
  } else {
    double ratio = 1.0;  // (n-mu)! / (n+mu)!
    for (int j = n - mu + 1; j <= n + mu; ++j) ratio /= static_cast<double>(j);
    norm = std::sqrt((2.0 * n + 1.0) / (2.0 * kPi) * ratio);
  }
  return (angular * radial).scaled(norm);
}

std::array<Poly3, 3> tangential_polynomials(int n, int m) {
  require_orders(n, m);
  return cross_family(n, m);
}

Vec3 eval_B(int n, int m, const Vec3& unit_point) {
  require_orders(n, m);
  double r = norm3(unit_point);
  if (std::abs(r - 1.0) > 1e-12)
    throw std::invalid_argument("sphere pattern wants a unit direction");
  if (n == 0) return {0.0, 0.0, 0.0};
  return eval_vector(cross_family(n, m), unit_point);
}

Vec3 SphericalModeField::eval(const Vec3& x) const {
  require_orders(n, m);
  double r = norm3(x);
  if (r == 0.0) throw std::invalid_argument("field is singular at the origin");
  Vec3 w = eval_vector(cross_family(n, m), x);
  if (kind == SphericalKind::MGrow) return w;
  double scale = std::pow(r, -2.0 * n - 1.0);
  return {scale * w[0], scale * w[1], scale * w[2]};
}

double conormal_first_component(const LameParameters& params, SphericalKind kind, int n, int m,
                                const Vec3& point) {
  require_orders(n, m);
  double r = norm3(point);
  if (r == 0.0) throw std::invalid_argument("no direction at the origin");
  if (n == 0) return 0.0;
  Vec3 nu{point[0] / r, point[1] / r, point[2] / r};

  std::array<Poly3, 3> w = cross_family(n, m);
  Vec3 b = eval_vector(w, nu);
  double radial_power =
      (kind == SphericalKind::MGrow) ? static_cast<double>(n) : static_cast<double>(-n - 1);

  double sum = 0.0;
  for (int j = 0; j < 3; ++j)
    sum += nu[j] * (radial_power * nu[0] * b[j] + w[j].derivative(0).eval(nu));
  return params.mu * (sum + radial_power * b[0]);
}

FitResult proportionality_fit(const std::vector<double>& base,
                              const std::vector<double>& target) {
  if (base.empty()) throw std::invalid_argument("fit needs at least one sample");
  if (base.size() != target.size())
    throw std::invalid_argument("base and target sample counts differ");
  double bb = 0.0, tb = 0.0, tt = 0.0;
  for (size_t i = 0; i < base.size(); ++i) {
    bb += base[i] * base[i];
    tb += target[i] * base[i];
    tt += target[i] * target[i];
  }
  FitResult out;
  out.degenerate = (bb == 0.0 || tt == 0.0);
  out.c = (bb > 0.0) ? tb / bb : 0.0;
  if (tt > 0.0) {
    double rr = 0.0;
    for (size_t i = 0; i < base.size(); ++i) {
      double d = target[i] - out.c * base[i];
      rr += d * d;
    }
    out.residual = std::clamp(std::sqrt(rr / tt), 0.0, 1.0);
  }
  return out;
}

ProportionalityReport proportionality_test(const LameParameters& params, int n, int m,
                                           const std::vector<Vec3>& points) {
  require_orders(n, m);
  if (n < 2) throw std::invalid_argument("proportionality question starts at order 2");
  if (points.empty()) throw std::invalid_argument("no sample points");

  std::vector<double> grow(points.size()), decay(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    double r = norm3(points[i]);
    if (r == 0.0) throw std::invalid_argument("no direction at the origin");
    Vec3 dir{points[i][0] / r, points[i][1] / r, points[i][2] / r};
    // Tractions are homogeneous of degree n-1 (growing) and -n-2 (decaying),
    // so unit-sphere values carry to radius r by the matching power.
    grow[i] = ipow(r, n - 1) * conormal_first_component(params, SphericalKind::MGrow, n, m, dir);
    decay[i] =
        std::pow(r, -n - 2.0) * conormal_first_component(params, SphericalKind::NDecay, n, m, dir);
  }
  FitResult fit = proportionality_fit(grow, decay);

  ProportionalityReport report;
  report.n = n;
  report.m = m;
  report.best_fit_c = fit.c;
  report.relative_residual = fit.residual;
  report.samples = static_cast<int>(points.size());
  report.degenerate = fit.degenerate;
  return report;
}

ProportionalityReport proportionality_test(const LameParameters& params, int n, int m,
                                           int sample_count) {
  if (sample_count < 20) throw std::invalid_argument("need at least 20 samples");
  int per_shell = (sample_count + 2) / 3;
  constexpr double kGoldenAngle = 2.39996322972865332;  // pi (3 - sqrt 5)
  std::vector<Vec3> points;
  points.reserve(3 * per_shell);
  for (double radius : {0.5, 1.0, 2.0}) {
    for (int i = 0; i < per_shell; ++i) {
      double z = 1.0 - (2.0 * i + 1.0) / per_shell;
      double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      double phi = kGoldenAngle * i;
      points.push_back({radius * rho * std::cos(phi), radius * rho * std::sin(phi), radius * z});
    }
  }
  return proportionality_test(params, n, m, points);
}

double multiplet_residual(const LameParameters& params, int n,
                          const std::vector<Vec3>& points) {
  if (n < 2) throw std::invalid_argument("proportionality question starts at order 2");
  if (points.empty()) throw std::invalid_argument("no sample points");
  std::vector<double> grow, decay;
  grow.reserve((2 * n + 1) * points.size());
  decay.reserve((2 * n + 1) * points.size());
  for (int m = -n; m <= n; ++m) {
    for (const Vec3& p : points) {
      double r = norm3(p);
      if (r == 0.0) throw std::invalid_argument("no direction at the origin");
      Vec3 dir{p[0] / r, p[1] / r, p[2] / r};
      grow.push_back(ipow(r, n - 1) *
                     conormal_first_component(params, SphericalKind::MGrow, n, m, dir));
      decay.push_back(std::pow(r, -n - 2.0) *
                      conormal_first_component(params, SphericalKind::NDecay, n, m, dir));
    }
  }
  return proportionality_fit(grow, decay).residual;
}

Vec3 eval_aux(int n, int m, AuxKind kind, const Vec3& x) {
  require_orders(n, m);
  double r = norm3(x);
  bool decaying = (kind == AuxKind::CurlDecay || kind == AuxKind::GradDecay);
  if (decaying && r == 0.0) throw std::invalid_argument("field is singular at the origin");

  Poly3 s = solid_harmonic(n, m);
  if (kind == AuxKind::GradGrow || kind == AuxKind::GradDecay) {
    Vec3 grad{s.derivative(0).eval(x), s.derivative(1).eval(x), s.derivative(2).eval(x)};
    if (kind == AuxKind::GradGrow) return grad;
    double a = std::pow(r, -2.0 * n - 1.0);
    double b = (2.0 * n + 1.0) * std::pow(r, -2.0 * n - 3.0) * s.eval(x);
    return {a * grad[0] - b * x[0], a * grad[1] - b * x[1], a * grad[2] - b * x[2]};
  }

  std::array<Poly3, 3> w = cross_family(n, m);
  std::array<Poly3, 3> curl;
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3;
    int k = (i + 2) % 3;
    curl[i] = w[k].derivative(j) - w[j].derivative(k);
  }
  Vec3 c = eval_vector(curl, x);
  if (kind == AuxKind::CurlGrow) return c;
  Vec3 wx = eval_vector(w, x);
  Vec3 cross{x[1] * wx[2] - x[2] * wx[1], x[2] * wx[0] - x[0] * wx[2],
             x[0] * wx[1] - x[1] * wx[0]};
  double a = std::pow(r, -2.0 * n - 1.0);
  double b = (2.0 * n + 1.0) * std::pow(r, -2.0 * n - 3.0);
  return {a * c[0] - b * cross[0], a * c[1] - b * cross[1], a * c[2] - b * cross[2]};
}

}  // namespace alrlab
