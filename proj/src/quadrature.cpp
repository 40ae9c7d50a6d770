#include "alrlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace alrlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Quadrature1D gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  Quadrature1D q;
  q.x.assign(n, 0.0);
  q.w.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double deriv = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      deriv = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / deriv;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.x[i] = -x;
    q.x[n - 1 - i] = x;
    q.w[i] = q.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * deriv * deriv);
  }
  return q;
}

Quadrature1D gauss_legendre(int n, double a, double b) {
  Quadrature1D q = gauss_legendre(n);
  const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    q.x[i] = mid + rad * q.x[i];
    q.w[i] *= rad;
  }
  return q;
}

std::array<std::array<Complex, 2>, 2> fd_gradient(const PiecewiseModeField& f,
                                                  double x1, double x2, double h) {
  auto diff = [&](int axis) {
    const double d1 = (axis == 0) ? 1.0 : 0.0;
    const double d2 = 1.0 - d1;
    const auto fp2 = evaluate_xy(f, x1 + 2 * h * d1, x2 + 2 * h * d2);
    const auto fp1 = evaluate_xy(f, x1 + h * d1, x2 + h * d2);
    const auto fm1 = evaluate_xy(f, x1 - h * d1, x2 - h * d2);
    const auto fm2 = evaluate_xy(f, x1 - 2 * h * d1, x2 - 2 * h * d2);
    std::array<Complex, 2> out;
    for (int i = 0; i < 2; ++i)
      out[i] = (-fp2[i] + 8.0 * fp1[i] - 8.0 * fm1[i] + fm2[i]) / (12.0 * h);
    return out;
  };
  const auto dx = diff(0);
  const auto dy = diff(1);
  return {{{dx[0], dy[0]}, {dx[1], dy[1]}}};
}

std::array<Complex, 2> fd_lame_apply(const LameParameters& params, const PiecewiseModeField& f,
                                     double x1, double x2, double h) {
  auto second = [&](int axis) {
    const double d1 = (axis == 0) ? 1.0 : 0.0;
    const double d2 = 1.0 - d1;
    const auto fp2 = evaluate_xy(f, x1 + 2 * h * d1, x2 + 2 * h * d2);
    const auto fp1 = evaluate_xy(f, x1 + h * d1, x2 + h * d2);
    const auto f0 = evaluate_xy(f, x1, x2);
    const auto fm1 = evaluate_xy(f, x1 - h * d1, x2 - h * d2);
    const auto fm2 = evaluate_xy(f, x1 - 2 * h * d1, x2 - 2 * h * d2);
    std::array<Complex, 2> out;
    for (int i = 0; i < 2; ++i)
      out[i] = (-fp2[i] + 16.0 * fp1[i] - 30.0 * f0[i] + 16.0 * fm1[i] - fm2[i]) / (12.0 * h * h);
    return out;
  };
  // d/dx of the y-derivative, both stencils fourth order
  auto cross = [&]() {
    auto dy_at = [&](double xx) {
      const auto fp2 = evaluate_xy(f, xx, x2 + 2 * h);
      const auto fp1 = evaluate_xy(f, xx, x2 + h);
      const auto fm1 = evaluate_xy(f, xx, x2 - h);
      const auto fm2 = evaluate_xy(f, xx, x2 - 2 * h);
      std::array<Complex, 2> out;
      for (int i = 0; i < 2; ++i)
        out[i] = (-fp2[i] + 8.0 * fp1[i] - 8.0 * fm1[i] + fm2[i]) / (12.0 * h);
      return out;
    };
    const auto gp2 = dy_at(x1 + 2 * h);
    const auto gp1 = dy_at(x1 + h);
    const auto gm1 = dy_at(x1 - h);
    const auto gm2 = dy_at(x1 - 2 * h);
    std::array<Complex, 2> out;
    for (int i = 0; i < 2; ++i)
      out[i] = (-gp2[i] + 8.0 * gp1[i] - 8.0 * gm1[i] + gm2[i]) / (12.0 * h);
    return out;
  };
  const auto uxx = second(0);
  const auto uyy = second(1);
  const auto uxy = cross();
  const double lm = params.lambda + params.mu;
  std::array<Complex, 2> out;
  out[0] = params.mu * (uxx[0] + uyy[0]) + lm * (uxx[0] + uxy[1]);
  out[1] = params.mu * (uxx[1] + uyy[1]) + lm * (uxy[0] + uyy[1]);
  return out;
}

namespace {

// lambda div_u conj(div_v) + 2 mu sym(gu) : conj(sym(gv)), from gradients
Complex energy_integrand(const LameParameters& params,
                         const std::array<std::array<Complex, 2>, 2>& gu,
                         const std::array<std::array<Complex, 2>, 2>& gv,
                         bool conjugate_v) {
  auto cv = [&](Complex z) { return conjugate_v ? std::conj(z) : z; };
  const Complex div_u = gu[0][0] + gu[1][1];
  const Complex div_v = gv[0][0] + gv[1][1];
  Complex strain = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const Complex eu = 0.5 * (gu[i][j] + gu[j][i]);
      const Complex ev = 0.5 * (gv[i][j] + gv[j][i]);
      strain += eu * cv(ev);
    }
  return params.lambda * div_u * cv(div_v) + 2.0 * params.mu * strain;
}

double gap_to_breaks(double r, const std::vector<double>& breaks) {
  double gap = kInf;
  for (double b : breaks) gap = std::min(gap, std::abs(r - b));
  return gap;
}

}  // namespace

Complex bilinear_P_quadrature(const LameParameters& params, const PiecewiseModeField& u,
                              const PiecewiseModeField& v, double r_lo, double r_hi,
                              int n_radial, int n_angular) {
  std::vector<double> breaks = u.breakpoints();
  for (double b : v.breakpoints()) breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());

  std::vector<double> cuts{r_lo};
  for (double b : breaks) {
    if (!(b > r_lo * (1 + 1e-12)) || !(b < r_hi * (1 - 1e-12))) continue;
    if (std::abs(b - cuts.back()) <= 1e-12 * std::max(1.0, b)) continue;  // dedupe
    cuts.push_back(b);
  }
  const bool unbounded = std::isinf(r_hi);
  if (!unbounded) cuts.push_back(r_hi);

  const double dtheta = 2.0 * kPi / n_angular;
  Complex acc(0.0);

  auto add_node = [&](double r, double jacobian_weight) {
    const double h = std::min(1e-3 * std::max(1.0, r), 0.25 * gap_to_breaks(r, breaks));
    for (int j = 0; j < n_angular; ++j) {
      const double th = dtheta * j;
      const double x1 = r * std::cos(th), x2 = r * std::sin(th);
      const auto gu = fd_gradient(u, x1, x2, h);
      const auto gv = fd_gradient(v, x1, x2, h);
      acc += jacobian_weight * dtheta * r * energy_integrand(params, gu, gv, true);
    }
  };

  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const Quadrature1D q = gauss_legendre(n_radial, cuts[s], cuts[s + 1]);
    for (int i = 0; i < n_radial; ++i) add_node(q.x[i], q.w[i]);
  }
  if (unbounded) {
    const double b = cuts.back();
    const Quadrature1D q = gauss_legendre(n_radial, 0.0, 1.0);
    for (int i = 0; i < n_radial; ++i) {
      const double s = q.x[i];
      add_node(b / s, q.w[i] * b / (s * s));
    }
  }
  return acc;
}

double green_identity_residual(const LameParameters& params, const PiecewiseModeField& u,
                               const PiecewiseModeField& v, double disk_radius) {
  const double R = disk_radius;
  const double h1 = 1e-3 * std::max(1.0, R);
  const double h2 = 2e-3 * std::max(1.0, R);

  const int n_circ = 512;
  Complex circle(0.0);
  for (int j = 0; j < n_circ; ++j) {
    const double th = 2.0 * kPi * j / n_circ;
    const double n1 = std::cos(th), n2 = std::sin(th);
    const double x1 = R * n1, x2 = R * n2;
    const auto g = fd_gradient(u, x1, x2, h1);
    const Complex div_u = g[0][0] + g[1][1];
    const std::array<double, 2> nu{n1, n2};
    std::array<Complex, 2> t;
    for (int i = 0; i < 2; ++i) {
      t[i] = params.lambda * div_u * nu[i];
      for (int l = 0; l < 2; ++l) t[i] += params.mu * (g[i][l] + g[l][i]) * nu[l];
    }
    const auto vv = evaluate_xy(v, x1, x2);
    circle += (2.0 * kPi * R / n_circ) * (vv[0] * t[0] + vv[1] * t[1]);
  }

  const int n_rad = 48, n_ang = 256;
  const Quadrature1D qr = gauss_legendre(n_rad, 0.0, R);
  Complex volume(0.0), pairing(0.0);
  for (int i = 0; i < n_rad; ++i) {
    const double r = qr.x[i];
    for (int j = 0; j < n_ang; ++j) {
      const double th = 2.0 * kPi * j / n_ang;
      const double x1 = r * std::cos(th), x2 = r * std::sin(th);
      const double w = qr.w[i] * (2.0 * kPi / n_ang) * r;
      const auto lu = fd_lame_apply(params, u, x1, x2, h2);
      const auto vv = evaluate_xy(v, x1, x2);
      volume += w * (vv[0] * lu[0] + vv[1] * lu[1]);
      const auto gu = fd_gradient(u, x1, x2, h1);
      const auto gv = fd_gradient(v, x1, x2, h1);
      pairing += w * energy_integrand(params, gu, gv, false);
    }
  }
  return std::abs(circle - volume - pairing);
}

}  // namespace alrlab
