#include "alrlab/waves.hpp"

#include <cmath>
#include <stdexcept>

namespace alrlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}  // namespace

PiecewiseModeField perfect_wave(int k, double R, const LameParameters& params,
                                WaveVariant variant) {
  require_convex(params, 2);
  if (!(R > 0.0)) throw std::invalid_argument("perfect_wave: R must be positive");
  const int k_min = variant == WaveVariant::ShellInside ? 2 : 1;
  if (k < k_min) throw std::invalid_argument("perfect_wave: order below the variant's minimum");

  const double alpha = plasmon_alpha(params).alpha;
  const double R2k = std::pow(R, 2 * k);

  PiecewiseModeField f = PiecewiseModeField::over({R});
  f.k = k;
  if (variant == WaveVariant::ShellOutside) {
    f.family = WaveFamily::F2;
    f.add_pattern(0, 1.0, k, -k);
    f.add_pattern(1, R2k, -k, -k);
    f.add_pattern(1, k * alpha * R2k, -k, k + 2);
    f.add_pattern(1, -k * alpha * R2k * R * R, -(k + 2), k + 2);
  } else {
    f.family = WaveFamily::F1;
    f.add_pattern(0, 1.0, k, k);
    f.add_pattern(0, -k * alpha, k, -(k - 2));
    f.add_pattern(0, k * alpha * R * R, k - 2, -(k - 2));
    f.add_pattern(1, R2k, -k, k);
  }
  validate_mode_structure(f);
  return f;
}

double perfect_wave_energy(int k, double R, const LameParameters& params) {
  require_convex(params, 2);
  if (k < 1) throw std::invalid_argument("perfect_wave_energy: k must be >= 1");
  if (!(R > 0.0)) throw std::invalid_argument("perfect_wave_energy: R must be positive");
  const double l = params.lambda, m = params.mu;
  return 8.0 * k * kPi * m * (l + 2.0 * m) / (l + 3.0 * m) * std::pow(R, 2 * k);
}

JumpConstants jump_constants(const LameParameters& params, double q, double R) {
  require_convex(params, 2);
  if (!(q > 0.0) || !(R >= 0.0))
    throw std::invalid_argument("jump_constants: radii must be positive");
  const double l = params.lambda, m = params.mu;
  const double alpha = plasmon_alpha(params).alpha;
  JumpConstants c;
  c.c1 = alpha * (R * R - q * q) / (q * q * q * q);
  c.c2 = 4.0 * m * (l + 2.0 * m) / (std::pow(q, 3) * (l + 3.0 * m) * (l + 3.0 * m));
  c.c3 = -(l + 3.0 * m);
  c.c4 = (l + m) * (q * q - R * R);
  c.c5 = -4.0 * m * (l + 2.0 * m) / (std::pow(q, 3) * (l + 3.0 * m));
  return c;
}

PiecewiseModeField base_v_hat(int k, double R, double q, const LameParameters& params) {
  require_convex(params, 2);
  if (k < 3) throw std::invalid_argument("base_v_hat: defined for k >= 3 only");
  if (!(1.0 < R && R < q)) throw std::invalid_argument("base_v_hat: requires 1 < R < q");

  const double alpha = plasmon_alpha(params).alpha;
  const double c1 = alpha * (R * R - q * q) / (q * q * q * q);
  const double Rm2k = std::pow(R, -2 * k);
  const double Q = std::pow(q / R, 2 * k);

  PiecewiseModeField f = PiecewiseModeField::over({1.0, R, q});
  f.k = k;
  f.family = WaveFamily::F1;

  // r <= 1: regular order-k part plus the (r^2 - 1)-weighted order-(k-2) tail.
  f.add_pattern(0, 1.0, k, k);
  f.add_pattern(0, -k * alpha, k, -(k - 2));
  f.add_pattern(0, k * alpha, k - 2, -(k - 2));

  // 1 < r <= R: pure decaying order-k mode.
  f.add_pattern(1, 1.0, -k, k);

  // R < r <= q: the r <= 1 structure transplanted to radius R, scaled down.
  f.add_pattern(2, Rm2k, k, k);
  f.add_pattern(2, -k * alpha * Rm2k, k, -(k - 2));
  f.add_pattern(2, k * alpha * R * R * Rm2k, k - 2, -(k - 2));

  // r > q: decaying pair; the (r^2 - q^2)-weighted part vanishes at r = q.
  f.add_pattern(3, Q * (1.0 - c1 * k * (k - 2) * alpha * q * q), -k, k);
  f.add_pattern(3, Q * c1 * k * (k - 2) * alpha, -(k - 2), k);
  f.add_pattern(3, Q * c1 * k, -(k - 2), -(k - 2));

  validate_mode_structure(f);
  return f;
}

PiecewiseModeField base_V_hat(int k, double R, double q, const LameParameters& params) {
  require_convex(params, 2);
  if (k < 3) throw std::invalid_argument("base_V_hat: defined for k >= 3 only");
  if (!(0.0 < R && R < q)) throw std::invalid_argument("base_V_hat: requires 0 < R < q");

  const double alpha = plasmon_alpha(params).alpha;
  const JumpConstants c = jump_constants(params, q, R);
  const double qk2 = std::pow(q, 2 * (k - 2));

  PiecewiseModeField f = PiecewiseModeField::over({q});
  f.k = k;
  f.family = WaveFamily::F1;

  // r <= q
  f.add_pattern(0, c.c3 / k, k, k);
  f.add_pattern(0, -c.c3 * alpha, k, -(k - 2));
  f.add_pattern(0, c.c3 * alpha * q * q + c.c4, k - 2, -(k - 2));

  // r > q
  f.add_pattern(1, c.c4 * qk2, -(k - 2), -(k - 2));
  f.add_pattern(1, c.c4 * qk2 * (k - 2) * alpha, -(k - 2), k);
  f.add_pattern(1, (c.c3 / k) * qk2 * q * q * q * q - c.c4 * qk2 * (k - 2) * alpha * q * q, -k, k);

  validate_mode_structure(f);
  return f;
}

double source_coefficient_relation(const LameParameters& params, double q, double R, int k) {
  require_convex(params, 2);
  if (k < 3) throw std::invalid_argument("source_coefficient_relation: defined for k >= 3 only");
  if (!(q > R)) throw std::invalid_argument("source_coefficient_relation: requires q > R");
  const double l = params.lambda, m = params.mu;
  return -q * q * (l + 3.0 * m) / ((k - 2) * (l + m) * (q * q - R * R));
}

double tau_k_primal(double beta_k, const LameParameters& params, double q, double R, int k) {
  if (k < 3) throw std::invalid_argument("tau_k_primal: defined for k >= 3 only");
  const JumpConstants c = jump_constants(params, q, R);
  const double l = params.lambda, m = params.mu;
  return beta_k * std::pow(q, -k) * std::pow(R, 2 * k) /
         (-c.c2 * k * q * q * (l + 3.0 * m));
}

double tau_k_high(double beta_k, const LameParameters& params, double q, int k) {
  if (k < 3) throw std::invalid_argument("tau_k_high: defined for k >= 3 only");
  const JumpConstants c = jump_constants(params, q, 0.0);
  const double l = params.lambda, m = params.mu;
  return beta_k * std::pow(q, -k) / (-c.c5 * q * q * (l + 3.0 * m));
}

AngularFunction traction_jump(const LameParameters& params, const PiecewiseModeField& f,
                              double r, Complex outer_scale, Complex inner_scale) {
  AngularFunction out = conormal(params, f, r, Side::Outer, outer_scale);
  out.accumulate(conormal(params, f, r, Side::Inner, inner_scale), -1.0);
  return out;
}

}  // namespace alrlab
