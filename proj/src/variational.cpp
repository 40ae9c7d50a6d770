#include "alrlab/variational.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace alrlab {
namespace {

void check_loss(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("loss parameter must be positive and finite");
}

void check_unit_interval_loss(double delta) {
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::invalid_argument("loss parameter must lie in (0, 1)");
}

double p_energy(const LameParameters& params, const PiecewiseModeField& f) {
  return f.pieces.empty() ? 0.0 : bilinear_P(params, f, f).real();
}

PiecewiseModeField scaled(const PiecewiseModeField& f, Complex s) {
  PiecewiseModeField g = f;
  g.scale(s);
  return g;
}

/// Real amplitude of the region whose closure touches r from below / above.
double amplitude_inside(const RadialProfile& pr, double r) {
  if (pr.has_core() && r <= pr.core_radius) return pr.core_amplitude;
  if (r <= pr.shell_radius) return pr.shell_amplitude;
  return pr.matrix_amplitude;
}

double amplitude_outside(const RadialProfile& pr, double r) {
  if (pr.has_core() && r < pr.core_radius) return pr.core_amplitude;
  if (r < pr.shell_radius) return pr.shell_amplitude;
  return pr.matrix_amplitude;
}

/// Circles where any of the given fields can jump, merged with the base
/// radii and deduplicated.
std::vector<double> gather_circles(std::vector<double> base,
                                   std::initializer_list<const PiecewiseModeField*> fields) {
  for (const PiecewiseModeField* f : fields)
    if (!f->pieces.empty())
      for (double b : f->breakpoints()) base.push_back(b);
  std::sort(base.begin(), base.end());
  std::vector<double> out;
  for (double r : base)
    if (out.empty() || r > out.back() * (1.0 + 1e-12)) out.push_back(r);
  return out;
}

AngularFunction weighted_jump(const RadialProfile& pr, const LameParameters& params,
                              const PiecewiseModeField& f, double r) {
  AngularFunction g;
  if (f.pieces.empty()) return g;
  g.accumulate(conormal(params, f, r, Side::Outer), amplitude_outside(pr, r));
  g.accumulate(conormal(params, f, r, Side::Inner), -amplitude_inside(pr, r));
  return g;
}

AngularFunction plain_jump(const LameParameters& params, const PiecewiseModeField& f,
                           double r) {
  AngularFunction g;
  if (f.pieces.empty()) return g;
  g.accumulate(conormal(params, f, r, Side::Outer));
  g.accumulate(conormal(params, f, r, Side::Inner), -1.0);
  return g;
}

void check_annulus(double R, double q) {
  if (!(R > 1.0) || !std::isfinite(R))
    throw std::invalid_argument("shell radius must exceed the unit core");
  if (!(q > R) || !std::isfinite(q))
    throw std::invalid_argument("source circle must lie outside the shell");
}

}  // namespace

double primal_I(double delta, const PrimalPair& pair, const LameParameters& params) {
  require_convex(params, 2);
  check_loss(delta);
  return 0.5 * delta * p_energy(params, pair.v) +
         0.5 / delta * p_energy(params, pair.w);
}

double dual_J(double delta, const SourceSpectrum& source, const DualPair& pair,
              const LameParameters& params) {
  require_convex(params, 2);
  check_loss(delta);
  double drive = 0.0;
  if (!pair.psi.pieces.empty() && !source.empty())
    drive = circle_dot(spectrum_density(source), trace(pair.psi, source.q, Side::Inner),
                       source.q)
                .real();
  return drive - 0.5 * delta * p_energy(params, pair.v) -
         0.5 * delta * p_energy(params, pair.psi);
}

double primal_constraint_residual(const RadialProfile& profile, const LameParameters& params,
                                  const SourceSpectrum& source, const PiecewiseModeField& v,
                                  const PiecewiseModeField& w) {
  require_valid(profile);
  require_convex(params, 2);
  std::vector<double> base = {profile.shell_radius, source.q};
  if (profile.has_core()) base.push_back(profile.core_radius);
  const AngularFunction f = spectrum_density(source);
  double total = 0.0;
  for (double r : gather_circles(std::move(base), {&v, &w})) {
    AngularFunction gap = weighted_jump(profile, params, v, r);
    gap.accumulate(plain_jump(params, w, r), -1.0);
    if (std::abs(r - source.q) <= 1e-12 * source.q) gap.accumulate(f, -1.0);
    total += gap.max_abs();
  }
  return total;
}

double dual_constraint_residual(const RadialProfile& profile, const LameParameters& params,
                                double delta, const PiecewiseModeField& v,
                                const PiecewiseModeField& psi) {
  require_valid(profile);
  require_convex(params, 2);
  check_loss(delta);
  std::vector<double> base = {profile.shell_radius};
  if (profile.has_core()) base.push_back(profile.core_radius);
  double total = 0.0;
  for (double r : gather_circles(std::move(base), {&v, &psi})) {
    AngularFunction gap = weighted_jump(profile, params, psi, r);
    gap.accumulate(plain_jump(params, v, r), delta);
    total += gap.max_abs();
  }
  return total;
}

SandwichReport sandwich_check(double energy, double primal_value, double dual_value,
                              double tol) {
  if (!(tol >= 0.0) || !std::isfinite(tol))
    throw std::invalid_argument("sandwich tolerance must be nonnegative");
  SandwichReport rep;
  rep.energy = energy;
  rep.upper = primal_value;
  rep.lower = dual_value;
  rep.tolerance = tol;
  rep.lower_margin = energy - (dual_value - tol);
  rep.upper_margin = (primal_value + tol) - energy;
  rep.ok = rep.lower_margin >= 0.0 && rep.upper_margin >= 0.0;
  return rep;
}

namespace {

void check_selector_args(double R, double delta) {
  if (!(R > 1.0) || !std::isfinite(R))
    throw std::invalid_argument("selector needs a radius greater than one");
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::invalid_argument("selector needs a loss in (0, 1)");
}

}  // namespace

int select_k_delta(double R, double delta) {
  check_selector_args(R, delta);
  int k = std::max(1, static_cast<int>(std::floor(std::log(1.0 / delta) / std::log(R))) - 1);
  while (!(std::pow(R, -k) < delta)) ++k;
  while (k > 1 && std::pow(R, -(k - 1)) < delta) --k;
  if (!(std::pow(R, -(k - 1)) >= delta))
    throw std::logic_error("selected order lost minimality");
  return k;
}

int select_k_star(double R, double delta) {
  check_selector_args(R, delta);
  int k = std::max(1, static_cast<int>(std::floor(std::log(1.0 / delta) / std::log(R))) - 1);
  while (!(std::pow(R, k) >= 1.0 / delta)) ++k;
  while (k > 1 && std::pow(R, k - 1) >= 1.0 / delta) --k;
  if (!(delta <= std::pow(R, -(k - 1))))
    throw std::logic_error("selected order lost minimality");
  return k;
}

DualPair nocore_dual_trial(int k, double tau, const LameParameters& params, double R) {
  require_convex(params, 2);
  if (k < 1) throw std::invalid_argument("wave order must be positive");
  if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("radius must be positive");
  if (!std::isfinite(tau)) throw std::invalid_argument("wave multiple must be finite");
  DualPair pair;
  pair.psi = scaled(perfect_wave(k, R, params, WaveVariant::ShellOutside), tau);
  pair.psi.normalize();
  // The wave's amplitude-weighted flux is continuous by construction and v
  // vanishes, so the constraint holds identically.
  pair.constraint_residual = 0.0;
  return pair;
}

double nocore_optimal_tau(int k, double gamma_k, double delta, const LameParameters& params,
                          double R, double q) {
  require_convex(params, 2);
  check_loss(delta);
  if (k < 1) throw std::invalid_argument("wave order must be positive");
  if (!(q > R) || !(R > 0.0)) throw std::invalid_argument("need 0 < R < q");
  // drive coefficient of tau in dual_J, over the curvature of the tau^2 term
  const double pi = 3.14159265358979323846;
  const double drive = 2.0 * pi * q * gamma_k * std::pow(q, -k) * std::pow(R, 2 * k);
  return drive / (delta * perfect_wave_energy(k, R, params));
}

double core_trial_tau(int k, double gamma_k, double R, double q) {
  if (k < 1) throw std::invalid_argument("wave order must be positive");
  check_annulus(R, q);
  return gamma_k * std::pow(R / q, k) / (2.0 * k);
}

CoreDualTrial core_dual_trial(double delta, const LameParameters& params, double R, double q,
                              const std::vector<double>& gamma) {
  require_convex(params, 2);
  check_unit_interval_loss(delta);
  check_annulus(R, q);

  CoreDualTrial trial;
  trial.k_delta = select_k_delta(R, delta);
  const double gk =
      trial.k_delta < static_cast<int>(gamma.size()) ? gamma[trial.k_delta] : 0.0;
  trial.growth_bound = gk * gk * std::pow(R * R * R / (q * q), trial.k_delta) / trial.k_delta;
  if (gk == 0.0) {
    trial.degenerate = true;
    return trial;
  }

  SourceSpectrum source;
  source.q = q;
  for (int k = 1; k < static_cast<int>(gamma.size()); ++k)
    if (gamma[k] != 0.0) source.set_gamma(k, gamma[k]);

  // Unit building blocks: the order-k_delta wave, and the decaying field
  // cancelling the wave's amplitude-weighted flux mismatch on the core
  // circle. The final pair scales them by tau and tau/delta.
  const PiecewiseModeField wave =
      perfect_wave(trial.k_delta, R, params, WaveVariant::ShellOutside);
  const double shell = plasmon_constant(params, PlasmonFamily::ShearFamily);
  AngularFunction mismatch;
  mismatch.accumulate(conormal(params, wave, 1.0), shell - 1.0);
  AngularFunction cancel;
  cancel.accumulate(mismatch, -1.0);
  const PiecewiseModeField counter = freespace_traction_solve(params, {{1.0, cancel}});

  // The value is an exact quadratic in the wave multiple; use its maximizer.
  const double drive =
      circle_dot(spectrum_density(source), trace(wave, q, Side::Inner), q).real();
  const double curvature = 0.5 / delta * p_energy(params, counter) +
                           0.5 * delta * p_energy(params, wave);
  trial.tau = curvature > 0.0 ? drive / (2.0 * curvature) : 0.0;

  trial.pair.psi = scaled(wave, trial.tau);
  trial.pair.v = scaled(counter, trial.tau / delta);
  const RadialProfile profile = RadialProfile::with_core(1.0, R, 1.0, shell, delta);
  trial.pair.constraint_residual =
      dual_constraint_residual(profile, params, delta, trial.pair.v, trial.pair.psi);
  trial.value = dual_J(delta, source, trial.pair, params);
  return trial;
}

SourceSpectrum make_nonresonant_source(const LameParameters& params, double q, double R,
                                       const std::vector<double>& beta) {
  require_convex(params, 2);
  check_annulus(R, q);
  for (int k : {0, 1, 2})
    if (k < static_cast<int>(beta.size()) && beta[k] != 0.0)
      throw std::invalid_argument("the two lowest orders admit no matched wave");

  SourceSpectrum source;
  source.q = q;
  for (int k = 3; k < static_cast<int>(beta.size()); ++k) {
    if (beta[k] == 0.0) continue;
    const double relation = source_coefficient_relation(params, q, R, k);
    if (!(std::abs(relation) > 0.0) || !std::isfinite(relation))
      throw std::invalid_argument("degenerate coefficient relation at this geometry");
    source.set_beta(k, beta[k]);
    source.set_gamma(k - 2, beta[k] / relation);
  }
  return source;
}

NonresonantPrimalTrial nonresonant_primal_trial(double delta, const LameParameters& params,
                                                double R, double q,
                                                const std::vector<double>& beta) {
  check_unit_interval_loss(delta);
  const SourceSpectrum source = make_nonresonant_source(params, q, R, beta);

  NonresonantPrimalTrial trial;
  trial.k_star = select_k_star(R, delta);
  const double shell = plasmon_constant(params, PlasmonFamily::ShearFamily);

  PiecewiseModeField v;
  AngularFunction core_density;
  AngularFunction shell_density;
  bool any_high = false;
  for (int k = 3; k < static_cast<int>(beta.size()); ++k) {
    if (beta[k] == 0.0) continue;
    if (k <= trial.k_star) {
      const PiecewiseModeField matched = base_v_hat(k, R, q, params);
      const double tau = tau_k_primal(beta[k], params, q, R, k);
      if (v.pieces.empty())
        v = scaled(matched, tau);
      else
        v.accumulate(matched, tau);
    } else {
      const PiecewiseModeField truncated = base_V_hat(k, R, q, params);
      const double tau = tau_k_high(beta[k], params, q, k);
      if (v.pieces.empty())
        v = scaled(truncated, tau);
      else
        v.accumulate(truncated, tau);
      core_density.accumulate(
          traction_jump(params, truncated, 1.0, Complex(shell), Complex(1.0)), tau);
      shell_density.accumulate(
          traction_jump(params, truncated, R, Complex(1.0), Complex(shell)), tau);
      any_high = true;
    }
  }
  v.normalize();

  PiecewiseModeField w;
  if (any_high)
    w = freespace_traction_solve(params, {{1.0, core_density}, {R, shell_density}});

  trial.pair.v = std::move(v);
  trial.pair.w = std::move(w);
  const RadialProfile profile = RadialProfile::with_core(1.0, R, 1.0, shell, delta);
  trial.pair.constraint_residual =
      primal_constraint_residual(profile, params, source, trial.pair.v, trial.pair.w);
  trial.value = primal_I(delta, trial.pair, params);
  return trial;
}

PrimalPair solution_primal_pair(const RadialProfile& profile, const LameParameters& params,
                                const SourceSpectrum& source) {
  require_valid(profile);
  require_convex(params, 2);
  check_loss(profile.delta);

  PrimalPair pair;
  if (source.empty()) return pair;

  PiecewiseModeField field;
  const int K = source.max_k();
  for (int k = 1; k <= K; ++k) {
    for (WaveFamily family :
         {WaveFamily::F1, WaveFamily::F2, WaveFamily::F3, WaveFamily::F4}) {
      double amplitude = 0.0;
      switch (family) {
        case WaveFamily::F1: amplitude = source.beta_at(k); break;
        case WaveFamily::F2: amplitude = source.gamma_at(k); break;
        case WaveFamily::F3: amplitude = source.xi_at(k); break;
        case WaveFamily::F4: amplitude = source.eta_at(k); break;
      }
      if (amplitude == 0.0) continue;
      LayeredModeSolution sol = solve_mode(profile, params, k, family, amplitude, source.q);
      if (field.pieces.empty())
        field = std::move(sol.field);
      else
        field.accumulate(sol.field);
    }
  }
  field.normalize();

  SplitPair split = real_imag_split(field, profile.delta);
  pair.v = std::move(split.v);
  pair.w = std::move(split.w);
  pair.constraint_residual =
      primal_constraint_residual(profile, params, source, pair.v, pair.w);
  return pair;
}

}  // namespace alrlab
