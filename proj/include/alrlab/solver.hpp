#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "alrlab/lame.hpp"
#include "alrlab/mode_field.hpp"

namespace alrlab {

/// Concentric two-interface geometry. The stiffness tensor in each region is
/// the base isotropic tensor scaled by (amplitude + i*delta):
///   r < core_radius          : core_amplitude   + i delta
///   core_radius < r < shell  : shell_amplitude  + i delta
///   r > shell_radius         : matrix_amplitude + i delta
/// core_radius == 0 removes the core region entirely.
struct RadialProfile {
  double core_radius = 0.0;
  double shell_radius = 1.0;
  double core_amplitude = 1.0;
  double shell_amplitude = 1.0;
  double matrix_amplitude = 1.0;
  double delta = 1e-3;

  bool has_core() const { return core_radius > 0.0; }

  Complex core_factor() const { return {core_amplitude, delta}; }
  Complex shell_factor() const { return {shell_amplitude, delta}; }
  Complex matrix_factor() const { return {matrix_amplitude, delta}; }

  static RadialProfile uniform(double delta);
  static RadialProfile no_core(double shell_radius, double shell_amplitude, double delta);
  static RadialProfile with_core(double core_radius, double shell_radius,
                                 double core_amplitude, double shell_amplitude, double delta);
};

/// Throws std::invalid_argument on non-nested radii, negative loss, or
/// non-finite entries. delta == 0 is allowed (lossless solves are legitimate
/// away from shell resonances; at a resonance the solver reports
/// NearSingularError instead of returning garbage).
void require_valid(const RadialProfile& profile);

/// Traction source supported on the circle r = q, stored as real amplitudes
/// of the four unnormalized angular families per order k >= 1:
///   F1: (cos k th,  sin k th)    F2: (cos k th, -sin k th)
///   F3: (-sin k th, cos k th)    F4: (sin k th,  cos k th)
/// Each family has squared L2 norm 2 pi q on the circle; coefficients here
/// multiply the raw (unnormalized) patterns.
struct SourceSpectrum {
  double q = 1.0;
  std::vector<double> beta;   ///< F1 amplitudes, index k ([0] unused)
  std::vector<double> gamma;  ///< F2 amplitudes
  std::vector<double> xi;     ///< F3 amplitudes
  std::vector<double> eta;    ///< F4 amplitudes

  int max_k() const;
  bool empty() const;

  void set_beta(int k, double value);
  void set_gamma(int k, double value);
  void set_xi(int k, double value);
  void set_eta(int k, double value);

  double beta_at(int k) const;
  double gamma_at(int k) const;
  double xi_at(int k) const;
  double eta_at(int k) const;
};

/// The circle density of one source mode: amplitude * family pattern at
/// order k, as an AngularFunction (real-valued circle field).
AngularFunction source_mode_density(int k, WaveFamily family, double amplitude);

/// Total density of the spectrum on its circle: sum of the four family
/// patterns over every order with a nonzero coefficient.
AngularFunction spectrum_density(const SourceSpectrum& source);

/// Raised when a matching matrix is numerically singular (reciprocal
/// condition number below 1e-13), which happens exactly at lossless shell
/// resonances. Carries the offending mode and the condition estimate.
struct NearSingularError : std::runtime_error {
  NearSingularError(int k_, WaveFamily family_, double rcond_, double delta_);
  int k;
  WaveFamily family;
  double rcond;
  double delta;
};

/// Post-solve check of one interface: largest displacement / weighted
/// traction channel mismatch relative to the field scale there.
struct InterfaceResidual {
  double radius = 0.0;
  double displacement = 0.0;  ///< relative trace gap
  double traction = 0.0;      ///< relative weighted-traction gap (minus jump)
};

/// Solution of the transmission problem for a single source mode: the field,
/// the per-region basis coefficients, and diagnostics.
struct LayeredModeSolution {
  int k = 0;
  WaveFamily family = WaveFamily::F1;
  double amplitude = 0.0;
  double q = 0.0;
  RadialProfile profile;
  LameParameters params;
  PiecewiseModeField field;
  std::vector<std::vector<Complex>> region_coefficients;
  double rcond = 0.0;
  std::vector<InterfaceResidual> residuals;

  double max_residual() const;
};

struct ModeContribution {
  int k = 0;
  WaveFamily family = WaveFamily::F1;
  double energy = 0.0;
};

/// Dissipated energy of a full configuration, (delta/2) P(u, u), with the
/// per-mode breakdown. Contributions of modes sharing an angular block are
/// cross-aware (energy of the block is split along its parts), so they sum
/// to the exact total.
struct EnergyResult {
  double delta = 0.0;
  double total_energy = 0.0;
  std::vector<ModeContribution> per_mode;
  double truncation_bound = 0.0;
};

/// Solves the layered transmission problem for one source mode of the given
/// family and amplitude on the circle r = q: displacement continuous at all
/// interfaces, (A + i delta)-weighted traction continuous at core and shell
/// radii, traction jump (outer minus inner) at q equal to the source
/// density. At most 12 unknowns. Throws NearSingularError when the matching
/// matrix is singular to working precision.
LayeredModeSolution solve_mode(const RadialProfile& profile, const LameParameters& params,
                               int k, WaveFamily family, double amplitude, double q);

/// Solves every stored mode of the spectrum and accumulates dissipated
/// energy in ascending angular order. Modes that land in the same angular
/// block (e.g. F1 at k and F2 at k-2) are superposed before the energy is
/// measured, so cross terms are exact. truncation_bound adds a geometric
/// tail estimate for a source pattern continued past max_k.
EnergyResult solve_configuration(const RadialProfile& profile, const LameParameters& params,
                                 const SourceSpectrum& source, double tail_tol = 1e-10);

/// Constant-coefficient (A == 1, no loss) solve with prescribed traction
/// jumps across one or more circles: continuous displacement, regular at the
/// origin, decaying at infinity. Each jump is the outer-minus-inner traction
/// mismatch to produce on its circle. Rejects densities with an order-0
/// channel (net force; no decaying solution exists).
PiecewiseModeField freespace_traction_solve(
    const LameParameters& params,
    const std::vector<std::pair<double, AngularFunction>>& jumps);

/// Real pair (v, w) with u = v + i w / delta.
struct SplitPair {
  PiecewiseModeField v;
  PiecewiseModeField w;
};

SplitPair real_imag_split(const PiecewiseModeField& u, double delta);
SplitPair real_imag_split(const LayeredModeSolution& solution);

/// Term-level conjugate / real part / imaginary part of a complex field.
PiecewiseModeField field_conjugate(const PiecewiseModeField& f);
PiecewiseModeField field_real_part(const PiecewiseModeField& f);
PiecewiseModeField field_imag_part(const PiecewiseModeField& f);

}  // namespace alrlab
