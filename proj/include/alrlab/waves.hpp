#pragma once

#include "alrlab/lame.hpp"
#include "alrlab/mode_field.hpp"

namespace alrlab {

/// Which side of the interface r = R carries the sign-flipped amplitude.
enum class WaveVariant { ShellOutside, ShellInside };

/// Perfect interface wave: a two-piece displacement field, continuous across
/// r = R, solving the homogeneous system on both sides, decaying at infinity,
/// whose outer conormal at R is a fixed negative multiple of the inner one
/// (the ShearFamily constant for ShellOutside, the AltFamily constant for
/// ShellInside). ShellOutside exists for k >= 1, ShellInside for k >= 2.
PiecewiseModeField perfect_wave(int k, double R, const LameParameters& params,
                                WaveVariant variant = WaveVariant::ShellOutside);

/// Plane energy P(psi_k, psi_k) of the order-k wave in closed form:
/// 8 k pi mu (lambda + 2 mu) / (lambda + 3 mu) * R^(2k).
double perfect_wave_energy(int k, double R, const LameParameters& params);

/// Material/geometry constants entering the layered base fields below and
/// their traction jumps across the source circle r = q.
struct JumpConstants {
  double c1;  ///< alpha (R^2 - q^2) / q^4
  double c2;  ///< 4 mu (lambda + 2 mu) / (q^3 (lambda + 3 mu)^2)
  double c3;  ///< -(lambda + 3 mu)
  double c4;  ///< (lambda + mu) (q^2 - R^2)
  double c5;  ///< -4 mu (lambda + 2 mu) / (q^3 (lambda + 3 mu))
};

JumpConstants jump_constants(const LameParameters& params, double q, double R);

/// Low-frequency base field: four pieces split at r in {1, R, q}, continuous
/// on the whole plane, solving the shell-weighted homogeneous system away
/// from r = q, with a traction jump there that excites exactly the order-k
/// and order-(k-2) source components. Defined for k >= 3 and 1 < R < q.
PiecewiseModeField base_v_hat(int k, double R, double q, const LameParameters& params);

/// High-frequency base field: two pieces split at r = q only. Solves the
/// unweighted homogeneous system away from r = q; its shell-weighted
/// tractions at r in {1, R} do not match, but that mismatch shrinks
/// geometrically with k relative to the jump it carries at q. k >= 3, q > R.
PiecewiseModeField base_V_hat(int k, double R, double q, const LameParameters& params);

/// Ratio beta_k / gamma_{k-2} under which a single multiple of base_v_hat
/// reproduces both angular components of the mode-k source pair. k >= 3.
double source_coefficient_relation(const LameParameters& params, double q, double R, int k);

/// Amplitude tau_k such that tau_k * base_v_hat carries the source pair
/// (beta_k, gamma_{k-2}) tied together by source_coefficient_relation.
double tau_k_primal(double beta_k, const LameParameters& params, double q, double R, int k);

/// Companion amplitude for base_V_hat reproducing the same source pair.
double tau_k_high(double beta_k, const LameParameters& params, double q, int k);

/// Traction jump across the circle of radius r:
///   outer_scale * conormal(outer side) - inner_scale * conormal(inner side).
/// The scales carry the per-region modulus factors (A + i delta) when the
/// jump of a weighted traction is wanted.
AngularFunction traction_jump(const LameParameters& params, const PiecewiseModeField& f,
                              double r, Complex outer_scale = Complex(1.0, 0.0),
                              Complex inner_scale = Complex(1.0, 0.0));

}  // namespace alrlab
