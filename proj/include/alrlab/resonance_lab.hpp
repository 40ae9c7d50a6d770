#pragma once

#include <string>
#include <vector>

#include "alrlab/solver.hpp"

namespace alrlab {

/// One loss level of a sweep. Energies are reported per unit loss — the
/// stored-energy normalization (1/2) P(u,u) that stays finite as the loss
/// vanishes on non-resonant configurations — so the classifier sees the
/// quantity whose blow-up defines resonance. trunc_bound is the solver's
/// truncation bound in the same scale.
struct SweepRow {
  double delta = 0.0;
  double energy = 0.0;
  int dominant_k = 0;  ///< order with the largest contribution (0 if none)
  double trunc_bound = 0.0;
};

/// Loss sweep of one configuration, rows sorted by strictly decreasing
/// loss. `config` is a deterministic one-line descriptor of profile,
/// moduli, and source.
struct EnergySweep {
  std::string config;
  std::vector<SweepRow> rows;
};

/// Eight logarithmically spaced loss levels, 1e-1 down to 1e-8.
std::vector<double> default_delta_grid();

/// Solves the configuration once per grid loss and collects the rows.
/// Grid values must lie in (0, 1), be distinct, and number at least four;
/// they are sorted descending internally. Loss levels solve in parallel
/// (`parallelism` threads, 0 = hardware default); assembly is ordered, so
/// results are deterministic. A near-singular solve propagates with the
/// offending loss attached.
EnergySweep sweep(const RadialProfile& profile, const LameParameters& params,
                  const SourceSpectrum& source, const std::vector<double>& delta_grid,
                  int parallelism = 0);

/// CSV rendering (header + one row per loss, %.17g), byte-identical across
/// repeated runs of the same configuration.
std::string sweep_csv(const EnergySweep& sweep);

enum class Verdict { Resonant, WeaklyResonant, NonResonant, Undetermined };

const char* verdict_name(Verdict v);

/// Calibrated surrogates for the asymptotic definitions: a finite sweep
/// cannot take a limit, so growth is certified by a fitted exponent plus
/// tail monotonicity, and flatness by small total variation.
struct Thresholds {
  double resonant_exponent = 0.5;      ///< minimum fitted p for Resonant
  double nonresonant_variation = 0.2;  ///< maximum tail TV of log E for NonResonant
};

struct Classification {
  Verdict verdict = Verdict::Undetermined;
  /// Least-squares exponent of E ~ delta^{-p} over the smallest-loss half.
  double growth_exponent = 0.0;
  /// Total variation of log E over the smallest-loss half.
  double tail_variation = 0.0;
  /// Strict growth of E across the final three decades of loss.
  bool tail_monotone = false;
  /// Same exponent fit applied to the running maximum of E.
  double running_max_exponent = 0.0;
  std::string note;
};

/// Applies the verdict rules to a sweep of at least four rows:
/// non-finite or non-positive energies in the fit window -> Undetermined;
/// fitted exponent at or above threshold with a monotone tail -> Resonant;
/// tail variation below threshold -> NonResonant; non-monotone rows whose
/// running maximum still grows at the threshold exponent -> WeaklyResonant;
/// anything else -> Undetermined.
Classification classify(const EnergySweep& sweep, const Thresholds& thresholds = {});

struct ScanRow {
  double q = 0.0;
  Verdict verdict = Verdict::Undetermined;
  double p = 0.0;
};

struct ScanResult {
  std::vector<ScanRow> rows;  ///< ascending in q
  bool has_estimate = false;
  /// Midpoint of the largest Resonant q and the smallest NonResonant q.
  double transition_estimate = 0.0;
};

/// Sweeps and classifies one source circle radius per grid entry to locate
/// the critical radius shell_radius^{3/2}. Inside the theoretical radius
/// the source carries flat coefficients gamma_k (gamma_spec, or ones when
/// empty) truncated a few orders past the deepest selected mode; outside it
/// carries the tied spectrum built from beta_k = k^{-2}. The q grid must
/// straddle the theoretical radius and stay outside the shell. Entries
/// scan in parallel; rows are assembled in ascending q order.
ScanResult critical_radius_scan(const RadialProfile& profile, const LameParameters& params,
                                const std::vector<double>& gamma_spec,
                                const std::vector<double>& q_grid,
                                const std::vector<double>& delta_grid, int parallelism = 0);

}  // namespace alrlab
