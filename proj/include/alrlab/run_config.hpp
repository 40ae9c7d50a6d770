#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "alrlab/lame.hpp"
#include "alrlab/resonance_lab.hpp"
#include "alrlab/solver.hpp"

namespace alrlab {

/// Flat description of one run, mirroring the INI sections
/// [lame] / [profile] / [source] / [sweep].  Every field has a usable
/// default; parse_config additionally insists that the four physical keys
/// lame.lambda, lame.mu, profile.R, source.q appear explicitly, so an
/// archived config file names its own physics.
struct RunConfig {
  // [lame]
  double lambda = 1.0;
  double mu = 1.0;

  // [profile]  (core_radius = 0 means no core; the shell amplitude comes
  // from the named constant family, or from an explicit value of c)
  double core_radius = 0.0;
  double shell_radius = 2.0;
  std::string family = "shear";  ///< shear | alt | explicit
  double shell_c = 0.0;
  bool shell_c_set = false;

  // [source]
  double q = 3.0;
  std::string generator = "single-mode";  ///< single-mode | unit-gamma |
                                          ///< tuned-nonresonant | explicit
  int mode_k = 3;        ///< single-mode order
  double amplitude = 1.0;
  int max_order = 0;     ///< unit-gamma truncation; 0 = pick from delta_min
  std::vector<std::pair<int, double>> gamma;  ///< explicit entries, "k:value"
  std::vector<std::pair<int, double>> beta;   ///< tuned seed / explicit entries

  // [sweep]
  double delta_min = 1e-8;
  double delta_max = 1e-1;
  int points = 8;
  int max_parallelism = 0;
  double resonant_exponent = 0.5;
  double nonresonant_variation = 0.2;
  std::string output_dir;
};

/// Parses "key = value" lines grouped under [section] headers. '#' and ';'
/// start comments. Unknown sections or keys, malformed numbers, duplicate
/// keys, and missing required keys are all reported with their line number.
/// The returned config has passed validate_config.
RunConfig parse_config(const std::string& text);

/// Applies one "section.key=value" override (the --set channel). Unlike the
/// file parser it allows re-assigning a key that was already set.
void apply_override(RunConfig& config, const std::string& spec);

/// Cross-field checks: convexity of the moduli, nested radii, the source
/// circle outside the shell, a usable loss grid, and generator/list
/// consistency. Throws std::invalid_argument with a plain diagnostic.
void validate_config(const RunConfig& config);

LameParameters config_lame(const RunConfig& config);

/// Profile at one loss level: matrix amplitude 1, shell amplitude from the
/// family (or explicit c), unit core amplitude when a core is present.
RadialProfile config_profile(const RunConfig& config, double delta);

/// Source built by the configured generator:
///   single-mode        gamma_k = amplitude at the configured order
///   unit-gamma         gamma_k = 1 for k = 1..K (K = max_order, or chosen
///                      from delta_min so the sweep never truncates early)
///   tuned-nonresonant  the bounded-energy construction seeded by beta
///                      (default beta_k = k^-2 for k = 3..12)
///   explicit           the gamma/beta lists verbatim
SourceSpectrum config_source(const RunConfig& config);

/// Log-spaced loss grid from delta_max down to delta_min, `points` entries.
std::vector<double> config_delta_grid(const RunConfig& config);

Thresholds config_thresholds(const RunConfig& config);

/// Canonical form: every effective key as a sorted "section.key=value" line
/// (numbers in %.17g, lists re-rendered sorted by order). The output
/// directory is excluded: where artifacts land does not change what was run.
std::string canonical_config(const RunConfig& config);

/// 64-bit FNV-1a of the canonical form, as 16 hex digits. Two configs hash
/// alike exactly when their canonical forms agree.
std::string config_hash(const RunConfig& config);

uint64_t fnv1a64(const std::string& text);

}  // namespace alrlab
