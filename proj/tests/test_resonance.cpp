#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "alrlab/resonance_lab.hpp"
#include "alrlab/variational.hpp"
#include "oracles.hpp"

using namespace alrlab;

namespace {

const LameParameters kUnit{1.0, 1.0};

/// Synthetic sweep: rows follow fn(delta) on the given grid.
EnergySweep synthetic(const std::vector<double>& grid, double (*fn)(double)) {
  EnergySweep sw;
  sw.config = "synthetic";
  for (double d : grid) sw.rows.push_back({d, fn(d), 0, 0.0});
  std::sort(sw.rows.begin(), sw.rows.end(),
            [](const SweepRow& a, const SweepRow& b) { return a.delta > b.delta; });
  return sw;
}

/// 29 logarithmically spaced losses, 1e-1 down to 1e-8 — dense enough that
/// an oscillation with period pi in log(1/delta) cannot alias to a monotone
/// sample sequence.
std::vector<double> dense_grid() {
  std::vector<double> g;
  for (int j = 0; j <= 28; ++j) g.push_back(std::pow(10.0, -(1.0 + 7.0 * j / 28.0)));
  return g;
}

double power_law(double d) { return 1.0 / d; }
double constant(double d) { return 7.0 + 0.0 * d; }
double rectified(double d) { return (1.0 / d) * std::fabs(std::sin(std::log(1.0 / d))) + 1.0; }

SourceSpectrum single_gamma(int k, double q) {
  SourceSpectrum src;
  src.q = q;
  src.set_gamma(k, 1.0);
  return src;
}

}  // namespace

TEST_CASE("default loss grid spans eight decades") {
  const auto grid = default_delta_grid();
  REQUIRE(grid.size() == 8);
  for (int j = 0; j < 8; ++j) CHECK(grid[j] == doctest::Approx(std::pow(10.0, -(j + 1))).epsilon(1e-15));
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] < grid[i - 1]);
  for (double d : grid) {
    CHECK(d > 0.0);
    CHECK(d < 1.0);
  }
}

TEST_CASE("sweep validates its loss grid") {
  const auto profile = RadialProfile::no_core(2.0, -0.5, 0.1);
  const auto src = single_gamma(3, 3.0);
  CHECK_THROWS_AS(sweep(profile, kUnit, src, {0.1, 0.01, 0.001}), std::invalid_argument);
  CHECK_THROWS_AS(sweep(profile, kUnit, src, {0.1, 0.01, 0.001, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(sweep(profile, kUnit, src, {0.1, 0.01, 0.001, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(sweep(profile, kUnit, src, {0.1, 0.01, 0.001, -0.2}), std::invalid_argument);
  CHECK_THROWS_AS(sweep(profile, kUnit, src, {0.1, 0.01, 0.01, 0.001}), std::invalid_argument);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(sweep(profile, kUnit, src, {0.1, 0.01, 0.001, nan}), std::invalid_argument);
}

TEST_CASE("sweep of an empty spectrum is identically zero") {
  const auto sw = sweep(RadialProfile::no_core(2.0, -0.5, 0.1), kUnit, SourceSpectrum{},
                        default_delta_grid());
  REQUIRE(sw.rows.size() == 8);
  CHECK(!sw.config.empty());
  for (const auto& row : sw.rows) {
    CHECK(row.energy == 0.0);
    CHECK(row.dominant_k == 0);
    CHECK(row.trunc_bound == 0.0);
  }
  // an all-zero sweep supports no growth fit
  CHECK(classify(sw).verdict == Verdict::Undetermined);
}

TEST_CASE("rows come out ordered and identical regardless of input order or thread count") {
  const auto profile = RadialProfile::with_core(1.0, 2.0, 1.0, -0.5, 0.1);
  SourceSpectrum src;
  src.q = 2.5;
  for (int k = 1; k <= 12; ++k) src.set_gamma(k, 1.0);

  const std::vector<double> shuffled{1e-3, 1e-1, 1e-4, 1e-2};
  const std::vector<double> sorted{1e-1, 1e-2, 1e-3, 1e-4};
  const auto a = sweep(profile, kUnit, src, shuffled);
  const auto b = sweep(profile, kUnit, src, sorted);
  REQUIRE(a.rows.size() == 4);
  for (std::size_t i = 1; i < a.rows.size(); ++i) CHECK(a.rows[i].delta < a.rows[i - 1].delta);
  CHECK(sweep_csv(a) == sweep_csv(b));
  CHECK(a.config == b.config);

  // per-row work is independent, so the thread count cannot leak into values
  const auto serial = sweep_csv(sweep(profile, kUnit, src, default_delta_grid(), 1));
  const auto wide = sweep_csv(sweep(profile, kUnit, src, default_delta_grid(), 4));
  const auto automatic = sweep_csv(sweep(profile, kUnit, src, default_delta_grid(), 0));
  CHECK(serial == wide);
  CHECK(serial == automatic);

  // repeated runs are byte-identical
  CHECK(sweep_csv(sweep(profile, kUnit, src, default_delta_grid())) == automatic);

  // distinct configurations get distinct descriptors
  SourceSpectrum other = src;
  other.q = 3.0;
  CHECK(sweep(profile, kUnit, other, sorted).config != a.config);
}

TEST_CASE("csv rendering is exact and stable") {
  EnergySweep sw;
  sw.rows.push_back({0.5, 1.0 / 3.0, 2, 0.25});
  sw.rows.push_back({0.25, 1e-17, 11, 0.0});
  CHECK(sweep_csv(sw) ==
        "delta,energy,dominant_k,trunc_bound\n"
        "0.5,0.33333333333333331,2,0.25\n"
        "0.25,1.0000000000000001e-17,11,0\n");
}

TEST_CASE("driven plasmonic shell stores ever more energy as the loss vanishes") {
  const auto profile = RadialProfile::no_core(2.0, -0.5, 0.1);
  std::vector<double> grid;
  for (int j = 1; j <= 7; ++j) grid.push_back(std::pow(10.0, -j));
  const auto sw = sweep(profile, kUnit, single_gamma(3, 3.0), grid);
  REQUIRE(sw.rows.size() == 7);

  // dissipated energy (loss times the stored rows) grows strictly
  double prev = 0.0;
  for (const auto& row : sw.rows) {
    const double dissipated = row.delta * row.energy;
    CHECK(dissipated > prev);
    CHECK(row.dominant_k == 3);
    prev = dissipated;
  }
  const double first = sw.rows.front().delta * sw.rows.front().energy;
  const double last = sw.rows.back().delta * sw.rows.back().energy;
  CHECK(last / first >= 1e3);

  const auto cls = classify(sw);
  CHECK(cls.verdict == Verdict::Resonant);
  CHECK(cls.growth_exponent == doctest::Approx(2.0).epsilon(0.005));
  CHECK(cls.tail_monotone);
}

TEST_CASE("uniform medium stores the same energy at every loss") {
  SourceSpectrum src = single_gamma(3, 3.0);
  src.set_beta(2, 0.7);
  const auto sw = sweep(RadialProfile::uniform(0.1), kUnit, src, default_delta_grid());
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& row : sw.rows) {
    lo = std::min(lo, row.energy);
    hi = std::max(hi, row.energy);
  }
  CHECK(hi / lo < 1.05);
  CHECK(classify(sw).verdict == Verdict::NonResonant);
}

TEST_CASE("a loss below the conditioning floor surfaces with the loss attached") {
  const auto profile = RadialProfile::no_core(2.0, -0.5, 0.1);
  const auto src = single_gamma(3, 3.0);
  try {
    sweep(profile, kUnit, src, {1e-1, 1e-2, 1e-3, 1e-12});
    FAIL("expected a near-singular report");
  } catch (const NearSingularError& e) {
    CHECK(e.delta == 1e-12);
    CHECK(e.k == 3);
    CHECK(e.rcond < 1e-13);
  }
}

TEST_CASE("classification follows the pinned verdict rules") {
  SUBCASE("clean power law fits its exponent") {
    const auto cls = classify(synthetic(dense_grid(), power_law));
    CHECK(cls.verdict == Verdict::Resonant);
    CHECK(std::fabs(cls.growth_exponent - 1.0) <= 0.01);
    CHECK(cls.tail_monotone);
  }
  SUBCASE("constant rows are flat") {
    const auto cls = classify(synthetic(dense_grid(), constant));
    CHECK(cls.verdict == Verdict::NonResonant);
    CHECK(std::fabs(cls.growth_exponent) <= 0.01);
    CHECK(cls.tail_variation <= 1e-12);
  }
  SUBCASE("rectified oscillation grows only through its running maximum") {
    const auto cls = classify(synthetic(dense_grid(), rectified));
    CHECK(cls.verdict == Verdict::WeaklyResonant);
    CHECK(!cls.tail_monotone);
    CHECK(cls.running_max_exponent >= 0.5);
    CHECK(cls.tail_variation >= 0.2);
  }
  SUBCASE("the coarse default grid aliases the oscillation to a monotone ramp") {
    // with samples a full decade apart every dip falls between grid points;
    // certifying WeaklyResonant requires the denser grid above
    const auto cls = classify(synthetic(default_delta_grid(), rectified));
    CHECK(cls.verdict == Verdict::Resonant);
    CHECK(cls.tail_monotone);
  }
  SUBCASE("a non-finite row disables every rule") {
    auto sw = synthetic(default_delta_grid(), power_law);
    sw.rows[1].energy = std::numeric_limits<double>::quiet_NaN();
    CHECK(classify(sw).verdict == Verdict::Undetermined);
    sw.rows[1].energy = std::numeric_limits<double>::infinity();
    CHECK(classify(sw).verdict == Verdict::Undetermined);
  }
  SUBCASE("nonpositive energies in the fit window disable the log fit") {
    auto sw = synthetic(default_delta_grid(), constant);
    sw.rows.back().energy = 0.0;
    CHECK(classify(sw).verdict == Verdict::Undetermined);
  }
  SUBCASE("too few or unordered rows are rejected") {
    auto sw = synthetic(default_delta_grid(), power_law);
    sw.rows.resize(3);
    CHECK_THROWS_AS(classify(sw), std::invalid_argument);
    auto bad = synthetic(default_delta_grid(), power_law);
    std::swap(bad.rows[2], bad.rows[3]);
    CHECK_THROWS_AS(classify(bad), std::invalid_argument);
  }
}

TEST_CASE("classification is invariant under rescaling the energy") {
  const auto base = synthetic(dense_grid(), rectified);
  auto scaled = base;
  for (auto& row : scaled.rows) row.energy *= 3.7e5;
  const auto a = classify(base);
  const auto b = classify(scaled);
  CHECK(a.verdict == b.verdict);
  CHECK(a.growth_exponent == doctest::Approx(b.growth_exponent).epsilon(1e-12));
  CHECK(a.tail_variation == doctest::Approx(b.tail_variation).epsilon(1e-12));
}

TEST_CASE("subsampling a power law preserves the fitted exponent") {
  EnergySweep full;
  for (double d : default_delta_grid()) full.rows.push_back({d, std::pow(d, -1.3), 0, 0.0});
  EnergySweep half;
  for (std::size_t i = 0; i < full.rows.size(); i += 2) half.rows.push_back(full.rows[i]);
  REQUIRE(half.rows.size() == 4);
  const auto a = classify(full);
  const auto b = classify(half);
  CHECK(a.verdict == Verdict::Resonant);
  CHECK(b.verdict == Verdict::Resonant);
  CHECK(a.growth_exponent == doctest::Approx(1.3).epsilon(1e-12));
  CHECK(std::fabs(b.growth_exponent - a.growth_exponent) <= 0.05 * a.growth_exponent);
}

TEST_CASE("verdict names spell out") {
  CHECK(std::string(verdict_name(Verdict::Resonant)) == "Resonant");
  CHECK(std::string(verdict_name(Verdict::WeaklyResonant)) == "WeaklyResonant");
  CHECK(std::string(verdict_name(Verdict::NonResonant)) == "NonResonant");
  CHECK(std::string(verdict_name(Verdict::Undetermined)) == "Undetermined");
}

TEST_CASE("coreless shell blows up for every single driving order") {
  const auto profile = RadialProfile::no_core(2.0, -0.5, 0.1);
  for (int k = 1; k <= 6; ++k) {
    const auto cls = classify(sweep(profile, kUnit, single_gamma(k, 3.0), default_delta_grid()));
    CAPTURE(k);
    CHECK(cls.verdict == Verdict::Resonant);
    CHECK(cls.growth_exponent == doctest::Approx(2.0).epsilon(0.01));
  }
}

TEST_CASE("cored shell resonates under a flat spectrum inside the critical radius") {
  const auto profile = RadialProfile::with_core(1.0, 2.0, 1.0, -0.5, 0.1);
  const auto grid = default_delta_grid();
  const int k_max = select_k_delta(2.0, grid.back()) + 4;
  SourceSpectrum src;
  src.q = 2.5;
  for (int k = 1; k <= k_max; ++k) src.set_gamma(k, 1.0);
  const auto sw = sweep(profile, kUnit, src, grid);
  const auto cls = classify(sw);
  CHECK(cls.verdict == Verdict::Resonant);
  CHECK(cls.growth_exponent >= 0.5);
  // ever deeper orders take over as the loss shrinks
  CHECK(sw.rows.back().dominant_k > sw.rows.front().dominant_k);
  for (std::size_t i = 1; i < sw.rows.size(); ++i)
    CHECK(sw.rows[i].dominant_k >= sw.rows[i - 1].dominant_k);
}

TEST_CASE("tied spectrum outside the critical radius stays bounded") {
  const auto profile = RadialProfile::with_core(1.0, 2.0, 1.0, -0.5, 0.1);
  std::vector<double> beta(13, 0.0);
  for (int k = 3; k <= 12; ++k) beta[k] = 1.0 / (double(k) * k);
  const auto src = make_nonresonant_source(kUnit, 3.5, 2.0, beta);
  std::vector<double> grid;
  for (int j = 1; j <= 6; ++j) grid.push_back(std::pow(10.0, -j));
  const auto cls = classify(sweep(profile, kUnit, src, grid));
  CHECK(cls.verdict == Verdict::NonResonant);
  CHECK(cls.tail_variation < 0.2);
}

TEST_CASE("scan brackets the critical source radius") {
  const auto profile = RadialProfile::with_core(1.0, 2.0, 1.0, -0.5, 0.1);
  const double critical = std::pow(2.0, 1.5);
  const auto scan = critical_radius_scan(profile, kUnit, {}, {2.2, 2.5, 2.8, 3.1, 3.4},
                                         default_delta_grid());
  REQUIRE(scan.rows.size() == 5);
  for (std::size_t i = 1; i < scan.rows.size(); ++i) CHECK(scan.rows[i].q > scan.rows[i - 1].q);
  CHECK(scan.rows[0].verdict == Verdict::Resonant);
  CHECK(scan.rows[1].verdict == Verdict::Resonant);
  CHECK(scan.rows[2].verdict == Verdict::Resonant);
  CHECK(scan.rows[3].verdict == Verdict::NonResonant);
  CHECK(scan.rows[4].verdict == Verdict::NonResonant);
  REQUIRE(scan.has_estimate);
  CHECK(std::fabs(scan.transition_estimate - critical) <= 0.15 * critical);
}

TEST_CASE("a one-sided scan reports rows but no estimate") {
  // straddling pair pinched against the transition: growth there is too slow
  // for the resonant rule and too lively for the flat rule on the high side
  const auto profile = RadialProfile::with_core(1.0, 2.0, 1.0, -0.5, 0.1);
  const auto scan =
      critical_radius_scan(profile, kUnit, {}, {2.82, 2.84}, default_delta_grid());
  REQUIRE(scan.rows.size() == 2);
  CHECK(scan.rows[0].verdict == Verdict::Resonant);
  CHECK(scan.rows[1].verdict == Verdict::Undetermined);
  CHECK(!scan.has_estimate);
  CHECK(scan.transition_estimate == 0.0);
}

TEST_CASE("a single driving order cannot trip the cored resonance") {
  // the cored blow-up is a cascade across ever deeper orders; one mode's
  // energy saturates as the loss vanishes, so a sparse spectrum never fires
  // and the scan reports rows without an estimate
  const auto profile = RadialProfile::with_core(1.0, 2.0, 1.0, -0.5, 0.1);
  std::vector<double> gamma_spec(4, 0.0);
  gamma_spec[3] = 1.0;
  const auto scan =
      critical_radius_scan(profile, kUnit, gamma_spec, {2.5, 3.1}, default_delta_grid());
  REQUIRE(scan.rows.size() == 2);
  CHECK(scan.rows[0].verdict == Verdict::NonResonant);
  CHECK(scan.rows[1].verdict == Verdict::NonResonant);
  CHECK(!scan.has_estimate);
}

TEST_CASE("scan validates its grids") {
  const auto profile = RadialProfile::with_core(1.0, 2.0, 1.0, -0.5, 0.1);
  const auto grid = default_delta_grid();
  CHECK_THROWS_AS(critical_radius_scan(profile, kUnit, {}, {}, grid), std::invalid_argument);
  CHECK_THROWS_AS(critical_radius_scan(profile, kUnit, {}, {2.3, 2.6}, grid),
                  std::invalid_argument);
  CHECK_THROWS_AS(critical_radius_scan(profile, kUnit, {}, {3.0, 3.5}, grid),
                  std::invalid_argument);
  CHECK_THROWS_AS(critical_radius_scan(profile, kUnit, {}, {1.5, 3.0}, grid),
                  std::invalid_argument);
  CHECK_THROWS_AS(critical_radius_scan(profile, kUnit, {}, {2.5, 3.0}, {0.1, 0.2}),
                  std::invalid_argument);
}
