#include "alrlab/resonance_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "alrlab/variational.hpp"

namespace alrlab {
namespace {

/// Runs job(i) for i in [0, n) on up to `parallelism` threads. Results are
/// written by index, so ordering is deterministic; the first exception is
/// rethrown after all workers stop.
void parallel_for(std::size_t n, int parallelism, const std::function<void(std::size_t)>& job) {
  if (n == 0) return;
  unsigned workers = parallelism > 0 ? static_cast<unsigned>(parallelism)
                                     : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (!failed.load(std::memory_order_relaxed)) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) break;
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string describe(const RadialProfile& profile, const LameParameters& params,
                     const SourceSpectrum& source) {
  char buf[320];
  if (profile.has_core())
    std::snprintf(buf, sizeof buf,
                  "core r=%.17g a=%.17g; shell r=%.17g a=%.17g; lame %.17g,%.17g; q=%.17g K=%d",
                  profile.core_radius, profile.core_amplitude, profile.shell_radius,
                  profile.shell_amplitude, params.lambda, params.mu, source.q, source.max_k());
  else
    std::snprintf(buf, sizeof buf,
                  "shell r=%.17g a=%.17g; lame %.17g,%.17g; q=%.17g K=%d",
                  profile.shell_radius, profile.shell_amplitude, params.lambda, params.mu,
                  source.q, source.max_k());
  return buf;
}

std::vector<double> sorted_grid(std::vector<double> grid) {
  if (grid.size() < 4) throw std::invalid_argument("sweep needs at least four loss levels");
  for (double d : grid)
    if (!(d > 0.0) || !(d < 1.0))
      throw std::invalid_argument("sweep loss levels must lie in (0, 1)");
  std::sort(grid.begin(), grid.end(), std::greater<double>());
  if (std::adjacent_find(grid.begin(), grid.end()) != grid.end())
    throw std::invalid_argument("sweep loss levels must be distinct");
  return grid;
}

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace

std::vector<double> default_delta_grid() {
  std::vector<double> grid(8);
  for (int j = 0; j < 8; ++j) grid[j] = std::pow(10.0, -(j + 1));
  return grid;
}

EnergySweep sweep(const RadialProfile& profile, const LameParameters& params,
                  const SourceSpectrum& source, const std::vector<double>& delta_grid,
                  int parallelism) {
  require_valid(profile);
  require_convex(params, 2);
  const std::vector<double> grid = sorted_grid(delta_grid);

  EnergySweep result;
  result.config = describe(profile, params, source);
  result.rows.resize(grid.size());
  parallel_for(grid.size(), parallelism, [&](std::size_t i) {
    RadialProfile at_loss = profile;
    at_loss.delta = grid[i];
    const EnergyResult solved = solve_configuration(at_loss, params, source);
    SweepRow& row = result.rows[i];
    row.delta = grid[i];
    row.energy = solved.total_energy / grid[i];
    row.trunc_bound = solved.truncation_bound / grid[i];
    row.dominant_k = 0;
    double best = -1.0;
    for (const ModeContribution& m : solved.per_mode)
      if (std::fabs(m.energy) > best) {
        best = std::fabs(m.energy);
        row.dominant_k = m.k;
      }
  });
  return result;
}

std::string sweep_csv(const EnergySweep& sweep) {
  std::string out = "delta,energy,dominant_k,trunc_bound\n";
  char buf[128];
  for (const SweepRow& row : sweep.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%.17g\n", row.delta, row.energy,
                  row.dominant_k, row.trunc_bound);
    out += buf;
  }
  return out;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Resonant: return "Resonant";
    case Verdict::WeaklyResonant: return "WeaklyResonant";
    case Verdict::NonResonant: return "NonResonant";
    case Verdict::Undetermined: return "Undetermined";
  }
  return "Undetermined";
}

Classification classify(const EnergySweep& sweep, const Thresholds& thresholds) {
  const std::vector<SweepRow>& rows = sweep.rows;
  if (rows.size() < 4) throw std::invalid_argument("classification needs at least four rows");
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (!(rows[i].delta < rows[i - 1].delta))
      throw std::invalid_argument("sweep rows must have strictly decreasing loss");

  Classification out;
  for (const SweepRow& row : rows)
    if (!std::isfinite(row.energy)) {
      out.note = "non-finite energy";
      return out;
    }

  // Fit window: the smallest-loss half of the grid.
  const std::size_t n = rows.size();
  const std::size_t half_begin = n - (n + 1) / 2;
  for (std::size_t i = half_begin; i < n; ++i)
    if (!(rows[i].energy > 0.0)) {
      out.note = "nonpositive energy in the fit window";
      return out;
    }

  std::vector<double> x, y, y_runmax;
  double runmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    runmax = std::max(runmax, rows[i].energy);
    if (i >= half_begin) {
      x.push_back(std::log(1.0 / rows[i].delta));
      y.push_back(std::log(rows[i].energy));
      y_runmax.push_back(std::log(runmax));
    }
  }
  out.growth_exponent = fit_slope(x, y);
  out.running_max_exponent = fit_slope(x, y_runmax);
  for (std::size_t i = 1; i < y.size(); ++i) out.tail_variation += std::fabs(y[i] - y[i - 1]);

  // Monotone growth across the final three decades of loss (falling back to
  // the fit window when the grid is narrower than that).
  std::size_t tail_begin = half_begin;
  const double cutoff = rows.back().delta * 1e3 * (1.0 + 1e-9);
  std::size_t first_in_cutoff = n;
  for (std::size_t i = 0; i < n; ++i)
    if (rows[i].delta <= cutoff) {
      first_in_cutoff = i;
      break;
    }
  if (first_in_cutoff + 1 < n) tail_begin = first_in_cutoff;
  out.tail_monotone = true;
  for (std::size_t i = tail_begin + 1; i < n; ++i)
    if (!(rows[i].energy > rows[i - 1].energy)) {
      out.tail_monotone = false;
      break;
    }

  if (out.growth_exponent >= thresholds.resonant_exponent && out.tail_monotone) {
    out.verdict = Verdict::Resonant;
    out.note = "fitted growth with monotone tail";
  } else if (out.tail_variation < thresholds.nonresonant_variation) {
    out.verdict = Verdict::NonResonant;
    out.note = "bounded variation over the tail";
  } else if (!out.tail_monotone &&
             out.running_max_exponent >= thresholds.resonant_exponent) {
    out.verdict = Verdict::WeaklyResonant;
    out.note = "oscillating rows with a growing running maximum";
  } else {
    out.verdict = Verdict::Undetermined;
    out.note = "fits neither the growth nor the flatness rule";
  }
  return out;
}

ScanResult critical_radius_scan(const RadialProfile& profile, const LameParameters& params,
                                const std::vector<double>& gamma_spec,
                                const std::vector<double>& q_grid,
                                const std::vector<double>& delta_grid, int parallelism) {
  require_valid(profile);
  require_convex(params, 2);
  if (q_grid.empty()) throw std::invalid_argument("scan needs a non-empty q grid");
  const double R = profile.shell_radius;
  const double critical = std::pow(R, 1.5);
  std::vector<double> qs = q_grid;
  std::sort(qs.begin(), qs.end());
  if (!(qs.front() < critical) || !(qs.back() > critical))
    throw std::invalid_argument("q grid must straddle the critical radius");
  for (double q : qs)
    if (!(q > R)) throw std::invalid_argument("every q must lie outside the shell");

  const std::vector<double> grid = sorted_grid(delta_grid);
  const double delta_min = grid.back();
  const int k_max = select_k_delta(R, delta_min) + 4;

  SourceSpectrum flat;
  for (int k = 1; k <= k_max; ++k) {
    const double g = gamma_spec.empty()
                         ? 1.0
                         : (k < static_cast<int>(gamma_spec.size()) ? gamma_spec[k] : 0.0);
    if (g != 0.0) flat.set_gamma(k, g);
  }
  std::vector<double> beta(13, 0.0);
  for (int k = 3; k <= 12; ++k) beta[k] = 1.0 / (static_cast<double>(k) * k);

  ScanResult result;
  result.rows.resize(qs.size());
  parallel_for(qs.size(), parallelism, [&](std::size_t i) {
    const double q = qs[i];
    SourceSpectrum source;
    if (q < critical) {
      source = flat;
      source.q = q;
    } else {
      source = make_nonresonant_source(params, q, R, beta);
    }
    const Classification cls = classify(sweep(profile, params, source, grid, 1));
    result.rows[i] = {q, cls.verdict, cls.growth_exponent};
  });

  double last_resonant = 0.0, first_nonresonant = 0.0;
  bool any_resonant = false, any_nonresonant = false;
  for (const ScanRow& row : result.rows) {
    if (row.verdict == Verdict::Resonant) {
      last_resonant = row.q;
      any_resonant = true;
    }
    if (row.verdict == Verdict::NonResonant && !any_nonresonant) {
      first_nonresonant = row.q;
      any_nonresonant = true;
    }
  }
  if (any_resonant && any_nonresonant) {
    result.has_estimate = true;
    result.transition_estimate = 0.5 * (last_resonant + first_nonresonant);
  }
  return result;
}

}  // namespace alrlab
