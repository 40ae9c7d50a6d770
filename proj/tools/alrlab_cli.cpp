#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "alrlab/mode_field.hpp"
#include "alrlab/resonance_lab.hpp"
#include "alrlab/run_config.hpp"
#include "alrlab/solver.hpp"
#include "alrlab/threed.hpp"
#include "alrlab/variational.hpp"
#include "alrlab/waves.hpp"

namespace {

using namespace alrlab;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output_dir;
};

RunConfig load_config(const Options& opt) {
  RunConfig config;
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path);
    if (!in) throw std::invalid_argument("cannot open config file " + opt.config_path);
    std::ostringstream text;
    text << in.rdbuf();
    config = parse_config(text.str());
  }
  for (const std::string& spec : opt.overrides) apply_override(config, spec);
  validate_config(config);
  return config;
}

std::filesystem::path resolve_output(const Options& opt, const RunConfig& config) {
  std::string dir = opt.output_dir;
  if (dir.empty()) dir = config.output_dir;
  if (dir.empty()) {
    const char* env = std::getenv("ALRLAB_OUTPUT_DIR");
    if (env && *env) dir = env;
  }
  if (dir.empty()) dir = ".";
  std::filesystem::create_directories(dir);
  return dir;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

json manifest_base(const char* command, const RunConfig& config, double wall) {
  json m;
  m["command"] = command;
  m["config_hash"] = config_hash(config);
  m["tool_version"] = kVersion;
  m["thresholds"] = {{"resonant_exponent", config.resonant_exponent},
                     {"nonresonant_variation", config.nonresonant_variation}};
  m["wall_time_seconds"] = wall;
  return m;
}

void write_manifest(const std::filesystem::path& dir, const char* command, const json& m) {
  write_text(dir / (std::string(command) + "_manifest.json"), m.dump(2) + "\n");
}

EnergySweep read_sweep_csv(std::istream& in, const std::string& name) {
  std::string header;
  if (!std::getline(in, header) || header != "delta,energy,dominant_k,trunc_bound")
    throw std::invalid_argument(name + ": expected a sweep CSV header");
  EnergySweep sweep;
  sweep.config = "replay:" + name;
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    SweepRow row;
    if (std::sscanf(line.c_str(), "%lf,%lf,%d,%lf", &row.delta, &row.energy, &row.dominant_k,
                    &row.trunc_bound) != 4)
      throw std::invalid_argument(name + " line " + std::to_string(line_no) +
                                  ": expected delta,energy,dominant_k,trunc_bound");
    sweep.rows.push_back(row);
  }
  return sweep;
}

EnergySweep run_config_sweep(const RunConfig& config) {
  return sweep(config_profile(config, config.delta_max), config_lame(config),
               config_source(config), config_delta_grid(config), config.max_parallelism);
}

// ---------------------------------------------------------------------------
// sweep

int cmd_sweep(const Options& opt) {
  RunConfig config = load_config(opt);
  Timer timer;
  EnergySweep result = run_config_sweep(config);
  std::filesystem::path dir = resolve_output(opt, config);
  std::filesystem::path csv = dir / "sweep.csv";
  write_text(csv, sweep_csv(result));

  json m = manifest_base("sweep", config, timer.seconds());
  m["rows"] = result.rows.size();
  m["csv"] = csv.string();
  write_manifest(dir, "sweep", m);
  std::printf("sweep: %zu rows -> %s (config %s)\n", result.rows.size(), csv.string().c_str(),
              config_hash(config).c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// classify

int cmd_classify(const Options& opt, const std::string& replay) {
  RunConfig config = load_config(opt);
  Timer timer;
  EnergySweep swept;
  std::filesystem::path dir = resolve_output(opt, config);
  if (!replay.empty()) {
    std::ifstream in(replay);
    if (!in) throw std::invalid_argument("cannot open replay CSV " + replay);
    swept = read_sweep_csv(in, replay);
  } else {
    swept = run_config_sweep(config);
    write_text(dir / "sweep.csv", sweep_csv(swept));
  }
  Classification verdict = classify(swept, config_thresholds(config));

  json m = manifest_base("classify", config, timer.seconds());
  m["verdict"] = verdict_name(verdict.verdict);
  m["growth_exponent"] = verdict.growth_exponent;
  m["tail_variation"] = verdict.tail_variation;
  m["tail_monotone"] = verdict.tail_monotone;
  m["running_max_exponent"] = verdict.running_max_exponent;
  m["note"] = verdict.note;
  if (!replay.empty()) m["replay"] = replay;
  write_manifest(dir, "classify", m);

  std::printf("verdict=%s growth_exponent=%.4f tail_variation=%.4f tail_monotone=%d\n",
              verdict_name(verdict.verdict), verdict.growth_exponent, verdict.tail_variation,
              verdict.tail_monotone ? 1 : 0);
  std::printf("note: %s\n", verdict.note.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// critical-radius

int cmd_critical_radius(const Options& opt, double q_min, double q_max, double q_step) {
  RunConfig config = load_config(opt);
  if (!(q_step > 0.0)) throw std::invalid_argument("--q-step must be positive");
  Timer timer;
  std::vector<double> qs;
  for (double q = q_min; q <= q_max + 0.5 * q_step; q += q_step) qs.push_back(q);
  ScanResult result =
      critical_radius_scan(config_profile(config, config.delta_max), config_lame(config), {},
                           qs, config_delta_grid(config), config.max_parallelism);

  std::string csv = "q,verdict,growth_exponent\n";
  json rows = json::array();
  for (const ScanRow& row : result.rows) {
    csv += fmt_g(row.q);
    csv += ',';
    csv += verdict_name(row.verdict);
    csv += ',';
    csv += fmt_g(row.p);
    csv += '\n';
    json entry;
    entry["q"] = row.q;
    entry["verdict"] = verdict_name(row.verdict);
    entry["growth_exponent"] = row.p;
    rows.push_back(entry);
  }
  std::filesystem::path dir = resolve_output(opt, config);
  write_text(dir / "critical_radius.csv", csv);

  json m = manifest_base("critical-radius", config, timer.seconds());
  m["rows"] = rows;
  m["has_estimate"] = result.has_estimate;
  if (result.has_estimate) m["transition_estimate"] = result.transition_estimate;
  write_manifest(dir, "critical_radius", m);

  if (result.has_estimate)
    std::printf("critical source radius estimate: %.6f\n", result.transition_estimate);
  else
    std::printf("no transition bracketed by the q grid\n");
  return 0;
}

// ---------------------------------------------------------------------------
// bounds

int cmd_bounds(const Options& opt) {
  RunConfig config = load_config(opt);
  Timer timer;
  LameParameters lame = config_lame(config);
  SourceSpectrum source = config_source(config);
  std::vector<double> grid = config_delta_grid(config);
  bool cored = config.core_radius > 0.0;
  bool tuned = cored && config.generator == "tuned-nonresonant";

  int best_k = 0;
  for (int k = 1; k <= source.max_k(); ++k)
    if (best_k == 0 || std::abs(source.gamma_at(k)) > std::abs(source.gamma_at(best_k)))
      if (source.gamma_at(k) != 0.0) best_k = k;

  std::string csv = "delta,J,E,I\n";
  bool all_ok = true;
  json rows = json::array();
  for (double delta : grid) {
    RadialProfile profile = config_profile(config, delta);
    double energy = solve_configuration(profile, lame, source).total_energy;

    double lower = 0.0;  // J = 0 certifies nothing but never lies: E >= 0
    if (cored) {
      lower = core_dual_trial(delta, lame, config.shell_radius, config.q, source.gamma).value;
    } else if (best_k > 0) {
      double tau = nocore_optimal_tau(best_k, source.gamma_at(best_k), delta, lame,
                                      config.shell_radius, config.q);
      DualPair pair = nocore_dual_trial(best_k, tau, lame, config.shell_radius);
      lower = dual_J(delta, source, pair, lame);
    }

    double upper;
    if (tuned) {
      upper = nonresonant_primal_trial(delta, lame, config.shell_radius, config.q, source.beta)
                  .value;
    } else {
      PrimalPair pair = solution_primal_pair(profile, lame, source);
      upper = primal_I(delta, pair, lame);
    }

    double tol = 1e-8 * std::max(1.0, std::abs(energy));
    SandwichReport report = sandwich_check(energy, upper, lower, tol);
    all_ok = all_ok && report.ok;
    csv += fmt_g(delta) + "," + fmt_g(lower) + "," + fmt_g(energy) + "," + fmt_g(upper) + "\n";
    json entry;
    entry["delta"] = delta;
    entry["J"] = lower;
    entry["E"] = energy;
    entry["I"] = upper;
    entry["ok"] = report.ok;
    rows.push_back(entry);
  }

  std::filesystem::path dir = resolve_output(opt, config);
  write_text(dir / "bounds.csv", csv);
  json m = manifest_base("bounds", config, timer.seconds());
  m["rows"] = rows;
  m["all_ok"] = all_ok;
  write_manifest(dir, "bounds", m);

  std::printf("bounds: %zu loss levels, sandwich %s\n", grid.size(),
              all_ok ? "holds at every level" : "VIOLATED");
  return all_ok ? 0 : 3;
}

// ---------------------------------------------------------------------------
// plasmon-field

int cmd_field(const Options& opt, double delta, double r_max, int radial, int angular) {
  RunConfig config = load_config(opt);
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("--delta must lie in (0, 1)");
  if (radial < 1 || angular < 1)
    throw std::invalid_argument("--radial and --angular must be positive");
  Timer timer;
  LameParameters lame = config_lame(config);
  RadialProfile profile = config_profile(config, delta);
  SourceSpectrum source = config_source(config);
  if (r_max <= 0.0) r_max = 1.25 * config.q;

  PiecewiseModeField total;
  bool first = true;
  auto add_mode = [&](int k, WaveFamily family, double amplitude) {
    if (amplitude == 0.0) return;
    LayeredModeSolution sol = solve_mode(profile, lame, k, family, amplitude, config.q);
    if (first) {
      total = sol.field;
      first = false;
    } else {
      total.accumulate(sol.field);
    }
  };
  for (int k = 1; k <= source.max_k(); ++k) {
    add_mode(k, WaveFamily::F1, source.beta_at(k));
    add_mode(k, WaveFamily::F2, source.gamma_at(k));
    add_mode(k, WaveFamily::F3, source.xi_at(k));
    add_mode(k, WaveFamily::F4, source.eta_at(k));
  }

  constexpr double kTau = 6.28318530717958648;
  std::string csv = "r,theta,u1_re,u1_im,u2_re,u2_im\n";
  for (int i = 1; i <= radial; ++i) {
    double r = r_max * i / radial;
    for (int j = 0; j < angular; ++j) {
      double theta = kTau * j / angular;
      std::array<Complex, 2> u{Complex(0.0), Complex(0.0)};
      if (!first) u = evaluate_polar(total, r, theta);
      csv += fmt_g(r) + "," + fmt_g(theta) + "," + fmt_g(u[0].real()) + "," +
             fmt_g(u[0].imag()) + "," + fmt_g(u[1].real()) + "," + fmt_g(u[1].imag()) + "\n";
    }
  }

  std::filesystem::path dir = resolve_output(opt, config);
  std::filesystem::path csv_path = dir / "field.csv";
  write_text(csv_path, csv);
  json m = manifest_base("plasmon-field", config, timer.seconds());
  m["delta"] = delta;
  m["r_max"] = r_max;
  m["rows"] = radial * angular;
  m["csv"] = csv_path.string();
  write_manifest(dir, "field", m);
  std::printf("plasmon-field: %d x %d samples at delta = %s -> %s\n", radial, angular,
              fmt_g(delta).c_str(), csv_path.string().c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// threed-check

int cmd_threed(const Options& opt, int n_min, int n_max, int samples) {
  RunConfig config = load_config(opt);
  if (n_min < 2 || n_max < n_min)
    throw std::invalid_argument("--n-min must be >= 2 and --n-max >= --n-min");
  LameParameters lame = config_lame(config);
  require_convex(lame, 3);
  Timer timer;

  std::string csv = "n,m,best_c,residual\n";
  double min_residual = 1.0;
  json rows = json::array();
  for (int n = n_min; n <= n_max; ++n) {
    for (int m = -n; m <= n; ++m) {
      ProportionalityReport report = proportionality_test(lame, n, m, samples);
      char lead[32];
      std::snprintf(lead, sizeof lead, "%d,%d,", n, m);
      csv += lead + fmt_g(report.best_fit_c) + "," + fmt_g(report.relative_residual) + "\n";
      min_residual = std::min(min_residual, report.relative_residual);
      json entry;
      entry["n"] = n;
      entry["m"] = m;
      entry["best_c"] = report.best_fit_c;
      entry["residual"] = report.relative_residual;
      rows.push_back(entry);
    }
  }

  std::filesystem::path dir = resolve_output(opt, config);
  write_text(dir / "threed_check.csv", csv);
  json m = manifest_base("threed-check", config, timer.seconds());
  m["rows"] = rows;
  m["min_residual"] = min_residual;
  m["samples"] = samples;
  write_manifest(dir, "threed_check", m);
  std::printf("threed-check: orders %d..%d, min residual %.6f (1 would mean orthogonal, "
              "0 a perfect wave)\n",
              n_min, n_max, min_residual);
  return 0;
}

// ---------------------------------------------------------------------------
// verify

EnergySweep synthetic_sweep(const std::vector<double>& grid,
                            const std::function<double(double)>& energy) {
  EnergySweep sweep;
  sweep.config = "synthetic";
  for (double d : grid) sweep.rows.push_back({d, energy(d), 1, 0.0});
  std::sort(sweep.rows.begin(), sweep.rows.end(),
            [](const SweepRow& a, const SweepRow& b) { return a.delta > b.delta; });
  return sweep;
}

int cmd_verify(const Options& opt) {
  RunConfig config = load_config(opt);
  LameParameters unit{1.0, 1.0};
  LameParameters skew{2.2, 0.7};
  constexpr double kPi = 3.14159265358979323846;
  int passed = 0, total = 0;

  auto check = [&](const char* name, const std::function<bool()>& body) {
    ++total;
    bool ok = false;
    std::string note;
    try {
      ok = body();
    } catch (const std::exception& e) {
      note = std::string(" (") + e.what() + ")";
    }
    std::printf("%s | %s%s\n", ok ? "ok  " : "FAIL", name, note.c_str());
    if (ok) ++passed;
  };

  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };

  // --- moduli and closed forms ---------------------------------------------
  check("convexity guard rejects mu <= 0", [] {
    try {
      require_convex({1.0, -1.0}, 2);
    } catch (const std::invalid_argument&) {
      return true;
    }
    return false;
  });
  check("shear-family constant at lambda = mu = 1 is -1/2", [&] {
    return plasmon_constant(unit, PlasmonFamily::ShearFamily) == -0.5;
  });
  check("the two family constants are reciprocal", [&] {
    return std::abs(plasmon_constant(skew, PlasmonFamily::ShearFamily) *
                        plasmon_constant(skew, PlasmonFamily::AltFamily) -
                    1.0) < 1e-14;
  });
  check("closed-form wave energy (k=1, R=1) is 6 pi",
        [&] { return rel(perfect_wave_energy(1, 1.0, unit), 6.0 * kPi) < 1e-14; });
  check("closed-form wave energy (k=2, R=1) is 12 pi",
        [&] { return rel(perfect_wave_energy(2, 1.0, unit), 12.0 * kPi) < 1e-14; });
  check("closed-form wave energy (k=2, R=2) is 192 pi",
        [&] { return rel(perfect_wave_energy(2, 2.0, unit), 192.0 * kPi) < 1e-14; });
  check("wave energy matches its integrated value", [&] {
    PiecewiseModeField w = perfect_wave(3, 0.5, skew);
    double integrated = bilinear_P(skew, w, w).real();
    return std::abs(integrated - perfect_wave_energy(3, 0.5, skew)) <
           1e-7 * perfect_wave_energy(3, 0.5, skew);
  });

  // --- perfect interface waves ---------------------------------------------
  auto continuity = [](const PiecewiseModeField& f, double r) {
    AngularFunction gap = trace(f, r, Side::Outer);
    gap.accumulate(trace(f, r, Side::Inner), -1.0);
    return gap.max_abs();
  };
  check("wave is continuous across its interface (outside variant)", [&] {
    return continuity(perfect_wave(5, 2.0, skew), 2.0) < 1e-12;
  });
  check("wave is continuous across its interface (inside variant)", [&] {
    return continuity(perfect_wave(4, 2.0, skew, WaveVariant::ShellInside), 2.0) < 1e-12;
  });
  check("traction ratio equals the shear-family constant", [&] {
    PiecewiseModeField w = perfect_wave(4, 2.0, skew);
    AngularFunction outer = conormal(skew, w, 2.0, Side::Outer);
    AngularFunction inner = conormal(skew, w, 2.0, Side::Inner);
    outer.accumulate(inner, -plasmon_constant(skew, PlasmonFamily::ShearFamily));
    return outer.max_abs() < 1e-10 * inner.max_abs();
  });
  check("traction ratio equals the alt-family constant (inside variant)", [&] {
    PiecewiseModeField w = perfect_wave(4, 2.0, skew, WaveVariant::ShellInside);
    AngularFunction outer = conormal(skew, w, 2.0, Side::Outer);
    AngularFunction inner = conormal(skew, w, 2.0, Side::Inner);
    outer.accumulate(inner, -plasmon_constant(skew, PlasmonFamily::AltFamily));
    return outer.max_abs() < 1e-10 * inner.max_abs();
  });
  check("waves solve the homogeneous system piece by piece", [&] {
    PiecewiseModeField residual = lame_apply(skew, perfect_wave(6, 1.5, skew));
    for (const Piece& piece : residual.pieces)
      if (!piece.terms.empty()) return false;
    return true;
  });

  // --- transmission solver --------------------------------------------------
  RadialProfile nocore = RadialProfile::no_core(2.0, -0.5, 1e-3);
  check("transmission solve leaves no interface residual", [&] {
    return solve_mode(nocore, unit, 3, WaveFamily::F2, 1.0, 3.0).max_residual() < 1e-9;
  });
  check("an empty source stores nothing", [&] {
    return solve_configuration(nocore, unit, SourceSpectrum{}).total_energy == 0.0;
  });
  check("a lossless resonance surfaces as a conditioning error", [&] {
    RadialProfile sharp = RadialProfile::no_core(2.0, -0.5, 1e-12);
    try {
      solve_mode(sharp, unit, 3, WaveFamily::F2, 1.0, 3.0);
    } catch (const NearSingularError& e) {
      return e.rcond < 1e-13 && e.delta == 1e-12;
    }
    return false;
  });
  check("the solution splits exactly into real and imaginary parts", [&] {
    LayeredModeSolution sol = solve_mode(nocore, unit, 3, WaveFamily::F2, 1.0, 3.0);
    SplitPair split = real_imag_split(sol);
    for (double r : {0.7, 1.9, 2.4, 3.6}) {
      auto u = evaluate_polar(sol.field, r, 0.9);
      auto v = evaluate_polar(split.v, r, 0.9);
      auto w = evaluate_polar(split.w, r, 0.9);
      for (int comp = 0; comp < 2; ++comp) {
        Complex rebuilt = v[comp] + Complex(0.0, 1.0) * w[comp] / 1e-3;
        if (std::abs(rebuilt - u[comp]) > 1e-9 * std::max(1.0, std::abs(u[comp])))
          return false;
      }
    }
    return true;
  });

  // --- energy sweeps ---------------------------------------------------------
  SourceSpectrum drive3;
  drive3.q = 3.0;
  drive3.set_gamma(3, 1.0);
  std::vector<double> quick{1e-1, 1e-2, 1e-3, 1e-4};
  check("a uniform medium is loss-flat", [&] {
    EnergySweep flat = sweep(RadialProfile::uniform(1e-3), unit, drive3, quick, 1);
    double lo = flat.rows[0].energy, hi = lo;
    for (const SweepRow& row : flat.rows) {
      lo = std::min(lo, row.energy);
      hi = std::max(hi, row.energy);
    }
    return hi / lo < 1.05;
  });
  EnergySweep blowup = sweep(nocore, unit, drive3, quick, 1);
  check("the coreless shell stores ever more energy as loss vanishes", [&] {
    for (size_t i = 1; i < blowup.rows.size(); ++i)
      if (blowup.rows[i].energy <= blowup.rows[i - 1].energy) return false;
    return true;
  });
  check("its fitted growth exponent is 2", [&] {
    Classification c = classify(blowup);
    return c.verdict == Verdict::Resonant && std::abs(c.growth_exponent - 2.0) < 0.15;
  });
  check("its dominant order is the driven one", [&] {
    for (const SweepRow& row : blowup.rows)
      if (row.dominant_k != 3) return false;
    return true;
  });
  check("sweep rendering is byte-stable across repeats", [&] {
    EnergySweep again = sweep(nocore, unit, drive3, quick, 1);
    return sweep_csv(again) == sweep_csv(blowup);
  });
  check("parallel and serial sweeps agree byte for byte", [&] {
    EnergySweep parallel = sweep(nocore, unit, drive3, quick, 4);
    return sweep_csv(parallel) == sweep_csv(blowup);
  });

  // --- variational bounds ----------------------------------------------------
  check("the duality sandwich closes on the coreless run", [&] {
    double delta = 1e-2;
    RadialProfile profile = RadialProfile::no_core(2.0, -0.5, delta);
    double energy = solve_configuration(profile, unit, drive3).total_energy;
    double tau = nocore_optimal_tau(3, 1.0, delta, unit, 2.0, 3.0);
    double lower = dual_J(delta, drive3, nocore_dual_trial(3, tau, unit, 2.0), unit);
    double upper = primal_I(delta, solution_primal_pair(profile, unit, drive3), unit);
    return sandwich_check(energy, upper, lower, 1e-8 * std::max(1.0, energy)).ok;
  });
  check("the dual bound turns sharp as loss vanishes", [&] {
    double delta = 1e-4;
    RadialProfile profile = RadialProfile::no_core(2.0, -0.5, delta);
    double energy = solve_configuration(profile, unit, drive3).total_energy;
    double tau = nocore_optimal_tau(3, 1.0, delta, unit, 2.0, 3.0);
    double lower = dual_J(delta, drive3, nocore_dual_trial(3, tau, unit, 2.0), unit);
    return lower / energy > 0.9 && lower / energy < 1.0 + 1e-9;
  });
  check("the cored lower-bound sequence grows", [&] {
    std::vector<double> gamma(32, 1.0);
    gamma[0] = 0.0;
    double previous = 0.0;
    for (double delta : {1e-2, 1e-4, 1e-6}) {
      CoreDualTrial trial = core_dual_trial(delta, unit, 2.0, 2.5, gamma);
      if (trial.degenerate || trial.growth_bound <= previous) return false;
      previous = trial.growth_bound;
    }
    return true;
  });
  check("the tuned cored run keeps bounded upper values", [&] {
    std::vector<double> beta(13, 0.0);
    for (int k = 3; k <= 12; ++k) beta[k] = 1.0 / (static_cast<double>(k) * k);
    double lo = 0.0, hi = 0.0;
    for (double delta : {1e-1, 1e-3, 1e-5}) {
      double value =
          nonresonant_primal_trial(delta, unit, 2.0, 3.5, beta).value / delta;
      if (lo == 0.0) lo = hi = value;
      lo = std::min(lo, value);
      hi = std::max(hi, value);
    }
    return hi / lo < 2.0;
  });

  // --- classifier rules ------------------------------------------------------
  std::vector<double> grid = default_delta_grid();
  check("power-law growth classifies as resonant", [&] {
    Classification c = classify(synthetic_sweep(grid, [](double d) { return 1.0 / d; }));
    return c.verdict == Verdict::Resonant && std::abs(c.growth_exponent - 1.0) < 0.01;
  });
  check("flat rows classify as non-resonant", [&] {
    Classification c = classify(synthetic_sweep(grid, [](double) { return 7.0; }));
    return c.verdict == Verdict::NonResonant && c.tail_variation < 1e-12;
  });
  check("oscillating rows with growing peaks are weakly resonant", [&] {
    std::vector<double> dense;
    for (int j = 0; j <= 28; ++j) dense.push_back(std::pow(10.0, -(1.0 + 7.0 * j / 28.0)));
    Classification c = classify(synthetic_sweep(
        dense, [](double d) { return std::abs(std::sin(std::log(1.0 / d))) / d + 1.0; }));
    return c.verdict == Verdict::WeaklyResonant;
  });
  check("classification ignores the energy scale", [&] {
    auto base = synthetic_sweep(grid, [](double d) { return std::pow(d, -1.3); });
    auto scaled = synthetic_sweep(grid, [](double d) { return 3.7e5 * std::pow(d, -1.3); });
    Classification a = classify(base), b = classify(scaled);
    return a.verdict == b.verdict && std::abs(a.growth_exponent - b.growth_exponent) < 1e-12;
  });

  // --- pinned schedules and coefficients --------------------------------------
  check("wave-order schedule matches its pinned values", [&] {
    return select_k_delta(2.0, 0.1) == 4 && select_k_delta(2.0, 0.25) == 3 &&
           select_k_delta(10.0, 1e-3) == 4;
  });
  check("split-order schedule matches its pinned values", [&] {
    return select_k_star(2.0, 0.1) == 4 && select_k_star(2.0, 0.5) == 1 &&
           select_k_star(3.0, 0.01) == 5;
  });
  check("the coefficient tie-in matches its pinned value", [&] {
    return std::abs(source_coefficient_relation(unit, 4.0, 2.0, 3) - (-8.0 / 3.0)) < 1e-14;
  });
  check("the tuned companion coefficient is -0.375", [&] {
    std::vector<double> beta(4, 0.0);
    beta[3] = 1.0;
    SourceSpectrum tuned = make_nonresonant_source(unit, 4.0, 2.0, beta);
    return std::abs(tuned.gamma_at(1) - (-0.375)) < 1e-14;
  });

  // --- three-dimensional families ---------------------------------------------
  check("3-D planted control recovers the multiple", [&] {
    std::vector<double> base, target;
    for (int i = 0; i < 25; ++i) {
      double z = 1.0 - (2.0 * i + 1.0) / 25.0;
      double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      Vec3 dir{rho * std::cos(2.39996322972865332 * i),
               rho * std::sin(2.39996322972865332 * i), z};
      double v = conormal_first_component(unit, SphericalKind::MGrow, 2, 1, dir);
      base.push_back(v);
      target.push_back(3.0 * v);
    }
    FitResult fit = proportionality_fit(base, target);
    return !fit.degenerate && std::abs(fit.c - 3.0) < 1e-12 && fit.residual < 1e-12;
  });
  check("3-D kinds are not proportional across radii", [&] {
    return proportionality_test(unit, 2, 1, 60).relative_residual > 0.1;
  });
  check("3-D residual matches its closed form", [&] {
    auto shell_sum = [](double a) { return std::pow(0.5, a) + 1.0 + std::pow(2.0, a); };
    double s3 = shell_sum(-3.0);
    double expected = std::sqrt(1.0 - s3 * s3 / (shell_sum(2.0) * shell_sum(-8.0)));
    return std::abs(proportionality_test(unit, 2, 1, 60).relative_residual - expected) < 1e-10;
  });
  check("3-D sphere pattern is tangential", [&] {
    Vec3 p{0.6, 0.0, 0.8};
    Vec3 b = eval_B(3, 2, p);
    return std::abs(b[0] * p[0] + b[1] * p[1] + b[2] * p[2]) < 1e-12;
  });

  // --- configuration plumbing -------------------------------------------------
  check("config canonicalization is stable", [&] {
    RunConfig copy = config;
    return config_hash(copy) == config_hash(config) &&
           canonical_config(copy) == canonical_config(config);
  });
  check("an override changes the hash exactly when it changes a value", [&] {
    RunConfig copy = config;
    apply_override(copy, "sweep.points=" + std::to_string(config.points));
    if (config_hash(copy) != config_hash(config)) return false;
    apply_override(copy, "sweep.points=" + std::to_string(config.points + 1));
    return config_hash(copy) != config_hash(config);
  });
  check("replay classification handles a constant table", [&] {
    EnergySweep flat = synthetic_sweep(grid, [](double) { return 4.2; });
    std::istringstream csv(sweep_csv(flat));
    EnergySweep replayed = read_sweep_csv(csv, "inline");
    return classify(replayed).verdict == Verdict::NonResonant;
  });

  std::printf("verify: %d/%d checks passed\n", passed, total);

  Options out_opt = opt;
  json m = manifest_base("verify", config, 0.0);
  m["checks_total"] = total;
  m["checks_passed"] = passed;
  write_manifest(resolve_output(out_opt, config), "verify", m);
  return passed == total ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "alrlab: semi-analytic laboratory for anomalous localized resonance in planar "
      "elastic composites"};
  app.set_version_flag("--version", std::string("alrlab ") + kVersion);
  app.require_subcommand(1);
  app.fallthrough();  // inherited: lets "alrlab sweep --config x" reach the global options

  Options opt;
  app.add_option("-c,--config", opt.config_path,
                 "INI run description with sections [lame], [profile], [source], [sweep]");
  app.add_option("--set", opt.overrides,
                 "Override one config key, e.g. --set profile.R=2.5 (repeatable)");
  app.add_option("-o,--output", opt.output_dir,
                 "Output directory (default: config output_dir, else $ALRLAB_OUTPUT_DIR, "
                 "else the working directory)");

  app.add_subcommand("verify",
                     "Run the built-in invariant suite (closed forms, wave identities, "
                     "solver residuals, bounds, classifier rules) and exit 0 on pass");

  app.add_subcommand("sweep",
                     "Solve across the loss grid; writes sweep.csv with columns "
                     "(delta, energy, dominant_k, trunc_bound), energy per unit loss");

  std::string replay;
  CLI::App* classify_cmd = app.add_subcommand(
      "classify",
      "Sweep (or replay a sweep.csv) and classify the loss response as Resonant / "
      "WeaklyResonant / NonResonant / Undetermined");
  classify_cmd->add_option("--replay", replay,
                           "Classify this previously written sweep CSV instead of solving");

  double q_min = 2.1, q_max = 3.5, q_step = 0.1;
  CLI::App* scan_cmd = app.add_subcommand(
      "critical-radius",
      "Scan source radii for the resonance transition; writes critical_radius.csv with "
      "columns (q, verdict, growth_exponent)");
  scan_cmd->add_option("--q-min", q_min, "Smallest source radius")->capture_default_str();
  scan_cmd->add_option("--q-max", q_max, "Largest source radius")->capture_default_str();
  scan_cmd->add_option("--q-step", q_step, "Grid step")->capture_default_str();

  app.add_subcommand("bounds",
                     "Two-sided variational certificates per loss level; writes bounds.csv "
                     "with columns (delta, J, E, I); exits 3 if any sandwich fails");

  double field_delta = 1e-3, r_max = 0.0;
  int radial = 48, angular = 72;
  CLI::App* field_cmd = app.add_subcommand(
      "plasmon-field",
      "Sample the solved displacement field on a polar grid; writes field.csv with "
      "columns (r, theta, u1_re, u1_im, u2_re, u2_im)");
  field_cmd->add_option("--delta", field_delta, "Loss level")->capture_default_str();
  field_cmd->add_option("--r-max", r_max, "Outer sampling radius (0 = 1.25 q)")
      ->capture_default_str();
  field_cmd->add_option("--radial", radial, "Radial sample count")->capture_default_str();
  field_cmd->add_option("--angular", angular, "Angular sample count")->capture_default_str();

  int n_min = 2, n_max = 4, samples = 60;
  CLI::App* threed_cmd = app.add_subcommand(
      "threed-check",
      "Three-dimensional proportionality table; writes threed_check.csv with columns "
      "(n, m, best_c, residual)");
  threed_cmd->add_option("--n-min", n_min, "Smallest order")->capture_default_str();
  threed_cmd->add_option("--n-max", n_max, "Largest order")->capture_default_str();
  threed_cmd->add_option("--samples", samples, "Sample points per (n, m)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand("verify")) return cmd_verify(opt);
    if (app.got_subcommand("sweep")) return cmd_sweep(opt);
    if (app.got_subcommand("classify")) return cmd_classify(opt, replay);
    if (app.got_subcommand("critical-radius"))
      return cmd_critical_radius(opt, q_min, q_max, q_step);
    if (app.got_subcommand("bounds")) return cmd_bounds(opt);
    if (app.got_subcommand("plasmon-field"))
      return cmd_field(opt, field_delta, r_max, radial, angular);
    if (app.got_subcommand("threed-check")) return cmd_threed(opt, n_min, n_max, samples);
  } catch (const NearSingularError& e) {
    std::fprintf(stderr, "alrlab: numerical failure: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "alrlab: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "alrlab: %s\n", e.what());
    return 2;
  }
  return 1;
}
