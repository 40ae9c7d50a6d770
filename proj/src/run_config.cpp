#include "alrlab/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>
#include <stdexcept>

#include "alrlab/variational.hpp"

namespace alrlab {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument(where + ": " + what);
}

double parse_number(const std::string& value, const std::string& where) {
  if (value.empty()) fail(where, "empty value");
  char* end = nullptr;
  double out = std::strtod(value.c_str(), &end);
  if (end != value.c_str() + value.size()) fail(where, "'" + value + "' is not a number");
  return out;
}

int parse_int(const std::string& value, const std::string& where) {
  double d = parse_number(value, where);
  int i = static_cast<int>(d);
  if (static_cast<double>(i) != d) fail(where, "'" + value + "' is not an integer");
  return i;
}

// "k:v" tokens separated by whitespace, e.g. "3:1 5:0.25".
std::vector<std::pair<int, double>> parse_pairs(const std::string& value,
                                                const std::string& where) {
  std::vector<std::pair<int, double>> out;
  std::istringstream stream(value);
  std::string token;
  while (stream >> token) {
    size_t colon = token.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == token.size())
      fail(where, "list entries look like order:value, got '" + token + "'");
    int k = parse_int(token.substr(0, colon), where);
    double v = parse_number(token.substr(colon + 1), where);
    if (k < 1) fail(where, "list orders start at 1, got " + std::to_string(k));
    for (const auto& [prev, unused] : out)
      if (prev == k) fail(where, "order " + std::to_string(k) + " listed twice");
    out.emplace_back(k, v);
  }
  return out;
}

void assign(RunConfig& config, const std::string& section, const std::string& key,
            const std::string& value, const std::string& where) {
  if (section == "lame") {
    if (key == "lambda") config.lambda = parse_number(value, where);
    else if (key == "mu") config.mu = parse_number(value, where);
    else fail(where, "unknown key '" + key + "' in [lame]");
  } else if (section == "profile") {
    if (key == "core_radius") config.core_radius = parse_number(value, where);
    else if (key == "R") config.shell_radius = parse_number(value, where);
    else if (key == "family") config.family = value;
    else if (key == "c") {
      config.shell_c = parse_number(value, where);
      config.shell_c_set = true;
    } else fail(where, "unknown key '" + key + "' in [profile]");
  } else if (section == "source") {
    if (key == "q") config.q = parse_number(value, where);
    else if (key == "generator") config.generator = value;
    else if (key == "k") config.mode_k = parse_int(value, where);
    else if (key == "amplitude") config.amplitude = parse_number(value, where);
    else if (key == "max_order") config.max_order = parse_int(value, where);
    else if (key == "gamma") config.gamma = parse_pairs(value, where);
    else if (key == "beta") config.beta = parse_pairs(value, where);
    else fail(where, "unknown key '" + key + "' in [source]");
  } else if (section == "sweep") {
    if (key == "delta_min") config.delta_min = parse_number(value, where);
    else if (key == "delta_max") config.delta_max = parse_number(value, where);
    else if (key == "points") config.points = parse_int(value, where);
    else if (key == "max_parallelism") config.max_parallelism = parse_int(value, where);
    else if (key == "resonant_exponent") config.resonant_exponent = parse_number(value, where);
    else if (key == "nonresonant_variation")
      config.nonresonant_variation = parse_number(value, where);
    else if (key == "output_dir") config.output_dir = value;
    else fail(where, "unknown key '" + key + "' in [sweep]");
  } else {
    fail(where, "unknown section [" + section + "]");
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_pairs(std::vector<std::pair<int, double>> pairs) {
  std::sort(pairs.begin(), pairs.end());
  std::string out;
  for (const auto& [k, v] : pairs) {
    if (!out.empty()) out += ',';
    out += std::to_string(k) + ':' + fmt(v);
  }
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::set<std::string> seen;
  std::string section;
  std::istringstream stream(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    std::string where = "config line " + std::to_string(line_no);
    size_t comment = raw.find_first_of("#;");
    std::string line = trim(comment == std::string::npos ? raw : raw.substr(0, comment));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(where, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "lame" && section != "profile" && section != "source" &&
          section != "sweep")
        fail(where, "unknown section [" + section + "]");
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos) fail(where, "expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(where, "empty key");
    if (section.empty()) fail(where, "key '" + key + "' appears before any [section]");
    if (!seen.insert(section + "." + key).second)
      fail(where, "duplicate key " + section + "." + key);
    assign(config, section, key, value, where);
  }
  for (const char* required : {"lame.lambda", "lame.mu", "profile.R", "source.q"})
    if (!seen.count(required))
      throw std::invalid_argument(std::string("config: missing required key ") + required);
  validate_config(config);
  return config;
}

void apply_override(RunConfig& config, const std::string& spec) {
  std::string where = "override '" + spec + "'";
  size_t eq = spec.find('=');
  if (eq == std::string::npos) fail(where, "expected section.key=value");
  std::string path = trim(spec.substr(0, eq));
  std::string value = trim(spec.substr(eq + 1));
  size_t dot = path.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == path.size())
    fail(where, "expected section.key=value");
  assign(config, path.substr(0, dot), path.substr(dot + 1), value, where);
}

void validate_config(const RunConfig& config) {
  require_convex(config_lame(config), 2);
  for (double v : {config.lambda, config.mu, config.core_radius, config.shell_radius,
                   config.shell_c, config.q, config.amplitude, config.delta_min,
                   config.delta_max, config.resonant_exponent, config.nonresonant_variation})
    if (!std::isfinite(v)) throw std::invalid_argument("config: non-finite value");

  if (!(config.shell_radius > 0.0))
    throw std::invalid_argument("profile.R must be positive");
  if (config.core_radius < 0.0)
    throw std::invalid_argument("profile.core_radius must be >= 0");
  if (config.core_radius >= config.shell_radius)
    throw std::invalid_argument("profile.core_radius must lie inside profile.R");

  if (config.family != "shear" && config.family != "alt" && config.family != "explicit")
    throw std::invalid_argument("profile.family must be shear, alt, or explicit");
  if (config.family == "explicit" && !config.shell_c_set)
    throw std::invalid_argument("profile.family = explicit needs profile.c");
  if (config.family != "explicit" && config.shell_c_set)
    throw std::invalid_argument("profile.c requires profile.family = explicit");

  if (!(config.q > config.shell_radius))
    throw std::invalid_argument("source circle must lie outside the shell (q <= R)");

  const std::string& g = config.generator;
  if (g != "single-mode" && g != "unit-gamma" && g != "tuned-nonresonant" && g != "explicit")
    throw std::invalid_argument(
        "source.generator must be single-mode, unit-gamma, tuned-nonresonant, or explicit");
  if (g == "single-mode" && config.mode_k < 1)
    throw std::invalid_argument("source.k must be >= 1");
  if (g != "explicit" && !config.gamma.empty())
    throw std::invalid_argument("source.gamma requires generator = explicit");
  if (!config.beta.empty() && g != "explicit" && g != "tuned-nonresonant")
    throw std::invalid_argument(
        "source.beta requires generator = explicit or tuned-nonresonant");
  if (g == "tuned-nonresonant")
    for (const auto& [k, v] : config.beta)
      if (k < 3)
        throw std::invalid_argument("tuned-nonresonant beta entries start at order 3");
  if (config.max_order < 0) throw std::invalid_argument("source.max_order must be >= 0");
  if (g == "unit-gamma" && config.max_order == 0 && config.shell_radius <= 1.0)
    throw std::invalid_argument("unit-gamma with R <= 1 needs an explicit source.max_order");

  if (!(config.delta_min > 0.0 && config.delta_min < config.delta_max &&
        config.delta_max < 1.0))
    throw std::invalid_argument("sweep needs 0 < delta_min < delta_max < 1");
  if (config.points < 4)
    throw std::invalid_argument("sweep.points must be at least 4");
  if (config.max_parallelism < 0)
    throw std::invalid_argument("sweep.max_parallelism must be >= 0");
  if (!(config.resonant_exponent > 0.0) || !(config.nonresonant_variation > 0.0))
    throw std::invalid_argument("classification thresholds must be positive");
}

LameParameters config_lame(const RunConfig& config) { return {config.lambda, config.mu}; }

RadialProfile config_profile(const RunConfig& config, double delta) {
  double c = config.family == "explicit"
                 ? config.shell_c
                 : plasmon_constant(config_lame(config), config.family == "alt"
                                                             ? PlasmonFamily::AltFamily
                                                             : PlasmonFamily::ShearFamily);
  if (config.core_radius > 0.0)
    return RadialProfile::with_core(config.core_radius, config.shell_radius, 1.0, c, delta);
  return RadialProfile::no_core(config.shell_radius, c, delta);
}

SourceSpectrum config_source(const RunConfig& config) {
  SourceSpectrum source;
  source.q = config.q;
  if (config.generator == "single-mode") {
    if (config.amplitude != 0.0) source.set_gamma(config.mode_k, config.amplitude);
  } else if (config.generator == "unit-gamma") {
    int top = config.max_order > 0
                  ? config.max_order
                  : select_k_delta(config.shell_radius, config.delta_min) + 4;
    for (int k = 1; k <= top; ++k) source.set_gamma(k, 1.0);
  } else if (config.generator == "tuned-nonresonant") {
    std::vector<double> beta(13, 0.0);
    if (config.beta.empty()) {
      for (int k = 3; k <= 12; ++k) beta[k] = 1.0 / (static_cast<double>(k) * k);
    } else {
      int top = 0;
      for (const auto& [k, v] : config.beta) top = std::max(top, k);
      beta.assign(top + 1, 0.0);
      for (const auto& [k, v] : config.beta) beta[k] = v;
    }
    source = make_nonresonant_source(config_lame(config), config.q, config.shell_radius, beta);
  } else {  // explicit
    for (const auto& [k, v] : config.gamma) source.set_gamma(k, v);
    for (const auto& [k, v] : config.beta) source.set_beta(k, v);
  }
  return source;
}

std::vector<double> config_delta_grid(const RunConfig& config) {
  std::vector<double> grid(config.points);
  double top = std::log10(config.delta_max);
  double bottom = std::log10(config.delta_min);
  for (int j = 0; j < config.points; ++j)
    grid[j] = std::pow(10.0, top + (bottom - top) * j / (config.points - 1.0));
  return grid;
}

Thresholds config_thresholds(const RunConfig& config) {
  Thresholds t;
  t.resonant_exponent = config.resonant_exponent;
  t.nonresonant_variation = config.nonresonant_variation;
  return t;
}

std::string canonical_config(const RunConfig& config) {
  std::vector<std::string> lines = {
      "lame.lambda=" + fmt(config.lambda),
      "lame.mu=" + fmt(config.mu),
      "profile.R=" + fmt(config.shell_radius),
      "profile.c=" + fmt(config.shell_c),
      "profile.core_radius=" + fmt(config.core_radius),
      "profile.family=" + config.family,
      "source.amplitude=" + fmt(config.amplitude),
      "source.beta=" + fmt_pairs(config.beta),
      "source.gamma=" + fmt_pairs(config.gamma),
      "source.generator=" + config.generator,
      "source.k=" + std::to_string(config.mode_k),
      "source.max_order=" + std::to_string(config.max_order),
      "sweep.delta_max=" + fmt(config.delta_max),
      "sweep.delta_min=" + fmt(config.delta_min),
      "sweep.max_parallelism=" + std::to_string(config.max_parallelism),
      "sweep.nonresonant_variation=" + fmt(config.nonresonant_variation),
      "sweep.points=" + std::to_string(config.points),
      "sweep.resonant_exponent=" + fmt(config.resonant_exponent),
  };
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const std::string& line : lines) {
    out += line;
    out += '\n';
  }
  return out;
}

uint64_t fnv1a64(const std::string& text) {
  uint64_t hash = 14695981039346656037ull;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string config_hash(const RunConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_config(config))));
  return buf;
}

}  // namespace alrlab
