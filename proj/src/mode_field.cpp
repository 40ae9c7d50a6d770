#include "alrlab/mode_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace alrlab {

namespace {

constexpr double kBreakTol = 1e-12;

bool same_break(double a, double b) {
  return std::abs(a - b) <= kBreakTol * std::max({1.0, std::abs(a), std::abs(b)});
}

Complex unit_phase(int m, double theta) { return std::polar(1.0, m * theta); }

}  // namespace

PiecewiseModeField PiecewiseModeField::over(const std::vector<double>& breakpoints) {
  PiecewiseModeField f;
  double prev = 0.0;
  for (double b : breakpoints) {
    if (!(b > prev))
      throw std::invalid_argument("PiecewiseModeField::over: breakpoints must be positive and strictly increasing");
    f.pieces.push_back(Piece{prev, b, {}});
    prev = b;
  }
  f.pieces.push_back(Piece{prev, kInf, {}});
  return f;
}

std::vector<double> PiecewiseModeField::breakpoints() const {
  std::vector<double> out;
  for (const Piece& pc : pieces)
    if (std::isfinite(pc.r_hi)) out.push_back(pc.r_hi);
  return out;
}

const Piece& PiecewiseModeField::piece_at(double r, Side side) const {
  if (pieces.empty()) throw std::logic_error("piece_at: empty field");
  if (!(r > 0.0) && side == Side::Inner)
    throw std::invalid_argument("piece_at: no inner limit at the origin");
  for (const Piece& pc : pieces) {
    const bool at_lo = same_break(r, pc.r_lo);
    const bool at_hi = std::isfinite(pc.r_hi) && same_break(r, pc.r_hi);
    if (at_lo) {
      if (side == Side::Outer) return pc;
      continue;
    }
    if (at_hi) {
      if (side == Side::Inner) return pc;
      continue;
    }
    if (r > pc.r_lo && r < pc.r_hi) return pc;
  }
  throw std::invalid_argument("piece_at: radius not covered");
}

void PiecewiseModeField::add_term(std::size_t piece_index, Complex c, int p, int m, int spin) {
  if (spin != 1 && spin != -1) throw std::invalid_argument("add_term: spin must be +1 or -1");
  pieces.at(piece_index).terms.push_back(Term{c, p, m, spin});
}

void PiecewiseModeField::add_pattern(std::size_t piece_index, Complex c, int p, int m) {
  add_term(piece_index, c, p, m, +1);
  add_term(piece_index, std::conj(c), p, -m, -1);
}

void PiecewiseModeField::scale(Complex s) {
  for (Piece& pc : pieces)
    for (Term& t : pc.terms) t.c *= s;
}

void PiecewiseModeField::accumulate(const PiecewiseModeField& other, Complex weight) {
  std::vector<double> merged_breaks = breakpoints();
  for (double b : other.breakpoints()) {
    bool present = false;
    for (double e : merged_breaks) present = present || same_break(b, e);
    if (!present) merged_breaks.push_back(b);
  }
  std::sort(merged_breaks.begin(), merged_breaks.end());

  PiecewiseModeField merged = over(merged_breaks);
  merged.k = k;
  merged.family = family;
  for (Piece& pc : merged.pieces) {
    const double rep = std::isfinite(pc.r_hi) ? 0.5 * (pc.r_lo + pc.r_hi) : pc.r_lo + 1.0;
    for (const Term& t : piece_at(rep, Side::Outer).terms) pc.terms.push_back(t);
    for (const Term& t : other.piece_at(rep, Side::Outer).terms)
      pc.terms.push_back(Term{weight * t.c, t.p, t.m, t.spin});
  }
  pieces = std::move(merged.pieces);
}

void PiecewiseModeField::normalize() {
  for (Piece& pc : pieces) {
    std::map<std::tuple<int, int, int>, std::pair<Complex, double>> acc;
    for (const Term& t : pc.terms) {
      auto& slot = acc[{t.p, t.m, t.spin}];
      slot.first += t.c;
      slot.second += std::abs(t.c);
    }
    pc.terms.clear();
    for (const auto& [key, slot] : acc) {
      if (std::abs(slot.first) > 1e-14 * slot.second)
        pc.terms.push_back(Term{slot.first, std::get<0>(key), std::get<1>(key), std::get<2>(key)});
    }
  }
}

std::array<Complex, 2> evaluate_polar(const PiecewiseModeField& f, double r, double theta) {
  const Piece& pc = (r <= kBreakTol) ? f.pieces.front() : f.piece_at(r, Side::Outer);
  Complex up(0.0), um(0.0);
  for (const Term& t : pc.terms) {
    double rad;
    if (r <= kBreakTol)
      rad = (t.p == 0) ? 1.0 : (t.p > 0 ? 0.0 : kInf);
    else
      rad = std::pow(r, t.p);
    const Complex val = t.c * rad * unit_phase(t.m, theta);
    if (t.spin > 0)
      up += val;
    else
      um += val;
  }
  return {0.5 * (up + um), Complex(0.0, -0.5) * (up - um)};
}

std::array<Complex, 2> evaluate_xy(const PiecewiseModeField& f, double x1, double x2) {
  const double r = std::hypot(x1, x2);
  const double theta = (r == 0.0) ? 0.0 : std::atan2(x2, x1);
  return evaluate_polar(f, r, theta);
}

std::array<Complex, 2> AngularFunction::evaluate(double theta) const {
  Complex fp(0.0), fm(0.0);
  for (const auto& [m, c] : plus) fp += c * unit_phase(m, theta);
  for (const auto& [m, c] : minus) fm += c * unit_phase(m, theta);
  return {0.5 * (fp + fm), Complex(0.0, -0.5) * (fp - fm)};
}

AngularFunction& AngularFunction::accumulate(const AngularFunction& g, Complex weight) {
  for (const auto& [m, c] : g.plus) plus[m] += weight * c;
  for (const auto& [m, c] : g.minus) minus[m] += weight * c;
  return *this;
}

double AngularFunction::max_abs() const {
  double out = 0.0;
  for (const auto& [m, c] : plus) out = std::max(out, std::abs(c));
  for (const auto& [m, c] : minus) out = std::max(out, std::abs(c));
  return out;
}

int AngularFunction::max_order() const {
  int out = 0;
  for (const auto& [m, c] : plus)
    if (std::abs(c) > 0.0) out = std::max(out, std::abs(m));
  for (const auto& [m, c] : minus)
    if (std::abs(c) > 0.0) out = std::max(out, std::abs(m));
  return out;
}

Complex AngularFunction::plus_at(int m) const {
  auto it = plus.find(m);
  return it == plus.end() ? Complex(0.0) : it->second;
}

Complex AngularFunction::minus_at(int m) const {
  auto it = minus.find(m);
  return it == minus.end() ? Complex(0.0) : it->second;
}

Complex AngularFunction::component_cos(int component, int m) const {
  if (m < 0) throw std::invalid_argument("component_cos: m must be >= 0");
  auto chan = [&](int mm) {
    return component == 0 ? 0.5 * (plus_at(mm) + minus_at(mm))
                          : Complex(0.0, -0.5) * (plus_at(mm) - minus_at(mm));
  };
  return (m == 0) ? chan(0) : chan(m) + chan(-m);
}

Complex AngularFunction::component_sin(int component, int m) const {
  if (m < 0) throw std::invalid_argument("component_sin: m must be >= 0");
  if (m == 0) return Complex(0.0);
  auto chan = [&](int mm) {
    return component == 0 ? 0.5 * (plus_at(mm) + minus_at(mm))
                          : Complex(0.0, -0.5) * (plus_at(mm) - minus_at(mm));
  };
  return Complex(0.0, 1.0) * (chan(m) - chan(-m));
}

AngularFunction trace(const PiecewiseModeField& f, double r, Side side) {
  const Piece& pc = f.piece_at(r, side);
  AngularFunction out;
  for (const Term& t : pc.terms) {
    const Complex val = t.c * std::pow(r, t.p);
    if (t.spin > 0)
      out.plus[t.m] += val;
    else
      out.minus[t.m] += val;
  }
  return out;
}

AngularFunction conormal(const LameParameters& params, const PiecewiseModeField& f,
                         double r, Side side, Complex modulus_scale) {
  const Piece& pc = f.piece_at(r, side);
  const double lm = params.lambda + params.mu;
  AngularFunction out;
  for (const Term& t : pc.terms) {
    const double a = 0.5 * (t.p + t.m);
    const double b = 0.5 * (t.p - t.m);
    const Complex base = modulus_scale * t.c * std::pow(r, t.p - 1);
    if (t.spin > 0) {
      const Complex same = base * (lm * a + 2.0 * params.mu * b);
      const Complex cross = base * (lm * a);
      if (std::abs(same) > 0.0) out.plus[t.m] += same;
      if (std::abs(cross) > 0.0) out.minus[t.m - 2] += cross;
    } else {
      const Complex same = base * (lm * b + 2.0 * params.mu * a);
      const Complex cross = base * (lm * b);
      if (std::abs(same) > 0.0) out.minus[t.m] += same;
      if (std::abs(cross) > 0.0) out.plus[t.m + 2] += cross;
    }
  }
  return out;
}

AngularFunction conormal(const LameParameters& params, const PiecewiseModeField& f, double r) {
  for (double b : f.breakpoints())
    if (same_break(r, b))
      throw std::invalid_argument("conormal: radius sits on a piece boundary; a side must be given");
  return conormal(params, f, r, Side::Outer);
}

PiecewiseModeField lame_apply(const LameParameters& params, const PiecewiseModeField& f) {
  PiecewiseModeField out;
  out.k = f.k;
  out.family = f.family;
  const double lm = params.lambda + params.mu;
  const double bulkish = 4.0 * params.mu + 2.0 * lm;
  for (const Piece& pc : f.pieces) {
    Piece opc{pc.r_lo, pc.r_hi, {}};
    for (const Term& t : pc.terms) {
      const double a = 0.5 * (t.p + t.m);
      const double b = 0.5 * (t.p - t.m);
      opc.terms.push_back(Term{t.c * (a * b * bulkish), t.p - 2, t.m, t.spin});
      if (t.spin > 0)
        opc.terms.push_back(Term{t.c * (2.0 * lm * a * (a - 1.0)), t.p - 2, t.m - 2, -1});
      else
        opc.terms.push_back(Term{t.c * (2.0 * lm * b * (b - 1.0)), t.p - 2, t.m + 2, +1});
    }
    out.pieces.push_back(std::move(opc));
  }
  out.normalize();
  return out;
}

namespace {

struct Mono {
  Complex c;
  int p;
  int m;
};

struct DerivLists {
  std::vector<Mono> div;     // div u = dU + dbarV
  std::vector<Mono> dbar_u;  // dbar of the plus channel
  std::vector<Mono> d_v;     // d of the minus channel
};

DerivLists derivative_lists(const Piece& pc) {
  DerivLists out;
  for (const Term& t : pc.terms) {
    const double a = 0.5 * (t.p + t.m);
    const double b = 0.5 * (t.p - t.m);
    if (t.spin > 0) {
      if (a != 0.0) out.div.push_back({t.c * a, t.p - 1, t.m - 1});
      if (b != 0.0) out.dbar_u.push_back({t.c * b, t.p - 1, t.m + 1});
    } else {
      if (b != 0.0) out.div.push_back({t.c * b, t.p - 1, t.m + 1});
      if (a != 0.0) out.d_v.push_back({t.c * a, t.p - 1, t.m - 1});
    }
  }
  return out;
}

// integral of r^P over (lo, hi); false when divergent
bool radial_integral(int P, double lo, double hi, double& out) {
  if (std::isinf(hi)) {
    if (P + 1 >= 0) return false;
    out = -std::pow(lo, P + 1) / (P + 1);
    return true;
  }
  if (lo == 0.0) {
    if (P + 1 <= 0) return false;
    out = std::pow(hi, P + 1) / (P + 1);
    return true;
  }
  if (P == -1) {
    out = std::log(hi / lo);
    return true;
  }
  out = (std::pow(hi, P + 1) - std::pow(lo, P + 1)) / (P + 1);
  return true;
}

Complex pair_sum(const std::vector<Mono>& fs, const std::vector<Mono>& gs,
                 double lo, double hi) {
  double guard = 0.0;
  for (const Mono& f : fs)
    for (const Mono& g : gs) guard = std::max(guard, std::abs(f.c) * std::abs(g.c));
  Complex acc(0.0);
  const double two_pi = 2.0 * 3.14159265358979323846;
  for (const Mono& f : fs)
    for (const Mono& g : gs) {
      if (f.m != g.m) continue;
      const double mag = std::abs(f.c) * std::abs(g.c);
      if (mag == 0.0) continue;
      double rint = 0.0;
      if (!radial_integral(f.p + g.p + 1, lo, hi, rint)) {
        if (mag <= 1e-13 * guard) continue;  // cancellation residue
        throw std::domain_error("bilinear_P: divergent radial integral");
      }
      acc += f.c * std::conj(g.c) * two_pi * rint;
    }
  return acc;
}

}  // namespace

Complex bilinear_P(const LameParameters& params, const PiecewiseModeField& u,
                   const PiecewiseModeField& v, double r_lo, double r_hi) {
  Complex acc(0.0);
  for (const Piece& pu : u.pieces)
    for (const Piece& pv : v.pieces) {
      const double lo = std::max({pu.r_lo, pv.r_lo, r_lo});
      const double hi = std::min({pu.r_hi, pv.r_hi, r_hi});
      if (!(hi > lo)) continue;
      if (std::isfinite(hi) && same_break(lo, hi)) continue;
      if (pu.terms.empty() || pv.terms.empty()) continue;
      const DerivLists du = derivative_lists(pu);
      const DerivLists dv = derivative_lists(pv);
      acc += (params.lambda + params.mu) * pair_sum(du.div, dv.div, lo, hi);
      acc += 2.0 * params.mu * pair_sum(du.dbar_u, dv.dbar_u, lo, hi);
      acc += 2.0 * params.mu * pair_sum(du.d_v, dv.d_v, lo, hi);
    }
  return acc;
}

Complex circle_dot(const AngularFunction& f, const AngularFunction& g, double r) {
  const double pi = 3.14159265358979323846;
  Complex acc(0.0);
  for (const auto& [m, c] : f.plus) acc += c * g.minus_at(-m);
  for (const auto& [m, c] : f.minus) acc += c * g.plus_at(-m);
  return pi * r * acc;
}

Complex circle_inner(const AngularFunction& f, const AngularFunction& g, double r) {
  const double pi = 3.14159265358979323846;
  Complex acc(0.0);
  for (const auto& [m, c] : f.plus) acc += c * std::conj(g.plus_at(m));
  for (const auto& [m, c] : f.minus) acc += c * std::conj(g.minus_at(m));
  return pi * r * acc;
}

double dissipated_energy(double delta, const PiecewiseModeField& u,
                         const LameParameters& params) {
  if (!(delta > 0.0)) throw std::invalid_argument("dissipated_energy: delta must be positive");
  return 0.5 * delta * bilinear_P(params, u, u).real();
}

void validate_mode_structure(const PiecewiseModeField& f) {
  for (std::size_t i = 0; i < f.pieces.size(); ++i) {
    const Piece& pc = f.pieces[i];
    for (const Term& t : pc.terms) {
      const int o = std::abs(t.m);
      if (o != f.k - 2 && o != f.k && o != f.k + 2)
        throw std::logic_error("mode structure: angular order outside {k-2, k, k+2}");
      if (i == 0 && t.p < 0)
        throw std::logic_error("mode structure: negative power in the innermost piece");
      if (std::isinf(pc.r_hi) && t.p > -1)
        throw std::logic_error("mode structure: non-decaying exterior term");
    }
  }
}

}  // namespace alrlab
