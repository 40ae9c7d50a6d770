#include "alrlab/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace alrlab {
namespace {

constexpr double kRcondFloor = 1e-13;

// ---------------------------------------------------------------------------
// Channel-split homogeneous basis.
//
// For one angular block the solution space splits into two independent
// "strands": a strand with label m carries the (u1+iu2) channel at order m
// together with the (u1-iu2) channel at order m-2, and nothing else. The
// four Kolosov-type slots below span one strand on an annulus; the interface
// conditions never mix strands, so each mode solve factors into (at most)
// two small square systems. Slot powers decide regularity: nonnegative
// powers are admissible toward the origin, negative ones toward infinity.
// ---------------------------------------------------------------------------

struct SlotTerm {
  double c;
  int p;
  int o;
  int spin;
};

struct Slot {
  int power;
  std::vector<SlotTerm> terms;
};

std::vector<Slot> strand_slots(int m, double kappa) {
  std::vector<Slot> slots;
  // phi = z^m companion: (u1+iu2) ~ kappa r^m e^{im th}, partner at m-2.
  {
    Slot s{m, {}};
    s.terms.push_back({kappa, m, m, +1});
    if (m != 0) s.terms.push_back({-double(m), m, m - 2, -1});
    slots.push_back(s);
  }
  // psi = z^{m-2} companion: pure (u1-iu2) content at order m-2.
  slots.push_back(Slot{m - 2, {{-1.0, m - 2, m - 2, -1}}});
  // phi = z^{2-m} companion; collapses into the psi slot when m == 2.
  if (m != 2) {
    Slot s{2 - m, {}};
    if (m != 2) s.terms.push_back({double(m - 2), 2 - m, m, +1});
    s.terms.push_back({kappa, 2 - m, m - 2, -1});
    slots.push_back(s);
  }
  // psi = z^{-m} companion; collapses into the phi slot when m == 0.
  if (m != 0) {
    slots.push_back(Slot{-m, {{-1.0, -m, m, +1}}});
  }
  return slots;
}

double slot_trace(const Slot& slot, double r, int spin) {
  double v = 0.0;
  for (const auto& t : slot.terms)
    if (t.spin == spin) v += t.c * std::pow(r, t.p);
  return v;
}

// Conormal data of a slot on |x| = r, channel picked by spin:
//   spin +1: coefficient of e^{i m th} in t1 + i t2
//   spin -1: coefficient of e^{i (m-2) th} in t1 - i t2
double slot_traction(const Slot& slot, double r, int spin, const LameParameters& prm) {
  const double lm = prm.lambda + prm.mu;
  double v = 0.0;
  for (const auto& t : slot.terms) {
    const double a = 0.5 * (t.p + t.o);
    const double b = 0.5 * (t.p - t.o);
    const double rp = std::pow(r, t.p - 1);
    if (t.spin == +1) {
      if (spin == +1) v += t.c * rp * (lm * a + 2.0 * prm.mu * b);  // stays at order m
      else v += t.c * rp * lm * a;                                  // lands at order m-2
    } else {
      if (spin == -1) v += t.c * rp * (lm * b + 2.0 * prm.mu * a);  // stays at order m-2
      else v += t.c * rp * lm * b;                                  // lands at order m
    }
  }
  return v;
}

struct StrandRegion {
  double lo = 0.0;
  double hi = kInf;
  Complex s;
  std::vector<Slot> slots;
  std::vector<double> scale;
  int offset = 0;
};

struct Strand {
  int m = 0;
  std::vector<StrandRegion> regions;
  std::vector<double> ifaces;
  int n = 0;
  bool has_plus_traction_row = true;   // dropped when m == 0 (net force)
  bool has_minus_traction_row = true;  // dropped when m == 2 (net force)
  Eigen::MatrixXcd matrix;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd;
  double rcond = 0.0;
};

// Region layout shared by all strands of a profile + source radius.
struct Layout {
  std::vector<double> radii;     // interface radii, ascending; last is q
  std::vector<Complex> factors;  // one per region = radii.size() + 1
};

Layout make_layout(const RadialProfile& profile, double q) {
  Layout lay;
  if (profile.has_core()) {
    lay.radii = {profile.core_radius, profile.shell_radius, q};
    lay.factors = {profile.core_factor(), profile.shell_factor(), profile.matrix_factor(),
                   profile.matrix_factor()};
  } else {
    lay.radii = {profile.shell_radius, q};
    lay.factors = {profile.shell_factor(), profile.matrix_factor(), profile.matrix_factor()};
  }
  return lay;
}

Layout make_freespace_layout(const std::vector<double>& radii) {
  Layout lay;
  lay.radii = radii;
  lay.factors.assign(radii.size() + 1, Complex(1.0, 0.0));
  return lay;
}

Strand build_strand(const Layout& lay, const LameParameters& prm, int m) {
  const double kappa = 1.0 / plasmon_alpha(prm).alpha;
  Strand st;
  st.m = m;
  st.ifaces = lay.radii;
  st.has_plus_traction_row = (m != 0);
  st.has_minus_traction_row = (m != 2);

  const auto all = strand_slots(m, kappa);
  const std::size_t n_regions = lay.radii.size() + 1;
  int offset = 0;
  for (std::size_t ri = 0; ri < n_regions; ++ri) {
    StrandRegion reg;
    reg.lo = ri == 0 ? 0.0 : lay.radii[ri - 1];
    reg.hi = ri == n_regions - 1 ? kInf : lay.radii[ri];
    reg.s = lay.factors[ri];
    for (const auto& slot : all) {
      const bool inner_ok = slot.power >= 0;
      const bool outer_ok = slot.power < 0;
      if (ri == 0 && !inner_ok) continue;
      if (ri == n_regions - 1 && !outer_ok) continue;
      reg.slots.push_back(slot);
      const double anchor = slot.power >= 0 ? reg.hi : reg.lo;
      reg.scale.push_back(std::pow(anchor, -slot.power));
    }
    reg.offset = offset;
    offset += int(reg.slots.size());
    st.regions.push_back(std::move(reg));
  }
  st.n = offset;

  const int rows_per_iface =
      2 + (st.has_plus_traction_row ? 1 : 0) + (st.has_minus_traction_row ? 1 : 0);
  const int n_rows = rows_per_iface * int(st.ifaces.size());
  if (n_rows != st.n)
    throw std::logic_error("strand assembly produced a non-square system");

  st.matrix = Eigen::MatrixXcd::Zero(st.n, st.n);
  int row = 0;
  for (std::size_t fi = 0; fi < st.ifaces.size(); ++fi) {
    const double r = st.ifaces[fi];
    const StrandRegion& lo = st.regions[fi];
    const StrandRegion& up = st.regions[fi + 1];
    auto fill = [&](int the_row, int spin, bool traction) {
      for (int side = 0; side < 2; ++side) {
        const StrandRegion& reg = side == 0 ? lo : up;
        const double sign = side == 0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < reg.slots.size(); ++j) {
          double v = traction ? slot_traction(reg.slots[j], r, spin, prm)
                              : slot_trace(reg.slots[j], r, spin);
          Complex w = sign * reg.scale[j] * v;
          if (traction) w *= reg.s;
          st.matrix(the_row, reg.offset + int(j)) += w;
        }
      }
    };
    fill(row++, +1, false);
    if (st.has_plus_traction_row) fill(row++, +1, true);
    fill(row++, -1, false);
    if (st.has_minus_traction_row) fill(row++, -1, true);
  }

  st.svd.compute(st.matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = st.svd.singularValues();
  st.rcond = sv(0) > 0.0 ? sv(sv.size() - 1) / sv(0) : 0.0;
  return st;
}

// Row index helpers for placing traction-jump right-hand sides.
int traction_row(const Strand& st, std::size_t iface, int spin) {
  const int per = 2 + (st.has_plus_traction_row ? 1 : 0) + (st.has_minus_traction_row ? 1 : 0);
  int row = per * int(iface);
  if (spin == +1) {
    if (!st.has_plus_traction_row)
      throw std::invalid_argument("net-force channel: no admissible decaying solution");
    return row + 1;
  }
  if (!st.has_minus_traction_row)
    throw std::invalid_argument("net-force channel: no admissible decaying solution");
  return row + 2 + (st.has_plus_traction_row ? 1 : 0);
}

void add_strand_terms(PiecewiseModeField& u, const Strand& st, const Eigen::VectorXcd& x) {
  for (std::size_t ri = 0; ri < st.regions.size(); ++ri) {
    const StrandRegion& reg = st.regions[ri];
    for (std::size_t j = 0; j < reg.slots.size(); ++j) {
      const Complex c = x(reg.offset + int(j)) * reg.scale[j];
      if (c == Complex(0.0, 0.0)) continue;
      for (const auto& t : reg.slots[j].terms)
        u.add_term(ri, c * t.c, t.p, t.o, t.spin);
    }
  }
}

// The two channel values of one source mode: the coefficient of
// e^{i a th} in f1 + i f2 and of e^{i b th} in f1 - i f2.
struct ModeChannels {
  int plus_order;
  Complex plus_value;
  int minus_order;
  Complex minus_value;
};

ModeChannels mode_channels(int k, WaveFamily family, double amplitude) {
  const Complex i(0.0, 1.0);
  switch (family) {
    case WaveFamily::F1: return {k, amplitude, -k, amplitude};
    case WaveFamily::F2: return {-k, amplitude, k, amplitude};
    case WaveFamily::F3: return {k, i * amplitude, -k, -i * amplitude};
    default:             return {-k, i * amplitude, k, -i * amplitude};
  }
}

int block_of(int k, WaveFamily family) {
  return (family == WaveFamily::F1 || family == WaveFamily::F3) ? k : k + 2;
}

struct StrandPair {
  Strand a;            // label m = block
  Strand b;            // label 2 - block; unused when block == 1
  bool single = false; // block == 1: both channels live on one strand
};

StrandPair build_pair(const Layout& lay, const LameParameters& prm, int block) {
  StrandPair sp;
  sp.single = (block == 1);
  sp.a = build_strand(lay, prm, block);
  if (!sp.single) sp.b = build_strand(lay, prm, 2 - block);
  return sp;
}

double pair_rcond(const StrandPair& sp) {
  return sp.single ? sp.a.rcond : std::min(sp.a.rcond, sp.b.rcond);
}

// Solves one (k, family, amplitude) mode against a prepared strand pair.
// The traction jump sits on the last interface (the source circle).
PiecewiseModeField assemble_mode_field(const Layout& lay, const StrandPair& sp,
                                       const ModeChannels& ch, int k, WaveFamily family) {
  const std::size_t q_iface = lay.radii.size() - 1;
  PiecewiseModeField u = PiecewiseModeField::over(lay.radii);
  u.k = k;
  u.family = family;

  auto solve_into = [&](const Strand& st, bool use_plus, bool use_minus) {
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(st.n);
    bool any = false;
    if (use_plus && ch.plus_value != Complex(0.0, 0.0)) {
      rhs(traction_row(st, q_iface, +1)) += ch.plus_value;
      any = true;
    }
    if (use_minus && ch.minus_value != Complex(0.0, 0.0)) {
      rhs(traction_row(st, q_iface, -1)) += ch.minus_value;
      any = true;
    }
    if (!any) return;
    Eigen::VectorXcd x = st.svd.solve(rhs);
    add_strand_terms(u, st, x);
  };

  if (sp.single) {
    solve_into(sp.a, true, true);
  } else {
    // plus channel at order m lives on the strand labeled m; the minus
    // channel at order o lives on the strand labeled o + 2.
    const Strand& plus_host = (ch.plus_order == sp.a.m) ? sp.a : sp.b;
    const Strand& minus_host = (ch.minus_order + 2 == sp.a.m) ? sp.a : sp.b;
    solve_into(plus_host, true, false);
    solve_into(minus_host, false, true);
  }
  u.normalize();
  return u;
}

std::vector<std::vector<Complex>> extract_coefficients(const StrandPair& sp,
                                                       const Layout& lay,
                                                       const ModeChannels& ch) {
  // Re-solve per strand to expose raw slot coefficients region by region.
  const std::size_t q_iface = lay.radii.size() - 1;
  const std::size_t n_regions = lay.radii.size() + 1;
  std::vector<std::vector<Complex>> out(n_regions);

  auto push = [&](const Strand& st, const Eigen::VectorXcd& x) {
    for (std::size_t ri = 0; ri < st.regions.size(); ++ri)
      for (std::size_t j = 0; j < st.regions[ri].slots.size(); ++j)
        out[ri].push_back(x(st.regions[ri].offset + int(j)));
  };
  auto solve_one = [&](const Strand& st, bool use_plus, bool use_minus) {
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(st.n);
    if (use_plus && ch.plus_value != Complex(0.0, 0.0))
      rhs(traction_row(st, q_iface, +1)) += ch.plus_value;
    if (use_minus && ch.minus_value != Complex(0.0, 0.0))
      rhs(traction_row(st, q_iface, -1)) += ch.minus_value;
    push(st, st.svd.solve(rhs));
  };

  if (sp.single) {
    solve_one(sp.a, true, true);
  } else {
    const bool plus_on_a = (ch.plus_order == sp.a.m);
    solve_one(sp.a, plus_on_a, !plus_on_a);
    solve_one(sp.b, !plus_on_a, plus_on_a);
  }
  return out;
}

std::vector<InterfaceResidual> interface_residuals(const LameParameters& prm,
                                                   const PiecewiseModeField& u,
                                                   const Layout& lay,
                                                   const AngularFunction& density) {
  // Gaps are normalized by the largest one-sided value appearing anywhere in
  // the matching system, not interface by interface: a mode may have an
  // identically traction-free interior (the rotation-carrying block does),
  // and a purely local quotient would then amplify roundoff into a fake
  // violation.
  struct Gap {
    double radius;
    AngularFunction trace_gap;
    AngularFunction traction_gap;
  };
  std::vector<Gap> gaps;
  double tr_scale = 1e-300;
  double tq_scale = std::max(density.max_abs(), 1e-300);
  for (std::size_t fi = 0; fi < lay.radii.size(); ++fi) {
    const double r = lay.radii[fi];
    const bool at_source = (fi + 1 == lay.radii.size());
    AngularFunction tr_in = trace(u, r, Side::Inner);
    AngularFunction tr_out = trace(u, r, Side::Outer);
    tr_scale = std::max({tr_scale, tr_in.max_abs(), tr_out.max_abs()});
    tr_out.accumulate(tr_in, -1.0);

    // The modulus-weighted traction is continuous across material
    // interfaces and jumps by the prescribed density at the source circle.
    const Complex s_in = lay.factors[fi];
    const Complex s_out = lay.factors[fi + 1];
    AngularFunction tq_in = conormal(prm, u, r, Side::Inner, s_in);
    AngularFunction tq_out = conormal(prm, u, r, Side::Outer, s_out);
    tq_scale = std::max({tq_scale, tq_in.max_abs(), tq_out.max_abs()});
    tq_out.accumulate(tq_in, -1.0);
    if (at_source) tq_out.accumulate(density, -1.0);
    gaps.push_back({r, std::move(tr_out), std::move(tq_out)});
  }

  std::vector<InterfaceResidual> out;
  for (const Gap& g : gaps) {
    InterfaceResidual res;
    res.radius = g.radius;
    res.displacement = g.trace_gap.max_abs() / tr_scale;
    res.traction = g.traction_gap.max_abs() / tq_scale;
    out.push_back(res);
  }
  return out;
}

double block_energy(const LameParameters& prm, double delta, const PiecewiseModeField& u) {
  return 0.5 * delta * bilinear_P(prm, u, u).real();
}

}  // namespace

// ---------------------------------------------------------------------------
// RadialProfile / SourceSpectrum plumbing
// ---------------------------------------------------------------------------

RadialProfile RadialProfile::uniform(double delta) {
  RadialProfile p;
  p.core_radius = 0.0;
  p.shell_radius = 1.0;
  p.delta = delta;
  return p;
}

RadialProfile RadialProfile::no_core(double shell_radius, double shell_amplitude, double delta) {
  RadialProfile p;
  p.core_radius = 0.0;
  p.shell_radius = shell_radius;
  p.shell_amplitude = shell_amplitude;
  p.delta = delta;
  return p;
}

RadialProfile RadialProfile::with_core(double core_radius, double shell_radius,
                                       double core_amplitude, double shell_amplitude,
                                       double delta) {
  RadialProfile p;
  p.core_radius = core_radius;
  p.shell_radius = shell_radius;
  p.core_amplitude = core_amplitude;
  p.shell_amplitude = shell_amplitude;
  p.delta = delta;
  return p;
}

void require_valid(const RadialProfile& profile) {
  auto bad = [](double x) { return !std::isfinite(x); };
  if (bad(profile.core_radius) || bad(profile.shell_radius) || bad(profile.delta) ||
      bad(profile.core_amplitude) || bad(profile.shell_amplitude) ||
      bad(profile.matrix_amplitude))
    throw std::invalid_argument("profile entries must be finite");
  if (profile.core_radius < 0.0)
    throw std::invalid_argument("core radius must be nonnegative");
  if (profile.shell_radius <= profile.core_radius)
    throw std::invalid_argument("shell radius must exceed the core radius");
  if (profile.delta < 0.0)
    throw std::invalid_argument("loss level must be nonnegative");
}

namespace {
void ensure_size(std::vector<double>& v, int k) {
  if (int(v.size()) <= k) v.resize(k + 1, 0.0);
}
double at_or_zero(const std::vector<double>& v, int k) {
  return (k >= 1 && k < int(v.size())) ? v[k] : 0.0;
}
void check_order(int k) {
  if (k < 1) throw std::invalid_argument("source orders start at k = 1");
}
}  // namespace

int SourceSpectrum::max_k() const {
  int m = 0;
  for (const auto* v : {&beta, &gamma, &xi, &eta})
    for (int k = int(v->size()) - 1; k >= 1; --k)
      if ((*v)[k] != 0.0) { m = std::max(m, k); break; }
  return m;
}

bool SourceSpectrum::empty() const { return max_k() == 0; }

void SourceSpectrum::set_beta(int k, double value) { check_order(k); ensure_size(beta, k); beta[k] = value; }
void SourceSpectrum::set_gamma(int k, double value) { check_order(k); ensure_size(gamma, k); gamma[k] = value; }
void SourceSpectrum::set_xi(int k, double value) { check_order(k); ensure_size(xi, k); xi[k] = value; }
void SourceSpectrum::set_eta(int k, double value) { check_order(k); ensure_size(eta, k); eta[k] = value; }

double SourceSpectrum::beta_at(int k) const { return at_or_zero(beta, k); }
double SourceSpectrum::gamma_at(int k) const { return at_or_zero(gamma, k); }
double SourceSpectrum::xi_at(int k) const { return at_or_zero(xi, k); }
double SourceSpectrum::eta_at(int k) const { return at_or_zero(eta, k); }

AngularFunction source_mode_density(int k, WaveFamily family, double amplitude) {
  check_order(k);
  const ModeChannels ch = mode_channels(k, family, amplitude);
  AngularFunction f;
  f.plus[ch.plus_order] = ch.plus_value;
  f.minus[ch.minus_order] = ch.minus_value;
  return f;
}

AngularFunction spectrum_density(const SourceSpectrum& source) {
  AngularFunction f;
  const int K = source.max_k();
  for (int k = 1; k <= K; ++k) {
    if (source.beta_at(k) != 0.0) f.accumulate(source_mode_density(k, WaveFamily::F1, source.beta_at(k)));
    if (source.gamma_at(k) != 0.0) f.accumulate(source_mode_density(k, WaveFamily::F2, source.gamma_at(k)));
    if (source.xi_at(k) != 0.0) f.accumulate(source_mode_density(k, WaveFamily::F3, source.xi_at(k)));
    if (source.eta_at(k) != 0.0) f.accumulate(source_mode_density(k, WaveFamily::F4, source.eta_at(k)));
  }
  return f;
}

NearSingularError::NearSingularError(int k_, WaveFamily family_, double rcond_, double delta_)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "near-singular matching system at k = " << k_ << " (rcond " << rcond_
           << ", delta " << delta_ << ")";
        return os.str();
      }()),
      k(k_), family(family_), rcond(rcond_), delta(delta_) {}

double LayeredModeSolution::max_residual() const {
  double m = 0.0;
  for (const auto& r : residuals) m = std::max({m, r.displacement, r.traction});
  return m;
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

LayeredModeSolution solve_mode(const RadialProfile& profile, const LameParameters& params,
                               int k, WaveFamily family, double amplitude, double q) {
  require_valid(profile);
  require_convex(params, 2);
  check_order(k);
  if (!(q > profile.shell_radius))
    throw std::invalid_argument("source circle must lie outside the shell");
  if (!std::isfinite(amplitude)) throw std::invalid_argument("amplitude must be finite");

  const Layout lay = make_layout(profile, q);
  const StrandPair sp = build_pair(lay, params, block_of(k, family));
  const double rc = pair_rcond(sp);
  if (!(rc >= kRcondFloor))
    throw NearSingularError(k, family, rc, profile.delta);

  const ModeChannels ch = mode_channels(k, family, amplitude);
  LayeredModeSolution sol;
  sol.k = k;
  sol.family = family;
  sol.amplitude = amplitude;
  sol.q = q;
  sol.profile = profile;
  sol.params = params;
  sol.field = assemble_mode_field(lay, sp, ch, k, family);
  validate_mode_structure(sol.field);
  sol.region_coefficients = extract_coefficients(sp, lay, ch);
  sol.rcond = rc;
  sol.residuals = interface_residuals(params, sol.field, lay,
                                      source_mode_density(k, family, amplitude));
  return sol;
}

EnergyResult solve_configuration(const RadialProfile& profile, const LameParameters& params,
                                 const SourceSpectrum& source, double tail_tol) {
  require_valid(profile);
  require_convex(params, 2);
  if (!(tail_tol >= 0.0)) throw std::invalid_argument("tail tolerance must be nonnegative");

  EnergyResult result;
  result.delta = profile.delta;
  if (source.empty()) return result;  // no circle, nothing to drive
  if (!(source.q > profile.shell_radius))
    throw std::invalid_argument("source circle must lie outside the shell");

  struct ModeEntry {
    int k;
    WaveFamily family;
    double amplitude;
  };
  std::map<int, std::vector<ModeEntry>> blocks;
  const int K = source.max_k();
  for (int k = 1; k <= K; ++k) {
    if (source.beta_at(k) != 0.0) blocks[block_of(k, WaveFamily::F1)].push_back({k, WaveFamily::F1, source.beta_at(k)});
    if (source.gamma_at(k) != 0.0) blocks[block_of(k, WaveFamily::F2)].push_back({k, WaveFamily::F2, source.gamma_at(k)});
    if (source.xi_at(k) != 0.0) blocks[block_of(k, WaveFamily::F3)].push_back({k, WaveFamily::F3, source.xi_at(k)});
    if (source.eta_at(k) != 0.0) blocks[block_of(k, WaveFamily::F4)].push_back({k, WaveFamily::F4, source.eta_at(k)});
  }

  const Layout lay = make_layout(profile, source.q);
  std::vector<double> block_energies;
  double total = 0.0;

  for (auto& [block, modes] : blocks) {
    std::sort(modes.begin(), modes.end(), [](const ModeEntry& a, const ModeEntry& b) {
      return a.k != b.k ? a.k < b.k : int(a.family) < int(b.family);
    });
    const StrandPair sp = build_pair(lay, params, block);
    const double rc = pair_rcond(sp);
    if (!(rc >= kRcondFloor))
      throw NearSingularError(modes.front().k, modes.front().family, rc, profile.delta);

    std::vector<PiecewiseModeField> parts;
    parts.reserve(modes.size());
    for (const auto& me : modes)
      parts.push_back(assemble_mode_field(lay, sp, mode_channels(me.k, me.family, me.amplitude),
                                          me.k, me.family));

    PiecewiseModeField sum = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) sum.accumulate(parts[i]);
    sum.normalize();

    const double e_block = block_energy(params, profile.delta, sum);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      ModeContribution mc;
      mc.k = modes[i].k;
      mc.family = modes[i].family;
      mc.energy = parts.size() == 1
                      ? e_block
                      : 0.5 * profile.delta * bilinear_P(params, parts[i], sum).real();
      result.per_mode.push_back(mc);
    }
    total += e_block;
    block_energies.push_back(e_block);
  }

  result.total_energy = total;

  double tail = 0.0;
  if (block_energies.size() >= 2) {
    const double e_last = block_energies[block_energies.size() - 1];
    const double e_prev = block_energies[block_energies.size() - 2];
    if (e_prev > 0.0 && e_last > 0.0) {
      const double rho = std::min(e_last / e_prev, 0.95);
      tail = e_last * rho / (1.0 - rho);
    }
  }
  result.truncation_bound = total * (1.0 + tail_tol) + tail;
  return result;
}

PiecewiseModeField freespace_traction_solve(
    const LameParameters& params,
    const std::vector<std::pair<double, AngularFunction>>& jumps) {
  require_convex(params, 2);

  std::vector<std::pair<double, AngularFunction>> sorted = jumps;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<double> radii;
  for (const auto& jump : sorted) {
    if (!(jump.first > 0.0) || !std::isfinite(jump.first))
      throw std::invalid_argument("jump radii must be positive and finite");
    if (!radii.empty() && !(jump.first > radii.back()))
      throw std::invalid_argument("jump radii must be distinct");
    radii.push_back(jump.first);
  }

  PiecewiseModeField u = PiecewiseModeField::over(radii);
  u.k = 0;
  if (radii.empty()) return u;

  // Route every channel coefficient to its strand; reject the net-force
  // channel, whose traction row is structurally absent.
  struct RhsEntry {
    std::size_t iface;
    int spin;
    Complex value;
  };
  std::map<int, std::vector<RhsEntry>> per_strand;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const AngularFunction& g = sorted[i].second;
    const double scale = std::max(g.max_abs(), 1e-300);
    for (const auto& [o, v] : g.plus) {
      if (std::abs(v) <= 1e-15 * scale) continue;
      if (o == 0) throw std::invalid_argument("net-force jump has no decaying solution");
      per_strand[o].push_back({i, +1, v});
    }
    for (const auto& [o, v] : g.minus) {
      if (std::abs(v) <= 1e-15 * scale) continue;
      if (o == 0) throw std::invalid_argument("net-force jump has no decaying solution");
      per_strand[o + 2].push_back({i, -1, v});
    }
  }

  const Layout lay = make_freespace_layout(radii);
  for (const auto& [m, entries] : per_strand) {
    Strand st = build_strand(lay, params, m);
    if (!(st.rcond >= kRcondFloor))
      throw NearSingularError(std::abs(m), WaveFamily::F1, st.rcond, 0.0);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(st.n);
    for (const auto& e : entries) rhs(traction_row(st, e.iface, e.spin)) += e.value;
    Eigen::VectorXcd x = st.svd.solve(rhs);
    add_strand_terms(u, st, x);
  }
  u.normalize();
  return u;
}

// ---------------------------------------------------------------------------
// Field algebra: conjugate, real/imaginary parts, split pair
// ---------------------------------------------------------------------------

PiecewiseModeField field_conjugate(const PiecewiseModeField& f) {
  PiecewiseModeField g;
  g.k = f.k;
  g.family = f.family;
  g.pieces = f.pieces;
  for (auto& piece : g.pieces)
    for (auto& t : piece.terms) {
      t.c = std::conj(t.c);
      t.m = -t.m;
      t.spin = -t.spin;
    }
  return g;
}

PiecewiseModeField field_real_part(const PiecewiseModeField& f) {
  PiecewiseModeField g = f;
  g.scale(0.5);
  g.accumulate(field_conjugate(f), 0.5);
  g.normalize();
  return g;
}

PiecewiseModeField field_imag_part(const PiecewiseModeField& f) {
  PiecewiseModeField g = f;
  g.scale(Complex(0.0, -0.5));
  g.accumulate(field_conjugate(f), Complex(0.0, 0.5));
  g.normalize();
  return g;
}

SplitPair real_imag_split(const PiecewiseModeField& u, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("split requires a positive loss level");
  SplitPair pair;
  pair.v = field_real_part(u);
  pair.w = field_imag_part(u);
  pair.w.scale(delta);
  return pair;
}

SplitPair real_imag_split(const LayeredModeSolution& solution) {
  return real_imag_split(solution.field, solution.profile.delta);
}

}  // namespace alrlab
