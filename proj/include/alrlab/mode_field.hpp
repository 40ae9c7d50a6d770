#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <vector>

#include "alrlab/lame.hpp"

namespace alrlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Angular family tags for the four source/wave patterns. F3/F4 are the
/// quarter-turn partners of F1/F2 (same radial structure, swapped parity).
enum class WaveFamily { F1, F2, F3, F4 };

/// Which one-sided limit to take at a circle that may be a piece boundary.
enum class Side { Inner, Outer };

/// One separated term of a planar displacement field. Terms live in the two
/// complex combinations of the Cartesian components:
///   spin = +1 :   u1 + i*u2  +=  c * r^p * exp(i*m*theta)
///   spin = -1 :   u1 - i*u2  +=  c * r^p * exp(i*m*theta)
/// A real-valued field carries mirror pairs (c,p,m,+1), (conj c,p,-m,-1).
struct Term {
  Complex c;
  int p;     // radial power
  int m;     // angular order of this channel
  int spin;  // +1 or -1
};

/// Half-open annulus [r_lo, r_hi) carrying its own term list. r_hi may be
/// +inf (exterior piece); r_lo = 0 is the innermost piece.
struct Piece {
  double r_lo = 0.0;
  double r_hi = kInf;
  std::vector<Term> terms;
};

/// Displacement field assembled from power-law terms on nested annuli that
/// cover (0, inf) contiguously. `k` and `family` label which angular block
/// the field belongs to; they are bookkeeping only and never affect values.
struct PiecewiseModeField {
  int k = 0;
  WaveFamily family = WaveFamily::F1;
  std::vector<Piece> pieces;

  /// Builds pieces (0,b1),(b1,b2),...,(bn,inf) from sorted positive breaks.
  static PiecewiseModeField over(const std::vector<double>& breakpoints);

  /// Interior breakpoints (the finite piece boundaries), in order.
  std::vector<double> breakpoints() const;

  Piece& piece(std::size_t i) { return pieces.at(i); }
  const Piece& piece(std::size_t i) const { return pieces.at(i); }

  /// Piece whose closure contains r when approached from the given side.
  const Piece& piece_at(double r, Side side) const;

  void add_term(std::size_t piece_index, Complex c, int p, int m, int spin);

  /// Mirror pair giving the real field u1 = Re(c r^p e^{i m th}),
  /// u2 = Im(c r^p e^{i m th}).
  void add_pattern(std::size_t piece_index, Complex c, int p, int m);

  void scale(Complex s);

  /// this += weight * other. Piece partitions are merged; term lists on the
  /// refined pieces are concatenated.
  void accumulate(const PiecewiseModeField& other, Complex weight = 1.0);

  /// Merges duplicate (p,m,spin) keys; drops coefficients that cancel below
  /// 1e-14 of their accumulated magnitude.
  void normalize();
};

/// (u1, u2) at polar point; components are complex for complex coefficient
/// fields and have vanishing imaginary part for mirror-paired real fields.
std::array<Complex, 2> evaluate_polar(const PiecewiseModeField& f, double r, double theta);
std::array<Complex, 2> evaluate_xy(const PiecewiseModeField& f, double x1, double x2);

/// Vector-valued function on a circle in the same two-channel encoding:
///   f1 + i*f2 = sum_m plus[m]  exp(i m theta)
///   f1 - i*f2 = sum_m minus[m] exp(i m theta)
struct AngularFunction {
  std::map<int, Complex> plus;
  std::map<int, Complex> minus;

  std::array<Complex, 2> evaluate(double theta) const;
  AngularFunction& accumulate(const AngularFunction& g, Complex weight = 1.0);
  double max_abs() const;
  int max_order() const;

  /// Fourier view over {cos m th, sin m th}: coefficient of cos(m th)
  /// (resp. sin) in component 0 or 1. m >= 0; sin with m = 0 is zero.
  Complex component_cos(int component, int m) const;
  Complex component_sin(int component, int m) const;

  Complex plus_at(int m) const;
  Complex minus_at(int m) const;
};

/// Boundary values of f on the circle of the given radius, one-sided.
AngularFunction trace(const PiecewiseModeField& f, double r, Side side);

/// Conormal derivative lambda (div u) nu + mu (grad u + grad u^T) nu on the
/// circle of the given radius, outward unit normal nu, one-sided limit.
/// `modulus_scale` multiplies the result (complex region factor A + i delta).
AngularFunction conormal(const LameParameters& params, const PiecewiseModeField& f,
                         double r, Side side, Complex modulus_scale = Complex(1.0, 0.0));

/// Same, but rejects a radius that sits on a piece boundary, where the
/// one-sided limits differ and the side must be stated.
AngularFunction conormal(const LameParameters& params, const PiecewiseModeField& f, double r);

/// mu Laplace(u) + (lambda + mu) grad(div u), applied term-by-term in closed
/// form. Exactly zero term lists (up to cancellation pruning) on pieces where
/// the input solves the homogeneous system.
PiecewiseModeField lame_apply(const LameParameters& params, const PiecewiseModeField& f);

/// Energy pairing
///   int lambda (div u) conj(div v) + 2 mu sym-grad(u) : conj(sym-grad(v))
/// over { r_lo < |x| < r_hi } intersected with the piece partitions, by exact
/// radial integration and angular orthogonality. Throws std::domain_error on
/// a divergent combination (non-decaying exterior term, singular core term).
Complex bilinear_P(const LameParameters& params, const PiecewiseModeField& u,
                   const PiecewiseModeField& v, double r_lo = 0.0, double r_hi = kInf);

/// int_{|x|=r} f . g ds, plain dot product (no conjugation).
Complex circle_dot(const AngularFunction& f, const AngularFunction& g, double r);

/// int_{|x|=r} f . conj(g) ds.
Complex circle_inner(const AngularFunction& f, const AngularFunction& g, double r);

/// (delta/2) P(u, u): the heat dissipated by the loss level delta.
double dissipated_energy(double delta, const PiecewiseModeField& u,
                         const LameParameters& params);

/// Checks the bookkeeping invariants of a mode field against its k tag:
/// every term's pattern order |m| lies in {k-2, k, k+2}, the innermost piece
/// has only nonnegative powers, the exterior piece only negative ones.
/// Throws std::logic_error with a description on violation.
void validate_mode_structure(const PiecewiseModeField& f);

}  // namespace alrlab
