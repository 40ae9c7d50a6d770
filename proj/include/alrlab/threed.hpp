#pragma once

#include <array>
#include <map>
#include <vector>

#include "alrlab/lame.hpp"

namespace alrlab {

using Vec3 = std::array<double, 3>;

/// Trivariate polynomial with sparse monomial storage. Exact under addition,
/// multiplication, and differentiation — the backbone for the degree-n solid
/// harmonics, which stay polynomial through every derivative taken here.
class Poly3 {
 public:
  Poly3() = default;

  static Poly3 constant(double c);
  /// x, y, or z for axis 0, 1, 2.
  static Poly3 variable(int axis);

  /// Adds c to the coefficient of x^px y^py z^pz.
  void add_term(int px, int py, int pz, double c);
  double coefficient(int px, int py, int pz) const;

  bool zero() const { return terms_.empty(); }
  int total_degree() const;
  /// Largest coefficient magnitude (0 for the zero polynomial).
  double max_abs_coefficient() const;

  Poly3 operator+(const Poly3& other) const;
  Poly3 operator-(const Poly3& other) const;
  Poly3 operator*(const Poly3& other) const;
  Poly3 scaled(double factor) const;
  Poly3 derivative(int axis) const;

  double eval(const Vec3& p) const;

  const std::map<std::array<int, 3>, double>& terms() const { return terms_; }

 private:
  std::map<std::array<int, 3>, double> terms_;
};

/// Degree-n harmonic polynomial equal to r^n Y_n^m(x^) for the real
/// orthonormal spherical harmonics: cosine branch for m >= 0, sine branch
/// for m < 0, normalized so the squared integral over the unit sphere is 1
/// (no Condon-Shortley sign). Requires n >= 0 and |m| <= n.
Poly3 solid_harmonic(int n, int m);

/// The tangential vector polynomial W = grad(solid harmonic) x position.
/// Each component is again a degree-n harmonic polynomial, W . x == 0
/// identically, and on the unit sphere W equals the surface gradient of
/// Y_n^m crossed with the radial unit vector.
std::array<Poly3, 3> tangential_polynomials(int n, int m);

/// Tangential sphere pattern: surface gradient of Y_n^m crossed with the
/// radial unit vector, evaluated at a unit point (|p| = 1 within 1e-12,
/// otherwise rejected). Order 0 gives the zero vector.
Vec3 eval_B(int n, int m, const Vec3& unit_point);

enum class SphericalKind { MGrow, NDecay };

/// One member of the divergence-free spherical family: the growing kind
/// scales like r^n along rays, the decaying kind like r^{-n-1}. Both solve
/// the homogeneous isotropic system away from the origin.
struct SphericalModeField {
  int n = 0;
  int m = 0;
  SphericalKind kind = SphericalKind::MGrow;

  /// Field value at x != 0 (throws on the origin).
  Vec3 eval(const Vec3& x) const;
};

/// First component of the conormal stress of the growing or decaying field
/// on the unit sphere (outward normal), per the closed-form expansion of
/// the stress in the tangential pattern and its harmonic-polynomial
/// derivative. The divergence-free structure keeps the first Lame modulus
/// out of the result. The point is normalized internally; n = 0 gives 0.
double conormal_first_component(const LameParameters& params, SphericalKind kind, int n, int m,
                                const Vec3& point);

/// Least-squares proportionality fit: the constant c minimizing
/// ||target - c base|| and the relative residual ||target - c base|| /
/// ||target||, clamped into [0, 1]. degenerate marks an all-zero base or
/// target, where the fit carries no information.
struct FitResult {
  double c = 0.0;
  double residual = 0.0;
  bool degenerate = false;
};

FitResult proportionality_fit(const std::vector<double>& base, const std::vector<double>& target);

struct ProportionalityReport {
  int n = 0;
  int m = 0;
  double best_fit_c = 0.0;
  double relative_residual = 0.0;
  int samples = 0;
  bool degenerate = false;
};

/// Asks whether one constant c matches the decaying traction to the growing
/// one, c t[M] = t[N], as fields: first conormal components sampled at the
/// given points (any nonzero radius; values at radius r follow from the
/// unit-sphere values by the homogeneity powers r^{n-1} and r^{-n-2}), then
/// least-squares fit. Requires n >= 2.
ProportionalityReport proportionality_test(const LameParameters& params, int n, int m,
                                           const std::vector<Vec3>& points);

/// Same test on the built-in deterministic sampler: a Fibonacci direction
/// spiral replicated on the radii {1/2, 1, 2}, at least sample_count points
/// in total. Requires sample_count >= 20.
ProportionalityReport proportionality_test(const LameParameters& params, int n, int m,
                                           int sample_count);

/// Joint fit across the whole order-n multiplet (all |m| <= n stacked into
/// one least-squares problem); returns the relative residual. Invariant
/// under rotations of a point set whose directions have isotropic second
/// moments on every radius shell.
double multiplet_residual(const LameParameters& params, int n, const std::vector<Vec3>& points);

/// The remaining closed-form families: curls of the two spherical kinds and
/// gradients of the growing/decaying scalar harmonics. Evaluable for
/// completeness; the proportionality question above is posed for the
/// divergence-free pair only.
enum class AuxKind { CurlGrow, CurlDecay, GradGrow, GradDecay };

Vec3 eval_aux(int n, int m, AuxKind kind, const Vec3& x);

}  // namespace alrlab
