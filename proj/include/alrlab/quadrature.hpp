#pragma once

#include <array>
#include <vector>

#include "alrlab/lame.hpp"
#include "alrlab/mode_field.hpp"

namespace alrlab {

struct Quadrature1D {
  std::vector<double> x;
  std::vector<double> w;
};

/// Gauss-Legendre rule on [-1, 1] (Newton iteration on the three-term
/// recurrence; nodes symmetric, weights positive).
Quadrature1D gauss_legendre(int n);

/// The same rule mapped affinely to [a, b].
Quadrature1D gauss_legendre(int n, double a, double b);

/// Fourth-order central-difference gradient of the field's two components:
/// out[i][j] = d u_i / d x_j at (x1, x2), step h.
std::array<std::array<Complex, 2>, 2> fd_gradient(const PiecewiseModeField& f,
                                                  double x1, double x2, double h);

/// mu Laplace(u) + (lambda + mu) grad(div u) at a point, entirely from
/// finite differences of evaluate_xy. Independent of the closed-form path.
std::array<Complex, 2> fd_lame_apply(const LameParameters& params, const PiecewiseModeField& f,
                                     double x1, double x2, double h);

/// Quadrature + finite-difference evaluation of the energy pairing over
/// r_lo < |x| < r_hi. Splits at the fields' piece boundaries; an infinite
/// outer radius is folded to (0,1] by r = b/s off the last breakpoint.
Complex bilinear_P_quadrature(const LameParameters& params, const PiecewiseModeField& u,
                              const PiecewiseModeField& v, double r_lo, double r_hi,
                              int n_radial = 64, int n_angular = 256);

/// | circle - volume - P | for the integration-by-parts identity on the disk
/// of the given radius:
///   circle = int_{|x|=R} v . t(u) ds,  volume = int_disk v . (L u),
///   P      = int_disk lambda div u div v + 2 mu sym-grad u : sym-grad v.
/// All three by quadrature and finite differences only (plain products, no
/// conjugation); u and v must be smooth in a neighborhood of the closed disk.
double green_identity_residual(const LameParameters& params, const PiecewiseModeField& u,
                               const PiecewiseModeField& v, double disk_radius);

}  // namespace alrlab
