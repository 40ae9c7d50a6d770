#pragma once

#include <array>
#include <complex>

namespace alrlab {

using Complex = std::complex<double>;

/// Isotropic Lame pair (lambda, mu) for the operator
///   L u = mu * Laplace(u) + (lambda + mu) * grad(div u).
struct LameParameters {
  double lambda = 1.0;
  double mu = 1.0;
};

/// Strong convexity of the isotropic tensor in dimension dim (2 or 3):
/// mu > 0 and dim*lambda + 2*mu > 0.
bool check_convexity(const LameParameters& p, int dim);

/// Throws std::invalid_argument if the pair is not strongly convex.
void require_convex(const LameParameters& p, int dim);

/// Which of the two shell constants a radial plasmonic profile uses.
/// ShearFamily: c = -(lambda+mu)/(lambda+3mu)   (the default shell value)
/// AltFamily:   c = -(lambda+3mu)/(lambda+mu)   (its reciprocal)
enum class PlasmonFamily { ShearFamily, AltFamily };

double plasmon_constant(const LameParameters& p, PlasmonFamily family);

/// alpha1 = (1/mu + 1/(2mu+lambda))/2, alpha2 = (1/mu - 1/(2mu+lambda))/2,
/// alpha = alpha2/alpha1 = (lambda+mu)/(lambda+3mu).  0 < alpha < 1 under
/// 2-D strong convexity.  kappa := 1/alpha is the Kolosov constant.
struct PlasmonAlpha {
  double alpha1;
  double alpha2;
  double alpha;
};

PlasmonAlpha plasmon_alpha(const LameParameters& p);

/// Fundamental matrix of L at a point x (dim 2 or 3).  Row i, column j is
/// the i-th displacement component of the unit point force along e_j.
/// Throws on |x| = 0.
std::array<std::array<double, 3>, 3> kelvin_matrix(const LameParameters& p,
                                                   const std::array<double, 3>& x,
                                                   int dim);

}  // namespace alrlab
