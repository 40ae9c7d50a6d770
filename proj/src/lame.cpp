#include "alrlab/lame.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace alrlab {

bool check_convexity(const LameParameters& p, int dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("dim must be 2 or 3");
  return p.mu > 0.0 && dim * p.lambda + 2.0 * p.mu > 0.0;
}

void require_convex(const LameParameters& p, int dim) {
  if (!check_convexity(p, dim))
    throw std::invalid_argument("Lame pair (" + std::to_string(p.lambda) + ", " +
                                std::to_string(p.mu) + ") is not strongly convex in dim " +
                                std::to_string(dim));
}

double plasmon_constant(const LameParameters& p, PlasmonFamily family) {
  require_convex(p, 2);
  const double num = p.lambda + p.mu;
  const double den = p.lambda + 3.0 * p.mu;
  return family == PlasmonFamily::ShearFamily ? -num / den : -den / num;
}

PlasmonAlpha plasmon_alpha(const LameParameters& p) {
  require_convex(p, 2);
  PlasmonAlpha out;
  out.alpha1 = 0.5 * (1.0 / p.mu + 1.0 / (2.0 * p.mu + p.lambda));
  out.alpha2 = 0.5 * (1.0 / p.mu - 1.0 / (2.0 * p.mu + p.lambda));
  out.alpha = out.alpha2 / out.alpha1;
  return out;
}

std::array<std::array<double, 3>, 3> kelvin_matrix(const LameParameters& p,
                                                   const std::array<double, 3>& x, int dim) {
  require_convex(p, dim);
  const double pi = 3.14159265358979323846;
  double r2 = 0.0;
  for (int i = 0; i < dim; ++i) r2 += x[i] * x[i];
  if (r2 == 0.0) throw std::invalid_argument("kelvin_matrix: x must be nonzero");
  const double r = std::sqrt(r2);
  const double a = 0.5 * (1.0 / p.mu + 1.0 / (2.0 * p.mu + p.lambda));
  const double b = 0.5 * (1.0 / p.mu - 1.0 / (2.0 * p.mu + p.lambda));
  std::array<std::array<double, 3>, 3> out{};
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      double diag = (i == j) ? 1.0 : 0.0;
      if (dim == 2)
        out[i][j] = a / (2.0 * pi) * diag * std::log(r) - b / (2.0 * pi) * x[i] * x[j] / r2;
      else
        out[i][j] = -a / (4.0 * pi) * diag / r - b / (2.0 * pi) * x[i] * x[j] / (r2 * r);
    }
  return out;
}

}  // namespace alrlab
