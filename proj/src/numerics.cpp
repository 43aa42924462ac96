#include "su2depol/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace su2depol {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Legendre P_n and its derivative at z, by upward recurrence.
void legendre(int n, double z, double* p, double* dp) {
  double p1 = 1.0, p2 = 0.0;
  for (int j = 0; j < n; ++j) {
    double p3 = p2;
    p2 = p1;
    p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
  }
  *p = p1;
  *dp = n * (z * p1 - p2) / (z * z - 1.0);
}

double pairwise_range(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_range(v, h) + pairwise_range(v + h, n - h);
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("quadrature order must be >= 1");
  std::vector<double> x(n), w(n);
  int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n.
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 1.0;
    for (int iter = 0; iter < 64; ++iter) {
      legendre(n, z, &p, &dp);
      double step = p / dp;
      z -= step;
      if (std::abs(step) < 1e-15) break;
    }
    legendre(n, z, &p, &dp);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

double pairwise_sum(const std::vector<double>& values) {
  return values.empty() ? 0.0 : pairwise_range(values.data(), values.size());
}

}  // namespace su2depol
