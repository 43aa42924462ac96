#include "su2depol/dynamics.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "su2depol/errors.hpp"

namespace su2depol {

namespace {

// RK4 explicit stability interval on the negative real axis is ~2.785; stay
// inside with margin since the spectrum is purely real here.
constexpr double kRk4StabilityLimit = 2.5;
constexpr double kTargetLambdaDt = 0.01;

double lf(long n) {  // ln(n!)
  return std::lgamma(static_cast<double>(n) + 1.0);
}

using BlockRhs = std::function<Matrix(const Matrix&)>;

Matrix rk4_block(Matrix rho, double t, double dt_cap, const BlockRhs& rhs,
                 OdeStats* stats) {
  long steps = 1;
  if (std::isfinite(dt_cap) && dt_cap > 0.0 && t > dt_cap)
    steps = static_cast<long>(std::ceil(t / dt_cap - 1e-12));
  double dt = t / static_cast<double>(steps);
  for (long s = 0; s < steps; ++s) {
    Matrix k1 = rhs(rho);
    Matrix k2 = rhs(rho + 0.5 * dt * k1);
    Matrix k3 = rhs(rho + 0.5 * dt * k2);
    Matrix k4 = rhs(rho + dt * k3);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    // Symmetrize: the exact flow keeps rho Hermitian, floating point does not.
    Matrix herm = 0.5 * (rho + rho.adjoint());
    if (stats) {
      stats->max_hermiticity_fix = std::max(stats->max_hermiticity_fix, max_abs(rho - herm));
      stats->max_trace_drift =
          std::max(stats->max_trace_drift, std::abs(herm.trace() - Complex(1.0, 0.0)));
    }
    rho = herm;
  }
  if (stats) stats->steps = steps;
  double drift = std::abs(rho.trace() - Complex(1.0, 0.0));
  if (drift > 1e-6)
    throw NumericalCheckError("ODE trace drift " + std::to_string(drift) +
                              " exceeds tolerance");
  return rho;
}

// Shared driver for both generators: evolves each sector independently.
DensityState evolve_blocks(const DensityState& state, double t, double dt,
                           double lambda_max, double default_dt,
                           const std::function<BlockRhs(int)>& make_rhs,
                           OdeStats* stats) {
  if (t < 0.0) throw ConfigError("evolution time must be >= 0");
  double dt_cap = default_dt;
  if (dt > 0.0) {
    if (lambda_max * dt > kRk4StabilityLimit)
      throw ConfigError("time step " + std::to_string(dt) +
                        " is outside the RK4 stability region (limit " +
                        std::to_string(kRk4StabilityLimit / lambda_max) + ")");
    dt_cap = dt;
  }
  DensityState out;
  for (const auto& [n, block] : state.sectors) {
    out.sectors[n] = SectorBlock{block.weight,
                                 rk4_block(block.rho, t, dt_cap, make_rhs(n), stats)};
  }
  return out;
}

}  // namespace

DensityState lindblad_rhs(const DensityState& state, double nu) {
  DensityState out;
  for (const auto& [n, block] : state.sectors) {
    StokesOperators ops = stokes_operators(n);
    Matrix d = 2.0 * nu *
               (ops.sx.mat * block.rho * ops.sx.mat + ops.sy.mat * block.rho * ops.sy.mat +
                ops.sz.mat * block.rho * ops.sz.mat -
                static_cast<double>(n) * (n + 2.0) * block.rho);
    out.sectors[n] = SectorBlock{block.weight, std::move(d)};
  }
  return out;
}

double default_ode_step(int n_max, double nu) {
  double lambda = 4.0 * nu * n_max * (n_max + 1.0);
  if (lambda <= 0.0) return std::numeric_limits<double>::infinity();
  return kTargetLambdaDt / lambda;
}

DensityState evolve_ode(const DensityState& state, double nu, double t, double dt,
                        OdeStats* stats) {
  if (nu < 0.0) throw ConfigError("decay constant nu must be >= 0");
  int n_max = state.max_sector();
  double lambda_max = 4.0 * nu * n_max * (n_max + 1.0);
  auto make_rhs = [nu](int n) -> BlockRhs {
    StokesOperators ops = stokes_operators(n);
    double casimir = static_cast<double>(n) * (n + 2.0);
    return [ops, casimir, nu](const Matrix& rho) -> Matrix {
      return 2.0 * nu *
             (ops.sx.mat * rho * ops.sx.mat + ops.sy.mat * rho * ops.sy.mat +
              ops.sz.mat * rho * ops.sz.mat - casimir * rho);
    };
  };
  return evolve_blocks(state, t, dt, lambda_max, default_ode_step(n_max, nu), make_rhs,
                       stats);
}

double wigner_3j(double j1, double j2, double j3, double m1, double m2, double m3) {
  auto twice = [](double x) {
    double t = 2.0 * x;
    double r = std::round(t);
    if (std::abs(t - r) > 1e-9)
      throw std::invalid_argument("3j arguments must be integers or half-integers");
    return static_cast<long>(r);
  };
  long tj1 = twice(j1), tj2 = twice(j2), tj3 = twice(j3);
  long tm1 = twice(m1), tm2 = twice(m2), tm3 = twice(m3);
  if (tj1 < 0 || tj2 < 0 || tj3 < 0) return 0.0;
  if (tm1 + tm2 + tm3 != 0) return 0.0;
  if (std::labs(tm1) > tj1 || std::labs(tm2) > tj2 || std::labs(tm3) > tj3) return 0.0;
  // m and j must have the same parity sector.
  if ((tj1 + tm1) % 2 != 0 || (tj2 + tm2) % 2 != 0 || (tj3 + tm3) % 2 != 0) return 0.0;
  if (tj3 > tj1 + tj2 || tj3 < std::labs(tj1 - tj2)) return 0.0;
  if ((tj1 + tj2 + tj3) % 2 != 0) return 0.0;

  // Integer-valued combinations (halved doubled sums).
  long a1 = (tj1 + tj2 - tj3) / 2, a2 = (tj1 - tj2 + tj3) / 2, a3 = (-tj1 + tj2 + tj3) / 2;
  long b1 = (tj1 - tm1) / 2, b2 = (tj1 + tm1) / 2;
  long b3 = (tj2 - tm2) / 2, b4 = (tj2 + tm2) / 2;
  long b5 = (tj3 - tm3) / 2, b6 = (tj3 + tm3) / 2;
  double log_delta =
      lf(a1) + lf(a2) + lf(a3) - lf((tj1 + tj2 + tj3) / 2 + 1);
  double log_f = lf(b1) + lf(b2) + lf(b3) + lf(b4) + lf(b5) + lf(b6);

  long c1 = (tj3 - tj2 + tm1) / 2;  // j3 - j2 + m1
  long c2 = (tj3 - tj1 - tm2) / 2;  // j3 - j1 - m2
  long k_min = std::max({0l, -c1, -c2});
  long k_max = std::min({a1, b1, b4});
  double sum = 0.0;
  for (long k = k_min; k <= k_max; ++k) {
    double log_den =
        lf(k) + lf(a1 - k) + lf(b1 - k) + lf(b4 - k) + lf(c1 + k) + lf(c2 + k);
    double term = std::exp(0.5 * (log_delta + log_f) - log_den);
    sum += (k % 2 == 0) ? term : -term;
  }
  long phase = (tj1 - tj2 - tm3) / 2;
  return ((phase % 2 + 2) % 2 == 0) ? sum : -sum;
}

std::vector<SectorOperator> multipole_basis(int n) {
  if (n < 0) throw std::invalid_argument("sector index n must be >= 0");
  double j = 0.5 * n;
  std::vector<SectorOperator> basis;
  basis.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int k = 0; k <= n; ++k) {
    double root = std::sqrt(2.0 * k + 1.0);
    for (int q = -k; q <= k; ++q) {
      Matrix t = Matrix::Zero(n + 1, n + 1);
      for (int i = 0; i <= n; ++i) {
        double mi = j - i;
        int ip = i + q;  // m_i = m_i' + q  =>  i' = i + q
        if (ip < 0 || ip > n) continue;
        double mip = j - ip;
        double w = wigner_3j(j, k, j, -mi, q, mip);
        if (w == 0.0) continue;
        // Condon-Shortley style phase (-1)^(j - m_i) = (-1)^i; with it
        // T_00 = 1/sqrt(n+1) and T_10 is a positive multiple of S_z.
        double sign = (i % 2 == 0) ? 1.0 : -1.0;
        t(i, ip) = sign * root * w;
      }
      basis.push_back(SectorOperator{n, std::move(t)});
    }
  }
  return basis;
}

MultipoleCoeffs multipole_decompose(const Matrix& block, int n) {
  if (block.rows() != n + 1 || block.cols() != n + 1)
    throw std::invalid_argument("block dimension does not match sector");
  std::vector<SectorOperator> basis = multipole_basis(n);
  MultipoleCoeffs coeffs;
  coeffs.n = n;
  coeffs.c.resize(n + 1);
  std::size_t idx = 0;
  for (int k = 0; k <= n; ++k) {
    coeffs.c[k].resize(2 * k + 1);
    for (int q = -k; q <= k; ++q, ++idx)
      coeffs.c[k][q + k] = (basis[idx].mat.adjoint() * block).trace();
  }
  return coeffs;
}

Matrix multipole_reconstruct(const MultipoleCoeffs& coeffs) {
  int n = coeffs.n;
  std::vector<SectorOperator> basis = multipole_basis(n);
  Matrix block = Matrix::Zero(n + 1, n + 1);
  std::size_t idx = 0;
  for (int k = 0; k <= n; ++k)
    for (int q = -k; q <= k; ++q, ++idx) block += coeffs.c[k][q + k] * basis[idx].mat;
  return block;
}

double multipole_rate(int k, double nu) { return 4.0 * nu * k * (k + 1.0); }

DensityState evolve_multipole(const DensityState& state, double nu, double t) {
  if (nu < 0.0) throw ConfigError("decay constant nu must be >= 0");
  if (t < 0.0) throw ConfigError("evolution time must be >= 0");
  DensityState out;
  for (const auto& [n, block] : state.sectors) {
    MultipoleCoeffs coeffs = multipole_decompose(block.rho, n);
    for (int k = 0; k <= n; ++k) {
      double factor = std::exp(-multipole_rate(k, nu) * t);
      for (auto& c : coeffs.c[k]) c *= factor;
    }
    out.sectors[n] = SectorBlock{block.weight, multipole_reconstruct(coeffs)};
  }
  return out;
}

StokesVector stokes_decay(const StokesVector& initial, double nu, double t) {
  StokesVector out = initial;
  out.s *= std::exp(-8.0 * nu * t);
  return out;
}

CovarianceData covariance_evolution(const CovarianceData& initial, double s_square,
                                    double nu, double t) {
  double e24 = std::exp(-24.0 * nu * t);
  double e16 = std::exp(-16.0 * nu * t);
  CovarianceData out;
  out.second_moment = e24 * initial.second_moment +
                      (s_square / 3.0) * (1.0 - e24) * Mat3::Identity();
  out.mean_outer = e16 * initial.mean_outer;
  out.covariance = out.second_moment - out.mean_outer;
  return out;
}

double variance_evolution(const CovarianceData& initial, double s_square,
                          const Vec3& axis, double nu, double t) {
  double norm = axis.norm();
  if (norm == 0.0) throw std::invalid_argument("variance axis must be nonzero");
  Vec3 e = axis / norm;
  return e.dot(covariance_evolution(initial, s_square, nu, t).covariance * e);
}

DensityState alt_generator_rhs(const DensityState& state, double gamma0, double gamma) {
  (void)gamma0;  // L(S0) vanishes on a fixed sector: S0 acts as the scalar n
  DensityState out;
  for (const auto& [n, block] : state.sectors) {
    StokesOperators ops = stokes_operators(n);
    Matrix sq = ops.sx.mat * ops.sx.mat + ops.sy.mat * ops.sy.mat;
    Matrix d = 2.0 * gamma *
               (2.0 * ops.sx.mat * block.rho * ops.sx.mat +
                2.0 * ops.sy.mat * block.rho * ops.sy.mat - sq * block.rho -
                block.rho * sq);
    out.sectors[n] = SectorBlock{block.weight, std::move(d)};
  }
  return out;
}

DensityState evolve_alt_ode(const DensityState& state, double gamma0, double gamma,
                            double t, double dt, OdeStats* stats) {
  if (gamma < 0.0 || gamma0 < 0.0) throw ConfigError("decay constants must be >= 0");
  int n_max = state.max_sector();
  // Conservative rate bound for the anisotropic generator's spectrum.
  double lambda_max = 8.0 * std::max(gamma, gamma0) * n_max * (n_max + 1.0);
  double default_dt = lambda_max > 0.0 ? kTargetLambdaDt / lambda_max
                                       : std::numeric_limits<double>::infinity();
  auto make_rhs = [gamma](int n) -> BlockRhs {
    StokesOperators ops = stokes_operators(n);
    Matrix sq = ops.sx.mat * ops.sx.mat + ops.sy.mat * ops.sy.mat;
    return [ops, sq, gamma](const Matrix& rho) -> Matrix {
      return 2.0 * gamma *
             (2.0 * ops.sx.mat * rho * ops.sx.mat + 2.0 * ops.sy.mat * rho * ops.sy.mat -
              sq * rho - rho * sq);
    };
  };
  return evolve_blocks(state, t, dt, lambda_max, default_dt, make_rhs, stats);
}

}  // namespace su2depol
