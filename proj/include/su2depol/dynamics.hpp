#pragma once

#include <vector>

#include "su2depol/states.hpp"

namespace su2depol {

// --- isotropic depolarization generator -----------------------------------
//
// d rho / dt = -nu sum_j [S_j, [S_j, rho]]
//            = nu (2 sum_j S_j rho S_j - 2 n(n+2) rho)   on sector n.
// The generator acts sector by sector and commutes with every exp(i u.S).

// Right-hand side of the master equation; the returned object carries the
// time derivative of each block (weights are conserved and copied through).
DensityState lindblad_rhs(const DensityState& state, double nu);

struct OdeStats {
  long steps = 0;
  double max_hermiticity_fix = 0.0;  // largest symmetrization applied per step
  double max_trace_drift = 0.0;
};

// Step size keeping the stiffest decay rate 4 n(n+1) nu at lambda*dt = 0.01.
double default_ode_step(int n_max, double nu);

// Fixed-step RK4 integration over [0, t].  dt <= 0 selects the default step;
// an explicit dt beyond the RK4 stability limit is rejected with ConfigError.
DensityState evolve_ode(const DensityState& state, double nu, double t, double dt = 0.0,
                        OdeStats* stats = nullptr);

// --- irreducible-tensor (multipole) solution ------------------------------

// Wigner 3j symbol by the Racah sum with log-factorials; arguments may be
// half-integers.  Returns 0 when selection rules fail.
double wigner_3j(double j1, double j2, double j3, double m1, double m2, double m3);

// Orthonormal tensor operators T_kq on sector n (spin j = n/2), ordered
// k = 0..n with q = -k..k inside each k; Tr(T_kq^dag T_k'q') = delta.
std::vector<SectorOperator> multipole_basis(int n);

// Expansion rho = sum_kq c_kq T_kq; c[k][q+k] = Tr(T_kq^dag rho).
struct MultipoleCoeffs {
  int n = 0;
  std::vector<std::vector<Complex>> c;

  Complex at(int k, int q) const { return c.at(k).at(q + k); }
};

MultipoleCoeffs multipole_decompose(const Matrix& block, int n);
Matrix multipole_reconstruct(const MultipoleCoeffs& coeffs);

// Decay rate of the rank-k multipole: 4 k (k+1) nu.
double multipole_rate(int k, double nu);

// Exact evolution: every c_kq picks up exp(-4 k(k+1) nu t).
DensityState evolve_multipole(const DensityState& state, double nu, double t);

// --- closed-form moment evolution -----------------------------------------

// <S> decays as exp(-8 nu t); <S0> is conserved.
StokesVector stokes_decay(const StokesVector& initial, double nu, double t);

// Second moments relax toward the isotropic value <S.S>/3 at rate 24 nu
// while the mean decays at 8 nu:
//   M(t) = e^{-24 nu t} M(0) + (<S.S>/3)(1 - e^{-24 nu t}) I
//   N(t) = e^{-16 nu t} N(0)
// s_square is the conserved <S.S> = <S0(S0+2)> of the initial state.
CovarianceData covariance_evolution(const CovarianceData& initial, double s_square,
                                    double nu, double t);

// Variance along `axis` (normalized internally) read off covariance_evolution.
double variance_evolution(const CovarianceData& initial, double s_square,
                          const Vec3& axis, double nu, double t);

// --- anisotropic comparison generator -------------------------------------
//
// d rho/dt = gamma0 L(S0) + 2 gamma (L(Sx) + L(Sy)),
// L(A) rho = 2 A rho A^dag - A^dag A rho - rho A^dag A.  Missing the Sz
// channel, this is *not* invariant under all exp(i u.S); it serves as the
// counterexample in the invariance tests.  On a single sector L(S0) = 0.

DensityState alt_generator_rhs(const DensityState& state, double gamma0, double gamma);

DensityState evolve_alt_ode(const DensityState& state, double gamma0, double gamma,
                            double t, double dt = 0.0, OdeStats* stats = nullptr);

}  // namespace su2depol
