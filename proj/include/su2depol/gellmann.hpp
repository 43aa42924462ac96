#pragma once

#include <optional>
#include <vector>

#include "su2depol/polarization.hpp"
#include "su2depol/states.hpp"

namespace su2depol {

// Generalized Gell-Mann matrices Lambda_1 .. Lambda_{d^2-1} for d = n+1,
// normalized to Tr(Lambda_a Lambda_b) = 2 delta_ab.  Construction: for each
// column k, the symmetric and antisymmetric pair matrices (j, k) for j < k,
// then the diagonal sqrt(2/(k(k+1))) diag(1, .., 1, -k, 0, ..).  For n = 1
// this reproduces the Pauli triple, for n = 2 the standard eight.
std::vector<SectorOperator> gellmann_basis(int n);

// Coordinates in rho = 1/(n+1) + (1/2) sum_j mu_j Lambda_j.
struct GellMannCoords {
  int n = 0;
  Eigen::VectorXd mu;
};

GellMannCoords to_coords(const Matrix& block, int n);
Matrix from_coords(const GellMannCoords& coords);

// Generator in coordinates: d mu / dt = -Gamma mu with
// Gamma_jk = 2 nu n(n+2) delta_jk - nu sum_l Tr(Lambda_j S_l Lambda_k S_l).
// Real symmetric; eigenvalues are the multipole rates 4 k(k+1) nu.
struct GammaMatrix {
  int n = 0;
  double nu = 0.0;
  Eigen::MatrixXd m;
};

GammaMatrix gamma_matrix(int n, double nu);

// Connected components of the sparsity graph of Gamma (edge where
// |Gamma_jk| > tol).  Indices are 1-based to match the conventional
// Lambda subscripts; components are sorted by their smallest member.
std::vector<std::vector<int>> invariant_subspaces(const GammaMatrix& gamma,
                                                  double tol = 1e-12);

// Quadratic form giving the Q-function measure: D = mu^T Phi mu, with
// Phi_jk = (n+1)^2/(16 pi) Int lambda_j lambda_k dOmega and
// lambda_j(Omega) = <n,Omega|Lambda_j|n,Omega>.
struct PhiMatrix {
  int n = 0;
  Eigen::MatrixXd m;
};

PhiMatrix phi_matrix(int n, const SphereGrid& grid);

// D(t) = mu(t)^T Phi mu(t) with mu(t) = exp(-Gamma t) mu0.
double d_of_t(const Eigen::VectorXd& mu0, const GammaMatrix& gamma,
              const PhiMatrix& phi, double t);

// If mu0 is an eigenvector of Gamma (within tol, relative), the state decays
// through a pure exponential channel; returns its rate eta = mu.Gamma.mu /
// mu.mu, otherwise nullopt.  Throws ConfigError for mu0 = 0.
std::optional<double> detect_channel_form(const Eigen::VectorXd& mu0,
                                          const GammaMatrix& gamma, double tol = 1e-10);

// Third solver route: mu(t) = exp(-Gamma_n t) mu(0) applied sector by sector
// (an n = 0 sector has no coordinates and passes through unchanged).
DensityState evolve_gellmann(const DensityState& state, double nu, double t);

}  // namespace su2depol
