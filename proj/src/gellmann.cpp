#include "su2depol/gellmann.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "su2depol/errors.hpp"

namespace su2depol {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::vector<SectorOperator> gellmann_basis(int n) {
  if (n < 0) throw std::invalid_argument("sector index n must be >= 0");
  int d = n + 1;
  std::vector<SectorOperator> basis;
  basis.reserve(static_cast<std::size_t>(d) * d - 1);
  for (int k = 1; k < d; ++k) {
    for (int j = 0; j < k; ++j) {
      Matrix sym = Matrix::Zero(d, d);
      sym(j, k) = 1.0;
      sym(k, j) = 1.0;
      basis.push_back(SectorOperator{n, std::move(sym)});
      Matrix asym = Matrix::Zero(d, d);
      asym(j, k) = Complex(0.0, -1.0);
      asym(k, j) = Complex(0.0, 1.0);
      basis.push_back(SectorOperator{n, std::move(asym)});
    }
    Matrix diag = Matrix::Zero(d, d);
    double scale = std::sqrt(2.0 / (k * (k + 1.0)));
    for (int j = 0; j < k; ++j) diag(j, j) = scale;
    diag(k, k) = -scale * k;
    basis.push_back(SectorOperator{n, std::move(diag)});
  }
  return basis;
}

GellMannCoords to_coords(const Matrix& block, int n) {
  if (block.rows() != n + 1 || block.cols() != n + 1)
    throw std::invalid_argument("block dimension does not match sector");
  std::vector<SectorOperator> basis = gellmann_basis(n);
  GellMannCoords coords;
  coords.n = n;
  coords.mu.resize(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j)
    coords.mu(static_cast<Eigen::Index>(j)) = (block * basis[j].mat).trace().real();
  return coords;
}

Matrix from_coords(const GellMannCoords& coords) {
  int d = coords.n + 1;
  std::vector<SectorOperator> basis = gellmann_basis(coords.n);
  if (coords.mu.size() != static_cast<Eigen::Index>(basis.size()))
    throw std::invalid_argument("coordinate vector has wrong length");
  Matrix block = Matrix::Identity(d, d) / static_cast<double>(d);
  for (std::size_t j = 0; j < basis.size(); ++j)
    block += 0.5 * coords.mu(static_cast<Eigen::Index>(j)) * basis[j].mat;
  return block;
}

GammaMatrix gamma_matrix(int n, double nu) {
  if (n < 1) throw std::invalid_argument("coordinate generator needs n >= 1");
  std::vector<SectorOperator> basis = gellmann_basis(n);
  StokesOperators ops = stokes_operators(n);
  const Matrix* s[3] = {&ops.sx.mat, &ops.sy.mat, &ops.sz.mat};
  int m = static_cast<int>(basis.size());
  GammaMatrix gamma;
  gamma.n = n;
  gamma.nu = nu;
  gamma.m.setZero(m, m);
  double diag = 2.0 * nu * n * (n + 2.0);
  for (int j = 0; j < m; ++j) {
    // Precompute sum_l S_l Lambda_j S_l once per row.
    Matrix mixed = Matrix::Zero(n + 1, n + 1);
    for (int l = 0; l < 3; ++l) mixed += (*s[l]) * basis[j].mat * (*s[l]);
    for (int k = 0; k < m; ++k) {
      double overlap = (basis[k].mat * mixed).trace().real();
      gamma.m(j, k) = -nu * overlap + (j == k ? diag : 0.0);
    }
  }
  // Enforce exact symmetry against roundoff.
  gamma.m = 0.5 * (gamma.m + gamma.m.transpose()).eval();
  return gamma;
}

std::vector<std::vector<int>> invariant_subspaces(const GammaMatrix& gamma, double tol) {
  int m = static_cast<int>(gamma.m.rows());
  std::vector<int> component(m, -1);
  std::vector<std::vector<int>> result;
  for (int start = 0; start < m; ++start) {
    if (component[start] >= 0) continue;
    std::vector<int> members, frontier{start};
    component[start] = static_cast<int>(result.size());
    while (!frontier.empty()) {
      int j = frontier.back();
      frontier.pop_back();
      members.push_back(j + 1);  // report 1-based Lambda subscripts
      for (int k = 0; k < m; ++k) {
        if (component[k] < 0 && std::abs(gamma.m(j, k)) > tol) {
          component[k] = component[j];
          frontier.push_back(k);
        }
      }
    }
    std::sort(members.begin(), members.end());
    result.push_back(std::move(members));
  }
  return result;
}

PhiMatrix phi_matrix(int n, const SphereGrid& grid) {
  if (n < 1) throw std::invalid_argument("coordinate form needs n >= 1");
  if (grid.max_sector < n)
    throw ConfigError("sphere grid too coarse for sector n=" + std::to_string(n));
  std::vector<SectorOperator> basis = gellmann_basis(n);
  int m = static_cast<int>(basis.size());
  PhiMatrix phi;
  phi.n = n;
  phi.m.setZero(m, m);
  Eigen::VectorXd lam(m);
  for (const auto& node : grid.nodes) {
    CVector v = coherent_state(n, CoherentPoint{node.theta, node.phi});
    for (int j = 0; j < m; ++j) lam(j) = (v.adjoint() * basis[j].mat * v)(0, 0).real();
    phi.m.noalias() += node.weight * lam * lam.transpose();
  }
  phi.m *= (n + 1.0) * (n + 1.0) / (16.0 * kPi);
  return phi;
}

double d_of_t(const Eigen::VectorXd& mu0, const GammaMatrix& gamma, const PhiMatrix& phi,
              double t) {
  if (mu0.size() != gamma.m.rows() || mu0.size() != phi.m.rows())
    throw std::invalid_argument("coordinate dimensions disagree");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gamma.m);
  Eigen::VectorXd decay =
      (-t * es.eigenvalues().array()).exp().matrix();
  Eigen::VectorXd mu_t =
      es.eigenvectors() * decay.asDiagonal() * es.eigenvectors().transpose() * mu0;
  return mu_t.dot(phi.m * mu_t);
}

std::optional<double> detect_channel_form(const Eigen::VectorXd& mu0,
                                          const GammaMatrix& gamma, double tol) {
  if (mu0.size() != gamma.m.rows())
    throw std::invalid_argument("coordinate dimensions disagree");
  double norm2 = mu0.squaredNorm();
  if (norm2 == 0.0)
    throw ConfigError("channel-form detection needs a nonzero coordinate vector");
  Eigen::VectorXd image = gamma.m * mu0;
  double eta = mu0.dot(image) / norm2;
  double residual = (image - eta * mu0).norm();
  if (residual > tol * image.norm()) return std::nullopt;
  return eta;
}

DensityState evolve_gellmann(const DensityState& state, double nu, double t) {
  if (nu < 0.0) throw ConfigError("decay constant nu must be >= 0");
  if (t < 0.0) throw ConfigError("evolution time must be >= 0");
  DensityState out;
  for (const auto& [n, block] : state.sectors) {
    if (n == 0) {
      out.sectors[n] = block;
      continue;
    }
    GammaMatrix gamma = gamma_matrix(n, nu);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gamma.m);
    Eigen::VectorXd decay = (-t * es.eigenvalues().array()).exp().matrix();
    GellMannCoords coords = to_coords(block.rho, n);
    coords.mu = es.eigenvectors() * decay.asDiagonal() * es.eigenvectors().transpose() *
                coords.mu;
    out.sectors[n] = SectorBlock{block.weight, from_coords(coords)};
  }
  return out;
}

}  // namespace su2depol
