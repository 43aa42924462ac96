#include "su2depol/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace su2depol {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_sector(int n) {
  if (n < 0) throw std::invalid_argument("sector index n must be >= 0");
}

}  // namespace

Vec3 RotationVector::axis() const {
  double norm = u.norm();
  if (norm == 0.0) return Vec3(0.0, 0.0, 1.0);
  return u / norm;
}

RotationVector RotationVector::canonical() const {
  double norm = u.norm();
  if (norm == 0.0) return *this;
  double wrapped = std::fmod(norm, kPi);
  return RotationVector{axis() * wrapped};
}

Vec3 CoherentPoint::omega() const {
  return Vec3(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
              std::cos(theta));
}

CoherentPoint CoherentPoint::from_omega(const Vec3& v) {
  double norm = v.norm();
  if (norm == 0.0) throw std::invalid_argument("cannot map zero vector to the sphere");
  Vec3 w = v / norm;
  CoherentPoint p;
  p.theta = std::atan2(std::hypot(w.x(), w.y()), w.z());
  p.phi = std::atan2(w.y(), w.x());
  if (p.phi < 0.0) p.phi += 2.0 * kPi;
  return p;
}

StokesOperators stokes_operators(int n) {
  require_sector(n);
  int dim = n + 1;
  StokesOperators ops;
  for (SectorOperator* op : {&ops.s0, &ops.sx, &ops.sy, &ops.sz}) {
    op->n = n;
    op->mat = Matrix::Zero(dim, dim);
  }
  // Index i holds m = n - i photons in mode 1.  The mode-exchange ladder
  // a1^dag a2 raises m by one (entry at (i-1, i)), a2^dag a1 lowers it.
  for (int i = 0; i < dim; ++i) {
    int m = n - i;
    ops.s0.mat(i, i) = static_cast<double>(n);
    ops.sz.mat(i, i) = static_cast<double>(2 * m - n);
    if (i > 0) {
      double up = std::sqrt(static_cast<double>(n - i + 1) * static_cast<double>(i));
      ops.sx.mat(i - 1, i) += up;
      ops.sy.mat(i - 1, i) += Complex(0.0, -1.0) * up;
    }
    if (i < n) {
      double down = std::sqrt(static_cast<double>(n - i) * static_cast<double>(i + 1));
      ops.sx.mat(i + 1, i) += down;
      ops.sy.mat(i + 1, i) += Complex(0.0, 1.0) * down;
    }
  }
  return ops;
}

double commutator_residual(int n) {
  StokesOperators ops = stokes_operators(n);
  const Matrix& x = ops.sx.mat;
  const Matrix& y = ops.sy.mat;
  const Matrix& z = ops.sz.mat;
  Complex two_i(0.0, 2.0);
  double r = max_abs(x * y - y * x - two_i * z);
  r = std::max(r, max_abs(y * z - z * y - two_i * x));
  r = std::max(r, max_abs(z * x - x * z - two_i * y));
  return r;
}

SectorOperator su2_unitary(const RotationVector& u, int n) {
  require_sector(n);
  StokesOperators ops = stokes_operators(n);
  Matrix h = u.u.x() * ops.sx.mat + u.u.y() * ops.sy.mat + u.u.z() * ops.sz.mat;
  return SectorOperator{n, unitary_exp_i(h)};
}

Mat3 rotation_of(const RotationVector& u, int n) {
  if (n < 1) throw std::invalid_argument("rotation extraction needs n >= 1");
  StokesOperators ops = stokes_operators(n);
  const Matrix* s[3] = {&ops.sx.mat, &ops.sy.mat, &ops.sz.mat};
  Matrix um = su2_unitary(u, n).mat;
  // Tr(S_j S_k) = delta_jk n(n+1)(n+2)/3 on sector n.
  double norm = static_cast<double>(n) * (n + 1.0) * (n + 2.0) / 3.0;
  Mat3 r;
  for (int j = 0; j < 3; ++j) {
    Matrix conj = um.adjoint() * (*s[j]) * um;
    for (int k = 0; k < 3; ++k) r(j, k) = (conj * (*s[k])).trace().real() / norm;
  }
  return r;
}

CVector coherent_state(int n, const CoherentPoint& point) {
  require_sector(n);
  CVector v(n + 1);
  double c = std::cos(0.5 * point.theta);
  double s = std::sin(0.5 * point.theta);
  double binom = 1.0;  // C(n, m) built up from m = n downward
  for (int i = 0; i <= n; ++i) {
    int m = n - i;
    if (i > 0) binom *= static_cast<double>(m + 1) / static_cast<double>(n - m);
    Complex phase = std::exp(Complex(0.0, -point.phi * m));
    v(i) = std::sqrt(binom) * std::pow(s, n - m) * std::pow(c, m) * phase;
  }
  return v;
}

CoherentPoint rotate_coherent(const RotationVector& u, const CoherentPoint& point) {
  // <U psi|S_j|U psi> = sum_k R_jk <psi|S_k|psi>, so the mean-spin direction
  // of a coherent state moves by R and coherent states stay coherent.
  Mat3 r = rotation_of(u, 1);
  return CoherentPoint::from_omega(r * point.omega());
}

Matrix unitary_exp_i(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  CVector phases(hermitian.rows());
  for (Eigen::Index k = 0; k < hermitian.rows(); ++k)
    phases(k) = std::exp(Complex(0.0, es.eigenvalues()(k)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

double max_abs(const Matrix& m) {
  double r = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) r = std::max(r, std::abs(m(i, j)));
  return r;
}

}  // namespace su2depol
