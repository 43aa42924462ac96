#pragma once

#include <Eigen/Dense>
#include <complex>

namespace su2depol {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Largest photon number handled by default-configured tools.  Operator
// construction itself works for any n >= 0; this only caps CLI input.
inline constexpr int kDefaultMaxPhotonNumber = 16;

// Dense operator on the n-photon sector (dimension n+1).  Basis index i
// corresponds to the two-mode Fock state |m, n-m> with m = n - i photons in
// the first mode, so index 0 is |n, 0> and index n is |0, n>.
struct SectorOperator {
  int n = 0;
  Matrix mat;
};

struct StokesOperators {
  SectorOperator s0, sx, sy, sz;
};

// Axis-angle label u of the sector unitary exp(i u . S); the induced
// rotation of the Stokes vector has angle 2|u| about u.
struct RotationVector {
  Vec3 u = Vec3::Zero();

  double angle() const { return 2.0 * u.norm(); }
  Vec3 axis() const;               // unit axis; +z when u = 0
  RotationVector canonical() const;  // representative with |u| in [0, pi]
};

// Point on the Poincare sphere: theta in [0, pi] from the +z pole, phi
// azimuth in [0, 2pi).
struct CoherentPoint {
  double theta = 0.0;
  double phi = 0.0;

  Vec3 omega() const;  // unit vector (sin t cos p, sin t sin p, cos t)
  static CoherentPoint from_omega(const Vec3& v);
};

// Stokes operators restricted to the n-photon sector.
StokesOperators stokes_operators(int n);

// Max-abs deviation of [Sx,Sy] - 2i Sz and cyclic permutations on sector n.
double commutator_residual(int n);

// exp(i u . S) on sector n.
SectorOperator su2_unitary(const RotationVector& u, int n);

// 3x3 rotation R with U^dag S_j U = sum_k R_jk S_k, extracted from traces on
// sector n (n >= 1).  Independent of n up to roundoff.  Mean Stokes vectors
// transform as s -> R s when the state is conjugated by U.
Mat3 rotation_of(const RotationVector& u, int n);

// Amplitudes of the spin-coherent state |n, Omega> in the sector basis:
// component at index i = n - m is sqrt(C(n,m)) (sin t/2)^(n-m) (cos t/2)^m
// e^{-i m phi}.
CVector coherent_state(int n, const CoherentPoint& point);

// Image of a coherent point under the rotation induced by u: coherent states
// stay coherent, U|n,Omega> ~ |n,R Omega>.
CoherentPoint rotate_coherent(const RotationVector& u, const CoherentPoint& point);

// exp(i H) for Hermitian H via eigendecomposition.
Matrix unitary_exp_i(const Matrix& hermitian);

// Largest absolute entry; convenience for residual checks.
double max_abs(const Matrix& m);

}  // namespace su2depol
