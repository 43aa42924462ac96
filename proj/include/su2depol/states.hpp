#pragma once

#include <map>
#include <string>
#include <vector>

#include "su2depol/operators.hpp"
#include "su2depol/rng.hpp"

namespace su2depol {

// One photon-number sector of a block-diagonal two-mode state: a unit-trace
// (n+1)x(n+1) density block entering the mixture with probability `weight`.
struct SectorBlock {
  double weight = 0.0;
  Matrix rho;
};

// Block-diagonal state sum_n weight_n |block_n>; total photon number is a
// classical label, coherences between sectors are not represented.
struct DensityState {
  std::map<int, SectorBlock> sectors;

  int max_sector() const { return sectors.empty() ? 0 : sectors.rbegin()->first; }
};

struct StokesVector {
  double s0 = 0.0;
  Vec3 s = Vec3::Zero();
};

// Second moments of the Stokes vector: `second_moment` is the symmetrized
// matrix <(S_j S_k + S_k S_j)/2>, `mean_outer` is <S_j><S_k>, and
// `covariance = second_moment - mean_outer`.
struct CovarianceData {
  Mat3 second_moment = Mat3::Zero();
  Mat3 mean_outer = Mat3::Zero();
  Mat3 covariance = Mat3::Zero();
};

// Eigen-decomposition of the covariance matrix; `variances` descending,
// matching unit axes in the columns of `axes`.
struct PrincipalComponents {
  Vec3 variances = Vec3::Zero();
  Mat3 axes = Mat3::Identity();
};

// --- constructors ---------------------------------------------------------

// Single-sector pure state; amplitudes are normalized internally.
DensityState pure_state(int n, const CVector& amplitudes);

DensityState coherent_density(int n, const CoherentPoint& point);
DensityState noon_state(int n);              // (|n,0> + |0,n>)/sqrt(2)
DensityState twin_state(int n);              // |n/2, n/2>, n even
DensityState fock_state(int n, int m);       // |m, n-m>
DensityState maximally_mixed(int n);         // 1/(n+1) on sector n

// Unit-trace random density block G G^dag / tr(G G^dag), complex Ginibre G.
Matrix random_block(int n, RngStream& rng);

// --- observables ----------------------------------------------------------

StokesVector stokes_parameters(const DensityState& state);
double purity(const DensityState& state);
CovarianceData covariance(const DensityState& state);
PrincipalComponents principal_components(const DensityState& state);

// tr(M) = <S.S> - |<S>|^2, the rotation-invariant total Stokes variance.
double total_variance(const DensityState& state);

// <S0 (S0 + 2)> = <S.S>; enters variance evolution formulas.
double mean_total_spin_square(const DensityState& state);

// --- transformations ------------------------------------------------------

// Conjugate every sector by exp(i u . S).
DensityState rotated(const DensityState& state, const RotationVector& u);

// Half trace norm of the difference, sectors compared blockwise.
double trace_distance(const DensityState& a, const DensityState& b);

// --- validation and serialization -----------------------------------------

// Empty result means the state is physical: Hermitian unit-trace PSD blocks,
// nonnegative weights summing to one.  Each failure is reported as a string
// naming the sector and the violated invariant.
std::vector<std::string> validate(const DensityState& state, double tol = 1e-9);

// JSON layout: {"sectors": [{"n": int, "weight": real, "re": [[..]],
// "im": [[..]]}, ...]}.  Loading validates and throws ConfigError listing
// every violated invariant; file-system problems throw IoError.
std::string to_json(const DensityState& state, int indent = 2);
DensityState state_from_json(const std::string& text);
void save_state_json(const DensityState& state, const std::string& path);
DensityState load_state_json(const std::string& path);

}  // namespace su2depol
