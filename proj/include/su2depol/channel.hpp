#pragma once

#include <cstdint>
#include <vector>

#include "su2depol/states.hpp"

namespace su2depol {

// Distribution of the random rotation vector u applied by the channel.  The
// first four kinds draw an isotropic direction; ZAxisGaussian pins u to the
// z axis and exists to give the invariance tests a channel that must fail.
struct RadialLaw {
  enum class Kind { DeltaAtZero, Gaussian, UniformAngle, Table, ZAxisGaussian };

  Kind kind = Kind::Gaussian;
  double sigma = 0.1;                  // Gaussian / ZAxisGaussian component std-dev
  double u_max = 0.0;                  // UniformAngle cutoff for |u|
  std::vector<double> table_u;         // Table: |u| grid, ascending within [0, pi]
  std::vector<double> table_p;         // Table: density values, p >= 0

  static RadialLaw delta();                        // u = 0, identity channel
  static RadialLaw gaussian(double sigma);         // u_j iid N(0, sigma^2)
  static RadialLaw uniform_angle(double u_max);    // |u| ~ U[0, u_max]
  static RadialLaw table(std::vector<double> u, std::vector<double> p);
  static RadialLaw z_axis_gaussian(double sigma);  // u = (0, 0, N(0, sigma^2))

  bool isotropic() const { return kind != Kind::ZAxisGaussian; }
};

// Sampling budget shared by the Monte Carlo entry points.
struct ChannelRun {
  std::int64_t samples = 10000;
  std::uint64_t seed = 1;
  int steps = 1;  // only compose_small_steps uses more than one
};

struct ChannelStats {
  double max_trace_drift = 0.0;
  double hermiticity_fix = 0.0;
};

// One rotation vector drawn from the law.
RotationVector sample_rotation(const RadialLaw& law, RngStream& rng);

// Monte Carlo average of exp(i u.S) rho exp(-i u.S) over `run.samples` draws.
// Sample i always uses RngStream::for_sample(seed, i) and partial sums are
// combined by a fixed-shape tree, so the result is bit-identical for any
// thread count.
DensityState apply_channel(const DensityState& state, const RadialLaw& law,
                           const ChannelRun& run, ChannelStats* stats = nullptr);

// `run.steps` consecutive Gaussian kicks with sigma^2 = 2 nu t / steps per
// component.  The per-sample product of rotations is composed exactly in
// SU(2) before a single conjugation, so cost is independent of step count.
DensityState compose_small_steps(const DensityState& state, double nu, double t,
                                 const ChannelRun& run, ChannelStats* stats = nullptr);

// Covariance test with common random numbers: trace distance between
// E(V rho V^dag) and V E(rho) V^dag using identical draws on both sides.
// Isotropic laws give noise-level output; anisotropic laws do not.
double invariance_check(const RadialLaw& law, const RotationVector& v,
                        const DensityState& state, const ChannelRun& run);

}  // namespace su2depol
