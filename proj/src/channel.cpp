#include "su2depol/channel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "su2depol/errors.hpp"

namespace su2depol {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::int64_t kAccumBlock = 4096;  // samples per deterministic partial sum

// --- SU(2) elements as unit quaternions -----------------------------------
// exp(i u.S) restricted to any sector represents the group element
// exp(i u.sigma) = cos|u| + i sin|u| (u.sigma)/|u|; products can therefore be
// composed exactly at quaternion cost before a single conjugation.

struct Quat {
  double w = 1.0;
  Vec3 v = Vec3::Zero();
};

Quat quat_of(const RotationVector& u) {
  double len = u.u.norm();
  Quat q;
  q.w = std::cos(len);
  q.v = (len > 0.0) ? Vec3(std::sin(len) / len * u.u) : Vec3::Zero();
  return q;
}

// Product (b0 + i b.sigma)(a0 + i a.sigma); note the -b x a from sigma algebra.
Quat qmul(const Quat& b, const Quat& a) {
  Quat q;
  q.w = b.w * a.w - b.v.dot(a.v);
  q.v = b.w * a.v + a.w * b.v - b.v.cross(a.v);
  double norm = std::sqrt(q.w * q.w + q.v.squaredNorm());
  q.w /= norm;
  q.v /= norm;
  return q;
}

RotationVector rotation_from(const Quat& q) {
  double len = q.v.norm();
  double angle = std::atan2(len, q.w);  // in [0, pi] since len >= 0
  if (len < 1e-300) return RotationVector{Vec3::Zero()};
  return RotationVector{q.v * (angle / len)};
}

Vec3 isotropic_direction(RngStream& rng) {
  for (;;) {
    Vec3 g(rng.normal(), rng.normal(), rng.normal());
    double norm = g.norm();
    if (norm > 1e-12) return g / norm;
  }
}

double sample_table_length(const RadialLaw& law, RngStream& rng) {
  const auto& u = law.table_u;
  const auto& p = law.table_p;
  // Piecewise-linear density; invert the trapezoid CDF on the drawn segment.
  std::vector<double> cdf(u.size(), 0.0);
  for (std::size_t i = 1; i < u.size(); ++i)
    cdf[i] = cdf[i - 1] + 0.5 * (p[i] + p[i - 1]) * (u[i] - u[i - 1]);
  double x = rng.uniform() * cdf.back();
  std::size_t seg = 1;
  while (seg + 1 < cdf.size() && cdf[seg] < x) ++seg;
  double c0 = cdf[seg - 1], du = u[seg] - u[seg - 1];
  double slope = (p[seg] - p[seg - 1]) / du;
  double rest = x - c0;
  double root;
  if (std::abs(slope) < 1e-30) {
    root = (p[seg - 1] > 0.0) ? rest / p[seg - 1] : 0.0;
  } else {
    double disc = p[seg - 1] * p[seg - 1] + 2.0 * slope * rest;
    root = (-p[seg - 1] + std::sqrt(std::max(0.0, disc))) / slope;
  }
  return u[seg - 1] + std::clamp(root, 0.0, du);
}

struct SectorContext {
  int n = 0;
  double weight = 0.0;
  Matrix rho, sx, sy, sz;
};

Matrix conjugating_unitary(const SectorContext& ctx, const RotationVector& u) {
  return unitary_exp_i(u.u.x() * ctx.sx + u.u.y() * ctx.sy + u.u.z() * ctx.sz);
}

std::vector<Matrix> reduce_tree(std::vector<std::vector<Matrix>>& blocks, std::size_t lo,
                                std::size_t hi) {
  if (hi - lo == 1) return std::move(blocks[lo]);
  std::size_t mid = lo + (hi - lo) / 2;
  std::vector<Matrix> left = reduce_tree(blocks, lo, mid);
  std::vector<Matrix> right = reduce_tree(blocks, mid, hi);
  for (std::size_t s = 0; s < left.size(); ++s) left[s] += right[s];
  return left;
}

DensityState average_conjugations(
    const DensityState& state, std::int64_t samples, std::uint64_t seed,
    const std::function<RotationVector(RngStream&)>& draw, ChannelStats* stats) {
  if (samples < 1) throw ConfigError("sample count must be >= 1");
  std::vector<SectorContext> ctx;
  for (const auto& [n, block] : state.sectors) {
    StokesOperators ops = stokes_operators(n);
    ctx.push_back({n, block.weight, block.rho, std::move(ops.sx.mat),
                   std::move(ops.sy.mat), std::move(ops.sz.mat)});
  }
  std::int64_t num_blocks = (samples + kAccumBlock - 1) / kAccumBlock;
  std::vector<std::vector<Matrix>> partial(num_blocks);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::int64_t b = 0; b < num_blocks; ++b) {
    std::vector<Matrix> acc;
    acc.reserve(ctx.size());
    for (const auto& c : ctx) acc.push_back(Matrix::Zero(c.n + 1, c.n + 1));
    std::int64_t hi = std::min(samples, (b + 1) * kAccumBlock);
    for (std::int64_t i = b * kAccumBlock; i < hi; ++i) {
      RngStream rng = RngStream::for_sample(seed, static_cast<std::uint64_t>(i));
      RotationVector u = draw(rng);
      for (std::size_t s = 0; s < ctx.size(); ++s) {
        Matrix um = conjugating_unitary(ctx[s], u);
        acc[s] += um * ctx[s].rho * um.adjoint();
      }
    }
    partial[b] = std::move(acc);
  }
  std::vector<Matrix> total = reduce_tree(partial, 0, static_cast<std::size_t>(num_blocks));
  DensityState out;
  for (std::size_t s = 0; s < ctx.size(); ++s) {
    Matrix mean = total[s] / static_cast<double>(samples);
    Matrix herm = 0.5 * (mean + mean.adjoint());
    if (stats) {
      stats->hermiticity_fix = std::max(stats->hermiticity_fix, max_abs(mean - herm));
      stats->max_trace_drift = std::max(stats->max_trace_drift,
                                        std::abs(herm.trace() - Complex(1.0, 0.0)));
    }
    out.sectors[ctx[s].n] = SectorBlock{ctx[s].weight, std::move(herm)};
  }
  return out;
}

}  // namespace

RadialLaw RadialLaw::delta() {
  RadialLaw law;
  law.kind = Kind::DeltaAtZero;
  law.sigma = 0.0;
  return law;
}

RadialLaw RadialLaw::gaussian(double sigma) {
  if (sigma < 0.0) throw ConfigError("gaussian law needs sigma >= 0");
  RadialLaw law;
  law.kind = Kind::Gaussian;
  law.sigma = sigma;
  return law;
}

RadialLaw RadialLaw::uniform_angle(double u_max) {
  if (u_max <= 0.0 || u_max > kPi)
    throw ConfigError("uniform-angle law needs 0 < u_max <= pi");
  RadialLaw law;
  law.kind = Kind::UniformAngle;
  law.u_max = u_max;
  return law;
}

RadialLaw RadialLaw::table(std::vector<double> u, std::vector<double> p) {
  if (u.size() != p.size() || u.size() < 2)
    throw ConfigError("table law needs matching u/p arrays with >= 2 points");
  double integral = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (p[i] < 0.0) throw ConfigError("table law density must be >= 0");
    if (u[i] < 0.0 || u[i] > kPi) throw ConfigError("table law support must lie in [0, pi]");
    if (i > 0) {
      if (u[i] <= u[i - 1]) throw ConfigError("table law grid must be ascending");
      integral += 0.5 * (p[i] + p[i - 1]) * (u[i] - u[i - 1]);
    }
  }
  if (integral <= 0.0) throw ConfigError("table law density integrates to zero");
  RadialLaw law;
  law.kind = Kind::Table;
  law.table_u = std::move(u);
  law.table_p = std::move(p);
  return law;
}

RadialLaw RadialLaw::z_axis_gaussian(double sigma) {
  if (sigma < 0.0) throw ConfigError("z-axis law needs sigma >= 0");
  RadialLaw law;
  law.kind = Kind::ZAxisGaussian;
  law.sigma = sigma;
  return law;
}

RotationVector sample_rotation(const RadialLaw& law, RngStream& rng) {
  switch (law.kind) {
    case RadialLaw::Kind::DeltaAtZero:
      return RotationVector{Vec3::Zero()};
    case RadialLaw::Kind::Gaussian:
      return RotationVector{
          Vec3(law.sigma * rng.normal(), law.sigma * rng.normal(), law.sigma * rng.normal())};
    case RadialLaw::Kind::UniformAngle: {
      Vec3 dir = isotropic_direction(rng);
      return RotationVector{dir * (law.u_max * rng.uniform())};
    }
    case RadialLaw::Kind::Table: {
      Vec3 dir = isotropic_direction(rng);
      return RotationVector{dir * sample_table_length(law, rng)};
    }
    case RadialLaw::Kind::ZAxisGaussian:
      return RotationVector{Vec3(0.0, 0.0, law.sigma * rng.normal())};
  }
  throw std::logic_error("unknown radial law");
}

DensityState apply_channel(const DensityState& state, const RadialLaw& law,
                           const ChannelRun& run, ChannelStats* stats) {
  return average_conjugations(
      state, run.samples, run.seed,
      [&law](RngStream& rng) { return sample_rotation(law, rng); }, stats);
}

DensityState compose_small_steps(const DensityState& state, double nu, double t,
                                 const ChannelRun& run, ChannelStats* stats) {
  if (nu < 0.0 || t < 0.0) throw ConfigError("nu and t must be >= 0");
  if (run.steps < 1) throw ConfigError("step count must be >= 1");
  double sigma = std::sqrt(2.0 * nu * t / run.steps);
  int steps = run.steps;
  auto draw = [sigma, steps](RngStream& rng) {
    Quat q;
    for (int s = 0; s < steps; ++s) {
      Vec3 kick(sigma * rng.normal(), sigma * rng.normal(), sigma * rng.normal());
      q = qmul(quat_of(RotationVector{kick}), q);
    }
    return rotation_from(q);
  };
  return average_conjugations(state, run.samples, run.seed, draw, stats);
}

double invariance_check(const RadialLaw& law, const RotationVector& v,
                        const DensityState& state, const ChannelRun& run) {
  DensityState rotate_first = apply_channel(rotated(state, v), law, run);
  DensityState rotate_last = rotated(apply_channel(state, law, run), v);
  return trace_distance(rotate_first, rotate_last);
}

}  // namespace su2depol
