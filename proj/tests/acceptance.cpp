// Acceptance harness: one line of output per criterion, nonzero exit when any
// criterion fails.  Tolerances are pinned here and nowhere else; the unit
// suites cover the same machinery at finer grain.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "su2depol/channel.hpp"
#include "su2depol/dynamics.hpp"
#include "su2depol/errors.hpp"
#include "su2depol/gellmann.hpp"
#include "su2depol/operators.hpp"
#include "su2depol/polarization.hpp"
#include "su2depol/rng.hpp"
#include "su2depol/scenarios.hpp"
#include "su2depol/states.hpp"

using namespace su2depol;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void expect(bool condition, const std::string& detail) {
  if (!condition) throw CheckFailure(detail);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

DensityState single_sector(int n, RngStream& rng) {
  DensityState state;
  state.sectors[n] = SectorBlock{1.0, random_block(n, rng)};
  return state;
}

DensityState two_sector(int n1, int n2, RngStream& rng) {
  double w = 0.2 + 0.6 * rng.uniform();
  DensityState state;
  state.sectors[n1] = SectorBlock{w, random_block(n1, rng)};
  state.sectors[n2] = SectorBlock{1.0 - w, random_block(n2, rng)};
  return state;
}

// ---------------------------------------------------------------------------
// 1. Reference matrices on the two-photon sector.

Eigen::MatrixXd gamma_pattern() {
  Eigen::MatrixXd g(8, 8);
  double r3 = std::sqrt(3.0);
  g << 4, 0, 0, 0, 0, -2, 0, 0,
       0, 4, 0, 0, 0, 0, -2, 0,
       0, 0, 5, 0, 0, 0, 0, -r3,
       0, 0, 0, 6, 0, 0, 0, 0,
       0, 0, 0, 0, 6, 0, 0, 0,
      -2, 0, 0, 0, 0, 4, 0, 0,
       0, -2, 0, 0, 0, 0, 4, 0,
       0, 0, -r3, 0, 0, 0, 0, 3;
  return g;
}

Eigen::MatrixXd phi_pattern() {
  Eigen::MatrixXd f(8, 8);
  double r3 = std::sqrt(3.0);
  f << 3, 0, 0, 0, 0, 2, 0, 0,
       0, 3, 0, 0, 0, 0, 2, 0,
       0, 0, 2, 0, 0, 0, 0, r3,
       0, 0, 0, 1, 0, 0, 0, 0,
       0, 0, 0, 0, 1, 0, 0, 0,
       2, 0, 0, 0, 0, 3, 0, 0,
       0, 2, 0, 0, 0, 0, 3, 0,
       0, 0, r3, 0, 0, 0, 0, 4;
  return f;
}

void criterion_golden_matrices() {
  auto start = std::chrono::steady_clock::now();
  for (double nu : {1.0, 1.37}) {
    double err = (gamma_matrix(2, nu).m - 4.0 * nu * gamma_pattern()).cwiseAbs().maxCoeff();
    expect(err < 1e-10, "generator matrix deviates by " + fmt(err) + " at nu=" + fmt(nu));
  }
  double err = (phi_matrix(2, make_grid(2)).m - 0.15 * phi_pattern()).cwiseAbs().maxCoeff();
  expect(err < 1e-10, "quadratic form deviates by " + fmt(err));
  double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  expect(elapsed < 1.0, "matrix construction took " + fmt(elapsed) + " s");
}

// ---------------------------------------------------------------------------
// 2. Closed-form decay curves of the Q-function degree.

struct DecayCurve {
  std::string name;
  DensityState state;
  std::map<int, double> coeff;  // multipole rank -> amplitude in D(t)
};

double curve_value(const DecayCurve& curve, double t) {
  double d = 0.0;
  for (const auto& [k, a] : curve.coeff) d += a * std::exp(-8.0 * k * (k + 1.0) * t);
  return d;
}

void criterion_decay_curves() {
  std::vector<DecayCurve> curves;
  curves.push_back({"n=2 coherent", coherent_density(2, {}), {{1, 3.0 / 4}, {2, 1.0 / 20}}});
  curves.push_back({"n=2 noon", noon_state(2), {{2, 1.0 / 5}}});
  curves.push_back({"n=2 twin", twin_state(2), {{2, 1.0 / 5}}});
  curves.push_back({"n=3 coherent", coherent_density(3, {}),
                    {{1, 27.0 / 25}, {2, 1.0 / 5}, {3, 1.0 / 175}}});
  curves.push_back({"n=3 noon", noon_state(3), {{2, 1.0 / 5}, {3, 2.0 / 35}}});
  curves.push_back({"n=4 coherent", coherent_density(4, {}),
                    {{1, 4.0 / 3}, {2, 20.0 / 49}, {3, 1.0 / 28}, {4, 1.0 / 1764}}});
  curves.push_back({"n=4 noon", noon_state(4), {{2, 20.0 / 49}, {4, 1.0 / 49}}});
  curves.push_back({"n=4 twin", twin_state(4), {{2, 20.0 / 49}, {4, 1.0 / 49}}});

  for (const DecayCurve& curve : curves) {
    int n = curve.state.max_sector();
    SphereGrid grid = make_grid(n);
    GammaMatrix gamma = gamma_matrix(n, 1.0);
    PhiMatrix phi = phi_matrix(n, grid);
    Eigen::VectorXd mu = to_coords(curve.state.sectors.at(n).rho, n).mu;

    DensityState ode_state = curve.state;
    double ode_time = 0.0;
    for (int i = 0; i < 50; ++i) {
      double t = 0.3 * i / 49.0;
      double reference = curve_value(curve, t);
      double coord = d_of_t(mu, gamma, phi, t);
      double rel = std::abs(coord - reference) / reference;
      expect(rel < 1e-9, curve.name + " coordinate-route error " + fmt(rel) +
                             " at t=" + fmt(t));
      ode_state = evolve_ode(ode_state, 1.0, t - ode_time);
      ode_time = t;
      double quad = degree_pq(ode_state, grid).d;
      double rel_ode = std::abs(quad - reference) / reference;
      expect(rel_ode < 1e-7, curve.name + " integrator-route error " + fmt(rel_ode) +
                                 " at t=" + fmt(t));
    }
  }
}

// ---------------------------------------------------------------------------
// 3. Full generator spectrum.

void criterion_spectral_law() {
  for (int n = 1; n <= 6; ++n) {
    for (double nu : {1.0, 0.55}) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gamma_matrix(n, nu).m);
      std::vector<double> expected;
      for (int k = 1; k <= n; ++k)
        for (int q = 0; q < 2 * k + 1; ++q) expected.push_back(4.0 * k * (k + 1.0) * nu);
      std::sort(expected.begin(), expected.end());
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        double err = std::abs(es.eigenvalues()(i) - expected[static_cast<size_t>(i)]);
        expect(err < 1e-9, "eigenvalue " + std::to_string(i) + " off by " + fmt(err) +
                               " for n=" + std::to_string(n) + ", nu=" + fmt(nu));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// 4. Universal decay of the mean-vector degree.

void criterion_stokes_decay() {
  RngStream rng(1404);
  double nu = 1.0, t = 0.12;
  for (int n = 1; n <= 4; ++n) {
    for (int trial = 0; trial < 50; ++trial) {
      DensityState state;
      do {
        state = single_sector(n, rng);
      } while (stokes_parameters(state).s.norm() < 0.05 * n);
      double expected = degree_ps(state) * std::exp(-8.0 * nu * t);
      for (const DensityState& evolved :
           {evolve_multipole(state, nu, t), evolve_ode(state, nu, t)}) {
        double rel = std::abs(degree_ps(evolved) - expected) / expected;
        expect(rel < 1e-8, "mean-degree decay off by " + fmt(rel) + " (n=" +
                               std::to_string(n) + ", trial " + std::to_string(trial) + ")");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// 5. Second-moment closed form and the twin-beam variance numbers.

void criterion_variance_closed_form() {
  RngStream rng(1505);
  double nu = 0.9;
  for (int n = 1; n <= 4; ++n) {
    for (int trial = 0; trial < 12; ++trial) {
      DensityState state = (trial % 3 == 0 && n > 1) ? two_sector(n - 1, n, rng)
                                                     : single_sector(n, rng);
      double s_square = mean_total_spin_square(state);
      CovarianceData initial = covariance(state);
      for (double t : {0.04, 0.13}) {
        CovarianceData predicted = covariance_evolution(initial, s_square, nu, t);
        CovarianceData evolved = covariance(evolve_multipole(state, nu, t));
        double err = (predicted.second_moment - evolved.second_moment).cwiseAbs().maxCoeff();
        err = std::max(err,
                       (predicted.covariance - evolved.covariance).cwiseAbs().maxCoeff());
        expect(err < 1e-8, "second-moment law off by " + fmt(err) + " (n=" +
                               std::to_string(n) + ")");
      }
    }
  }
  // Twin beam |1,1>: transverse variance runs from 4 down to 8/3.
  DensityState twin = twin_state(2);
  CovarianceData initial = covariance(twin);
  double s_square = mean_total_spin_square(twin);
  double v0 = variance_evolution(initial, s_square, Vec3(1, 0, 0), 1.0, 0.0);
  expect(std::abs(v0 - 4.0) < 1e-12, "initial twin variance is " + fmt(v0));
  double late = variance_evolution(initial, s_square, Vec3(1, 0, 0), 1.0, 0.6);
  expect(std::abs(late - 8.0 / 3.0) < 1e-4, "late twin variance is " + fmt(late));
  double prev = v0;
  for (int i = 1; i <= 20; ++i) {
    double t = 0.3 * i / 20.0;
    double v = variance_evolution(initial, s_square, Vec3(1, 0, 0), 1.0, t);
    expect(v < prev, "twin variance not decreasing at t=" + fmt(t));
    double direct = covariance(evolve_multipole(twin, 1.0, t)).covariance(0, 0);
    expect(std::abs(v - direct) < 1e-8, "twin variance law off by " + fmt(v - direct));
    prev = v;
  }
}

// ---------------------------------------------------------------------------
// 6. Independent solvers agree: spectral vs RK4 vs Monte Carlo.

void criterion_solver_cross_oracle() {
  RngStream rng(1606);
  for (int n = 1; n <= 4; ++n) {
    for (double t : {0.1, 0.5, 1.0}) {
      DensityState state = single_sector(n, rng);
      double dist = trace_distance(evolve_multipole(state, 1.0, t),
                                   evolve_ode(state, 1.0, t));
      expect(dist < 1e-8, "integrator deviates by " + fmt(dist) + " (n=" +
                              std::to_string(n) + ", t=" + fmt(t) + ")");
    }
  }
  DensityState coherent = coherent_density(2, CoherentPoint{0.7, 0.3});
  DensityState sampled =
      compose_small_steps(coherent, 1.0, 0.1, ChannelRun{100000, 424242, 20});
  double dist = trace_distance(sampled, evolve_multipole(coherent, 1.0, 0.1));
  expect(dist < 5e-3, "Monte Carlo channel deviates by " + fmt(dist));
}

// ---------------------------------------------------------------------------
// 7. Channel monotonicity with statistical error bars.

struct BatchStats {
  double mean = 0.0;
  double se = 0.0;
};

BatchStats batch_stats(const std::vector<double>& values) {
  BatchStats stats;
  for (double v : values) stats.mean += v;
  stats.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - stats.mean) * (v - stats.mean);
  var /= static_cast<double>(values.size()) * (values.size() - 1);
  stats.se = std::sqrt(var);
  return stats;
}

void criterion_monotonicity() {
  RngStream rng(1707);
  const int kPairs = 200, kBatches = 8;
  const std::int64_t kBatchSamples = 512;
  std::map<int, SphereGrid> grids;
  for (int n = 1; n <= 4; ++n) grids.emplace(n, make_grid(n));

  for (int pair = 0; pair < kPairs; ++pair) {
    int n = 1 + static_cast<int>(rng.next_u64() % 3);
    DensityState state;
    switch (pair % 4) {
      case 0: state = single_sector(n, rng); break;
      case 1: state = two_sector(n, n + 1, rng); break;
      case 2:
        state = coherent_density(n, CoherentPoint{rng.uniform() * kPi,
                                                  rng.uniform() * 2.0 * kPi});
        break;
      default: state = noon_state(n); break;
    }
    RadialLaw law = RadialLaw::delta();
    switch (pair % 5) {
      case 0: law = RadialLaw::gaussian(0.05 + 0.55 * rng.uniform()); break;
      case 1: law = RadialLaw::uniform_angle(0.1 + 2.9 * rng.uniform()); break;
      case 2: {
        double peak = 0.3 + 2.0 * rng.uniform();
        law = RadialLaw::table({0.0, peak, kPi}, {0.2, 1.0, 0.0});
        break;
      }
      case 3: law = RadialLaw::z_axis_gaussian(0.05 + 0.5 * rng.uniform()); break;
      default: break;  // keep the delta law
    }

    int top = state.max_sector();
    const SphereGrid& grid = grids.at(top);
    double ps0 = degree_ps(state);
    double pq0 = degree_pq(state, grid).p_q;
    double purity0 = purity(state);
    double tv0 = total_variance(state);

    std::vector<double> ps, pq, pur, tv;
    for (int b = 0; b < kBatches; ++b) {
      ChannelRun run{kBatchSamples, rng.next_u64(), 1};
      DensityState out = apply_channel(state, law, run);
      ps.push_back(degree_ps(out));
      pq.push_back(degree_pq(out, grid).p_q);
      pur.push_back(purity(out));
      tv.push_back(total_variance(out));
    }
    auto non_increasing = [&](const std::vector<double>& vals, double before,
                              const char* what) {
      BatchStats stats = batch_stats(vals);
      expect(stats.mean <= before + 3.0 * stats.se + 1e-9,
             std::string(what) + " increased: " + fmt(before) + " -> " + fmt(stats.mean) +
                 " +- " + fmt(stats.se) + " (pair " + std::to_string(pair) + ")");
    };
    non_increasing(ps, ps0, "mean-vector degree");
    non_increasing(pq, pq0, "Q-function degree");
    non_increasing(pur, purity0, "purity");
    BatchStats tvs = batch_stats(tv);
    expect(tvs.mean >= tv0 - 3.0 * tvs.se - 1e-9,
           "total variance decreased: " + fmt(tv0) + " -> " + fmt(tvs.mean) + " (pair " +
               std::to_string(pair) + ")");
  }
}

// ---------------------------------------------------------------------------
// 8. Unique steady state.

void criterion_steady_state() {
  RngStream rng(1808);
  for (int n = 1; n <= 4; ++n) {
    Matrix flat = Matrix::Identity(n + 1, n + 1) / (n + 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      DensityState state = single_sector(n, rng);
      DensityState relaxed = evolve_multipole(state, 1.0, 2.0);
      double err = max_abs(relaxed.sectors.at(n).rho - flat);
      expect(err < 1e-6, "steady-state residual " + fmt(err) + " (n=" +
                             std::to_string(n) + ")");
    }
  }
}

// ---------------------------------------------------------------------------
// 9. Rotation covariance of the isotropic flow; the x/y-only generator fails.

void criterion_rotation_covariance() {
  RngStream rng(1909);
  for (int trial = 0; trial < 10; ++trial) {
    DensityState state = (trial % 2 == 0) ? single_sector(1 + trial % 3, rng)
                                          : two_sector(1, 2 + trial % 2, rng);
    RotationVector u{Vec3(rng.normal(), rng.normal(), rng.normal())};
    double dist = trace_distance(evolve_multipole(rotated(state, u), 1.0, 0.15),
                                 rotated(evolve_multipole(state, 1.0, 0.15), u));
    expect(dist < 1e-9, "spectral route breaks covariance by " + fmt(dist));
    if (trial < 3) {
      double ode_dist = trace_distance(evolve_ode(rotated(state, u), 1.0, 0.15),
                                       rotated(evolve_ode(state, 1.0, 0.15), u));
      expect(ode_dist < 1e-9, "integrator route breaks covariance by " + fmt(ode_dist));
    }
  }
  DensityState pole = fock_state(2, 2);  // |2,0>
  RotationVector quarter{Vec3(0.0, 0.25 * kPi, 0.0)};
  double broken = trace_distance(evolve_alt_ode(rotated(pole, quarter), 1.0, 1.0, 0.1),
                                 rotated(evolve_alt_ode(pole, 1.0, 1.0, 0.1), quarter));
  expect(broken > 1e-3, "anisotropic generator looks covariant (deviation " +
                            fmt(broken) + ")");
}

// ---------------------------------------------------------------------------
// 10. Detection of single-rate depolarization channels.

void criterion_channel_detection() {
  double nu = 1.3;
  GammaMatrix g1 = gamma_matrix(1, nu);
  RngStream rng(2010);
  for (int trial = 0; trial < 25; ++trial) {
    Matrix block = random_block(1, rng);
    auto eta = detect_channel_form(to_coords(block, 1).mu, g1);
    expect(eta.has_value(), "one-photon state not detected (trial " +
                                std::to_string(trial) + ")");
    expect(std::abs(*eta - 8.0 * nu) < 1e-8,
           "one-photon rate " + fmt(*eta) + " != " + fmt(8.0 * nu));
  }
  GammaMatrix g2 = gamma_matrix(2, nu);
  for (const DensityState& state : {noon_state(2), twin_state(2)}) {
    auto eta = detect_channel_form(to_coords(state.sectors.at(2).rho, 2).mu, g2);
    expect(eta.has_value(), "balanced two-photon state not detected");
    expect(std::abs(*eta - 24.0 * nu) < 1e-8, "two-photon rate " + fmt(*eta));
  }
  for (int trial = 0; trial < 3; ++trial) {
    CoherentPoint p{rng.uniform() * kPi, rng.uniform() * 2.0 * kPi};
    auto eta = detect_channel_form(
        to_coords(coherent_density(2, p).sectors.at(2).rho, 2).mu, g2);
    expect(!eta.has_value(), "two-photon coherent state wrongly detected");
  }
}

// ---------------------------------------------------------------------------
// 11. Figure outputs: ordering and the coherent reference curve.

std::vector<std::vector<double>> read_rows(const std::string& path) {
  std::ifstream in(path);
  expect(in.good(), "cannot reopen " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

void criterion_figures() {
  run_figure1(1.0, 0.3, 50, "acceptance_fig1.csv");
  std::vector<std::vector<double>> fig1 = read_rows("acceptance_fig1.csv");
  expect(fig1.size() == 51, "unexpected row count in first figure");
  for (const auto& row : fig1) {
    double t = row[0];
    if (t == 0.0) {
      expect(std::abs(row[1] - 1.0) < 1e-12 && std::abs(row[2] - 1.0) < 1e-12,
             "figure curves not normalized at t=0");
      continue;
    }
    expect(row[2] < row[1], "balanced state not below coherent at t=" + fmt(t));
    double d = 0.75 * std::exp(-16.0 * t) + 0.05 * std::exp(-48.0 * t);
    double reference = d / (1.0 + d) * 2.25;
    expect(std::abs(row[1] - reference) < 1e-9,
           "coherent curve off by " + fmt(row[1] - reference) + " at t=" + fmt(t));
  }
  std::remove("acceptance_fig1.csv");

  run_figure2(1.0, 0.3, 50, "acceptance_fig2.csv");
  std::vector<std::vector<double>> fig2 = read_rows("acceptance_fig2.csv");
  expect(fig2.size() == 51, "unexpected row count in second figure");
  for (const auto& row : fig2) {
    if (row[0] == 0.0) continue;
    expect(row[4] > row[3] && row[3] > row[2] && row[2] > row[1],
           "photon-number ordering violated at t=" + fmt(row[0]));
  }
  std::remove("acceptance_fig2.csv");
}

// ---------------------------------------------------------------------------
// 12. Coherent-state identity for the Q-function degree.

void criterion_coherent_identity() {
  RngStream rng(2112);
  for (int n = 1; n <= 6; ++n) {
    CoherentPoint p{rng.uniform() * kPi, rng.uniform() * 2.0 * kPi};
    double d = degree_pq(coherent_density(n, p), make_grid(n)).d;
    double expected = (n + 1.0) * (n + 1.0) / (2.0 * n + 1.0) - 1.0;
    expect(std::abs(d - expected) < 1e-10,
           "identity off by " + fmt(d - expected) + " at n=" + std::to_string(n));
  }
}

struct Criterion {
  int id;
  const char* name;
  std::function<void()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "reference generator and quadratic-form matrices", criterion_golden_matrices},
      {2, "closed-form polarization decay curves", criterion_decay_curves},
      {3, "generator spectrum", criterion_spectral_law},
      {4, "universal mean-vector decay", criterion_stokes_decay},
      {5, "second-moment closed form", criterion_variance_closed_form},
      {6, "solver cross-validation", criterion_solver_cross_oracle},
      {7, "channel monotonicity", criterion_monotonicity},
      {8, "steady state", criterion_steady_state},
      {9, "rotation covariance", criterion_rotation_covariance},
      {10, "pure-channel detection", criterion_channel_detection},
      {11, "figure reproduction", criterion_figures},
      {12, "coherent-state degree identity", criterion_coherent_identity},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    try {
      criterion.run();
      std::printf("[PASS] criterion %2d: %s\n", criterion.id, criterion.name);
    } catch (const std::exception& e) {
      std::printf("[FAIL] criterion %2d: %s: %s\n", criterion.id, criterion.name, e.what());
      ++failures;
    }
    std::fflush(stdout);
  }
  if (failures == 0) {
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return 1;
}
