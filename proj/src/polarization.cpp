#include "su2depol/polarization.hpp"

#include <cmath>

#include "json.hpp"
#include "su2depol/errors.hpp"
#include "su2depol/numerics.hpp"

namespace su2depol {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kFourPi = 4.0 * kPi;
}  // namespace

SphereGrid make_grid(int n_max) {
  if (n_max < 0) throw ConfigError("grid sector bound must be >= 0");
  int n_theta = 2 * n_max + 1;
  int n_phi = 4 * n_max + 1;
  auto [x, w] = gauss_legendre(n_theta);
  SphereGrid grid;
  grid.max_sector = n_max;
  grid.nodes.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  double phi_weight = 2.0 * kPi / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    double theta = std::acos(x[i]);
    for (int j = 0; j < n_phi; ++j) {
      grid.nodes.push_back({theta, 2.0 * kPi * j / n_phi, w[i] * phi_weight});
    }
  }
  return grid;
}

double integrate(const SphereGrid& grid,
                 const std::function<double(const CoherentPoint&)>& f) {
  std::vector<double> terms;
  terms.reserve(grid.nodes.size());
  for (const auto& node : grid.nodes)
    terms.push_back(node.weight * f(CoherentPoint{node.theta, node.phi}));
  return pairwise_sum(terms);
}

double q_function(const DensityState& state, const CoherentPoint& point) {
  double q = 0.0;
  for (const auto& [n, block] : state.sectors) {
    CVector v = coherent_state(n, point);
    double kernel = (v.adjoint() * block.rho * v)(0, 0).real();
    q += block.weight * (n + 1.0) / kFourPi * kernel;
  }
  return q;
}

double degree_ps(const DensityState& state) {
  StokesVector sv = stokes_parameters(state);
  if (sv.s0 == 0.0)
    throw ConfigError("P_s is undefined: state has <S0> = 0 (no photons)");
  return sv.s.norm() / sv.s0;
}

PolarizationReport degree_pq(const DensityState& state, const SphereGrid& grid) {
  if (grid.max_sector < state.max_sector())
    throw ConfigError("sphere grid covers sectors up to n=" +
                      std::to_string(grid.max_sector) + " but state reaches n=" +
                      std::to_string(state.max_sector()));
  std::vector<double> q_terms, q2_terms;
  q_terms.reserve(grid.nodes.size());
  q2_terms.reserve(grid.nodes.size());
  for (const auto& node : grid.nodes) {
    double q = q_function(state, CoherentPoint{node.theta, node.phi});
    q_terms.push_back(node.weight * q);
    q2_terms.push_back(node.weight * q * q);
  }
  double q_norm = pairwise_sum(q_terms);
  if (std::abs(q_norm - 1.0) > 1e-8)
    throw NumericalCheckError("quadrature lost Q normalization: integral = " +
                              std::to_string(q_norm));
  double q2 = pairwise_sum(q2_terms);
  PolarizationReport report;
  report.p_s = degree_ps(state);
  report.d = kFourPi * q2 - 1.0;
  report.sigma = 1.0 / q2;
  report.p_q = report.d / (1.0 + report.d);
  return report;
}

std::string PolarizationReport::to_json(int indent) const {
  nlohmann::json j;
  j["P_s"] = p_s;
  j["D"] = d;
  j["Sigma"] = sigma;
  j["P_Q"] = p_q;
  return j.dump(indent);
}

}  // namespace su2depol
