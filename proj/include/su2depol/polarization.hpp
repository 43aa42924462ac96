#pragma once

#include <functional>
#include <string>
#include <vector>

#include "su2depol/states.hpp"

namespace su2depol {

// Product quadrature on the sphere: Gauss-Legendre in cos(theta) times a
// uniform azimuthal rule.  Node weights include the solid-angle measure, so
// sum_k w_k f(node_k) approximates the integral of f over the full sphere.
struct SphereGrid {
  struct Node {
    double theta = 0.0;
    double phi = 0.0;
    double weight = 0.0;
  };
  std::vector<Node> nodes;
  int max_sector = 0;  // integrates products of two sector-n Husimi kernels exactly
};

// Grid sized for sectors up to n_max: 2*n_max+1 polar nodes, 4*n_max+1
// azimuthal nodes, exact for the polynomial integrands behind the measures.
SphereGrid make_grid(int n_max);

// Deterministic quadrature of f over the sphere (pairwise reduction in node
// order).
double integrate(const SphereGrid& grid, const std::function<double(const CoherentPoint&)>& f);

// Husimi function Q(Omega) = sum_n w_n (n+1)/(4 pi) <n,Omega|rho_n|n,Omega>.
double q_function(const DensityState& state, const CoherentPoint& point);

// |<S>| / <S0>; throws ConfigError when <S0> = 0 (measure undefined).
double degree_ps(const DensityState& state);

struct PolarizationReport {
  double p_s = 0.0;    // first-moment degree |<S>|/<S0>
  double d = 0.0;      // 4 pi Int Q^2 - 1
  double sigma = 0.0;  // 1 / Int Q^2, effective occupied solid angle
  double p_q = 0.0;    // D / (1 + D)
  std::string to_json(int indent = 2) const;
};

// Q-function measures from quadrature; grid must cover the state's largest
// sector or ConfigError is thrown.
PolarizationReport degree_pq(const DensityState& state, const SphereGrid& grid);

}  // namespace su2depol
