#pragma once

#include <cstdint>
#include <string>

#include "su2depol/states.hpp"

namespace su2depol {

// Everything a CLI run needs.  Times are physical; with the default nu = 1
// the time column coincides with the dimensionless product nu*t.
struct ScenarioConfig {
  std::string command;
  int n = 2;
  std::string state_spec = "coherent:0,0";
  double nu = 1.0;
  double t_max = 0.3;
  int steps = 50;                     // number of time intervals in CSV output
  std::string method = "multipole";   // multipole | ode | gellmann | mc
  std::int64_t samples = 10000;
  std::uint64_t seed = 1;
  std::string out;                    // empty or "-" means stdout
};

// Accepts "coherent:theta,phi", "noon", "twin", "fock:m", or a path to a
// state JSON file (in which case n is ignored).
DensityState state_from_spec(const std::string& spec, int n);

// Time series of polarization observables for one state; method=mc adds a
// standard-error column (over 16 sample batches) after every observable.
void run_evolve(const ScenarioConfig& config);

// Normalized P_Q(t)/P_Q(0) for the two-photon coherent vs NOON state,
// computed through the coordinate (Gamma/Phi) route and cross-checked
// in-process against the multipole route to 1e-9.
void run_figure1(double nu, double t_max, int steps, const std::string& out);

// Normalized P_Q(t)/P_Q(0) for coherent states with n = 1..4.
void run_figure2(double nu, double t_max, int steps, const std::string& out);

// Full-precision CSV export of the coordinate-space generator and quadratic
// form for sector n.
void write_gamma_csv(int n, double nu, const std::string& out);
void write_phi_csv(int n, const std::string& out);
void run_matrices(int n, double nu, const std::string& gamma_out,
                  const std::string& phi_out);

// One-row comparison of the Monte Carlo small-step channel against the exact
// multipole solution at t_max.
void run_mc_compare(const ScenarioConfig& config);

// Dispatch on config.command; translates exceptions into the documented exit
// codes (0 ok, 2 config, 3 numerical invariant, 4 I/O).
int run_command(const ScenarioConfig& config);

}  // namespace su2depol
