#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "su2depol/errors.hpp"
#include "su2depol/scenarios.hpp"

namespace {

// Fill config fields from a JSON file for every flag not given explicitly.
void merge_config_file(const std::string& path, su2depol::ScenarioConfig& config,
                       const std::map<std::string, bool>& overridden) {
  std::ifstream in(path);
  if (!in) throw su2depol::IoError("cannot open config file: " + path);
  nlohmann::json root;
  try {
    std::ostringstream buf;
    buf << in.rdbuf();
    root = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw su2depol::ConfigError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!root.is_object())
    throw su2depol::ConfigError("config file must hold a JSON object");
  auto field = [&root](const char* name, const char* alias = nullptr) -> const nlohmann::json* {
    if (root.contains(name)) return &root.at(name);
    if (alias && root.contains(alias)) return &root.at(alias);
    return nullptr;
  };
  try {
    if (auto* v = field("n"); v && !overridden.at("n")) config.n = v->get<int>();
    if (auto* v = field("state"); v && !overridden.at("state"))
      config.state_spec = v->get<std::string>();
    if (auto* v = field("nu"); v && !overridden.at("nu")) config.nu = v->get<double>();
    if (auto* v = field("t_max", "t-max"); v && !overridden.at("t_max"))
      config.t_max = v->get<double>();
    if (auto* v = field("steps"); v && !overridden.at("steps"))
      config.steps = v->get<int>();
    if (auto* v = field("method"); v && !overridden.at("method"))
      config.method = v->get<std::string>();
    if (auto* v = field("samples"); v && !overridden.at("samples"))
      config.samples = v->get<std::int64_t>();
    if (auto* v = field("seed"); v && !overridden.at("seed"))
      config.seed = v->get<std::uint64_t>();
    if (auto* v = field("out"); v && !overridden.at("out"))
      config.out = v->get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw su2depol::ConfigError(std::string("config file field has wrong type: ") +
                                e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SU(2)-invariant depolarization of two-mode quantum light"};
  app.require_subcommand(1);

  su2depol::ScenarioConfig config;
  std::string config_path;
  auto* opt_n = app.add_option("--n", config.n, "photon-number sector (default 2)");
  auto* opt_state = app.add_option(
      "--state", config.state_spec,
      "coherent:theta,phi | noon | twin | fock:m | path to state JSON");
  auto* opt_nu = app.add_option("--nu", config.nu, "decay constant (default 1)");
  auto* opt_tmax = app.add_option("--t-max", config.t_max, "final time (default 0.3)");
  auto* opt_steps = app.add_option(
      "--steps", config.steps, "time intervals; composition steps for mc-compare");
  auto* opt_method =
      app.add_option("--method", config.method, "multipole | ode | gellmann | mc");
  auto* opt_samples =
      app.add_option("--samples", config.samples, "Monte Carlo sample count");
  auto* opt_seed = app.add_option("--seed", config.seed, "RNG seed (default 1)");
  auto* opt_out = app.add_option("--out", config.out, "output CSV path (default stdout)");
  app.add_option("--config", config_path, "JSON config file; explicit flags override");

  CLI::App* subs[] = {
      app.add_subcommand("evolve", "time series of polarization observables"),
      app.add_subcommand("figure1", "normalized P_Q decay: n=2 coherent vs NOON"),
      app.add_subcommand("figure2", "normalized P_Q decay: coherent states n=1..4"),
      app.add_subcommand("gamma", "coordinate-space generator matrix as CSV"),
      app.add_subcommand("phi", "coordinate-space quadratic form as CSV"),
      app.add_subcommand("mc-compare", "Monte Carlo channel vs exact solution")};
  for (auto* sub : subs) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::map<std::string, bool> overridden = {
      {"n", opt_n->count() > 0},           {"state", opt_state->count() > 0},
      {"nu", opt_nu->count() > 0},         {"t_max", opt_tmax->count() > 0},
      {"steps", opt_steps->count() > 0},   {"method", opt_method->count() > 0},
      {"samples", opt_samples->count() > 0}, {"seed", opt_seed->count() > 0},
      {"out", opt_out->count() > 0}};
  try {
    if (!config_path.empty()) merge_config_file(config_path, config, overridden);
  } catch (const su2depol::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const su2depol::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  config.command = app.get_subcommands().front()->get_name();
  return su2depol::run_command(config);
}
