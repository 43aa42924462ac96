#include "su2depol/scenarios.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <vector>

#include "su2depol/channel.hpp"
#include "su2depol/dynamics.hpp"
#include "su2depol/errors.hpp"
#include "su2depol/gellmann.hpp"
#include "su2depol/polarization.hpp"
#include "su2depol/rng.hpp"

namespace su2depol {

namespace {

// CSV with a header row, 15 significant digits, LF endings; "-" or an empty
// path select stdout.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header)
      : path_(path.empty() ? "-" : path) {
    if (path_ == "-") {
      out_ = &std::cout;
    } else {
      file_.open(path_, std::ios::binary);
      if (!file_) throw IoError("cannot open output file: " + path_);
      out_ = &file_;
    }
    for (std::size_t i = 0; i < header.size(); ++i)
      (*out_) << (i ? "," : "") << header[i];
    (*out_) << "\n";
  }

  void row(const std::vector<double>& values) {
    char buf[32];
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.15g", values[i]);
      (*out_) << (i ? "," : "") << buf;
    }
    (*out_) << "\n";
    if (!*out_) throw IoError("write failed: " + path_);
  }

  void finish() {
    out_->flush();
    if (!*out_) throw IoError("write failed: " + path_);
  }

 private:
  std::string path_;
  std::ofstream file_;
  std::ostream* out_ = nullptr;
};

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + " from '" + text + "'");
  }
}

int parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + " from '" + text + "'");
  }
}

void validate_common(const ScenarioConfig& c) {
  if (!(c.nu > 0.0)) throw ConfigError("nu must be > 0");
  if (c.t_max < 0.0) throw ConfigError("t-max must be >= 0");
  if (c.steps < 1) throw ConfigError("steps must be >= 1");
  if (c.samples < 1) throw ConfigError("samples must be >= 1");
}

struct ObsRow {
  double p_s = 0.0, p_q = 0.0, d = 0.0, purity_v = 0.0, trace_m = 0.0;
  double sx = 0.0, sy = 0.0, sz = 0.0;

  std::vector<double> as_vector() const {
    return {p_s, p_q, d, purity_v, trace_m, sx, sy, sz};
  }
};

ObsRow observables(const DensityState& state, const SphereGrid& grid) {
  ObsRow o;
  PolarizationReport rep = degree_pq(state, grid);
  StokesVector sv = stokes_parameters(state);
  o.p_s = rep.p_s;
  o.p_q = rep.p_q;
  o.d = rep.d;
  o.purity_v = purity(state);
  o.trace_m = total_variance(state);
  o.sx = sv.s.x();
  o.sy = sv.s.y();
  o.sz = sv.s.z();
  return o;
}

const std::vector<std::string> kObsNames = {"P_s", "P_Q",     "D",  "purity",
                                            "trace_M", "Sx", "Sy", "Sz"};

DensityState average_states(const std::vector<DensityState>& states) {
  DensityState mean = states.front();
  for (std::size_t i = 1; i < states.size(); ++i)
    for (auto& [n, block] : mean.sectors) block.rho += states[i].sectors.at(n).rho;
  for (auto& [n, block] : mean.sectors)
    block.rho /= static_cast<double>(states.size());
  return mean;
}

constexpr int kMcBatches = 16;
constexpr int kMcCompositionSteps = 20;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t row, std::uint64_t batch) {
  return RngStream::for_sample(seed, row * kMcBatches + batch).next_u64();
}

}  // namespace

DensityState state_from_spec(const std::string& spec, int n) {
  auto check_n = [n]() {
    if (n < 0 || n > kDefaultMaxPhotonNumber)
      throw ConfigError("photon number n must be in [0, " +
                        std::to_string(kDefaultMaxPhotonNumber) + "]");
  };
  if (spec == "coherent" || spec.rfind("coherent:", 0) == 0) {
    check_n();
    CoherentPoint point;
    if (spec.size() > 9) {
      std::string args = spec.substr(9);
      std::size_t comma = args.find(',');
      if (comma == std::string::npos)
        throw ConfigError("coherent spec needs 'coherent:theta,phi'");
      point.theta = parse_double(args.substr(0, comma), "theta");
      point.phi = parse_double(args.substr(comma + 1), "phi");
    }
    return coherent_density(n, point);
  }
  if (spec == "noon") {
    check_n();
    if (n < 1) throw ConfigError("noon state needs n >= 1");
    return noon_state(n);
  }
  if (spec == "twin") {
    check_n();
    if (n < 2 || n % 2 != 0) throw ConfigError("twin state needs even n >= 2");
    return twin_state(n);
  }
  if (spec.rfind("fock:", 0) == 0) {
    check_n();
    int m = parse_int(spec.substr(5), "fock occupation");
    if (m < 0 || m > n) throw ConfigError("fock occupation must satisfy 0 <= m <= n");
    return fock_state(n, m);
  }
  // Anything else is a path to a state JSON file; its sectors define n.
  return load_state_json(spec);
}

void run_evolve(const ScenarioConfig& config) {
  validate_common(config);
  DensityState initial = state_from_spec(config.state_spec, config.n);
  SphereGrid grid = make_grid(initial.max_sector());

  bool mc = config.method == "mc";
  std::vector<std::string> header = {"t"};
  for (const auto& name : kObsNames) {
    header.push_back(name);
    if (mc) header.push_back(name + "_stderr");
  }
  CsvWriter csv(config.out, header);

  int rows = (config.t_max == 0.0) ? 1 : config.steps + 1;
  DensityState ode_state = initial;
  double ode_time = 0.0;
  for (int i = 0; i < rows; ++i) {
    double t = config.t_max * i / config.steps;
    std::vector<double> out_row = {t};
    if (mc) {
      std::int64_t per_batch = (config.samples + kMcBatches - 1) / kMcBatches;
      std::vector<DensityState> batches;
      std::vector<ObsRow> batch_obs;
      batches.reserve(kMcBatches);
      for (int b = 0; b < kMcBatches; ++b) {
        ChannelRun run{per_batch, derive_seed(config.seed, static_cast<std::uint64_t>(i), b),
                       kMcCompositionSteps};
        batches.push_back(compose_small_steps(initial, config.nu, t, run));
        batch_obs.push_back(observables(batches.back(), grid));
      }
      ObsRow center = observables(average_states(batches), grid);
      std::vector<double> vals = center.as_vector();
      for (std::size_t k = 0; k < vals.size(); ++k) {
        double mean = 0.0;
        for (const auto& o : batch_obs) mean += o.as_vector()[k];
        mean /= kMcBatches;
        double var = 0.0;
        for (const auto& o : batch_obs) {
          double dev = o.as_vector()[k] - mean;
          var += dev * dev;
        }
        var /= (kMcBatches - 1);
        out_row.push_back(vals[k]);
        out_row.push_back(std::sqrt(var / kMcBatches));
      }
    } else {
      DensityState state;
      if (config.method == "multipole") {
        state = evolve_multipole(initial, config.nu, t);
      } else if (config.method == "gellmann") {
        state = evolve_gellmann(initial, config.nu, t);
      } else if (config.method == "ode") {
        ode_state = evolve_ode(ode_state, config.nu, t - ode_time);
        ode_time = t;
        state = ode_state;
      } else {
        throw ConfigError("unknown method '" + config.method +
                          "' (expected multipole, ode, gellmann, or mc)");
      }
      for (double v : observables(state, grid).as_vector()) out_row.push_back(v);
    }
    csv.row(out_row);
  }
  csv.finish();
}

namespace {

// P_Q(t)/P_Q(0) through the coordinate route, cross-checked against the
// multipole route.
class RatioCurve {
 public:
  RatioCurve(const DensityState& state, double nu)
      : state_(state), nu_(nu) {
    int n = state.max_sector();
    gamma_ = gamma_matrix(n, nu);
    grid_ = make_grid(n);
    phi_ = phi_matrix(n, grid_);
    mu0_ = to_coords(state.sectors.at(n).rho, n).mu;
    double d0 = mu0_.dot(phi_.m * mu0_);
    pq0_ = d0 / (1.0 + d0);
  }

  double at(double t) const {
    double d = d_of_t(mu0_, gamma_, phi_, t);
    double ratio = (d / (1.0 + d)) / pq0_;
    PolarizationReport rep = degree_pq(evolve_multipole(state_, nu_, t), grid_);
    if (std::abs(rep.p_q / pq0_ - ratio) > 1e-9)
      throw NumericalCheckError("coordinate and multipole routes disagree at t=" +
                                std::to_string(t));
    return ratio;
  }

 private:
  DensityState state_;
  double nu_ = 1.0;
  GammaMatrix gamma_;
  SphereGrid grid_;
  PhiMatrix phi_;
  Eigen::VectorXd mu0_;
  double pq0_ = 0.0;
};

}  // namespace

void run_figure1(double nu, double t_max, int steps, const std::string& out) {
  ScenarioConfig probe;
  probe.nu = nu;
  probe.t_max = t_max;
  probe.steps = steps;
  validate_common(probe);
  RatioCurve coherent(coherent_density(2, CoherentPoint{}), nu);
  RatioCurve noon(noon_state(2), nu);
  CsvWriter csv(out, {"t", "ratio_coherent", "ratio_noon"});
  int rows = (t_max == 0.0) ? 1 : steps + 1;
  for (int i = 0; i < rows; ++i) {
    double t = t_max * i / steps;
    csv.row({t, coherent.at(t), noon.at(t)});
  }
  csv.finish();
}

void run_figure2(double nu, double t_max, int steps, const std::string& out) {
  ScenarioConfig probe;
  probe.nu = nu;
  probe.t_max = t_max;
  probe.steps = steps;
  validate_common(probe);
  std::vector<RatioCurve> curves;
  for (int n = 1; n <= 4; ++n)
    curves.emplace_back(coherent_density(n, CoherentPoint{}), nu);
  CsvWriter csv(out, {"t", "ratio_n1", "ratio_n2", "ratio_n3", "ratio_n4"});
  int rows = (t_max == 0.0) ? 1 : steps + 1;
  for (int i = 0; i < rows; ++i) {
    double t = t_max * i / steps;
    std::vector<double> row = {t};
    for (const auto& curve : curves) row.push_back(curve.at(t));
    csv.row(row);
  }
  csv.finish();
}

namespace {

void write_matrix_csv(const Eigen::MatrixXd& m, const std::string& out) {
  std::vector<std::string> header;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    header.push_back("mu" + std::to_string(j + 1));
  CsvWriter csv(out, header);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row[static_cast<std::size_t>(j)] = m(i, j);
    csv.row(row);
  }
  csv.finish();
}

}  // namespace

void write_gamma_csv(int n, double nu, const std::string& out) {
  if (n < 1) throw ConfigError("gamma export needs n >= 1");
  if (!(nu > 0.0)) throw ConfigError("nu must be > 0");
  write_matrix_csv(gamma_matrix(n, nu).m, out);
}

void write_phi_csv(int n, const std::string& out) {
  if (n < 1) throw ConfigError("phi export needs n >= 1");
  write_matrix_csv(phi_matrix(n, make_grid(n)).m, out);
}

void run_matrices(int n, double nu, const std::string& gamma_out,
                  const std::string& phi_out) {
  write_gamma_csv(n, nu, gamma_out);
  write_phi_csv(n, phi_out);
}

void run_mc_compare(const ScenarioConfig& config) {
  validate_common(config);
  DensityState initial = state_from_spec(config.state_spec, config.n);
  DensityState exact = evolve_multipole(initial, config.nu, config.t_max);
  ChannelRun run{config.samples, config.seed, config.steps};
  DensityState sampled = compose_small_steps(initial, config.nu, config.t_max, run);
  CsvWriter csv(config.out, {"t", "trace_distance", "P_s_mc", "P_s_exact", "purity_mc",
                             "purity_exact"});
  csv.row({config.t_max, trace_distance(sampled, exact), degree_ps(sampled),
           degree_ps(exact), purity(sampled), purity(exact)});
  csv.finish();
}

int run_command(const ScenarioConfig& config) {
  try {
    if (config.command == "evolve") {
      run_evolve(config);
    } else if (config.command == "figure1") {
      run_figure1(config.nu, config.t_max, config.steps, config.out);
    } else if (config.command == "figure2") {
      run_figure2(config.nu, config.t_max, config.steps, config.out);
    } else if (config.command == "gamma") {
      write_gamma_csv(config.n, config.nu, config.out);
    } else if (config.command == "phi") {
      write_phi_csv(config.n, config.out);
    } else if (config.command == "mc-compare") {
      run_mc_compare(config);
    } else {
      throw ConfigError("unknown command '" + config.command + "'");
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const NumericalCheckError& e) {
    std::cerr << "numerical check failed: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace su2depol
