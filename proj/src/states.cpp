#include "su2depol/states.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "su2depol/errors.hpp"

namespace su2depol {

namespace {

using nlohmann::json;

Matrix outer_density(const CVector& v) {
  double norm = v.norm();
  if (norm == 0.0) throw std::invalid_argument("cannot normalize zero state vector");
  CVector u = v / norm;
  return u * u.adjoint();
}

}  // namespace

DensityState pure_state(int n, const CVector& amplitudes) {
  if (amplitudes.size() != n + 1)
    throw std::invalid_argument("amplitude vector does not match sector dimension");
  DensityState state;
  state.sectors[n] = SectorBlock{1.0, outer_density(amplitudes)};
  return state;
}

DensityState coherent_density(int n, const CoherentPoint& point) {
  return pure_state(n, coherent_state(n, point));
}

DensityState noon_state(int n) {
  if (n < 1) throw std::invalid_argument("NOON state needs n >= 1");
  CVector v = CVector::Zero(n + 1);
  v(0) = 1.0;
  v(n) = 1.0;
  return pure_state(n, v);
}

DensityState twin_state(int n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("twin state needs even n >= 2");
  return fock_state(n, n / 2);
}

DensityState fock_state(int n, int m) {
  if (m < 0 || m > n) throw std::invalid_argument("fock occupation m out of range");
  CVector v = CVector::Zero(n + 1);
  v(n - m) = 1.0;  // index i = n - m
  return pure_state(n, v);
}

DensityState maximally_mixed(int n) {
  if (n < 0) throw std::invalid_argument("sector index n must be >= 0");
  DensityState state;
  state.sectors[n] =
      SectorBlock{1.0, Matrix::Identity(n + 1, n + 1) / static_cast<double>(n + 1)};
  return state;
}

Matrix random_block(int n, RngStream& rng) {
  int dim = n + 1;
  Matrix g(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) g(i, j) = Complex(rng.normal(), rng.normal());
  Matrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

StokesVector stokes_parameters(const DensityState& state) {
  StokesVector result;
  for (const auto& [n, block] : state.sectors) {
    result.s0 += block.weight * n;
    StokesOperators ops = stokes_operators(n);
    result.s.x() += block.weight * (block.rho * ops.sx.mat).trace().real();
    result.s.y() += block.weight * (block.rho * ops.sy.mat).trace().real();
    result.s.z() += block.weight * (block.rho * ops.sz.mat).trace().real();
  }
  return result;
}

double purity(const DensityState& state) {
  double p = 0.0;
  for (const auto& [n, block] : state.sectors)
    p += block.weight * block.weight * (block.rho * block.rho).trace().real();
  return p;
}

CovarianceData covariance(const DensityState& state) {
  CovarianceData data;
  for (const auto& [n, block] : state.sectors) {
    StokesOperators ops = stokes_operators(n);
    const Matrix* s[3] = {&ops.sx.mat, &ops.sy.mat, &ops.sz.mat};
    for (int j = 0; j < 3; ++j)
      for (int k = j; k < 3; ++k) {
        double v = 0.5 * block.weight *
                   (block.rho * ((*s[j]) * (*s[k]) + (*s[k]) * (*s[j]))).trace().real();
        data.second_moment(j, k) += v;
        if (k != j) data.second_moment(k, j) += v;
      }
  }
  Vec3 mean = stokes_parameters(state).s;
  data.mean_outer = mean * mean.transpose();
  data.covariance = data.second_moment - data.mean_outer;
  return data;
}

PrincipalComponents principal_components(const DensityState& state) {
  Mat3 cov = covariance(state).covariance;
  Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (cov + cov.transpose()));
  PrincipalComponents pc;
  for (int k = 0; k < 3; ++k) {
    // Solver returns ascending order; flip to descending.
    pc.variances(k) = es.eigenvalues()(2 - k);
    pc.axes.col(k) = es.eigenvectors().col(2 - k);
  }
  return pc;
}

double total_variance(const DensityState& state) {
  return mean_total_spin_square(state) - stokes_parameters(state).s.squaredNorm();
}

double mean_total_spin_square(const DensityState& state) {
  // S.S = S0 (S0 + 2) is the constant n(n+2) on sector n.
  double v = 0.0;
  for (const auto& [n, block] : state.sectors)
    v += block.weight * static_cast<double>(n) * (n + 2.0);
  return v;
}

DensityState rotated(const DensityState& state, const RotationVector& u) {
  DensityState out;
  for (const auto& [n, block] : state.sectors) {
    Matrix um = su2_unitary(u, n).mat;
    out.sectors[n] = SectorBlock{block.weight, um * block.rho * um.adjoint()};
  }
  return out;
}

double trace_distance(const DensityState& a, const DensityState& b) {
  double dist = 0.0;
  auto weighted = [](const DensityState& s, int n) -> Matrix {
    auto it = s.sectors.find(n);
    if (it == s.sectors.end()) return Matrix::Zero(n + 1, n + 1);
    return it->second.weight * it->second.rho;
  };
  std::map<int, bool> ns;
  for (const auto& [n, blk] : a.sectors) ns[n] = true;
  for (const auto& [n, blk] : b.sectors) ns[n] = true;
  for (const auto& [n, flag] : ns) {
    Matrix diff = weighted(a, n) - weighted(b, n);
    Eigen::SelfAdjointEigenSolver<Matrix> es(diff);
    dist += 0.5 * es.eigenvalues().cwiseAbs().sum();
  }
  return dist;
}

std::vector<std::string> validate(const DensityState& state, double tol) {
  std::vector<std::string> failures;
  auto fail = [&failures](int n, const std::string& what) {
    failures.push_back("sector " + std::to_string(n) + ": " + what);
  };
  if (state.sectors.empty()) {
    failures.push_back("state has no sectors");
    return failures;
  }
  double weight_sum = 0.0;
  for (const auto& [n, block] : state.sectors) {
    if (n < 0) {
      fail(n, "negative photon number");
      continue;
    }
    weight_sum += block.weight;
    if (block.weight < -tol) fail(n, "negative weight");
    if (block.rho.rows() != n + 1 || block.rho.cols() != n + 1) {
      fail(n, "block dimension does not equal n+1");
      continue;
    }
    double herm = max_abs(block.rho - block.rho.adjoint());
    if (herm > tol) fail(n, "block not Hermitian (deviation " + std::to_string(herm) + ")");
    double tr_err = std::abs(block.rho.trace() - Complex(1.0, 0.0));
    if (tr_err > tol) fail(n, "block trace differs from 1 by " + std::to_string(tr_err));
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (block.rho + block.rho.adjoint()));
    double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -tol) fail(n, "block has negative eigenvalue " + std::to_string(min_eig));
  }
  if (std::abs(weight_sum - 1.0) > tol)
    failures.push_back("sector weights sum to " + std::to_string(weight_sum) + ", not 1");
  return failures;
}

std::string to_json(const DensityState& state, int indent) {
  json root;
  root["sectors"] = json::array();
  for (const auto& [n, block] : state.sectors) {
    json sector;
    sector["n"] = n;
    sector["weight"] = block.weight;
    json re = json::array(), im = json::array();
    for (int i = 0; i <= n; ++i) {
      json re_row = json::array(), im_row = json::array();
      for (int j = 0; j <= n; ++j) {
        re_row.push_back(block.rho(i, j).real());
        im_row.push_back(block.rho(i, j).imag());
      }
      re.push_back(re_row);
      im.push_back(im_row);
    }
    sector["re"] = re;
    sector["im"] = im;
    root["sectors"].push_back(sector);
  }
  return root.dump(indent);
}

DensityState state_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("state file is not valid JSON: ") + e.what());
  }
  if (!root.is_object() || !root.contains("sectors") || !root["sectors"].is_array())
    throw ConfigError("state JSON must be an object with a \"sectors\" array");
  DensityState state;
  for (const auto& sector : root["sectors"]) {
    if (!sector.contains("n") || !sector["n"].is_number_integer())
      throw ConfigError("each sector needs an integer \"n\"");
    int n = sector["n"].get<int>();
    if (n < 0) throw ConfigError("sector photon number must be >= 0");
    if (state.sectors.count(n))
      throw ConfigError("duplicate sector n=" + std::to_string(n));
    if (!sector.contains("weight") || !sector["weight"].is_number())
      throw ConfigError("sector n=" + std::to_string(n) + " needs a numeric \"weight\"");
    SectorBlock block;
    block.weight = sector["weight"].get<double>();
    block.rho = Matrix::Zero(n + 1, n + 1);
    for (const char* key : {"re", "im"}) {
      if (!sector.contains(key) || !sector[key].is_array() ||
          static_cast<int>(sector[key].size()) != n + 1)
        throw ConfigError("sector n=" + std::to_string(n) + ": \"" + key +
                          "\" must be a (n+1)x(n+1) array");
      for (int i = 0; i <= n; ++i) {
        const auto& row = sector[key][i];
        if (!row.is_array() || static_cast<int>(row.size()) != n + 1)
          throw ConfigError("sector n=" + std::to_string(n) + ": \"" + key +
                            "\" row " + std::to_string(i) + " has wrong length");
        for (int j = 0; j <= n; ++j) {
          if (!row[j].is_number())
            throw ConfigError("sector n=" + std::to_string(n) + ": non-numeric entry");
          double v = row[j].get<double>();
          if (std::string(key) == "re")
            block.rho(i, j) += Complex(v, 0.0);
          else
            block.rho(i, j) += Complex(0.0, v);
        }
      }
    }
    state.sectors[n] = std::move(block);
  }
  std::vector<std::string> failures = validate(state);
  if (!failures.empty()) {
    std::ostringstream msg;
    msg << "state fails validation:";
    for (const auto& f : failures) msg << "\n  - " << f;
    throw ConfigError(msg.str());
  }
  return state;
}

void save_state_json(const DensityState& state, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << to_json(state) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

DensityState load_state_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open state file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return state_from_json(buf.str());
}

}  // namespace su2depol
