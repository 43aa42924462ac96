#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace su2depol {

// Nodes and weights of the N-point Gauss-Legendre rule on [-1, 1]; exact for
// polynomials of degree <= 2N - 1.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

// Pairwise (tree) reduction.  The result depends only on the order of the
// input vector, never on chunking, which keeps integrals and Monte Carlo
// averages bit-identical across runs.
double pairwise_sum(const std::vector<double>& values);

}  // namespace su2depol
