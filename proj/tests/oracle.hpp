#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qwp/basis.hpp"
#include "qwp/layout.hpp"
#include "qwp/rng.hpp"
#include "qwp/state.hpp"

// Deliberately independent reimplementations used to cross-check the library:
// everything here goes through dense matrices and direct definitions rather
// than the library's stride arithmetic.
namespace qwp::oracle {

// Kronecker product straight from the definition; the right factor indexes
// fastest, matching row-major joint indices.
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// Joint-space operator acting as `op` on `target` and as identity elsewhere.
Eigen::MatrixXcd embed(const SystemLayout& layout, std::string_view target,
                       const Eigen::MatrixXcd& op);

// exp(i * scale * H) for Hermitian H, via eigendecomposition.
Eigen::MatrixXcd expi(const Eigen::MatrixXcd& hermitian, double scale);

Eigen::VectorXcd to_vector(const StateVector& state);

// Probability of the k-th basis outcome on `target`, computed by sandwiching
// an embedded projector.
double projector_probability(const StateVector& state, std::string_view target,
                             const Basis& basis, std::size_t k);

// Unitary drawn by QR-factoring a complex Gaussian matrix.
Eigen::MatrixXcd random_unitary(std::size_t dim, SplitMix64& rng);

std::vector<cplx> random_state(std::size_t dim, SplitMix64& rng);

// Upper 0.1% critical value of the chi-square distribution.
double chi_square_critical(std::size_t degrees_of_freedom);

// Pearson statistic of observed counts against expected probabilities.
double chi_square_statistic(const std::vector<std::size_t>& counts,
                            const std::vector<double>& probabilities);

}  // namespace qwp::oracle
