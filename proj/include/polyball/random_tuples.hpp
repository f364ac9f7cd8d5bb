#pragma once

// Random test tuples. Everything is built from product tuples
// I x A_i x I (automatically cross-commuting), direct sums, and a final
// unitary conjugation, so polyball membership holds by construction.

#include <cstdint>
#include <random>
#include <vector>

#include "polyball/cp_calculus.hpp"

namespace polyball {

using Rng = std::mt19937_64;

Matrix random_gaussian(int rows, int cols, Rng& rng);
Matrix random_unitary(int d, Rng& rng);
Matrix random_psd(int d, Rng& rng);

/// Rescales a row tuple so that ||sum_j A_j A_j^*||^{1/2} = norm.
std::vector<Matrix> scale_row(std::vector<Matrix> row, double norm);

/// Product tuple on C^{d_1} x ... x C^{d_k}; factor i is a random row
/// contraction of joint norm `norm` acting on slot i.
OperatorTuple random_product_tuple(const std::vector<int>& n, const std::vector<int>& dims, double norm,
                                   Rng& rng, bool commuting = false);

/// Direct sum of product tuples filling exactly dimH, conjugated by a random unitary.
OperatorTuple random_pure_tuple(const std::vector<int>& n, int dimH, double norm, Rng& rng,
                                bool commuting = false);

}  // namespace polyball
