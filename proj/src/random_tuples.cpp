#include "polyball/random_tuples.hpp"

#include <Eigen/QR>

#include "polyball/errors.hpp"

namespace polyball {

Matrix random_gaussian(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = cplx(g(rng), g(rng));
  return m;
}

Matrix random_unitary(int d, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_gaussian(d, d, rng));
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (int j = 0; j < d; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0) q.col(j) *= r(j, j) / a;
  }
  return q;
}

Matrix random_psd(int d, Rng& rng) {
  const Matrix g = random_gaussian(d, d, rng);
  return g * g.adjoint();
}

std::vector<Matrix> scale_row(std::vector<Matrix> row, double norm) {
  if (row.empty()) return row;
  const int d = static_cast<int>(row[0].rows());
  Matrix s = Matrix::Zero(d, d);
  for (const auto& a : row) s += a * a.adjoint();
  const double cur = std::sqrt(spectral_norm(s));
  if (cur > 0)
    for (auto& a : row) a *= norm / cur;
  return row;
}

namespace {

std::vector<Matrix> random_row(int n, int d, double norm, Rng& rng, bool commuting) {
  std::vector<Matrix> row;
  if (!commuting) {
    for (int j = 0; j < n; ++j) row.push_back(random_gaussian(d, d, rng));
    return scale_row(std::move(row), norm);
  }
  // Alternate between normal (simultaneously diagonal) rows and polynomials
  // in one nilpotent; both commute entrywise.
  std::uniform_int_distribution<int> coin(0, 1);
  if (d > 1 && coin(rng)) {
    Matrix nil = Matrix::Zero(d, d);
    for (int r = 0; r + 1 < d; ++r) nil(r, r + 1) = random_gaussian(1, 1, rng)(0, 0);
    const Matrix u = random_unitary(d, rng);
    for (int j = 0; j < n; ++j) {
      const auto c = random_gaussian(1, 3, rng);
      Matrix p = c(0, 0) * Matrix::Identity(d, d) + c(0, 1) * nil + c(0, 2) * nil * nil;
      row.push_back(u * p * u.adjoint());
    }
    return scale_row(std::move(row), norm);
  }
  const Matrix u = random_unitary(d, rng);
  for (int j = 0; j < n; ++j) {
    const auto diag = random_gaussian(d, 1, rng);
    row.push_back(u * diag.col(0).asDiagonal() * u.adjoint());
  }
  return scale_row(std::move(row), norm);
}

}  // namespace

OperatorTuple random_product_tuple(const std::vector<int>& n, const std::vector<int>& dims, double norm,
                                   Rng& rng, bool commuting) {
  if (dims.size() != n.size()) fail(ErrorKind::dimension_mismatch, "one slot dimension per factor");
  int total = 1;
  for (int d : dims) total *= d;
  std::vector<std::vector<Matrix>> f;
  for (std::size_t i = 0; i < n.size(); ++i) {
    int before = 1, after = 1;
    for (std::size_t s = 0; s < i; ++s) before *= dims[s];
    for (std::size_t s = i + 1; s < dims.size(); ++s) after *= dims[s];
    std::vector<Matrix> entries;
    for (auto& a : random_row(n[i], dims[i], norm, rng, commuting))
      entries.push_back(kron(kron(Matrix::Identity(before, before), a), Matrix::Identity(after, after)));
    f.push_back(std::move(entries));
  }
  return OperatorTuple(n, total, std::move(f));
}

OperatorTuple random_pure_tuple(const std::vector<int>& n, int dimH, double norm, Rng& rng, bool commuting) {
  if (dimH < 1) fail(ErrorKind::invalid_argument, "dimH must be positive");
  std::vector<OperatorTuple> blocks;
  int remaining = dimH;
  std::uniform_int_distribution<int> pick(1, 2);
  while (remaining > 0) {
    std::vector<int> dims(n.size(), 1);
    int prod = 1;
    for (auto& d : dims) {
      const int want = pick(rng);
      if (prod * want <= remaining) {
        d = want;
        prod *= want;
      }
    }
    blocks.push_back(random_product_tuple(n, dims, norm, rng, commuting));
    remaining -= prod;
  }
  OperatorTuple acc = blocks[0];
  for (std::size_t b = 1; b < blocks.size(); ++b) acc = direct_sum(acc, blocks[b]);
  const Matrix u = random_unitary(dimH, rng);
  std::vector<std::vector<Matrix>> f;
  for (const auto& row : acc.factors()) {
    std::vector<Matrix> entries;
    for (const auto& a : row) entries.push_back(u * a * u.adjoint());
    f.push_back(std::move(entries));
  }
  return OperatorTuple(n, dimH, std::move(f));
}

}  // namespace polyball
