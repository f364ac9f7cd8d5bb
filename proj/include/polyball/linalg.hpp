#pragma once

#include <complex>
#include <cstddef>
#include <functional>

#include <Eigen/Dense>

namespace polyball {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

struct Tolerances {
  double commutation = 1e-10;  // relative to the product of the two norms
  double psd = 1e-10;          // relative to the operator norm
  double purity = 1e-9;
  double stall = 1e-12;
  int max_iter = 200;
  double rank = 1e-9;          // relative to the largest eigenvalue
};

const Tolerances& default_tolerances();

struct HermitianSpectrum {
  RealVector values;  // ascending
  Matrix vectors;
};

Matrix hermitian_part(const Matrix& a);
HermitianSpectrum hermitian_eig(const Matrix& a);
double min_eigenvalue(const Matrix& a);
double spectral_norm(const Matrix& a);
/// PSD up to psd_tol * ||a||; the minimum eigenvalue is written to *min_eig.
bool is_psd(const Matrix& a, double rel_tol, double* min_eig = nullptr);
Matrix kron(const Matrix& a, const Matrix& b);
/// Orthonormal basis of the column span (rank decided relative to the largest singular value).
Matrix orthonormal_columns(const Matrix& a, double rel_tol = 1e-10);
/// Orthonormal basis of the orthogonal complement of the column span of `a`
/// (a has orthonormal columns) inside C^dim.
Matrix orthonormal_complement(const Matrix& a, Eigen::Index dim);

/// Worker count used by parallel loops; 0 means "not set", resolved from
/// POLYBALL_THREADS or hardware concurrency.
void set_thread_count(int threads);
int thread_count();

/// Runs f(0..count-1) over the worker pool. Each index must write only its own
/// output slot so results do not depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& f);

}  // namespace polyball
