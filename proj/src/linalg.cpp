#include "polyball/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace polyball {

const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

Matrix hermitian_part(const Matrix& a) { return (a + a.adjoint()) * 0.5; }

HermitianSpectrum hermitian_eig(const Matrix& a) {
  if (a.size() == 0) return {RealVector(0), Matrix(0, 0)};
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(a));
  return {es.eigenvalues(), es.eigenvectors()};
}

double min_eigenvalue(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

bool is_psd(const Matrix& a, double rel_tol, double* min_eig) {
  if (a.size() == 0) {
    if (min_eig) *min_eig = 0.0;
    return true;
  }
  auto spec = hermitian_eig(a);
  const double lo = spec.values(0);
  const double hi = std::max(std::abs(spec.values(0)), std::abs(spec.values(spec.values.size() - 1)));
  if (min_eig) *min_eig = lo;
  return lo >= -rel_tol * std::max(hi, 1e-300);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix orthonormal_columns(const Matrix& a, double rel_tol) {
  if (a.cols() == 0 || a.rows() == 0) return Matrix(a.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double cut = rel_tol * std::max(s(0), 1e-300);
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return svd.matrixU().leftCols(r);
}

Matrix orthonormal_complement(const Matrix& a, Eigen::Index dim) {
  if (a.cols() == 0) return Matrix::Identity(dim, dim);
  Matrix proj = Matrix::Identity(dim, dim) - a * a.adjoint();
  auto spec = hermitian_eig(proj);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < spec.values.size(); ++j)
    if (spec.values(j) > 0.5) keep.push_back(j);
  Matrix out(dim, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) out.col(c) = spec.vectors.col(keep[c]);
  return out;
}

namespace {
std::atomic<int> g_threads{0};
}

void set_thread_count(int threads) { g_threads = std::max(0, threads); }

int thread_count() {
  int t = g_threads.load();
  if (t > 0) return t;
  if (const char* env = std::getenv("POLYBALL_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& f) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace polyball
