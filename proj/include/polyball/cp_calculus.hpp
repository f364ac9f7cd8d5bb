#pragma once

// Row tuples T_i = (T_{i,1}..T_{i,n_i}) on a finite-dimensional H, the maps
// Phi_{T_i}(Y) = sum_j T_{i,j} Y T_{i,j}^* and the defect maps built from them.

#include <string>
#include <vector>

#include "polyball/graded_basis.hpp"
#include "polyball/linalg.hpp"

namespace polyball {

class OperatorTuple {
 public:
  OperatorTuple() = default;
  /// Validates square matrices of size dimH and cross-factor commutation.
  OperatorTuple(std::vector<int> n, int dimH, std::vector<std::vector<Matrix>> factors,
                const Tolerances& tol = default_tolerances());

  int k() const { return static_cast<int>(n_.size()); }
  const std::vector<int>& n() const { return n_; }
  int dimH() const { return dimH_; }
  const Matrix& op(int i, int j) const { return factors_[i][j]; }
  const std::vector<Matrix>& factor(int i) const { return factors_[i]; }
  const std::vector<std::vector<Matrix>>& factors() const { return factors_; }

  /// Largest relative commutator ||[A,B]|| / (||A|| ||B||) over entries of distinct factors.
  double cross_commutation_residual() const;
  /// Same over pairs inside one factor (zero for commutative tuples).
  double intra_commutation_residual() const;

 private:
  std::vector<int> n_;
  int dimH_ = 0;
  std::vector<std::vector<Matrix>> factors_;
};

/// Phi_{T_i}(Y).
Matrix cp_apply(const OperatorTuple& t, int i, const Matrix& y);
/// Phi_{T_i}^s(Y).
Matrix cp_power(const OperatorTuple& t, int i, int s, const Matrix& y);
/// Phi_{T_1}^{q_1} o ... o Phi_{T_k}^{q_k}(Y).
Matrix cp_multi(const OperatorTuple& t, const MultiDegree& q, const Matrix& y);

/// (id - Phi_1)^{p_1} o ... o (id - Phi_k)^{p_k}(Y), p in {0,1}^k, by composition.
Matrix defect_map(const OperatorTuple& t, const std::vector<int>& p, const Matrix& y);
/// Same map by the expansion sum_{0<=s<=p} (-1)^{|s|} Phi^s(Y).
Matrix defect_map_expansion(const OperatorTuple& t, const std::vector<int>& p, const Matrix& y);
/// Delta_T(I), i.e. defect_map with p = (1,..,1) applied to the identity.
Matrix defect_operator(const OperatorTuple& t);

struct PolyballVerdict {
  bool member = false;
  std::vector<std::vector<int>> ps;
  std::vector<double> min_eigs;
  std::vector<int> worst_p;
  double worst_eig = 0.0;
  double cross_residual = 0.0;
};

/// Delta^p(I) >= 0 for all 2^k choices of p. Throws invalid_argument when the
/// factors fail to commute.
PolyballVerdict check_polyball(const OperatorTuple& t, const Tolerances& tol = default_tolerances());

enum class Purity { pure, not_pure, undetermined };
const char* to_string(Purity p);

struct PurityReport {
  std::vector<Purity> per_factor;
  std::vector<int> iterations;
  std::vector<double> final_norms;
  Purity overall = Purity::undetermined;
};

PurityReport check_pure(const OperatorTuple& t, const Tolerances& tol = default_tolerances());

struct DefectData {
  Matrix defect;
  Matrix sqrt;
  int rank = 0;
  Matrix range_basis;  // dimH x rank, eigenvectors of the retained eigenvalues
  RealVector eigenvalues;
};

/// Throws indefinite_defect (message carries the eigenvalue) when Delta_T(I) is not PSD.
DefectData defect_data(const OperatorTuple& t, const Tolerances& tol = default_tolerances());

OperatorTuple direct_sum(const OperatorTuple& a, const OperatorTuple& b);
/// Tuples X^(1)..X^(p) on H_1..H_p become one tuple on H_1 x ... x H_p with
/// concatenated shape. Each input must belong to its polyball.
OperatorTuple ampliation(const std::vector<OperatorTuple>& tuples,
                         const Tolerances& tol = default_tolerances());

/// Matrix of Phi_{T_i} acting on column-stacked Y; test oracle only (dimH <= 16).
Matrix cp_superoperator(const OperatorTuple& t, int i);

/// Zero tuple with the given shape on C^dimH.
OperatorTuple zero_tuple(std::vector<int> n, int dimH);

}  // namespace polyball
