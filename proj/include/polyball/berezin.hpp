#pragma once

// Berezin kernels K_T : H -> Fock x defect space, and the identity checks
// built on them.

#include <map>
#include <optional>

#include "polyball/cp_calculus.hpp"
#include "polyball/fock_model.hpp"

namespace polyball {

/// Multi-analytic operator given by its symbol coefficients
/// theta_s = (P_s x I) Psi (P_C x I), each of size (grade_dim(s) * target_dim) x source_dim.
struct InnerMultiplier {
  FockModel model = FockModel::full;
  std::vector<int> n;
  int source_dim = 1;
  int target_dim = 1;
  std::map<MultiDegree, Matrix> coeffs;
  bool isometric = false;
};

/// Psi restricted to the truncation: domain ft.with_coeff_dim(source_dim), codomain ft (coeff_dim = target_dim).
GradedOperator multiplier_operator(const InnerMultiplier& psi, const FockTruncation& target_ft);
/// max block norm of Psi (S_{i,j} x I) - (S_{i,j} x I) Psi over all i, j.
double multiplier_intertwining_residual(const InnerMultiplier& psi, const std::vector<int>& caps);
/// ||Psi^* Psi - I|| on grades whose whole image stays inside the caps.
double multiplier_isometry_residual(const InnerMultiplier& psi, const std::vector<int>& caps);

struct BerezinKernel {
  OperatorTuple tuple;
  FockTruncation truncation;  // coeff_dim = rank of the defect
  DefectData defect;
  Matrix frame;               // dimH x rank, orthonormal columns spanning the defect range
  std::vector<Matrix> blocks; // per truncation grade: block_dim x dimH
  double tail_bound_max = 0.0;
  double tail_bound_sum = 0.0;
  double tail_residual = 0.0;  // ||I - K^* K||

  Matrix gram() const;
  Matrix dense() const;
  const Matrix& block(const MultiDegree& q) const;
};

struct KernelOptions {
  FockModel model = FockModel::full;
  std::optional<Matrix> frame;
  int max_total = -1;
};

/// Rows Delta^{1/2} T^*_{1,b_1} ... T^*_{k,b_k} written in the frame coordinates.
/// The symmetric model gives the constrained kernel (projection onto symmetric tensors).
BerezinKernel berezin_kernel(const OperatorTuple& t, const std::vector<int>& caps, const KernelOptions& opts = {});

/// max over i, j and grades q with q + e_i inside the truncation of ||K_q T^*_{i,j} - (S_{i,j}^* x I) K_{q+e_i}||.
double verify_intertwining(const BerezinKernel& kb);

struct IdentityCheck {
  Matrix lhs;
  Matrix rhs;
  double residual = 0.0;
};
/// K^*(P_q x I)K against Phi^q(Delta_T(I)).
IdentityCheck connection_identity(const BerezinKernel& kb, const MultiDegree& q);

struct PsdVerdict {
  bool verdict = false;
  double min_eig = 0.0;
};
/// Delta_{S x I}(I - K K^*) >= 0 on the grades one step inside the caps.
PsdVerdict has_characteristic_function(const BerezinKernel& kb, const Tolerances& tol = default_tolerances());

struct TraceRoutes {
  double operator_route = 0.0;  // trace[Delta_{S x I}(K K^*) (N_{<=q} x I)]
  double grade_route = 0.0;     // trace[(P_q x I) K K^*] / trace P_q
  double residual = 0.0;
};
TraceRoutes curvature_operator_trace(const BerezinKernel& kb, const MultiDegree& q);

struct IndexCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
  double completion_residual = 0.0;
  int rank = 0;
  double theta_term = 0.0;
};
/// Validates K K^* + Theta Theta^* = I on the truncation (throws completion_failed
/// above `completion_tol`), then compares trace[(P_q x I)KK^*]/trace P_q with
/// rank - sum_{s<=q} ||theta_s||^2 / trace P_s.
IndexCheck index_formula_check(const BerezinKernel& kb, const InnerMultiplier& theta, const MultiDegree& q,
                               double completion_tol = 1e-8);

}  // namespace polyball
