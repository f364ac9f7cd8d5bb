#pragma once

// Commutative polyball: symmetric Fock truncations, the compressions B_{i,j},
// curv_c, m_c and the constrained Berezin kernel.

#include "polyball/berezin.hpp"
#include "polyball/curvature.hpp"
#include "polyball/subspaces.hpp"

namespace polyball {

/// C(q + n - 1, n - 1).
std::uint64_t sym_grade_dim(int n, int q);

/// B_{i,j} on a symmetric truncation (multiplication by z_j^{(i)} in the normalized monomial basis).
GradedOperator b_operator(const FockTruncation& sym_ft, int i, int j);

/// Single factor with n letters: max over j and grades q < cap of
/// ||E_{q+1}^* S_j E_q - B_j|| where E_q embeds normalized monomials as symmetrized words.
double symmetrization_residual(int n, int cap);

/// Sum over words w of length s of B_w^* Q_q B_w against (tr Q_q / tr Q_{q-s}) I on grade q - s,
/// single factor with n letters; max residual over 0 <= s <= q.
double identity2_residual(int n, int q);

struct CurvCOptions {
  bool extrapolate = false;
  /// Caps of the constrained kernel used for the characteristic-function flag; 0 skips the test.
  int kernel_cap = 3;
};

struct CurvCReport {
  CurvEstimate estimate;
  bool characteristic_checked = false;
  bool has_characteristic = false;
  double characteristic_min_eig = 0.0;
};

/// Commutative curvature; rejects tuples whose entries do not commute within a factor.
CurvCReport curv_c_estimate(const OperatorTuple& t, int q_max, const CurvCOptions& opts = {});

struct ConstrainedKernel {
  BerezinKernel kernel;
  double intertwining_residual = 0.0;
  double connection_residual = 0.0;  // max over grades one step inside the caps
};
ConstrainedKernel constrained_berezin(const OperatorTuple& t, const std::vector<int>& caps);

/// Multiplicity on a symmetric truncation; non-Beurling inputs get an "existence unproved" caveat.
MultiplicityReport m_c_estimate(const GradedSubspace& sub, int q_max);

IndexCheck index3_check(const BerezinKernel& kb, const InnerMultiplier& theta, const MultiDegree& q,
                        double completion_tol = 1e-8);

}  // namespace polyball
