#pragma once

// Invariant subspaces of (truncated) Fock x E, either as exact coordinate
// subspaces described per factor (structured mode) or as orthonormal bases per
// group of grades (materialized mode).

#include <optional>
#include <string>
#include <vector>

#include "polyball/berezin.hpp"
#include "polyball/curvature.hpp"
#include "polyball/fock_model.hpp"

namespace polyball {

struct NAdicExpansion {
  int base = 2;
  double target = 0.0;          // t; the expansion represents 1 - t
  std::vector<int> exponents;   // k_1 < k_2 < ...
  std::vector<int> digits;      // d_p in 1..base-1
  long double remainder = 0.0;  // (1 - t) - sum d_p / base^{k_p}
  long double tail_bound = 0.0; // base^{-k_N} while the remainder is nonzero, else 0

  long double partial_sum(int q) const;  // sum over k_p <= q
  long double sum() const;
};

/// Greedy base-n digits of 1 - t restricted to 1..n-1, at most n_terms of them.
NAdicExpansion construct_nadic(int n, double t, int n_terms);

/// One factor of a structured subspace: M_i x E_i with M_i spanned by basis
/// words (or monomials) picked by a rule.
struct FactorProfile {
  enum class Kind { full, zero, suffix, min_length, cur0, monomial_ideal };
  Kind kind = Kind::full;
  int n = 1;
  int coeff_dim = 1;
  FockModel model = FockModel::full;
  std::vector<std::vector<int>> words;  // suffix words (letters) or ideal generators (exponents)
  int min_length = 0;
  std::optional<NAdicExpansion> expansion;

  std::uint64_t basis_dim(int q) const;
  /// Number of basis vectors of degree q in M_i (without E_i); exact, throws on overflow.
  std::uint64_t count(int q) const;
  /// count / basis_dim, evaluated in closed form (valid at any depth).
  long double ratio(int q) const;
  bool contains(std::uint64_t basis_index, int q) const;
  /// Degree from which ratio(q) no longer changes; nullopt when it keeps moving.
  std::optional<int> stable_degree() const;
};
const char* to_string(FactorProfile::Kind k);
FactorProfile::Kind profile_kind_from_string(const std::string& s);

class GradedSubspace {
 public:
  enum class Mode { structured, materialized };

  /// Structured: M = (M_1 x E_1) x ... x (M_k x E_k), intersected with |q| >= min_total.
  static GradedSubspace structured(std::vector<FactorProfile> profiles, std::vector<int> caps, int min_total = 0,
                                   std::string label = "structured");
  /// Materialized: orthonormal bases per group of grades of `ft`; each group's basis
  /// has rows ordered by the group's grades in the given order.
  static GradedSubspace materialized(FockTruncation ft, std::vector<std::vector<int>> groups, std::vector<Matrix> bases,
                                     std::string label = "basis");

  Mode mode() const { return mode_; }
  const std::string& label() const { return label_; }
  FockModel model() const { return ft_.model(); }
  const std::vector<int>& n() const { return ft_.shape().n; }
  const std::vector<int>& caps() const { return ft_.shape().caps; }
  int k() const { return ft_.k(); }
  int coeff_dim() const { return ft_.coeff_dim(); }
  const FockTruncation& truncation() const { return ft_; }
  const std::vector<FactorProfile>& profiles() const { return profiles_; }
  int min_total() const { return min_total_; }
  const std::vector<std::vector<int>>& groups() const { return groups_; }
  const std::vector<Matrix>& bases() const { return bases_; }

  /// Exact dim of M at grade q (structured only).
  std::uint64_t count(const MultiDegree& q) const;
  /// Exact dim of the complement at grade q, counted by enumerating basis vectors
  /// when the grade is small enough (structured only).
  std::uint64_t perp_count(const MultiDegree& q) const;
  /// y_q = trace[P_M (P_q x I)] / trace P_q; in [0, dim E].
  double ratio(const MultiDegree& q) const;
  /// Same for the orthogonal complement, computed from its own basis or count.
  double perp_ratio(const MultiDegree& q) const;
  /// Degree (per factor) past which structured ratios are constant.
  std::optional<MultiDegree> stable_degree() const;
  /// Grades at which the subspace is known (all of them for structured mode).
  bool has_grade(const MultiDegree& q) const;

  /// Materialized copy (structured subspaces become coordinate bases per grade).
  GradedSubspace materialize() const;
  /// Basis of the complement inside each group.
  std::vector<Matrix> complement_bases() const;
  GradedOperator projection() const;

  /// Largest ||(I - P_M) (S_{i,j} x I) v|| over basis vectors v whose image stays inside the truncation.
  double invariance_residual() const;
  /// Throws not_invariant when the residual exceeds tol.
  void certify(double tol = 1e-10) const;

 private:
  Mode mode_ = Mode::structured;
  std::string label_;
  FockTruncation ft_;
  std::vector<FactorProfile> profiles_;
  int min_total_ = 0;
  std::vector<std::vector<int>> groups_;
  std::vector<Matrix> bases_;
};

// Constructors -------------------------------------------------------------

GradedSubspace zero_subspace(FockModel model, std::vector<int> n, std::vector<int> caps, int coeff_dim);
GradedSubspace full_subspace(FockModel model, std::vector<int> n, std::vector<int> caps, int coeff_dim);
/// M_i(t) of a single factor: words with a suffix in J_1 u ... u J_N.
GradedSubspace construct_Mt(const NAdicExpansion& exp, int cap);
FactorProfile mt_profile(const NAdicExpansion& exp);
/// Tensor product of structured parts; shapes and E-factors are concatenated.
GradedSubspace tensor_subspace(const std::vector<GradedSubspace>& parts);
/// N_1(w) x N_2(w, t) x full x ... with n.size() >= 2 and n_1, n_2 >= 2.
GradedSubspace uncountable_family(double t, double omega, std::vector<int> n, std::vector<int> caps, int n_terms = 20);
/// Complement of span{(e_1)^s} in factor 1, all other factors full.
GradedSubspace cur0_subspace(std::vector<int> n, std::vector<int> caps);
/// All grades with total degree >= L.
GradedSubspace finite_codim_subspace(FockModel model, std::vector<int> n, std::vector<int> caps, int L, int coeff_dim = 1);
/// Full model: in factor `factor`, the words ending in one of `suffixes`; other factors full.
GradedSubspace monomial_subspace(std::vector<int> n, std::vector<int> caps, int factor,
                                 std::vector<std::vector<int>> suffixes);
/// Symmetric model: in factor `factor`, the monomial ideal generated by `generators`.
GradedSubspace monomial_ideal_subspace(std::vector<int> n, std::vector<int> caps, int factor,
                                       std::vector<std::vector<int>> generators);

struct GeneratorTerm {
  MultiDegree grade;
  std::uint64_t index = 0;  // tensor index inside the grade
  int e = 0;                // coefficient index
  cplx value = 0.0;
};
/// Smallest invariant subspace containing the generators, which must be
/// homogeneous in total degree. Valid on the window {|q| <= L} with caps (L..L).
GradedSubspace generated_subspace(FockModel model, std::vector<int> n, int L, int coeff_dim,
                                  const std::vector<std::vector<GeneratorTerm>>& generators);

// Invariants -----------------------------------------------------------------

/// x_q = trace[P_{M perp}(P_q x I)] / trace P_q over the box (Q..Q); for
/// structured subspaces whose ratios stabilize, the estimate is the stabilized value.
CurvEstimate subspace_curvature(const GradedSubspace& sub, int q_max);

struct MultiplicityReport {
  CurvEstimate multiplicity;  // y_q and its sequences
  CurvEstimate compression;   // x_q of the compression
  double route_residual = 0.0;        // max |dim E - x_q - y_q|
  bool complement_exact = true;       // y_q(M) + y_q(M perp) = dim E by exact counts
  double complement_residual = 0.0;
  double estimate = 0.0;
  double invariance_residual = 0.0;
};
MultiplicityReport multiplicity_estimate(const GradedSubspace& sub, int q_max);

struct BeurlingVerdict {
  bool verdict = false;
  double min_eig = 0.0;
  MultiDegree worst_grade;  // lowest-layer grade of the most negative block
  int worst_layer = 0;
};
/// Delta_{S x I}(P_M) >= 0 on grades one step inside the truncation.
BeurlingVerdict beurling_check(const GradedSubspace& sub, const Tolerances& tol = default_tolerances());

struct InnerSequenceReport {
  double decomposition_residual = 0.0;  // max block norm of P_M - sum psi psi^*
  std::vector<MultiDegree> grades;
  std::vector<double> normalized_sums;  // sum_s sum_{|a|=q} ||psi_s^* e_a||^2 / trace P_q
  std::vector<double> corner_seq;
  double limit_estimate = 0.0;
  bool verdict = false;  // decomposition holds and the limit estimate is 1 within 1e-9
};
InnerSequenceReport inner_sequence_check(const GradedSubspace& sub, const std::vector<InnerMultiplier>& psis, int q_max);

struct Compression {
  OperatorTuple tuple;
  Matrix basis;  // total_dim x dim(M perp), orthonormal
  Matrix frame;  // dim(M perp) x rank, the vacuum frame
  FockTruncation ambient;
};
/// P_{M perp}(S_{i,j} x I)|_{M perp} on the truncated complement.
Compression compression_tuple(const GradedSubspace& sub, int max_dim = 4096);

}  // namespace polyball
