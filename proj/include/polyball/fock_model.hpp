#pragma once

// Truncated tensor products of Fock spaces (full or symmetric) with a
// coefficient space E folded into every grade block, and block-sparse
// operators on them.

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "polyball/graded_basis.hpp"
#include "polyball/linalg.hpp"

namespace polyball {

enum class FockModel { full, symmetric };
const char* to_string(FockModel m);

/// Nonzero entries of the local creation map from degree d to degree d+1 in one factor.
struct LocalEntry {
  std::uint64_t row;
  std::uint64_t col;
  double value;
};

class FockTruncation {
 public:
  FockTruncation() = default;
  /// Grades are all q <= caps; max_total >= 0 additionally drops grades with |q| > max_total.
  FockTruncation(Shape shape, int coeff_dim, FockModel model = FockModel::full, int max_total = -1);

  const Shape& shape() const { return shape_; }
  int k() const { return shape_.k(); }
  int coeff_dim() const { return coeff_dim_; }
  FockModel model() const { return model_; }
  int max_total() const { return max_total_; }

  /// Basis size of degree d in factor i: n^d (full) or C(d+n-1, n-1) (symmetric).
  std::uint64_t factor_dim(int i, int d) const;
  /// prod_i factor_dim(i, q_i); this is trace P_q (or trace Q_q), without E.
  std::uint64_t grade_dim(const MultiDegree& q) const;
  Eigen::Index block_dim(const MultiDegree& q) const;
  Eigen::Index block_dim(int grade) const { return block_dims_[grade]; }

  const std::vector<MultiDegree>& grades() const { return grades_; }
  int grade_count() const { return static_cast<int>(grades_.size()); }
  /// -1 when q is not a grade of this truncation.
  int grade_index(const MultiDegree& q) const;
  bool contains(const MultiDegree& q) const { return grade_index(q) >= 0; }
  Eigen::Index offset(int grade) const { return offsets_[grade]; }
  Eigen::Index total_dim() const { return total_; }

  /// Grades with q_i <= D_i - margin (and |q| <= max_total - margin when a total cap is set).
  std::vector<int> interior_grades(int margin) const;

  std::vector<LocalEntry> local_creation(int i, int j, int d) const;

  /// Position of a basis vector of factor i at degree d inside (pre, local, post*E).
  struct Strides {
    std::uint64_t pre;
    std::uint64_t local;
    std::uint64_t post;  // includes coeff_dim
  };
  Strides strides(const MultiDegree& q, int i) const;

  FockTruncation with_coeff_dim(int e) const { return FockTruncation(shape_, e, model_, max_total_); }
  bool same_layout(const FockTruncation& other) const;

 private:
  Shape shape_;
  int coeff_dim_ = 1;
  FockModel model_ = FockModel::full;
  int max_total_ = -1;
  std::vector<MultiDegree> grades_;
  std::map<MultiDegree, int> index_;
  std::vector<Eigen::Index> offsets_;
  std::vector<Eigen::Index> block_dims_;
  Eigen::Index total_ = 0;
};

/// (I x L_{i,j} x I x I_E) applied to the rows of x, which live on grade q;
/// the result lives on q + e_i.
Matrix apply_creation(const FockTruncation& ft, int i, int j, const MultiDegree& q, const Matrix& x);
/// Adjoint: rows of x live on q + e_i, result on q.
Matrix apply_creation_adjoint(const FockTruncation& ft, int i, int j, const MultiDegree& q, const Matrix& x);

class GradedOperator {
 public:
  using Key = std::pair<int, int>;  // (codomain grade, domain grade)

  GradedOperator() = default;
  GradedOperator(FockTruncation domain, FockTruncation codomain);
  static GradedOperator identity(const FockTruncation& ft);
  static GradedOperator zero(const FockTruncation& ft) { return GradedOperator(ft, ft); }

  const FockTruncation& domain() const { return domain_; }
  const FockTruncation& codomain() const { return codomain_; }
  const std::map<Key, Matrix>& blocks() const { return blocks_; }
  const Matrix* block(int row_grade, int col_grade) const;
  void set_block(int row_grade, int col_grade, Matrix m);
  void add_to_block(int row_grade, int col_grade, const Matrix& m);

  GradedOperator adjoint() const;
  GradedOperator operator*(const GradedOperator& rhs) const;
  GradedOperator operator+(const GradedOperator& rhs) const;
  GradedOperator operator-(const GradedOperator& rhs) const;
  GradedOperator scaled(cplx s) const;

  cplx trace() const;
  Matrix to_dense() const;
  /// Principal submatrix on the listed grades (square operators only).
  Matrix dense_on(const std::vector<int>& grades) const;
  /// Largest block Frobenius norm; zero for the empty operator.
  double max_block_norm() const;

 private:
  FockTruncation domain_, codomain_;
  std::map<Key, Matrix> blocks_;
};

GradedOperator creation_op(const FockTruncation& ft, int i, int j);
GradedOperator graded_projection(const FockTruncation& ft, const MultiDegree& q);
/// P_{<= q}: all grades s <= q.
GradedOperator cumulative_projection(const FockTruncation& ft, const MultiDegree& q);
/// P_{<= m}: all grades with |s| <= m.
GradedOperator total_degree_projection(const FockTruncation& ft, int m);
/// Projection onto the vacuum grade, P_C x I_E.
GradedOperator vacuum_projection(const FockTruncation& ft);
/// N_{<= q} = sum_{s <= q} P_s / trace P_s (Q_s for the symmetric model).
GradedOperator n_weight(const FockTruncation& ft, const MultiDegree& q);

/// Phi_{S_i x I}(Y) = sum_j (S_{i,j} x I) Y (S_{i,j} x I)^*; blocks pushed past the caps are dropped.
GradedOperator apply_cp_shift(const GradedOperator& y, int i);
/// (id - Phi_{S_1 x I})^{p_1} o ... o (id - Phi_{S_k x I})^{p_k}(Y); p defaults to all ones.
GradedOperator defect_shift(const GradedOperator& y, std::vector<int> p = {});

}  // namespace polyball
