#pragma once

// Free-semigroup words, multidegrees and the mixed-radix layout of tensor
// products of truncated Fock spaces.

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace polyball {

/// Multidegree q = (q_1, ..., q_k) in Z_+^k with the componentwise order.
class MultiDegree {
 public:
  MultiDegree() = default;
  explicit MultiDegree(std::vector<int> q);
  static MultiDegree zeros(int k) { return MultiDegree(std::vector<int>(k, 0)); }
  static MultiDegree constant(int k, int value) {
    return MultiDegree(std::vector<int>(k, value));
  }

  int k() const { return static_cast<int>(q_.size()); }
  int operator[](int i) const { return q_[i]; }
  const std::vector<int>& values() const { return q_; }
  int total() const;

  /// Componentwise partial order q <= p.
  bool leq(const MultiDegree& p) const;
  MultiDegree plus_unit(int i) const;
  MultiDegree minus_unit(int i) const;
  MultiDegree operator+(const MultiDegree& other) const;
  MultiDegree operator-(const MultiDegree& other) const;

  // Lexicographic, used only for deterministic ordering of tables.
  auto operator<=>(const MultiDegree&) const = default;
  bool operator==(const MultiDegree&) const = default;

  std::string str() const;

 private:
  std::vector<int> q_;
};

/// Generator counts n = (n_1..n_k) together with per-factor truncation caps.
struct Shape {
  std::vector<int> n;
  std::vector<int> caps;

  Shape() = default;
  Shape(std::vector<int> n_, std::vector<int> caps_);
  /// Shape with caps all zero; used where caps are irrelevant.
  static Shape uncapped(std::vector<int> n_);

  int k() const { return static_cast<int>(n.size()); }
  MultiDegree cap_degree() const { return MultiDegree(caps); }
  bool within_caps(const MultiDegree& q) const;
};

/// A word in the free semigroup on n_i generators; letters are 1-based.
struct Word {
  int factor = 0;
  std::vector<int> letters;

  std::size_t length() const { return letters.size(); }
  bool operator==(const Word&) const = default;
  auto operator<=>(const Word&) const = default;
  std::string str() const;
};

/// One word per factor: the label of the basis vector e_{b_1} x ... x e_{b_k}.
struct TensorWord {
  std::vector<Word> words;

  MultiDegree multidegree() const;
  bool operator==(const TensorWord&) const = default;
};

/// All n_i^q words of length q in lexicographic order of letters.
std::vector<Word> enumerate_words(int n_i, int q, int factor = 0);

/// n^q with overflow detection (throws ErrorKind::overflow).
std::uint64_t checked_pow(std::uint64_t base, int exponent);
std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b);

/// prod_i n_i^{q_i}: the trace of P_{q_1} x ... x P_{q_k}.
std::uint64_t grade_dim(const Shape& shape, const MultiDegree& q);

struct SimplexCount {
  std::uint64_t layer;       // #{q : q_1+...+q_k = m} = C(m+k-1, k-1)
  std::uint64_t cumulative;  // #{q : q_1+...+q_k <= m} = C(m+k, k)
};
SimplexCount simplex_count(int m, int k);

/// Exact binomial coefficient with overflow detection.
std::uint64_t binomial(int n, int r);

/// Position of a word inside its grade (mixed radix, most significant letter first).
std::uint64_t word_index(int n_i, const std::vector<int>& letters);
std::vector<int> word_at(int n_i, int length, std::uint64_t index);

/// Bijection between tensor words of multidegree q and 0..grade_dim-1,
/// lexicographic in (word_1, ..., word_k).
std::uint64_t tensor_index(const Shape& shape, const TensorWord& tw);
TensorWord tensor_word_at(const Shape& shape, const MultiDegree& q, std::uint64_t index);

/// Exponent vectors alpha (|alpha| = d) in n variables, ordered like their
/// sorted words 1^{a_1} 2^{a_2} ... (so (d,0,..) comes first).
std::vector<std::vector<int>> enumerate_monomials(int n, int d);
std::uint64_t monomial_index(const std::vector<int>& alpha);
/// d!/alpha!, the number of words with letter content alpha.
std::uint64_t multinomial(const std::vector<int>& alpha);

/// ||z^alpha||^2 = alpha!/|alpha|! in the symmetric Fock space; exact integer
/// arithmetic up to degree 20, log-gamma beyond.
double monomial_norm_sq(const std::vector<int>& alpha);

/// Calls f(q) for every q <= bound, in lexicographic order.
void for_each_leq(const MultiDegree& bound, const std::function<void(const MultiDegree&)>& f);
std::vector<MultiDegree> multidegrees_leq(const MultiDegree& bound);
/// All q in Z_+^k with q_1+...+q_k = m, lexicographic.
std::vector<MultiDegree> simplex_layer(int k, int m);

}  // namespace polyball
