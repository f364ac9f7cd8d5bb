#include "polyball/graded_basis.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "polyball/errors.hpp"

namespace polyball {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::dimension_mismatch: return "dimension_mismatch";
    case ErrorKind::overflow: return "overflow";
    case ErrorKind::not_in_polyball: return "not_in_polyball";
    case ErrorKind::indefinite_defect: return "indefinite_defect";
    case ErrorKind::numerical_instability: return "numerical_instability";
    case ErrorKind::not_invariant: return "not_invariant";
    case ErrorKind::completion_failed: return "completion_failed";
    case ErrorKind::parse_error: return "parse_error";
  }
  return "unknown";
}

MultiDegree::MultiDegree(std::vector<int> q) : q_(std::move(q)) {
  for (int v : q_)
    if (v < 0) fail(ErrorKind::invalid_argument, "multidegree entries must be nonnegative");
}

int MultiDegree::total() const { return std::accumulate(q_.begin(), q_.end(), 0); }

bool MultiDegree::leq(const MultiDegree& p) const {
  if (p.k() != k()) fail(ErrorKind::dimension_mismatch, "multidegree length mismatch");
  for (int i = 0; i < k(); ++i)
    if (q_[i] > p.q_[i]) return false;
  return true;
}

MultiDegree MultiDegree::plus_unit(int i) const {
  auto q = q_;
  ++q.at(i);
  return MultiDegree(std::move(q));
}

MultiDegree MultiDegree::minus_unit(int i) const {
  auto q = q_;
  --q.at(i);
  return MultiDegree(std::move(q));
}

MultiDegree MultiDegree::operator+(const MultiDegree& other) const {
  if (other.k() != k()) fail(ErrorKind::dimension_mismatch, "multidegree length mismatch");
  auto q = q_;
  for (int i = 0; i < k(); ++i) q[i] += other.q_[i];
  return MultiDegree(std::move(q));
}

MultiDegree MultiDegree::operator-(const MultiDegree& other) const {
  if (other.k() != k()) fail(ErrorKind::dimension_mismatch, "multidegree length mismatch");
  auto q = q_;
  for (int i = 0; i < k(); ++i) q[i] -= other.q_[i];
  return MultiDegree(std::move(q));
}

std::string MultiDegree::str() const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < k(); ++i) os << (i ? "," : "") << q_[i];
  os << ')';
  return os.str();
}

Shape::Shape(std::vector<int> n_, std::vector<int> caps_) : n(std::move(n_)), caps(std::move(caps_)) {
  if (n.empty()) fail(ErrorKind::invalid_argument, "shape needs at least one factor");
  if (caps.size() != n.size()) fail(ErrorKind::dimension_mismatch, "caps and n differ in length");
  for (int v : n)
    if (v < 1) fail(ErrorKind::invalid_argument, "generator counts must be positive");
  for (int v : caps)
    if (v < 0) fail(ErrorKind::invalid_argument, "caps must be nonnegative");
}

Shape Shape::uncapped(std::vector<int> n_) {
  std::vector<int> caps(n_.size(), 0);
  return Shape(std::move(n_), std::move(caps));
}

bool Shape::within_caps(const MultiDegree& q) const { return q.leq(cap_degree()); }

std::string Word::str() const {
  if (letters.empty()) return "e";
  std::string s;
  for (std::size_t a = 0; a < letters.size(); ++a) {
    if (a) s += '.';
    s += std::to_string(letters[a]);
  }
  return s;
}

MultiDegree TensorWord::multidegree() const {
  std::vector<int> q;
  q.reserve(words.size());
  for (const auto& w : words) q.push_back(static_cast<int>(w.length()));
  return MultiDegree(std::move(q));
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    fail(ErrorKind::overflow, "integer product exceeds 64 bits");
  return a * b;
}

std::uint64_t checked_pow(std::uint64_t base, int exponent) {
  std::uint64_t r = 1;
  for (int e = 0; e < exponent; ++e) r = checked_mul(r, base);
  return r;
}

std::vector<Word> enumerate_words(int n_i, int q, int factor) {
  if (n_i < 1 || q < 0) fail(ErrorKind::invalid_argument, "enumerate_words: bad arguments");
  const std::uint64_t count = checked_pow(n_i, q);
  std::vector<Word> out;
  out.reserve(count);
  for (std::uint64_t idx = 0; idx < count; ++idx) out.push_back(Word{factor, word_at(n_i, q, idx)});
  return out;
}

std::uint64_t grade_dim(const Shape& shape, const MultiDegree& q) {
  if (q.k() != shape.k()) fail(ErrorKind::dimension_mismatch, "grade_dim: multidegree length");
  std::uint64_t d = 1;
  for (int i = 0; i < shape.k(); ++i) d = checked_mul(d, checked_pow(shape.n[i], q[i]));
  return d;
}

std::uint64_t binomial(int n, int r) {
  if (r < 0 || n < 0 || r > n) return 0;
  r = std::min(r, n - r);
  // Multiply then divide keeps every intermediate an exact binomial.
  unsigned __int128 acc = 1;
  for (int j = 1; j <= r; ++j) {
    acc = acc * static_cast<unsigned>(n - r + j) / static_cast<unsigned>(j);
    if (acc > std::numeric_limits<std::uint64_t>::max())
      fail(ErrorKind::overflow, "binomial coefficient exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(acc);
}

SimplexCount simplex_count(int m, int k) {
  if (m < 0 || k < 1) fail(ErrorKind::invalid_argument, "simplex_count: need m >= 0, k >= 1");
  return {binomial(m + k - 1, k - 1), binomial(m + k, k)};
}

std::uint64_t word_index(int n_i, const std::vector<int>& letters) {
  std::uint64_t idx = 0;
  for (int l : letters) {
    if (l < 1 || l > n_i) fail(ErrorKind::invalid_argument, "letter out of range");
    idx = checked_mul(idx, n_i) + static_cast<std::uint64_t>(l - 1);
  }
  return idx;
}

std::vector<int> word_at(int n_i, int length, std::uint64_t index) {
  std::vector<int> letters(length);
  for (int a = length - 1; a >= 0; --a) {
    letters[a] = static_cast<int>(index % n_i) + 1;
    index /= n_i;
  }
  if (index != 0) fail(ErrorKind::invalid_argument, "word index out of range");
  return letters;
}

std::uint64_t tensor_index(const Shape& shape, const TensorWord& tw) {
  if (static_cast<int>(tw.words.size()) != shape.k())
    fail(ErrorKind::dimension_mismatch, "tensor word has wrong number of factors");
  std::uint64_t idx = 0;
  for (int i = 0; i < shape.k(); ++i) {
    const auto& w = tw.words[i];
    if (w.factor != i) fail(ErrorKind::invalid_argument, "tensor word factor label mismatch");
    if (static_cast<int>(w.length()) > shape.caps[i])
      fail(ErrorKind::invalid_argument, "tensor word exceeds cap in factor " + std::to_string(i + 1));
    idx = checked_mul(idx, checked_pow(shape.n[i], static_cast<int>(w.length()))) +
          word_index(shape.n[i], w.letters);
  }
  return idx;
}

TensorWord tensor_word_at(const Shape& shape, const MultiDegree& q, std::uint64_t index) {
  if (!shape.within_caps(q)) fail(ErrorKind::invalid_argument, "grade beyond caps: " + q.str());
  if (index >= grade_dim(shape, q)) fail(ErrorKind::invalid_argument, "tensor index out of range");
  TensorWord tw;
  tw.words.resize(shape.k());
  for (int i = shape.k() - 1; i >= 0; --i) {
    const std::uint64_t d = checked_pow(shape.n[i], q[i]);
    tw.words[i] = Word{i, word_at(shape.n[i], q[i], index % d)};
    index /= d;
  }
  return tw;
}

namespace {
void monomials_rec(int n, int pos, int remaining, std::vector<int>& cur,
                   std::vector<std::vector<int>>& out) {
  if (pos == n - 1) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    cur[pos] = v;
    monomials_rec(n, pos + 1, remaining - v, cur, out);
  }
}
}  // namespace

std::vector<std::vector<int>> enumerate_monomials(int n, int d) {
  if (n < 1 || d < 0) fail(ErrorKind::invalid_argument, "enumerate_monomials: bad arguments");
  std::vector<std::vector<int>> out;
  std::vector<int> cur(n, 0);
  monomials_rec(n, 0, d, cur, out);
  return out;
}

std::uint64_t monomial_index(const std::vector<int>& alpha) {
  const int n = static_cast<int>(alpha.size());
  int remaining = std::accumulate(alpha.begin(), alpha.end(), 0);
  std::uint64_t idx = 0;
  for (int j = 0; j + 1 < n; ++j) {
    // exponents larger than alpha_j at slot j come first
    const int slots = n - j - 1;
    for (int v = remaining; v > alpha[j]; --v) idx += binomial(remaining - v + slots - 1, slots - 1);
    remaining -= alpha[j];
  }
  return idx;
}

std::uint64_t multinomial(const std::vector<int>& alpha) {
  std::uint64_t r = 1;
  int acc = 0;
  for (int a : alpha) {
    acc += a;
    r = checked_mul(r, binomial(acc, a));
  }
  return r;
}

double monomial_norm_sq(const std::vector<int>& alpha) {
  const int d = std::accumulate(alpha.begin(), alpha.end(), 0);
  if (d <= 20) return 1.0 / static_cast<double>(multinomial(alpha));
  double lg = -std::lgamma(d + 1.0);
  for (int a : alpha) lg += std::lgamma(a + 1.0);
  return std::exp(lg);
}

void for_each_leq(const MultiDegree& bound, const std::function<void(const MultiDegree&)>& f) {
  const int k = bound.k();
  std::vector<int> q(k, 0);
  while (true) {
    f(MultiDegree(q));
    int i = k - 1;
    while (i >= 0 && q[i] == bound[i]) {
      q[i] = 0;
      --i;
    }
    if (i < 0) return;
    ++q[i];
  }
}

std::vector<MultiDegree> multidegrees_leq(const MultiDegree& bound) {
  std::vector<MultiDegree> out;
  for_each_leq(bound, [&](const MultiDegree& q) { out.push_back(q); });
  return out;
}

std::vector<MultiDegree> simplex_layer(int k, int m) {
  std::vector<MultiDegree> out;
  for_each_leq(MultiDegree::constant(k, m), [&](const MultiDegree& q) {
    if (q.total() == m) out.push_back(q);
  });
  return out;
}

}  // namespace polyball
