#pragma once

// Exact arithmetic in G = K x| Z^l for the three shipped module families:
//
//   lamplighter  K = (Z/q)[x, x^-1], t acts by multiplication by x
//   z16          K = Z[1/6],          t acts by multiplication by 3/2
//   sol          K = Z^2,             t acts by a hyperbolic integer matrix M
//
// Elements are pairs (m, k). The product convention is
//
//   (m1, k1)(m2, k2) = (m1 + m2, t^{m2} k1 + k2)
//
// so a word l_1 ... l_n evaluates to (sum m_i, sum_i t^{a_i} k_i) where a_i is
// the suffix shift m_{i+1} + ... + m_n.

#include <array>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <gmpxx.h>

namespace solgeom {

using BigInt = mpz_class;

inline constexpr std::uint8_t kEncodingVersion = 1;
inline constexpr std::size_t kMaxRank = 4;

/// Exponent vector (m_1, ..., m_l) of t_1^{m_1} ... t_l^{m_l}.
class ShiftVector {
public:
  ShiftVector() = default;
  explicit ShiftVector(std::size_t rank) : rank_(check_rank(rank)) {}
  ShiftVector(std::initializer_list<std::int64_t> values);

  static ShiftVector scalar(std::int64_t m) { return ShiftVector{m}; }

  std::size_t rank() const { return rank_; }
  std::int64_t operator[](std::size_t i) const { return v_[i]; }
  std::int64_t &operator[](std::size_t i) { return v_[i]; }
  std::span<const std::int64_t> values() const { return {v_.data(), rank_}; }

  bool is_zero() const;

  ShiftVector operator+(const ShiftVector &o) const;
  ShiftVector operator-(const ShiftVector &o) const;
  ShiftVector operator-() const;
  ShiftVector &operator+=(const ShiftVector &o) { return *this = *this + o; }

  friend bool operator==(const ShiftVector &a, const ShiftVector &b) {
    return a.rank_ == b.rank_ && a.v_ == b.v_;
  }

private:
  static std::size_t check_rank(std::size_t rank);

  std::size_t rank_ = 0;
  std::array<std::int64_t, kMaxRank> v_{};
};

/// Sparse Laurent polynomial over Z/q. Terms are sorted by exponent and no
/// coefficient is zero.
class LaurentPoly {
public:
  using Term = std::pair<std::int64_t, std::uint32_t>;

  LaurentPoly() = default;
  explicit LaurentPoly(std::uint32_t modulus);
  /// Builds from arbitrary (exponent, coefficient) terms, reducing mod q and
  /// merging repeated exponents.
  LaurentPoly(std::uint32_t modulus, std::vector<std::pair<std::int64_t, std::int64_t>> terms);

  static LaurentPoly monomial(std::uint32_t modulus, std::int64_t exponent,
                              std::int64_t coefficient = 1);

  std::uint32_t modulus() const { return q_; }
  const std::vector<Term> &terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::int64_t min_exponent() const { return terms_.front().first; }
  std::int64_t max_exponent() const { return terms_.back().first; }

  LaurentPoly shifted(std::int64_t by) const;
  LaurentPoly operator+(const LaurentPoly &o) const;
  LaurentPoly operator-() const;

  friend bool operator==(const LaurentPoly &a, const LaurentPoly &b) {
    return a.q_ == b.q_ && a.terms_ == b.terms_;
  }

private:
  std::uint32_t q_ = 2;
  std::vector<Term> terms_;
};

/// Element of Z[1/6], stored in lowest terms as num / (2^a 3^b).
class SixthRational {
public:
  SixthRational() = default;
  SixthRational(long value) : num_(value) {}
  SixthRational(BigInt num, unsigned pow2, unsigned pow3);
  /// Parses "p", "p/q"; q must be of the form 2^a 3^b.
  static SixthRational parse(std::string_view text);

  const BigInt &numerator() const { return num_; }
  BigInt denominator() const;
  unsigned pow2() const { return a_; }
  unsigned pow3() const { return b_; }
  bool is_zero() const { return sgn(num_) == 0; }
  int sign() const { return sgn(num_); }

  /// p-adic valuation for p in {2, 3}; undefined (throws) at zero.
  long valuation(unsigned p) const;

  /// Multiplication by (3/2)^m.
  SixthRational scaled(std::int64_t m) const;
  SixthRational operator+(const SixthRational &o) const;
  SixthRational operator-(const SixthRational &o) const { return *this + (-o); }
  SixthRational operator-() const;

  mpq_class to_mpq() const;
  std::string to_string() const;

  friend bool operator==(const SixthRational &x, const SixthRational &y) {
    return x.a_ == y.a_ && x.b_ == y.b_ && x.num_ == y.num_;
  }

private:
  void normalize();

  BigInt num_ = 0;
  unsigned a_ = 0;
  unsigned b_ = 0;
};

struct LatticeVec {
  BigInt x = 0;
  BigInt y = 0;

  bool is_zero() const { return sgn(x) == 0 && sgn(y) == 0; }
  LatticeVec operator+(const LatticeVec &o) const { return {x + o.x, y + o.y}; }
  LatticeVec operator-() const { return {-x, -y}; }
  friend bool operator==(const LatticeVec &a, const LatticeVec &b) {
    return a.x == b.x && a.y == b.y;
  }
};

using ModuleElement = std::variant<LaurentPoly, SixthRational, LatticeVec>;

struct GroupElement {
  ShiftVector shift;
  ModuleElement base;

  friend bool operator==(const GroupElement &a, const GroupElement &b) {
    return a.shift == b.shift && a.base == b.base;
  }
};

enum class Family : std::uint8_t { Lamplighter = 1, Z16 = 2, Sol = 3 };

std::string_view family_name(Family f);
Family parse_family(std::string_view name);

struct Matrix2 {
  std::int64_t a = 2, b = 1, c = 1, d = 1;

  std::int64_t det() const { return a * d - b * c; }
  std::int64_t trace() const { return a + d; }
  friend bool operator==(const Matrix2 &, const Matrix2 &) = default;
};

/// Thrown when elements of different families (or different moduli) meet.
class FamilyMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct WordEvaluation {
  GroupElement value;
  /// suffix_shifts[i] = m_{i+1} + ... + m_n for the i-th letter (0-based).
  std::vector<ShiftVector> suffix_shifts;
};

/// The group K x| <t> for one family, with the module action fixed. All
/// operations are pure; a Group is cheap to copy and safe to share.
class Group {
public:
  static Group lamplighter(std::uint32_t q);
  static Group z16();
  static Group sol(Matrix2 m = {});

  Family family() const { return family_; }
  std::size_t rank() const { return 1; }
  std::uint32_t modulus() const { return q_; }
  const Matrix2 &matrix() const { return m_; }
  /// Short description, e.g. "lamplighter-2", "z16", "sol[2,1,1,1]".
  std::string description() const;

  ModuleElement zero() const;
  ModuleElement one() const;
  bool is_zero(const ModuleElement &k) const;
  ModuleElement add(const ModuleElement &x, const ModuleElement &y) const;
  ModuleElement negate(const ModuleElement &k) const;
  ModuleElement act(const ShiftVector &m, const ModuleElement &k) const;
  ModuleElement act(std::int64_t m, const ModuleElement &k) const {
    return act(ShiftVector::scalar(m), k);
  }

  GroupElement identity() const;
  GroupElement shift_element(std::int64_t m) const;
  GroupElement embed(const ModuleElement &k) const;
  GroupElement make(std::int64_t m, const ModuleElement &k) const;

  GroupElement multiply(const GroupElement &g1, const GroupElement &g2) const;
  GroupElement inverse(const GroupElement &g) const;
  GroupElement power(const GroupElement &g, std::int64_t e) const;
  WordEvaluation word_evaluate(std::span<const GroupElement> letters) const;

  /// Canonical byte encoding: equal elements give equal bytes and
  /// decode(encode(g)) == g. The layout is documented in README.md.
  std::string encode(const GroupElement &g) const;
  GroupElement decode(std::string_view bytes) const;

  /// Text forms. Module elements: lamplighter "e^c+e^c" or "0", z16 "p/q",
  /// sol "x,y". Group elements: "m:k".
  std::string format(const ModuleElement &k) const;
  std::string format(const GroupElement &g) const;
  ModuleElement parse_module(std::string_view text) const;
  GroupElement parse_element(std::string_view text) const;

  /// Random module element per family; `spread` bounds the support window
  /// (lamplighter), the numerator (z16) or the coordinates (sol). For z16
  /// the denominator is 2^a 3^b with a, b <= max_pow.
  ModuleElement random_module(std::mt19937_64 &rng, std::int64_t spread,
                              unsigned max_pow = 8) const;
  GroupElement random_element(std::mt19937_64 &rng, std::int64_t spread,
                              std::int64_t shift_spread) const;

  friend bool operator==(const Group &, const Group &) = default;

private:
  Group(Family f, std::uint32_t q, Matrix2 m);
  void check(const ModuleElement &k) const;

  Family family_;
  std::uint32_t q_ = 0;
  Matrix2 m_{};
  Matrix2 m_inv_{};
};

} // namespace solgeom
