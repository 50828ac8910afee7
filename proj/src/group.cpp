#include "solgeom/group.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace solgeom {

// ---------------------------------------------------------------- ShiftVector

ShiftVector::ShiftVector(std::initializer_list<std::int64_t> values)
    : rank_(check_rank(values.size())) {
  std::copy(values.begin(), values.end(), v_.begin());
}

std::size_t ShiftVector::check_rank(std::size_t rank) {
  if (rank > kMaxRank)
    throw std::invalid_argument("shift rank exceeds kMaxRank");
  return rank;
}

bool ShiftVector::is_zero() const {
  return std::all_of(v_.begin(), v_.begin() + rank_, [](auto x) { return x == 0; });
}

ShiftVector ShiftVector::operator+(const ShiftVector &o) const {
  if (rank_ != o.rank_)
    throw std::invalid_argument("shift rank mismatch");
  ShiftVector r(rank_);
  for (std::size_t i = 0; i < rank_; ++i)
    r.v_[i] = v_[i] + o.v_[i];
  return r;
}

ShiftVector ShiftVector::operator-(const ShiftVector &o) const { return *this + (-o); }

ShiftVector ShiftVector::operator-() const {
  ShiftVector r(rank_);
  for (std::size_t i = 0; i < rank_; ++i)
    r.v_[i] = -v_[i];
  return r;
}

// ---------------------------------------------------------------- LaurentPoly

LaurentPoly::LaurentPoly(std::uint32_t modulus) : q_(modulus) {
  if (modulus < 2)
    throw std::invalid_argument("lamplighter modulus must be >= 2");
}

LaurentPoly::LaurentPoly(std::uint32_t modulus,
                         std::vector<std::pair<std::int64_t, std::int64_t>> terms)
    : LaurentPoly(modulus) {
  std::sort(terms.begin(), terms.end(),
            [](const auto &x, const auto &y) { return x.first < y.first; });
  const auto q = static_cast<std::int64_t>(q_);
  for (std::size_t i = 0; i < terms.size();) {
    std::int64_t e = terms[i].first;
    std::int64_t c = 0;
    for (; i < terms.size() && terms[i].first == e; ++i)
      c = (c + terms[i].second % q) % q;
    c = (c + q) % q;
    if (c != 0)
      terms_.emplace_back(e, static_cast<std::uint32_t>(c));
  }
}

LaurentPoly LaurentPoly::monomial(std::uint32_t modulus, std::int64_t exponent,
                                  std::int64_t coefficient) {
  return LaurentPoly(modulus, {{exponent, coefficient}});
}

LaurentPoly LaurentPoly::shifted(std::int64_t by) const {
  LaurentPoly r = *this;
  for (auto &t : r.terms_)
    t.first += by;
  return r;
}

LaurentPoly LaurentPoly::operator+(const LaurentPoly &o) const {
  if (q_ != o.q_)
    throw FamilyMismatch("lamplighter moduli differ");
  LaurentPoly r(q_);
  r.terms_.reserve(terms_.size() + o.terms_.size());
  auto i = terms_.begin();
  auto j = o.terms_.begin();
  while (i != terms_.end() || j != o.terms_.end()) {
    if (j == o.terms_.end() || (i != terms_.end() && i->first < j->first)) {
      r.terms_.push_back(*i++);
    } else if (i == terms_.end() || j->first < i->first) {
      r.terms_.push_back(*j++);
    } else {
      auto c = static_cast<std::uint32_t>((std::uint64_t{i->second} + j->second) % q_);
      if (c != 0)
        r.terms_.emplace_back(i->first, c);
      ++i;
      ++j;
    }
  }
  return r;
}

LaurentPoly LaurentPoly::operator-() const {
  LaurentPoly r = *this;
  for (auto &t : r.terms_)
    t.second = q_ - t.second;
  return r;
}

// -------------------------------------------------------------- SixthRational

SixthRational::SixthRational(BigInt num, unsigned pow2, unsigned pow3)
    : num_(std::move(num)), a_(pow2), b_(pow3) {
  normalize();
}

void SixthRational::normalize() {
  if (sgn(num_) == 0) {
    a_ = b_ = 0;
    return;
  }
  if (a_ > 0) {
    auto tz = static_cast<unsigned>(mpz_scan1(num_.get_mpz_t(), 0));
    auto k = std::min(tz, a_);
    if (k > 0) {
      mpz_tdiv_q_2exp(num_.get_mpz_t(), num_.get_mpz_t(), k);
      a_ -= k;
    }
  }
  while (b_ > 0 && mpz_divisible_ui_p(num_.get_mpz_t(), 3)) {
    mpz_divexact_ui(num_.get_mpz_t(), num_.get_mpz_t(), 3);
    --b_;
  }
}

SixthRational SixthRational::parse(std::string_view text) {
  mpq_class q;
  if (q.set_str(std::string(text), 10) != 0)
    throw std::invalid_argument("bad rational: " + std::string(text));
  q.canonicalize();
  BigInt den = q.get_den();
  unsigned a = static_cast<unsigned>(mpz_remove(den.get_mpz_t(), den.get_mpz_t(),
                                                BigInt(2).get_mpz_t()));
  unsigned b = static_cast<unsigned>(mpz_remove(den.get_mpz_t(), den.get_mpz_t(),
                                                BigInt(3).get_mpz_t()));
  if (den != 1)
    throw std::invalid_argument("denominator not of the form 2^a 3^b: " + std::string(text));
  return SixthRational(q.get_num(), a, b);
}

BigInt SixthRational::denominator() const {
  BigInt d;
  mpz_ui_pow_ui(d.get_mpz_t(), 3, b_);
  mpz_mul_2exp(d.get_mpz_t(), d.get_mpz_t(), a_);
  return d;
}

long SixthRational::valuation(unsigned p) const {
  if (is_zero())
    throw std::domain_error("valuation of zero");
  if (p == 2) {
    if (a_ > 0)
      return -static_cast<long>(a_);
    return static_cast<long>(mpz_scan1(num_.get_mpz_t(), 0));
  }
  if (p == 3) {
    if (b_ > 0)
      return -static_cast<long>(b_);
    BigInt tmp;
    return static_cast<long>(mpz_remove(tmp.get_mpz_t(), num_.get_mpz_t(), BigInt(3).get_mpz_t()));
  }
  throw std::invalid_argument("valuation only defined for p in {2,3}");
}

SixthRational SixthRational::scaled(std::int64_t m) const {
  if (m == 0 || is_zero())
    return *this;
  SixthRational r = *this;
  auto up = static_cast<unsigned>(m > 0 ? m : -m);
  BigInt p;
  if (m > 0) {
    // * 3^m / 2^m
    if (r.b_ >= up) {
      r.b_ -= up;
    } else {
      mpz_ui_pow_ui(p.get_mpz_t(), 3, up - r.b_);
      r.num_ *= p;
      r.b_ = 0;
    }
    r.a_ += up;
  } else {
    // * 2^|m| / 3^|m|
    if (r.a_ >= up) {
      r.a_ -= up;
    } else {
      mpz_mul_2exp(r.num_.get_mpz_t(), r.num_.get_mpz_t(), up - r.a_);
      r.a_ = 0;
    }
    r.b_ += up;
  }
  r.normalize();
  return r;
}

SixthRational SixthRational::operator+(const SixthRational &o) const {
  if (is_zero())
    return o;
  if (o.is_zero())
    return *this;
  const unsigned a = std::max(a_, o.a_);
  const unsigned b = std::max(b_, o.b_);
  auto lift = [&](const SixthRational &x) {
    BigInt n = x.num_;
    if (a > x.a_)
      mpz_mul_2exp(n.get_mpz_t(), n.get_mpz_t(), a - x.a_);
    if (b > x.b_) {
      BigInt p;
      mpz_ui_pow_ui(p.get_mpz_t(), 3, b - x.b_);
      n *= p;
    }
    return n;
  };
  return SixthRational(lift(*this) + lift(o), a, b);
}

SixthRational SixthRational::operator-() const {
  SixthRational r = *this;
  r.num_ = -r.num_;
  return r;
}

mpq_class SixthRational::to_mpq() const {
  mpq_class q(num_, denominator());
  q.canonicalize();
  return q;
}

std::string SixthRational::to_string() const { return to_mpq().get_str(); }

// ---------------------------------------------------------------- helpers

std::string_view family_name(Family f) {
  switch (f) {
  case Family::Lamplighter:
    return "lamplighter";
  case Family::Z16:
    return "z16";
  case Family::Sol:
    return "sol";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  if (name == "lamplighter")
    return Family::Lamplighter;
  if (name == "z16")
    return Family::Z16;
  if (name == "sol")
    return Family::Sol;
  throw std::invalid_argument("unknown family: " + std::string(name));
}

namespace {

void put_varint(std::string &out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<char>((v & 0x7f) | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<char>(v));
}

std::uint64_t zigzag(std::int64_t v) {
  return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}

std::int64_t unzigzag(std::uint64_t v) {
  return static_cast<std::int64_t>(v >> 1) ^ -static_cast<std::int64_t>(v & 1);
}

void put_bigint(std::string &out, const BigInt &v) {
  const int s = sgn(v);
  out.push_back(static_cast<char>(s == 0 ? 0 : (s > 0 ? 1 : 2)));
  if (s == 0)
    return;
  std::size_t count = 0;
  const std::size_t n = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
  std::string buf(n, '\0');
  mpz_export(buf.data(), &count, 1, 1, 1, 0, v.get_mpz_t());
  buf.resize(count);
  put_varint(out, count);
  out += buf;
}

class Reader {
public:
  explicit Reader(std::string_view bytes) : s_(bytes) {}

  std::uint8_t byte() {
    if (pos_ >= s_.size())
      throw std::invalid_argument("truncated element encoding");
    return static_cast<std::uint8_t>(s_[pos_++]);
  }

  std::uint64_t varint() {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      std::uint8_t b = byte();
      v |= std::uint64_t{b & 0x7fu} << shift;
      if (!(b & 0x80))
        return v;
    }
    throw std::invalid_argument("overlong varint");
  }

  BigInt bigint() {
    std::uint8_t s = byte();
    if (s == 0)
      return 0;
    if (s > 2)
      throw std::invalid_argument("bad sign byte");
    std::size_t n = varint();
    if (n == 0 || pos_ + n > s_.size() || s_[pos_] == '\0')
      throw std::invalid_argument("bad bigint magnitude");
    BigInt v;
    mpz_import(v.get_mpz_t(), n, 1, 1, 1, 0, s_.data() + pos_);
    pos_ += n;
    return s == 2 ? BigInt(-v) : v;
  }

  bool done() const { return pos_ == s_.size(); }

private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

BigInt random_bigint(std::mt19937_64 &rng, std::int64_t spread) {
  std::uniform_int_distribution<std::int64_t> dist(-spread, spread);
  return BigInt(static_cast<long>(dist(rng)));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::int64_t parse_int(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+')
    s.remove_prefix(1);
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::invalid_argument("bad integer: " + std::string(s));
  return v;
}

} // namespace

// ---------------------------------------------------------------- Group

Group::Group(Family f, std::uint32_t q, Matrix2 m) : family_(f), q_(q), m_(m) {
  if (f == Family::Lamplighter && q < 2)
    throw std::invalid_argument("lamplighter modulus must be >= 2");
  if (f == Family::Sol) {
    const auto det = m.det();
    if (det != 1 && det != -1)
      throw std::invalid_argument("sol matrix must have determinant +-1");
    const auto tr = m.trace() < 0 ? -m.trace() : m.trace();
    if (tr <= det + 1) // eigenvalues off the unit circle
      throw std::invalid_argument("sol matrix is not hyperbolic");
    m_inv_ = Matrix2{det * m.d, -det * m.b, -det * m.c, det * m.a};
  }
}

Group Group::lamplighter(std::uint32_t q) { return Group(Family::Lamplighter, q, {}); }
Group Group::z16() { return Group(Family::Z16, 0, {}); }
Group Group::sol(Matrix2 m) { return Group(Family::Sol, 0, m); }

std::string Group::description() const {
  std::ostringstream os;
  os << family_name(family_);
  if (family_ == Family::Lamplighter)
    os << '-' << q_;
  if (family_ == Family::Sol)
    os << '[' << m_.a << ',' << m_.b << ',' << m_.c << ',' << m_.d << ']';
  return os.str();
}

void Group::check(const ModuleElement &k) const {
  bool ok = false;
  switch (family_) {
  case Family::Lamplighter:
    ok = std::holds_alternative<LaurentPoly>(k) && std::get<LaurentPoly>(k).modulus() == q_;
    break;
  case Family::Z16:
    ok = std::holds_alternative<SixthRational>(k);
    break;
  case Family::Sol:
    ok = std::holds_alternative<LatticeVec>(k);
    break;
  }
  if (!ok)
    throw FamilyMismatch("module element does not belong to " + description());
}

ModuleElement Group::zero() const {
  switch (family_) {
  case Family::Lamplighter:
    return LaurentPoly(q_);
  case Family::Z16:
    return SixthRational();
  case Family::Sol:
    return LatticeVec{};
  }
  throw std::logic_error("unreachable");
}

ModuleElement Group::one() const {
  switch (family_) {
  case Family::Lamplighter:
    return LaurentPoly::monomial(q_, 0);
  case Family::Z16:
    return SixthRational(1);
  case Family::Sol:
    return LatticeVec{1, 0};
  }
  throw std::logic_error("unreachable");
}

bool Group::is_zero(const ModuleElement &k) const {
  return std::visit([](const auto &v) { return v.is_zero(); }, k);
}

ModuleElement Group::add(const ModuleElement &x, const ModuleElement &y) const {
  check(x);
  check(y);
  return std::visit(
      [&](const auto &u) -> ModuleElement {
        using T = std::decay_t<decltype(u)>;
        return u + std::get<T>(y);
      },
      x);
}

ModuleElement Group::negate(const ModuleElement &k) const {
  check(k);
  return std::visit([](const auto &u) -> ModuleElement { return -u; }, k);
}

ModuleElement Group::act(const ShiftVector &m, const ModuleElement &k) const {
  check(k);
  if (m.rank() != rank())
    throw std::invalid_argument("shift rank does not match group rank");
  const std::int64_t e = m[0];
  if (e == 0)
    return k;
  switch (family_) {
  case Family::Lamplighter:
    return std::get<LaurentPoly>(k).shifted(e);
  case Family::Z16:
    return std::get<SixthRational>(k).scaled(e);
  case Family::Sol: {
    const Matrix2 &mat = e > 0 ? m_ : m_inv_;
    LatticeVec v = std::get<LatticeVec>(k);
    for (std::int64_t i = 0, n = e > 0 ? e : -e; i < n; ++i) {
      BigInt x = mat.a * v.x + mat.b * v.y;
      BigInt y = mat.c * v.x + mat.d * v.y;
      v.x = std::move(x);
      v.y = std::move(y);
    }
    return v;
  }
  }
  throw std::logic_error("unreachable");
}

GroupElement Group::identity() const { return {ShiftVector::scalar(0), zero()}; }

GroupElement Group::shift_element(std::int64_t m) const { return {ShiftVector::scalar(m), zero()}; }

GroupElement Group::embed(const ModuleElement &k) const {
  check(k);
  return {ShiftVector::scalar(0), k};
}

GroupElement Group::make(std::int64_t m, const ModuleElement &k) const {
  check(k);
  return {ShiftVector::scalar(m), k};
}

GroupElement Group::multiply(const GroupElement &g1, const GroupElement &g2) const {
  return {g1.shift + g2.shift, add(act(g2.shift, g1.base), g2.base)};
}

GroupElement Group::inverse(const GroupElement &g) const {
  return {-g.shift, negate(act(-g.shift, g.base))};
}

GroupElement Group::power(const GroupElement &g, std::int64_t e) const {
  GroupElement base = e < 0 ? inverse(g) : g;
  GroupElement r = identity();
  for (std::int64_t n = e < 0 ? -e : e; n > 0; n >>= 1) {
    if (n & 1)
      r = multiply(r, base);
    if (n > 1)
      base = multiply(base, base);
  }
  return r;
}

WordEvaluation Group::word_evaluate(std::span<const GroupElement> letters) const {
  WordEvaluation out{identity(), std::vector<ShiftVector>(letters.size())};
  ShiftVector suffix = ShiftVector::scalar(0);
  for (std::size_t i = letters.size(); i-- > 0;) {
    out.suffix_shifts[i] = suffix;
    suffix += letters[i].shift;
  }
  for (const auto &l : letters)
    out.value = multiply(out.value, l);
  return out;
}

std::string Group::encode(const GroupElement &g) const {
  check(g.base);
  std::string out;
  out.reserve(16);
  out.push_back(static_cast<char>(family_));
  out.push_back(static_cast<char>(g.shift.rank()));
  for (auto v : g.shift.values())
    put_varint(out, zigzag(v));
  switch (family_) {
  case Family::Lamplighter: {
    const auto &p = std::get<LaurentPoly>(g.base);
    put_varint(out, p.terms().size());
    for (const auto &[e, c] : p.terms()) {
      put_varint(out, zigzag(e));
      put_varint(out, c);
    }
    break;
  }
  case Family::Z16: {
    const auto &r = std::get<SixthRational>(g.base);
    put_varint(out, r.pow2());
    put_varint(out, r.pow3());
    put_bigint(out, r.numerator());
    break;
  }
  case Family::Sol: {
    const auto &v = std::get<LatticeVec>(g.base);
    put_bigint(out, v.x);
    put_bigint(out, v.y);
    break;
  }
  }
  return out;
}

GroupElement Group::decode(std::string_view bytes) const {
  Reader r(bytes);
  if (r.byte() != static_cast<std::uint8_t>(family_))
    throw FamilyMismatch("encoded element belongs to a different family");
  const std::size_t rank = r.byte();
  if (rank != this->rank())
    throw std::invalid_argument("encoded shift rank mismatch");
  GroupElement g{ShiftVector(rank), zero()};
  for (std::size_t i = 0; i < rank; ++i)
    g.shift[i] = unzigzag(r.varint());
  switch (family_) {
  case Family::Lamplighter: {
    std::vector<std::pair<std::int64_t, std::int64_t>> terms(r.varint());
    for (auto &[e, c] : terms) {
      e = unzigzag(r.varint());
      c = static_cast<std::int64_t>(r.varint());
      if (c <= 0 || c >= static_cast<std::int64_t>(q_))
        throw std::invalid_argument("non-canonical lamplighter coefficient");
    }
    LaurentPoly p(q_, terms);
    if (p.terms().size() != terms.size())
      throw std::invalid_argument("non-canonical lamplighter terms");
    g.base = std::move(p);
    break;
  }
  case Family::Z16: {
    auto a = static_cast<unsigned>(r.varint());
    auto b = static_cast<unsigned>(r.varint());
    SixthRational v(r.bigint(), a, b);
    if (v.pow2() != a || v.pow3() != b)
      throw std::invalid_argument("non-canonical z16 rational");
    g.base = std::move(v);
    break;
  }
  case Family::Sol: {
    BigInt x = r.bigint();
    BigInt y = r.bigint();
    g.base = LatticeVec{std::move(x), std::move(y)};
    break;
  }
  }
  if (!r.done())
    throw std::invalid_argument("trailing bytes in element encoding");
  return g;
}

std::string Group::format(const ModuleElement &k) const {
  check(k);
  std::ostringstream os;
  switch (family_) {
  case Family::Lamplighter: {
    const auto &p = std::get<LaurentPoly>(k);
    if (p.is_zero())
      return "0";
    bool first = true;
    for (const auto &[e, c] : p.terms()) {
      if (!first)
        os << '+';
      os << e << '^' << c;
      first = false;
    }
    break;
  }
  case Family::Z16:
    os << std::get<SixthRational>(k).to_string();
    break;
  case Family::Sol: {
    const auto &v = std::get<LatticeVec>(k);
    os << v.x.get_str() << ',' << v.y.get_str();
    break;
  }
  }
  return os.str();
}

std::string Group::format(const GroupElement &g) const {
  return std::to_string(g.shift[0]) + ":" + format(g.base);
}

ModuleElement Group::parse_module(std::string_view text) const {
  text = trim(text);
  switch (family_) {
  case Family::Lamplighter: {
    if (text == "0")
      return LaurentPoly(q_);
    std::vector<std::pair<std::int64_t, std::int64_t>> terms;
    while (!text.empty()) {
      auto plus = text.find('+', 1);
      auto term = text.substr(0, plus);
      auto caret = term.find('^');
      if (caret == std::string_view::npos)
        throw std::invalid_argument("lamplighter term must be exponent^coefficient");
      terms.emplace_back(parse_int(term.substr(0, caret)), parse_int(term.substr(caret + 1)));
      text = plus == std::string_view::npos ? std::string_view{} : text.substr(plus + 1);
    }
    return LaurentPoly(q_, terms);
  }
  case Family::Z16:
    return SixthRational::parse(text);
  case Family::Sol: {
    auto comma = text.find(',');
    if (comma == std::string_view::npos)
      throw std::invalid_argument("sol element must be x,y");
    BigInt x, y;
    if (x.set_str(std::string(trim(text.substr(0, comma))), 10) != 0 ||
        y.set_str(std::string(trim(text.substr(comma + 1))), 10) != 0)
      throw std::invalid_argument("bad sol element: " + std::string(text));
    return LatticeVec{x, y};
  }
  }
  throw std::logic_error("unreachable");
}

GroupElement Group::parse_element(std::string_view text) const {
  auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw std::invalid_argument("group element must be shift:module, got " + std::string(text));
  return make(parse_int(text.substr(0, colon)), parse_module(text.substr(colon + 1)));
}

ModuleElement Group::random_module(std::mt19937_64 &rng, std::int64_t spread,
                                   unsigned max_pow) const {
  switch (family_) {
  case Family::Lamplighter: {
    std::uniform_int_distribution<std::int64_t> coeff(0, q_ - 1);
    std::vector<std::pair<std::int64_t, std::int64_t>> terms;
    for (std::int64_t e = -spread; e <= spread; ++e)
      terms.emplace_back(e, coeff(rng));
    return LaurentPoly(q_, terms);
  }
  case Family::Z16: {
    std::uniform_int_distribution<unsigned> pw(0, max_pow);
    BigInt num = random_bigint(rng, spread);
    unsigned a = pw(rng);
    unsigned b = pw(rng);
    return SixthRational(num, a, b);
  }
  case Family::Sol: {
    BigInt x = random_bigint(rng, spread);
    BigInt y = random_bigint(rng, spread);
    return LatticeVec{x, y};
  }
  }
  throw std::logic_error("unreachable");
}

GroupElement Group::random_element(std::mt19937_64 &rng, std::int64_t spread,
                                   std::int64_t shift_spread) const {
  std::uniform_int_distribution<std::int64_t> sh(-shift_spread, shift_spread);
  std::int64_t m = sh(rng);
  return make(m, random_module(rng, spread));
}

} // namespace solgeom
