// The Z[1/6] good generating set A = {0, 1, -1} and windowed base-3/2
// expansions with digits in A.
//
// For k with I1(k) = -v2(k) and I2(k) = -v3(k), pick lo = min(-I2(k), 0) and
// hi >= max(I1(k), 0). Then N = 2^hi 3^-lo k is an integer (this is where the
// coprimality of 2 and 3 enters) and
//
//   k = sum_{i=lo}^{hi} a_i (3/2)^i   <=>   N = sum_i a_i 3^{i-lo} 2^{hi-i}.
//
// Reading the right-hand side mod 3 fixes a_lo (2 = -1 mod 3); subtract,
// divide by 3 and repeat up the chain. What survives at index hi is
// k (2/3)^hi - sum_{i<hi} a_i (2/3)^{hi-i}, of absolute value below
// |k| (2/3)^hi + 2, and becomes a_hi plus leftover copies of (hi, +-1).

#include <algorithm>
#include <cmath>

#include "solgeom/probes.hpp"

namespace solgeom {

namespace {

// k / p^i has no p in its reduced denominator
bool divisible_in_lattice(const mpq_class &k, unsigned long p, long i) {
  mpq_class x = k;
  BigInt pw;
  mpz_ui_pow_ui(pw.get_mpz_t(), p, static_cast<unsigned long>(i >= 0 ? i : -i));
  if (i >= 0)
    x /= mpq_class(pw);
  else
    x *= mpq_class(pw);
  x.canonicalize();
  return !mpz_divisible_ui_p(x.get_den_mpz_t(), p);
}

long chain_max_index(const SixthRational &k, unsigned long p) {
  if (k.is_zero())
    throw std::domain_error("lattice valuation of zero");
  const mpq_class q = k.to_mpq();
  long i = 0;
  while (!divisible_in_lattice(q, p, i))
    --i;
  while (divisible_in_lattice(q, p, i + 1))
    ++i;
  return i;
}

// |k| <= (3/2)^i
bool within_scaled_cube(const mpq_class &abs_k, long i) {
  BigInt lhs = abs_k.get_num();
  BigInt rhs = abs_k.get_den();
  const auto e = static_cast<mp_bitcnt_t>(i >= 0 ? i : -i);
  BigInt p3;
  mpz_ui_pow_ui(p3.get_mpz_t(), 3, e);
  if (i >= 0) {
    mpz_mul_2exp(lhs.get_mpz_t(), lhs.get_mpz_t(), e);
    rhs *= p3;
  } else {
    lhs *= p3;
    mpz_mul_2exp(rhs.get_mpz_t(), rhs.get_mpz_t(), e);
  }
  return lhs <= rhs;
}

int residue_digit(const BigInt &N, long power_of_two) {
  // N * 2^-e = N * (-1)^e (mod 3), mapped into {-1, 0, 1}
  long r = static_cast<long>(mpz_fdiv_ui(N.get_mpz_t(), 3));
  if (power_of_two % 2 != 0)
    r = (3 - r) % 3;
  return r == 2 ? -1 : static_cast<int>(r);
}

struct Expansion {
  std::map<long, int> digits;
  long top = 0;
  BigInt surplus; // value left at index `top`
};

Expansion expand(const SixthRational &k, long lo, long hi) {
  Expansion ex;
  ex.top = hi;
  mpq_class scaled = k.to_mpq();
  BigInt p2, p3;
  mpz_ui_pow_ui(p3.get_mpz_t(), 3, static_cast<unsigned long>(-lo));
  mpz_ui_pow_ui(p2.get_mpz_t(), 2, static_cast<unsigned long>(hi));
  scaled *= mpq_class(p2 * p3);
  scaled.canonicalize();
  if (scaled.get_den() != 1)
    throw std::logic_error("scaled element is not in L");
  BigInt N = scaled.get_num();
  for (long i = lo; i < hi; ++i) {
    const long e = hi - i;
    const int a = residue_digit(N, e);
    if (a != 0) {
      BigInt term;
      mpz_ui_pow_ui(term.get_mpz_t(), 2, static_cast<unsigned long>(e));
      N -= a * term;
      ex.digits[i] = a;
    }
    mpz_divexact_ui(N.get_mpz_t(), N.get_mpz_t(), 3);
  }
  ex.surplus = N;
  return ex;
}

} // namespace

long chain_I1(const LatticeChain &chain, const SixthRational &k) {
  return -chain_max_index(k, static_cast<unsigned long>(chain.P));
}

long chain_I2(const LatticeChain &chain, const SixthRational &k) {
  return -chain_max_index(k, static_cast<unsigned long>(chain.Q));
}

long chain_I1_prime(const LatticeChain &, const SixthRational &k) {
  if (k.is_zero())
    throw std::domain_error("I1' of zero");
  mpq_class a = abs(k.to_mpq());
  const double approx =
      (std::log(mpz_get_d(a.get_num_mpz_t())) - std::log(mpz_get_d(a.get_den_mpz_t()))) /
      std::log(1.5);
  long i = static_cast<long>(std::ceil(approx));
  while (!within_scaled_cube(a, i))
    ++i;
  while (within_scaled_cube(a, i - 1))
    --i;
  return i;
}

namespace {

ValuationFn lift(long (*fn)(const LatticeChain &, const SixthRational &), LatticeChain chain) {
  return [fn, chain](const ModuleElement &k) -> ExtendedReal {
    const auto &r = std::get<SixthRational>(k);
    if (r.is_zero())
      return ExtendedReal::bottom();
    return static_cast<double>(fn(chain, r));
  };
}

} // namespace

namespace {

std::pair<GoodGenSet, LatticeChain> build_good_gen_set() {
  LatticeChain chain;
  GoodGenSet ggs;
  ggs.A = {SixthRational(0), SixthRational(1), SixthRational(-1)};

  ggs.primary.name = "z16-chain";
  ggs.primary.C = 0;
  ggs.primary.b = {1.0};
  ggs.primary.eval1 = lift(&chain_I1, chain);
  ggs.primary.eval2 = lift(&chain_I2, chain);

  // |k1 + k2| <= 2 max |k_i| <= (3/2)^2 max |k_i|
  const double lambda = 1.5;
  ggs.auxiliary.name = "z16-cube";
  ggs.auxiliary.C = std::floor(std::log(2.0) / std::log(lambda)) + 1;
  ggs.auxiliary.b = {1.0};
  ggs.auxiliary.eval1 = lift(&chain_I1_prime, chain);
  ggs.auxiliary.eval2 = lift(&chain_I2, chain);

  ggs.M = 0;
  for (const auto &a : ggs.A) {
    if (std::get<SixthRational>(a).is_zero())
      continue;
    for (const ValuationPair *vp : {&ggs.primary, &ggs.auxiliary})
      for (const ValuationFn *f : {&vp->eval1, &vp->eval2})
        ggs.M = std::max(ggs.M, std::fabs((*f)(a).value()));
  }
  ggs.C = std::max(ggs.primary.C, ggs.auxiliary.C);
  ggs.F = 2 * ggs.M + 4 * ggs.C;
  ggs.Fprime = fit_Fprime(ggs, chain, kFprimeFitSamples, kFprimeFitSeed);
  return {std::move(ggs), chain};
}

} // namespace

std::pair<GoodGenSet, LatticeChain> good_gen_set_z16() {
  static const std::pair<GoodGenSet, LatticeChain> cached = build_good_gen_set();
  return cached;
}

GenSet good_genset_letters(const Group &group, const GoodGenSet &ggs) {
  if (group.family() != Family::Z16)
    throw FamilyMismatch("the good generating set lives in the z16 group");
  const GroupElement t = group.shift_element(1);
  std::vector<GroupElement> letters;
  std::vector<std::string> names;
  for (const auto &a : ggs.A) {
    for (const auto &a2 : ggs.A) {
      letters.push_back(group.multiply(group.multiply(group.embed(a), t), group.embed(a2)));
      names.push_back("[" + group.format(a) + "]t[" + group.format(a2) + "]");
    }
  }
  for (const auto &a : ggs.A) {
    letters.push_back(group.embed(a));
    names.push_back("[" + group.format(a) + "]");
  }
  return make_genset(group, std::move(letters), std::move(names), ggs.primary.b);
}

bool in_fuzz_box(const GoodGenSet &ggs, const LatticeChain &chain, const SixthRational &k) {
  if (k.is_zero())
    return false;
  const double i1 = static_cast<double>(chain_I1(chain, k));
  const double i2 = static_cast<double>(chain_I2(chain, k));
  return static_cast<double>(chain_I1_prime(chain, k)) <= i1 + ggs.F &&
         ggs.auxiliary.eval2(k).value() <= i2 + ggs.F;
}

SixthRational random_fuzz_box_element(const GoodGenSet &ggs, const LatticeChain &chain,
                                      std::mt19937_64 &rng) {
  // k = u 2^e2 3^e3 with u prime to 6; the box |k| <= (3/2)^(F - e2) becomes
  // |u| <= 3^(F - e2 - e3) / 2^F
  const long F = static_cast<long>(std::floor(ggs.F));
  std::uniform_int_distribution<long> exp_dist(-F, F);
  std::bernoulli_distribution neg(0.5);
  for (;;) {
    const long e2 = exp_dist(rng);
    const long e3 = exp_dist(rng);
    const long e = F - e2 - e3;
    if (e < 0)
      continue;
    BigInt bound;
    mpz_ui_pow_ui(bound.get_mpz_t(), 3, static_cast<unsigned long>(e));
    mpz_fdiv_q_2exp(bound.get_mpz_t(), bound.get_mpz_t(), static_cast<mp_bitcnt_t>(F));
    if (bound < 1)
      continue;
    std::uniform_int_distribution<unsigned long> u_dist(1, bound.get_ui());
    const unsigned long u = u_dist(rng);
    if (u % 2 == 0 || u % 3 == 0)
      continue;
    BigInt num(u);
    if (e2 > 0)
      mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), static_cast<mp_bitcnt_t>(e2));
    if (e3 > 0) {
      BigInt p3;
      mpz_ui_pow_ui(p3.get_mpz_t(), 3, static_cast<unsigned long>(e3));
      num *= p3;
    }
    SixthRational k(std::move(num), e2 < 0 ? static_cast<unsigned>(-e2) : 0,
                    e3 < 0 ? static_cast<unsigned>(-e3) : 0);
    if (neg(rng))
      k = -k;
    if (in_fuzz_box(ggs, chain, k))
      return k;
  }
}

SixthRational evaluate(const Decomposition &d) {
  SixthRational sum;
  for (const auto &[i, a] : d.digits)
    sum = sum + SixthRational(a).scaled(i);
  for (const auto &[i, a] : d.leftover)
    sum = sum + SixthRational(a).scaled(i);
  return sum;
}

Decomposition decompose_within(const GoodGenSet &ggs, const LatticeChain &chain,
                               const SixthRational &k, int max_Fprime) {
  if (k.is_zero())
    throw std::invalid_argument("decompose: k must be nonzero");
  if (!in_fuzz_box(ggs, chain, k))
    throw std::invalid_argument("decompose: k is outside the fuzz box " + k.to_string());
  const long i1 = chain_I1(chain, k);
  const long i2 = chain_I2(chain, k);
  const long lo = std::min(-i2, 0L);
  const long base_hi = std::max(i1, 0L);

  std::optional<Decomposition> best;
  for (int ext = 0; ext <= max_Fprime; ++ext) {
    if (best && ext >= best->needed_Fprime)
      break;
    Expansion ex = expand(k, lo, base_hi + ext);
    Decomposition d;
    d.digits = std::move(ex.digits);
    d.window_lo = lo;
    d.window_hi = ex.top;
    const int sign = sgn(ex.surplus);
    const BigInt mag = abs(ex.surplus);
    if (mag > max_Fprime + 1)
      continue;
    const int count = static_cast<int>(mag.get_si());
    if (count > 0)
      d.digits[ex.top] = sign;
    for (int j = 1; j < count; ++j)
      d.leftover.emplace_back(ex.top, sign);
    d.needed_Fprime = std::max(ext, static_cast<int>(d.leftover.size()));
    if (!best || d.needed_Fprime < best->needed_Fprime)
      best = std::move(d);
  }
  if (!best || best->needed_Fprime > max_Fprime)
    throw DecompositionError("no expansion of " + k.to_string() + " within F' = " +
                             std::to_string(max_Fprime));

  // re-verify: identity, digit set and windows
  const Decomposition &d = *best;
  if (!(evaluate(d) == k))
    throw DecompositionError("expansion of " + k.to_string() + " does not re-evaluate to it");
  const long wlo = lo - max_Fprime;
  const long whi = base_hi + max_Fprime;
  auto inside = [&](long i, int a) { return i >= wlo && i <= whi && (a == 1 || a == -1); };
  for (const auto &[i, a] : d.digits)
    if (!inside(i, a))
      throw DecompositionError("digit outside window or digit set");
  for (const auto &[i, a] : d.leftover)
    if (!inside(i, a))
      throw DecompositionError("leftover term outside window or digit set");
  if (static_cast<int>(d.leftover.size()) > max_Fprime)
    throw DecompositionError("too many leftover terms");
  return d;
}

Decomposition decompose(const GoodGenSet &ggs, const LatticeChain &chain, const SixthRational &k) {
  return decompose_within(ggs, chain, k, ggs.Fprime);
}

int fit_Fprime(const GoodGenSet &ggs, const LatticeChain &chain, std::size_t samples,
               std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  int worst = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const SixthRational k = random_fuzz_box_element(ggs, chain, rng);
    worst = std::max(worst, decompose_within(ggs, chain, k, 64).needed_Fprime);
  }
  return worst;
}

} // namespace solgeom
