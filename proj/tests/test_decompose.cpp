#include "doctest.h"

#include "gen.hpp"
#include "oracles.hpp"
#include "solgeom/probes.hpp"

using namespace solgeom;

namespace {

const std::pair<GoodGenSet, LatticeChain> &good() {
  static const auto g = good_gen_set_z16();
  return g;
}

// min{i : |k| <= (3/2)^i} by scanning with rationals
long scan_I1_prime(const mpq_class &k) {
  const mpq_class a = abs(k);
  long i = -200;
  mpq_class p = 1;
  for (long j = 0; j < 200; ++j)
    p *= mpq_class(2, 3);
  while (a > p) {
    p *= mpq_class(3, 2);
    ++i;
  }
  return i;
}

void check_decomposition(const SixthRational &k, const Decomposition &d, int Fprime) {
  const auto &[ggs, chain] = good();
  REQUIRE(evaluate(d) == k);
  // independent re-evaluation
  mpq_class sum = 0;
  auto add = [&](long i, int a) {
    mpq_class p = 1;
    for (long j = 0; j < std::labs(i); ++j)
      p *= i > 0 ? mpq_class(3, 2) : mpq_class(2, 3);
    sum += a * p;
  };
  for (auto [i, a] : d.digits)
    add(i, a);
  for (auto [i, a] : d.leftover)
    add(i, a);
  sum.canonicalize();
  REQUIRE(sum == k.to_mpq());
  const long lo = std::min(-chain_I2(chain, k), 0L) - Fprime;
  const long hi = std::max(chain_I1(chain, k), 0L) + Fprime;
  for (auto [i, a] : d.digits) {
    REQUIRE(i >= lo);
    REQUIRE(i <= hi);
    REQUIRE((a == 1 || a == -1));
  }
  for (auto [i, a] : d.leftover) {
    REQUIRE(i >= lo);
    REQUIRE(i <= hi);
    REQUIRE((a == 1 || a == -1));
  }
  REQUIRE(static_cast<int>(d.leftover.size()) <= Fprime);
  REQUIRE(d.needed_Fprime <= Fprime);
}

} // namespace

TEST_SUITE("decompose") {

TEST_CASE("good generating set parameters") {
  const auto &[ggs, chain] = good();
  CHECK(ggs.A.size() == 3);
  CHECK(ggs.M == 0);
  CHECK(ggs.C == 2);
  CHECK(ggs.F == 8);
  // frozen from fit_Fprime on the fixed seed; the exact re-verification in
  // every decomposition is the oracle
  CHECK(ggs.Fprime == 5);
  CHECK(ggs.primary.C == 0);
  CHECK(ggs.auxiliary.C == 2);
}

TEST_CASE("chain valuations") {
  const auto &[ggs, chain] = good();
  CHECK(chain_I1(chain, SixthRational::parse("5/4")) == 2);
  CHECK(chain_I2(chain, SixthRational(9)) == -2);
  CHECK(chain_I2(chain, SixthRational::parse("1/3")) == 1);
  CHECK(chain_I1_prime(chain, SixthRational(1)) == 0);
  CHECK(chain_I1_prime(chain, SixthRational::parse("3/2")) == 1);
  CHECK(chain_I1_prime(chain, SixthRational(2)) == 2);
  CHECK(chain_I1_prime(chain, SixthRational::parse("1/2")) == -1);
  CHECK_THROWS(chain_I1(chain, SixthRational(0)));
  const Group G = Group::z16();
  gen::Rng rng(51);
  for (int i = 0; i < 300; ++i) {
    const auto k = std::get<SixthRational>(gen::module(G, rng));
    if (k.is_zero())
      continue;
    REQUIRE(chain_I1(chain, k) == -oracle::padic(k.to_mpq(), 2));
    REQUIRE(chain_I2(chain, k) == -oracle::padic(k.to_mpq(), 3));
    REQUIRE(chain_I1_prime(chain, k) == scan_I1_prime(k.to_mpq()));
  }
}

TEST_CASE("auxiliary pair satisfies the axioms with C = 2") {
  const auto &[ggs, chain] = good();
  CHECK(check_axioms(Group::z16(), ggs.primary, 1000, 0.0, 5).pass());
  CHECK(check_axioms(Group::z16(), ggs.auxiliary, 1000, 0.0, 5).pass());
}

TEST_CASE("small decompositions") {
  const auto &[ggs, chain] = good();
  auto d1 = decompose(ggs, chain, SixthRational(1));
  CHECK(d1.digits == std::map<long, int>{{0, 1}});
  CHECK(d1.leftover.empty());
  auto d2 = decompose(ggs, chain, SixthRational::parse("3/2"));
  CHECK(d2.digits == std::map<long, int>{{1, 1}});
  CHECK(d2.leftover.empty());
  auto d3 = decompose(ggs, chain, SixthRational::parse("5/4"));
  check_decomposition(SixthRational::parse("5/4"), d3, ggs.Fprime);
  CHECK(d3.digits == std::map<long, int>{{0, -1}, {2, 1}});
}

TEST_CASE("decomposition preconditions") {
  const auto &[ggs, chain] = good();
  CHECK_THROWS_AS(decompose(ggs, chain, SixthRational(0)), std::invalid_argument);
  // |k| far above (3/2)^(I1 + F)
  CHECK_FALSE(in_fuzz_box(ggs, chain, SixthRational(1000)));
  CHECK_THROWS_AS(decompose(ggs, chain, SixthRational(1000)), std::invalid_argument);
  CHECK(in_fuzz_box(ggs, chain, SixthRational(7)));
}

TEST_CASE("too small an F' is reported, never truncated") {
  const auto &[ggs, chain] = good();
  gen::Rng rng(52);
  bool saw_error = false;
  for (int i = 0; i < 400 && !saw_error; ++i) {
    const auto k = random_fuzz_box_element(ggs, chain, rng);
    try {
      const auto d = decompose_within(ggs, chain, k, 0);
      check_decomposition(k, d, 0);
    } catch (const DecompositionError &) {
      saw_error = true;
    }
  }
  CHECK(saw_error);
}

TEST_CASE("window extension 5 always suffices for F = 8") {
  // at extension e the top surplus is below (3/2)^(F - e) + 2, so e = 5
  // leaves at most 4 leftover terms
  const auto &[ggs, chain] = good();
  gen::Rng rng(54);
  int worst = 0;
  for (int i = 0; i < 20000; ++i) {
    const auto k = random_fuzz_box_element(ggs, chain, rng);
    worst = std::max(worst, decompose_within(ggs, chain, k, 64).needed_Fprime);
  }
  CHECK(worst <= 5);
}

TEST_CASE("random fuzz-box elements decompose") {
  const auto &[ggs, chain] = good();
  gen::Rng rng(53);
  for (int i = 0; i < 500; ++i) {
    const auto k = random_fuzz_box_element(ggs, chain, rng);
    REQUIRE(in_fuzz_box(ggs, chain, k));
    check_decomposition(k, decompose(ggs, chain, k), ggs.Fprime);
  }
}

TEST_CASE("good generating set letters") {
  const auto &[ggs, chain] = good();
  const Group G = Group::z16();
  const GenSet S = good_genset_letters(G, ggs);
  CHECK(S.letters.front() == G.shift_element(1));
  CHECK(S.z == 1.0);
  // {a t a'} has 9 distinct elements (1, 3/2 a + a'), plus (0, +-1); then
  // inverses of the nine
  CHECK(S.size() == 20);
  for (const auto &l : S.letters) {
    bool found = false;
    for (const auto &m : S.letters)
      found = found || G.multiply(l, m) == G.identity();
    REQUIRE(found);
  }
  CHECK_THROWS_AS(good_genset_letters(Group::sol(), ggs), FamilyMismatch);
}

} // TEST_SUITE
