#include "doctest.h"

#include "gen.hpp"
#include "oracles.hpp"
#include "solgeom/group.hpp"

using namespace solgeom;

TEST_SUITE("group") {

TEST_CASE("lamplighter product shifts the left base") {
  const Group G = Group::lamplighter(2);
  const auto a = G.make(1, LaurentPoly::monomial(2, 0));
  const auto b = G.make(2, LaurentPoly::monomial(2, 5));
  const auto ab = G.multiply(a, b);
  CHECK(ab.shift[0] == 3);
  CHECK(ab.base == ModuleElement(LaurentPoly(2, {{2, 1}, {5, 1}})));
  // x^0 + x^0 = 0 over Z/2
  const auto e = G.embed(LaurentPoly::monomial(2, 0));
  CHECK(G.multiply(e, e) == G.identity());
}

TEST_CASE("z16 shift multiplies by 3/2") {
  const Group G = Group::z16();
  const auto g = G.multiply(G.make(1, SixthRational(1)), G.shift_element(1));
  CHECK(g.shift[0] == 2);
  CHECK(std::get<SixthRational>(g.base) == SixthRational::parse("3/2"));
  CHECK(std::get<SixthRational>(G.act(-2, SixthRational(9))) == SixthRational(4));
}

TEST_CASE("sol action is M and its inverse") {
  const Group G = Group::sol();
  CHECK(G.act(1, LatticeVec{1, 0}) == ModuleElement(LatticeVec{2, 1}));
  CHECK(G.act(-1, LatticeVec{2, 1}) == ModuleElement(LatticeVec{1, 0}));
  const Group H = Group::sol({1, 1, 1, 0});
  CHECK(H.act(-1, H.act(1, LatticeVec{3, -7})) == ModuleElement(LatticeVec{3, -7}));
}

TEST_CASE("sol rejects matrices on the unit circle") {
  CHECK_THROWS_AS(Group::sol({1, 1, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Group::sol({2, 1, 1, 2}), std::invalid_argument); // det 3
  CHECK_THROWS_AS(Group::sol({0, 1, 1, 0}), std::invalid_argument); // det -1, trace 0
  CHECK_THROWS_AS(Group::sol({1, 1, -1, 0}), std::invalid_argument); // elliptic
  CHECK_NOTHROW(Group::sol({1, 1, 1, 0}));
  CHECK_THROWS_AS(Group::lamplighter(1), std::invalid_argument);
}

TEST_CASE("sixth rationals stay in lowest terms") {
  CHECK(SixthRational::parse("6/4") == SixthRational::parse("3/2"));
  CHECK(SixthRational::parse("-12/18").to_string() == "-2/3");
  CHECK(SixthRational::parse("0/36").is_zero());
  CHECK_THROWS(SixthRational::parse("1/5"));
  CHECK_THROWS(SixthRational::parse("x"));
  CHECK(SixthRational(1).scaled(3) == SixthRational::parse("27/8"));
  CHECK(SixthRational::parse("5/4").valuation(2) == -2);
  CHECK(SixthRational::parse("18").valuation(3) == 2);
}

TEST_CASE("family mismatch is an error") {
  const Group L = Group::lamplighter(2);
  const Group Z = Group::z16();
  CHECK_THROWS_AS(L.add(L.zero(), Z.one()), FamilyMismatch);
  CHECK_THROWS_AS(Group::lamplighter(3).add(L.one(), L.one()), FamilyMismatch);
}

TEST_CASE("group axioms hold exactly") {
  gen::Rng rng(11);
  for (const Group &G : gen::families()) {
    CAPTURE(G.description());
    for (int i = 0; i < 300; ++i) {
      const auto a = gen::element(G, rng), b = gen::element(G, rng), c = gen::element(G, rng);
      REQUIRE(G.multiply(G.multiply(a, b), c) == G.multiply(a, G.multiply(b, c)));
      REQUIRE(G.multiply(a, G.identity()) == a);
      REQUIRE(G.multiply(G.identity(), a) == a);
      REQUIRE(G.multiply(a, G.inverse(a)) == G.identity());
      REQUIRE(G.multiply(G.inverse(a), a) == G.identity());
    }
  }
}

TEST_CASE("product agrees with the reference arithmetic") {
  gen::Rng rng(12);
  for (const Group &G : gen::families()) {
    CAPTURE(G.description());
    const auto ar = oracle::Arith::from(G);
    for (int i = 0; i < 300; ++i) {
      const auto a = gen::element(G, rng), b = gen::element(G, rng);
      REQUIRE(ar.key(ar.convert(G.multiply(a, b))) ==
              ar.key(ar.mul(ar.convert(a), ar.convert(b))));
    }
  }
}

TEST_CASE("action is an additive homomorphism of Z") {
  gen::Rng rng(13);
  for (const Group &G : gen::families()) {
    CAPTURE(G.description());
    for (int i = 0; i < 200; ++i) {
      const auto k1 = gen::module(G, rng), k2 = gen::module(G, rng);
      const long m1 = gen::uniform(rng, -5, 5), m2 = gen::uniform(rng, -5, 5);
      REQUIRE(G.act(m1 + m2, k1) == G.act(m1, G.act(m2, k1)));
      REQUIRE(G.act(m1, G.add(k1, k2)) == G.add(G.act(m1, k1), G.act(m1, k2)));
      REQUIRE(G.add(k1, G.negate(k1)) == G.zero());
    }
  }
}

TEST_CASE("powers") {
  gen::Rng rng(14);
  for (const Group &G : gen::families()) {
    const auto g = gen::element(G, rng);
    GroupElement acc = G.identity();
    for (int e = 0; e <= 6; ++e) {
      REQUIRE(G.power(g, e) == acc);
      REQUIRE(G.power(g, -e) == G.inverse(acc));
      acc = G.multiply(acc, g);
    }
  }
}

TEST_CASE("word evaluation is the product and the suffix-shift sum") {
  gen::Rng rng(15);
  for (const Group &G : gen::families()) {
    CAPTURE(G.description());
    for (int i = 0; i < 100; ++i) {
      std::vector<GroupElement> word;
      const long n = gen::uniform(rng, 0, 8);
      for (long j = 0; j < n; ++j)
        word.push_back(gen::element(G, rng, 3));
      const auto ev = G.word_evaluate(word);
      GroupElement prod = G.identity();
      for (const auto &w : word)
        prod = G.multiply(prod, w);
      REQUIRE(ev.value == prod);
      REQUIRE(ev.suffix_shifts.size() == word.size());
      ModuleElement k = G.zero();
      for (std::size_t j = 0; j < word.size(); ++j) {
        std::int64_t suffix = 0;
        for (std::size_t l = j + 1; l < word.size(); ++l)
          suffix += word[l].shift[0];
        REQUIRE(ev.suffix_shifts[j][0] == suffix);
        k = G.add(k, G.act(suffix, word[j].base));
      }
      REQUIRE(k == ev.value.base);
    }
  }
}

TEST_CASE("encoding round-trips and is canonical") {
  gen::Rng rng(16);
  for (const Group &G : gen::families()) {
    CAPTURE(G.description());
    for (int i = 0; i < 300; ++i) {
      const auto a = gen::element(G, rng, 40);
      const std::string e = G.encode(a);
      REQUIRE(G.decode(e) == a);
      const auto b = G.multiply(G.multiply(a, G.shift_element(3)), G.shift_element(-3));
      REQUIRE(G.encode(b) == e);
    }
  }
}

TEST_CASE("decode rejects malformed bytes") {
  const Group L = Group::lamplighter(2);
  const Group Z = Group::z16();
  const std::string e = L.encode(L.make(1, LaurentPoly(2, {{0, 1}, {3, 1}})));
  CHECK_THROWS(L.decode(e.substr(0, e.size() - 1)));
  CHECK_THROWS(L.decode(e + "x"));
  CHECK_THROWS(Z.decode(e)); // wrong family byte
  CHECK_THROWS(L.decode(""));
}

TEST_CASE("text forms round-trip") {
  gen::Rng rng(17);
  for (const Group &G : gen::families()) {
    for (int i = 0; i < 100; ++i) {
      const auto a = gen::element(G, rng);
      REQUIRE(G.parse_element(G.format(a)) == a);
    }
  }
  const Group L = Group::lamplighter(3);
  CHECK(L.format(L.parse_module("2^1+-1^5")) == "-1^2+2^1");
  CHECK(Group::sol().format(Group::sol().parse_element("-2:3,-4")) == "-2:3,-4");
  CHECK_THROWS(Group::z16().parse_element("1"));
}

} // TEST_SUITE
