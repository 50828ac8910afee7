#include "doctest.h"

#include <cmath>

#include "gen.hpp"
#include "oracles.hpp"
#include "solgeom/probes.hpp"

using namespace solgeom;

namespace {

std::vector<oracle::Elem> oracle_letters(const oracle::Arith &ar, const GenSet &S) {
  std::vector<oracle::Elem> out;
  for (const auto &l : S.letters)
    out.push_back(ar.convert(l));
  return out;
}

} // namespace

TEST_SUITE("probes") {

TEST_CASE("witness identity h+ (h-)^-1 = s^2J") {
  for (const Group &G : gen::families()) {
    const GenSet S = standard_genset(G);
    gen::Rng rng(41);
    for (const auto &s : S.letters) {
      WitnessConfig cfg{s, gen::module(G, rng), 0, 0, 0};
      if (G.is_zero(cfg.a))
        cfg.a = G.one();
      for (int J = 0; J <= 3; ++J)
        for (int n = J; n <= 6; ++n) {
          cfg.J = J;
          const auto [hp, hm] = witness_pair(G, cfg, n);
          REQUIRE(G.multiply(hp, G.inverse(hm)) == G.power(s, 2 * J));
        }
    }
  }
}

TEST_CASE("witness preconditions") {
  const Group G = Group::z16();
  WitnessConfig cfg{G.shift_element(1), G.zero(), 1, 1, 1};
  CHECK_THROWS_AS(witness_pair(G, cfg, 2), std::invalid_argument);
  cfg.a = G.one();
  CHECK_THROWS_AS(witness_pair(G, cfg, 0), std::invalid_argument);
  CHECK_NOTHROW(witness_pair(G, cfg, 1));
}

TEST_CASE("max_b_letter picks a letter with B = z") {
  const Group G = Group::lamplighter(2);
  const GenSet S = standard_genset(G);
  CHECK(max_b_letter(S) == G.shift_element(1));
  GenSet flat = make_genset(G, {G.embed(G.one())}, {"a"}, {1.0});
  flat.z = 1.0;
  CHECK_THROWS(max_b_letter(flat));
}

TEST_CASE("default J") {
  // (4/1)(0 + 2/2 - 0 + 0) = 4, so J = 5
  CHECK(default_witness_J(1.0, 0.0, 2, 0.0, 0.0) == 5);
  CHECK(default_witness_J(1.0, -10.0, 1, 0.0, 0.0) == 1);
  CHECK_THROWS(default_witness_J(0.0, 0.0, 1, 0.0, 0.0));
}

TEST_CASE("lamplighter ac probe against a confined reference BFS") {
  const Group G = Group::lamplighter(2);
  const GenSet S = standard_genset(G);
  const int R = 13;
  const auto table = enumerate_ball(G, S, R, {});
  WitnessConfig cfg{max_b_letter(S), G.one(), 1, 1, 3};
  const auto rows = ac_probe(table, cfg);
  REQUIRE(rows.size() == 3);

  const auto ar = oracle::Arith::from(G);
  const auto letters = oracle_letters(ar, S);
  const auto ref = oracle::mitm_ball(ar, letters, R);
  for (const auto &row : rows) {
    const auto [hp, hm] = witness_pair(G, cfg, row.n);
    const int lp = ref.at(ar.key(ar.convert(hp)));
    const int lm = ref.at(ar.key(ar.convert(hm)));
    REQUIRE(row.plus_length == lp);
    REQUIRE(row.minus_length == lm);
    const int want = oracle::confined_distance(ar, letters, ref, ar.convert(hp), ar.convert(hm),
                                               std::max(lp, lm));
    REQUIRE(row.detour == want);
    REQUIRE(row.step_length == 2);
    REQUIRE(*row.detour >= *row.step_length);
  }
  // frozen from the reference computation above
  CHECK(rows[0].detour == 8);
  CHECK(rows[1].detour == 12);
  CHECK(rows[2].detour == 16);
  CHECK(ac_probe_csv(rows, cfg) ==
        "n,J,plus_length,minus_length,step_length,detour\n"
        "1,1,5,5,2,8\n2,1,9,9,2,12\n3,1,13,13,2,16\n");
}

TEST_CASE("ac probe marks witnesses outside the ball") {
  const Group G = Group::z16();
  const GenSet S = standard_genset(G);
  const auto table = enumerate_ball(G, S, 4, {});
  WitnessConfig cfg{max_b_letter(S), G.one(), 1, 1, 2};
  const auto rows = ac_probe(table, cfg);
  CHECK_FALSE(rows[1].plus_length.has_value());
  CHECK_FALSE(rows[1].detour.has_value());
  CHECK(ac_probe_csv(rows, cfg).find("2,1,ABSENT,ABSENT,2,ABSENT") != std::string::npos);
}

TEST_CASE("witness lengths respect 4n - J + 2|a|") {
  for (const Group &G : {Group::lamplighter(2), Group::z16(), Group::sol()}) {
    const GenSet S = standard_genset(G);
    const auto table = enumerate_ball(G, S, G.family() == Family::Sol ? 7 : 11, {});
    const int a_len = *table.length(G.embed(G.one()));
    for (int J = 0; J <= 2; ++J)
      for (int n = std::max(J, 1); n <= 3; ++n) {
        WitnessConfig cfg{max_b_letter(S), G.one(), J, n, n};
        const auto [hp, hm] = witness_pair(G, cfg, n);
        if (auto l = table.length(hp))
          REQUIRE(*l <= 4 * n - J + 2 * a_len);
        if (auto l = table.length(hm))
          REQUIRE(*l <= 4 * n - J + 2 * a_len);
      }
  }
}

TEST_CASE("quarter excess on K is symmetric under inversion") {
  const Group G = Group::z16();
  const GenSet S = standard_genset(G);
  const auto table = enumerate_ball(G, S, 10, {});
  const auto vp = default_pair(G);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto g = table.element_at(i);
    const auto gi = G.inverse(g);
    const int len = table.length_at(i);
    REQUIRE(*table.length(gi) == len);
    const auto e1 = quarter_excess(vp, S.z, g, len);
    const auto e2 = quarter_excess(vp, S.z, gi, len);
    const double m = std::fabs(b_functional(vp, g.shift));
    if (m == 0)
      REQUIRE(e1 == e2);
    else if (!e1.is_bottom())
      REQUIRE(std::fabs(e1.value() - e2.value()) <= m);
  }
}

TEST_CASE("quarter fit scans the slab") {
  const Group G = Group::z16();
  const auto table = enumerate_ball(G, standard_genset(G), 6, {});
  const auto fit = quarter_bound_fit(table, default_pair(G));
  CHECK(fit.z == 1.0);
  CHECK(fit.sphere_max.size() == 7);
  CHECK(fit.sphere_max[0].is_bottom());
  CHECK(fit.slab_counts[0] == 1);
  std::size_t slab = 0;
  for (std::size_t i = 0; i < table.size(); ++i)
    slab += std::abs(table.element_at(i).shift[0]) <= 1;
  std::size_t counted = 0;
  for (auto c : fit.slab_counts)
    counted += c;
  CHECK(counted == slab);
  const std::string csv = quarter_fit_csv(fit);
  CHECK(csv.rfind("radius,slab_elements,max_excess\n0,1,BOTTOM\n", 0) == 0);
  CHECK(csv.find("\nall,") != std::string::npos);
}

TEST_CASE("triangle lemma on hand-built words") {
  const Group G = Group::z16();
  const GenSet S = standard_genset(G);
  const auto vp = default_pair(G);
  const auto t = G.shift_element(1), T = G.shift_element(-1), a = G.embed(G.one());

  // heights 1, 2, 2, 1 and k = 3/2 + 9/4
  const std::vector<GroupElement> w{a, T, a, t, t};
  const auto o = triangle_lemma_check(G, S, vp, w, 0.0, LemmaForm::Upper);
  CHECK(o.admissible);
  CHECK(o.pass);
  CHECK(o.p == 0);
  CHECK(o.terms == 4);
  CHECK(o.valuation.value() == 2);
  CHECK(o.minimal_D.value() == 0);
  CHECK_FALSE(triangle_lemma_check(G, S, vp, w, -1.0, LemmaForm::Upper).pass);

  // first height 3 > z
  CHECK_FALSE(triangle_lemma_check(G, S, vp, std::vector{a, t, t, t}, 0.0, LemmaForm::Upper)
                  .admissible);
  // return letter with the wrong sign
  CHECK_FALSE(triangle_lemma_check(G, S, vp, std::vector{a, T}, 0.0, LemmaForm::Upper).admissible);
  CHECK(triangle_lemma_check(G, S, vp, std::vector{a, T}, 0.0, LemmaForm::Lower).admissible);
  // k = 0 passes vacuously
  const auto z = triangle_lemma_check(G, S, vp, std::vector{G.embed(G.zero()), t}, 0.0,
                                      LemmaForm::Upper);
  CHECK(z.pass);
  CHECK(z.valuation.is_bottom());
}

TEST_CASE("random admissible words are admissible") {
  for (const Group &G : {Group::lamplighter(2), Group::z16(), Group::sol()}) {
    const GenSet S = standard_genset(G);
    const auto vp = default_pair(G);
    gen::Rng rng(42);
    for (auto form : {LemmaForm::Upper, LemmaForm::Lower})
      for (int i = 0; i < 200; ++i) {
        const auto w = random_admissible_word(S, rng, 20, form);
        REQUIRE(w.size() >= 2);
        REQUIRE(w.size() <= 20);
        REQUIRE(triangle_lemma_check(G, S, vp, w, 1e9, form).admissible);
      }
  }
}

TEST_CASE("fitted D passes its own sample") {
  const Group G = Group::z16();
  const GenSet S = standard_genset(G);
  const auto vp = default_pair(G);
  gen::Rng rng(43);
  std::vector<std::vector<GroupElement>> words;
  for (int i = 0; i < 300; ++i)
    words.push_back(random_admissible_word(S, rng, 30, LemmaForm::Upper));
  const auto fit = fit_lemma_D(G, S, vp, words, LemmaForm::Upper);
  CHECK(fit.D >= 0);
  const auto s = run_lemma_sample(G, S, vp, words, fit.D, LemmaForm::Upper);
  CHECK(s.words == 300);
  CHECK(s.failures == 0);
  CHECK(s.max_minimal_D <= ExtendedReal(fit.D));
}

TEST_CASE("deep pocket probe") {
  const Group G = Group::lamplighter(2);
  const auto table = enumerate_ball(G, standard_genset(G), 10, {});
  const auto rows = deep_pocket_probe(table, G.one(), 0, 3, PocketBound{0, 0, 0, 1});
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].length == 0); // 2a = 0 over Z/2
  CHECK(rows[1].length == 6);
  CHECK(rows[1].depth->value == 3);
  CHECK(rows[1].depth->exact);
  CHECK_FALSE(rows[3].length.has_value());
  CHECK(*rows[2].valuation_bound == 8.0);
  CHECK_THROWS(deep_pocket_probe(table, G.zero(), 0, 1));
  const std::string csv = deep_pocket_csv(rows);
  CHECK(csv.rfind("i,length,depth,depth_exact,valuation_bound\n0,0,1,exact,0\n", 0) == 0);
  CHECK(csv.find("3,ABSENT,ABSENT,ABSENT,12") != std::string::npos);
}

} // TEST_SUITE
