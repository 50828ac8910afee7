#pragma once

// Executable experiments built on the group, valuation and metric layers:
// almost-convexity witness pairs, the quarter bound, the triangle-lemma count,
// the Z[1/6] good generating set with its digit decomposition, and the
// deep-pocket family k_i = t^i a + t^-i a.

#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "solgeom/group.hpp"
#include "solgeom/metric.hpp"
#include "solgeom/valuations.hpp"

namespace solgeom {

// ------------------------------------------------------------ AC witnesses

struct WitnessConfig {
  /// A letter with B(shift) = z.
  GroupElement s;
  /// Nonzero module element, embedded as (0, a).
  ModuleElement a;
  int J = 1;
  int n_min = 1;
  int n_max = 1;
};

/// First letter of gens (in GenSet order) whose B(shift) equals z.
GroupElement max_b_letter(const GenSet &gens);

/// g_n(i) = s^{n+i} a s^{-2n} a s^n.
GroupElement witness_element(const Group &group, const GroupElement &s, const ModuleElement &a,
                             int n, int i);

/// (h_n^+, h_n^-) = (g_n(J), g_n(-J)). Requires n >= J and a != 0.
std::pair<GroupElement, GroupElement> witness_pair(const Group &group, const WitnessConfig &cfg,
                                                   int n);

/// Smallest J with J > (4/z)(F + |a| z / 2 - I1(a) + 3C).
int default_witness_J(double z, double F, int a_length, double I1_of_a, double C);

struct AcRow {
  int n = 0;
  std::optional<int> plus_length;
  std::optional<int> minus_length;
  std::optional<int> step_length; // |s^{2J}|
  /// restricted distance between h_n^+ and h_n^- inside the ball of radius
  /// max(|h_n^+|, |h_n^-|); nullopt when a witness is outside the table or
  /// no confined path exists
  std::optional<int> detour;
  bool detour_unreachable = false;
};

std::vector<AcRow> ac_probe(const BallTable &table, const WitnessConfig &cfg);
std::string ac_probe_csv(const std::vector<AcRow> &rows, const WitnessConfig &cfg);

// ------------------------------------------------------------ quarter bound

/// min(I1(k), I2(k)) - |g| z / 4 for g = (m, k); BOTTOM when k = 0.
ExtendedReal quarter_excess(const ValuationPair &vp, double z, const GroupElement &g, int length);

struct QuarterFit {
  double z = 0;
  /// Per radius: max excess over slab elements (|B(m)| <= z) of that length.
  std::vector<ExtendedReal> sphere_max;
  std::vector<std::size_t> slab_counts;
  /// The empirical additive constant: max over all spheres.
  ExtendedReal overall = ExtendedReal::bottom();
};

QuarterFit quarter_bound_fit(const BallTable &table, const ValuationPair &vp);
std::string quarter_fit_csv(const QuarterFit &fit);

// ------------------------------------------------------------ triangle lemma

/// Upper: all suffix shifts have B > 0, valuation I1. Lower: all B < 0,
/// valuation I2.
enum class LemmaForm { Upper, Lower };

struct LemmaOutcome {
  bool admissible = false;
  bool pass = false;
  /// Smallest p satisfying the count, when pass.
  std::optional<int> p;
  ExtendedReal valuation = ExtendedReal::bottom();
  /// Smallest D for which this word passes; BOTTOM for k = 0.
  ExtendedReal minimal_D = ExtendedReal::bottom();
  std::size_t terms = 0;
};

/// The word's last letter must be a pure shift with B of the form's sign; it
/// anchors the suffix shifts. The counted terms are the letters before it:
/// k = sum_i t^{a_i} k_i with a_i the suffix shift of letter i. Admissible iff
/// every sign(B(a_i)) matches the form and |B(a_1)|, |B(a_{i+1} - a_i)|,
/// |B(a_n)| <= z. The word passes iff for some p >= 0 more than 2p of the
/// values +-B(a_i) are >= max(I(k) - D - p, 1).
LemmaOutcome triangle_lemma_check(const Group &group, const GenSet &gens, const ValuationPair &vp,
                                  std::span<const GroupElement> word, double D, LemmaForm form);

/// Random admissible word of total length in [2, max_length] built backwards
/// from the return letter so the suffix heights keep the form's sign.
std::vector<GroupElement> random_admissible_word(const GenSet &gens, std::mt19937_64 &rng,
                                                 int max_length, LemmaForm form);

struct LemmaFit {
  double D = 0; // >= 0
  std::vector<int> p;
};

struct LemmaSummary {
  std::size_t words = 0;
  std::size_t vacuous = 0;
  std::size_t failures = 0;
  double D = 0;
  ExtendedReal max_minimal_D = ExtendedReal::bottom();
};

LemmaFit fit_lemma_D(const Group &group, const GenSet &gens, const ValuationPair &vp,
                     const std::vector<std::vector<GroupElement>> &words, LemmaForm form);

LemmaSummary run_lemma_sample(const Group &group, const GenSet &gens, const ValuationPair &vp,
                              const std::vector<std::vector<GroupElement>> &words, double D,
                              LemmaForm form);

// ------------------------------------------------------------ good generating set

/// Z[1/6] as a union of scaled copies of L = Z under P = *2 and Q = *3, with
/// t = Q P^-1 = *3/2 and reference cube B = [-1, 1].
struct LatticeChain {
  long P = 2;
  long Q = 3;
};

struct GoodGenSet {
  std::vector<ModuleElement> A;
  double F = 0;
  int Fprime = 0;
  ValuationPair primary;   // (I1, I2)
  ValuationPair auxiliary; // (I1', I2')
  /// max of |I1|, |I2|, |I1'|, |I2'| over A \ {0}
  double M = 0;
  double C = 0;
};

/// -max{i : k in 2^i Z[1/3]} by lattice membership.
long chain_I1(const LatticeChain &chain, const SixthRational &k);
/// -max{i : k in 3^i Z[1/2]} by lattice membership.
long chain_I2(const LatticeChain &chain, const SixthRational &k);
/// min{i : |k| <= (3/2)^i}, by exact integer comparison.
long chain_I1_prime(const LatticeChain &chain, const SixthRational &k);

/// A = L cap B = {0, 1, -1}; F = 2M + 4C; F' fitted on kFprimeFitSamples
/// random fuzz-box elements. Computed once per process.
std::pair<GoodGenSet, LatticeChain> good_gen_set_z16();

// The worst expansions (F' = 5 for F = 8) turn up about once per thousand
// draws, so a thousand-sample fit usually misses them.
inline constexpr std::size_t kFprimeFitSamples = 100000;
inline constexpr std::uint64_t kFprimeFitSeed = 0x6a09e667f3bcc908ULL;

/// {a t a' : a, a' in A} u A as group elements, t-first, then closed.
GenSet good_genset_letters(const Group &group, const GoodGenSet &ggs);

bool in_fuzz_box(const GoodGenSet &ggs, const LatticeChain &chain, const SixthRational &k);
SixthRational random_fuzz_box_element(const GoodGenSet &ggs, const LatticeChain &chain,
                                      std::mt19937_64 &rng);

struct Decomposition {
  /// index i -> a_i in {-1, 1}; zero digits are omitted
  std::map<long, int> digits;
  /// (i_j, a_j) leftover terms
  std::vector<std::pair<long, int>> leftover;
  long window_lo = 0;
  long window_hi = 0;
  /// max(window extension, leftover count): the F' this expansion needs
  int needed_Fprime = 0;
};

class DecompositionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// k = sum_i (3/2)^i a_i + sum_j (3/2)^{i_j} a_j with digits in A, every
/// index within [min(-I2(k), 0) - F', max(I1(k), 0) + F'] and at most F'
/// leftover terms. The identity is re-verified exactly before returning.
Decomposition decompose(const GoodGenSet &ggs, const LatticeChain &chain, const SixthRational &k);

/// Same, with F' replaced by max_Fprime; returns the expansion needing the
/// smallest F'.
Decomposition decompose_within(const GoodGenSet &ggs, const LatticeChain &chain,
                               const SixthRational &k, int max_Fprime);

/// Exact value of a decomposition.
SixthRational evaluate(const Decomposition &d);

int fit_Fprime(const GoodGenSet &ggs, const LatticeChain &chain, std::size_t samples,
               std::uint64_t seed);

// ------------------------------------------------------------ deep pockets

struct PocketBound {
  double C = 0;
  double M = 0;
  double H = 0;
  double b = 1;
};

struct PocketRow {
  int i = 0;
  std::optional<int> length;
  std::optional<DepthResult> depth;
  std::optional<double> valuation_bound;
};

/// k_i = t^i a + t^-i a for i in [i_min, i_max]; depth by BFS in the table.
std::vector<PocketRow> deep_pocket_probe(const BallTable &table, const ModuleElement &a, int i_min,
                                         int i_max, std::optional<PocketBound> bound = {});
std::string deep_pocket_csv(const std::vector<PocketRow> &rows);

} // namespace solgeom
