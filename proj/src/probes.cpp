#include "solgeom/probes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace solgeom {

namespace {

std::string cell(const std::optional<int> &v) { return v ? std::to_string(*v) : "ABSENT"; }

} // namespace

// ------------------------------------------------------------ AC witnesses

GroupElement max_b_letter(const GenSet &gens) {
  for (const auto &l : gens.letters)
    if (b_functional(gens.b, l.shift) == gens.z)
      return l;
  throw std::invalid_argument("generating set has no letter with B = z");
}

GroupElement witness_element(const Group &group, const GroupElement &s, const ModuleElement &a,
                             int n, int i) {
  const GroupElement ea = group.embed(a);
  GroupElement g = group.power(s, n + i);
  g = group.multiply(g, ea);
  g = group.multiply(g, group.power(s, -2 * static_cast<std::int64_t>(n)));
  g = group.multiply(g, ea);
  return group.multiply(g, group.power(s, n));
}

std::pair<GroupElement, GroupElement> witness_pair(const Group &group, const WitnessConfig &cfg,
                                                   int n) {
  if (group.is_zero(cfg.a))
    throw std::invalid_argument("witness_pair: a must be nonzero");
  if (cfg.J < 0 || n < cfg.J)
    throw std::invalid_argument("witness_pair: requires n >= J >= 0");
  return {witness_element(group, cfg.s, cfg.a, n, cfg.J),
          witness_element(group, cfg.s, cfg.a, n, -cfg.J)};
}

int default_witness_J(double z, double F, int a_length, double I1_of_a, double C) {
  if (z <= 0)
    throw std::invalid_argument("default_witness_J: z must be positive");
  const double bound = (4.0 / z) * (F + a_length * z / 2.0 - I1_of_a + 3.0 * C);
  return std::max(1, static_cast<int>(std::floor(bound)) + 1);
}

std::vector<AcRow> ac_probe(const BallTable &table, const WitnessConfig &cfg) {
  const Group &G = table.group();
  std::vector<AcRow> rows;
  const auto step = table.length(G.power(cfg.s, 2 * cfg.J));
  for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
    AcRow row;
    row.n = n;
    row.step_length = step;
    auto [plus, minus] = witness_pair(G, cfg, n);
    row.plus_length = table.length(plus);
    row.minus_length = table.length(minus);
    if (row.plus_length && row.minus_length) {
      const int r = std::max(*row.plus_length, *row.minus_length);
      row.detour = restricted_distance(table, plus, minus, r);
      row.detour_unreachable = !row.detour;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string ac_probe_csv(const std::vector<AcRow> &rows, const WitnessConfig &cfg) {
  std::ostringstream os;
  os << "n,J,plus_length,minus_length,step_length,detour\n";
  for (const auto &r : rows) {
    os << r.n << ',' << cfg.J << ',' << cell(r.plus_length) << ',' << cell(r.minus_length) << ','
       << cell(r.step_length) << ','
       << (r.detour_unreachable ? std::string("UNREACHABLE") : cell(r.detour)) << '\n';
  }
  return os.str();
}

// ------------------------------------------------------------ quarter bound

ExtendedReal quarter_excess(const ValuationPair &vp, double z, const GroupElement &g, int length) {
  const ExtendedReal lo = std::min(vp.eval1(g.base), vp.eval2(g.base));
  return lo - length * z / 4.0;
}

QuarterFit quarter_bound_fit(const BallTable &table, const ValuationPair &vp) {
  QuarterFit fit;
  fit.z = table.gens().z;
  const auto radii = static_cast<std::size_t>(table.radius() + 1);
  fit.sphere_max.assign(radii, ExtendedReal::bottom());
  fit.slab_counts.assign(radii, 0);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const GroupElement g = table.element_at(i);
    if (std::fabs(b_functional(vp, g.shift)) > fit.z)
      continue;
    const int r = table.length_at(i);
    ++fit.slab_counts[r];
    const ExtendedReal e = quarter_excess(vp, fit.z, g, r);
    fit.sphere_max[r] = std::max(fit.sphere_max[r], e);
    fit.overall = std::max(fit.overall, e);
  }
  return fit;
}

std::string quarter_fit_csv(const QuarterFit &fit) {
  std::ostringstream os;
  os << "radius,slab_elements,max_excess\n";
  for (std::size_t r = 0; r < fit.sphere_max.size(); ++r)
    os << r << ',' << fit.slab_counts[r] << ',' << to_string(fit.sphere_max[r]) << '\n';
  os << "all,";
  std::size_t total = 0;
  for (auto c : fit.slab_counts)
    total += c;
  os << total << ',' << to_string(fit.overall) << '\n';
  return os.str();
}

// ------------------------------------------------------------ triangle lemma

LemmaOutcome triangle_lemma_check(const Group &group, const GenSet &gens, const ValuationPair &vp,
                                  std::span<const GroupElement> word, double D, LemmaForm form) {
  LemmaOutcome out;
  if (word.size() < 2)
    return out;
  const double sign = form == LemmaForm::Upper ? 1.0 : -1.0;
  const GroupElement &ret = word.back();
  if (!group.is_zero(ret.base) || sign * b_functional(gens.b, ret.shift) <= 0)
    return out;

  const WordEvaluation eval = group.word_evaluate(word);
  const std::size_t n = word.size() - 1;
  std::vector<double> heights(n);
  for (std::size_t i = 0; i < n; ++i) {
    heights[i] = sign * b_functional(gens.b, eval.suffix_shifts[i]);
    if (heights[i] <= 0)
      return out;
  }
  if (heights.front() > gens.z || heights.back() > gens.z)
    return out;
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (std::fabs(heights[i + 1] - heights[i]) > gens.z)
      return out;
  out.admissible = true;
  out.terms = n;

  ModuleElement k = group.zero();
  for (std::size_t i = 0; i < n; ++i)
    k = group.add(k, group.act(eval.suffix_shifts[i], word[i].base));
  if (!(k == eval.value.base))
    throw std::logic_error("suffix-shift sum disagrees with word evaluation");

  const ValuationFn &I = form == LemmaForm::Upper ? vp.eval1 : vp.eval2;
  out.valuation = I(k);
  if (out.valuation.is_bottom()) {
    out.pass = true;
    out.p = 0;
    return out;
  }

  std::sort(heights.begin(), heights.end(), std::greater<>());
  // more than 2p values >= threshold  <=>  the (2p+1)-th largest is
  for (std::size_t p = 0; 2 * p + 1 <= n; ++p) {
    const double h = heights[2 * p];
    if (h < 1)
      break;
    const double need = out.valuation.value() - static_cast<double>(p) - h;
    out.minimal_D = out.minimal_D.is_bottom() ? ExtendedReal(need)
                                              : std::min(out.minimal_D, ExtendedReal(need));
    if (!out.pass && h >= std::max(out.valuation.value() - D - static_cast<double>(p), 1.0)) {
      out.pass = true;
      out.p = static_cast<int>(p);
    }
  }
  return out;
}

std::vector<GroupElement> random_admissible_word(const GenSet &gens, std::mt19937_64 &rng,
                                                 int max_length, LemmaForm form) {
  if (max_length < 2)
    throw std::invalid_argument("random_admissible_word: max_length must be >= 2");
  const double sign = form == LemmaForm::Upper ? 1.0 : -1.0;
  const GroupElement *ret = nullptr;
  for (const auto &l : gens.letters) {
    const double h = sign * b_functional(gens.b, l.shift);
    const bool pure = std::visit([](const auto &v) { return v.is_zero(); }, l.base);
    if (h > 0 && pure && (!ret || h > sign * b_functional(gens.b, ret->shift)))
      ret = &l;
  }
  if (!ret)
    throw std::invalid_argument("generating set has no pure shift letter of the required sign");

  std::uniform_int_distribution<int> len_dist(2, max_length);
  std::vector<std::size_t> options;
  // a walk can strand itself (e.g. +-1 steps at height 1 with one step left);
  // such attempts are redrawn
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const int n = len_dist(rng);
    std::vector<GroupElement> word(static_cast<std::size_t>(n));
    word.back() = *ret;
    double h = sign * b_functional(gens.b, ret->shift);
    bool stuck = false;
    // positions n-1 .. 2 (1-based) keep heights positive and leave room to get
    // back under z by position 1
    for (int pos = n - 1; pos >= 2 && !stuck; --pos) {
      options.clear();
      for (std::size_t j = 0; j < gens.size(); ++j) {
        const double next = h + sign * b_functional(gens.b, gens.letters[j].shift);
        if (next > 0 && next - gens.z <= (pos - 2) * gens.z)
          options.push_back(j);
      }
      if (options.empty()) {
        stuck = true;
        break;
      }
      std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
      const std::size_t j = options[pick(rng)];
      word[static_cast<std::size_t>(pos - 1)] = gens.letters[j];
      h += sign * b_functional(gens.b, gens.letters[j].shift);
    }
    if (stuck)
      continue;
    std::uniform_int_distribution<std::size_t> any(0, gens.size() - 1);
    word.front() = gens.letters[any(rng)];
    return word;
  }
  throw std::runtime_error("random_admissible_word: no admissible word found");
}

LemmaFit fit_lemma_D(const Group &group, const GenSet &gens, const ValuationPair &vp,
                     const std::vector<std::vector<GroupElement>> &words, LemmaForm form) {
  LemmaFit fit;
  ExtendedReal worst = ExtendedReal::bottom();
  for (const auto &w : words) {
    auto o = triangle_lemma_check(group, gens, vp, w, 0.0, form);
    if (o.admissible)
      worst = std::max(worst, o.minimal_D);
  }
  fit.D = worst.is_bottom() ? 0.0 : std::max(0.0, worst.value());
  for (const auto &w : words) {
    auto o = triangle_lemma_check(group, gens, vp, w, fit.D, form);
    fit.p.push_back(o.p.value_or(-1));
  }
  return fit;
}

LemmaSummary run_lemma_sample(const Group &group, const GenSet &gens, const ValuationPair &vp,
                              const std::vector<std::vector<GroupElement>> &words, double D,
                              LemmaForm form) {
  LemmaSummary s;
  s.D = D;
  for (const auto &w : words) {
    auto o = triangle_lemma_check(group, gens, vp, w, D, form);
    if (!o.admissible)
      continue;
    ++s.words;
    if (o.valuation.is_bottom())
      ++s.vacuous;
    if (!o.pass)
      ++s.failures;
    s.max_minimal_D = std::max(s.max_minimal_D, o.minimal_D);
  }
  return s;
}

// ------------------------------------------------------------ deep pockets

std::vector<PocketRow> deep_pocket_probe(const BallTable &table, const ModuleElement &a, int i_min,
                                         int i_max, std::optional<PocketBound> bound) {
  const Group &G = table.group();
  if (G.is_zero(a))
    throw std::invalid_argument("deep_pocket_probe: a must be nonzero");
  std::vector<PocketRow> rows;
  for (int i = i_min; i <= i_max; ++i) {
    PocketRow row;
    row.i = i;
    const GroupElement k = G.embed(G.add(G.act(i, a), G.act(-i, a)));
    row.length = table.length(k);
    if (row.length)
      row.depth = depth(table, k);
    if (bound)
      row.valuation_bound = 4.0 * (i - bound->C - bound->M - bound->H) / std::fabs(bound->b);
    rows.push_back(row);
  }
  return rows;
}

std::string deep_pocket_csv(const std::vector<PocketRow> &rows) {
  std::ostringstream os;
  os << "i,length,depth,depth_exact,valuation_bound\n";
  for (const auto &r : rows) {
    os << r.i << ',' << cell(r.length) << ',';
    if (r.depth)
      os << r.depth->value << ',' << (r.depth->exact ? "exact" : "lower_bound");
    else
      os << "ABSENT,ABSENT";
    os << ',';
    if (r.valuation_bound)
      os << *r.valuation_bound;
    os << '\n';
  }
  return os.str();
}

} // namespace solgeom
