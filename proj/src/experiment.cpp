#include "solgeom/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "solgeom/probes.hpp"
#include "solgeom/valuations.hpp"

namespace solgeom {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T> T parse_int(const std::string &key, const std::string &v) {
  T out{};
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return out;
}

double parse_real(const std::string &key, const std::string &v) {
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used == 0 || used != v.size() || !std::isfinite(out))
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  return out;
}

std::size_t parse_count(const std::string &key, const std::string &v) {
  const auto n = parse_int<long long>(key, v);
  if (n < 0)
    throw ConfigError(key + " must be >= 0");
  return static_cast<std::size_t>(n);
}

} // namespace

const std::vector<std::pair<std::string, std::string>> &config_keys() {
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"group.family", "lamplighter-Q (Q >= 2), z16 or sol"},
      {"group.matrix", "sol only: a,b,c,d of M (default 2,1,1,1)"},
      {"genset.kind", "standard, good (z16 only) or explicit"},
      {"genset.letters", "explicit only: elements m:k separated by ';'"},
      {"ball.radius", "ball radius R (default 8)"},
      {"ball.file", "ball file, relative to --out (default ball.bin)"},
      {"ac.J", "witness offset J, or auto (default auto)"},
      {"ac.n_min", "first n (default 1)"},
      {"ac.n_max", "last n (default 3)"},
      {"ac.a", "module element a (default 1)"},
      {"depth.i_min", "first i (default 0)"},
      {"depth.i_max", "last i (default 4)"},
      {"depth.a", "module element a (default 1)"},
      {"lemma.samples", "words in the checked sample (default 1000)"},
      {"lemma.fit_samples", "words used to fit D (default 1000)"},
      {"lemma.max_length", "maximum word length (default 30)"},
      {"lemma.form", "upper or lower (default upper)"},
      {"lemma.D", "fixed D, or auto to fit (default auto)"},
      {"valuation.samples", "samples per axiom (default 1000)"},
      {"valuation.tolerance", "allowed violation (default 0, 1e-9 for sol)"},
      {"run.seed", "RNG seed (default 1)"},
  };
  return keys;
}

ExperimentConfig parse_config(const std::string &text) {
  ExperimentConfig cfg;
  cfg.text = text;
  std::set<std::string> known;
  for (const auto &[k, _] : config_keys())
    known.insert(k);
  std::set<std::string> seen;

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty())
      continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(where + "unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(where + "expected key = value");
    const std::string key = section + "." + trim(std::string_view(line).substr(0, eq));
    const std::string v = trim(std::string_view(line).substr(eq + 1));
    if (!known.count(key))
      throw ConfigError(where + "unknown key " + key);
    if (!seen.insert(key).second)
      throw ConfigError(where + "duplicate key " + key);

    if (key == "group.family") {
      if (v.rfind("lamplighter-", 0) == 0) {
        cfg.family = Family::Lamplighter;
        cfg.q = parse_int<std::uint32_t>(key, v.substr(12));
        if (cfg.q < 2)
          throw ConfigError("lamplighter modulus must be >= 2");
      } else if (v == "z16") {
        cfg.family = Family::Z16;
      } else if (v == "sol") {
        cfg.family = Family::Sol;
      } else {
        throw ConfigError(where + "unknown family '" + v + "'");
      }
    } else if (key == "group.matrix") {
      std::int64_t e[4];
      std::istringstream ms(v);
      std::string part;
      int n = 0;
      while (std::getline(ms, part, ',')) {
        if (n == 4)
          throw ConfigError(key + ": expected four entries");
        e[n++] = parse_int<std::int64_t>(key, trim(part));
      }
      if (n != 4)
        throw ConfigError(key + ": expected four entries");
      cfg.matrix = {e[0], e[1], e[2], e[3]};
    } else if (key == "genset.kind") {
      if (v == "standard")
        cfg.genset = GenSetKind::Standard;
      else if (v == "good")
        cfg.genset = GenSetKind::Good;
      else if (v == "explicit")
        cfg.genset = GenSetKind::Explicit;
      else
        throw ConfigError(where + "unknown generating set kind '" + v + "'");
    } else if (key == "genset.letters") {
      cfg.letters = v;
    } else if (key == "ball.radius") {
      cfg.radius = parse_int<int>(key, v);
      if (cfg.radius < 0)
        throw ConfigError("ball.radius must be >= 0");
    } else if (key == "ball.file") {
      if (v.empty())
        throw ConfigError("ball.file must not be empty");
      cfg.ball_file = v;
    } else if (key == "ac.J") {
      if (v == "auto")
        cfg.ac_J.reset();
      else
        cfg.ac_J = parse_int<int>(key, v);
    } else if (key == "ac.n_min") {
      cfg.ac_n_min = parse_int<int>(key, v);
    } else if (key == "ac.n_max") {
      cfg.ac_n_max = parse_int<int>(key, v);
    } else if (key == "ac.a") {
      cfg.ac_a = v;
    } else if (key == "depth.i_min") {
      cfg.depth_i_min = parse_int<int>(key, v);
    } else if (key == "depth.i_max") {
      cfg.depth_i_max = parse_int<int>(key, v);
    } else if (key == "depth.a") {
      cfg.depth_a = v;
    } else if (key == "lemma.samples") {
      cfg.lemma_samples = parse_count(key, v);
    } else if (key == "lemma.fit_samples") {
      cfg.lemma_fit_samples = parse_count(key, v);
    } else if (key == "lemma.max_length") {
      cfg.lemma_max_length = parse_int<int>(key, v);
      if (cfg.lemma_max_length < 2)
        throw ConfigError("lemma.max_length must be >= 2");
    } else if (key == "lemma.form") {
      if (v != "upper" && v != "lower")
        throw ConfigError(where + "lemma.form is upper or lower");
      cfg.lemma_upper = v == "upper";
    } else if (key == "lemma.D") {
      if (v == "auto")
        cfg.lemma_D.reset();
      else
        cfg.lemma_D = parse_real(key, v);
    } else if (key == "valuation.samples") {
      cfg.valuation_samples = parse_count(key, v);
    } else if (key == "valuation.tolerance") {
      cfg.valuation_tolerance = parse_real(key, v);
    } else if (key == "run.seed") {
      cfg.seed = parse_int<std::uint64_t>(key, v);
    }
  }
  if (cfg.genset == GenSetKind::Good && cfg.family != Family::Z16)
    throw ConfigError("genset.kind = good requires group.family = z16");
  if (cfg.genset == GenSetKind::Explicit && trim(cfg.letters).empty())
    throw ConfigError("genset.kind = explicit requires genset.letters");
  if (cfg.ac_n_min > cfg.ac_n_max)
    throw ConfigError("ac.n_min exceeds ac.n_max");
  if (cfg.depth_i_min > cfg.depth_i_max)
    throw ConfigError("depth.i_min exceeds depth.i_max");
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

Group build_group(const ExperimentConfig &cfg) {
  try {
    switch (cfg.family) {
    case Family::Lamplighter:
      return Group::lamplighter(cfg.q);
    case Family::Z16:
      return Group::z16();
    case Family::Sol:
      return Group::sol(cfg.matrix);
    }
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
  throw ConfigError("unknown family");
}

GenSet build_genset(const ExperimentConfig &cfg, const Group &group) {
  switch (cfg.genset) {
  case GenSetKind::Standard:
    return standard_genset(group);
  case GenSetKind::Good:
    return good_genset_letters(group, good_gen_set_z16().first);
  case GenSetKind::Explicit: {
    std::vector<GroupElement> letters;
    std::vector<std::string> names;
    std::istringstream ls(cfg.letters);
    std::string part;
    while (std::getline(ls, part, ';')) {
      part = trim(part);
      if (part.empty())
        continue;
      try {
        letters.push_back(group.parse_element(part));
      } catch (const std::exception &e) {
        throw ConfigError("genset.letters: " + std::string(e.what()));
      }
      names.push_back(part);
    }
    GenSet gs = make_genset(group, std::move(letters), std::move(names), default_pair(group).b);
    if (gs.size() == 0)
      throw ConfigError("genset.letters has no non-identity letter");
    return gs;
  }
  }
  throw ConfigError("unknown generating set kind");
}

std::string output_name(const std::string &command) {
  if (command == "ball")
    return "sphere_sizes.csv";
  std::string s = command;
  for (auto &c : s)
    if (c == '-')
      c = '_';
  return s + ".csv";
}

std::string csv_header(const ExperimentConfig &cfg, const std::string &command) {
  std::ostringstream os;
  os << "# solgeom " << kToolVersion << '\n';
  os << "# command: " << command << '\n';
  os << "# family: " << build_group(cfg).description() << '\n';
  os << "# R: " << cfg.radius << '\n';
  os << "# seed: " << cfg.seed << '\n';
  os << "# config:\n";
  std::istringstream in(cfg.text);
  std::string line;
  while (std::getline(in, line))
    os << "#   " << line << '\n';
  return os.str();
}

namespace {

struct Context {
  const ExperimentConfig &cfg;
  const RunOptions &opts;
  Group group;
  GenSet gens;

  std::filesystem::path ball_path() const { return opts.out / cfg.ball_file; }

  ValuationPair pair() const {
    return cfg.genset == GenSetKind::Good ? good_gen_set_z16().first.primary
                                          : default_pair(group);
  }

  ModuleElement module(const std::optional<std::string> &text, const char *key) const {
    if (!text)
      return group.one();
    try {
      return group.parse_module(*text);
    } catch (const std::exception &e) {
      throw ConfigError(std::string(key) + ": " + e.what());
    }
  }

  BallTable load_ball() const {
    const auto path = ball_path();
    if (!std::filesystem::exists(path))
      throw ConfigError("ball file " + path.string() +
                        " not found; run `solgeom ball` with the same config and --out first");
    BallTable table = BallTable::load(path);
    bool same = table.group() == group && table.gens().size() == gens.size();
    for (std::size_t i = 0; same && i < gens.size(); ++i)
      same = group.encode(table.gens().letters[i]) == group.encode(gens.letters[i]);
    if (!same)
      throw ConfigError("ball file " + path.string() +
                        " was built for a different group or generating set; rerun `solgeom ball`");
    if (table.requested_radius() != cfg.radius)
      throw ConfigError("ball file " + path.string() + " has radius " +
                        std::to_string(table.requested_radius()) + ", config asks for " +
                        std::to_string(cfg.radius) + "; rerun `solgeom ball`");
    if (table.truncated())
      throw ConfigError("ball file " + path.string() + " is a partial result (radius " +
                        std::to_string(table.radius()) + " of " +
                        std::to_string(table.requested_radius()) + ")");
    return table;
  }

  void write(const std::string &command, const std::string &body) const {
    std::filesystem::create_directories(opts.out);
    const auto path = opts.out / output_name(command);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os << csv_header(cfg, command) << body;
    if (!os)
      throw std::runtime_error("failed writing " + path.string());
  }
};

int cmd_ball(const Context &cx) {
  BallOptions bo;
  bo.workers = cx.opts.workers;
  bo.memory_budget = cx.opts.memory_budget;
  std::filesystem::create_directories(cx.opts.out);
  try {
    BallTable table = enumerate_ball(cx.group, cx.gens, cx.cfg.radius, bo);
    table.save(cx.ball_path());
    cx.write("ball", sphere_sizes_csv(table));
    return kExitOk;
  } catch (const BudgetExceeded &e) {
    e.partial->save(cx.ball_path());
    cx.write("ball", sphere_sizes_csv(*e.partial));
    throw;
  }
}

int cmd_ac_probe(const Context &cx) {
  const BallTable table = cx.load_ball();
  WitnessConfig wc;
  wc.s = max_b_letter(cx.gens);
  wc.a = cx.module(cx.cfg.ac_a, "ac.a");
  wc.n_min = cx.cfg.ac_n_min;
  wc.n_max = cx.cfg.ac_n_max;
  if (cx.cfg.ac_J) {
    wc.J = *cx.cfg.ac_J;
  } else {
    const ValuationPair vp = cx.pair();
    const auto a_len = table.length(cx.group.embed(wc.a));
    if (!a_len)
      throw ConfigError("ac.a lies outside the ball; raise ball.radius or set ac.J");
    const QuarterFit fit = quarter_bound_fit(table, vp);
    const double F = fit.overall.is_bottom() ? 0.0 : fit.overall.value();
    wc.J = default_witness_J(cx.gens.z, F, *a_len, vp.eval1(wc.a).value(), vp.C);
  }
  if (wc.J < 0 || wc.n_min < wc.J)
    throw ConfigError("ac probe needs n_min >= J >= 0 (J = " + std::to_string(wc.J) + ")");
  cx.write("ac-probe", ac_probe_csv(ac_probe(table, wc), wc));
  return kExitOk;
}

int cmd_depth_probe(const Context &cx) {
  const BallTable table = cx.load_ball();
  const ModuleElement a = cx.module(cx.cfg.depth_a, "depth.a");
  const ValuationPair vp = cx.pair();
  PocketBound bound;
  bound.C = vp.C;
  bound.b = vp.b.at(0);
  bound.M = std::max(std::fabs(vp.eval1(a).value()), std::fabs(vp.eval2(a).value()));
  if (cx.cfg.genset == GenSetKind::Good)
    bound.M = std::max(bound.M, good_gen_set_z16().first.M);
  const QuarterFit fit = quarter_bound_fit(table, vp);
  bound.H = fit.overall.is_bottom() ? 0.0 : fit.overall.value();
  cx.write("depth-probe",
           deep_pocket_csv(deep_pocket_probe(table, a, cx.cfg.depth_i_min, cx.cfg.depth_i_max,
                                             bound)));
  return kExitOk;
}

int cmd_valuation_check(const Context &cx) {
  std::vector<ValuationPair> pairs{default_pair(cx.group)};
  if (cx.cfg.genset == GenSetKind::Good) {
    auto ggs = good_gen_set_z16().first;
    pairs = {ggs.primary, ggs.auxiliary};
  }
  std::string body = "pair,axiom,samples,max_violation,tolerance,pass\n";
  bool ok = true;
  if (cx.cfg.valuation_samples > 0) {
    for (const auto &vp : pairs) {
      const double tol = cx.cfg.valuation_tolerance.value_or(vp.exact ? 0.0 : 1e-9);
      const AxiomReport rep =
          check_axioms(cx.group, vp, cx.cfg.valuation_samples, tol, cx.cfg.seed);
      const std::string csv = axiom_report_csv(rep);
      body += csv.substr(csv.find('\n') + 1);
      ok = ok && rep.pass();
    }
  }
  cx.write("valuation-check", body);
  if (!ok)
    throw ProbeFailure("valuation axioms violated; see " + output_name("valuation-check"));
  return kExitOk;
}

int cmd_lemma_check(const Context &cx) {
  const LemmaForm form = cx.cfg.lemma_upper ? LemmaForm::Upper : LemmaForm::Lower;
  const ValuationPair vp = cx.pair();
  std::mt19937_64 rng(cx.cfg.seed);
  auto sample = [&](std::size_t n) {
    std::vector<std::vector<GroupElement>> words;
    words.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      words.push_back(random_admissible_word(cx.gens, rng, cx.cfg.lemma_max_length, form));
    return words;
  };
  std::ostringstream os;
  os << "phase,generated,admissible,vacuous,failures,D,max_minimal_D\n";
  if (cx.cfg.lemma_samples == 0) {
    cx.write("lemma-check", os.str());
    return kExitOk;
  }
  auto emit = [&](const char *phase, std::size_t generated, const LemmaSummary &s) {
    os << phase << ',' << generated << ',' << s.words << ',' << s.vacuous << ',' << s.failures
       << ',' << s.D << ',' << to_string(s.max_minimal_D) << '\n';
  };
  double D = 0;
  if (cx.cfg.lemma_D) {
    D = *cx.cfg.lemma_D;
  } else {
    const auto fit_words = sample(cx.cfg.lemma_fit_samples);
    D = fit_lemma_D(cx.group, cx.gens, vp, fit_words, form).D;
    emit("fit", fit_words.size(), run_lemma_sample(cx.group, cx.gens, vp, fit_words, D, form));
  }
  const auto words = sample(cx.cfg.lemma_samples);
  const LemmaSummary s = run_lemma_sample(cx.group, cx.gens, vp, words, D, form);
  emit("check", words.size(), s);
  cx.write("lemma-check", os.str());
  if (s.failures > 0)
    throw ProbeFailure(std::to_string(s.failures) + " words fail the count at D = " +
                       std::to_string(D));
  return kExitOk;
}

int cmd_quarter_fit(const Context &cx) {
  const BallTable table = cx.load_ball();
  cx.write("quarter-fit", quarter_fit_csv(quarter_bound_fit(table, cx.pair())));
  return kExitOk;
}

} // namespace

int run_command(const std::string &command, const ExperimentConfig &cfg, const RunOptions &opts,
                std::ostream &err) {
  try {
    Group group = build_group(cfg);
    GenSet gens = build_genset(cfg, group);
    const Context cx{cfg, opts, std::move(group), std::move(gens)};
    if (command == "ball")
      return cmd_ball(cx);
    if (command == "ac-probe")
      return cmd_ac_probe(cx);
    if (command == "depth-probe")
      return cmd_depth_probe(cx);
    if (command == "valuation-check")
      return cmd_valuation_check(cx);
    if (command == "lemma-check")
      return cmd_lemma_check(cx);
    if (command == "quarter-fit")
      return cmd_quarter_fit(cx);
    err << "error: unknown command '" << command << "'\n";
    return kExitUsage;
  } catch (const ConfigError &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const BudgetExceeded &e) {
    err << "error: " << e.what() << "; partial ball written\n";
    return kExitBudget;
  } catch (const ProbeFailure &e) {
    err << "probe failure: " << e.what() << '\n';
    return kExitProbeFailure;
  } catch (const DecompositionError &e) {
    err << "probe failure: " << e.what() << '\n';
    return kExitProbeFailure;
  } catch (const std::invalid_argument &e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

} // namespace solgeom
