#include "solgeom/valuations.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

namespace solgeom {

std::ostream &operator<<(std::ostream &os, ExtendedReal x) {
  if (x.is_bottom())
    return os << "BOTTOM";
  return os << x.value();
}

std::string to_string(ExtendedReal x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

double b_functional(std::span<const double> b, const ShiftVector &m) {
  if (b.size() != m.rank())
    throw std::invalid_argument("b_functional: rank mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i)
    s += b[i] * static_cast<double>(m[i]);
  return s;
}

ValuationPair laurent_pair() {
  ValuationPair vp;
  vp.name = "laurent";
  vp.C = 0.0;
  vp.b = {1.0};
  vp.eval1 = [](const ModuleElement &k) -> ExtendedReal {
    const auto &p = std::get<LaurentPoly>(k);
    if (p.is_zero())
      return ExtendedReal::bottom();
    return static_cast<double>(p.max_exponent());
  };
  vp.eval2 = [](const ModuleElement &k) -> ExtendedReal {
    const auto &p = std::get<LaurentPoly>(k);
    if (p.is_zero())
      return ExtendedReal::bottom();
    return -static_cast<double>(p.min_exponent());
  };
  return vp;
}

ValuationPair dyadic_triadic_pair() {
  ValuationPair vp;
  vp.name = "dyadic-triadic";
  vp.C = 0.0;
  vp.b = {1.0};
  vp.eval1 = [](const ModuleElement &k) -> ExtendedReal {
    const auto &r = std::get<SixthRational>(k);
    if (r.is_zero())
      return ExtendedReal::bottom();
    return -static_cast<double>(r.valuation(2));
  };
  vp.eval2 = [](const ModuleElement &k) -> ExtendedReal {
    const auto &r = std::get<SixthRational>(k);
    if (r.is_zero())
      return ExtendedReal::bottom();
    return -static_cast<double>(r.valuation(3));
  };
  return vp;
}

namespace {

// The eigen-coordinate of k = (x, y) along eigenvalue l is the left
// eigenvector (l - d, b) dotted with k, i.e. l*x - c0 with c0 = d*x - b*y.
// For the two roots the product of these coordinates is the integer
// det*x^2 - tr*c0*x + c0^2, which recovers whichever coordinate suffers
// cancellation from the other one.
struct SolProjector {
  Matrix2 m;
  long double root[2]{};     // root[0] expanding, root[1] contracting
  long double log_base[2]{}; // log |root[0]|, log |1/root[1]|
  long double offset[2]{};   // log(|v_j| / |w_j . v_j|) / log_base[j]

  explicit SolProjector(const Matrix2 &mat) : m(mat) {
    const long double tr = static_cast<long double>(m.trace());
    const long double det = static_cast<long double>(m.det());
    const long double disc = tr * tr - 4 * det;
    if (disc <= 0)
      throw std::invalid_argument("sol matrix has no real eigenvalues");
    const long double s = std::sqrt(disc);
    // stable quadratic roots
    const long double big = tr >= 0 ? (tr + s) / 2 : (tr - s) / 2;
    const long double small = det / big;
    if (std::fabs(big) <= 1 || std::fabs(small) >= 1)
      throw std::invalid_argument("sol matrix is not hyperbolic");
    root[0] = big;
    root[1] = small;
    log_base[0] = std::log(std::fabs(big));
    log_base[1] = -std::log(std::fabs(small));
    for (int j = 0; j < 2; ++j) {
      const long double l = root[j];
      // right eigenvector v = (b, l - a), left eigenvector w = (l - d, b)
      const long double v0 = static_cast<long double>(m.b);
      const long double v1 = l - static_cast<long double>(m.a);
      const long double w0 = l - static_cast<long double>(m.d);
      const long double w1 = static_cast<long double>(m.b);
      const long double vnorm = std::sqrt(v0 * v0 + v1 * v1);
      offset[j] = std::log(vnorm / std::fabs(w0 * v0 + w1 * v1)) / log_base[j];
    }
  }

  // Returns |w_j . k| for j = 0, 1 with full relative precision.
  std::array<long double, 2> coords(const LatticeVec &k) const {
    const BigInt c0 = m.d * k.x - m.b * k.y;
    const BigInt prod = m.det() * k.x * k.x - m.trace() * c0 * k.x + c0 * c0;
    const long double x = mpz_get_d(k.x.get_mpz_t());
    const long double c = mpz_get_d(c0.get_mpz_t());
    std::array<long double, 2> w{root[0] * x - c, root[1] * x - c};
    if (sgn(prod) == 0) {
      // only possible for k = 0 when the roots are irrational
      return {std::fabs(w[0]), std::fabs(w[1])};
    }
    const long double p = mpz_get_d(prod.get_mpz_t());
    if (std::fabs(w[0]) >= std::fabs(w[1]))
      w[1] = p / w[0];
    else
      w[0] = p / w[1];
    return {std::fabs(w[0]), std::fabs(w[1])};
  }

  ExtendedReal eval(const ModuleElement &k, int j) const {
    const auto &v = std::get<LatticeVec>(k);
    if (v.is_zero())
      return ExtendedReal::bottom();
    const auto c = coords(v);
    return static_cast<double>(std::log(c[j]) / log_base[j] + offset[j]);
  }
};

} // namespace

ValuationPair sol_eigen_pair(const Matrix2 &m) {
  auto proj = std::make_shared<SolProjector>(m);
  ValuationPair vp;
  vp.name = "sol-eigen";
  const long double lambda_min = std::min(std::fabs(proj->root[0]), 1 / std::fabs(proj->root[1]));
  vp.C = static_cast<double>(std::log(2.0L) / std::log(lambda_min) + 1);
  vp.b = {1.0};
  vp.exact = false;
  vp.eval1 = [proj](const ModuleElement &k) { return proj->eval(k, 0); };
  vp.eval2 = [proj](const ModuleElement &k) { return proj->eval(k, 1); };
  return vp;
}

ValuationPair default_pair(const Group &g) {
  switch (g.family()) {
  case Family::Lamplighter:
    return laurent_pair();
  case Family::Z16:
    return dyadic_triadic_pair();
  case Family::Sol:
    return sol_eigen_pair(g.matrix());
  }
  throw std::logic_error("unreachable");
}

bool AxiomReport::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const AxiomRow &r) { return r.pass; });
}

namespace {

double gap(ExtendedReal x, ExtendedReal y) {
  if (x.is_bottom() && y.is_bottom())
    return 0.0;
  if (x.is_bottom() || y.is_bottom())
    return std::numeric_limits<double>::infinity();
  return std::fabs(x.value() - y.value());
}

} // namespace

AxiomReport check_axioms(const Group &group, const ValuationPair &vp, std::size_t samples,
                         double tol, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::int64_t spread = 0;
  switch (group.family()) {
  case Family::Lamplighter:
    spread = 6;
    break;
  case Family::Z16:
    spread = 1'000'000;
    break;
  case Family::Sol:
    spread = std::int64_t{1} << 40;
    break;
  }
  auto draw_nonzero = [&] {
    for (;;) {
      ModuleElement k = group.random_module(rng, spread);
      if (!group.is_zero(k))
        return k;
    }
  };

  const std::array<const ValuationFn *, 2> fns{&vp.eval1, &vp.eval2};
  const std::array<double, 2> sign{1.0, -1.0};
  double shift = 0, symmetry = 0, subadd = 0;
  std::size_t subadd_count = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    ModuleElement k = draw_nonzero();
    ModuleElement k2 = draw_nonzero();
    // every third pair nearly cancels, which stresses subadditivity
    if (s % 3 == 2)
      k2 = group.add(group.negate(k), group.random_module(rng, 2, 2));
    for (std::size_t f = 0; f < 2; ++f) {
      const auto &I = *fns[f];
      const ExtendedReal base = I(k);
      for (std::size_t i = 0; i < vp.b.size(); ++i) {
        ShiftVector e(vp.b.size());
        e[i] = 1;
        shift = std::max(shift, gap(I(group.act(e, k)), base + sign[f] * vp.b[i]));
        shift = std::max(shift, gap(I(group.act(-e, k)), base - sign[f] * vp.b[i]));
      }
      symmetry = std::max(symmetry, gap(I(group.negate(k)), base));
      ModuleElement sum = group.add(k, k2);
      if (!group.is_zero(sum)) {
        const ExtendedReal lhs = I(sum);
        const ExtendedReal rhs = std::max(base, I(k2)) + vp.C;
        subadd = std::max(subadd, std::max(0.0, lhs.value() - rhs.value()));
        ++subadd_count;
      }
    }
  }

  AxiomReport report{vp.name, {}};
  auto row = [&](std::string name, std::size_t n, double v) {
    report.rows.push_back({std::move(name), n, v, tol, v <= tol});
  };
  row("shift", samples, shift);
  row("symmetry", samples, symmetry);
  row("subadditivity", subadd_count / 2, subadd);
  return report;
}

std::string axiom_report_csv(const AxiomReport &report) {
  std::ostringstream os;
  os << "pair,axiom,samples,max_violation,tolerance,pass\n";
  os << std::setprecision(6);
  for (const auto &r : report.rows)
    os << report.pair << ',' << r.axiom << ',' << r.samples << ',' << r.max_violation << ','
       << r.tolerance << ',' << (r.pass ? "pass" : "fail") << '\n';
  return os.str();
}

} // namespace solgeom
