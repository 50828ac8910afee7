#pragma once

// Pairs of valuations (I1, I2) on a module K: real functions on K \ {0} with
//
//   I1(t_i k) = I1(k) + b_i          I2(t_i k) = I2(k) - b_i
//   I(-k) = I(k)                     I(k1 + k2) <= max(I(k1), I(k2)) + C
//
// Both functions are extended to k = 0 by the value BOTTOM.

#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "solgeom/group.hpp"

namespace solgeom {

/// A real number or BOTTOM. BOTTOM sits below every finite value and absorbs
/// addition, so it is carried as -infinity.
class ExtendedReal {
public:
  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double v) : v_(v) {}

  static constexpr ExtendedReal bottom() {
    return ExtendedReal(-std::numeric_limits<double>::infinity());
  }

  constexpr bool is_bottom() const { return v_ == -std::numeric_limits<double>::infinity(); }
  constexpr double value() const { return v_; }

  friend constexpr ExtendedReal operator+(ExtendedReal x, double r) { return {x.v_ + r}; }
  friend constexpr ExtendedReal operator-(ExtendedReal x, double r) { return {x.v_ - r}; }
  friend constexpr auto operator<=>(ExtendedReal, ExtendedReal) = default;

private:
  double v_ = 0.0;
};

std::ostream &operator<<(std::ostream &os, ExtendedReal x);
std::string to_string(ExtendedReal x);

using ValuationFn = std::function<ExtendedReal(const ModuleElement &)>;

struct ValuationPair {
  std::string name;
  double C = 0.0;
  std::vector<double> b;
  ValuationFn eval1; // I1
  ValuationFn eval2; // I2
  /// True when values are integers and C is exact; axioms then hold with
  /// tolerance zero.
  bool exact = true;
};

/// B(m) = b_1 m_1 + ... + b_l m_l.
double b_functional(std::span<const double> b, const ShiftVector &m);
inline double b_functional(const ValuationPair &vp, const ShiftVector &m) {
  return b_functional(vp.b, m);
}

/// (I_max, -I_min) on (Z/q)[x, x^-1]: top degree and negated bottom degree.
ValuationPair laurent_pair();

/// (-v_2, -v_3) on Z[1/6] with t = *3/2.
ValuationPair dyadic_triadic_pair();

/// Eigenprojection valuations on Z^2 for a hyperbolic M with det +-1:
/// I1(k) = log_{|l+|} |phi+(k)|, I2(k) = log_{|l-|} |phi-(k)|, where l+ is the
/// expanding eigenvalue of M and l- the expanding eigenvalue of M^-1.
ValuationPair sol_eigen_pair(const Matrix2 &m = {});

/// The pair matching a group's family.
ValuationPair default_pair(const Group &g);

struct AxiomRow {
  std::string axiom;
  std::size_t samples = 0;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

struct AxiomReport {
  std::string pair;
  std::vector<AxiomRow> rows;

  bool pass() const;
};

/// Random-sample check of every axiom. Module elements are drawn with
/// Group::random_module at a family-appropriate spread.
AxiomReport check_axioms(const Group &group, const ValuationPair &vp, std::size_t samples,
                         double tol, std::uint64_t seed);

/// CSV body: axiom,samples,max_violation,tolerance,pass
std::string axiom_report_csv(const AxiomReport &report);

} // namespace solgeom
