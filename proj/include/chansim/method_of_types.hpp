#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "chansim/distribution.hpp"
#include "chansim/errors.hpp"
#include "chansim/extended_real.hpp"
#include "chansim/logspace.hpp"
#include "chansim/measures.hpp"
#include "chansim/optimize.hpp"

namespace chansim {

// Empirical type of a length-n word: per-symbol counts summing to n.
struct TypeVector {
  std::vector<int> counts;
  int n = 0;

  Distribution as_distribution() const {
    std::vector<double> p(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
      p[i] = static_cast<double>(counts[i]);
    return Distribution(std::move(p));
  }
};

inline TypeVector type_of_word(std::span<const int> word, int alphabet_size) {
  TypeVector t;
  t.counts.assign(alphabet_size, 0);
  t.n = static_cast<int>(word.size());
  for (int s : word) ++t.counts.at(s);
  return t;
}

// log2 of the exact multinomial type-class size |T_S|.
inline double log2_type_class_size(const TypeVector& t) {
  return log2_multinomial(t.n, t.counts);
}

// log2 |P_n(A)| = log2 C(n + a - 1, a - 1).
inline double log2_type_count(int alphabet_size, long long n) {
  return log2_binomial(n + alphabet_size - 1, alphabet_size - 1);
}

namespace detail {

template <typename Fn>
void for_each_composition_impl(int remaining, int parts, std::vector<int>& c,
                               int idx, Fn&& fn) {
  if (idx == parts - 1) {
    c[idx] = remaining;
    fn(const_cast<const std::vector<int>&>(c));
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    c[idx] = v;
    for_each_composition_impl(remaining - v, parts, c, idx + 1,
                              std::forward<Fn>(fn));
  }
}

// All compositions of n into `parts` nonnegative integers.
template <typename Fn>
void for_each_composition(int n, int parts, Fn&& fn) {
  std::vector<int> c(parts, 0);
  for_each_composition_impl(n, parts, c, 0, std::forward<Fn>(fn));
}

inline double composition_count(int n, int parts) {
  return std::exp2(log2_binomial(n + parts - 1, parts - 1));
}

}  // namespace detail

// All types of length-n words on the given alphabet.
inline std::vector<TypeVector> enumerate_types(int alphabet_size, int n,
                                               double cap = 2e6) {
  if (alphabet_size < 1 || n < 1)
    throw Error("enumerate_types: bad arguments");
  if (detail::composition_count(n, alphabet_size) > cap)
    throw InfeasibleError("enumerate_types: too many types");
  std::vector<TypeVector> types;
  detail::for_each_composition(n, alphabet_size, [&](const std::vector<int>& c) {
    types.push_back(TypeVector{c, n});
  });
  return types;
}

// The symmetric distribution with equal weight on every type class:
// Phi(y^n) = (1/|P_n(Y)|) * (1/|T_{type(y^n)}|).
inline double phi_log_mass(const TypeVector& y_type) {
  return -log2_type_count(static_cast<int>(y_type.counts.size()),
                          y_type.n) -
         log2_type_class_size(y_type);
}

struct SymmetricTypeMixture {
  int n;
  int alphabet_size;

  double log2_mass(const TypeVector& y_type) const {
    if (y_type.n != n ||
        static_cast<int>(y_type.counts.size()) != alphabet_size)
      throw AlphabetMismatchError("SymmetricTypeMixture::log2_mass");
    return phi_log_mass(y_type);
  }
};

namespace detail {

// Visits every joint type of (x^n, y^n): log2 multiplicity, log2 joint
// product mass of P_XY, log2 of the reference P_X^n x Phi, plus the raw
// counts. Infeasible joint cells (P_XY = 0 with positive count) are skipped.
inline void for_each_joint_type(
    const JointDistribution& pxy, int n,
    const std::function<void(const std::vector<int>&, double, double, double)>&
        visit) {
  const int nx = pxy.x_size(), ny = pxy.y_size();
  const Distribution px = pxy.marginal_x();
  const int cells = nx * ny;
  std::vector<double> log2_pxy(cells);
  for (int x = 0; x < nx; ++x)
    for (int y = 0; y < ny; ++y)
      log2_pxy[x * ny + y] = log2_safe(pxy(x, y));

  for_each_composition(n, cells, [&](const std::vector<int>& c) {
    double lhs = 0.0;
    bool feasible = true;
    for (int i = 0; i < cells && feasible; ++i) {
      if (c[i] == 0) continue;
      if (log2_pxy[i] == kNegInf)
        feasible = false;
      else
        lhs += c[i] * log2_pxy[i];
    }
    if (!feasible) return;
    std::vector<int> cx(nx, 0), cy(ny, 0);
    for (int x = 0; x < nx; ++x)
      for (int y = 0; y < ny; ++y) {
        cx[x] += c[x * ny + y];
        cy[y] += c[x * ny + y];
      }
    double lref = 0.0;
    for (int x = 0; x < nx; ++x)
      if (cx[x] > 0) lref += cx[x] * std::log2(px[x]);
    lref += phi_log_mass(TypeVector{cy, n});
    const double lcount = log2_multinomial(n, c);
    visit(c, lcount, lhs, lref);
  });
}

}  // namespace detail

// log2 of p_n = P_XY^n( P_XY^n >= g(n) 2^{nr} P_X^n x Phi_{Y^n} ) with
// g(n) = (n+1)^{g_exponent_poly}, computed exactly over joint types.
// Ties within 1e-9 bits resolve toward inclusion, matching the >= event.
inline double pn_log2_probability(const JointDistribution& pxy, int n,
                                  double r, int g_exponent_poly) {
  if (n < 1) throw Error("pn_log2_probability: n must be >= 1");
  const double cells_estimate =
      detail::composition_count(n, pxy.x_size() * pxy.y_size());
  if (cells_estimate > 5e7)
    throw InfeasibleError("pn_log2_probability: joint-type enumeration too "
                          "large");
  const double log2_g = g_exponent_poly * std::log2(n + 1.0);
  Log2Accumulator acc;
  detail::for_each_joint_type(
      pxy, n,
      [&](const std::vector<int>&, double lcount, double lhs, double lref) {
        const double rhs = n * r + log2_g + lref;
        if (lhs >= rhs - 1e-9) acc.add(lcount + lhs);
      });
  return std::min(acc.total(), 0.0);
}

inline double pn_probability(const JointDistribution& pxy, int n, double r,
                             int g_exponent_poly) {
  return std::exp2(pn_log2_probability(pxy, n, r, g_exponent_poly));
}

// Default polynomial degree for g(n): one above the type-count exponent.
inline int default_g_exponent_poly(const JointDistribution& pxy) {
  return pxy.y_size() + 1;
}

// Predicted exponent of p_n: sup_{t>=0} t (r - I_{1+t}(X:Y)); +inf when
// r >= I_inf(X:Y).
inline ExtReal pn_exponent_prediction(const JointDistribution& pxy,
                                      double r) {
  const double i_inf =
      renyi_mutual_information(pxy, RenyiOrder::infinity());
  if (r >= i_inf - 1e-12) return ExtReal::infinity();
  auto phi = [&](double t) {
    if (t <= 0.0) return 0.0;
    return t * (r - renyi_mutual_information(
                        pxy, RenyiOrder::from_alpha(1.0 + t)));
  };
  constexpr double kTMax = 64.0;
  double hi = 1.0, prev = phi(0.5);
  while (hi < kTMax) {
    const double cur = phi(hi);
    if (cur < prev) break;
    prev = cur;
    hi = std::min(2.0 * hi, kTMax);
  }
  const detail::Max1D m = detail::maximize_scan_golden(phi, 0.0, hi, 65);
  return ExtReal::finite(std::max(m.value, 0.0));
}

// (1/1) D_alpha(P_XY^n || P_X^n x Phi_{Y^n}) in bits, via joint types.
inline ExtReal renyi_divergence_product_vs_phi(const JointDistribution& pxy,
                                               int n, RenyiOrder order) {
  const double cells_estimate =
      detail::composition_count(n, pxy.x_size() * pxy.y_size());
  if (cells_estimate > 5e7)
    throw InfeasibleError("renyi_divergence_product_vs_phi: joint-type "
                          "enumeration too large");
  std::vector<MassTerm> terms;
  detail::for_each_joint_type(
      pxy, n,
      [&](const std::vector<int>&, double lcount, double lhs, double lref) {
        terms.push_back(MassTerm{lcount, lhs, lref});
      });
  return renyi_divergence_terms(terms, order);
}

}  // namespace chansim
