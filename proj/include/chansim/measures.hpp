#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "chansim/channel.hpp"
#include "chansim/distribution.hpp"
#include "chansim/errors.hpp"
#include "chansim/extended_real.hpp"
#include "chansim/logspace.hpp"

namespace chansim {

// One aggregated atom group of a pair of log-domain mass functions on a
// common alphabet: 2^log2_count atoms, each carrying p-mass 2^log2_p and
// q-mass 2^log2_q (-inf encodes zero). Groups must partition the alphabet.
// This is the workhorse representation for n-fold product rows, where whole
// joint-type classes share identical per-word masses.
struct MassTerm {
  double log2_count;
  double log2_p;
  double log2_q;
};

namespace detail {

// log2 of the order-alpha fidelity for grouped masses; -inf encodes F = 0.
// Conventions: for alpha > 1, a zero q-atom under positive p-mass forces
// F = 0 (the a/0 = inf convention); for alpha < 1 such atoms contribute 0.
inline double log2_fidelity_terms(std::span<const MassTerm> terms,
                                  RenyiOrder order) {
  if (order.is_zero()) {
    Log2Accumulator acc;
    for (const auto& t : terms)
      if (t.log2_p != kNegInf) acc.add(t.log2_count + t.log2_q);
    return acc.total();
  }
  if (order.is_infinite()) {
    double worst = std::numeric_limits<double>::infinity();  // min q/p
    for (const auto& t : terms) {
      if (t.log2_p == kNegInf) continue;
      if (t.log2_q == kNegInf) return kNegInf;
      worst = std::min(worst, t.log2_q - t.log2_p);
    }
    return worst;
  }
  const double a = order.alpha();
  if (order.is_one()) {
    // log2 F_1 = sum p * (log q - log p); computed linearly, -inf on
    // support violation.
    double s = 0.0;
    for (const auto& t : terms) {
      if (t.log2_p == kNegInf) continue;
      if (t.log2_q == kNegInf) return kNegInf;
      s += std::exp2(t.log2_count + t.log2_p) * (t.log2_q - t.log2_p);
    }
    return s;
  }
  Log2Accumulator acc;
  for (const auto& t : terms) {
    if (t.log2_p == kNegInf) continue;
    if (t.log2_q == kNegInf) {
      if (a > 1.0) return kNegInf;  // a/0 = inf inside the sum
      continue;                     // 0 contribution for alpha < 1
    }
    acc.add(t.log2_count + a * t.log2_p + (1.0 - a) * t.log2_q);
  }
  const double s = acc.total();
  if (s == kNegInf) return a < 1.0 ? kNegInf : 0.0;  // empty sum
  return s / (1.0 - a);
}

inline std::vector<MassTerm> make_terms(std::span<const double> p,
                                        std::span<const double> q) {
  std::vector<MassTerm> terms(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    terms[i] = {0.0, log2_safe(p[i]), log2_safe(q[i])};
  return terms;
}

}  // namespace detail

// D_alpha for grouped log-domain masses, in bits.
inline ExtReal renyi_divergence_terms(std::span<const MassTerm> terms,
                                      RenyiOrder order) {
  const double log2f = detail::log2_fidelity_terms(terms, order);
  if (log2f == kNegInf) return ExtReal::infinity();
  return ExtReal::finite(-log2f);
}

// Order-alpha fidelity F_alpha(p, q); q may be a general nonnegative vector.
inline ExtReal renyi_fidelity(const Distribution& p, const NonnegVector& q,
                              RenyiOrder order) {
  if (p.size() != q.size()) throw AlphabetMismatchError("renyi_fidelity");
  const auto terms = detail::make_terms(p.probs(), q.values());
  return ExtReal::finite(std::exp2(detail::log2_fidelity_terms(terms, order)));
}

// D_alpha(p || q) in bits; +inf on support violation for alpha >= 1.
inline ExtReal renyi_divergence(const Distribution& p, const NonnegVector& q,
                                RenyiOrder order) {
  if (p.size() != q.size()) throw AlphabetMismatchError("renyi_divergence");
  const auto terms = detail::make_terms(p.probs(), q.values());
  return renyi_divergence_terms(terms, order);
}

// Relative entropy D(p || q) in bits.
inline ExtReal relative_entropy(const Distribution& p, const NonnegVector& q) {
  return renyi_divergence(p, q, RenyiOrder::one());
}

// Renyi mutual information I_alpha(X:Y) of the joint (input, input * W),
// by the closed-form order branches. Always finite.
inline double renyi_mutual_information(const Distribution& px,
                                       const Channel& w, RenyiOrder order) {
  if (px.size() != w.input_size())
    throw AlphabetMismatchError("renyi_mutual_information");
  const int ny = w.output_size();

  if (order.is_zero()) {
    double best = kNegInf;  // max_y log2 sum_{x: W(y|x)>0} P(x)
    for (int y = 0; y < ny; ++y) {
      double s = 0.0;
      for (int x = 0; x < px.size(); ++x)
        if (px[x] > 0.0 && w(y, x) > 0.0) s += px[x];
      if (s > 0.0) best = std::max(best, std::log2(s));
    }
    return -best;
  }
  if (order.is_infinite()) {
    double s = 0.0;
    for (int y = 0; y < ny; ++y) {
      double m = 0.0;
      for (int x = 0; x < px.size(); ++x)
        if (px[x] > 0.0) m = std::max(m, w(y, x));
      s += m;
    }
    return std::log2(s);
  }
  if (order.is_one()) {
    const Distribution qy = w.push_forward(px);
    double s = 0.0;
    for (int x = 0; x < px.size(); ++x) {
      if (px[x] == 0.0) continue;
      for (int y = 0; y < ny; ++y) {
        const double v = w(y, x);
        if (v > 0.0) s += px[x] * v * (std::log2(v) - std::log2(qy[y]));
      }
    }
    return std::max(s, 0.0);
  }
  const double a = order.alpha();
  // (a/(a-1)) log2 sum_y ( sum_x P(x) W(y|x)^a )^(1/a)
  Log2Accumulator outer;
  for (int y = 0; y < ny; ++y) {
    Log2Accumulator inner;
    for (int x = 0; x < px.size(); ++x)
      if (px[x] > 0.0 && w(y, x) > 0.0)
        inner.add(std::log2(px[x]) + a * std::log2(w(y, x)));
    const double iy = inner.total();
    if (iy != kNegInf) outer.add(iy / a);
  }
  return a / (a - 1.0) * outer.total();
}

inline double renyi_mutual_information(const JointDistribution& pxy,
                                       RenyiOrder order) {
  const Distribution px = pxy.marginal_x();
  const int nx = pxy.x_size(), ny = pxy.y_size();
  std::vector<double> cond(static_cast<std::size_t>(nx) * ny, 0.0);
  for (int x = 0; x < nx; ++x) {
    if (px[x] > 0.0) {
      for (int y = 0; y < ny; ++y) cond[x * ny + y] = pxy(x, y) / px[x];
    } else {
      for (int y = 0; y < ny; ++y) cond[x * ny + y] = 1.0 / ny;
    }
  }
  return renyi_mutual_information(px, Channel(nx, ny, std::move(cond)), order);
}

struct ChannelDivergenceResult {
  ExtReal value;
  int worst_input;  // the maximizing row
};

// D_alpha(W, N) = max_x D_alpha(W(.|x) || N(.|x)).
inline ChannelDivergenceResult channel_divergence(const Channel& w,
                                                  const Channel& n,
                                                  RenyiOrder order) {
  if (w.input_size() != n.input_size() || w.output_size() != n.output_size())
    throw AlphabetMismatchError("channel_divergence");
  ChannelDivergenceResult best{ExtReal::finite(-
                               std::numeric_limits<double>::max()),
                               0};
  for (int x = 0; x < w.input_size(); ++x) {
    const auto terms = detail::make_terms(w.row(x), n.row(x));
    const ExtReal d = renyi_divergence_terms(terms, order);
    if (x == 0 || best.value < d) best = {d, x};
  }
  return best;
}

}  // namespace chansim
