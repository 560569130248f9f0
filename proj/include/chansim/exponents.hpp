#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "chansim/capacity.hpp"
#include "chansim/channel.hpp"
#include "chansim/distribution.hpp"
#include "chansim/errors.hpp"
#include "chansim/extended_real.hpp"
#include "chansim/measures.hpp"
#include "chansim/optimize.hpp"

namespace chansim {

enum class ExponentKind { kReliabilityFunction, kStrongConverse, kSimulationRate };

struct ExponentOptimizer {
  std::optional<double> t_star;
  std::optional<double> beta_star;
  std::optional<Distribution> input;   // P_X achieving the inner capacity
  std::optional<Distribution> output;  // Q_Y achieving the inner capacity
};

struct ExponentReport {
  ExponentKind kind = ExponentKind::kReliabilityFunction;
  RenyiOrder order = RenyiOrder::one();
  double rate = 0.0;
  ExtReal value;
  ExponentOptimizer optimizer;
  bool boundary_flag = false;  // alpha = 0 reliability at r = I_0 exactly
};

namespace detail {

// Capacity value with a tight inner tolerance; retries once relaxed so a
// marginal certificate does not abort a whole exponent evaluation.
inline CapacityResult capacity_checked(const Channel& w, RenyiOrder order,
                                       double tol = 1e-8) {
  CapacityOptions opts;
  opts.tol = tol;
  try {
    return renyi_capacity(w, order, opts);
  } catch (const ConvergenceError&) {
    opts.tol = 1e-6;
    opts.max_iterations *= 4;
    return renyi_capacity(w, order, opts);
  }
}

}  // namespace detail

struct SupTResult {
  ExtReal t_star;
  ExtReal value;
};

// sup_{t >= t_lo} t (r - I_{1+t}(W)). Returns +inf (with t* = inf) when
// r >= I_inf(W). The search window grows geometrically and is capped at
// T_max = 64 with divergence detection near r = I_inf.
inline SupTResult sup_t_objective(const Channel& w, double r, double t_lo) {
  constexpr double kTMax = 64.0;
  constexpr double kTol = 1e-9;
  const double i_inf =
      detail::capacity_checked(w, RenyiOrder::infinity()).value;
  if (r >= i_inf - 1e-12)
    return {ExtReal::infinity(), ExtReal::infinity()};

  std::map<double, double> cache;
  auto phi = [&](double t) {
    if (t <= 0.0) return 0.0;
    auto it = cache.find(t);
    if (it == cache.end()) {
      const double cap =
          detail::capacity_checked(w, RenyiOrder::from_alpha(1.0 + t)).value;
      it = cache.emplace(t, cap).first;
    }
    return t * (r - it->second);
  };

  // Grow the window until the objective starts decreasing.
  double hi = std::max(2.0 * t_lo, t_lo + 1.0);
  double prev = phi(std::max(t_lo, 0.5 * (t_lo + hi)));
  while (hi < kTMax) {
    const double cur = phi(hi);
    if (cur < prev) break;
    prev = cur;
    hi = std::min(2.0 * hi, kTMax);
    if (hi >= kTMax) break;
  }
  hi = std::min(hi, kTMax);
  if (hi >= kTMax && phi(kTMax) > phi(kTMax / 2) + kTol &&
      r >= i_inf - kTol)
    return {ExtReal::infinity(), ExtReal::infinity()};

  const detail::Max1D m = detail::maximize_scan_golden(phi, t_lo, hi);
  double best_t = m.x, best_v = m.value;
  if (phi(t_lo) >= best_v) {
    best_t = t_lo;
    best_v = phi(t_lo);
  }
  return {ExtReal::finite(best_t), ExtReal::finite(best_v)};
}

// Reliability function of Theorem 2 branches (in terms of t = beta - 1).
inline ExponentReport reliability_function(const Channel& w, double r,
                                           RenyiOrder order) {
  if (r < 0.0) throw Error("reliability_function: r must be >= 0");
  ExponentReport rep;
  rep.kind = ExponentKind::kReliabilityFunction;
  rep.order = order;
  rep.rate = r;

  if (order.is_zero()) {
    const double i0 = detail::capacity_checked(w, RenyiOrder::zero()).value;
    if (r > i0 + 1e-9) {
      rep.value = ExtReal::infinity();
    } else if (r < i0 - 1e-9) {
      rep.value = ExtReal::finite(0.0);
    } else {
      // The theorem specifies r > I_0 and r < I_0 only.
      rep.value = ExtReal::finite(0.0);
      rep.boundary_flag = true;
    }
    return rep;
  }

  const double i_inf =
      detail::capacity_checked(w, RenyiOrder::infinity()).value;
  if (r >= i_inf - 1e-12) {
    rep.value = ExtReal::infinity();
    rep.optimizer.t_star.reset();
    return rep;
  }
  if (order.is_infinite()) {
    // sup over beta >= inf degenerates: zero below I_inf.
    rep.value = ExtReal::finite(0.0);
    return rep;
  }

  const double a = order.alpha();
  const double t_lo = a <= 1.0 ? 0.0 : a - 1.0;
  const SupTResult s = sup_t_objective(w, r, t_lo);
  if (s.value.is_infinite()) {
    rep.value = ExtReal::infinity();
    return rep;
  }
  rep.value = ExtReal::finite(pos_part(s.value.value()));
  rep.optimizer.t_star = s.t_star.value();
  if (s.t_star.value() > 0.0) {
    const auto cap = detail::capacity_checked(
        w, RenyiOrder::from_alpha(1.0 + s.t_star.value()));
    rep.optimizer.input = cap.optimal_input;
    rep.optimizer.output = cap.optimal_output;
  }
  return rep;
}

// Strong converse exponent of Theorem 3 branches.
inline ExponentReport strong_converse_exponent(const Channel& w, double r,
                                               RenyiOrder order) {
  if (r < 0.0) throw Error("strong_converse_exponent: r must be >= 0");
  ExponentReport rep;
  rep.kind = ExponentKind::kStrongConverse;
  rep.order = order;
  rep.rate = r;

  if (order.is_zero() || order.is_one() || order.is_infinite() ||
      order.alpha() >= 1.0) {
    const auto cap = detail::capacity_checked(w, order);
    rep.value = ExtReal::finite(pos_part(cap.value - r));
    rep.optimizer.input = cap.optimal_input;
    rep.optimizer.output = cap.optimal_output;
    return rep;
  }

  const double a = order.alpha();
  std::map<double, CapacityResult> cache;
  auto cap_at = [&](double beta) -> const CapacityResult& {
    auto it = cache.find(beta);
    if (it == cache.end())
      it = cache
               .emplace(beta, detail::capacity_checked(
                                  w, RenyiOrder::from_alpha(beta)))
               .first;
    return it->second;
  };
  auto objective = [&](double beta) {
    if (beta >= 1.0 - 1e-12) return 0.0;
    const double lambda = a * (1.0 - beta) / (beta * (1.0 - a));
    return lambda * (cap_at(beta).value - r);
  };
  const detail::Max1D m = detail::maximize_scan_golden(objective, a, 1.0);
  double best_beta = m.x, best_v = m.value;
  // Endpoint checks.
  if (objective(a) >= best_v) {
    best_beta = a;
    best_v = objective(a);
  }
  if (0.0 >= best_v) {
    best_beta = 1.0;
    best_v = 0.0;
  }
  rep.value = ExtReal::finite(std::max(best_v, 0.0));
  rep.optimizer.beta_star = best_beta;
  if (best_beta < 1.0 - 1e-12) {
    const auto& cap = cap_at(best_beta);
    rep.optimizer.input = cap.optimal_input;
    rep.optimizer.output = cap.optimal_output;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Variational form of the strong converse exponent (Proposition 2): the
// inner problem tilts the channel toward a mutual-information target.

struct TiltedChannelResult {
  Channel w_tilde;
  double objective;    // (a/(1-a)) D(P Wt || P W) + |I(P Wt) - r|+
  double lambda_star;  // active weight on the rate term
  double mutual_info;  // I(X:Y) under P * w_tilde
};

namespace detail {

// Minimizes sum_x P(x) [ c D(u_x || W_x) + lambda D(u_x || Q) ] over rows
// u and the output reference Q jointly, by closed-form alternation
// (geometric-mean row updates against the current output marginal).
inline Channel tilt_for_lambda(const Channel& w, const Distribution& px,
                               double c, double lambda, Channel init) {
  if (lambda <= 0.0) return w;
  const int nx = w.input_size(), ny = w.output_size();
  Channel wh = std::move(init);
  const double wc = c / (c + lambda), wl = lambda / (c + lambda);
  double last = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 500; ++iter) {
    const Distribution q = wh.push_forward(px);
    std::vector<double> rows(static_cast<std::size_t>(nx) * ny, 0.0);
    double value = 0.0;
    for (int x = 0; x < nx; ++x) {
      if (px[x] == 0.0) {
        for (int y = 0; y < ny; ++y) rows[x * ny + y] = w(y, x);
        continue;
      }
      double z = 0.0;
      for (int y = 0; y < ny; ++y) {
        if (w(y, x) > 0.0 && q[y] > 0.0) {
          const double u = std::exp2(wc * std::log2(w(y, x)) +
                                     wl * std::log2(q[y]));
          rows[x * ny + y] = u;
          z += u;
        }
      }
      for (int y = 0; y < ny; ++y) rows[x * ny + y] /= z;
      value += px[x] * (c + lambda) * (-std::log2(z));
    }
    Channel next(nx, ny, std::move(rows));
    if (std::abs(last - value) < 1e-13 * (1.0 + std::abs(value))) {
      return next;
    }
    last = value;
    wh = std::move(next);
  }
  return wh;
}

inline double tilt_cost(const Channel& w, const Channel& wh,
                        const Distribution& px, double c) {
  double d = 0.0;
  for (int x = 0; x < px.size(); ++x) {
    if (px[x] == 0.0) continue;
    const auto terms = make_terms(wh.row(x), w.row(x));
    d += px[x] *
         renyi_divergence_terms(terms, RenyiOrder::one()).as_double();
  }
  return c * d;
}

}  // namespace detail

// argmin over channels What of
//   (a/(1-a)) D(P What || P W) + | I(X:Y)_{P What} - r |+
// solved through the exact scalarization max_{lambda in [0,1]} of the
// smooth alternating subproblem (the positive part is the upper envelope of
// the lambda-weighted penalties).
inline TiltedChannelResult sc_tilted_channel(const Channel& w,
                                             const Distribution& px, double r,
                                             double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error("sc_tilted_channel: alpha must be in (0,1)");
  const double c = alpha / (1.0 - alpha);

  auto inner = [&](double lambda) -> std::pair<double, Channel> {
    Channel wh = detail::tilt_for_lambda(w, px, c, lambda, w);
    const double cost = detail::tilt_cost(w, wh, px, c);
    const double mi =
        renyi_mutual_information(px, wh, RenyiOrder::one());
    return {cost + lambda * (mi - r), wh};
  };
  auto phi = [&](double lambda) { return inner(lambda).first; };

  const detail::Max1D m = detail::maximize_scan_golden(phi, 0.0, 1.0, 9,
                                                       1e-6);
  double lambda_star = m.x;
  if (phi(0.0) >= m.value) lambda_star = 0.0;
  if (phi(1.0) > std::max(m.value, phi(0.0))) lambda_star = 1.0;

  auto [val, wh] = inner(lambda_star);
  const double mi = renyi_mutual_information(px, wh, RenyiOrder::one());
  TiltedChannelResult res{std::move(wh), 0.0, lambda_star, mi};
  res.objective = detail::tilt_cost(w, res.w_tilde, px, c) +
                  pos_part(mi - r);
  return res;
}

// Proposition 2: max over inputs of the channel-tilting value. Budgeted for
// small alphabets; agrees with the beta-form of Theorem 3.
inline double variational_sc_exponent(const Channel& w, double r,
                                      double alpha,
                                      std::uint64_t seed = 0xABCDull) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw Error("variational_sc_exponent: alpha must be in (0,1)");
  if (w.input_size() * w.output_size() > 16)
    throw InfeasibleError(
        "variational_sc_exponent: |X| * |Y| must be <= 16");
  const double c = alpha / (1.0 - alpha);

  auto objective = [&](const Distribution& px) {
    return sc_tilted_channel(w, px, r, alpha).objective;
  };
  auto gradient = [&](const Distribution& px) {
    const TiltedChannelResult t = sc_tilted_channel(w, px, r, alpha);
    const Distribution q = t.w_tilde.push_forward(px);
    std::vector<double> g(px.size());
    for (int x = 0; x < px.size(); ++x) {
      const auto dterms = detail::make_terms(t.w_tilde.row(x), w.row(x));
      const auto qterms =
          detail::make_terms(t.w_tilde.row(x), q.probs());
      const double dw =
          renyi_divergence_terms(dterms, RenyiOrder::one()).as_double();
      const double dq =
          renyi_divergence_terms(qterms, RenyiOrder::one()).as_double();
      g[x] = std::min(c * dw + t.lambda_star * dq, 1e9);
    }
    return g;
  };

  const int nx = w.input_size();
  RandomStream rng(seed, 3);
  std::vector<Distribution> inits;
  inits.push_back(Distribution::uniform(nx));
  for (int i = 1; i <= 5; ++i) {
    RandomStream sub = rng.split(i);
    std::vector<double> p(nx);
    for (double& v : p) v = -std::log(1.0 - sub.next_double() + 1e-300);
    inits.push_back(Distribution(std::move(p)));
  }
  double best = -std::numeric_limits<double>::infinity();
  for (auto& init : inits) {
    const auto run =
        detail::ascend_on_simplex(objective, gradient, init, 80);
    best = std::max(best, run.value);
  }
  return std::max(best, 0.0);
}

// Theorem 1: the minimum communication rate for vanishing D_alpha.
inline double renyi_simulation_rate(const Channel& w, RenyiOrder order) {
  if (order.is_zero() || order.is_infinite() ||
      (order.is_finite_order() && order.alpha() > 1.0))
    return detail::capacity_checked(w, order).value;
  return detail::capacity_checked(w, RenyiOrder::one()).value;
}

// Theorem 5 one-shot converse, lifted to n uses by additivity:
// D_alpha(W^n, c) >= max_{a<=b<=1} lambda_b (n I_b - c)   (alpha in (0,1))
//                    |n I_alpha - c|+                     (alpha in [1,inf]).
inline double one_shot_converse_bound(const Channel& w, double c_bits,
                                      RenyiOrder order, int n = 1) {
  if (order.is_zero())
    throw Error("one_shot_converse_bound: alpha = 0 not covered");
  if (order.is_one() || order.is_infinite() || order.alpha() >= 1.0) {
    const double cap = detail::capacity_checked(w, order).value;
    return pos_part(n * cap - c_bits);
  }
  const ExponentReport rep =
      strong_converse_exponent(w, std::max(c_bits / n, 0.0), order);
  return n * rep.value.value();
}

}  // namespace chansim
