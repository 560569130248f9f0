#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "chansim/channel.hpp"
#include "chansim/distribution.hpp"
#include "chansim/errors.hpp"
#include "chansim/logspace.hpp"
#include "chansim/measures.hpp"
#include "chansim/parallel.hpp"
#include "chansim/rng.hpp"

namespace chansim {

struct CapacityOptions {
  double tol = 1e-6;
  long long max_iterations = 100000;
  int random_starts = 5;
  std::uint64_t seed = 0xC0FFEEull;
};

// Certified Renyi capacity. `value` is the dual (min-max) evaluation, an
// upper certificate; the primal (max over inputs) evaluation lies within
// duality_gap below it.
struct CapacityResult {
  double value = 0.0;
  double primal_value = 0.0;
  Distribution optimal_input;
  Distribution optimal_output;
  double duality_gap = 0.0;
  RenyiOrder order = RenyiOrder::one();
  long long iterations = 0;
};

namespace detail {

inline std::vector<double> simplex_project(std::vector<double> v) {
  // Euclidean projection onto the probability simplex.
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0, theta = 0.0;
  int rho = 0;
  for (int i = 0; i < static_cast<int>(u.size()); ++i) {
    css += u[i];
    const double t = (css - 1.0) / (i + 1);
    if (u[i] - t > 0.0) {
      rho = i + 1;
      theta = t;
    }
  }
  (void)rho;
  for (double& x : v) x = std::max(x - theta, 0.0);
  const double s = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= s;
  return v;
}

// The dual candidate induced by an input distribution: for finite alpha != 1
// the alpha-tilted output Q(y) ~ (sum_x P(x) W(y|x)^a)^(1/a); for alpha = 1
// the plain output distribution.
inline Distribution tilted_output(const Distribution& px, const Channel& w,
                                  RenyiOrder order) {
  if (order.is_one()) return w.push_forward(px);
  const double a = order.alpha();
  const int ny = w.output_size();
  std::vector<double> log2q(ny, kNegInf);
  for (int y = 0; y < ny; ++y) {
    Log2Accumulator acc;
    for (int x = 0; x < px.size(); ++x)
      if (px[x] > 0.0 && w(y, x) > 0.0)
        acc.add(std::log2(px[x]) + a * std::log2(w(y, x)));
    const double v = acc.total();
    if (v != kNegInf) log2q[y] = v / a;
  }
  const double norm = log2_sum(log2q);
  std::vector<double> q(ny, 0.0);
  for (int y = 0; y < ny; ++y)
    if (log2q[y] != kNegInf) q[y] = std::exp2(log2q[y] - norm);
  return Distribution(std::move(q));
}

// max_x D_alpha(W(.|x) || q), as a double (+inf possible).
inline double dual_value(const Channel& w, const Distribution& q,
                         RenyiOrder order) {
  double worst = -std::numeric_limits<double>::infinity();
  for (int x = 0; x < w.input_size(); ++x) {
    const auto terms = make_terms(w.row(x), q.probs());
    worst = std::max(worst,
                     renyi_divergence_terms(terms, order).as_double());
  }
  return worst;
}

// Gradient of the primal objective P -> I_alpha(X:Y) on the simplex, up to
// an additive constant (which projection ignores). Entries are clamped so
// support-violation infinities stay usable as ascent directions.
inline std::vector<double> primal_gradient(const Distribution& px,
                                           const Channel& w,
                                           RenyiOrder order) {
  constexpr double kClamp = 1e9;
  const Distribution q = tilted_output(px, w, order);
  const int nx = px.size();
  std::vector<double> g(nx);
  if (order.is_one()) {
    for (int x = 0; x < nx; ++x) {
      const auto terms = make_terms(w.row(x), q.probs());
      g[x] = std::min(renyi_divergence_terms(terms, order).as_double(),
                      kClamp);
    }
    return g;
  }
  const double a = order.alpha();
  const double f = renyi_mutual_information(px, w, order);
  for (int x = 0; x < nx; ++x) {
    const auto terms = make_terms(w.row(x), q.probs());
    const double dx = renyi_divergence_terms(terms, order).as_double();
    // df/dP(x) = 2^{(a-1)(D_x - f)} / ((a-1) ln 2)
    const double e = (a - 1.0) * (dx - f);
    const double val = std::exp2(std::min(e, 60.0)) / ((a - 1.0) * kLn2);
    g[x] = std::clamp(val, -kClamp, kClamp);
  }
  return g;
}

struct AscentResult {
  Distribution px;
  double value;
  long long iterations;
};

// Projected gradient ascent over the simplex with Armijo backtracking.
// Generic in the objective so the capacity primal and the variational
// strong-converse outer problem share one loop.
inline AscentResult ascend_on_simplex(
    const std::function<double(const Distribution&)>& objective,
    const std::function<std::vector<double>(const Distribution&)>& gradient,
    Distribution px, long long iter_budget) {
  double f = objective(px);
  double step = 1.0;
  long long it = 0;
  int stall = 0;
  while (it < iter_budget && stall < 3) {
    const std::vector<double> g = gradient(px);
    bool accepted = false;
    for (int bt = 0; bt < 60 && !accepted; ++bt, step *= 0.5) {
      std::vector<double> trial(px.probs().begin(), px.probs().end());
      for (int x = 0; x < px.size(); ++x) trial[x] += step * g[x];
      trial = simplex_project(std::move(trial));
      double descent = 0.0, move = 0.0;
      for (int x = 0; x < px.size(); ++x) {
        descent += g[x] * (trial[x] - px[x]);
        move = std::max(move, std::abs(trial[x] - px[x]));
      }
      if (move < 1e-16) break;
      Distribution cand(std::move(trial));
      const double fc = objective(cand);
      if (fc >= f + 1e-4 * std::max(descent, 0.0) && fc > f - 1e-18) {
        if (fc - f < 1e-15 * (1.0 + std::abs(f)))
          ++stall;
        else
          stall = 0;
        px = std::move(cand);
        f = fc;
        accepted = true;
        step *= 4.0;  // regrow after a success
      }
    }
    ++it;
    if (!accepted) break;
    step = std::clamp(step, 1e-12, 1e6);
  }
  return {std::move(px), f, it};
}

inline AscentResult ascend(Distribution px, const Channel& w,
                           RenyiOrder order, long long iter_budget) {
  return ascend_on_simplex(
      [&](const Distribution& p) {
        return renyi_mutual_information(p, w, order);
      },
      [&](const Distribution& p) { return primal_gradient(p, w, order); },
      std::move(px), iter_budget);
}

// Derivative-free coordinate polish of the dual candidate.
inline Distribution polish_dual(const Channel& w, Distribution q,
                                RenyiOrder order, double* best) {
  const int ny = w.output_size();
  for (double delta = 1e-3; delta >= 1e-10; delta *= 0.25) {
    bool improved = true;
    int rounds = 0;
    while (improved && rounds++ < 50) {
      improved = false;
      for (int y = 0; y < ny; ++y) {
        for (double sgn : {1.0, -1.0}) {
          std::vector<double> trial(q.probs().begin(), q.probs().end());
          trial[y] = std::max(trial[y] + sgn * delta, 0.0);
          Distribution cand{std::move(trial)};  // renormalizes
          const double v = dual_value(w, cand, order);
          if (v < *best - 1e-15) {
            *best = v;
            q = std::move(cand);
            improved = true;
          }
        }
      }
    }
  }
  return q;
}

// Exact zero-sum matrix game (row player maximizes q' A p over rows,
// column player minimizes over columns) by support-pair enumeration.
// Used for the combinatorial alpha = 0 capacity.
struct GameSolution {
  double value;
  std::vector<double> column_strategy;  // over columns (inputs)
  std::vector<double> row_strategy;     // over rows (outputs)
};

inline bool solve_linear(std::vector<std::vector<double>> m,
                         std::vector<double>& rhs) {
  const int n = static_cast<int>(rhs.size());
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    if (std::abs(m[piv][c]) < 1e-12) return false;
    std::swap(m[piv], m[c]);
    std::swap(rhs[piv], rhs[c]);
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const double k = m[r][c] / m[c][c];
      for (int cc = c; cc < n; ++cc) m[r][cc] -= k * m[c][cc];
      rhs[r] -= k * rhs[c];
    }
  }
  for (int c = 0; c < n; ++c) rhs[c] /= m[c][c];
  return true;
}

inline GameSolution solve_matrix_game(const std::vector<std::vector<double>>& a,
                                      int rows, int cols) {
  long long work = 0;
  auto choose = [](int n, int k) {
    double c = 1.0;
    for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
    return c;
  };
  for (int s = 1; s <= std::min(rows, cols); ++s)
    work += static_cast<long long>(choose(rows, s) * choose(cols, s));
  if (work > 2'000'000)
    throw InfeasibleError("matrix game: alphabets too large for exact "
                          "support enumeration");

  constexpr double kEps = 1e-9;
  std::optional<GameSolution> found;
  for (int s = 1; s <= std::min(rows, cols) && !found; ++s) {
    std::vector<int> rsel(s), csel(s);
    // Tries the current (rsel, csel) support pair; fills `found` on success.
    auto try_supports = [&]() -> bool {
      // Column strategy p on csel and value v:
      //   sum_c A(r, c) p(c) = v for r in rsel;  sum p = 1.
      std::vector<std::vector<double>> m(s + 1,
                                         std::vector<double>(s + 1, 0.0));
      std::vector<double> sol(s + 1, 0.0);
      for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) m[i][j] = a[rsel[i]][csel[j]];
        m[i][s] = -1.0;
      }
      for (int j = 0; j < s; ++j) m[s][j] = 1.0;
      sol[s] = 1.0;
      if (!solve_linear(m, sol)) return false;
      const double v = sol[s];
      for (int j = 0; j < s; ++j)
        if (sol[j] < -kEps) return false;
      // Row strategy from the transposed system.
      std::vector<std::vector<double>> mt(s + 1,
                                          std::vector<double>(s + 1, 0.0));
      std::vector<double> solt(s + 1, 0.0);
      for (int j = 0; j < s; ++j) {
        for (int i = 0; i < s; ++i) mt[j][i] = a[rsel[i]][csel[j]];
        mt[j][s] = -1.0;
      }
      for (int i = 0; i < s; ++i) mt[s][i] = 1.0;
      solt[s] = 1.0;
      if (!solve_linear(mt, solt)) return false;
      for (int i = 0; i < s; ++i)
        if (solt[i] < -kEps) return false;
      // Optimality outside the supports.
      for (int r = 0; r < rows; ++r) {
        double payoff = 0.0;
        for (int j = 0; j < s; ++j) payoff += a[r][csel[j]] * sol[j];
        if (payoff > v + kEps) return false;
      }
      for (int c = 0; c < cols; ++c) {
        double payoff = 0.0;
        for (int i = 0; i < s; ++i) payoff += solt[i] * a[rsel[i]][c];
        if (payoff < v - kEps) return false;
      }
      GameSolution gs;
      gs.value = v;
      gs.column_strategy.assign(cols, 0.0);
      for (int j = 0; j < s; ++j)
        gs.column_strategy[csel[j]] = std::max(sol[j], 0.0);
      gs.row_strategy.assign(rows, 0.0);
      for (int i = 0; i < s; ++i)
        gs.row_strategy[rsel[i]] = std::max(solt[i], 0.0);
      found = std::move(gs);
      return true;
    };
    std::function<bool(int, int)> pick_cols = [&](int depth,
                                                  int start) -> bool {
      if (depth == s) return try_supports();
      for (int c = start; c < cols; ++c) {
        csel[depth] = c;
        if (pick_cols(depth + 1, c + 1)) return true;
      }
      return false;
    };
    std::function<bool(int, int)> pick_rows = [&](int depth,
                                                  int start) -> bool {
      if (depth == s) return pick_cols(0, 0);
      for (int r = start; r < rows; ++r) {
        rsel[depth] = r;
        if (pick_rows(depth + 1, r + 1)) return true;
      }
      return false;
    };
    pick_rows(0, 0);
  }
  if (!found)
    throw Error("matrix game: no equilibrium found (numerical degeneracy)");
  return *found;
}

}  // namespace detail

inline CapacityResult renyi_capacity(const Channel& w, RenyiOrder order,
                                     const CapacityOptions& opts) {
  CapacityResult res;
  res.order = order;

  if (order.is_infinite()) {
    // I_inf = log2 sum_y max_x W(y|x); the normalized row-max vector is the
    // exact minimax output, and any full-support input is optimal.
    std::vector<double> rowmax(w.output_size(), 0.0);
    double z = 0.0;
    for (int y = 0; y < w.output_size(); ++y) {
      for (int x = 0; x < w.input_size(); ++x)
        rowmax[y] = std::max(rowmax[y], w(y, x));
      z += rowmax[y];
    }
    res.optimal_input = Distribution::uniform(w.input_size());
    res.optimal_output = Distribution(std::move(rowmax));
    res.primal_value =
        renyi_mutual_information(res.optimal_input, w, order);
    res.value = detail::dual_value(w, res.optimal_output, order);
    res.duality_gap = std::max(res.value - res.primal_value, 0.0);
    return res;
  }

  if (order.is_zero()) {
    // Support game: I_0 = -log2 min_P max_y sum_{x: W(y|x)>0} P(x).
    std::vector<std::vector<double>> a(
        w.output_size(), std::vector<double>(w.input_size(), 0.0));
    for (int y = 0; y < w.output_size(); ++y)
      for (int x = 0; x < w.input_size(); ++x)
        a[y][x] = w(y, x) > 0.0 ? 1.0 : 0.0;
    const detail::GameSolution gs =
        detail::solve_matrix_game(a, w.output_size(), w.input_size());
    res.optimal_input = Distribution(gs.column_strategy);
    res.optimal_output = Distribution(gs.row_strategy);
    res.primal_value =
        renyi_mutual_information(res.optimal_input, w, order);
    res.value = detail::dual_value(w, res.optimal_output, order);
    res.duality_gap = std::max(res.value - res.primal_value, 0.0);
    if (res.duality_gap > opts.tol)
      throw ConvergenceError("renyi_capacity: alpha=0 game residual",
                             res.duality_gap);
    return res;
  }

  // Finite alpha (including 1): primal multi-start ascent, dual certificate
  // from the tilted output, then a coordinate polish if the gap resists.
  const int nx = w.input_size();
  const int starts = 1 + opts.random_starts;
  const long long per_start =
      std::max<long long>(100, opts.max_iterations / (2 * starts));
  RandomStream rng(opts.seed, 17);

  std::vector<Distribution> inits;
  inits.push_back(Distribution::uniform(nx));
  for (int sidx = 1; sidx < starts; ++sidx) {
    RandomStream sub = rng.split(sidx);
    std::vector<double> p(nx);
    for (double& v : p) v = -std::log(1.0 - sub.next_double() + 1e-300);
    inits.push_back(Distribution(std::move(p)));
  }

  std::vector<detail::AscentResult> runs = parallel_map<detail::AscentResult>(
      starts, std::function<detail::AscentResult(int)>([&](int i) {
        return detail::ascend(inits[i], w, order, per_start);
      }));
  int best = 0;
  long long used = 0;
  for (int i = 0; i < starts; ++i) {
    used += runs[i].iterations;
    if (runs[i].value > runs[best].value) best = i;
  }

  detail::AscentResult top = runs[best];
  // Every run's tilted output is a valid dual certificate; keep the best.
  Distribution q = detail::tilted_output(top.px, w, order);
  double dual = detail::dual_value(w, q, order);
  for (int i = 0; i < starts; ++i) {
    if (i == best) continue;
    Distribution qi = detail::tilted_output(runs[i].px, w, order);
    const double di = detail::dual_value(w, qi, order);
    if (di < dual) {
      dual = di;
      q = std::move(qi);
    }
  }
  double gap = dual - top.value;

  int refine = 0;
  while (gap > opts.tol && used < opts.max_iterations && refine < 8) {
    const auto more =
        detail::ascend(top.px, w, order,
                       std::min<long long>(opts.max_iterations - used,
                                           4 * per_start));
    used += more.iterations;
    if (more.value > top.value) top = more;
    Distribution qt = detail::tilted_output(top.px, w, order);
    const double dt = detail::dual_value(w, qt, order);
    if (dt < dual) {
      dual = dt;
      q = qt;
    }
    if (dual - top.value > opts.tol) {
      double polished = dual;
      Distribution qp = detail::polish_dual(w, q, order, &polished);
      if (polished < dual) {
        dual = polished;
        q = qp;
      }
    }
    gap = dual - top.value;
    ++refine;
  }

  res.value = dual;
  res.primal_value = top.value;
  res.optimal_input = top.px;
  res.optimal_output = q;
  res.duality_gap = std::max(gap, 0.0);
  res.iterations = used;
  if (res.duality_gap > opts.tol)
    throw ConvergenceError("renyi_capacity: duality gap did not reach tol",
                           res.duality_gap);
  return res;
}

inline CapacityResult renyi_capacity(const Channel& w, RenyiOrder order,
                                     double tol = 1e-6) {
  CapacityOptions opts;
  opts.tol = tol;
  return renyi_capacity(w, order, opts);
}

struct RightDerivativeResult {
  double value;
  bool kink_flag;  // left/right secants disagree: capacity achiever may be
                   // non-unique at this order
};

// Right derivative of g(t) = t * I_{1+t}(W) by forward differences with
// Richardson extrapolation over steps h0, h0/2, h0/4.
inline RightDerivativeResult capacity_right_derivative(const Channel& w,
                                                       double t,
                                                       double h0 = 1e-3) {
  if (t < 0.0) throw Error("capacity_right_derivative: t must be >= 0");
  CapacityOptions opts;
  opts.tol = 1e-9;
  std::map<double, double> cache;
  auto g = [&](double tau) {
    if (tau <= 0.0) return 0.0;
    auto it = cache.find(tau);
    if (it != cache.end()) return it->second;
    const double v = tau * renyi_capacity(w, RenyiOrder::from_alpha(1.0 + tau),
                                          opts)
                               .value;
    cache[tau] = v;
    return v;
  };
  const double g0 = g(t);
  const double d1 = (g(t + h0) - g0) / h0;
  const double d2 = (g(t + h0 / 2) - g0) / (h0 / 2);
  const double d4 = (g(t + h0 / 4) - g0) / (h0 / 4);
  const double value = (8.0 * d4 - 6.0 * d2 + d1) / 3.0;

  bool kink = false;
  const double hs = h0 / 4;
  if (t >= hs) {
    const double left = (g0 - g(t - hs)) / hs;
    const double right = (g(t + hs) - g0) / hs;
    kink = std::abs(right - left) > 10.0 * (opts.tol + h0);
  }
  return {value, kink};
}

}  // namespace chansim
