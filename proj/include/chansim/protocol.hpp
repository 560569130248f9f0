#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "chansim/capacity.hpp"
#include "chansim/channel.hpp"
#include "chansim/distribution.hpp"
#include "chansim/errors.hpp"
#include "chansim/exponents.hpp"
#include "chansim/extended_real.hpp"
#include "chansim/logspace.hpp"
#include "chansim/measures.hpp"
#include "chansim/method_of_types.hpp"
#include "chansim/sampling.hpp"

namespace chansim {

// Schemes are stored semantically (parameters plus proposal); induced rows
// come from the rejection-sampling closed forms rather than materialized
// encoder tables.

// Block rejection sampling against a fixed product proposal: N = 2^{nr},
// N~ = ceil(ln2 * N * n * log2 n), proposal the order-(1+s) minimax output.
struct RateAboveParams {
  double s = 1.0;  // divergence order parameter; +inf allowed
  double rate = 0.0;
  long long n_budget = 1;       // N
  long long iteration_cap = 1;  // N~
  Distribution proposal;        // single-letter Q_Y
};

struct StrongConversePerType {
  TypeVector type;
  Channel w_tilde;        // per-type tilted sampling target
  Distribution proposal;  // Q_Y = w_tilde(T)
  long long n_budget;     // N_T
};

// Type-adaptive scheme: the input type is announced (log |P_n(X)| bits),
// then block rejection sampling targets the tilted channel for that type.
struct StrongConverseParams {
  double alpha = 0.5;
  double rate = 0.0;
  double delta = 0.05;
  long long iteration_cap = 1;  // N~ = 2^{nr+1}
  std::vector<StrongConversePerType> per_type;
};

// Bob ignores the index and emits a uniform word.
struct UniformFallbackParams {};

// Simulate the first n' letters with an inner scheme, pad the rest with a
// fixed product reference.
struct ProductSplitParams;

class SimulationScheme;
using SchemeKind = std::variant<RateAboveParams, StrongConverseParams,
                                UniformFallbackParams, ProductSplitParams>;

struct ProductSplitParams {
  std::shared_ptr<const SimulationScheme> inner;
  Distribution tail_proposal;
};

class SimulationScheme {
 public:
  SimulationScheme(int n, int output_size, long long message_budget,
                   SchemeKind kind)
      : n_(n),
        ny_(output_size),
        message_budget_(message_budget),
        kind_(std::move(kind)) {
    if (n_ < 1 || ny_ < 1 || message_budget_ < 1)
      throw Error("SimulationScheme: bad shape");
  }

  int blocklength() const { return n_; }
  int output_size() const { return ny_; }
  long long message_budget() const { return message_budget_; }
  double communication_bits() const {
    return std::log2(static_cast<double>(message_budget_));
  }
  const SchemeKind& kind() const { return kind_; }

  nlohmann::json to_json() const;
  static SimulationScheme from_json(const nlohmann::json& j);

 private:
  int n_;
  int ny_;
  long long message_budget_;
  SchemeKind kind_;
};

// ---------------------------------------------------------------------------
// Induced rows.

// One aggregated slice of an induced row: 2^log2_count output words, each
// with true-channel mass 2^log2_target and simulated mass 2^log2_induced.
struct RowGroup {
  double log2_count;
  double log2_target;
  double log2_induced;
};

struct InducedRow {
  std::vector<int> input_word;
  std::vector<RowGroup> groups;
  bool aggregated = true;

  // log2 of the induced row's total mass (should be ~0).
  double log2_mass() const {
    Log2Accumulator acc;
    for (const auto& g : groups) acc.add(g.log2_count + g.log2_induced);
    return acc.total();
  }

  // D_alpha( W^n(.|x^n) || induced(.|x^n) ).
  ExtReal divergence(RenyiOrder order) const {
    std::vector<MassTerm> terms(groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i)
      terms[i] = {groups[i].log2_count, groups[i].log2_target,
                  groups[i].log2_induced};
    return renyi_divergence_terms(terms, order);
  }
};

enum class RowMode { kAuto, kDense, kAggregated };

namespace detail {

// Per-group logs of a block row: multiplicity plus per-word log-mass under
// up to three single-letter kernels (true channel, sampling target,
// proposal).
struct PlacementGroup {
  double log2_count;
  double log2_w;       // true channel W^n
  double log2_target;  // sampling target (W or W~)
  double log2_q;       // product proposal
};

// Enumerates joint (x,y)-placements for a fixed input word, aggregated over
// the y-placement multinomials per input letter.
inline std::vector<PlacementGroup> enumerate_placements(
    const Channel& w, const Channel& target, const Distribution& q,
    std::span<const int> word, double cap = 2e6) {
  const int ny = w.output_size();
  const TypeVector xt = type_of_word(word, w.input_size());
  std::vector<int> present;
  double total = 1.0;
  for (int x = 0; x < w.input_size(); ++x)
    if (xt.counts[x] > 0) {
      present.push_back(x);
      total *= composition_count(xt.counts[x], ny);
      if (total > cap)
        throw InfeasibleError("induced_row: too many joint placements");
    }

  std::vector<PlacementGroup> groups{{0.0, 0.0, 0.0, 0.0}};
  for (int x : present) {
    std::vector<PlacementGroup> next;
    detail::for_each_composition(xt.counts[x], ny, [&](const std::vector<int>&
                                                           c) {
      PlacementGroup add{log2_multinomial(xt.counts[x], c), 0.0, 0.0, 0.0};
      for (int y = 0; y < ny; ++y) {
        if (c[y] == 0) continue;
        add.log2_w += c[y] * log2_safe(w(y, x));
        add.log2_target += c[y] * log2_safe(target(y, x));
        add.log2_q += c[y] * log2_safe(q[y]);
      }
      for (const auto& base : groups)
        next.push_back({base.log2_count + add.log2_count,
                        base.log2_w + add.log2_w,
                        base.log2_target + add.log2_target,
                        base.log2_q + add.log2_q});
    });
    groups = std::move(next);
    if (groups.size() > cap)
      throw InfeasibleError("induced_row: too many joint placements");
  }
  return groups;
}

// Dense (word-by-word) variant of the same table.
inline std::vector<PlacementGroup> enumerate_words(const Channel& w,
                                                   const Channel& target,
                                                   const Distribution& q,
                                                   std::span<const int> word) {
  const int n = static_cast<int>(word.size());
  const int ny = w.output_size();
  if (n * std::log2(static_cast<double>(ny)) > 24.0)
    throw InfeasibleError("induced_row: dense enumeration too large");
  long long count = 1;
  for (int i = 0; i < n; ++i) count *= ny;
  std::vector<PlacementGroup> groups;
  groups.reserve(count);
  std::vector<int> y(n, 0);
  for (long long idx = 0; idx < count; ++idx) {
    long long rem = idx;
    PlacementGroup g{0.0, 0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i) {
      const int yi = static_cast<int>(rem % ny);
      rem /= ny;
      g.log2_w += log2_safe(w(yi, word[i]));
      g.log2_target += log2_safe(target(yi, word[i]));
      g.log2_q += log2_safe(q[yi]);
    }
    groups.push_back(g);
  }
  return groups;
}

// Applies the clipped-rejection mixture to a placement table:
//   induced = (1 - p) min{target, N q}/m + p q,  p = (1 - m/N)^{N~}.
inline std::vector<RowGroup> rejection_mixture_rows(
    std::span<const PlacementGroup> table, double log2_n_budget,
    double iteration_cap) {
  std::vector<double> log2_bar(table.size());
  Log2Accumulator macc;
  for (std::size_t i = 0; i < table.size(); ++i) {
    log2_bar[i] = std::min(table[i].log2_target, log2_n_budget +
                                                     table[i].log2_q);
    macc.add(table[i].log2_count + log2_bar[i]);
  }
  const double log2_m = std::min(macc.total(), 0.0);
  const double log2_p =
      log2_pow_one_minus_exp2(std::min(log2_m - log2_n_budget, 0.0),
                              iteration_cap);
  const double log2_1mp = log2_one_minus_exp2(log2_p);
  std::vector<RowGroup> rows(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double kept = log2_1mp + log2_bar[i] - log2_m;
    const double fallback = log2_p + table[i].log2_q;
    rows[i] = {table[i].log2_count, table[i].log2_w,
               log2_add(kept, fallback)};
  }
  return rows;
}

inline std::vector<int> representative_word(const TypeVector& t) {
  std::vector<int> w;
  w.reserve(t.n);
  for (std::size_t x = 0; x < t.counts.size(); ++x)
    w.insert(w.end(), t.counts[x], static_cast<int>(x));
  return w;
}

}  // namespace detail

inline InducedRow induced_row(const SimulationScheme& scheme, const Channel& w,
                              std::span<const int> input_word,
                              RowMode mode = RowMode::kAuto);

namespace detail {

inline std::vector<PlacementGroup> make_table(const Channel& w,
                                              const Channel& target,
                                              const Distribution& q,
                                              std::span<const int> word,
                                              RowMode mode) {
  if (mode == RowMode::kDense) return enumerate_words(w, target, q, word);
  if (mode == RowMode::kAggregated)
    return enumerate_placements(w, target, q, word);
  try {
    return enumerate_placements(w, target, q, word);
  } catch (const InfeasibleError&) {
    return enumerate_words(w, target, q, word);
  }
}

}  // namespace detail

inline InducedRow induced_row(const SimulationScheme& scheme, const Channel& w,
                              std::span<const int> input_word,
                              RowMode mode) {
  if (static_cast<int>(input_word.size()) != scheme.blocklength())
    throw AlphabetMismatchError("induced_row: word length != blocklength");
  if (w.output_size() != scheme.output_size())
    throw AlphabetMismatchError("induced_row: output alphabet mismatch");
  InducedRow row;
  row.input_word.assign(input_word.begin(), input_word.end());
  row.aggregated = mode != RowMode::kDense;

  if (const auto* ra = std::get_if<RateAboveParams>(&scheme.kind())) {
    const auto table =
        detail::make_table(w, w, ra->proposal, input_word, mode);
    row.groups = detail::rejection_mixture_rows(
        table, std::log2(static_cast<double>(ra->n_budget)),
        static_cast<double>(ra->iteration_cap));
    return row;
  }
  if (const auto* sc = std::get_if<StrongConverseParams>(&scheme.kind())) {
    const TypeVector t = type_of_word(input_word, w.input_size());
    const StrongConversePerType* entry = nullptr;
    for (const auto& pt : sc->per_type)
      if (pt.type.counts == t.counts) {
        entry = &pt;
        break;
      }
    if (entry == nullptr)
      throw Error("induced_row: no per-type data for this input type");
    const auto table =
        detail::make_table(w, entry->w_tilde, entry->proposal, input_word,
                           mode);
    row.groups = detail::rejection_mixture_rows(
        table, std::log2(static_cast<double>(entry->n_budget)),
        static_cast<double>(sc->iteration_cap));
    return row;
  }
  if (std::holds_alternative<UniformFallbackParams>(scheme.kind())) {
    const Distribution uni = Distribution::uniform(w.output_size());
    const auto table = detail::make_table(w, w, uni, input_word, mode);
    const double log2_u =
        -static_cast<double>(scheme.blocklength()) *
        std::log2(static_cast<double>(w.output_size()));
    row.groups.reserve(table.size());
    for (const auto& g : table)
      row.groups.push_back({g.log2_count, g.log2_w, log2_u});
    return row;
  }
  const auto& ps = std::get<ProductSplitParams>(scheme.kind());
  const int n_inner = ps.inner->blocklength();
  const InducedRow head =
      induced_row(*ps.inner, w, input_word.subspan(0, n_inner), mode);
  const auto tail_table = detail::make_table(
      w, w, ps.tail_proposal, input_word.subspan(n_inner), mode);
  row.groups.reserve(head.groups.size() * tail_table.size());
  for (const auto& hg : head.groups)
    for (const auto& tg : tail_table)
      row.groups.push_back({hg.log2_count + tg.log2_count,
                            hg.log2_target + tg.log2_w,
                            hg.log2_induced + tg.log2_q});
  return row;
}

// Materializes the full induced transition matrix on X^n -> Y^n. Only for
// small blocks; otherwise use induced_row.
inline Channel induced_channel(const SimulationScheme& scheme,
                               const Channel& w,
                               long long entry_cap = 1 << 20) {
  const int n = scheme.blocklength();
  double entries = 1.0;
  for (int i = 0; i < n; ++i)
    entries *= static_cast<double>(w.input_size()) * w.output_size();
  if (entries > static_cast<double>(entry_cap))
    throw InfeasibleError(
        "induced_channel: matrix too large; use induced_row");

  long long nxn = 1, nyn = 1;
  for (int i = 0; i < n; ++i) {
    nxn *= w.input_size();
    nyn *= w.output_size();
  }
  std::vector<double> mat(static_cast<std::size_t>(nxn) * nyn);
  std::vector<int> word(n);
  for (long long xi = 0; xi < nxn; ++xi) {
    long long rem = xi;
    for (int i = 0; i < n; ++i) {
      word[i] = static_cast<int>(rem % w.input_size());
      rem /= w.input_size();
    }
    const InducedRow row = induced_row(scheme, w, word, RowMode::kDense);
    for (long long yi = 0; yi < nyn; ++yi)
      mat[xi * nyn + yi] = std::exp2(row.groups[yi].log2_induced);
  }
  return Channel(static_cast<int>(nxn), static_cast<int>(nyn),
                 std::move(mat));
}

// max over input words (one representative per type; both scheme families
// are input-permutation covariant) of the per-row divergence.
inline ExtReal simulation_performance(const Channel& w,
                                      const SimulationScheme& scheme,
                                      RenyiOrder order) {
  if (const auto* ps = std::get_if<ProductSplitParams>(&scheme.kind())) {
    const ExtReal head = simulation_performance(w, *ps->inner, order);
    if (head.is_infinite()) return head;
    double tail_worst = 0.0;
    for (int x = 0; x < w.input_size(); ++x) {
      const auto terms =
          detail::make_terms(w.row(x), ps->tail_proposal.probs());
      const ExtReal d = renyi_divergence_terms(terms, order);
      if (d.is_infinite()) return ExtReal::infinity();
      tail_worst = std::max(tail_worst, d.value());
    }
    const int tail_len = scheme.blocklength() - ps->inner->blocklength();
    return ExtReal::finite(head.value() + tail_len * tail_worst);
  }
  ExtReal worst = ExtReal::finite(-std::numeric_limits<double>::max());
  for (const TypeVector& t :
       enumerate_types(w.input_size(), scheme.blocklength())) {
    const std::vector<int> word = detail::representative_word(t);
    const ExtReal d = induced_row(scheme, w, word).divergence(order);
    if (worst < d) worst = d;
    if (worst.is_infinite()) break;
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Builders.

namespace detail {

inline long long checked_exp2_round(double bits, const char* where) {
  if (bits > 50.0)
    throw InfeasibleError(std::string(where) +
                          ": budget exponent too large (n*r > 50 bits)");
  return std::max<long long>(1, std::llround(std::exp2(bits)));
}

}  // namespace detail

// Reliability-regime scheme: N = 2^{nr}, N~ = ceil(ln2 N n log2 n), with
// the order-(1+s) minimax output as the shared proposal.
inline SimulationScheme build_rf_scheme(const Channel& w, int n, double r,
                                        double s) {
  if (n < 1 || r < 0.0 || !(s > 0.0))
    throw Error("build_rf_scheme: need n >= 1, r >= 0, s > 0");
  const RenyiOrder order = std::isinf(s) ? RenyiOrder::infinity()
                                         : RenyiOrder::from_alpha(1.0 + s);
  const CapacityResult cap = detail::capacity_checked(w, order);
  RateAboveParams params;
  params.s = s;
  params.rate = r;
  params.n_budget = detail::checked_exp2_round(n * r, "build_rf_scheme");
  const double tilde =
      kLn2 * static_cast<double>(params.n_budget) * n * std::log2(double(n));
  params.iteration_cap =
      std::max<long long>(1, static_cast<long long>(std::ceil(tilde)));
  params.proposal = cap.optimal_output;
  const long long budget = params.iteration_cap + 1;
  return SimulationScheme(n, w.output_size(), budget, std::move(params));
}

// Strong-converse-regime scheme: announce the input type, tilt the channel
// per type, then block rejection sampling with N = 2^{n(I + delta)} and
// N~ = 2^{nr + 1}.
inline SimulationScheme build_sc_scheme(const Channel& w, int n, double r,
                                        double alpha, double delta = 0.05) {
  if (n < 1 || r < 0.0 || !(alpha > 0.0 && alpha < 1.0) || !(delta > 0.0))
    throw Error("build_sc_scheme: need n >= 1, r >= 0, alpha in (0,1), "
                "delta > 0");
  StrongConverseParams params;
  params.alpha = alpha;
  params.rate = r;
  params.delta = delta;
  params.iteration_cap =
      detail::checked_exp2_round(n * r + 1.0, "build_sc_scheme");
  const auto types = enumerate_types(w.input_size(), n);
  for (const TypeVector& t : types) {
    const Distribution tx = t.as_distribution();
    TiltedChannelResult tilt = sc_tilted_channel(w, tx, r, alpha);
    StrongConversePerType entry{
        t, std::move(tilt.w_tilde), Distribution::uniform(w.output_size()),
        1};
    entry.proposal = entry.w_tilde.push_forward(tx);
    entry.n_budget = detail::checked_exp2_round(
        n * (tilt.mutual_info + delta), "build_sc_scheme");
    params.per_type.push_back(std::move(entry));
  }
  const long long budget =
      static_cast<long long>(types.size()) * (params.iteration_cap + 1);
  return SimulationScheme(n, w.output_size(), budget, std::move(params));
}

inline SimulationScheme build_uniform_fallback(const Channel& w, int n,
                                               long long message_budget = 1) {
  return SimulationScheme(n, w.output_size(), message_budget,
                          UniformFallbackParams{});
}

// The rate-splitting construction for orders >= 1: run a good scheme at
// rate r' = I_alpha + delta on the first n' = floor(n r / r') letters and
// pad the remaining letters with the minimax reference output.
inline SimulationScheme build_product_split(const Channel& w, int n, double r,
                                            RenyiOrder order,
                                            double delta = 0.05) {
  if (order.is_zero() || (order.is_finite_order() && order.alpha() < 1.0))
    throw Error("build_product_split: order must be >= 1");
  const CapacityResult cap = detail::capacity_checked(w, order);
  const double r_prime = cap.value + delta;
  const int n_prime =
      static_cast<int>(std::floor(n * r / std::max(r_prime, 1e-12)));
  if (n_prime < 1 || n_prime > n)
    throw InfeasibleError("build_product_split: empty inner block");
  const double s = order.is_infinite()
                       ? std::numeric_limits<double>::infinity()
                       : std::max(order.alpha() - 1.0, 1.0);
  auto inner = std::make_shared<SimulationScheme>(
      build_rf_scheme(w, n_prime, r_prime, s));
  ProductSplitParams params{inner, cap.optimal_output};
  return SimulationScheme(n, w.output_size(), inner->message_budget(),
                          std::move(params));
}

// ---------------------------------------------------------------------------
// The reference output of the converse argument: averaging the decoder over
// shared randomness and a uniform message gives a Q with
// P_X . N <= 2^c P_X x Q for every input distribution.
inline Distribution ubound_reference(const SimulationScheme& scheme) {
  const int n = scheme.blocklength();
  const int ny = scheme.output_size();
  double size = 1.0;
  for (int i = 0; i < n; ++i) size *= ny;
  if (size > static_cast<double>(1 << 20))
    throw InfeasibleError("ubound_reference: output block too large");
  const long long nyn = static_cast<long long>(size);

  auto product_of = [&](const Distribution& q) {
    std::vector<double> out(nyn, 1.0);
    for (long long yi = 0; yi < nyn; ++yi) {
      long long rem = yi;
      for (int i = 0; i < n; ++i) {
        out[yi] *= q[static_cast<int>(rem % ny)];
        rem /= ny;
      }
    }
    return out;
  };

  if (const auto* ra = std::get_if<RateAboveParams>(&scheme.kind()))
    return Distribution(product_of(ra->proposal));
  if (const auto* sc = std::get_if<StrongConverseParams>(&scheme.kind())) {
    std::vector<double> mix(nyn, 0.0);
    for (const auto& pt : sc->per_type) {
      const auto q = product_of(pt.proposal);
      for (long long yi = 0; yi < nyn; ++yi)
        mix[yi] += q[yi] / static_cast<double>(sc->per_type.size());
    }
    return Distribution(std::move(mix));
  }
  if (std::holds_alternative<UniformFallbackParams>(scheme.kind()))
    return Distribution::uniform(static_cast<int>(nyn));

  const auto& ps = std::get<ProductSplitParams>(scheme.kind());
  const Distribution head = ubound_reference(*ps.inner);
  const int tail_len = n - ps.inner->blocklength();
  long long tail_size = 1;
  for (int i = 0; i < tail_len; ++i) tail_size *= ny;
  std::vector<double> out(nyn);
  for (long long hi = 0; hi < head.size(); ++hi) {
    for (long long ti = 0; ti < tail_size; ++ti) {
      double tq = 1.0;
      long long rem = ti;
      for (int i = 0; i < tail_len; ++i) {
        tq *= ps.tail_proposal[static_cast<int>(rem % ny)];
        rem /= ny;
      }
      // word index: head varies in the low digits (matches induced_channel
      // digit order, head letters first)
      out[hi + ti * head.size()] = head[static_cast<int>(hi)] * tq;
    }
  }
  return Distribution(std::move(out));
}

// ---------------------------------------------------------------------------
// Serialization (replayable scheme descriptions).

inline nlohmann::json SimulationScheme::to_json() const {
  nlohmann::json j;
  j["n"] = n_;
  j["output_size"] = ny_;
  j["message_budget"] = message_budget_;
  if (const auto* ra = std::get_if<RateAboveParams>(&kind_)) {
    j["kind"] = "rate_above";
    j["s"] = std::isinf(ra->s) ? -1.0 : ra->s;
    j["rate"] = ra->rate;
    j["n_budget"] = ra->n_budget;
    j["iteration_cap"] = ra->iteration_cap;
    j["proposal"] = std::vector<double>(ra->proposal.probs().begin(),
                                        ra->proposal.probs().end());
  } else if (const auto* sc = std::get_if<StrongConverseParams>(&kind_)) {
    j["kind"] = "strong_converse";
    j["alpha"] = sc->alpha;
    j["rate"] = sc->rate;
    j["delta"] = sc->delta;
    j["iteration_cap"] = sc->iteration_cap;
    nlohmann::json per = nlohmann::json::array();
    for (const auto& pt : sc->per_type) {
      nlohmann::json e;
      e["counts"] = pt.type.counts;
      e["n_budget"] = pt.n_budget;
      std::vector<std::vector<double>> rows;
      for (int x = 0; x < pt.w_tilde.input_size(); ++x)
        rows.emplace_back(pt.w_tilde.row(x).begin(), pt.w_tilde.row(x).end());
      e["w_tilde"] = rows;
      e["proposal"] = std::vector<double>(pt.proposal.probs().begin(),
                                          pt.proposal.probs().end());
      per.push_back(std::move(e));
    }
    j["per_type"] = std::move(per);
  } else if (std::holds_alternative<UniformFallbackParams>(kind_)) {
    j["kind"] = "uniform_fallback";
  } else {
    const auto& ps = std::get<ProductSplitParams>(kind_);
    j["kind"] = "product_split";
    j["inner"] = ps.inner->to_json();
    j["tail_proposal"] = std::vector<double>(
        ps.tail_proposal.probs().begin(), ps.tail_proposal.probs().end());
  }
  return j;
}

inline SimulationScheme SimulationScheme::from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  const int ny = j.at("output_size").get<int>();
  const long long budget = j.at("message_budget").get<long long>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "rate_above") {
    RateAboveParams p;
    const double s = j.at("s").get<double>();
    p.s = s < 0.0 ? std::numeric_limits<double>::infinity() : s;
    p.rate = j.at("rate").get<double>();
    p.n_budget = j.at("n_budget").get<long long>();
    p.iteration_cap = j.at("iteration_cap").get<long long>();
    p.proposal = Distribution(j.at("proposal").get<std::vector<double>>());
    return SimulationScheme(n, ny, budget, std::move(p));
  }
  if (kind == "strong_converse") {
    StrongConverseParams p;
    p.alpha = j.at("alpha").get<double>();
    p.rate = j.at("rate").get<double>();
    p.delta = j.at("delta").get<double>();
    p.iteration_cap = j.at("iteration_cap").get<long long>();
    for (const auto& e : j.at("per_type")) {
      const auto counts = e.at("counts").get<std::vector<int>>();
      const auto rows =
          e.at("w_tilde").get<std::vector<std::vector<double>>>();
      std::vector<double> flat;
      for (const auto& rrow : rows)
        flat.insert(flat.end(), rrow.begin(), rrow.end());
      StrongConversePerType pt{
          TypeVector{counts, n},
          Channel(static_cast<int>(rows.size()),
                  static_cast<int>(rows.front().size()), std::move(flat)),
          Distribution(e.at("proposal").get<std::vector<double>>()),
          e.at("n_budget").get<long long>()};
      p.per_type.push_back(std::move(pt));
    }
    return SimulationScheme(n, ny, budget, std::move(p));
  }
  if (kind == "uniform_fallback")
    return SimulationScheme(n, ny, budget, UniformFallbackParams{});
  if (kind == "product_split") {
    auto inner =
        std::make_shared<SimulationScheme>(from_json(j.at("inner")));
    ProductSplitParams p{
        std::move(inner),
        Distribution(j.at("tail_proposal").get<std::vector<double>>())};
    return SimulationScheme(n, ny, budget, std::move(p));
  }
  throw Error("SimulationScheme::from_json: unknown kind " + kind);
}

}  // namespace chansim
