#include "chansim/protocol.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "chansim/capacity.hpp"
#include "chansim/sampling.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

namespace chansim {
namespace {

using testutil::random_channel;
using testutil::random_distribution;

double cap_at(const Channel& w, double alpha) {
  return renyi_capacity(w, RenyiOrder::from_alpha(alpha), 1e-9).value;
}

std::vector<double> dense_row_linear(const InducedRow& row) {
  std::vector<double> r(row.groups.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = std::exp2(row.groups[i].log2_induced);
  return r;
}

TEST(BuildRfScheme, BudgetsFollowTheConstruction) {
  const Channel w = Channel::bsc(0.1);
  const int n = 6;
  const double r = 0.8;
  const SimulationScheme scheme = build_rf_scheme(w, n, r, 1.0);
  const auto& ra = std::get<RateAboveParams>(scheme.kind());
  EXPECT_EQ(ra.n_budget, std::llround(std::exp2(n * r)));
  const double tilde = kLn2 * ra.n_budget * n * std::log2(double(n));
  EXPECT_EQ(ra.iteration_cap, static_cast<long long>(std::ceil(tilde)));
  EXPECT_EQ(scheme.message_budget(), ra.iteration_cap + 1);
  EXPECT_NEAR(scheme.communication_bits(),
              std::log2(double(ra.iteration_cap + 1)), 1e-12);
}

TEST(InducedRow, SingleLetterMatchesRejectionSampling) {
  const Channel w = Channel::bsc(0.2);
  const SimulationScheme scheme = build_rf_scheme(w, 1, 1.0, 1.0);
  const auto& ra = std::get<RateAboveParams>(scheme.kind());
  const std::vector<int> word = {0};
  const InducedRow row = induced_row(scheme, w, word, RowMode::kDense);
  const RejectionPlan plan(w.row_distribution(0), ra.proposal, ra.n_budget,
                           ra.iteration_cap);
  const RejectionOutput exact = rejection_output_distribution(plan);
  const auto linear = dense_row_linear(row);
  for (int y = 0; y < 2; ++y)
    EXPECT_NEAR(linear[y], exact.s_dist[y], 1e-12);
}

TEST(InducedRow, BlockPairMatchesEnumerationOracle) {
  const Channel w = Channel::bsc(0.1);
  const double r = cap_at(w, 2.0) + 0.1;
  const SimulationScheme scheme = build_rf_scheme(w, 2, r, 1.0);
  const auto& ra = std::get<RateAboveParams>(scheme.kind());
  const std::vector<int> word = {0, 1};
  const InducedRow row = induced_row(scheme, w, word, RowMode::kDense);
  const auto linear = dense_row_linear(row);
  const auto ref = oracle::block_rejection_row(
      w, w,
      std::vector<double>(ra.proposal.probs().begin(),
                          ra.proposal.probs().end()),
      word, ra.n_budget, static_cast<double>(ra.iteration_cap));
  ASSERT_EQ(linear.size(), ref.row.size());
  for (std::size_t y = 0; y < ref.row.size(); ++y)
    EXPECT_NEAR(linear[y], ref.row[y], 1e-12);
}

TEST(InducedRow, RowsAreNormalized) {
  RandomStream rng(163, 0);
  const Channel w = random_channel(rng, 2, 3);
  const SimulationScheme scheme = build_rf_scheme(w, 4, 0.6, 1.0);
  const std::vector<int> word = {0, 1, 1, 0};
  for (RowMode mode : {RowMode::kDense, RowMode::kAggregated}) {
    const InducedRow row = induced_row(scheme, w, word, mode);
    EXPECT_NEAR(row.log2_mass(), 0.0, 1e-9);
  }
}

TEST(InducedRow, AggregatedAgreesWithDenseEnumeration) {
  const Channel w = Channel::bsc(0.1);
  const double r = cap_at(w, 2.0) + 0.1;
  const SimulationScheme scheme = build_rf_scheme(w, 8, r, 1.0);
  std::vector<int> word = {0, 0, 0, 1, 1, 0, 1, 0};
  const InducedRow agg = induced_row(scheme, w, word, RowMode::kAggregated);
  const InducedRow dense = induced_row(scheme, w, word, RowMode::kDense);
  for (double alpha : {0.5, 1.0, 2.0}) {
    const RenyiOrder order = RenyiOrder::from_alpha(alpha);
    EXPECT_NEAR(agg.divergence(order).value(),
                dense.divergence(order).value(), 1e-10);
  }
  EXPECT_NEAR(agg.log2_mass(), dense.log2_mass(), 1e-10);
}

TEST(InducedRow, PermutationCovariant) {
  const Channel w = Channel::bsc(0.1);
  const SimulationScheme scheme = build_rf_scheme(w, 6, 0.85, 1.0);
  const std::vector<int> a = {0, 1, 0, 1, 1, 0};
  const std::vector<int> b = {1, 1, 1, 0, 0, 0};
  const RenyiOrder order = RenyiOrder::finite(2.0);
  EXPECT_NEAR(induced_row(scheme, w, a).divergence(order).value(),
              induced_row(scheme, w, b).divergence(order).value(), 1e-12);
}

TEST(InducedRow, UniformFallbackRows) {
  const Channel w = Channel::bsc(0.3);
  const int n = 3;
  const SimulationScheme scheme = build_uniform_fallback(w, n);
  const std::vector<int> word = {0, 1, 0};
  const InducedRow row = induced_row(scheme, w, word, RowMode::kDense);
  for (const auto& g : row.groups)
    EXPECT_NEAR(g.log2_induced, -3.0, 1e-12);
  // order-(1+s) divergence against uniform rows is at most n log2|Y|
  for (double alpha : {1.5, 2.0, 4.0})
    EXPECT_LE(
        row.divergence(RenyiOrder::finite(alpha)).value(),
        n * std::log2(2.0) + 1e-12);
}

TEST(SimulationPerformance, MatchesFullWordEnumeration) {
  const Channel w = Channel::bsc(0.1);
  const double r = cap_at(w, 2.0) + 0.1;
  const int n = 6;
  const SimulationScheme scheme = build_rf_scheme(w, n, r, 1.0);
  const RenyiOrder order = RenyiOrder::finite(2.0);
  const double via_types = simulation_performance(w, scheme, order).value();
  double brute = -std::numeric_limits<double>::infinity();
  for (int bits = 0; bits < (1 << n); ++bits) {
    std::vector<int> word(n);
    for (int i = 0; i < n; ++i) word[i] = (bits >> i) & 1;
    brute = std::max(brute,
                     induced_row(scheme, w, word).divergence(order).value());
  }
  EXPECT_NEAR(via_types, brute, 1e-12);
}

TEST(SimulationPerformance, ExactRegimeVanishes) {
  const Channel w = Channel::bsc(0.1);
  const double r = std::log2(1.8) + 0.2;
  const SimulationScheme scheme = build_rf_scheme(
      w, 4, r, std::numeric_limits<double>::infinity());
  const double d =
      simulation_performance(w, scheme, RenyiOrder::infinity()).value();
  EXPECT_GE(d, 0.0);
  EXPECT_LE(d, 1e-3);
}

TEST(SimulationPerformance, RfSchemeRespectsAchievableBound) {
  const Channel w = Channel::bsc(0.1);
  const double i2 = cap_at(w, 2.0);
  const double r = i2 + 0.1;
  const double s = 1.0;
  for (int n = 4; n <= 8; ++n) {
    const SimulationScheme scheme = build_rf_scheme(w, n, r, s);
    const auto& ra = std::get<RateAboveParams>(scheme.kind());
    const double d =
        simulation_performance(w, scheme, RenyiOrder::finite(2.0)).value();
    // block bound with the scheme's own budgets
    const double log2n = std::log2(double(ra.n_budget));
    const double excl = std::exp2(-s * (log2n - n * i2));
    const double pbound = std::pow(
        1.0 - (1.0 - excl) / double(ra.n_budget), double(ra.iteration_cap));
    const double bound =
        excl / (s * kLn2) + pbound / ((1.0 - pbound) * kLn2);
    EXPECT_GT(d, 0.0);
    EXPECT_LE(d, bound + 1e-12) << "n = " << n;
  }
}

TEST(BuildRfScheme, CommunicationRateConvergesToTarget) {
  const Channel w = Channel::bsc(0.1);
  const double r = 0.8;
  for (int n = 2; n <= 12; ++n) {
    const SimulationScheme scheme = build_rf_scheme(w, n, r, 1.0);
    const double gap = scheme.communication_bits() / n - r;
    const double envelope =
        (std::log2(2.0 * n * std::log2(double(n))) + 2.0) / n;
    EXPECT_LE(std::abs(gap), envelope) << "n = " << n;
  }
}

TEST(BuildScScheme, KeepsChannelWhenRateIsAboveMutualInformation) {
  const Channel w = Channel::bsc(0.1);
  const double r = 1.0;  // above I(W)
  const SimulationScheme scheme = build_sc_scheme(w, 3, r, 0.5, 0.05);
  const auto& sc = std::get<StrongConverseParams>(scheme.kind());
  for (const auto& pt : sc.per_type)
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        EXPECT_NEAR(pt.w_tilde(y, x), w(y, x), 1e-6);
}

TEST(BuildScScheme, ConstantRowsStayPut) {
  const Channel w = Channel::constant_rows(2, Distribution({0.3, 0.7}));
  const SimulationScheme scheme = build_sc_scheme(w, 3, 0.2, 0.5, 0.05);
  const auto& sc = std::get<StrongConverseParams>(scheme.kind());
  for (const auto& pt : sc.per_type)
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        EXPECT_NEAR(pt.w_tilde(y, x), w(y, x), 1e-7);
}

// Dense 2-parameter scan over binary channels as an independent check of
// the per-type tilt objective.
TEST(BuildScScheme, PerTypeObjectiveMatchesGridScan) {
  const Channel w = Channel::bsc(0.1);
  const double alpha = 0.5, r = 0.1;
  const double c = alpha / (1.0 - alpha);
  const SimulationScheme scheme = build_sc_scheme(w, 4, r, alpha, 0.05);
  const auto& sc = std::get<StrongConverseParams>(scheme.kind());
  for (const auto& pt : sc.per_type) {
    const Distribution tx = pt.type.as_distribution();
    auto theta = [&](double a, double b) {
      const Channel what(2, 2, {a, 1.0 - a, b, 1.0 - b});
      double kl = 0.0;
      for (int x = 0; x < 2; ++x) {
        if (tx[x] == 0.0) continue;
        kl += tx[x] * relative_entropy(what.row_distribution(x),
                                       NonnegVector(w.row_distribution(x)))
                          .as_double();
      }
      const double mi =
          renyi_mutual_information(tx, what, RenyiOrder::one());
      return c * kl + pos_part(mi - r);
    };
    double grid = std::numeric_limits<double>::infinity();
    for (double a = 0.001; a < 1.0; a += 0.002)
      for (double b = 0.001; b < 1.0; b += 0.002)
        grid = std::min(grid, theta(a, b));
    const double ours = theta(pt.w_tilde(0, 0), pt.w_tilde(0, 1));
    EXPECT_LE(ours, grid + 1e-3);
    EXPECT_GE(ours, grid - 1e-3);
  }
}

TEST(UboundReference, UniformFallbackAndSingleMessage) {
  const Channel w = Channel::bsc(0.25);
  const SimulationScheme scheme = build_uniform_fallback(w, 2, 1);
  const Distribution q = ubound_reference(scheme);
  for (int i = 0; i < q.size(); ++i) EXPECT_NEAR(q[i], 0.25, 1e-15);
  // message budget 1 => c = 0 and the induced row equals q exactly
  const Channel induced = induced_channel(scheme, w);
  for (int x = 0; x < induced.input_size(); ++x)
    for (int y = 0; y < induced.output_size(); ++y)
      EXPECT_NEAR(induced(y, x), q[y], 1e-12);
  EXPECT_NEAR(scheme.communication_bits(), 0.0, 1e-15);
}

TEST(UboundReference, DominatesInducedRowsAtTrueCost) {
  RandomStream rng(167, 0);
  const Channel w = Channel::bsc(0.1);
  const SimulationScheme scheme = build_rf_scheme(w, 4, 0.5, 1.0);
  const Distribution q = ubound_reference(scheme);
  const Channel induced = induced_channel(scheme, w);
  const double scale = std::exp2(scheme.communication_bits());
  for (int trial = 0; trial < 10; ++trial) {
    const Distribution px = random_distribution(rng, induced.input_size());
    double min_slack = std::numeric_limits<double>::infinity();
    for (int x = 0; x < induced.input_size(); ++x)
      for (int y = 0; y < induced.output_size(); ++y)
        min_slack = std::min(
            min_slack, px[x] * (scale * q[y] - induced(y, x)));
    EXPECT_GE(min_slack, -1e-12);
  }
}

TEST(InducedChannel, MaterializesSmallBlocksOnly) {
  const Channel w = Channel::bsc(0.1);
  const SimulationScheme small = build_rf_scheme(w, 2, 0.8, 1.0);
  const Channel mat = induced_channel(small, w);
  EXPECT_EQ(mat.input_size(), 4);
  EXPECT_EQ(mat.output_size(), 4);
  const SimulationScheme big = build_rf_scheme(w, 12, 0.8, 1.0);
  EXPECT_THROW(induced_channel(big, w), InfeasibleError);
}

TEST(ProductSplit, ComposesInnerAndTail) {
  const Channel w = Channel::bsc(0.1);
  const SimulationScheme scheme =
      build_product_split(w, 6, 0.4, RenyiOrder::finite(2.0), 0.05);
  const auto& ps = std::get<ProductSplitParams>(scheme.kind());
  ASSERT_GE(ps.inner->blocklength(), 1);
  ASSERT_LT(ps.inner->blocklength(), 6);
  const RenyiOrder order = RenyiOrder::finite(2.0);
  const double whole = simulation_performance(w, scheme, order).value();
  const double head =
      simulation_performance(w, *ps.inner, order).value();
  double tail_worst = 0.0;
  for (int x = 0; x < 2; ++x)
    tail_worst = std::max(
        tail_worst,
        renyi_divergence(w.row_distribution(x),
                         NonnegVector(ps.tail_proposal), order)
            .value());
  const int tail_len = 6 - ps.inner->blocklength();
  EXPECT_NEAR(whole, head + tail_len * tail_worst, 1e-9);
  // linear-in-n growth at most I_alpha per padded letter
  EXPECT_LE(tail_worst, cap_at(w, 2.0) + 1e-6);
}

TEST(SchemeSerialization, RoundTripsAllKinds) {
  const Channel w = Channel::bsc(0.1);
  const std::vector<int> word = {0, 1, 0};
  const RenyiOrder order = RenyiOrder::finite(2.0);
  const std::vector<SimulationScheme> schemes = {
      build_rf_scheme(w, 3, 0.9, 1.0),
      build_sc_scheme(w, 3, 0.2, 0.5, 0.05),
      build_uniform_fallback(w, 3, 4),
      build_product_split(w, 3, 0.4, RenyiOrder::finite(2.0), 0.3)};
  for (const auto& scheme : schemes) {
    const SimulationScheme copy =
        SimulationScheme::from_json(scheme.to_json());
    EXPECT_EQ(copy.message_budget(), scheme.message_budget());
    EXPECT_EQ(copy.blocklength(), scheme.blocklength());
    const double a = induced_row(scheme, w, word).divergence(order)
                         .as_double();
    const double b =
        induced_row(copy, w, word).divergence(order).as_double();
    EXPECT_NEAR(a, b, 1e-12);
  }
}

TEST(OneShotConverse, BuiltSchemesRespectTheBound) {
  const Channel w = Channel::bsc(0.1);
  const SimulationScheme rf = build_rf_scheme(w, 3, 0.15, 1.0);
  const SimulationScheme sc = build_sc_scheme(w, 3, 0.15, 0.5, 0.05);
  for (const auto* scheme : {&rf, &sc}) {
    for (double alpha : {0.5, 1.0, 2.0}) {
      const RenyiOrder order = RenyiOrder::from_alpha(alpha);
      const double d =
          simulation_performance(w, *scheme, order).as_double();
      const double bound = one_shot_converse_bound(
          w, scheme->communication_bits(), order, 3);
      EXPECT_GE(d, bound - 1e-9) << "alpha " << alpha;
    }
  }
}

}  // namespace
}  // namespace chansim
