#include "chansim/method_of_types.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "chansim/channel.hpp"
#include "chansim/measures.hpp"
#include "testutil.hpp"

namespace chansim {
namespace {

JointDistribution bsc_joint(double flip) {
  return Channel::bsc(flip).joint_with_input(Distribution::uniform(2));
}

TEST(EnumerateTypes, BinaryLengthThree) {
  const auto types = enumerate_types(2, 3);
  ASSERT_EQ(types.size(), 4u);
  // compositions of 3 in lexicographic order of the first count
  EXPECT_EQ(types[0].counts, (std::vector<int>{0, 3}));
  EXPECT_EQ(types[3].counts, (std::vector<int>{3, 0}));
}

TEST(EnumerateTypes, ClassSizeIsMultinomial) {
  const TypeVector t{{1, 2}, 3};
  EXPECT_NEAR(std::exp2(log2_type_class_size(t)), 3.0, 1e-12);
}

TEST(EnumerateTypes, TernaryLengthFourCount) {
  EXPECT_EQ(enumerate_types(3, 4).size(), 15u);  // C(6,2)
}

TEST(EnumerateTypes, CapIsEnforced) {
  EXPECT_THROW(enumerate_types(12, 60), InfeasibleError);
}

TEST(PhiLogMass, SingleLetterIsUniform) {
  // n = 1: one type class per letter, |P_1| = |Y|.
  const TypeVector t{{1, 0, 0}, 1};
  EXPECT_NEAR(std::exp2(phi_log_mass(t)), 1.0 / 3.0, 1e-12);
}

TEST(PhiLogMass, BalancedBinaryPair) {
  const TypeVector t{{1, 1}, 2};
  EXPECT_NEAR(std::exp2(phi_log_mass(t)), (1.0 / 3.0) * 0.5, 1e-12);
}

TEST(PhiLogMass, NormalizesOverAllWords) {
  for (int a : {2, 3}) {
    for (int n = 1; n <= 10; ++n) {
      double total = 0.0;
      for (const TypeVector& t : enumerate_types(a, n))
        total += std::exp2(log2_type_class_size(t) + phi_log_mass(t));
      EXPECT_NEAR(total, 1.0, 1e-12) << "a=" << a << " n=" << n;
    }
  }
}

TEST(SymmetricTypeMixture, MatchesFreeFunction) {
  const SymmetricTypeMixture phi{6, 2};
  const TypeVector t{{2, 4}, 6};
  EXPECT_NEAR(phi.log2_mass(t), phi_log_mass(t), 1e-15);
}

// Any symmetric law (a mixture of type-uniform laws) is dominated by
// (n+1)^{|Y|} Phi entrywise.
TEST(SymmetricTypeMixture, DominatesSymmetricLaws) {
  RandomStream rng(151, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int a = 2 + (trial % 2);
    const int n = 2 + static_cast<int>(rng.next_double() * 7);  // <= 8
    const auto types = enumerate_types(a, n);
    std::vector<double> weights(types.size());
    double sum = 0.0;
    for (double& w : weights) {
      w = rng.next_double();
      sum += w;
    }
    const double poly = std::pow(n + 1.0, a);
    for (std::size_t i = 0; i < types.size(); ++i) {
      const double word_mass =
          (weights[i] / sum) * std::exp2(-log2_type_class_size(types[i]));
      const double bound = poly * std::exp2(phi_log_mass(types[i]));
      EXPECT_LE(word_mass, bound * (1.0 + 1e-12));
    }
  }
}

TEST(PnProbability, ExtremeRates) {
  const JointDistribution pxy = bsc_joint(0.1);
  const int g = default_g_exponent_poly(pxy);
  EXPECT_EQ(pn_probability(pxy, 12, 50.0, g), 0.0);
  EXPECT_NEAR(pn_probability(pxy, 12, -50.0, g), 1.0, 1e-12);
}

// Word-level brute force at n = 8: enumerate every (x^8, y^8) pair and
// apply the defining inequality directly.
TEST(PnProbability, MatchesWordLevelBruteForce) {
  const JointDistribution pxy = bsc_joint(0.1);
  const Distribution px = pxy.marginal_x();
  const int n = 8;
  const int g_poly = default_g_exponent_poly(pxy);
  const double log2_g = g_poly * std::log2(n + 1.0);

  for (double r : {-1.0, 0.12, 0.2, 0.3, 2.0}) {
    double brute = 0.0;
    for (int xw = 0; xw < (1 << n); ++xw) {
      for (int yw = 0; yw < (1 << n); ++yw) {
        double lp = 0.0, lx = 0.0;
        int ones = 0;
        for (int i = 0; i < n; ++i) {
          const int xi = (xw >> i) & 1, yi = (yw >> i) & 1;
          lp += std::log2(pxy(xi, yi));
          lx += std::log2(px[xi]);
          ones += yi;
        }
        const double lphi =
            -std::log2(n + 1.0) - log2_binomial(n, ones);
        const double rhs = n * r + log2_g + lx + lphi;
        if (lp >= rhs - 1e-9) brute += std::exp2(lp);
      }
    }
    const double got = pn_probability(pxy, n, r, g_poly);
    EXPECT_NEAR(got, brute, 1e-12) << "r = " << r;
  }
}

TEST(PnExponentPrediction, RegimeBranches) {
  const JointDistribution pxy = bsc_joint(0.1);
  const double i1 = renyi_mutual_information(pxy, RenyiOrder::one());
  const double ii = renyi_mutual_information(pxy, RenyiOrder::infinity());
  EXPECT_NEAR(pn_exponent_prediction(pxy, i1 - 0.05).value(), 0.0, 1e-10);
  EXPECT_TRUE(pn_exponent_prediction(pxy, ii + 0.01).is_infinite());
  EXPECT_TRUE(pn_exponent_prediction(pxy, ii).is_infinite());
}

TEST(PnExponentPrediction, MidRateMatchesGridScan) {
  const JointDistribution pxy = bsc_joint(0.1);
  const double i1 = renyi_mutual_information(pxy, RenyiOrder::one());
  const double ii = renyi_mutual_information(pxy, RenyiOrder::infinity());
  const double r = 0.5 * (i1 + ii);
  const ExtReal pred = pn_exponent_prediction(pxy, r);
  ASSERT_TRUE(pred.is_finite());
  double grid = 0.0;
  for (double t = 0.0; t <= 8.0; t += 1e-3)
    grid = std::max(
        grid, t * (r - renyi_mutual_information(
                           pxy, RenyiOrder::from_alpha(1.0 + t))));
  EXPECT_NEAR(pred.value(), grid, 1e-5);
}

// Chernoff chain at finite n: -(1/n) log2 p_n >= t(r - (1/n)D_{1+t}) +
// (t/n) log2 g(n) for every t > 0.
TEST(PnProbability, FiniteBlocklengthChernoffChain) {
  const JointDistribution pxy = bsc_joint(0.1);
  const int g_poly = default_g_exponent_poly(pxy);
  for (int n : {8, 12, 20}) {
    for (double r : {0.1, 0.2, 0.3}) {
      const double log2_pn = pn_log2_probability(pxy, n, r, g_poly);
      const double lhs = -log2_pn / n;  // +inf if p_n = 0
      for (double t : {0.25, 0.5, 1.0, 2.0}) {
        const double dn =
            renyi_divergence_product_vs_phi(pxy, n,
                                            RenyiOrder::from_alpha(1.0 + t))
                .value();
        const double chain =
            t * (r - dn / n) + t * g_poly * std::log2(n + 1.0) / n;
        EXPECT_GE(lhs, chain - 1e-9) << "n=" << n << " r=" << r
                                     << " t=" << t;
      }
    }
  }
}

// Divergence against the symmetric mixture reference: sandwiched between
// the single-letter value and its polynomial correction.
TEST(DivergenceVsPhi, LemmaSandwichSmallBlocks) {
  const JointDistribution pxy = bsc_joint(0.1);
  for (double alpha : {0.5, 1.0, 2.0}) {
    const RenyiOrder order = RenyiOrder::from_alpha(alpha);
    const double single = renyi_mutual_information(pxy, order);
    for (int n = 1; n <= 12; ++n) {
      const double dn =
          renyi_divergence_product_vs_phi(pxy, n, order).value() / n;
      EXPECT_GE(dn - single, -1e-9);
      EXPECT_LE(dn - single, 2.0 * std::log2(n + 1.0) / n + 1e-9);
    }
  }
}

TEST(TypeOfWord, RoundTripsCounts) {
  const std::vector<int> word = {2, 0, 2, 1, 2};
  const TypeVector t = type_of_word(word, 3);
  EXPECT_EQ(t.counts, (std::vector<int>{1, 1, 3}));
  EXPECT_EQ(t.n, 5);
  const Distribution d = t.as_distribution();
  EXPECT_NEAR(d[2], 0.6, 1e-15);
}

}  // namespace
}  // namespace chansim
