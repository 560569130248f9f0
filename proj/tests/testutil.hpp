#pragma once

#include <cmath>
#include <vector>

#include "chansim/channel.hpp"
#include "chansim/distribution.hpp"
#include "chansim/rng.hpp"

namespace chansim::testutil {

inline Distribution random_distribution(RandomStream& rng, int size,
                                        bool allow_zeros = false) {
  std::vector<double> p(size);
  for (double& v : p) v = -std::log(1.0 - rng.next_double() + 1e-300);
  if (allow_zeros) {
    for (double& v : p)
      if (rng.next_double() < 0.25) v = 0.0;
    bool any = false;
    for (double v : p) any = any || v > 0.0;
    if (!any) p[0] = 1.0;
  }
  return Distribution(std::move(p));
}

inline Channel random_channel(RandomStream& rng, int nx, int ny,
                              bool allow_zeros = false) {
  std::vector<double> rows;
  rows.reserve(static_cast<std::size_t>(nx) * ny);
  for (int x = 0; x < nx; ++x) {
    const Distribution r = random_distribution(rng, ny, allow_zeros);
    rows.insert(rows.end(), r.probs().begin(), r.probs().end());
  }
  return Channel(nx, ny, std::move(rows));
}

// Random order from a spread of finite values and the three limits.
inline RenyiOrder random_order(RandomStream& rng) {
  const double u = rng.next_double();
  if (u < 0.1) return RenyiOrder::zero();
  if (u < 0.2) return RenyiOrder::one();
  if (u < 0.3) return RenyiOrder::infinity();
  const double a = std::exp2(6.0 * rng.next_double() - 3.0);  // 1/8 .. 8
  if (std::abs(a - 1.0) < 1e-3) return RenyiOrder::one();
  return RenyiOrder::finite(a);
}

inline double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// Binary Renyi entropy H_alpha(p).
inline double binary_renyi_entropy(double p, double alpha) {
  if (alpha == 1.0) return binary_entropy(p);
  if (std::isinf(alpha)) return -std::log2(std::max(p, 1.0 - p));
  if (alpha == 0.0) return (p > 0.0 && p < 1.0) ? 1.0 : 0.0;
  return std::log2(std::pow(p, alpha) + std::pow(1.0 - p, alpha)) /
         (1.0 - alpha);
}

}  // namespace chansim::testutil
