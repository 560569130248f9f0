#pragma once

#include <cstdint>
#include <span>

namespace chansim {

// Counter-based splittable random stream. Every (seed, stream) pair yields
// an independent reproducible sequence; substreams derived with split() can
// be consumed by parallel workers without coordination.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ 0x9e3779b97f4a7c15ull, stream ^ 0xd1b54a32d192ed03ull)),
        counter_(0) {}

  RandomStream split(std::uint64_t substream) const {
    RandomStream s(0);
    s.key_ = mix(key_, substream ^ 0x632be59bd9b4e019ull);
    s.counter_ = 0;
    return s;
  }

  std::uint64_t next_u64() { return mix(key_, counter_++); }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool next_bernoulli(double p) { return next_double() < p; }

  // Index drawn from probability weights (assumed to sum to 1).
  int next_index(std::span<const double> probs) {
    double u = next_double();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

 private:
  static std::uint64_t mix(std::uint64_t key, std::uint64_t ctr) {
    std::uint64_t z = key + 0x9e3779b97f4a7c15ull * (ctr + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace chansim
