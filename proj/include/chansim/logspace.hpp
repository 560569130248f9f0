#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

// Base-2 log-domain arithmetic. All log-domain quantities in this library
// are log2 of a nonnegative number, with -inf encoding zero.

namespace chansim {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kLn2 = 0.69314718055994530942;

inline double log2_safe(double x) { return x > 0.0 ? std::log2(x) : kNegInf; }

inline double pos_part(double x) { return x > 0.0 ? x : 0.0; }

// log2(2^a + 2^b)
inline double log2_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log2(std::exp2(a - m) + std::exp2(b - m));
}

// Max-shifted log2-sum over a span of log2 values.
inline double log2_sum(std::span<const double> xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double x : xs)
    if (x != kNegInf) acc += std::exp2(x - m);
  return m + std::log2(acc);
}

// Streaming accumulator with the same semantics as log2_sum.
class Log2Accumulator {
 public:
  void add(double log2_term) { terms_.push_back(log2_term); }
  double total() const { return log2_sum(terms_); }

 private:
  std::vector<double> terms_;
};

// log2(1 - 2^a) for a <= 0 (a == 0 gives -inf).
inline double log2_one_minus_exp2(double a) {
  if (a == kNegInf) return 0.0;
  if (a >= 0.0) return kNegInf;
  return std::log2(-std::expm1(a * kLn2));
}

// log2((1 - 2^a)^k) for a <= 0, k >= 0; stable for a near 0 or -inf.
inline double log2_pow_one_minus_exp2(double a, double k) {
  if (a == kNegInf) return 0.0;
  if (a >= 0.0) return kNegInf;
  return k * std::log2(-std::expm1(a * kLn2));
}

inline double log2_gamma(double x) { return std::lgamma(x) / kLn2; }

inline double log2_factorial(long long n) {
  return log2_gamma(static_cast<double>(n) + 1.0);
}

inline double log2_binomial(long long n, long long k) {
  if (k < 0 || k > n) return kNegInf;
  return log2_factorial(n) - log2_factorial(k) - log2_factorial(n - k);
}

inline double log2_multinomial(long long n, std::span<const int> counts) {
  double r = log2_factorial(n);
  for (int c : counts) r -= log2_factorial(c);
  return r;
}

}  // namespace chansim
