#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chansim/errors.hpp"

namespace chansim {

// Probability vector over a finite alphabet {0, ..., size-1}. Entries are
// validated nonnegative and normalized at construction; immutable after.
class Distribution {
 public:
  // Degenerate single-point placeholder; useful as a default member.
  Distribution() : p_{1.0} {}

  explicit Distribution(std::vector<double> probs) : p_(std::move(probs)) {
    if (p_.empty()) throw Error("Distribution: empty alphabet");
    double sum = 0.0;
    for (double& v : p_) {
      if (v < 0.0) {
        if (v > -1e-15)
          v = 0.0;  // forgive rounding dust
        else
          throw Error("Distribution: negative entry");
      }
      sum += v;
    }
    if (!(sum > 0.0) || !std::isfinite(sum))
      throw Error("Distribution: mass must be positive and finite");
    for (double& v : p_) v /= sum;
  }

  static Distribution uniform(int size) {
    return Distribution(std::vector<double>(size, 1.0));
  }

  static Distribution point_mass(int size, int x) {
    std::vector<double> p(size, 0.0);
    p.at(x) = 1.0;
    return Distribution(std::move(p));
  }

  int size() const { return static_cast<int>(p_.size()); }
  double operator[](int i) const { return p_[i]; }
  std::span<const double> probs() const { return p_; }

  // Indices with strictly positive mass.
  std::vector<int> support() const {
    std::vector<int> s;
    for (int i = 0; i < size(); ++i)
      if (p_[i] > 0.0) s.push_back(i);
    return s;
  }

 private:
  std::vector<double> p_;
};

// General nonnegative vector (no sum constraint); the extended second
// argument of the divergences, e.g. clipped sub-distributions.
class NonnegVector {
 public:
  explicit NonnegVector(std::vector<double> values) : v_(std::move(values)) {
    if (v_.empty()) throw Error("NonnegVector: empty alphabet");
    for (double x : v_)
      if (x < 0.0 || !std::isfinite(x))
        throw Error("NonnegVector: entries must be finite and >= 0");
  }

  NonnegVector(const Distribution& d)  // NOLINT: implicit by design
      : v_(d.probs().begin(), d.probs().end()) {}

  int size() const { return static_cast<int>(v_.size()); }
  double operator[](int i) const { return v_[i]; }
  std::span<const double> values() const { return v_; }

  double total_mass() const {
    double s = 0.0;
    for (double x : v_) s += x;
    return s;
  }

 private:
  std::vector<double> v_;
};

// Joint distribution over X x Y, stored row-major (x outer, y inner).
class JointDistribution {
 public:
  JointDistribution(int nx, int ny, std::vector<double> probs)
      : nx_(nx), ny_(ny), p_(std::move(probs)) {
    if (nx_ <= 0 || ny_ <= 0 ||
        p_.size() != static_cast<std::size_t>(nx_) * ny_)
      throw Error("JointDistribution: shape mismatch");
    double sum = 0.0;
    for (double& v : p_) {
      if (v < 0.0) {
        if (v > -1e-15)
          v = 0.0;
        else
          throw Error("JointDistribution: negative entry");
      }
      sum += v;
    }
    if (!(sum > 0.0) || !std::isfinite(sum))
      throw Error("JointDistribution: mass must be positive and finite");
    for (double& v : p_) v /= sum;
  }

  int x_size() const { return nx_; }
  int y_size() const { return ny_; }
  double operator()(int x, int y) const { return p_[x * ny_ + y]; }
  std::span<const double> flat() const { return p_; }

  Distribution marginal_x() const {
    std::vector<double> m(nx_, 0.0);
    for (int x = 0; x < nx_; ++x)
      for (int y = 0; y < ny_; ++y) m[x] += (*this)(x, y);
    return Distribution(std::move(m));
  }

  Distribution marginal_y() const {
    std::vector<double> m(ny_, 0.0);
    for (int x = 0; x < nx_; ++x)
      for (int y = 0; y < ny_; ++y) m[y] += (*this)(x, y);
    return Distribution(std::move(m));
  }

 private:
  int nx_, ny_;
  std::vector<double> p_;
};

// Tagged Renyi order: Zero | One | Infinity | Finite(alpha), alpha > 0, != 1.
class RenyiOrder {
 public:
  static RenyiOrder zero() { return RenyiOrder(Kind::kZero, 0.0); }
  static RenyiOrder one() { return RenyiOrder(Kind::kOne, 1.0); }
  static RenyiOrder infinity() {
    return RenyiOrder(Kind::kInfinity,
                      std::numeric_limits<double>::infinity());
  }
  static RenyiOrder finite(double alpha) {
    if (!(alpha > 0.0) || alpha == 1.0 || std::isinf(alpha))
      throw Error("RenyiOrder::finite: alpha must be in (0,1) or (1,inf)");
    return RenyiOrder(Kind::kFinite, alpha);
  }
  // Routes 0, 1 and inf to their tags, everything else to finite().
  static RenyiOrder from_alpha(double alpha) {
    if (alpha == 0.0) return zero();
    if (alpha == 1.0) return one();
    if (std::isinf(alpha)) return infinity();
    return finite(alpha);
  }

  bool is_zero() const { return kind_ == Kind::kZero; }
  bool is_one() const { return kind_ == Kind::kOne; }
  bool is_infinite() const { return kind_ == Kind::kInfinity; }
  bool is_finite_order() const { return kind_ == Kind::kFinite; }

  // Numeric alpha: 0, 1, +inf, or the finite order.
  double alpha() const { return alpha_; }

  std::string to_string() const {
    if (is_zero()) return "0";
    if (is_one()) return "1";
    if (is_infinite()) return "inf";
    return std::to_string(alpha_);
  }

  friend bool operator==(const RenyiOrder& a, const RenyiOrder& b) {
    return a.kind_ == b.kind_ && a.alpha_ == b.alpha_;
  }

 private:
  enum class Kind { kZero, kOne, kInfinity, kFinite };
  RenyiOrder(Kind k, double a) : kind_(k), alpha_(a) {}
  Kind kind_;
  double alpha_;
};

}  // namespace chansim
