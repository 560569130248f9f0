#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace chansim {

// A real quantity that is either finite or exactly +infinity. Divergences
// and exponents return this instead of a sentinel double so the infinite
// state is explicit and comparable.
class ExtReal {
 public:
  constexpr ExtReal() = default;

  static constexpr ExtReal finite(double v) { return ExtReal(v, false); }
  static constexpr ExtReal infinity() { return ExtReal(0.0, true); }
  static ExtReal from_double(double v) {
    return std::isinf(v) && v > 0 ? infinity() : finite(v);
  }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr bool is_finite() const { return !infinite_; }

  // Finite value; throws on infinity.
  double value() const {
    if (infinite_) throw std::logic_error("ExtReal::value() on infinity");
    return v_;
  }

  // IEEE view: +inf when infinite.
  constexpr double as_double() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : v_;
  }

  friend constexpr bool operator==(ExtReal a, ExtReal b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ == b.infinite_;
    return a.v_ == b.v_;
  }
  friend constexpr bool operator<(ExtReal a, ExtReal b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.v_ < b.v_;
  }
  friend constexpr bool operator>(ExtReal a, ExtReal b) { return b < a; }
  friend constexpr bool operator<=(ExtReal a, ExtReal b) { return !(b < a); }
  friend constexpr bool operator>=(ExtReal a, ExtReal b) { return !(a < b); }

  friend constexpr ExtReal operator+(ExtReal a, ExtReal b) {
    if (a.infinite_ || b.infinite_) return infinity();
    return finite(a.v_ + b.v_);
  }
  friend constexpr ExtReal operator+(ExtReal a, double b) {
    return a + finite(b);
  }

  friend std::ostream& operator<<(std::ostream& os, ExtReal x) {
    if (x.infinite_) return os << "inf";
    return os << x.v_;
  }

 private:
  constexpr ExtReal(double v, bool inf) : v_(v), infinite_(inf) {}

  double v_ = 0.0;
  bool infinite_ = false;
};

}  // namespace chansim
