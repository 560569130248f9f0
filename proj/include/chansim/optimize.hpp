#pragma once

#include <functional>
#include <vector>

namespace chansim::detail {

struct Max1D {
  double x;
  double value;
};

// Maximizes f over [lo, hi]: coarse scan, then golden-section refinement
// around the best bracket. The scan doubles as the dense-grid fallback when
// f is not numerically unimodal.
inline Max1D maximize_scan_golden(const std::function<double(double)>& f,
                                  double lo, double hi, int scan_points = 33,
                                  double xtol = 1e-7) {
  if (hi <= lo) return {lo, f(lo)};
  std::vector<double> xs(scan_points), fs(scan_points);
  for (int i = 0; i < scan_points; ++i) {
    xs[i] = lo + (hi - lo) * i / (scan_points - 1);
    fs[i] = f(xs[i]);
  }
  int best = 0;
  for (int i = 1; i < scan_points; ++i)
    if (fs[i] > fs[best]) best = i;
  double a = xs[best > 0 ? best - 1 : 0];
  double b = xs[best + 1 < scan_points ? best + 1 : scan_points - 1];
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > xtol) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  const double xm = 0.5 * (a + b);
  const double fm = f(xm);
  Max1D r{xm, fm};
  if (fs[best] > r.value) r = {xs[best], fs[best]};
  return r;
}

}  // namespace chansim::detail
