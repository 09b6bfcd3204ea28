#pragma once

namespace qmetro::detail {

inline constexpr double kInvGoldenRatio = 0.6180339887498949;

// Golden-section search for a minimum of f on [lo, hi], stopped once the
// bracket is narrower than `tol`.
template <class F>
double golden_section_min(F&& f, double lo, double hi, double tol) {
  double x1 = hi - kInvGoldenRatio * (hi - lo);
  double x2 = lo + kInvGoldenRatio * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvGoldenRatio * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvGoldenRatio * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace qmetro::detail
