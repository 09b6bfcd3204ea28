#include "qmetro/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace qmetro::special {

namespace {

// Stirling-series remainder  ln(n!) - [(n+1/2)ln(n+1) ... ] in Loader's
// parameterization: stirlerr(n) = ln(n!) - (n + 1/2) ln n + n - ln(sqrt(2 pi)).
double stirling_error(long n) {
  const double x = static_cast<double>(n);
  if (n <= 15) {
    return std::lgamma(x + 1.0) - (x + 0.5) * std::log(x) + x -
           0.5 * std::log(2.0 * std::numbers::pi);
  }
  const double x2 = x * x;
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;
  return (s0 - (s1 - (s2 - (s3 - s4 / x2) / x2) / x2) / x2) / x;
}

// Deviance term n ln(n/mean) + mean - n, computed without cancellation.
double deviance(double n, double mean) {
  const double d = n - mean;
  if (std::abs(d) < 0.1 * (n + mean)) {
    // Series in v = d / (n + mean).
    double v = d / (n + mean);
    double s = d * v;
    double ej = 2.0 * n * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return n * std::log(n / mean) + mean - n;
}

}  // namespace

double log_factorial(long n) { return std::lgamma(static_cast<double>(n) + 1.0); }

double log_poisson(long n, double mean) {
  if (n < 0) return -std::numeric_limits<double>::infinity();
  if (mean == 0.0) return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (n == 0) return -mean;
  const double x = static_cast<double>(n);
  return -stirling_error(n) - deviance(x, mean) - 0.5 * std::log(2.0 * std::numbers::pi * x);
}

double poisson_tail_above(double mean, long cutoff) {
  if (mean == 0.0) return 0.0;
  double tail = 0.0;
  // Terms past the mode decay at least geometrically once n > mean.
  for (long n = cutoff + 1;; ++n) {
    const double p = std::exp(log_poisson(n, mean));
    tail += p;
    if (static_cast<double>(n) > mean && p < 1e-20 * (tail + 1e-300)) break;
    if (static_cast<double>(n) > mean && p == 0.0) break;
  }
  return tail;
}

double binomial_loss_amplitude(long n, long k, double eta) {
  if (k < 0 || k > n) return 0.0;
  const double mu = 1.0 - eta;
  if (eta == 0.0) return k == n ? 1.0 : 0.0;
  if (mu == 0.0) return k == 0 ? 1.0 : 0.0;
  const double log_c = log_factorial(n) - log_factorial(k) - log_factorial(n - k);
  return std::exp(0.5 * (log_c + static_cast<double>(n - k) * std::log(eta) +
                         static_cast<double>(k) * std::log(mu)));
}

}  // namespace qmetro::special
