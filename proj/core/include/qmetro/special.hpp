#pragma once

// Scalar special functions shared by the Fock-space and measurement code.
// Everything is evaluated in log space so photon numbers in the millions
// neither overflow nor lose the Poisson normalization.

namespace qmetro::special {

/// ln(n!) for n >= 0.
double log_factorial(long n);

/// ln of the Poisson probability P(n; mean). Uses the saddle-point
/// (Loader) form, accurate to a few ulp in p even for n ~ 1e6.
/// mean == 0 gives 0 for n == 0 and -inf otherwise.
double log_poisson(long n, double mean);

/// P(N > cutoff) for N ~ Poisson(mean), summed directly over the upper tail.
double poisson_tail_above(double mean, long cutoff);

/// Amplitude sqrt(C(n,k) eta^(n-k) (1-eta)^k) of losing k of n photons.
double binomial_loss_amplitude(long n, long k, double eta);

}  // namespace qmetro::special
