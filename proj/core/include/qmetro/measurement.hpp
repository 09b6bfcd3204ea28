#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmetro/states.hpp"

namespace qmetro {

// Readout: phase shift, loss, then D(-beta) and photon counting on the
// single-mode probe.

/// Inclusive range of photon counts [first, last].
struct CountWindow {
  long first = 0;
  long last = 0;
  long size() const { return last - first + 1; }
};

struct OutcomeDistribution {
  std::vector<double> probs;  // probs[k] = p(first_count + k | phi)
  long first_count = 0;
  double phi = 0.0;
  double tail = 0.0;          // 1 - sum(probs)

  long last_count() const { return first_count + static_cast<long>(probs.size()) - 1; }
  /// p(n); zero outside the window.
  double at(long n) const;
};

/// Largest allowed |1 - sum p| of a counting distribution.
inline constexpr double kOutcomeMassTolerance = 1e-9;
/// Outcomes below this probability are left out of the classical Fisher sum.
inline constexpr double kOutcomeFloor = 1e-14;
/// Default central-difference step for d p / d phi.
inline constexpr double kFisherStep = 1e-5;

/// Cutoff of the displaced space: holds D(-beta) applied to every Fock state
/// up to `state_cutoff`.
int displaced_cutoff(int state_cutoff, double beta);

/// Counts that carry all but a Poisson tail of kTailTolerance for every phase,
/// for a two-branch state (analytic path).
CountWindow count_window(const TwoBranch& state, double eta, double beta);
/// Window used by `counting_distribution`: the analytic window when the spec has a
/// two-branch form, otherwise [0, displaced_cutoff].
CountWindow count_window(const StateSpec& spec, double eta, double beta);

/// p(n|phi) = <n| D(-beta) rho(phi) D(-beta)^dagger |n> from the displaced
/// two-branch closed form, evaluated on `window`. Throws TruncationError when
/// the window misses more than kOutcomeMassTolerance of the mass.
OutcomeDistribution outcome_distribution_analytic(const TwoBranch& state, double eta, double phi,
                                                  double beta, const CountWindow& window);

/// The same distribution by brute force: Kraus pipeline in the state's Fock
/// space, then the dense displacement matrix in a space of `cutoff` (default
/// displaced_cutoff). Works for every single-mode spec.
OutcomeDistribution outcome_distribution(const StateSpec& spec, double eta, double phi,
                                         double beta, std::optional<int> cutoff = std::nullopt);

/// Analytic when possible, numeric otherwise; always evaluated on `window`.
OutcomeDistribution counting_distribution(const StateSpec& spec, double eta, double phi,
                                          double beta, const CountWindow& window);

/// Classical Fisher information per state of the counting distribution,
/// central difference with step `dphi`.
double classical_fisher(const StateSpec& spec, double eta, double phi, double beta,
                        double dphi = kFisherStep);

/// `count` phases evenly spread over the open interval (0, pi).
std::vector<double> open_phase_grid(int count = 120);

struct MeasurementOptimum {
  double phi_opt = 0.0;
  double f_c = 0.0;
  double delta_phi = 0.0;  // 1/sqrt(m f_c), m = r_phi / n_phi
};

/// Maximizes F_C over `phi_grid`, then refines by golden section between the
/// neighbours of the best grid phase.
MeasurementOptimum optimize_measurement(const StateSpec& spec, double eta, double beta,
                                        std::span<const double> phi_grid, double r_phi);

struct UcsMeasurementOptimum {
  double a = 0.0;
  double phi_opt = 0.0;
  double f_c = 0.0;
  double delta_phi = 0.0;
};

/// Best readout of an unbalanced cat with n_phi photons: a on a 0.05 grid
/// over [0, 1], phase optimized for each a.
UcsMeasurementOptimum optimize_ucs_measurement(double n_phi, double eta, double beta, double r_phi,
                                               std::span<const double> phi_grid);

/// |alpha_eta e^{i phi} - beta| / (2 alpha_eta beta |sin phi|), the error
/// propagated from the mean photon count of a displaced lossy coherent state.
/// Throws std::domain_error when sin phi == 0.
double propagation_error_coherent(double alpha, double eta, double phi, double beta);

struct MeasurementConfig {
  StateSpec spec = Coherent{1.0};
  double eta = 1.0;
  double beta = 0.0;
  std::vector<double> phi_grid = open_phase_grid();
  long m = 1;
  std::uint64_t seed = 0;
  double prior_width = 0.5;
  int posterior_points = 2001;
};

struct PosteriorSummary {
  double mean_phi = 0.0;
  double std_phi = 0.0;
  long n_updates = 0;
  double prior_lo = 0.0;
  double prior_hi = 0.0;
  int widenings = 0;
  std::vector<std::pair<long, long>> counts;  // (photon count, occurrences), ascending

  /// One-line `key=value` record.
  std::string to_record() const;
};

/// Seed of trial `trial` derived from a base seed (splitmix64 finalizer).
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

/// Repeated Bayesian phase inference with one configuration. Precomputes
/// log p(n|phi) on the posterior grid once; every trial draws m counts at
/// phi_true and updates a uniform prior centred on the F_C-optimal phase.
class BayesianExperiment {
 public:
  explicit BayesianExperiment(MeasurementConfig config);

  const MeasurementConfig& config() const { return config_; }
  double phi_opt() const { return phi_opt_; }
  double fisher_at_opt() const { return f_c_; }
  const CountWindow& window() const { return window_; }

  /// Trial with an explicit seed. Widens the prior (x2, up to 4 times) when
  /// more than 1e-6 of the posterior sits at its edges, and throws
  /// std::runtime_error if that never settles.
  PosteriorSummary run(double phi_true, std::uint64_t seed) const;

 private:
  struct Table {
    double lo;
    double hi;
    std::vector<double> grid;
    std::vector<std::vector<double>> log_p;  // [grid point][count - window.first]
  };
  Table build_table(double lo, double hi) const;
  std::vector<long> draw(const OutcomeDistribution& dist, std::uint64_t seed) const;

  MeasurementConfig config_;
  double phi_opt_ = 0.0;
  double f_c_ = 0.0;
  CountWindow window_;
  Table table_;
};

/// Single trial with config.seed.
PosteriorSummary bayesian_simulate(const MeasurementConfig& config, double phi_true);

}  // namespace qmetro
