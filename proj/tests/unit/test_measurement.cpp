#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qmetro/error.hpp"
#include "qmetro/measurement.hpp"
#include "qmetro/precision.hpp"

using namespace qmetro;

namespace {

double max_gap(const OutcomeDistribution& a, const OutcomeDistribution& b) {
  const long lo = std::min(a.first_count, b.first_count);
  const long hi = std::max(a.last_count(), b.last_count());
  double gap = 0.0;
  for (long n = lo; n <= hi; ++n) gap = std::max(gap, std::abs(a.at(n) - b.at(n)));
  return gap;
}

double sum(const OutcomeDistribution& d) {
  double s = 0.0;
  for (double p : d.probs) s += p;
  return s;
}

}  // namespace

TEST_CASE("coherent_state_displaced_back_to_vacuum") {
  const OutcomeDistribution d = outcome_distribution(Coherent{3.0}, 1.0, 0.0, 3.0);
  CHECK(d.at(0) >= 1.0 - 1e-9);
  const TwoBranch coh{3.0, 0.0};
  const OutcomeDistribution analytic =
      outcome_distribution_analytic(coh, 1.0, 0.0, 3.0, count_window(coh, 1.0, 3.0));
  CHECK(analytic.at(0) >= 1.0 - 1e-9);
}

TEST_CASE("fig4_convention_distribution_is_normalized") {
  const StateSpec spec = Ucs{1.0, cat_mean_photons(3.0)};
  const OutcomeDistribution d = outcome_distribution(spec, 0.7, 0.5, 12.0);
  CHECK(sum(d) == doctest::Approx(1.0).epsilon(1e-9));
  const OutcomeDistribution w = counting_distribution(spec, 0.7, 0.5, 12.0, count_window(spec, 0.7, 12.0));
  CHECK(std::abs(w.tail) < 1e-9);
}

TEST_CASE("numeric_and_analytic_distributions_agree") {
  const double n_phi = 4.0;
  for (double a : {0.2, 0.6, 1.0}) {
    for (double eta : {0.3, 0.7, 0.95}) {
      for (double phi : {0.3, 1.4, 2.6}) {
        const StateSpec spec = Ucs{a, n_phi};
        const OutcomeDistribution numeric = outcome_distribution(spec, eta, phi, 8.0);
        const TwoBranch branch = *two_branch_form(spec);
        const OutcomeDistribution analytic =
            outcome_distribution_analytic(branch, eta, phi, 8.0, count_window(branch, eta, 8.0));
        CHECK(max_gap(numeric, analytic) < 1e-9);
      }
    }
  }
}

TEST_CASE("too_narrow_window_fails_the_mass_audit") {
  const TwoBranch cat{3.0, 1.0};
  CHECK_THROWS_AS(outcome_distribution_analytic(cat, 1.0, 0.4, 12.0, CountWindow{100, 160}), TruncationError);
}

TEST_CASE("two_mode_probes_have_no_counting_readout") {
  CHECK_THROWS_AS(classical_fisher(Noon{2}, 1.0, 0.5, 2.0), std::invalid_argument);
}

TEST_CASE("classical_fisher_is_bounded_by_quantum_fisher") {
  for (const StateSpec& spec : {StateSpec{Coherent{2.0}}, StateSpec{Cat{2.0}}, StateSpec{Ucs{0.5, 3.0}},
                                StateSpec{No{3}}}) {
    const FockVector psi = build_state(spec);
    for (double eta : {0.5, 1.0}) {
      const DensityOperator rho = phase_then_loss(DensityOperator::pure(psi), 0.0, eta);
      const double fq = qfi_mixed(rho, phase_generator(psi.cutoff(), 1)).f_q;
      for (double phi : {0.4, 1.2, 2.0}) CHECK(classical_fisher(spec, eta, phi, 6.0) <= fq + 1e-8);
    }
  }
}

TEST_CASE("central_difference_agrees_with_fourth_order_stencil") {
  const StateSpec spec = Ucs{0.6, 5.0};
  const double eta = 0.8;
  const double beta = 9.0;
  const double phi = 1.1;
  const double h = 1e-3;
  const CountWindow w = count_window(spec, eta, beta);
  std::vector<OutcomeDistribution> d;
  for (int k = -2; k <= 2; ++k) d.push_back(counting_distribution(spec, eta, phi + k * h, beta, w));
  double f4 = 0.0;
  for (size_t i = 0; i < d[2].probs.size(); ++i) {
    const double p = d[2].probs[i];
    if (p < kOutcomeFloor) continue;
    const double dp = (d[0].probs[i] - 8.0 * d[1].probs[i] + 8.0 * d[3].probs[i] - d[4].probs[i]) / (12.0 * h);
    f4 += dp * dp / p;
  }
  CHECK(classical_fisher(spec, eta, phi, beta) == doctest::Approx(f4).epsilon(1e-6));
}

TEST_CASE("coherent_readout_matches_poisson_fisher") {
  // p(n|phi) is Poisson in lambda = |sigma|^2, so F_C = lambda'^2 / lambda.
  const double alpha = 2.0;
  const double eta = 0.7;
  const double beta = 5.0;
  const double phi = 1.0;
  const double amp = alpha * std::sqrt(eta);
  const double lambda = std::norm(std::polar(amp, phi) - beta);
  const double slope = 2.0 * amp * beta * std::sin(phi);
  CHECK(classical_fisher(Coherent{alpha}, eta, phi, beta) == doctest::Approx(slope * slope / lambda).epsilon(1e-7));
}

TEST_CASE("propagation_error_reference_value") {
  CHECK(propagation_error_coherent(3.0, 1.0, std::numbers::pi / 2, 1000.0) ==
        doctest::Approx(std::sqrt(9.0 + 1e6) / 6000.0).epsilon(1e-12));
  CHECK_THROWS_AS(propagation_error_coherent(3.0, 1.0, 0.0, 10.0), std::domain_error);
  const double full = propagation_error_coherent(3.0, 1.0, std::numbers::pi / 2, 1e5);
  const double quarter = propagation_error_coherent(3.0, 0.25, std::numbers::pi / 2, 1e5);
  CHECK(quarter / full == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("propagation_error_is_smallest_at_quarter_turn") {
  const double best = propagation_error_coherent(2.0, 0.8, std::numbers::pi / 2, 400.0);
  for (double phi : open_phase_grid(60)) CHECK(best <= propagation_error_coherent(2.0, 0.8, phi, 400.0) + 1e-15);
}

TEST_CASE("propagation_error_agrees_with_classical_fisher_at_large_beta") {
  const double alpha = 2.0;
  const double beta = 100.0 * alpha;
  const double f = classical_fisher(Coherent{alpha}, 0.9, std::numbers::pi / 2, beta);
  CHECK(1.0 / std::sqrt(f) ==
        doctest::Approx(propagation_error_coherent(alpha, 0.9, std::numbers::pi / 2, beta)).epsilon(0.01));
}

TEST_CASE("coherent_optimal_phase_near_quarter_turn_at_large_beta") {
  const auto grid = open_phase_grid(60);
  const MeasurementOptimum opt = optimize_measurement(Coherent{2.0}, 1.0, 200.0, grid, 400.0);
  CHECK(opt.phi_opt == doctest::Approx(std::numbers::pi / 2).epsilon(0.02));
}

TEST_CASE("larger_displacement_improves_unbalanced_cat_readout") {
  const StateSpec spec = Ucs{0.5, cat_mean_photons(4.0)};
  const double alpha = two_branch_form(spec)->alpha;
  const auto grid = open_phase_grid(120);
  const auto precision = [&](double eta, double beta) {
    return optimize_measurement(spec, eta, beta, grid, 400.0).delta_phi;
  };
  double previous = std::numeric_limits<double>::infinity();
  for (double k : {1.0, 1.5, 2.0, 3.0, 4.0}) {
    const double d = precision(0.9, k * alpha);
    CHECK(d < previous);
    previous = d;
  }
  // With more loss there is a shallow bump just above beta = alpha.
  for (double eta : {0.6, 0.8}) CHECK(precision(eta, 4.0 * alpha) < precision(eta, alpha));
}

TEST_CASE("coherent_readout_reaches_quantum_fisher_for_any_displacement") {
  const auto grid = open_phase_grid(120);
  for (double beta : {6.0, 12.0, 24.0})
    CHECK(optimize_measurement(Coherent{3.0}, 0.8, beta, grid, 400.0).f_c == doctest::Approx(4.0 * 9.0 * 0.8).epsilon(1e-6));
}

TEST_CASE("optimal_phase_stable_under_step_halving") {
  const StateSpec spec = Ucs{0.7, 5.0};
  const auto grid = open_phase_grid(60);
  const double step = grid[1] - grid[0];
  size_t best_full = 0;
  size_t best_half = 0;
  double f_full = -1.0;
  double f_half = -1.0;
  for (size_t k = 0; k < grid.size(); ++k) {
    const double a = classical_fisher(spec, 0.8, grid[k], 10.0);
    const double b = classical_fisher(spec, 0.8, grid[k], 10.0, 0.5 * kFisherStep);
    if (a > f_full) f_full = a, best_full = k;
    if (b > f_half) f_half = b, best_half = k;
  }
  CHECK(std::abs(grid[best_full] - grid[best_half]) <= step + 1e-12);
}

TEST_CASE("seeded_bayesian_runs_are_reproducible") {
  MeasurementConfig config;
  config.spec = Ucs{0.8, 4.0};
  config.eta = 0.8;
  config.beta = 8.0;
  config.m = 500;
  config.seed = 42;
  config.phi_grid = open_phase_grid(40);
  config.posterior_points = 401;
  const BayesianExperiment experiment(config);
  const PosteriorSummary a = experiment.run(experiment.phi_opt(), 7);
  const PosteriorSummary b = experiment.run(experiment.phi_opt(), 7);
  CHECK(a.to_record() == b.to_record());
  CHECK(a.std_phi > 0.0);
  CHECK(a.mean_phi >= a.prior_lo);
  CHECK(a.mean_phi <= a.prior_hi);
  const PosteriorSummary c = experiment.run(experiment.phi_opt(), 8);
  CHECK(a.to_record() != c.to_record());
  CHECK(bayesian_simulate(config, experiment.phi_opt()).to_record() ==
        experiment.run(experiment.phi_opt(), 42).to_record());
}

TEST_CASE("posterior_width_tracks_classical_fisher") {
  MeasurementConfig config;
  config.spec = Cat{3.0};
  config.eta = 0.9;
  config.beta = 12.0;
  config.m = 4000;
  config.phi_grid = open_phase_grid(40);
  const BayesianExperiment experiment(config);
  const double expected = 1.0 / std::sqrt(config.m * experiment.fisher_at_opt());
  std::vector<double> widths;
  for (std::uint64_t t = 0; t < 15; ++t) widths.push_back(experiment.run(experiment.phi_opt(), trial_seed(3, t)).std_phi);
  std::sort(widths.begin(), widths.end());
  CHECK(widths[7] == doctest::Approx(expected).epsilon(0.2));
}

TEST_CASE("true_phase_outside_prior_is_rejected") {
  MeasurementConfig config;
  config.spec = Coherent{2.0};
  config.beta = 4.0;
  config.m = 10;
  config.phi_grid = open_phase_grid(20);
  config.posterior_points = 101;
  const BayesianExperiment experiment(config);
  CHECK_THROWS_AS(experiment.run(experiment.phi_opt() + 1.0, 1), std::invalid_argument);
}

TEST_CASE("trial_seeds_are_distinct") {
  CHECK(trial_seed(1, 0) != trial_seed(1, 1));
  CHECK(trial_seed(1, 0) != trial_seed(2, 0));
  CHECK(trial_seed(5, 9) == trial_seed(5, 9));
}

TEST_CASE("posterior_width_approaches_the_fisher_rate_with_more_repetitions") {
  std::vector<double> misfit;
  for (long m : {100L, 1000L, 10000L}) {
    MeasurementConfig config;
    config.spec = Cat{4.0};
    config.eta = 0.9;
    config.beta = 16.0;
    config.m = m;
    const BayesianExperiment experiment(config);
    const double expected = 1.0 / std::sqrt(static_cast<double>(m) * experiment.fisher_at_opt());
    std::vector<double> widths;
    for (std::uint64_t t = 0; t < 41; ++t)
      widths.push_back(experiment.run(experiment.phi_opt(), trial_seed(99, t)).std_phi);
    std::nth_element(widths.begin(), widths.begin() + 20, widths.end());
    misfit.push_back(std::abs(widths[20] / expected - 1.0));
  }
  MESSAGE("median width misfit at m = 1e2, 1e3, 1e4: " << misfit[0] << ", " << misfit[1] << ", " << misfit[2]);
  CHECK(misfit[2] <= 0.2);
  CHECK(misfit[1] <= misfit[0]);
  CHECK(misfit[2] <= misfit[1]);
}
