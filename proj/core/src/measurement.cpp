#include "qmetro/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "detail/golden.hpp"
#include "qmetro/channels.hpp"
#include "qmetro/error.hpp"
#include "qmetro/qfi.hpp"
#include "qmetro/special.hpp"

namespace qmetro {

namespace {

void require_single_mode(const StateSpec& spec) {
  if (mode_count(spec) != 1)
    throw std::invalid_argument("photon-counting readout needs a single-mode probe, got " + to_string(spec));
}

void check_readout(double eta, double beta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("transmissivity must lie in (0, 1]");
  if (!(beta >= 0.0)) throw std::invalid_argument("displacement amplitude must be >= 0");
}

void audit_mass(const OutcomeDistribution& dist) {
  if (std::abs(dist.tail) > kOutcomeMassTolerance) {
    std::ostringstream msg;
    msg << "counting window [" << dist.first_count << ", " << dist.last_count() << "] misses "
        << dist.tail << " of the probability at phi=" << dist.phi;
    throw TruncationError(msg.str());
  }
}

long lower_count(double mean) {
  const double lo = mean - 8.0 * std::sqrt(mean) - 20.0;
  return lo <= 0.0 ? 0 : static_cast<long>(std::floor(lo));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

double OutcomeDistribution::at(long n) const {
  if (n < first_count || n > last_count()) return 0.0;
  return probs[static_cast<size_t>(n - first_count)];
}

int displaced_cutoff(int state_cutoff, double beta) {
  const double reach = std::sqrt(static_cast<double>(state_cutoff)) + std::abs(beta);
  return std::max(state_cutoff, cutoff_for_mean(reach * reach));
}

CountWindow count_window(const TwoBranch& state, double eta, double beta) {
  check_readout(eta, beta);
  const double amp = state.alpha * std::sqrt(eta);
  const double near = std::max(0.0, beta - amp);
  const double far = beta + amp;
  double low_mean = near * near;
  if (state.a > 0.0) low_mean = std::min(low_mean, beta * beta);
  return {lower_count(low_mean), static_cast<long>(cutoff_for_mean(far * far))};
}

CountWindow count_window(const StateSpec& spec, double eta, double beta) {
  require_single_mode(spec);
  if (const auto branch = two_branch_form(spec)) return count_window(*branch, eta, beta);
  check_readout(eta, beta);
  return {0, displaced_cutoff(default_cutoff(spec), beta)};
}

OutcomeDistribution outcome_distribution_analytic(const TwoBranch& state, double eta, double phi,
                                                  double beta, const CountWindow& window) {
  check_readout(eta, beta);
  if (window.first < 0 || window.last < window.first) throw std::invalid_argument("empty count window");

  const double alpha2 = state.alpha * state.alpha;
  const double amp = state.alpha * std::sqrt(eta);
  const cplx sigma = std::polar(amp, phi) - beta;
  const double sigma2 = std::norm(sigma);
  const double theta = amp * beta * std::sin(phi);
  // <n|sigma><-beta|n> carries the phase n (arg sigma + pi).
  const double step = std::arg(sigma) + std::numbers::pi;
  const double nu2 = std::pow(state.normalization(), 2);
  const double coherence = state.a * std::exp(-0.5 * alpha2 * (1.0 - eta));
  const double beta2 = beta * beta;

  OutcomeDistribution dist;
  dist.first_count = window.first;
  dist.phi = phi;
  dist.probs.resize(static_cast<size_t>(window.size()));
  double total = 0.0;
  for (long n = window.first; n <= window.last; ++n) {
    const double log_s = special::log_poisson(n, sigma2);
    double p = std::exp(log_s);
    if (state.a > 0.0) {
      const double log_v = special::log_poisson(n, beta2);
      p += state.a * state.a * std::exp(log_v);
      if (coherence > 0.0)
        p += 2.0 * coherence * std::exp(0.5 * (log_s + log_v)) *
             std::cos(theta + static_cast<double>(n) * step);
    }
    p = std::max(0.0, nu2 * p);
    dist.probs[static_cast<size_t>(n - window.first)] = p;
    total += p;
  }
  dist.tail = 1.0 - total;
  audit_mass(dist);
  return dist;
}

OutcomeDistribution outcome_distribution(const StateSpec& spec, double eta, double phi, double beta,
                                         std::optional<int> cutoff) {
  require_single_mode(spec);
  check_readout(eta, beta);
  const int state_cutoff = default_cutoff(spec);
  const int big = cutoff.value_or(displaced_cutoff(state_cutoff, beta));
  if (big < state_cutoff) throw std::invalid_argument("displaced cutoff below the state cutoff");

  const DensityOperator rho =
      phase_then_loss(DensityOperator::pure(build_state(spec, state_cutoff)), phi, eta);
  const Operator shift = displacement_operator(cplx{-beta, 0.0}, big, state_cutoff + 1);

  const auto& support = rho.support();
  CMatrix columns(big + 1, static_cast<Index>(support.size()));
  for (size_t j = 0; j < support.size(); ++j)
    columns.col(static_cast<Index>(j)) = shift.matrix().col(support[j]);
  const CMatrix weighted = columns * rho.block();
  const Eigen::VectorXd diag = weighted.cwiseProduct(columns.conjugate()).rowwise().sum().real();

  OutcomeDistribution dist;
  dist.first_count = 0;
  dist.phi = phi;
  dist.probs.resize(static_cast<size_t>(big) + 1);
  double total = 0.0;
  for (Index n = 0; n <= big; ++n) {
    const double p = std::max(0.0, diag[n]);
    dist.probs[static_cast<size_t>(n)] = p;
    total += p;
  }
  dist.tail = 1.0 - total;
  audit_mass(dist);
  return dist;
}

OutcomeDistribution counting_distribution(const StateSpec& spec, double eta, double phi, double beta,
                                          const CountWindow& window) {
  require_single_mode(spec);
  if (const auto branch = two_branch_form(spec))
    return outcome_distribution_analytic(*branch, eta, phi, beta, window);
  if (window.first != 0) throw std::invalid_argument("numeric distributions start at zero counts");
  return outcome_distribution(spec, eta, phi, beta, static_cast<int>(window.last));
}

double classical_fisher(const StateSpec& spec, double eta, double phi, double beta, double dphi) {
  if (!(dphi > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  const CountWindow window = count_window(spec, eta, beta);
  const OutcomeDistribution mid = counting_distribution(spec, eta, phi, beta, window);
  const OutcomeDistribution up = counting_distribution(spec, eta, phi + dphi, beta, window);
  const OutcomeDistribution down = counting_distribution(spec, eta, phi - dphi, beta, window);
  double f = 0.0;
  for (size_t k = 0; k < mid.probs.size(); ++k) {
    const double p = mid.probs[k];
    if (p < kOutcomeFloor) continue;
    const double dp = (up.probs[k] - down.probs[k]) / (2.0 * dphi);
    f += dp * dp / p;
  }
  return f;
}

std::vector<double> open_phase_grid(int count) {
  if (count < 1) throw std::invalid_argument("phase grid needs at least one point");
  std::vector<double> grid(static_cast<size_t>(count));
  for (int k = 0; k < count; ++k) grid[static_cast<size_t>(k)] = std::numbers::pi * (k + 1) / (count + 1);
  return grid;
}

MeasurementOptimum optimize_measurement(const StateSpec& spec, double eta, double beta,
                                        std::span<const double> phi_grid, double r_phi) {
  if (phi_grid.empty()) throw std::invalid_argument("phase grid is empty");
  if (!(r_phi > 0.0)) throw std::invalid_argument("photon budget must be positive");
  const auto fisher = [&](double phi) { return classical_fisher(spec, eta, phi, beta); };

  size_t best = 0;
  double best_f = -1.0;
  for (size_t k = 0; k < phi_grid.size(); ++k) {
    const double f = fisher(phi_grid[k]);
    if (f > best_f) {
      best_f = f;
      best = k;
    }
  }
  double phi_opt = phi_grid[best];
  if (phi_grid.size() > 1) {
    const double lo = phi_grid[best == 0 ? 0 : best - 1];
    const double hi = phi_grid[std::min(best + 1, phi_grid.size() - 1)];
    const double refined = detail::golden_section_min([&](double phi) { return -fisher(phi); }, lo, hi, 1e-6);
    const double refined_f = fisher(refined);
    if (refined_f > best_f) {
      best_f = refined_f;
      phi_opt = refined;
    }
  }
  const double m = r_phi / mean_photons_through_phase(spec);
  return {phi_opt, best_f, crb(best_f, m)};
}

UcsMeasurementOptimum optimize_ucs_measurement(double n_phi, double eta, double beta, double r_phi,
                                               std::span<const double> phi_grid) {
  constexpr int kSteps = 20;
  UcsMeasurementOptimum best;
  best.delta_phi = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kSteps; ++i) {
    const double a = static_cast<double>(i) / kSteps;
    const MeasurementOptimum opt = optimize_measurement(Ucs{a, n_phi}, eta, beta, phi_grid, r_phi);
    if (opt.delta_phi < best.delta_phi) best = {a, opt.phi_opt, opt.f_c, opt.delta_phi};
  }
  return best;
}

double propagation_error_coherent(double alpha, double eta, double phi, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("displacement amplitude must be positive");
  if (!(alpha > 0.0)) throw std::invalid_argument("coherent amplitude must be positive");
  check_readout(eta, beta);
  const double s = std::abs(std::sin(phi));
  if (s < 1e-15) throw std::domain_error("mean photon count is insensitive to the phase at sin(phi) = 0");
  const double amp = alpha * std::sqrt(eta);
  return std::abs(std::polar(amp, phi) - beta) / (2.0 * amp * beta * s);
}

std::string PosteriorSummary::to_record() const {
  std::ostringstream out;
  out.precision(12);
  out << "mean_phi=" << mean_phi << " std_phi=" << std_phi << " n_updates=" << n_updates
      << " prior=" << prior_lo << ':' << prior_hi << " widenings=" << widenings << " counts=";
  for (size_t i = 0; i < counts.size(); ++i) {
    if (i > 0) out << ';';
    out << counts[i].first << ':' << counts[i].second;
  }
  return out.str();
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  return splitmix64(seed ^ splitmix64(trial));
}

BayesianExperiment::BayesianExperiment(MeasurementConfig config) : config_(std::move(config)) {
  require_single_mode(config_.spec);
  check_readout(config_.eta, config_.beta);
  if (config_.m < 1) throw std::invalid_argument("simulation needs m >= 1 repetitions");
  if (!(config_.prior_width > 0.0)) throw std::invalid_argument("prior width must be positive");
  if (config_.posterior_points < 3) throw std::invalid_argument("posterior grid needs at least 3 points");

  const MeasurementOptimum opt = optimize_measurement(config_.spec, config_.eta, config_.beta,
                                                      config_.phi_grid,
                                                      mean_photons_through_phase(config_.spec));
  phi_opt_ = opt.phi_opt;
  f_c_ = opt.f_c;
  window_ = count_window(config_.spec, config_.eta, config_.beta);
  table_ = build_table(phi_opt_ - 0.5 * config_.prior_width, phi_opt_ + 0.5 * config_.prior_width);
}

BayesianExperiment::Table BayesianExperiment::build_table(double lo, double hi) const {
  Table table{lo, hi, {}, {}};
  const auto points = static_cast<size_t>(config_.posterior_points);
  table.grid.resize(points);
  table.log_p.resize(points);
  for (size_t g = 0; g < points; ++g) {
    const double phi = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(points - 1);
    table.grid[g] = phi;
    const OutcomeDistribution dist =
        counting_distribution(config_.spec, config_.eta, phi, config_.beta, window_);
    auto& row = table.log_p[g];
    row.resize(dist.probs.size());
    for (size_t k = 0; k < row.size(); ++k)
      row[k] = dist.probs[k] > 0.0 ? std::log(dist.probs[k]) : -std::numeric_limits<double>::infinity();
  }
  return table;
}

std::vector<long> BayesianExperiment::draw(const OutcomeDistribution& dist, std::uint64_t seed) const {
  std::vector<double> cdf(dist.probs.size());
  double running = 0.0;
  for (size_t k = 0; k < cdf.size(); ++k) cdf[k] = running += dist.probs[k];
  std::mt19937_64 rng(seed);
  std::vector<long> histogram(dist.probs.size(), 0);
  for (long i = 0; i < config_.m; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * running;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto k = std::min<size_t>(static_cast<size_t>(it - cdf.begin()), cdf.size() - 1);
    ++histogram[k];
  }
  return histogram;
}

PosteriorSummary BayesianExperiment::run(double phi_true, std::uint64_t seed) const {
  if (!(phi_true >= table_.lo && phi_true <= table_.hi))
    throw std::invalid_argument("true phase lies outside the prior support");
  const OutcomeDistribution truth =
      counting_distribution(config_.spec, config_.eta, phi_true, config_.beta, window_);
  const std::vector<long> histogram = draw(truth, seed);

  PosteriorSummary summary;
  summary.n_updates = config_.m;
  for (size_t k = 0; k < histogram.size(); ++k)
    if (histogram[k] > 0) summary.counts.emplace_back(window_.first + static_cast<long>(k), histogram[k]);

  constexpr int kMaxWidenings = 4;
  constexpr double kEdgeMass = 1e-6;
  Table widened;
  const Table* table = &table_;
  for (int attempt = 0;; ++attempt) {
    const size_t points = table->grid.size();
    std::vector<double> log_post(points, 0.0);
    double peak = -std::numeric_limits<double>::infinity();
    for (size_t g = 0; g < points; ++g) {
      double acc = 0.0;
      for (const auto& [count, times] : summary.counts) {
        acc += static_cast<double>(times) * table->log_p[g][static_cast<size_t>(count - window_.first)];
        if (acc == -std::numeric_limits<double>::infinity()) break;
      }
      log_post[g] = acc;
      peak = std::max(peak, acc);
    }
    if (!std::isfinite(peak)) throw std::runtime_error("observed counts are impossible on the whole prior support");

    std::vector<double> weight(points);
    double norm = 0.0;
    for (size_t g = 0; g < points; ++g) norm += weight[g] = std::exp(log_post[g] - peak);
    const size_t edge = std::max<size_t>(1, points / 100);
    double edge_mass = 0.0;
    for (size_t g = 0; g < edge; ++g) edge_mass += weight[g] + weight[points - 1 - g];
    edge_mass /= norm;

    if (edge_mass > kEdgeMass) {
      if (attempt == kMaxWidenings)
        throw std::runtime_error("posterior keeps escaping the prior support after widening");
      const double half = table->hi - table->lo;  // doubled width
      widened = build_table(phi_opt_ - half, phi_opt_ + half);
      table = &widened;
      continue;
    }

    double mean = 0.0;
    for (size_t g = 0; g < points; ++g) mean += weight[g] * table->grid[g];
    mean /= norm;
    double var = 0.0;
    for (size_t g = 0; g < points; ++g) var += weight[g] * std::pow(table->grid[g] - mean, 2);
    var /= norm;
    summary.mean_phi = mean;
    summary.std_phi = std::sqrt(var);
    summary.prior_lo = table->lo;
    summary.prior_hi = table->hi;
    summary.widenings = attempt;
    return summary;
  }
}

PosteriorSummary bayesian_simulate(const MeasurementConfig& config, double phi_true) {
  return BayesianExperiment(config).run(phi_true, config.seed);
}

}  // namespace qmetro
