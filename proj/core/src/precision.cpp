#include "qmetro/precision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "detail/golden.hpp"

namespace qmetro {

namespace {

void check_grid(std::span<const double> etas) {
  for (size_t i = 0; i < etas.size(); ++i) {
    if (!(etas[i] > 0.0 && etas[i] <= 1.0)) throw std::invalid_argument("eta grid must lie in (0, 1]");
    if (i > 0 && !(etas[i] > etas[i - 1])) throw std::invalid_argument("eta grid must be strictly increasing");
  }
}

void check_budget(double r_phi) {
  if (!(r_phi > 0.0)) throw std::invalid_argument("photon budget must be positive");
}

double ucs_delta_phi(double a, double n_phi, double eta, double r_phi) {
  return crb(ucs_lossy_qfi(a, n_phi, eta).f_q, r_phi / n_phi);
}

}  // namespace

std::vector<double> uniform_grid(double lo, double hi, int count) {
  if (count < 1) throw std::invalid_argument("grid needs at least one point");
  if (count == 1) return {lo};
  if (!(hi > lo)) throw std::invalid_argument("grid needs hi > lo");
  std::vector<double> grid(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) grid[static_cast<size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  grid.back() = hi;
  return grid;
}

std::vector<double> default_eta_grid() { return uniform_grid(0.01, 1.0, 101); }

std::string family_label(const StateSpec& spec) {
  switch (spec.index()) {
    case 0: return "CS";
    case 1: return "cat";
    case 2: return "UCS";
    case 3: return "NO";
    case 4: return "NOON";
    default: return "ECS";
  }
}

QfiResult lossy_qfi(const StateSpec& spec, double eta, const PipelineOptions& options) {
  const int cutoff = options.cutoff.value_or(default_cutoff(spec));
  const FockVector psi = build_state(spec, cutoff);
  const DensityOperator rho =
      phase_then_loss(DensityOperator::pure(psi), options.phi, eta, options.arms);
  return qfi_phase(rho, options.eps);
}

PrecisionCurve crb_curve(const StateSpec& spec, std::span<const double> etas, double r_phi,
                         const PipelineOptions& options) {
  check_grid(etas);
  check_budget(r_phi);
  const double n_phi = mean_photons_through_phase(spec);
  const double m = r_phi / n_phi;
  PrecisionCurve curve{family_label(spec), {}};
  curve.points.reserve(etas.size());
  for (double eta : etas) {
    const double f = lossy_qfi(spec, eta, options).f_q;
    curve.points.push_back({eta, crb(f, m), m, n_phi, std::nullopt, spec});
  }
  return curve;
}

UcsOptimum optimize_ucs_a(double n_phi, double eta, double r_phi) {
  check_budget(r_phi);
  constexpr int kSteps = 100;
  double best_a = 0.0;
  double best = ucs_delta_phi(0.0, n_phi, eta, r_phi);
  for (int i = 1; i <= kSteps; ++i) {
    const double a = static_cast<double>(i) / kSteps;
    const double d = ucs_delta_phi(a, n_phi, eta, r_phi);
    if (d < best) {
      best = d;
      best_a = a;
    }
  }
  const double lo = std::max(0.0, best_a - 1.0 / kSteps);
  const double hi = std::min(1.0, best_a + 1.0 / kSteps);
  const double refined =
      detail::golden_section_min([&](double a) { return ucs_delta_phi(a, n_phi, eta, r_phi); }, lo, hi, 1e-6);
  const double refined_value = ucs_delta_phi(refined, n_phi, eta, r_phi);
  if (refined_value < best) {
    best = refined_value;
    best_a = refined;
  }
  return {best_a, best, ucs_lossy_qfi(best_a, n_phi, eta).f_q};
}

PrecisionCurve ucs_optimized_curve(double n_phi, std::span<const double> etas, double r_phi) {
  check_grid(etas);
  PrecisionCurve curve{"UCS", {}};
  const double m = r_phi / n_phi;
  for (double eta : etas) {
    const UcsOptimum opt = optimize_ucs_a(n_phi, eta, r_phi);
    curve.points.push_back({eta, opt.delta_phi, m, n_phi, opt.a_opt, Ucs{opt.a_opt, n_phi}});
  }
  return curve;
}

ChopOptimum chop_optimize(double eta, double r_phi, double alpha_bal_max) {
  check_budget(r_phi);
  if (!(alpha_bal_max > 0.0)) throw std::invalid_argument("alpha_bal_max must be positive");
  const double ceiling = cat_mean_photons(alpha_bal_max);
  constexpr double kFloor = 0.1;
  constexpr int kPoints = 32;
  if (!(ceiling > kFloor)) throw std::invalid_argument("alpha_bal_max too small for the chop grid");

  std::vector<double> log_grid = uniform_grid(std::log(kFloor), std::log(ceiling), kPoints);
  ChopOptimum best{};
  best.delta_phi = std::numeric_limits<double>::infinity();
  size_t best_index = 0;
  for (size_t i = 0; i < log_grid.size(); ++i) {
    const double n_phi = i + 1 == log_grid.size() ? ceiling : std::exp(log_grid[i]);
    const UcsOptimum opt = optimize_ucs_a(n_phi, eta, r_phi);
    if (opt.delta_phi < best.delta_phi) {
      best = {n_phi, opt.a_opt, opt.delta_phi};
      best_index = i;
    }
  }
  const double lo = log_grid[best_index == 0 ? 0 : best_index - 1];
  const double hi = log_grid[std::min(best_index + 1, log_grid.size() - 1)];
  if (hi > lo) {
    const double refined = detail::golden_section_min(
        [&](double log_n) { return optimize_ucs_a(std::exp(log_n), eta, r_phi).delta_phi; }, lo, hi,
        1e-6);
    const double n_phi = std::min(std::exp(refined), ceiling);
    const UcsOptimum opt = optimize_ucs_a(n_phi, eta, r_phi);
    if (opt.delta_phi < best.delta_phi) best = {n_phi, opt.a_opt, opt.delta_phi};
  }
  return best;
}

PrecisionCurve chop_curve(std::span<const double> etas, double r_phi, double alpha_bal_max) {
  check_grid(etas);
  PrecisionCurve curve{"CC", {}};
  for (double eta : etas) {
    const ChopOptimum opt = chop_optimize(eta, r_phi, alpha_bal_max);
    curve.points.push_back({eta, opt.delta_phi, r_phi / opt.n_phi_opt, opt.n_phi_opt, opt.a_opt,
                            Ucs{opt.a_opt, opt.n_phi_opt}});
  }
  return curve;
}

PrecisionCurve snl_curve(std::span<const double> etas, double r_phi) {
  check_grid(etas);
  check_budget(r_phi);
  PrecisionCurve curve{"SNL", {}};
  // Single photons: n_phi = 1 and m = r_phi.
  for (double eta : etas)
    curve.points.push_back({eta, 1.0 / std::sqrt(eta * r_phi), r_phi, 1.0, std::nullopt, Coherent{1.0}});
  return curve;
}

int matched_noon_number(double n_phi) {
  if (!(n_phi > 0.0)) throw std::invalid_argument("n_phi must be positive");
  return std::max(1, static_cast<int>(std::lround(2.0 * n_phi)));
}

PrecisionCurve noon_chop_curve(std::span<const double> etas, double r_phi, int n_max) {
  check_grid(etas);
  check_budget(r_phi);
  if (n_max < 1) throw std::invalid_argument("NOON ceiling must be at least 1");
  PrecisionCurve curve{"NC", {}};
  for (double eta : etas) {
    PrecisionPoint best{};
    best.delta_phi = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= n_max; ++n) {
      const StateSpec spec = Noon{n};
      const double n_phi = 0.5 * n;
      const double m = r_phi / n_phi;
      const double d = crb(lossy_qfi(spec, eta).f_q, m);
      if (d < best.delta_phi) best = {eta, d, m, n_phi, std::nullopt, spec};
    }
    curve.points.push_back(best);
  }
  return curve;
}

}  // namespace qmetro
