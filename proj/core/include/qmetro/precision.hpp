#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qmetro/channels.hpp"
#include "qmetro/qfi.hpp"
#include "qmetro/states.hpp"

namespace qmetro {

/// Total photons sent through the phase shift, R_phi = m n_phi.
inline constexpr double kDefaultPhotonBudget = 400.0;
/// Largest balanced-cat amplitude allowed when chopping.
inline constexpr double kDefaultAlphaBalMax = 5.0;

struct PrecisionPoint {
  double eta = 0.0;
  double delta_phi = 0.0;
  double m = 0.0;      // repetitions, possibly fractional
  double n_phi = 0.0;  // photons per state through the phase shift
  std::optional<double> a_opt;
  StateSpec spec = Coherent{0.0};
};

struct PrecisionCurve {
  std::string label;
  std::vector<PrecisionPoint> points;
};

/// `count` evenly spaced values on [lo, hi]; count == 1 gives {lo}.
std::vector<double> uniform_grid(double lo, double hi, int count);
/// 101 points on [0.01, 1].
std::vector<double> default_eta_grid();

/// Short curve label per family: CS, cat, UCS, NO, NOON, ECS.
std::string family_label(const StateSpec& spec);

struct PipelineOptions {
  LossArms arms = LossArms::Both;
  std::optional<int> cutoff;  // defaults to default_cutoff(spec)
  double phi = 0.0;
  double eps = kEigenvalueFloor;
};

/// build -> phase shift -> loss -> numeric QFI with the mode-1 number operator.
QfiResult lossy_qfi(const StateSpec& spec, double eta, const PipelineOptions& options = {});

/// Cramer-Rao curve under the budget r_phi: m = r_phi / n_phi(spec) per point.
PrecisionCurve crb_curve(const StateSpec& spec, std::span<const double> etas, double r_phi,
                         const PipelineOptions& options = {});

struct UcsOptimum {
  double a_opt = 0.0;
  double delta_phi = 0.0;
  double f_q = 0.0;
};

/// Best unbalancing parameter at fixed n_phi: 0.01 grid on [0, 1] followed
/// by golden-section refinement to 1e-6 around the best grid point.
UcsOptimum optimize_ucs_a(double n_phi, double eta, double r_phi);

/// Curve of optimize_ucs_a over the eta grid.
PrecisionCurve ucs_optimized_curve(double n_phi, std::span<const double> etas, double r_phi);

struct ChopOptimum {
  double n_phi_opt = 0.0;
  double a_opt = 0.0;
  double delta_phi = 0.0;
};

/// Joint optimum over state size and unbalancing with n_phi capped at the
/// balanced cat of amplitude alpha_bal_max. 32-point logarithmic n_phi grid
/// from 0.1 to the cap, then golden-section refinement in log n_phi.
ChopOptimum chop_optimize(double eta, double r_phi, double alpha_bal_max = kDefaultAlphaBalMax);

PrecisionCurve chop_curve(std::span<const double> etas, double r_phi,
                          double alpha_bal_max = kDefaultAlphaBalMax);

/// 1/sqrt(eta r_phi).
PrecisionCurve snl_curve(std::span<const double> etas, double r_phi);

/// NOON photon number whose n_phi = N/2 matches `n_phi` (rounded, at least 1).
int matched_noon_number(double n_phi);

/// Per eta, the best NOON state with N in 1..n_max under the budget.
PrecisionCurve noon_chop_curve(std::span<const double> etas, double r_phi, int n_max);

}  // namespace qmetro
