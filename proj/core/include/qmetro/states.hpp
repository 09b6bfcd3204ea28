#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qmetro/fock.hpp"

namespace qmetro {

// Probe families. Amplitudes are real and non-negative throughout; two-mode
// states put mode 1 through the phase shift.

/// |alpha>
struct Coherent {
  double alpha;
};
/// N_c (|alpha> + |0>)
struct Cat {
  double alpha;
};
/// N_u (|alpha(a)> + a|0>) with alpha(a) fixed by the photon budget n_phi.
struct Ucs {
  double a;
  double n_phi;
};
/// (|N> + |0>)/sqrt(2)
struct No {
  int n;
};
/// (|N,0> + |0,N>)/sqrt(2)
struct Noon {
  int n;
};
/// N_e (|alpha,0> + |0,alpha>)
struct Ecs {
  double alpha;
};

using StateSpec = std::variant<Coherent, Cat, Ucs, No, Noon, Ecs>;

/// Throws std::invalid_argument when a parameter is outside its family's range.
void validate(const StateSpec& spec);

/// Parses the canonical text form, e.g. `ucs:a=0.7,nphi=4.45`, `noon:N=4`,
/// `cat:alpha=3`, `ecs:alpha=3`, `coh:alpha=3`, `no:N=4`.
StateSpec parse_state_spec(std::string_view text);
/// Comma-separated list where every `kind:` token opens a new spec, e.g.
/// `cat:alpha=3,ucs:a=0.5,nphi=4`.
std::vector<StateSpec> parse_state_list(std::string_view text);
/// Canonical text form; parse_state_spec(to_string(s)) reproduces s.
std::string to_string(const StateSpec& spec);

int mode_count(const StateSpec& spec);
/// Cutoff adequate for the spec per `cutoff_for_mean` (exactly N for Fock superpositions).
int default_cutoff(const StateSpec& spec);

/// 1/sqrt(2 + 2 e^{-alpha^2})
double ecs_normalization(double alpha);
/// 1/sqrt(2 + 2 e^{-alpha^2/2})
double cat_normalization(double alpha);
/// 1/sqrt(1 + a^2 + 2 a e^{-alpha^2/2})
double ucs_normalization(double a, double alpha);

/// Amplitude alpha(a) of the unbalanced cat state that keeps n_phi photons
/// through the phase shift: alpha^2 = n_phi (1 + a^2 + 2a e^{-alpha^2/2}).
/// Damped fixed-point iteration, tolerance 1e-12, at most 500 iterations;
/// throws ConvergenceError otherwise.
double solve_alpha_of_a(double a, double n_phi);

/// Mean photon number through the phase shift for a balanced cat of amplitude alpha.
double cat_mean_photons(double alpha);

/// Normalized state vector; two-mode families return two-mode vectors.
FockVector build_state(const StateSpec& spec, int cutoff);
inline FockVector build_state(const StateSpec& spec) { return build_state(spec, default_cutoff(spec)); }

/// Closed-form photons per state through the phase shift.
double mean_photons_through_phase(const StateSpec& spec);

/// States of the form N(|alpha> + a|0>): coherent (a = 0), cat (a = 1) and UCS.
struct TwoBranch {
  double alpha;
  double a;
  double normalization() const { return ucs_normalization(a, alpha); }
};
/// Two-branch form of a single-mode coherent-superposition spec, if it has one.
std::optional<TwoBranch> two_branch_form(const StateSpec& spec);

}  // namespace qmetro
