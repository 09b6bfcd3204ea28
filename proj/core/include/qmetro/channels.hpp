#pragma once

#include <vector>

#include "qmetro/fock.hpp"

namespace qmetro {

/// Photon loss of transmissivity eta on one mode, in operator-sum form.
/// K_k removes k photons: (K_k)_{n-k,n} = sqrt(C(n,k) eta^{n-k} (1-eta)^k).
/// Only the k-th subdiagonal of each K_k is stored.
class LossChannel {
 public:
  LossChannel(double eta, int cutoff);

  double eta() const { return eta_; }
  double loss() const { return 1.0 - eta_; }
  int cutoff() const { return cutoff_; }
  int kraus_count() const { return cutoff_ + 1; }

  /// (K_k)_{n-k,n}; zero for n < k.
  double coefficient(int k, int n) const;
  /// Dense K_k.
  CMatrix kraus_matrix(int k) const;
  /// max |sum_k K_k^dagger K_k - I|.
  double completeness_defect() const;

 private:
  double eta_;
  int cutoff_;
  std::vector<Eigen::VectorXd> subdiagonals_;  // subdiagonals_[k][n] = (K_k)_{n-k,n}
};

inline LossChannel loss_kraus(double eta, int cutoff) { return {eta, cutoff}; }

/// sum_k (K_k on `mode`) rho (K_k on `mode`)^dagger, mode in {1, 2}.
DensityOperator apply_channel(const DensityOperator& rho, const LossChannel& channel, int mode);

/// Which arms of a two-mode probe suffer loss.
enum class LossArms { Both, PhaseArmOnly };

/// Loss of transmissivity eta on mode 1, and on mode 2 as well for
/// two-mode states when `arms == Both`.
DensityOperator apply_loss(const DensityOperator& rho, double eta, LossArms arms = LossArms::Both);

/// Phase shift on mode 1 followed by loss; the full probe pipeline.
DensityOperator phase_then_loss(const DensityOperator& rho, double phi, double eta,
                                LossArms arms = LossArms::Both);

/// Two-mode beam splitter exp(theta (a^dagger b - a b^dagger)) with
/// cos^2 theta = eta, built by exponentiating the Hermitian generator.
Operator beam_splitter(double eta, int cutoff);

/// The same loss channel realized as a dilation: mix a single-mode rho with a
/// vacuum environment on `beam_splitter` and trace the environment out.
/// Quartic in the cutoff; meant for cross-validation at small cutoffs.
DensityOperator apply_loss_by_dilation(const DensityOperator& rho, double eta);

/// Closed form of the unbalanced cat state after phase shift and loss:
/// N_u^2 [ |b><b| + a^2 |0><0| + a e^{-alpha_mu^2/2} (|b><0| + |0><b|) ],
/// b = alpha(a) sqrt(eta) e^{i phi}, alpha_mu = alpha(a) sqrt(1 - eta).
DensityOperator ucs_lossy_rho_analytic(double a, double n_phi, double eta, double phi, int cutoff);

}  // namespace qmetro
