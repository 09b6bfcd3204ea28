#pragma once

#include <Eigen/Dense>

#include <array>
#include <string_view>

#include "qmetro/fock.hpp"

namespace qmetro {

/// Eigenvalue pairs with lambda_i + lambda_j at or below this floor are skipped.
inline constexpr double kEigenvalueFloor = 1e-12;

enum class QfiMethod { NumericEigh, PureVariance, AnalyticClosedForm, CatBasis2x2 };
std::string_view to_string(QfiMethod method);

struct QfiResult {
  double f_q = 0.0;
  QfiMethod method = QfiMethod::NumericEigh;
  double eps_used = 0.0;
};

/// 4 Var(G) of a normalized pure state, which is the pure-state Fisher
/// information of exp(i G phi)|psi>.
QfiResult qfi_pure(const FockVector& psi, const Operator& generator);

enum class CoherentSuperposition { Ecs, Cat };

/// Closed form 4 alpha^2 N^2 (1 + alpha^2 - alpha^2 N^2) for the entangled
/// coherent state (N = N_e) and the balanced cat (N = N_c).
QfiResult qfi_superposition_closed_form(double alpha, CoherentSuperposition kind);

/// Mixed-state QFI sum_{ij} 2 |<i| d rho |j>|^2 / (lambda_i + lambda_j) with
/// d rho = i[G, rho], valid because loss commutes with the phase rotation.
/// Diagonal generators are evaluated on the support of rho only.
QfiResult qfi_mixed(const DensityOperator& rho, const Operator& generator,
                    double eps = kEigenvalueFloor);

/// qfi_mixed with the mode-1 number operator as generator, evaluated on the
/// support without forming the operator.
QfiResult qfi_phase(const DensityOperator& rho, double eps = kEigenvalueFloor);

/// Same sum for an explicitly supplied full-space derivative matrix, e.g. a
/// finite difference of rho(phi).
QfiResult qfi_from_derivative(const DensityOperator& rho, const CMatrix& drho,
                              double eps = kEigenvalueFloor);

/// Lossy unbalanced cat state diagonalized in the orthonormal basis
/// |Psi_+-> = N_+- (|b> +- |0>), b = alpha(a) sqrt(eta) e^{i phi}.
struct CatBasisEigensystem {
  std::array<double, 2> eigenvalues{};  // descending
  Eigen::Matrix2d coefficients;         // column k: eigenvector k on (|Psi_+>, |Psi_->)
  cplx branch;                          // b
  double norm_plus = 0.0;               // N_+
  double norm_minus = 0.0;              // N_-

  /// Eigenvector k expanded in the Fock basis.
  FockVector fock_vector(int k, int cutoff) const;
};

/// Throws DegenerateBasisError when b == 0 (|Psi_-> undefined); callers
/// should fall back to a full eigendecomposition.
CatBasisEigensystem ucs_lossy_eigensystem(double a, double n_phi, double eta, double phi);

/// QFI of the lossy unbalanced cat state from the two-level eigensystem,
/// including the coupling to the orthogonal complement of its span.
QfiResult ucs_lossy_qfi(double a, double n_phi, double eta, double eps = kEigenvalueFloor);

/// Cramer-Rao bound 1/sqrt(m F_Q); m may be fractional. Returns +infinity
/// when f_q == 0.
double crb(double f_q, double m);

}  // namespace qmetro
