#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <vector>

namespace qmetro {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

/// Largest Poisson tail mass a coherent amplitude may leave beyond the cutoff.
inline constexpr double kTailTolerance = 1e-12;
/// Allowed deviation of a normalized state's squared norm from 1.
inline constexpr double kNormTolerance = 1e-10;

/// Dimension of the truncated space: (cutoff + 1)^modes.
Index fock_dimension(int cutoff, int modes);

/// Cutoff large enough for every stage whose largest mean photon number is
/// `mean_photons`: ceil(mu + 8 sqrt(mu) + 20).
int cutoff_for_mean(double mean_photons);

/// Photon numbers (n1, n2) of a flat two-mode index; n2 = 0 for one mode.
struct FockIndex {
  int n1;
  int n2;
};
FockIndex decode_index(Index flat, int cutoff, int modes);

/// Amplitudes over |n> (one mode) or |n1, n2> flattened row-major with
/// n1 outer (two modes). Mode 1 is the phase mode.
class FockVector {
 public:
  FockVector(CVector amplitudes, int cutoff, int modes = 1);

  /// |n> in a single mode.
  static FockVector number_state(int n, int cutoff);
  static FockVector vacuum(int cutoff) { return number_state(0, cutoff); }

  const CVector& amplitudes() const { return amplitudes_; }
  int cutoff() const { return cutoff_; }
  int modes() const { return modes_; }
  Index dim() const { return amplitudes_.size(); }

  cplx operator[](Index flat) const { return amplitudes_[flat]; }
  cplx at(int n1, int n2) const;

  double squared_norm() const { return amplitudes_.squaredNorm(); }
  cplx inner(const FockVector& other) const;  // <this|other>

  FockVector operator+(const FockVector& other) const;
  friend FockVector operator*(cplx scale, const FockVector& v);

 private:
  CVector amplitudes_;
  int cutoff_;
  int modes_;
};

/// Square matrix over the truncated (one- or two-mode) Fock basis.
class Operator {
 public:
  /// When `hermitian` is set the matrix is checked to 1e-12.
  Operator(CMatrix matrix, int cutoff, int modes = 1, bool hermitian = false);

  static Operator identity(int cutoff, int modes = 1);

  const CMatrix& matrix() const { return matrix_; }
  int cutoff() const { return cutoff_; }
  int modes() const { return modes_; }
  Index dim() const { return matrix_.rows(); }
  bool hermitian() const { return hermitian_; }
  bool is_diagonal() const;

  FockVector apply(const FockVector& v) const;
  Operator operator*(const Operator& rhs) const;
  Operator adjoint() const;

 private:
  CMatrix matrix_;
  int cutoff_;
  int modes_;
  bool hermitian_;
};

/// Density operator stored on its Fock-basis support: `block` is the matrix
/// restricted to the sorted flat indices in `support`, all other rows and
/// columns are exactly zero. Photon loss maps a support onto a subset of its
/// downward closure, so superpositions such as |N,0> + |0,N> stay small.
class DensityOperator {
 public:
  /// Validates Hermiticity (1e-12) and trace == 1 - tail_loss (1e-10).
  DensityOperator(std::vector<Index> support, CMatrix block, int cutoff, int modes,
                  double tail_loss = 0.0);

  /// |psi><psi| over the nonzero amplitudes of psi. The norm deficit of a
  /// truncated state is recorded as tail_loss.
  static DensityOperator pure(const FockVector& psi);
  /// Full-support density matrix.
  static DensityOperator from_matrix(const CMatrix& full, int cutoff, int modes = 1,
                                     double tail_loss = 0.0);

  int cutoff() const { return cutoff_; }
  int modes() const { return modes_; }
  Index dim() const { return fock_dimension(cutoff_, modes_); }
  const std::vector<Index>& support() const { return support_; }
  const CMatrix& block() const { return block_; }
  double tail_loss() const { return tail_loss_; }
  bool full_support() const { return static_cast<Index>(support_.size()) == dim(); }

  double trace() const { return block_.trace().real(); }
  cplx element(Index row, Index col) const;
  CMatrix dense() const;
  DensityOperator with_full_support() const;

  /// U rho U^dagger. Diagonal U keeps the support.
  DensityOperator conjugated(const Operator& unitary) const;
  /// exp(i phi n1) rho exp(-i phi n1), the phase shift on mode 1, without
  /// forming the operator.
  DensityOperator phase_rotated(double phi) const;

  /// Smallest eigenvalue (eigendecomposition of the block).
  double min_eigenvalue() const;

 private:
  std::vector<Index> support_;
  CMatrix block_;
  int cutoff_;
  int modes_;
  double tail_loss_;
};

/// Eigenvalues sorted descending with matching orthonormal columns.
struct EigenSystem {
  Eigen::VectorXd eigenvalues;
  CMatrix eigenvectors;
};

/// Hermitian eigendecomposition; rejects inputs with max|A - A^dagger| > tol.
EigenSystem eigh(const CMatrix& hermitian, double tol = 1e-10);
EigenSystem eigh(const Operator& op, double tol = 1e-10);
/// Full-space eigensystem; the complement of the support contributes
/// zero eigenvalues with unit basis vectors.
EigenSystem eigh(const DensityOperator& rho, double tol = 1e-10);

/// |alpha> truncated at `cutoff`. Throws TruncationError when the Poisson
/// tail beyond the cutoff exceeds kTailTolerance.
FockVector coherent_vector(cplx alpha, int cutoff);

Operator number_operator(int cutoff);
/// exp(i n phi), diagonal.
Operator phase_shift(double phi, int cutoff);

/// D(beta) = exp(beta a^dagger - beta* a) from closed-form Laguerre matrix
/// elements. The first `interior_columns` columns must keep their norm to
/// 1e-8, otherwise the cutoff is too small for |beta| and TruncationError is
/// thrown. The default checks every column n with
/// cutoff_for_mean((sqrt(n) + |beta|)^2) <= cutoff. Pass 0 to skip the check
/// and rely on an a-posteriori tail audit instead.
Operator displacement_operator(cplx beta, int cutoff,
                               std::optional<int> interior_columns = std::nullopt);

/// Kronecker products, n1 outer.
FockVector tensor(const FockVector& a, const FockVector& b);
Operator tensor(const Operator& a, const Operator& b);

/// <psi|A|psi> (real part; A assumed Hermitian).
double expectation(const FockVector& psi, const Operator& op);

/// Number operator of mode 1, the phase mode, in a one- or two-mode space.
Operator phase_generator(int cutoff, int modes);

}  // namespace qmetro
