#include "qmetro/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "qmetro/error.hpp"
#include "qmetro/special.hpp"

namespace qmetro {

namespace {

void check_shape(int cutoff, int modes) {
  if (cutoff < 0) throw std::invalid_argument("cutoff must be non-negative");
  if (modes != 1 && modes != 2) throw std::invalid_argument("only one or two modes are supported");
}

double hermitian_defect(const CMatrix& m) { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }

}  // namespace

Index fock_dimension(int cutoff, int modes) {
  check_shape(cutoff, modes);
  const Index per_mode = cutoff + 1;
  return modes == 1 ? per_mode : per_mode * per_mode;
}

int cutoff_for_mean(double mean_photons) {
  if (!(mean_photons >= 0.0)) throw std::invalid_argument("mean photon number must be >= 0");
  return static_cast<int>(std::ceil(mean_photons + 8.0 * std::sqrt(mean_photons) + 20.0));
}

FockIndex decode_index(Index flat, int cutoff, int modes) {
  if (modes == 1) return {static_cast<int>(flat), 0};
  const Index per_mode = cutoff + 1;
  return {static_cast<int>(flat / per_mode), static_cast<int>(flat % per_mode)};
}

// ---------------------------------------------------------------- FockVector

FockVector::FockVector(CVector amplitudes, int cutoff, int modes)
    : amplitudes_(std::move(amplitudes)), cutoff_(cutoff), modes_(modes) {
  if (amplitudes_.size() != fock_dimension(cutoff, modes))
    throw std::invalid_argument("amplitude count does not match (cutoff+1)^modes");
}

FockVector FockVector::number_state(int n, int cutoff) {
  if (n < 0 || n > cutoff) {
    std::ostringstream msg;
    msg << "number state |" << n << "> does not fit cutoff " << cutoff;
    throw TruncationError(msg.str());
  }
  CVector amps = CVector::Zero(cutoff + 1);
  amps[n] = 1.0;
  return {std::move(amps), cutoff, 1};
}

cplx FockVector::at(int n1, int n2) const {
  if (modes_ == 1) {
    if (n2 != 0) throw std::out_of_range("single-mode vector has no second mode");
    return amplitudes_[n1];
  }
  return amplitudes_[static_cast<Index>(n1) * (cutoff_ + 1) + n2];
}

cplx FockVector::inner(const FockVector& other) const {
  if (other.cutoff_ != cutoff_ || other.modes_ != modes_)
    throw std::invalid_argument("inner product of vectors on different spaces");
  return amplitudes_.dot(other.amplitudes_);
}

FockVector FockVector::operator+(const FockVector& other) const {
  if (other.cutoff_ != cutoff_ || other.modes_ != modes_)
    throw std::invalid_argument("sum of vectors on different spaces");
  return {amplitudes_ + other.amplitudes_, cutoff_, modes_};
}

FockVector operator*(cplx scale, const FockVector& v) {
  return {scale * v.amplitudes_, v.cutoff_, v.modes_};
}

// ------------------------------------------------------------------ Operator

Operator::Operator(CMatrix matrix, int cutoff, int modes, bool hermitian)
    : matrix_(std::move(matrix)), cutoff_(cutoff), modes_(modes), hermitian_(hermitian) {
  const Index dim = fock_dimension(cutoff, modes);
  if (matrix_.rows() != dim || matrix_.cols() != dim)
    throw std::invalid_argument("operator dimension does not match (cutoff+1)^modes");
  if (hermitian_ && hermitian_defect(matrix_) > 1e-12)
    throw std::invalid_argument("operator flagged Hermitian is not Hermitian to 1e-12");
}

Operator Operator::identity(int cutoff, int modes) {
  const Index dim = fock_dimension(cutoff, modes);
  return {CMatrix::Identity(dim, dim), cutoff, modes, true};
}

bool Operator::is_diagonal() const {
  for (Index j = 0; j < matrix_.cols(); ++j)
    for (Index i = 0; i < matrix_.rows(); ++i)
      if (i != j && matrix_(i, j) != cplx{}) return false;
  return true;
}

FockVector Operator::apply(const FockVector& v) const {
  if (v.cutoff() != cutoff_ || v.modes() != modes_)
    throw std::invalid_argument("operator and vector live on different spaces");
  return {matrix_ * v.amplitudes(), cutoff_, modes_};
}

Operator Operator::operator*(const Operator& rhs) const {
  if (rhs.cutoff_ != cutoff_ || rhs.modes_ != modes_)
    throw std::invalid_argument("operator product on different spaces");
  return {matrix_ * rhs.matrix_, cutoff_, modes_, false};
}

Operator Operator::adjoint() const { return {matrix_.adjoint(), cutoff_, modes_, hermitian_}; }

// ----------------------------------------------------------- DensityOperator

DensityOperator::DensityOperator(std::vector<Index> support, CMatrix block, int cutoff,
                                 int modes, double tail_loss)
    : support_(std::move(support)),
      block_(std::move(block)),
      cutoff_(cutoff),
      modes_(modes),
      tail_loss_(tail_loss) {
  const Index dim = fock_dimension(cutoff, modes);
  const auto size = static_cast<Index>(support_.size());
  if (block_.rows() != size || block_.cols() != size)
    throw std::invalid_argument("density block does not match its support");
  if (!std::is_sorted(support_.begin(), support_.end()) ||
      std::adjacent_find(support_.begin(), support_.end()) != support_.end())
    throw std::invalid_argument("density support must be sorted and unique");
  if (size > 0 && (support_.front() < 0 || support_.back() >= dim))
    throw std::invalid_argument("density support index out of range");
  if (size > 0 && hermitian_defect(block_) > 1e-12)
    throw std::invalid_argument("density operator is not Hermitian to 1e-12");
  if (std::abs(trace() - (1.0 - tail_loss_)) > 1e-10) {
    std::ostringstream msg;
    msg << "density trace " << trace() << " differs from 1 - tail_loss = " << 1.0 - tail_loss_;
    throw std::invalid_argument(msg.str());
  }
}

DensityOperator DensityOperator::pure(const FockVector& psi) {
  const double norm2 = psi.squared_norm();
  if (std::abs(norm2 - 1.0) > kNormTolerance)
    throw std::invalid_argument("pure density operator needs a normalized state");
  std::vector<Index> support;
  for (Index i = 0; i < psi.dim(); ++i)
    if (psi[i] != cplx{}) support.push_back(i);
  CVector amps(static_cast<Index>(support.size()));
  for (Index k = 0; k < amps.size(); ++k) amps[k] = psi[support[static_cast<size_t>(k)]];
  CMatrix block = amps * amps.adjoint();
  return {std::move(support), std::move(block), psi.cutoff(), psi.modes(), 1.0 - norm2};
}

DensityOperator DensityOperator::from_matrix(const CMatrix& full, int cutoff, int modes,
                                             double tail_loss) {
  const Index dim = fock_dimension(cutoff, modes);
  std::vector<Index> support(static_cast<size_t>(dim));
  for (Index i = 0; i < dim; ++i) support[static_cast<size_t>(i)] = i;
  return {std::move(support), full, cutoff, modes, tail_loss};
}

cplx DensityOperator::element(Index row, Index col) const {
  const auto r = std::lower_bound(support_.begin(), support_.end(), row);
  const auto c = std::lower_bound(support_.begin(), support_.end(), col);
  if (r == support_.end() || *r != row || c == support_.end() || *c != col) return {};
  return block_(r - support_.begin(), c - support_.begin());
}

CMatrix DensityOperator::dense() const {
  const Index dim = this->dim();
  CMatrix full = CMatrix::Zero(dim, dim);
  const auto size = static_cast<Index>(support_.size());
  for (Index j = 0; j < size; ++j)
    for (Index i = 0; i < size; ++i)
      full(support_[static_cast<size_t>(i)], support_[static_cast<size_t>(j)]) = block_(i, j);
  return full;
}

DensityOperator DensityOperator::with_full_support() const {
  if (full_support()) return *this;
  return from_matrix(dense(), cutoff_, modes_, tail_loss_);
}

DensityOperator DensityOperator::conjugated(const Operator& unitary) const {
  if (unitary.cutoff() != cutoff_ || unitary.modes() != modes_)
    throw std::invalid_argument("conjugation by an operator on a different space");
  if (unitary.is_diagonal()) {
    const auto size = static_cast<Index>(support_.size());
    CVector diag(size);
    for (Index k = 0; k < size; ++k) {
      const Index idx = support_[static_cast<size_t>(k)];
      diag[k] = unitary.matrix()(idx, idx);
    }
    CMatrix block = diag.asDiagonal() * block_ * diag.conjugate().asDiagonal();
    // Remove rounding asymmetry so the Hermiticity check stays meaningful.
    block = 0.5 * (block + block.adjoint()).eval();
    return {support_, std::move(block), cutoff_, modes_, tail_loss_};
  }
  CMatrix full = unitary.matrix() * dense() * unitary.matrix().adjoint();
  full = 0.5 * (full + full.adjoint()).eval();
  return from_matrix(full, cutoff_, modes_, tail_loss_);
}

DensityOperator DensityOperator::phase_rotated(double phi) const {
  const auto size = static_cast<Index>(support_.size());
  CVector diag(size);
  for (Index k = 0; k < size; ++k)
    diag[k] = std::polar(1.0, phi * decode_index(support_[static_cast<size_t>(k)], cutoff_, modes_).n1);
  CMatrix block = diag.asDiagonal() * block_ * diag.conjugate().asDiagonal();
  block = 0.5 * (block + block.adjoint()).eval();
  return {support_, std::move(block), cutoff_, modes_, tail_loss_};
}

double DensityOperator::min_eigenvalue() const {
  if (support_.empty()) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(block_, Eigen::EigenvaluesOnly);
  const double lowest = solver.eigenvalues()[0];
  return full_support() ? lowest : std::min(lowest, 0.0);
}

// --------------------------------------------------------------------- eigh

EigenSystem eigh(const CMatrix& hermitian, double tol) {
  if (hermitian.rows() != hermitian.cols()) throw std::invalid_argument("eigh needs a square matrix");
  if (hermitian.size() > 0 && hermitian_defect(hermitian) > tol)
    throw std::invalid_argument("eigh input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian);
  if (solver.info() != Eigen::Success) throw ConvergenceError("Hermitian eigensolver failed");
  EigenSystem out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

EigenSystem eigh(const Operator& op, double tol) { return eigh(op.matrix(), tol); }

EigenSystem eigh(const DensityOperator& rho, double tol) {
  const EigenSystem inner = eigh(rho.block(), tol);
  const Index dim = rho.dim();
  const auto size = static_cast<Index>(rho.support().size());
  std::vector<bool> in_support(static_cast<size_t>(dim), false);
  for (Index idx : rho.support()) in_support[static_cast<size_t>(idx)] = true;

  // Embed the block eigenvectors, then append the complement's unit vectors.
  std::vector<std::pair<double, CVector>> pairs;
  pairs.reserve(static_cast<size_t>(dim));
  for (Index k = 0; k < size; ++k) {
    CVector v = CVector::Zero(dim);
    for (Index i = 0; i < size; ++i) v[rho.support()[static_cast<size_t>(i)]] = inner.eigenvectors(i, k);
    pairs.emplace_back(inner.eigenvalues[k], std::move(v));
  }
  for (Index idx = 0; idx < dim; ++idx) {
    if (in_support[static_cast<size_t>(idx)]) continue;
    CVector v = CVector::Zero(dim);
    v[idx] = 1.0;
    pairs.emplace_back(0.0, std::move(v));
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  EigenSystem out;
  out.eigenvalues.resize(dim);
  out.eigenvectors.resize(dim, dim);
  for (Index k = 0; k < dim; ++k) {
    out.eigenvalues[k] = pairs[static_cast<size_t>(k)].first;
    out.eigenvectors.col(k) = pairs[static_cast<size_t>(k)].second;
  }
  return out;
}

// ------------------------------------------------------------ constructors

FockVector coherent_vector(cplx alpha, int cutoff) {
  check_shape(cutoff, 1);
  const double mean = std::norm(alpha);
  const double tail = special::poisson_tail_above(mean, cutoff);
  if (tail > kTailTolerance) {
    std::ostringstream msg;
    msg << "cutoff " << cutoff << " too small for |alpha|=" << std::abs(alpha)
        << " (Poisson tail " << tail << ")";
    throw TruncationError(msg.str());
  }
  CVector amps = CVector::Zero(cutoff + 1);
  const double arg = std::arg(alpha);
  for (int n = 0; n <= cutoff; ++n) {
    const double magnitude = std::exp(0.5 * special::log_poisson(n, mean));
    amps[n] = std::polar(magnitude, n * arg);
  }
  return {std::move(amps), cutoff, 1};
}

Operator number_operator(int cutoff) {
  check_shape(cutoff, 1);
  CMatrix m = CMatrix::Zero(cutoff + 1, cutoff + 1);
  for (int n = 0; n <= cutoff; ++n) m(n, n) = static_cast<double>(n);
  return {std::move(m), cutoff, 1, true};
}

Operator phase_shift(double phi, int cutoff) {
  check_shape(cutoff, 1);
  CMatrix m = CMatrix::Zero(cutoff + 1, cutoff + 1);
  for (int n = 0; n <= cutoff; ++n) m(n, n) = std::polar(1.0, n * phi);
  return {std::move(m), cutoff, 1, false};
}

Operator displacement_operator(cplx beta, int cutoff, std::optional<int> interior_columns) {
  check_shape(cutoff, 1);
  const Index dim = cutoff + 1;
  const double x = std::norm(beta);
  if (x == 0.0) return Operator::identity(cutoff, 1);

  CMatrix d = CMatrix::Zero(dim, dim);
  const double log_r = std::log(std::abs(beta));
  const double arg = std::arg(beta);
  constexpr double kRescale = 1e100;
  const double log_rescale = std::log(kRescale);

  // <j+k|D|j> = sqrt(j!/(j+k)!) beta^k e^{-x/2} L_j^{(k)}(x) and
  // <j|D|j+k> = sqrt(j!/(j+k)!) (-beta*)^k e^{-x/2} L_j^{(k)}(x).
  for (int k = 0; k <= cutoff; ++k) {
    const cplx lower_phase = std::polar(1.0, k * arg);
    const cplx upper_phase = std::polar(1.0, k * (std::numbers::pi - arg));
    double prev = 0.0;
    double cur = 1.0;
    double log_scale = 0.0;
    for (int j = 0; j + k <= cutoff; ++j) {
      if (j == 1) {
        prev = cur;
        cur = 1.0 + k - x;
      } else if (j > 1) {
        const double next = ((2.0 * j - 1.0 + k - x) * cur - (j - 1.0 + k) * prev) / j;
        prev = cur;
        cur = next;
      }
      if (std::abs(cur) > kRescale) {
        cur /= kRescale;
        prev /= kRescale;
        log_scale += log_rescale;
      }
      if (cur == 0.0) continue;
      const double log_mag = 0.5 * (special::log_factorial(j) - special::log_factorial(j + k)) +
                             k * log_r - 0.5 * x + log_scale + std::log(std::abs(cur));
      const double value = std::copysign(std::exp(log_mag), cur);
      d(j + k, j) = value * lower_phase;
      if (k > 0) d(j, j + k) = value * upper_phase;
    }
  }

  // By default check every column n whose displaced image (sqrt(n) + |beta|)^2
  // the cutoff heuristic says fits.
  int fitting = 0;
  while (fitting <= cutoff) {
    const double reach = std::sqrt(static_cast<double>(fitting)) + std::abs(beta);
    if (cutoff_for_mean(reach * reach) > cutoff) break;
    ++fitting;
  }
  const int checked = interior_columns.value_or(std::max(1, fitting));
  for (int n = 0; n < std::min<int>(checked, static_cast<int>(dim)); ++n) {
    const double deficit = std::abs(1.0 - d.col(n).squaredNorm());
    if (deficit > 1e-8) {
      std::ostringstream msg;
      msg << "cutoff " << cutoff << " too small for displacement |beta|=" << std::abs(beta)
          << " (column " << n << " loses " << deficit << ")";
      throw TruncationError(msg.str());
    }
  }
  return {std::move(d), cutoff, 1, false};
}

FockVector tensor(const FockVector& a, const FockVector& b) {
  if (a.modes() != 1 || b.modes() != 1) throw std::invalid_argument("tensor needs single-mode factors");
  if (a.cutoff() != b.cutoff()) throw std::invalid_argument("tensor factors need the same cutoff");
  const Index per_mode = a.dim();
  CVector amps(per_mode * per_mode);
  for (Index i = 0; i < per_mode; ++i)
    for (Index j = 0; j < per_mode; ++j) amps[i * per_mode + j] = a[i] * b[j];
  return {std::move(amps), a.cutoff(), 2};
}

Operator tensor(const Operator& a, const Operator& b) {
  if (a.modes() != 1 || b.modes() != 1) throw std::invalid_argument("tensor needs single-mode factors");
  if (a.cutoff() != b.cutoff()) throw std::invalid_argument("tensor factors need the same cutoff");
  const Index n = a.dim();
  CMatrix m(n * n, n * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) m.block(i * n, j * n, n, n) = a.matrix()(i, j) * b.matrix();
  return {std::move(m), a.cutoff(), 2, a.hermitian() && b.hermitian()};
}

double expectation(const FockVector& psi, const Operator& op) {
  return psi.amplitudes().dot(op.matrix() * psi.amplitudes()).real();
}

Operator phase_generator(int cutoff, int modes) {
  if (modes == 1) return number_operator(cutoff);
  check_shape(cutoff, modes);
  const Index per_mode = cutoff + 1;
  const Index dim = per_mode * per_mode;
  CMatrix m = CMatrix::Zero(dim, dim);
  for (Index i = 0; i < dim; ++i) m(i, i) = static_cast<double>(i / per_mode);
  return {std::move(m), cutoff, 2, true};
}

}  // namespace qmetro
