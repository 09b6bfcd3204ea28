#include "qmetro/channels.hpp"

#include <cmath>
#include <stdexcept>

#include "qmetro/special.hpp"
#include "qmetro/states.hpp"

namespace qmetro {

LossChannel::LossChannel(double eta, int cutoff) : eta_(eta), cutoff_(cutoff) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("transmissivity must lie in [0, 1]");
  if (cutoff < 0) throw std::invalid_argument("cutoff must be non-negative");
  subdiagonals_.reserve(static_cast<size_t>(cutoff) + 1);
  for (int k = 0; k <= cutoff; ++k) {
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(cutoff + 1);
    for (int n = k; n <= cutoff; ++n) diag[n] = special::binomial_loss_amplitude(n, k, eta);
    subdiagonals_.push_back(std::move(diag));
  }
}

double LossChannel::coefficient(int k, int n) const {
  if (k < 0 || k > cutoff_ || n < k || n > cutoff_) return 0.0;
  return subdiagonals_[static_cast<size_t>(k)][n];
}

CMatrix LossChannel::kraus_matrix(int k) const {
  if (k < 0 || k > cutoff_) throw std::out_of_range("Kraus index out of range");
  CMatrix m = CMatrix::Zero(cutoff_ + 1, cutoff_ + 1);
  for (int n = k; n <= cutoff_; ++n) m(n - k, n) = coefficient(k, n);
  return m;
}

double LossChannel::completeness_defect() const {
  CMatrix sum = CMatrix::Zero(cutoff_ + 1, cutoff_ + 1);
  for (int k = 0; k <= cutoff_; ++k) {
    const CMatrix kk = kraus_matrix(k);
    sum += kk.adjoint() * kk;
  }
  return (sum - CMatrix::Identity(cutoff_ + 1, cutoff_ + 1)).cwiseAbs().maxCoeff();
}

DensityOperator apply_channel(const DensityOperator& rho, const LossChannel& channel, int mode) {
  if (channel.cutoff() != rho.cutoff())
    throw std::invalid_argument("channel and density operator have different cutoffs");
  if (mode < 1 || mode > rho.modes()) throw std::invalid_argument("loss mode out of range");

  const int cutoff = rho.cutoff();
  const int modes = rho.modes();
  const Index dim = rho.dim();
  const Index stride = (modes == 2 && mode == 1) ? cutoff + 1 : 1;
  const auto photons = [&](Index flat) {
    const FockIndex f = decode_index(flat, cutoff, modes);
    return mode == 1 ? f.n1 : f.n2;
  };

  const auto& support = rho.support();
  std::vector<char> reached(static_cast<size_t>(dim), 0);
  for (Index p : support) {
    const int n = photons(p);
    for (int k = 0; k <= n; ++k)
      if (channel.coefficient(k, n) != 0.0) reached[static_cast<size_t>(p - k * stride)] = 1;
  }
  std::vector<Index> out_support;
  std::vector<Index> position(static_cast<size_t>(dim), -1);
  for (Index i = 0; i < dim; ++i) {
    if (!reached[static_cast<size_t>(i)]) continue;
    position[static_cast<size_t>(i)] = static_cast<Index>(out_support.size());
    out_support.push_back(i);
  }

  const auto size = static_cast<Index>(support.size());
  CMatrix out = CMatrix::Zero(static_cast<Index>(out_support.size()),
                              static_cast<Index>(out_support.size()));
  for (Index j = 0; j < size; ++j) {
    const Index q = support[static_cast<size_t>(j)];
    const int nq = photons(q);
    for (Index i = 0; i < size; ++i) {
      const cplx value = rho.block()(i, j);
      if (value == cplx{}) continue;
      const Index p = support[static_cast<size_t>(i)];
      const int np = photons(p);
      for (int k = 0; k <= std::min(np, nq); ++k) {
        const double w = channel.coefficient(k, np) * channel.coefficient(k, nq);
        if (w == 0.0) continue;
        out(position[static_cast<size_t>(p - k * stride)], position[static_cast<size_t>(q - k * stride)]) +=
            w * value;
      }
    }
  }
  out = 0.5 * (out + out.adjoint()).eval();
  return {std::move(out_support), std::move(out), cutoff, modes, rho.tail_loss()};
}

DensityOperator apply_loss(const DensityOperator& rho, double eta, LossArms arms) {
  const LossChannel channel(eta, rho.cutoff());
  DensityOperator out = apply_channel(rho, channel, 1);
  if (rho.modes() == 2 && arms == LossArms::Both) out = apply_channel(out, channel, 2);
  return out;
}

DensityOperator phase_then_loss(const DensityOperator& rho, double phi, double eta, LossArms arms) {
  return apply_loss(rho.phase_rotated(phi), eta, arms);
}

Operator beam_splitter(double eta, int cutoff) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("transmissivity must lie in [0, 1]");
  const Index per_mode = cutoff + 1;
  CMatrix lower = CMatrix::Zero(per_mode, per_mode);
  for (int n = 1; n <= cutoff; ++n) lower(n - 1, n) = std::sqrt(static_cast<double>(n));
  const Operator a = tensor(Operator(lower, cutoff), Operator::identity(cutoff));
  const Operator b = tensor(Operator::identity(cutoff), Operator(lower, cutoff));
  // H = i (a^dagger b - a b^dagger), so exp(theta (a^dagger b - a b^dagger)) = exp(-i theta H).
  const CMatrix hop = a.matrix().adjoint() * b.matrix();
  CMatrix generator = cplx{0.0, 1.0} * (hop - hop.adjoint());
  generator = 0.5 * (generator + generator.adjoint()).eval();
  const EigenSystem es = eigh(generator);
  const double theta = std::acos(std::sqrt(eta));
  CVector phases(es.eigenvalues.size());
  for (Index k = 0; k < phases.size(); ++k) phases[k] = std::polar(1.0, -theta * es.eigenvalues[k]);
  CMatrix u = es.eigenvectors * phases.asDiagonal() * es.eigenvectors.adjoint();
  return {std::move(u), cutoff, 2, false};
}

DensityOperator apply_loss_by_dilation(const DensityOperator& rho, double eta) {
  if (rho.modes() != 1) throw std::invalid_argument("dilation check expects a single-mode state");
  const int cutoff = rho.cutoff();
  const Index per_mode = cutoff + 1;
  const CMatrix single = rho.dense();
  CMatrix joint = CMatrix::Zero(per_mode * per_mode, per_mode * per_mode);
  for (Index n = 0; n < per_mode; ++n)
    for (Index m = 0; m < per_mode; ++m) joint(n * per_mode, m * per_mode) = single(n, m);
  const Operator u = beam_splitter(eta, cutoff);
  const CMatrix mixed = u.matrix() * joint * u.matrix().adjoint();
  CMatrix reduced = CMatrix::Zero(per_mode, per_mode);
  for (Index n = 0; n < per_mode; ++n)
    for (Index m = 0; m < per_mode; ++m)
      for (Index k = 0; k < per_mode; ++k) reduced(n, m) += mixed(n * per_mode + k, m * per_mode + k);
  reduced = 0.5 * (reduced + reduced.adjoint()).eval();
  return DensityOperator::from_matrix(reduced, cutoff, 1, rho.tail_loss());
}

DensityOperator ucs_lossy_rho_analytic(double a, double n_phi, double eta, double phi, int cutoff) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("transmissivity must lie in [0, 1]");
  const double alpha = solve_alpha_of_a(a, n_phi);
  const double nu = ucs_normalization(a, alpha);
  const double coherence = a * std::exp(-0.5 * alpha * alpha * (1.0 - eta));
  const CVector branch = coherent_vector(std::polar(alpha * std::sqrt(eta), phi), cutoff).amplitudes();
  CVector vac = CVector::Zero(cutoff + 1);
  vac[0] = 1.0;
  CMatrix rho = branch * branch.adjoint() + (a * a) * vac * vac.adjoint() +
                coherence * (branch * vac.adjoint() + vac * branch.adjoint());
  rho *= nu * nu;
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const double trace = rho.trace().real();
  return DensityOperator::from_matrix(rho, cutoff, 1, 1.0 - trace);
}

}  // namespace qmetro
