#include "qmetro/qfi.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "qmetro/error.hpp"
#include "qmetro/states.hpp"

namespace qmetro {

namespace {

// sum_{lambda_i + lambda_j > eps} 2 |<i|D|j>|^2 / (lambda_i + lambda_j)
double fisher_sum(const CMatrix& rho, const CMatrix& drho, double eps) {
  const EigenSystem es = eigh(rho, 1e-10);
  const double lowest = es.eigenvalues.size() > 0 ? es.eigenvalues[es.eigenvalues.size() - 1] : 0.0;
  if (lowest < -1e-10) {
    std::ostringstream msg;
    msg << "not a density operator: eigenvalue " << lowest;
    throw std::invalid_argument(msg.str());
  }
  const CMatrix rotated = es.eigenvectors.adjoint() * drho * es.eigenvectors;
  const Index n = rotated.rows();
  double sum = 0.0;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double denom = es.eigenvalues[i] + es.eigenvalues[j];
      if (denom <= eps) continue;
      sum += 2.0 * std::norm(rotated(i, j)) / denom;
    }
  }
  return sum;
}

void check_eps(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eigenvalue floor must be positive");
}

}  // namespace

std::string_view to_string(QfiMethod method) {
  switch (method) {
    case QfiMethod::NumericEigh: return "numeric-eigh";
    case QfiMethod::PureVariance: return "pure-variance";
    case QfiMethod::AnalyticClosedForm: return "analytic-closed-form";
    case QfiMethod::CatBasis2x2: return "cat-basis-2x2";
  }
  return "unknown";
}

QfiResult qfi_pure(const FockVector& psi, const Operator& generator) {
  if (std::abs(psi.squared_norm() - 1.0) > kNormTolerance)
    throw std::invalid_argument("qfi_pure needs a normalized state");
  const FockVector g_psi = generator.apply(psi);
  const double mean = psi.inner(g_psi).real();
  const CVector centered = g_psi.amplitudes() - mean * psi.amplitudes();
  return {4.0 * centered.squaredNorm(), QfiMethod::PureVariance, 0.0};
}

QfiResult qfi_superposition_closed_form(double alpha, CoherentSuperposition kind) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  const double n = kind == CoherentSuperposition::Ecs ? ecs_normalization(alpha) : cat_normalization(alpha);
  const double a2 = alpha * alpha;
  const double n2 = n * n;
  return {4.0 * a2 * n2 * (1.0 + a2 - a2 * n2), QfiMethod::AnalyticClosedForm, 0.0};
}

QfiResult qfi_mixed(const DensityOperator& rho, const Operator& generator, double eps) {
  check_eps(eps);
  if (generator.cutoff() != rho.cutoff() || generator.modes() != rho.modes())
    throw std::invalid_argument("generator and density operator live on different spaces");
  // A non-diagonal generator can couple the support to its complement.
  const DensityOperator work = generator.is_diagonal() ? rho : rho.with_full_support();
  const auto& support = work.support();
  const auto size = static_cast<Index>(support.size());
  CMatrix g(size, size);
  for (Index j = 0; j < size; ++j)
    for (Index i = 0; i < size; ++i)
      g(i, j) = generator.matrix()(support[static_cast<size_t>(i)], support[static_cast<size_t>(j)]);
  const CMatrix& block = work.block();
  const CMatrix drho = cplx{0.0, 1.0} * (g * block - block * g);
  return {fisher_sum(block, drho, eps), QfiMethod::NumericEigh, eps};
}

QfiResult qfi_phase(const DensityOperator& rho, double eps) {
  check_eps(eps);
  const auto& support = rho.support();
  const auto size = static_cast<Index>(support.size());
  Eigen::VectorXd n1(size);
  for (Index k = 0; k < size; ++k)
    n1[k] = decode_index(support[static_cast<size_t>(k)], rho.cutoff(), rho.modes()).n1;
  // i[G, rho]_{ij} = i (g_i - g_j) rho_ij for diagonal G.
  CMatrix drho = rho.block();
  for (Index j = 0; j < size; ++j)
    for (Index i = 0; i < size; ++i) drho(i, j) *= cplx{0.0, n1[i] - n1[j]};
  return {fisher_sum(rho.block(), drho, eps), QfiMethod::NumericEigh, eps};
}

QfiResult qfi_from_derivative(const DensityOperator& rho, const CMatrix& drho, double eps) {
  check_eps(eps);
  if (drho.rows() != rho.dim() || drho.cols() != rho.dim())
    throw std::invalid_argument("derivative matrix must span the full Fock space");
  return {fisher_sum(rho.dense(), drho, eps), QfiMethod::NumericEigh, eps};
}

FockVector CatBasisEigensystem::fock_vector(int k, int cutoff) const {
  if (k < 0 || k > 1) throw std::out_of_range("cat-basis eigenvector index must be 0 or 1");
  const FockVector b = coherent_vector(branch, cutoff);
  const FockVector vac = FockVector::vacuum(cutoff);
  const double cb = coefficients(0, k) * norm_plus + coefficients(1, k) * norm_minus;
  const double cv = coefficients(0, k) * norm_plus - coefficients(1, k) * norm_minus;
  return cplx{cb} * b + cplx{cv} * vac;
}

CatBasisEigensystem ucs_lossy_eigensystem(double a, double n_phi, double eta, double phi) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("transmissivity must lie in [0, 1]");
  const double alpha = solve_alpha_of_a(a, n_phi);
  const double x = alpha * alpha * eta;  // |b|^2
  if (x == 0.0)
    throw DegenerateBasisError("cat basis collapses: the displaced branch coincides with vacuum");

  CatBasisEigensystem out;
  out.branch = std::polar(alpha * std::sqrt(eta), phi);
  const double overlap = std::exp(-0.5 * x);  // <0|b>, real
  out.norm_plus = 1.0 / std::sqrt(2.0 + 2.0 * overlap);
  out.norm_minus = 1.0 / std::sqrt(-2.0 * std::expm1(-0.5 * x));

  // |b> = (|Psi_+>/N_+ + |Psi_->/N_-)/2, |0> = (|Psi_+>/N_+ - |Psi_->/N_-)/2.
  const Eigen::Vector2d bvec(0.5 / out.norm_plus, 0.5 / out.norm_minus);
  const Eigen::Vector2d vvec(0.5 / out.norm_plus, -0.5 / out.norm_minus);
  const double nu = ucs_normalization(a, alpha);
  const double coherence = a * std::exp(-0.5 * alpha * alpha * (1.0 - eta));
  Eigen::Matrix2d rho = bvec * bvec.transpose() + (a * a) * vvec * vvec.transpose() +
                        coherence * (bvec * vvec.transpose() + vvec * bvec.transpose());
  rho *= nu * nu;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(rho);
  out.eigenvalues = {solver.eigenvalues()[1], solver.eigenvalues()[0]};
  out.coefficients.col(0) = solver.eigenvectors().col(1);
  out.coefficients.col(1) = solver.eigenvectors().col(0);
  return out;
}

QfiResult ucs_lossy_qfi(double a, double n_phi, double eta, double eps) {
  check_eps(eps);
  const CatBasisEigensystem es = ucs_lossy_eigensystem(a, n_phi, eta, 0.0);
  const double x = std::norm(es.branch);
  // n|0> = 0, so <v_i|n|v_j> = c_i c_j |b|^2 and <v_i|n^2|v_i> = c_i^2 (|b|^4 + |b|^2),
  // where c_i is the |b> weight of eigenvector i.
  const Eigen::Vector2d weights(es.norm_plus, es.norm_minus);
  const Eigen::Vector2d c = es.coefficients.transpose() * weights;
  double f = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double li = es.eigenvalues[static_cast<size_t>(i)];
    for (int j = 0; j < 2; ++j) {
      const double lj = es.eigenvalues[static_cast<size_t>(j)];
      if (li + lj <= eps) continue;
      const double gij = c[i] * c[j] * x;
      f += 2.0 * (li - lj) * (li - lj) / (li + lj) * gij * gij;
    }
    if (li <= eps) continue;
    // Coupling to the complement of span{|b>, |0>} (zero eigenvalues there).
    const double g2 = c[i] * c[i] * (x * x + x);
    const double in_span = c[i] * c[i] * x * x * (c[0] * c[0] + c[1] * c[1]);
    f += 4.0 * li * (g2 - in_span);
  }
  return {f, QfiMethod::CatBasis2x2, eps};
}

double crb(double f_q, double m) {
  if (!(m > 0.0)) throw std::invalid_argument("repetition count must be positive");
  if (!(f_q >= 0.0)) throw std::invalid_argument("Fisher information must be non-negative");
  if (f_q == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / std::sqrt(m * f_q);
}

}  // namespace qmetro
