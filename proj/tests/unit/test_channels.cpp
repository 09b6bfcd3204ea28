#include <doctest.h>

#include <cmath>
#include <random>

#include "qmetro/channels.hpp"
#include "qmetro/states.hpp"

using namespace qmetro;

namespace {

double max_distance(const DensityOperator& a, const DensityOperator& b) {
  return (a.dense() - b.dense()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("kraus_operators_are_complete") {
  for (double eta : {0.0, 0.25, 0.6, 1.0}) CHECK(LossChannel(eta, 30).completeness_defect() < 1e-13);
}

TEST_CASE("kraus_matrix_places_amplitudes_on_the_subdiagonal") {
  const LossChannel channel(0.6, 5);
  const CMatrix k2 = channel.kraus_matrix(2);
  CHECK(k2(1, 3).real() == doctest::Approx(std::sqrt(3.0 * 0.6 * 0.16)));
  CHECK(k2(3, 1) == cplx{});
  CHECK(channel.coefficient(4, 3) == 0.0);
}

TEST_CASE("loss_preserves_trace_and_positivity") {
  for (const StateSpec& spec : {StateSpec{Cat{2.0}}, StateSpec{Noon{4}}, StateSpec{Ecs{1.5}}}) {
    const DensityOperator rho = DensityOperator::pure(build_state(spec));
    const DensityOperator out = apply_loss(rho, 0.45);
    CHECK(out.trace() == doctest::Approx(rho.trace()).epsilon(1e-12));
    CHECK(out.min_eigenvalue() > -1e-12);
  }
}

TEST_CASE("loss_on_coherent_state_shrinks_the_amplitude") {
  const double alpha = 2.5;
  const double eta = 0.64;
  const int cutoff = cutoff_for_mean(alpha * alpha);
  const DensityOperator out = apply_loss(DensityOperator::pure(coherent_vector(alpha, cutoff)), eta);
  const DensityOperator expected = DensityOperator::pure(coherent_vector(alpha * std::sqrt(eta), cutoff));
  CHECK(max_distance(out, expected) < 1e-12);
}

TEST_CASE("kraus_pipeline_matches_beam_splitter_dilation") {
  const int cutoff = 12;
  CVector amps = CVector::Zero(cutoff + 1);
  amps[0] = 0.5;
  amps[3] = cplx{0.5, 0.5};
  amps[7] = std::sqrt(0.25);
  const DensityOperator rho = DensityOperator::pure(FockVector(amps, cutoff));
  for (double eta : {0.1, 0.5, 0.9}) CHECK(max_distance(apply_loss(rho, eta), apply_loss_by_dilation(rho, eta)) < 1e-12);
}

TEST_CASE("beam_splitter_is_unitary_and_moves_photons") {
  const int cutoff = 4;
  const Operator u = beam_splitter(0.3, cutoff);
  const Index dim = u.dim();
  CHECK((u.matrix().adjoint() * u.matrix() - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff() < 1e-12);
  // |1,0> -> sqrt(eta)|1,0> - sqrt(1-eta)|0,1>
  const FockVector out = u.apply(tensor(FockVector::number_state(1, cutoff), FockVector::vacuum(cutoff)));
  CHECK(std::norm(out.at(1, 0)) == doctest::Approx(0.3));
  CHECK(std::norm(out.at(0, 1)) == doctest::Approx(0.7));
}

TEST_CASE("analytic_lossy_ucs_matches_kraus_pipeline") {
  for (double a : {0.2, 0.6, 1.0}) {
    for (double eta : {0.3, 0.7, 0.95}) {
      for (double phi : {0.0, 0.8, 2.4}) {
        const StateSpec spec = Ucs{a, 4.0};
        const int cutoff = default_cutoff(spec);
        const DensityOperator pipeline =
            phase_then_loss(DensityOperator::pure(build_state(spec, cutoff)), phi, eta);
        const DensityOperator analytic = ucs_lossy_rho_analytic(a, 4.0, eta, phi, cutoff);
        CHECK(max_distance(pipeline, analytic) < 1e-9);
      }
    }
  }
}

TEST_CASE("two_mode_loss_keeps_the_support_small") {
  const DensityOperator rho = DensityOperator::pure(build_state(Ecs{3.0}));
  const DensityOperator out = phase_then_loss(rho, 0.3, 0.5);
  CHECK(static_cast<Index>(out.support().size()) < out.dim() / 10);
  const DensityOperator noon = apply_loss(DensityOperator::pure(build_state(Noon{5})), 0.5);
  CHECK(noon.support().size() == 11);
}

TEST_CASE("phase_arm_loss_leaves_mode_two_intact") {
  const DensityOperator rho = DensityOperator::pure(build_state(Noon{3}));
  const DensityOperator out = apply_loss(rho, 0.0, LossArms::PhaseArmOnly);
  // all of |3,0> decays to |0,0>; |0,3> survives
  CHECK(out.element(0, 0).real() == doctest::Approx(0.5));
  CHECK(out.element(3, 3).real() == doctest::Approx(0.5));
}

TEST_CASE("photon_number_decays_linearly") {
  const StateSpec spec = Cat{2.0};
  const DensityOperator rho = DensityOperator::pure(build_state(spec));
  const Operator n = number_operator(rho.cutoff());
  for (double eta : {0.2, 0.75}) {
    const CMatrix out = apply_loss(rho, eta).dense();
    CHECK((n.matrix() * out).trace().real() == doctest::Approx(eta * mean_photons_through_phase(spec)).epsilon(1e-11));
  }
}

TEST_CASE("transmissivity_out_of_range_is_rejected") {
  CHECK_THROWS_AS(LossChannel(1.2, 4), std::invalid_argument);
  CHECK_THROWS_AS(LossChannel(-0.1, 4), std::invalid_argument);
}

TEST_CASE("loss_commutes_with_the_phase_shift") {
  const DensityOperator rho = DensityOperator::pure(build_state(Ucs{0.4, 3.0}));
  const Operator u = phase_shift(1.3, rho.cutoff());
  for (double eta : {0.2, 0.75}) {
    const DensityOperator before = apply_loss(rho.conjugated(u), eta);
    const DensityOperator after = apply_loss(rho, eta).conjugated(u);
    CHECK(max_distance(before, after) < 1e-10);
  }
}

TEST_CASE("loss_channels_compose_multiplicatively") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss;
  const int cutoff = 10;
  for (int trial = 0; trial < 5; ++trial) {
    CVector v(cutoff + 1);
    for (auto& c : v) c = cplx{gauss(rng), gauss(rng)};
    v.normalize();
    const DensityOperator rho = DensityOperator::pure(FockVector(v, cutoff));
    for (auto [eta1, eta2] : {std::pair{0.3, 0.8}, std::pair{0.9, 0.5}}) {
      const DensityOperator twice = apply_loss(apply_loss(rho, eta1), eta2);
      CHECK(max_distance(twice, apply_loss(rho, eta1 * eta2)) < 1e-10);
    }
  }
}
