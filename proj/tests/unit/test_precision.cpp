#include <doctest.h>

#include <cmath>

#include "qmetro/precision.hpp"

using namespace qmetro;

TEST_CASE("uniform_grid_endpoints") {
  const auto grid = uniform_grid(0.01, 1.0, 101);
  CHECK(grid.size() == 101);
  CHECK(grid.front() == 0.01);
  CHECK(grid.back() == 1.0);
  CHECK(grid[50] == doctest::Approx(0.505));
  CHECK(uniform_grid(1.0, 1.0, 1) == std::vector<double>{1.0});
  CHECK(default_eta_grid().size() == 101);
}

TEST_CASE("crb_curve_reference_points") {
  const std::vector<double> eta{1.0};
  const PrecisionCurve noon = crb_curve(Noon{4}, eta, 400.0);
  CHECK(noon.label == "NOON");
  CHECK(noon.points[0].m == doctest::Approx(200.0));
  CHECK(noon.points[0].delta_phi == doctest::Approx(1.0 / (4.0 * std::sqrt(200.0))).epsilon(1e-10));
  CHECK(crb_curve(Coherent{3.0}, eta, 400.0).points[0].delta_phi == doctest::Approx(0.025).epsilon(1e-10));
  CHECK(crb_curve(Cat{3.0}, eta, 400.0).points[0].delta_phi == doctest::Approx(1.061e-2).epsilon(1e-3));
}

TEST_CASE("budget_is_conserved_on_every_curve") {
  const auto etas = uniform_grid(0.1, 1.0, 7);
  const double r_phi = 400.0;
  std::vector<PrecisionCurve> curves{crb_curve(Cat{2.0}, etas, r_phi), crb_curve(Ecs{2.0}, etas, r_phi),
                                     ucs_optimized_curve(4.0, etas, r_phi), chop_curve(etas, r_phi),
                                     snl_curve(etas, r_phi), noon_chop_curve(etas, r_phi, 8)};
  for (const auto& curve : curves) {
    CHECK(curve.points.size() == etas.size());
    for (const auto& p : curve.points) {
      CHECK(std::abs(p.m * p.n_phi - r_phi) <= 1e-9);
      CHECK(p.delta_phi > 0.0);
    }
  }
}

TEST_CASE("invalid_grids_and_budgets_are_rejected") {
  const std::vector<double> bad{0.5, 0.4};
  CHECK_THROWS_AS(snl_curve(bad, 400.0), std::invalid_argument);
  const std::vector<double> outside{0.0, 0.5};
  CHECK_THROWS_AS(snl_curve(outside, 400.0), std::invalid_argument);
  const std::vector<double> ok{0.5};
  CHECK_THROWS_AS(snl_curve(ok, 0.0), std::invalid_argument);
}

TEST_CASE("shot_noise_limit_values") {
  const std::vector<double> etas{0.25, 1.0};
  const PrecisionCurve snl = snl_curve(etas, 400.0);
  CHECK(snl.points[0].delta_phi == doctest::Approx(0.1));
  CHECK(snl.points[1].delta_phi == doctest::Approx(0.05));
}

TEST_CASE("ucs_optimum_never_loses_to_the_endpoints") {
  const double n_phi = cat_mean_photons(3.0);
  for (double eta : {0.05, 0.3, 0.6, 0.9, 1.0}) {
    const UcsOptimum opt = optimize_ucs_a(n_phi, eta, 400.0);
    const double cat = crb(ucs_lossy_qfi(1.0, n_phi, eta).f_q, 400.0 / n_phi);
    const double coh = crb(ucs_lossy_qfi(0.0, n_phi, eta).f_q, 400.0 / n_phi);
    CHECK(opt.delta_phi <= std::min(cat, coh) + 1e-12);
    CHECK(opt.a_opt >= 0.0);
    CHECK(opt.a_opt <= 1.0);
  }
  CHECK(optimize_ucs_a(n_phi, 0.05, 400.0).a_opt < 0.1);
}

TEST_CASE("chop_picks_the_largest_state_without_loss") {
  const ChopOptimum opt = chop_optimize(1.0, 400.0);
  CHECK(opt.n_phi_opt == doctest::Approx(cat_mean_photons(5.0)).epsilon(1e-9));
  const ChopOptimum lossy = chop_optimize(0.5, 400.0);
  CHECK(lossy.n_phi_opt < cat_mean_photons(5.0));
}

TEST_CASE("noon_chop_uses_the_ceiling_without_loss") {
  const std::vector<double> eta{1.0};
  const PrecisionCurve nc = noon_chop_curve(eta, 400.0, 10);
  CHECK(std::get<Noon>(nc.points[0].spec).n == 10);
  CHECK(matched_noon_number(cat_mean_photons(5.0)) == 25);
  CHECK(matched_noon_number(cat_mean_photons(3.0)) == 9);
}

TEST_CASE("curves_are_non_increasing_in_transmission") {
  const auto etas = uniform_grid(0.05, 1.0, 20);
  for (const auto& curve : {crb_curve(Cat{3.0}, etas, 400.0), crb_curve(Noon{4}, etas, 400.0),
                            ucs_optimized_curve(4.5, etas, 400.0), snl_curve(etas, 400.0)}) {
    for (size_t i = 1; i < curve.points.size(); ++i)
      CHECK(curve.points[i].delta_phi <= curve.points[i - 1].delta_phi + 1e-10);
  }
}

TEST_CASE("chop_unbalancing_never_grows_with_loss") {
  double previous = 1.0;
  const auto etas = default_eta_grid();
  for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
    const double a = chop_optimize(*it, 400.0).a_opt;
    CHECK(a <= previous + 1e-9);
    previous = a;
  }
  CHECK(previous < 0.05);
}
