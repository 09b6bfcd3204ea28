#include <doctest.h>

#include <boost/math/special_functions/lambert_w.hpp>

#include <cmath>

#include "qmetro/states.hpp"

using namespace qmetro;

TEST_CASE("spec_text_round_trips") {
  const std::vector<std::string> texts = {"coh:alpha=3",   "cat:alpha=2.5", "ucs:a=0.7,nphi=4.45",
                                          "no:N=4",        "noon:N=9",      "ecs:alpha=3"};
  for (const auto& text : texts) {
    const StateSpec spec = parse_state_spec(text);
    CHECK(to_string(spec) == text);
    CHECK(to_string(parse_state_spec(to_string(spec))) == text);
  }
  CHECK(to_string(StateSpec{Cat{0.1}}) == "cat:alpha=0.1");
}

TEST_CASE("spec_list_splits_on_kind_tokens") {
  const auto specs = parse_state_list("cat:alpha=3,ucs:a=0.5,nphi=4,noon:N=4");
  REQUIRE(specs.size() == 3);
  CHECK(std::holds_alternative<Cat>(specs[0]));
  CHECK(std::get<Ucs>(specs[1]).a == 0.5);
  CHECK(std::get<Noon>(specs[2]).n == 4);
}

TEST_CASE("bad_spec_reports_offending_token") {
  const auto message_of = [](const std::string& text) {
    try {
      parse_state_spec(text);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message_of("squeezed:r=1").find("squeezed") != std::string::npos);
  CHECK(message_of("cat:beta=3").find("beta") != std::string::npos);
  CHECK(message_of("cat:alpha=abc").find("abc") != std::string::npos);
  CHECK(message_of("noon:N=2.5").find("2.5") != std::string::npos);
  CHECK_THROWS_AS(parse_state_spec("ucs:a=1.5,nphi=4"), std::invalid_argument);
  CHECK_THROWS_AS(parse_state_spec("noon:N=0"), std::invalid_argument);
}

TEST_CASE("normalizations_make_unit_vectors") {
  for (const StateSpec& spec : {StateSpec{Coherent{3.0}}, StateSpec{Cat{3.0}}, StateSpec{Ucs{0.4, 4.0}},
                                StateSpec{No{5}}, StateSpec{Noon{5}}, StateSpec{Ecs{2.0}}}) {
    const FockVector psi = build_state(spec);
    CHECK(psi.modes() == mode_count(spec));
    CHECK(psi.squared_norm() == doctest::Approx(1.0).epsilon(1e-11));
  }
}

TEST_CASE("fock_superpositions_use_the_exact_cutoff") {
  CHECK(default_cutoff(No{7}) == 7);
  CHECK(default_cutoff(Noon{7}) == 7);
  CHECK(build_state(Noon{7}).dim() == 64);
}

TEST_CASE("mean_photons_through_phase_match_expectation") {
  for (const StateSpec& spec : {StateSpec{Coherent{2.0}}, StateSpec{Cat{3.0}}, StateSpec{Ucs{0.3, 5.0}},
                                StateSpec{No{4}}, StateSpec{Noon{6}}, StateSpec{Ecs{3.0}}}) {
    const FockVector psi = build_state(spec);
    const double numeric = expectation(psi, phase_generator(psi.cutoff(), psi.modes()));
    CHECK(numeric == doctest::Approx(mean_photons_through_phase(spec)).epsilon(1e-10));
  }
}

TEST_CASE("alpha_of_a_matches_lambert_closed_form") {
  for (double n_phi : {0.2, 1.0, 4.5, 12.0}) {
    for (double a : {0.0, 0.1, 0.5, 0.9, 1.0}) {
      const double base = n_phi * (1.0 + a * a);
      const double w = boost::math::lambert_w0(a * n_phi * std::exp(-0.5 * base));
      const double expected = std::sqrt(base + 2.0 * w);
      CHECK(solve_alpha_of_a(a, n_phi) == doctest::Approx(expected).epsilon(1e-11));
    }
  }
}

TEST_CASE("balanced_ucs_is_the_cat_state") {
  const double alpha = 3.0;
  const double n_phi = cat_mean_photons(alpha);
  CHECK(solve_alpha_of_a(1.0, n_phi) == doctest::Approx(alpha).epsilon(1e-11));
  const FockVector cat = build_state(Cat{alpha});
  const FockVector ucs = build_state(Ucs{1.0, n_phi}, cat.cutoff());
  CHECK((cat.amplitudes() - ucs.amplitudes()).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("two_branch_forms") {
  CHECK(two_branch_form(Coherent{2.0})->a == 0.0);
  CHECK(two_branch_form(Cat{2.0})->a == 1.0);
  CHECK(two_branch_form(Ucs{0.3, 4.0})->alpha == doctest::Approx(solve_alpha_of_a(0.3, 4.0)));
  CHECK_FALSE(two_branch_form(Noon{2}).has_value());
}
