#include <doctest.h>

#include <cmath>

#include "fopa/engine.hpp"
#include "fopa/errors.hpp"
#include "fopa/factorable.hpp"
#include "fopa/singlemode.hpp"

using namespace fopa;
using doctest::Approx;

TEST_SUITE("factorable") {

TEST_CASE("photon numbers") {
  auto n = fac_photon_numbers(0.0, 1.0, 5.0);
  CHECK(n.I_s == 5.0);
  CHECK(n.I_i == 0.0);
  n = fac_photon_numbers(1.0, 1.0, 1.0);
  CHECK(n.I_s == Approx(2.381098).epsilon(1e-6));
  CHECK(n.I_s == Approx(std::pow(std::cosh(1.0), 2)).epsilon(1e-14));
  n = fac_photon_numbers(3.0, 0.0, 2.0);
  CHECK(n.I_s == 2.0);
  CHECK(n.I_i == 0.0);
  CHECK_THROWS_AS(fac_photon_numbers(1.0, 1.2, 1.0), InvalidArgument);
}

TEST_CASE("unit overlap is the single-mode amplifier") {
  for (double G : {0.3, 1.0, 2.5}) {
    const double g = std::pow(std::cosh(G), 2);
    const auto fn = fac_noise(G, std::polar(1.0, 1.1));
    CHECK(fn.R_s == Approx(sm_individual_noise(g).R_s).epsilon(1e-12));
    CHECK(fn.R_i == Approx(sm_individual_noise(g).R_i).epsilon(1e-12));
    CHECK(fn.NF == Approx(sm_noise_figure(g)).epsilon(1e-12));
    CHECK(fn.R_t == Approx(sm_rt({g, 1.0, 1.0, 1.0})).epsilon(1e-12));
  }
}

TEST_CASE("noise figure limit") {
  CHECK(fac_nf_limit(std::sqrt(0.8)) == Approx(2.5));
  CHECK(to_dB(fac_nf_limit(std::sqrt(0.8))) == Approx(3.98).epsilon(1e-3));
  CHECK(fac_noise(15.0, 1.0).NF == Approx(2.0).epsilon(1e-6));
  CHECK(fac_noise(15.0, 0.5).NF == Approx(8.0).epsilon(1e-6));
  CHECK_THROWS_AS(fac_nf_limit(0.0), NumericalError);
  CHECK_FALSE(fac_noise(2.0, 0.0).nf_limit.has_value());
}

TEST_CASE("no gain") {
  const auto fn = fac_noise(0.0, 0.7);
  CHECK(fn.R_s == Approx(1.0));
  CHECK(fn.R_i == Approx(1.0));
  CHECK(fn.R_t == Approx(1.0));
}

TEST_CASE("report with losses matches the single-mode report at |F| = 1") {
  DetectionChain chain;
  chain.eta_s = 0.75;
  chain.eta_i = 0.85;
  chain.r = 1.2;
  const auto fr = fac_report({1.7, 1.0}, chain);
  const auto sr = singlemode_report({std::pow(std::cosh(1.7), 2), 0.75, 0.85, 1.2});
  CHECK(fr.R_s == Approx(sr.R_s).epsilon(1e-12));
  CHECK(fr.R_i == Approx(sr.R_i).epsilon(1e-12));
  CHECK(fr.R_t == Approx(sr.R_t).epsilon(1e-12));
  CHECK(*fr.r_opt == Approx(*sr.r_opt).epsilon(1e-10));
}

TEST_CASE("green functions") {
  const FrequencyGrid g(0.0, 16.0, 65);
  const auto phi_s = gaussian_signal(g, 0.0, 1.0);
  const auto phi_i = gaussian_signal(g, 0.5, 1.5);
  const auto green = fac_green(1.3, phi_s, phi_i);
  CHECK((green.h2s - green.h2i.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  const auto kernel = build_jsf_factorable(phi_s, phi_i);
  CHECK(green_distance(green, green_from_kernel(kernel, 1.3)) < 1e-10);
  const auto series = green_from_kernel(kernel, 1.3);
  CHECK((green.h1s - series.h1s).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((green.h2s - series.h2s).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(green_distance(green, schmidt_oracle(kernel, 1.3)) < 1e-10);
}

TEST_CASE("observables on the factorable kernel reproduce the closed forms") {
  const FrequencyGrid g(0.0, 24.0, 97);
  const auto phi = gaussian_signal(g, 0.0, 1.0);
  const auto s = gaussian_signal(g, 0.0, 2.0);  // |F|² = 0.8
  const auto green = fac_green(2.0, phi, phi);
  const auto rep = observables(green, s, DetectionChain{});
  const auto fn = fac_noise(2.0, overlap_F(s, phi));
  CHECK(rep.R_s == Approx(fn.R_s).epsilon(1e-6));
  CHECK(rep.NF == Approx(fn.NF).epsilon(1e-6));
  CHECK(rep.R_t == Approx(fn.R_t).epsilon(1e-6));

  const auto high = observables(schmidt_oracle(build_jsf_factorable(phi, phi), 8.0), phi, DetectionChain{});
  CHECK(high.NF == Approx(2.0).epsilon(1e-6));
}

TEST_CASE("spectra") {
  const FrequencyGrid g(0.0, 30.0, 301);
  const auto phi = gaussian_signal(g, 0.0, 1.0);
  const auto s = gaussian_signal(g, 1.5, 1.0);
  SUBCASE("no gain passes the input") {
    const auto sp = fac_spectra(0.0, s, phi, phi);
    for (std::size_t k = 0; k < g.size(); ++k) {
      CHECK(sp.S_s[k] == Approx(std::norm(s.values[k])).epsilon(1e-14));
      CHECK(sp.S_i[k] == 0.0);
    }
  }
  SUBCASE("idler has the gain spectrum; signal is reshaped") {
    const auto sp = fac_spectra(1.5, s, phi, phi);
    const double total = integrate(g, sp.S_i);
    double worst = 0.0, reshape = 0.0;
    const double in_total = 1.0, out_total = integrate(g, sp.S_s);
    for (std::size_t k = 0; k < g.size(); ++k) {
      worst = std::max(worst, std::abs(sp.S_i[k] / total - std::norm(phi.values[k])));
      reshape = std::max(reshape, std::abs(sp.S_s[k] / out_total - std::norm(s.values[k]) / in_total));
    }
    CHECK(worst < 1e-12);
    CHECK(reshape > 1e-2);
    const double F2 = std::norm(overlap_F(s, phi));
    CHECK(out_total == Approx(1.0 + F2 * std::pow(std::sinh(1.5), 2)).epsilon(1e-10));
  }
}

}
