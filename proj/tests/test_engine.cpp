#include <doctest.h>

#include <cmath>

#include "fopa/broadband.hpp"
#include "fopa/engine.hpp"
#include "fopa/errors.hpp"
#include "fopa/singlemode.hpp"

using namespace fopa;
using doctest::Approx;

namespace {

const FrequencyGrid& small_grid() {
  static const FrequencyGrid g(0.0, 40.0, 97);
  return g;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("zero gain is the identity") {
  const auto k = build_jsf_broadband(small_grid(), small_grid(), 0.0, 1.0);
  const auto green = green_from_kernel(k, 0.0);
  const auto m = green.modes();
  const auto n = m.A.rows();
  CHECK(max_abs(m.A - Eigen::MatrixXcd::Identity(n, n)) == 0.0);
  CHECK(max_abs(m.B) == 0.0);
  CHECK(green.h1s(5, 5).real() == Approx(1.0 / small_grid().step()));
  CHECK(unitarity_residuals(green).max() < 1e-14);
}

TEST_CASE("symmetry relations") {
  const auto k = build_jsf_broadband(small_grid(), small_grid(), 0.0, 0.8);
  const auto green = green_from_kernel(k, k.engine_gain(1.5));
  CHECK(max_abs(green.h2s - green.h2i.transpose()) < 1e-12 * max_abs(green.h2s));
  CHECK(max_abs(green.h1s - green.h1s.adjoint()) < 1e-12 * max_abs(green.h1s));
  CHECK(max_abs(green.h1i - green.h1i.adjoint()) < 1e-12 * max_abs(green.h1i));
}

TEST_CASE("unitarity of the truncated series") {
  const auto k = build_jsf_broadband(small_grid(), small_grid(), 0.0, 1.0);
  CHECK(unitarity_residuals(green_from_kernel(k, 2.0)).max() < 1e-6);
  CHECK(unitarity_residuals(green_from_kernel(k, 2.0, 1, false)).rho_b > 1e-3);
  CHECK_THROWS_AS(green_from_kernel(k, 2.0, 2), TruncationError);
  for (double G : {0.5, 3.0, 8.0}) CHECK(unitarity_residuals(schmidt_oracle(k, G)).max() < 1e-10);
}

TEST_CASE("series agrees with the singular-value resummation") {
  PumpParams pump;
  pump.sigma_p = 0.7;
  pump.gamma = 0.4;
  DispersionModel d;
  d.beta2 = 0.2;
  d.beta3 = 0.05;
  const auto general = build_jsf_general(small_grid(), small_grid(), pump, d);
  const auto broad = build_jsf_broadband(small_grid(), small_grid(), 0.0, 1.0);
  for (const auto* k : {&general, &broad})
    for (double G : {0.5, 2.0}) CHECK(green_distance(green_from_kernel(*k, G), schmidt_oracle(*k, G)) < 1e-6);
}

TEST_CASE("factored observables match the nested loops") {
  const FrequencyGrid g(0.0, 16.0, 24);
  const auto k = build_jsf_broadband(g, g, 0.0, 0.5);
  const auto green = green_from_kernel(k, 1.2);
  const auto signal = gaussian_signal(g, 0.0, 1.0);
  DetectionChain chain;
  chain.eta_s = 0.8;
  chain.eta_i = 0.7;
  chain.f_s = gaussian_filter(g, 0.0, 1.5);
  chain.f_i = gaussian_filter(g, 0.3, 2.0);
  const HTerms fast = observables(green, signal, chain).h;
  const HTerms slow = observables_naive_hterms(green, signal, chain);
  CHECK(fast.s1 == Approx(slow.s1).epsilon(1e-12));
  CHECK(fast.s2 == Approx(slow.s2).epsilon(1e-12));
  CHECK(fast.i1 == Approx(slow.i1).epsilon(1e-12));
  CHECK(fast.i2 == Approx(slow.i2).epsilon(1e-12));
  CHECK(fast.vs == Approx(slow.vs).epsilon(1e-12));
  CHECK(fast.vi == Approx(slow.vi).epsilon(1e-12));
  CHECK(fast.si1 == Approx(slow.si1).epsilon(1e-12));
  CHECK(fast.si2 == Approx(slow.si2).epsilon(1e-12));
  CHECK_THROWS_AS(observables_naive_hterms(green_from_kernel(build_jsf_broadband(small_grid(), small_grid(), 0.0, 1.0), 1.0),
                                           gaussian_signal(small_grid(), 0.0, 1.0), chain),
                  InvalidArgument);
}

TEST_CASE("zero gain observables are shot-noise limited") {
  const auto k = build_jsf_broadband(small_grid(), small_grid(), 0.0, 1.0);
  const auto rep = observables(green_from_kernel(k, 0.0), gaussian_signal(small_grid(), 0.0, 1.0), DetectionChain{});
  CHECK(rep.g == Approx(1.0));
  CHECK(rep.R_s == Approx(1.0));
  CHECK(rep.NF == Approx(1.0));
}

TEST_CASE("broadband kernel reproduces the series") {
  const double Gp = 1.0, p = 1.0;
  const FrequencyGrid g(0.0, 12.0 * std::sqrt(1.0 + 48.0 * p * p), 129);
  const auto k = build_jsf_broadband(g, g, 0.0, p);
  const auto green = green_from_kernel(k, k.engine_gain(Gp));
  const auto rep = observables(green, gaussian_signal(g, 0.0, 1.0), DetectionChain{});
  const auto n = bb_photon_numbers(Gp, p);
  const HTerms h = bb_ideal_hterms(Gp, p);
  CHECK(rep.g == Approx(n.g).epsilon(1e-3));
  CHECK(rep.I_i == Approx(n.i_ratio).epsilon(1e-3));
  CHECK(rep.h.s1 == Approx(h.s1).epsilon(1e-3));
  CHECK(rep.h.s2 == Approx(h.s2).epsilon(1e-3));
  CHECK(rep.h.i1 == Approx(h.i1).epsilon(1e-3));
  CHECK(rep.h.si1 == Approx(h.si1).epsilon(1e-3));
}

TEST_CASE("contour reference point against the series") {
  // G' = 3, p = 1, s = 1 lies close to the R_t = 1 contour.
  BroadbandParams prm;
  prm.Gp = 3.0;
  prm.p = 1.0;
  prm.s = 1.0;
  const double series = bb_filtered_report(prm).R_t;
  const FrequencyGrid g(0.0, 12.0 * std::sqrt(49.0), 129);
  const auto k = build_jsf_broadband(g, g, 0.0, 1.0);
  DetectionChain chain;
  chain.f_s = gaussian_filter(g, 0.0, 1.0);
  chain.f_i = chain.f_s;
  const auto rep = observables(schmidt_oracle(k, k.engine_gain(3.0)), gaussian_signal(g, 0.0, 1.0), chain);
  CHECK(rep.R_t == Approx(series).epsilon(1e-3));
  CHECK(series < 1.0);
}

TEST_CASE("delta kernel is the single-mode amplifier") {
  const FrequencyGrid g(0.0, 16.0, 65);
  const auto k = build_jsf_delta(g, g);
  const double G = 1.1;
  const auto rep = observables(green_from_kernel(k, k.engine_gain(G)), gaussian_signal(g, 0.0, 1.0), DetectionChain{});
  const double gain = std::pow(std::cosh(G), 2);
  CHECK(rep.g == Approx(gain).epsilon(1e-3));
  CHECK(rep.R_s == Approx(sm_individual_noise(gain).R_s).epsilon(1e-3));
  CHECK(rep.R_t == Approx(sm_rt({gain, 1.0, 1.0, 1.0})).epsilon(1e-3));
}

TEST_CASE("phase of the kernel does not change observables") {
  const auto k = build_jsf_broadband(small_grid(), small_grid(), 0.0, 1.0);
  auto rotated = k;
  rotated.values *= std::polar(1.0, 0.9);
  const auto s = gaussian_signal(small_grid(), 0.0, 1.0);
  const auto a = observables(green_from_kernel(k, 2.0), s, DetectionChain{});
  const auto b = observables(green_from_kernel(rotated, 2.0), s, DetectionChain{});
  CHECK(a.R_t == Approx(b.R_t).epsilon(1e-12));
  CHECK(a.NF == Approx(b.NF).epsilon(1e-12));
}

TEST_CASE("spontaneous photons raise the counts") {
  const auto k = build_jsf_broadband(small_grid(), small_grid(), 0.0, 1.0);
  const auto green = green_from_kernel(k, 2.0);
  const auto s = gaussian_signal(small_grid(), 0.0, 1.0);
  ObservableOptions opts;
  opts.spontaneous = true;
  opts.input_photons = 10.0;
  CHECK(observables(green, s, DetectionChain{}, opts).I_s > observables(green, s, DetectionChain{}).I_s);
}

}
