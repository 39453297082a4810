#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fopa/errors.hpp"
#include "fopa/spectral.hpp"

using namespace fopa;
using doctest::Approx;

TEST_SUITE("spectral") {

TEST_CASE("grid points and minimum size") {
  const FrequencyGrid g = build_grid(0.0, 15.0, 16);
  CHECK(g.step() == Approx(1.0));
  CHECK(g[0] == Approx(-7.5));
  CHECK(g[15] == Approx(7.5));
  const FrequencyGrid shifted = build_grid(3.0, 12.0, 257);
  CHECK(shifted[128] == Approx(3.0));
  CHECK_THROWS_AS(build_grid(0.0, 10.0, 2), InvalidArgument);
  CHECK_THROWS_AS(build_grid(0.0, 10.0, 11), InvalidArgument);
  CHECK_THROWS_AS(build_grid(0.0, -1.0, 64), InvalidArgument);
}

TEST_CASE("gaussian signal") {
  const FrequencyGrid g(0.0, 16.0, 257);
  const auto s = gaussian_signal(g, 0.0, 1.0);
  CHECK(s.values[128].real() == Approx(std::pow(std::numbers::pi, -0.25)).epsilon(1e-12));
  CHECK(s.norm_squared() == Approx(1.0).epsilon(1e-10));
  const auto wide = gaussian_signal(FrequencyGrid(0.0, 200.0, 1001), 0.0, 7.0);
  CHECK(wide.norm_squared() == Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(gaussian_signal(FrequencyGrid(0.0, 4.0, 257), 0.0, 1.0), GridCoverageError);
}

TEST_CASE("fwhm of |s|^2") {
  const FrequencyGrid g(0.0, 16.0, 1601);
  const auto s = gaussian_signal(g, 0.0, 1.0);
  std::vector<double> p(g.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(s.values[i]);
  CHECK(fwhm(g, p) == Approx(2.0 * std::sqrt(std::log(2.0))).epsilon(1e-5));
}

TEST_CASE("gaussian filter") {
  const FrequencyGrid g(0.0, 16.0, 257);
  const auto f = gaussian_filter(g, 0.0, 1.0);
  CHECK(std::abs(f.values[128]) == Approx(1.0));
  CHECK(std::abs(f.values[144]) == Approx(std::exp(-0.5)).epsilon(1e-12));
  for (const auto& v : f.values) CHECK(std::abs(v) <= 1.0);
  const auto flat = gaussian_filter(g, 0.0, 1e9);
  for (const auto& v : flat.values) CHECK(std::abs(std::abs(v) - 1.0) < 1e-12);
}

TEST_CASE("broadband kernel is constant along anti-diagonals") {
  const FrequencyGrid g(0.0, 24.0, 97);
  const auto k = build_jsf_broadband(g, g, 0.0, 1.0);
  CHECK(k.norm_squared() == Approx(1.0).epsilon(1e-8));
  const Eigen::Index n = k.values.rows();
  double worst = 0.0;
  for (Eigen::Index i = 1; i < n; ++i)
    for (Eigen::Index j = 0; j + 1 < n; ++j)
      worst = std::max(worst, std::abs(k.values(i, j) - k.values(i - 1, j + 1)));
  CHECK(worst < 1e-14 * k.values.cwiseAbs().maxCoeff());
  Eigen::Index r = 0, c = 0;
  k.values.cwiseAbs().maxCoeff(&r, &c);
  CHECK(std::abs(g[r] + g[c]) < 1e-12);
  CHECK_THROWS_AS(build_jsf_broadband(g, g, 0.0, 3.0), GridCoverageError);
}

TEST_CASE("factorable kernel is rank one") {
  const FrequencyGrid g(0.0, 16.0, 65);
  const auto a = gaussian_signal(g, 0.0, 1.0);
  const auto b = gaussian_signal(g, 0.5, 1.3);
  const auto k = build_jsf_factorable(a, b);
  CHECK(k.norm_squared() == Approx(1.0).epsilon(1e-10));
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(k.values * g.step());
  CHECK(svd.singularValues()(0) == Approx(1.0).epsilon(1e-10));
  CHECK(svd.singularValues()(1) < 1e-12);
  const auto swapped = build_jsf_factorable(b, a);
  CHECK((swapped.values - k.values.transpose()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("general kernel reduces to the broadband form without mismatch") {
  const FrequencyGrid g(0.0, 24.0, 97);
  PumpParams pump;
  pump.sigma_p = 1.0;
  pump.gamma = 0.0;
  const auto general = build_jsf_general(g, g, pump, DispersionModel{});
  const auto broad = build_jsf_broadband(g, g, 0.0, 1.0);
  CHECK((general.values - broad.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("general kernel vanishes at sinc zeros") {
  const FrequencyGrid g(0.0, 24.0, 97);
  PumpParams pump;
  pump.sigma_p = 1.0;
  pump.gamma = 0.0;
  DispersionModel d;
  // Mismatch with ΔkL/2 = π at the single point ω_s = ω_i = 2.
  d.custom = [](double ws, double wi) { return std::abs(ws - 2.0) + std::abs(wi - 2.0) < 1e-9 ? 2.0 * std::numbers::pi : 0.0; };
  const auto k = build_jsf_general(g, g, pump, d);
  CHECK(k.norm_squared() == Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(k.values(56, 56)) < 1e-14);
  CHECK(std::abs(k.values(40, 56)) > 0.0);
  d.custom = {};
  d.beta2 = 0.3;
  CHECK(build_jsf_general(g, g, pump, d).norm_squared() == Approx(1.0).epsilon(1e-8));
}

TEST_CASE("spectral overlap") {
  const FrequencyGrid g(0.0, 60.0, 601);
  const auto s = gaussian_signal(g, 0.0, 1.0);
  CHECK(std::abs(overlap_F(s, s) - 1.0) < 1e-10);
  CHECK(std::abs(overlap_F(s, gaussian_signal(g, 0.0, 2.0))) == Approx(std::sqrt(0.8)).epsilon(1e-10));
  CHECK(std::abs(overlap_F(gaussian_signal(g, -15.0, 1.0), gaussian_signal(g, 15.0, 1.0))) < 1e-8);
}

}
