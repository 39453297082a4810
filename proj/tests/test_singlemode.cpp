#include <doctest.h>

#include <cmath>

#include "fopa/errors.hpp"
#include "fopa/golden.hpp"
#include "fopa/singlemode.hpp"

using namespace fopa;
using doctest::Approx;

TEST_SUITE("singlemode") {

TEST_CASE("individual noise") {
  CHECK(sm_individual_noise(1.0).R_s == Approx(1.0));
  CHECK(sm_individual_noise(2.0).R_s == Approx(3.0));
  CHECK(sm_individual_noise(39.8).R_s == Approx(78.6));
  CHECK(sm_individual_noise(2.0).R_i == Approx(3.0));
  CHECK_THROWS_AS(sm_individual_noise(0.5), InvalidArgument);
}

TEST_CASE("noise figure") {
  CHECK(sm_noise_figure(1.0) == Approx(1.0));
  CHECK(sm_noise_figure(2.0) == Approx(1.5));
  CHECK(to_dB(sm_noise_figure(2.0)) == Approx(1.7609).epsilon(1e-4));
  CHECK(std::abs(sm_noise_figure(1e6) - 2.0) < 1e-5);
}

TEST_CASE("intensity difference noise") {
  CHECK(sm_rt({2.0, 1.0, 1.0, 1.0}) == Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(sm_rt({2.0, 1.0, 1.0, std::sqrt(2.0)}) == Approx(0.171573).epsilon(1e-6));
  for (double e : {0.3, 0.7, 1.0}) CHECK(sm_rt({1.0, e, 0.9, 1.0}) == Approx(1.0));
}

TEST_CASE("optimal ratio") {
  CHECK(sm_ropt(2.0, 1.0, 1.0) == Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(sm_ropt(1e8, 0.8, 0.8) == Approx(1.0).epsilon(1e-6));
  auto rt = [](double g, double es, double ei) {
    return [=](double r) { return sm_rt({g, es, ei, r}); };
  };
  const double golden = golden_section_minimize<double>(rt(5.0, 0.75, 0.85), 0.1, 10.0, 1e-12);
  CHECK(sm_ropt(5.0, 0.75, 0.85) == Approx(golden).epsilon(1e-8));
  CHECK(sm_ropt(2.0, 1.0, 1.0) == Approx(golden_section_minimize<double>(rt(2.0, 1, 1), 0.1, 10.0, 1e-12)).epsilon(1e-8));
  CHECK_THROWS_AS(sm_ropt(1.0, 1.0, 1.0), UndefinedOptimum);
}

TEST_CASE("report through generic assembly matches closed forms") {
  for (double g : {1.5, 4.0, 30.0}) {
    for (double es : {1.0, 0.75}) {
      const SingleModeParams prm{g, es, 0.85, 1.3};
      const auto rep = singlemode_report(prm);
      CHECK(rep.R_t == Approx(sm_rt(prm)).epsilon(1e-12));
      CHECK(*rep.r_opt == Approx(sm_ropt(g, es, 0.85)).epsilon(1e-10));
      if (es == 1.0) {
        CHECK(rep.R_s == Approx(sm_individual_noise(g).R_s).epsilon(1e-12));
        CHECK(rep.NF == Approx(sm_noise_figure(g)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("efficiency orderings at r = 1") {
  auto rt = [](double g, double es, double ei) { return sm_rt({g, es, ei, 1.0}); };
  // Mismatched pair beats 85/85 up to g = 4.75 and loses to 75/75 beyond g ≈ 12.41.
  for (double g = 1.05; g < 4.74; g += 0.1) CHECK(rt(g, 0.75, 0.85) < rt(g, 0.85, 0.85));
  for (double g = 4.76; g < 50.0; g += 0.5) CHECK(rt(g, 0.75, 0.85) > rt(g, 0.85, 0.85));
  for (double g = 1.05; g < 12.40; g += 0.1) CHECK(rt(g, 0.75, 0.85) < rt(g, 0.75, 0.75));
  for (double g = 12.42; g < 1e4; g *= 1.2) CHECK(rt(g, 0.75, 0.85) > rt(g, 0.75, 0.75));
  for (double g = 1.5; g < 500.0; g *= 1.3) {
    CHECK(rt(g * 1.3, 0.8, 0.8) < rt(g, 0.8, 0.8));
    CHECK(rt(g, 0.85, 0.85) < rt(g, 0.75, 0.75));
  }
}

TEST_CASE("optimized ratio: monotone in gain, 3 dB over r = 1 at high gain") {
  auto best = [](double g, double es, double ei) { return sm_rt({g, es, ei, sm_ropt(g, es, ei)}); };
  for (auto [es, ei] : {std::pair{1.0, 1.0}, {0.85, 0.85}, {0.75, 0.75}, {0.75, 0.85}})
    for (double g = 1.5; g < 1e4; g *= 1.5) CHECK(best(g * 1.5, es, ei) < best(g, es, ei));
  const double g = 1e8;
  CHECK(sm_rt({g, 1.0, 1.0, 1.0}) / best(g, 1.0, 1.0) == Approx(2.0).epsilon(1e-3));
  CHECK(best(2.0, 1.0, 1.0) == Approx(1.0 / std::pow(std::sqrt(2.0) + 1.0, 2)).epsilon(1e-12));
}

TEST_CASE("optimized ratio minimizes over a log sweep") {
  for (double g : {1.2, 5.0, 80.0})
    for (auto [es, ei] : {std::pair{0.6, 0.6}, {0.75, 0.85}, {1.0, 0.5}}) {
      const double r = sm_ropt(g, es, ei);
      for (int j = 0; j < 50; ++j)
        CHECK(sm_rt({g, es, ei, r}) <= sm_rt({g, es, ei, std::pow(10.0, -2.0 + 4.0 * j / 49.0)}) + 1e-15);
    }
}

}
