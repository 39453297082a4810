#include <doctest.h>

#include <cmath>
#include <random>

#include "fopa/errors.hpp"
#include "fopa/metrics.hpp"
#include "fopa/singlemode.hpp"

using namespace fopa;
using doctest::Approx;

namespace {

HTerms random_terms(std::mt19937_64& rng, double& I_s, double& I_i) {
  // Build H terms from a physical single-mode point with random efficiencies.
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double g = 1.0 + 50.0 * u(rng);
  const double es = 0.3 + 0.7 * u(rng), ei = 0.3 + 0.7 * u(rng);
  I_s = es * g;
  I_i = ei * (g - 1.0);
  return sm_hterms({g, es, ei, 1.0});
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("decibels") {
  CHECK(to_dB(1.0) == Approx(0.0));
  CHECK(to_dB(2.0) == Approx(3.0103).epsilon(1e-5));
  CHECK(to_dB(0.5) == Approx(-3.0103).epsilon(1e-5));
}

TEST_CASE("closed-form optimum beats a log sweep and matches golden section") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    double I_s, I_i;
    const HTerms h = random_terms(rng, I_s, I_i);
    const double r = ropt_general(h, I_s, I_i);
    CHECK(r == Approx(ropt_golden(h, I_s, I_i)).epsilon(1e-8));
    for (int j = 0; j < 50; ++j)
      CHECK(rt_at(h, I_s, I_i, r) <= rt_at(h, I_s, I_i, std::pow(10.0, -2.0 + 4.0 * j / 49.0)) + 1e-15);
  }
}

TEST_CASE("single-mode terms reproduce the single-mode optimum") {
  const HTerms h = sm_hterms({7.0, 1.0, 1.0, 1.0});
  CHECK(ropt_general(h, 7.0, 6.0) == Approx(sm_ropt(7.0, 1.0, 1.0)).epsilon(1e-10));
}

TEST_CASE("optimum undefined without correlation") {
  HTerms h;
  h.s1 = 1.0;
  h.i1 = 1.0;
  CHECK_THROWS_AS(ropt_general(h, 1.0, 1.0), UndefinedOptimum);
  CHECK_THROWS_AS(ropt_general(h, 1.0, 0.0), UndefinedOptimum);
  const auto rep = assemble_report(h, 1.0, 1.0, 1.0, 1.0);
  CHECK_FALSE(rep.r_opt.has_value());
}

TEST_CASE("excess noise") {
  const auto rep = singlemode_report({10.0, 0.8, 0.9, 1.0});
  SUBCASE("zero variance leaves the report unchanged") {
    const auto same = apply_excess_noise(rep, ExcessNoise{0.0, 1e4});
    CHECK(same.R_s == rep.R_s);
    CHECK(same.R_t == rep.R_t);
    CHECK(same.NF == rep.NF);
  }
  SUBCASE("photon-ratio weighting cancels the penalty") {
    NoiseReport at = rep;
    at.r = rep.I_s / rep.I_i;
    at.R_t = rt_at(rep.h, rep.I_s, rep.I_i, at.r);
    for (double rel : {0.001, 0.1, 1.0})
      CHECK(apply_excess_noise(at, ExcessNoise::from_relative_variance(rel, 1e5)).R_t == at.R_t);
  }
  SUBCASE("individual noise grows by I_s V_ex / I0") {
    const auto ex = ExcessNoise::from_relative_variance(0.01, 100.0);
    CHECK(apply_excess_noise(rep, ex).R_s == Approx(rep.R_s + rep.I_s * ex.V_ex / ex.I0));
  }
  SUBCASE("penalty at the optimum vanishes at high gain") {
    const auto high = singlemode_report({1e7, 1.0, 1.0, 1.0});
    const auto ex = ExcessNoise::from_relative_variance(1e-4, 1e4);
    CHECK(apply_excess_noise(high, ex).R_t_opt - high.R_t_opt < 1e-6);
  }
}

TEST_CASE("csv row formatting") {
  CHECK(csv_header() ==
        "G',p,s,eta_s,eta_i,r,g,I_i,R_s,R_i,NF,NF_dB,R_t,R_t_dB,r_opt,R_t_opt,R_t_opt_dB");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  const auto row = csv_row({1.0, 0.0, 0.0, 1.0, 1.0}, singlemode_report({2.0, 1.0, 1.0, 1.0}));
  CHECK(row.find("0.33333333333333331") != std::string::npos);
}

}
