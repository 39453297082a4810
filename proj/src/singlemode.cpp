#include "fopa/singlemode.hpp"

#include <cmath>

#include "fopa/errors.hpp"

namespace fopa {

namespace {

void require_gain(double g) {
  if (!(g >= 1.0) || !std::isfinite(g)) throw InvalidArgument("gain must satisfy g >= 1");
}

void require_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("quantum efficiency must lie in [0, 1]");
}

}  // namespace

void SingleModeParams::validate() const {
  require_gain(g);
  require_eta(eta_s);
  require_eta(eta_i);
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("AC response ratio must be positive");
}

IndividualNoise sm_individual_noise(double g) {
  require_gain(g);
  return {2.0 * g - 1.0, 2.0 * g - 1.0};
}

double sm_noise_figure(double g) {
  require_gain(g);
  return (2.0 * g - 1.0) / g;
}

double sm_rt(const SingleModeParams& p) {
  p.validate();
  const double mu2 = p.g;
  const double nu2 = p.g - 1.0;
  const double es = p.eta_s, ei = p.eta_i, r = p.r;
  const double den = es * mu2 + ei * nu2 * r * r;
  if (!(den > 0.0)) throw InvalidArgument("no detected photons");
  // η_i(2η_iν⁴ + ν²)r² − 4η_sη_iμ²ν²r + 2η_s²μ²ν² + η_sμ², regrouped with
  // μ² − ν² = 1 so the O(g²) parts cancel inside one square.
  const double d = ei * nu2 * r - es * mu2;
  const double num = 2.0 * d * d + es * mu2 * (1.0 - 2.0 * es) + ei * nu2 * r * r;
  return num / den;
}

double sm_ropt(double g, double eta_s, double eta_i) {
  require_gain(g);
  require_eta(eta_s);
  require_eta(eta_i);
  if (g == 1.0) throw UndefinedOptimum("optimal ratio undefined at g = 1 (empty idler)");
  if (!(eta_s > 0.0 && eta_i > 0.0))
    throw UndefinedOptimum("optimal ratio undefined with a blind detector");
  // Stationary point of sm_rt: B·E·r² + (A·D − C·E)·r − B·D = 0 with the
  // coefficients of its numerator (A, −2B, C) and denominator (D, E). The
  // familiar sqrt form agrees with this root only for η_s = η_i.
  const double mu2 = g, nu2 = g - 1.0;
  const double A = eta_i * (2.0 * eta_i * nu2 * nu2 + nu2);
  const double B = 2.0 * eta_s * eta_i * mu2 * nu2;
  const double C = 2.0 * eta_s * eta_s * mu2 * nu2 + eta_s * mu2;
  const double D = eta_s * mu2, E = eta_i * nu2;
  const double q = A * D - C * E;
  const double disc = std::sqrt(q * q + 4.0 * B * B * E * D);
  return q >= 0.0 ? 2.0 * B * D / (q + disc) : (disc - q) / (2.0 * B * E);
}

HTerms sm_hterms(const SingleModeParams& p) {
  p.validate();
  const double mu2 = p.g;
  const double nu2 = p.g - 1.0;
  const double es = p.eta_s, ei = p.eta_i;
  HTerms h;
  h.s1 = es * es * mu2 * mu2;
  h.s2 = es * es * mu2 * nu2;
  h.i1 = ei * ei * nu2 * nu2;
  h.i2 = ei * ei * mu2 * nu2;
  h.vs = es * (1.0 - es) * mu2;
  h.vi = ei * (1.0 - ei) * nu2;
  h.si1 = es * ei * mu2 * nu2;
  h.si2 = h.si1;
  return h;
}

NoiseReport singlemode_report(const SingleModeParams& p) {
  const HTerms h = sm_hterms(p);
  return assemble_report(h, p.g, p.eta_s * p.g, p.eta_i * (p.g - 1.0), p.r);
}

}  // namespace fopa
