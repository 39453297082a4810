#include "fopa/factorable.hpp"

#include <cmath>
#include <limits>

#include "fopa/errors.hpp"

namespace fopa {

namespace {

void require_gain(double G) {
  if (!(G >= 0.0) || !std::isfinite(G)) throw InvalidArgument("gain coefficient must be >= 0");
}

void require_overlap(cdouble F) {
  if (!(std::abs(F) <= 1.0 + 1e-12)) throw InvalidArgument("matching coefficient needs |F| <= 1");
}

}  // namespace

void FactorableParams::validate() const {
  require_gain(G);
  require_overlap(F);
}

PhotonNumbers fac_photon_numbers(double G, cdouble F, double I_in) {
  require_gain(G);
  require_overlap(F);
  if (!(I_in > 0.0)) throw InvalidArgument("input photon number must be positive");
  const double x = std::norm(F * std::sinh(G));
  return {(1.0 + x) * I_in, x * I_in};
}

HTerms fac_hterms(double G, cdouble F, double eta_s, double eta_i) {
  require_gain(G);
  require_overlap(F);
  if (!(eta_s >= 0.0 && eta_s <= 1.0 && eta_i >= 0.0 && eta_i <= 1.0))
    throw InvalidArgument("quantum efficiencies must lie in [0, 1]");
  const double f2 = std::norm(F);
  const double sh2 = std::sinh(G) * std::sinh(G);
  const double ch2 = std::cosh(G) * std::cosh(G);
  HTerms h;
  h.s1 = eta_s * eta_s * (1.0 + 2.0 * sh2 * f2 + sh2 * sh2 * f2);
  h.s2 = eta_s * eta_s * sh2 * ch2 * f2;
  h.i1 = eta_i * eta_i * sh2 * sh2 * f2;
  h.i2 = eta_i * eta_i * sh2 * ch2 * f2;
  h.vs = eta_s * (1.0 - eta_s) * (1.0 + sh2 * f2);
  h.vi = eta_i * (1.0 - eta_i) * sh2 * f2;
  h.si1 = eta_s * eta_i * sh2 * ch2 * f2;
  h.si2 = h.si1;
  return h;
}

FactorableNoise fac_noise(double G, cdouble F) {
  const HTerms h = fac_hterms(G, F);
  const auto n = fac_photon_numbers(G, F, 1.0);
  FactorableNoise out;
  out.R_s = h.signal_total() / n.I_s;
  // (H_i1 + H_i2)/I_i = sinh² + cosh², independent of F; also the G → 0 limit.
  out.R_i = std::abs(F) > 0.0 ? std::cosh(2.0 * G) : std::numeric_limits<double>::quiet_NaN();
  out.NF = h.signal_total() / (n.I_s * n.I_s);
  // H_s + H_i − 2H_si collapses to 1 at unit efficiency; the direct sum cancels ~g² digits.
  out.R_t = 1.0 / (n.I_s + n.I_i);
  if (std::abs(F) > 0.0) out.nf_limit = 2.0 / std::norm(F);
  return out;
}

double fac_nf_limit(cdouble F) {
  require_overlap(F);
  if (std::abs(F) == 0.0) throw NumericalError("noise figure undefined for F = 0");
  return 2.0 / std::norm(F);
}

NoiseReport fac_report(const FactorableParams& params, const DetectionChain& chain) {
  params.validate();
  chain.validate();
  const HTerms h = fac_hterms(params.G, params.F, chain.eta_s, chain.eta_i);
  const auto n = fac_photon_numbers(params.G, params.F, 1.0);
  return assemble_report(h, n.I_s, chain.eta_s * n.I_s, chain.eta_i * n.I_i, chain.r);
}

GreenFunctions fac_green(double G, const SignalSpectrum& phi_s, const SignalSpectrum& phi_i) {
  require_gain(G);
  const double hs = phi_s.grid.step();
  const double hi = phi_i.grid.step();
  const Eigen::Index ns = static_cast<Eigen::Index>(phi_s.values.size());
  const Eigen::Index ni = static_cast<Eigen::Index>(phi_i.values.size());
  if (ns != static_cast<Eigen::Index>(phi_s.grid.size()) ||
      ni != static_cast<Eigen::Index>(phi_i.grid.size()))
    throw InvalidArgument("spectrum samples do not match their grids");

  Eigen::VectorXcd a(ns), b(ni);
  for (Eigen::Index k = 0; k < ns; ++k) a[k] = phi_s.values[k];
  for (Eigen::Index k = 0; k < ni; ++k) b[k] = phi_i.values[k];

  const double half = std::sinh(0.5 * G);
  const double ch1 = 2.0 * half * half;  // cosh G − 1
  const double sh = std::sinh(G);
  GreenFunctions green{phi_s.grid, phi_i.grid, {}, {}, {}, {}, 0, G};
  green.h1s = ch1 * a * a.adjoint();
  green.h1s.diagonal().array() += 1.0 / hs;
  green.h2s = sh * a * b.transpose();
  green.h1i = ch1 * b * b.adjoint();
  green.h1i.diagonal().array() += 1.0 / hi;
  green.h2i = sh * b * a.transpose();
  return green;
}

FactorableSpectra fac_spectra(double G, const SignalSpectrum& s, const SignalSpectrum& phi_s,
                              const SignalSpectrum& phi_i) {
  require_gain(G);
  const cdouble F = overlap_F(s, phi_s);  // also checks the shared grid
  const double half = std::sinh(0.5 * G);
  const double ch1 = 2.0 * half * half;
  const double sh = std::sinh(G);

  FactorableSpectra out{s.grid, phi_i.grid, std::vector<double>(s.values.size()),
                        std::vector<double>(phi_i.values.size())};
  for (std::size_t k = 0; k < s.values.size(); ++k)
    out.S_s[k] = std::norm(s.values[k] + ch1 * F * phi_s.values[k]);
  const double idler_scale = std::norm(F) * sh * sh;
  for (std::size_t k = 0; k < phi_i.values.size(); ++k)
    out.S_i[k] = idler_scale * std::norm(phi_i.values[k]);
  return out;
}

}  // namespace fopa
