#pragma once

#include <optional>
#include <vector>

#include "fopa/engine.hpp"
#include "fopa/metrics.hpp"
#include "fopa/spectral.hpp"

namespace fopa {

// Rank-one joint spectrum φ_s ⊗ φ_i. F is the overlap of the injected signal
// with φ_s; only |F| enters the observables.
struct FactorableParams {
  double G = 0.0;
  cdouble F = 1.0;

  void validate() const;
};

struct PhotonNumbers {
  double I_s;
  double I_i;
};

PhotonNumbers fac_photon_numbers(double G, cdouble F, double I_in);

HTerms fac_hterms(double G, cdouble F, double eta_s = 1.0, double eta_i = 1.0);

struct FactorableNoise {
  double R_s;
  double R_i;  // cosh 2G; NaN at F = 0
  double NF;   // exact, (H_s1 + H_s2)/I_s²
  double R_t;  // at r = 1
  std::optional<double> nf_limit;  // high-gain limit 2/|F|², empty at F = 0
};

FactorableNoise fac_noise(double G, cdouble F);

// High-gain noise figure 2/|F|²; throws NumericalError at F = 0.
double fac_nf_limit(cdouble F);

NoiseReport fac_report(const FactorableParams& params, const DetectionChain& chain);

GreenFunctions fac_green(double G, const SignalSpectrum& phi_s, const SignalSpectrum& phi_i);

// Output power spectra per input photon: ∫S_s = 1 + |F sinh G|², ∫S_i = |F sinh G|².
struct FactorableSpectra {
  FrequencyGrid signal_grid;
  FrequencyGrid idler_grid;
  std::vector<double> S_s;
  std::vector<double> S_i;
};

FactorableSpectra fac_spectra(double G, const SignalSpectrum& s, const SignalSpectrum& phi_s,
                              const SignalSpectrum& phi_i);

}  // namespace fopa
