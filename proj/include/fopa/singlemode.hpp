#pragma once

#include "fopa/metrics.hpp"

namespace fopa {

// Single-frequency-mode amplifier, parametrized by the photon-number gain
// g = |μ|² (so |ν|² = g − 1).
struct SingleModeParams {
  double g = 1.0;
  double eta_s = 1.0;
  double eta_i = 1.0;
  double r = 1.0;

  void validate() const;
};

struct IndividualNoise {
  double R_s;
  double R_i;
};

IndividualNoise sm_individual_noise(double g);
double sm_noise_figure(double g);

// Intensity-difference noise of the detected twin beams.
double sm_rt(const SingleModeParams& params);

// Ratio r minimizing sm_rt. Throws UndefinedOptimum at g = 1.
double sm_ropt(double g, double eta_s, double eta_i);

// Full report through the generic H-term assembly.
HTerms sm_hterms(const SingleModeParams& params);
NoiseReport singlemode_report(const SingleModeParams& params);

}  // namespace fopa
