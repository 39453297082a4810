#pragma once

#include <vector>

#include "fopa/metrics.hpp"
#include "fopa/spectral.hpp"

namespace fopa {

// Truncation order per summation index. Order 10 leaves a residual of up to
// ~1e-6 at G' = 4, so the default is 20 (see README, "Truncation").
inline constexpr int kSeriesDefaultTrunc = 20;
inline constexpr double kSeriesMaxGain = 4.0;
inline constexpr double kConservationTolerance = 1e-11;
inline constexpr double kSeriesTailTolerance = 1e-12;

// Perfectly phase-matched Gaussian pump. Frequencies are in units of the
// signal bandwidth σ: p = σ_p/σ, s = σ/σ_f (s = 0 means no filter).
struct BroadbandParams {
  double Gp = 0.0;
  double p = 0.0;
  double s = 0.0;
  double eta_s = 1.0;
  double eta_i = 1.0;
  double r = 1.0;
  int n_trunc = kSeriesDefaultTrunc;

  void validate() const;
};

// Radicand of the filtered quadruple sums.
double xi_f(int k1, int k2, int k3, int k4, double p, double s);

// Radicand of the filtered double sums, x ∈ {1, 2}.
double xi_vac(int k1, int k2, int x, double p, double s);

struct BroadbandPhotons {
  double g;        // I_s/|α|²
  double i_ratio;  // I_i/|α|²
};

// Throws TruncationError if g − i_ratio − 1 exceeds kConservationTolerance.
BroadbandPhotons bb_photon_numbers(double Gp, double p, int n_trunc = kSeriesDefaultTrunc);

// |g − i_ratio − 1| with no truncation checks.
double conservation_residual(double Gp, double p, int n_trunc = kSeriesDefaultTrunc);

// Power spectra on a grid of offsets (in units of σ) from the grid center.
struct BroadbandSpectra {
  FrequencyGrid grid;
  std::vector<double> S_s;
  std::vector<double> S_i;
};
BroadbandSpectra bb_spectra(double Gp, double p, const FrequencyGrid& grid,
                            int n_trunc = kSeriesDefaultTrunc);

HTerms bb_ideal_hterms(double Gp, double p, int n_trunc = kSeriesDefaultTrunc);

NoiseReport bb_filtered_report(const BroadbandParams& params);

// Filtered H terms with efficiencies applied; check_tail enables the
// last-shell truncation guard.
HTerms bb_hterms(const BroadbandParams& params, bool check_tail = true);

// Same sums by the direct quadruple loop; reference for bb_hterms.
HTerms bb_hterms_naive(const BroadbandParams& params);

// G' giving photon gain g at bandwidth ratio p (g must be reachable for G' ≤ 4).
double bb_gain_for(double g, double p, int n_trunc = kSeriesDefaultTrunc);

}  // namespace fopa
