#pragma once

#include <optional>
#include <string>

#include "fopa/spectral.hpp"

namespace fopa {

// Variance/covariance building blocks, all per unit input photon number.
struct HTerms {
  double s1 = 0.0, s2 = 0.0;    // signal self terms
  double i1 = 0.0, i2 = 0.0;    // idler self terms
  double vs = 0.0, vi = 0.0;    // loss-induced vacuum terms
  double si1 = 0.0, si2 = 0.0;  // signal-idler correlation

  double signal_total() const { return s1 + s2 + vs; }
  double idler_total() const { return i1 + i2 + vi; }
  double cross_total() const { return si1 + si2; }
};

struct NoiseReport {
  double g = 1.0;    // photon-number gain
  double I_s = 1.0;  // detected signal photons per input photon
  double I_i = 0.0;  // detected idler photons per input photon
  double R_s = 1.0;
  double R_i = 1.0;  // NaN when the idler is empty
  double NF = 1.0;
  double r = 1.0;
  double R_t = 1.0;  // at r
  std::optional<double> r_opt;  // empty when no signal-idler correlation
  double R_t_opt = 1.0;
  HTerms h;
};

struct DetectionChain {
  double eta_s = 1.0;
  double eta_i = 1.0;
  std::optional<FilterSpectrum> f_s;  // empty = all-pass
  std::optional<FilterSpectrum> f_i;
  double r = 1.0;

  void validate() const;
};

// Classical intensity noise of the input, ⟨|α′|⁴⟩ − ⟨|α′|²⟩², with mean Ī₀.
struct ExcessNoise {
  double V_ex = 0.0;
  double I0 = 1.0;

  // From a relative intensity variance V_ex/Ī₀².
  static ExcessNoise from_relative_variance(double rel_variance, double I0);
};

// Normalized intensity-difference noise N_s − r·N_i.
double rt_at(const HTerms& h, double I_s, double I_i, double r);

// Closed-form minimizer of rt_at over r > 0.
double ropt_general(const HTerms& h, double I_s, double I_i);

// Golden-section minimizer of rt_at over log r ∈ [log lo, log hi].
double ropt_golden(const HTerms& h, double I_s, double I_i, double lo = 1e-3, double hi = 1e3);

NoiseReport assemble_report(const HTerms& h, double g, double I_s, double I_i, double r);

NoiseReport apply_excess_noise(const NoiseReport& report, const ExcessNoise& ex);

double to_dB(double x);

// Columns of one CSV row, in fixed order.
struct CsvPoint {
  double Gp, p, s, eta_s, eta_i;
};
std::string csv_header();
std::string csv_row(const CsvPoint& point, const NoiseReport& report);

// Shortest round-trip-safe decimal (17 significant digits at most).
std::string format_double(double x);

}  // namespace fopa
