#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fopa {

using cdouble = std::complex<double>;

// Uniform frequency axis. Points are stored implicitly as center + offset.
class FrequencyGrid {
 public:
  static constexpr std::size_t kMinPoints = 16;

  FrequencyGrid(double center, double span, std::size_t n_points);

  double center() const { return center_; }
  double span() const { return span_; }
  std::size_t size() const { return n_; }
  double step() const { return span_ / static_cast<double>(n_ - 1); }

  // Offset of point i from the grid center.
  double offset(std::size_t i) const { return -0.5 * span_ + static_cast<double>(i) * step(); }
  double operator[](std::size_t i) const { return center_ + offset(i); }
  std::vector<double> points() const;

  bool operator==(const FrequencyGrid&) const = default;

 private:
  double center_;
  double span_;
  std::size_t n_;
};

FrequencyGrid build_grid(double center, double span, std::size_t n_points);

// Midpoint-rule integral of sampled values.
double integrate(const FrequencyGrid& grid, std::span<const double> values);

// Full width at half maximum of a single-peaked sampled profile, with linear
// interpolation of the half-maximum crossings.
double fwhm(const FrequencyGrid& grid, std::span<const double> values);

// Unit-normalized complex spectral amplitude, units (rad/s)^(-1/2).
struct SignalSpectrum {
  FrequencyGrid grid;
  std::vector<cdouble> values;
  double center = 0.0;
  double bandwidth = 0.0;

  double norm_squared() const;
};

// Complex filter transmission with |f| <= 1.
struct FilterSpectrum {
  FrequencyGrid grid;
  std::vector<cdouble> values;
  double center = 0.0;
  double bandwidth = 0.0;  // +inf for an all-pass filter
};

SignalSpectrum gaussian_signal(const FrequencyGrid& grid, double center, double sigma);

// Wraps arbitrary samples; rescaled to unit quadrature norm.
SignalSpectrum signal_from_samples(const FrequencyGrid& grid, std::vector<cdouble> values,
                                   double center = 0.0, double bandwidth = 0.0);

FilterSpectrum gaussian_filter(const FrequencyGrid& grid, double center, double sigma_f);
FilterSpectrum flat_filter(const FrequencyGrid& grid);

// F = ∫ s(ω) φ*(ω) dω.
cdouble overlap_F(const SignalSpectrum& s, const SignalSpectrum& phi);

struct PumpParams {
  double sigma_p = 1.0;      // bandwidth (rad/s)
  double omega_p0 = 0.0;     // center (rad/s)
  double peak_power = 1.0;   // W
  double gamma = 1.0;        // W^-1 m^-1
  double length = 1.0;      // m

  void validate() const;
};

// Phase mismatch Δk(ω_s, ω_i) = k_s + k_i − 2k_p + 2γP_p. The pump pair is
// taken at the mean frequency (ω_s+ω_i)/2, which cancels the group-delay term.
// A custom callable, when set, replaces the Taylor expansion; it receives
// offsets from ω_p0 and must return k_s + k_i − 2k_p (SPM is added here).
struct DispersionModel {
  double beta2 = 0.0;  // s^2/m
  double beta3 = 0.0;  // s^3/m
  std::function<double(double, double)> custom;

  double delta_k(double offset_s, double offset_i, const PumpParams& pump) const;
};

enum class KernelKind { General, Factorable, Broadband, Delta };

// ψ[ω_s, ω_i] with ∬|ψ|² dω_s dω_i = 1 on the grid.
//
// `raw_norm` is the quadrature norm of the un-normalized amplitude the kernel
// was built from. For the broadband form the un-normalized amplitude is the
// unit-area pump envelope exp(−u²/4σ_p²)/(2√π σ_p), so a series gain G′
// corresponds to an engine gain G = G′·raw_norm.
struct JointSpectralKernel {
  FrequencyGrid signal_grid;
  FrequencyGrid idler_grid;
  Eigen::MatrixXcd values;
  KernelKind kind = KernelKind::General;
  double raw_norm = 1.0;

  double norm_squared() const;
  double engine_gain(double series_gain) const { return series_gain * raw_norm; }
};

JointSpectralKernel build_jsf_broadband(const FrequencyGrid& signal_grid,
                                        const FrequencyGrid& idler_grid, double omega_p0,
                                        double sigma_p);

JointSpectralKernel build_jsf_factorable(const SignalSpectrum& phi_s, const SignalSpectrum& phi_i);

JointSpectralKernel build_jsf_general(const FrequencyGrid& signal_grid,
                                      const FrequencyGrid& idler_grid, const PumpParams& pump,
                                      const DispersionModel& dispersion);

// δ((ω_s−ω_s0)+(ω_i−ω_i0)) regularized to one grid cell. Both grids must be
// identical in size and step; idler point n−1−k pairs with signal point k.
JointSpectralKernel build_jsf_delta(const FrequencyGrid& signal_grid,
                                    const FrequencyGrid& idler_grid);

double sinc(double x);

}  // namespace fopa
