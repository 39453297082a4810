#include "fopa/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fopa/errors.hpp"

namespace fopa {

namespace {

constexpr double kNormDefectTolerance = 1e-6;
constexpr double kNormalizedTolerance = 1e-8;

void require(bool condition, const char* message) {
  if (!condition) throw InvalidArgument(message);
}

double quadrature_norm_squared(const FrequencyGrid& grid, std::span<const cdouble> values) {
  double sum = 0.0;
  for (const cdouble& v : values) sum += std::norm(v);
  return sum * grid.step();
}

// Covers ±6 bandwidths around the grid center.
void require_coverage(const FrequencyGrid& grid, double bandwidth, const char* what) {
  if (grid.span() < 12.0 * bandwidth) {
    std::ostringstream msg;
    msg << what << ": grid span " << grid.span() << " does not cover ±6 × bandwidth "
        << bandwidth;
    throw GridCoverageError(msg.str());
  }
}

JointSpectralKernel normalize(JointSpectralKernel kernel) {
  const double raw = std::sqrt(kernel.norm_squared());
  if (!(raw > 0.0) || !std::isfinite(raw))
    throw NumericalError("joint spectral kernel vanishes on the grid");
  kernel.values /= raw;
  kernel.raw_norm *= raw;
  return kernel;
}

}  // namespace

FrequencyGrid::FrequencyGrid(double center, double span, std::size_t n_points)
    : center_(center), span_(span), n_(n_points) {
  require(std::isfinite(center), "grid center must be finite");
  require(span > 0.0 && std::isfinite(span), "grid span must be positive");
  require(n_points >= kMinPoints, "grid needs at least 16 points");
}

std::vector<double> FrequencyGrid::points() const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = (*this)[i];
  return out;
}

FrequencyGrid build_grid(double center, double span, std::size_t n_points) {
  return FrequencyGrid(center, span, n_points);
}

double integrate(const FrequencyGrid& grid, std::span<const double> values) {
  require(values.size() == grid.size(), "sample count does not match grid");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum * grid.step();
}

double fwhm(const FrequencyGrid& grid, std::span<const double> values) {
  require(values.size() == grid.size(), "sample count does not match grid");
  const auto peak = std::max_element(values.begin(), values.end());
  const std::size_t ip = static_cast<std::size_t>(peak - values.begin());
  const double half = 0.5 * *peak;
  if (!(half > 0.0)) throw InvalidArgument("profile has no positive peak");
  auto crossing = [&](std::size_t inside, std::size_t outside) {
    const double t = (values[inside] - half) / (values[inside] - values[outside]);
    return grid.offset(inside) + t * (grid.offset(outside) - grid.offset(inside));
  };
  std::size_t lo = ip, hi = ip;
  while (lo > 0 && values[lo - 1] > half) --lo;
  while (hi + 1 < values.size() && values[hi + 1] > half) ++hi;
  if (lo == 0 || hi + 1 == values.size())
    throw GridCoverageError("half maximum not reached inside the grid");
  return crossing(hi, hi + 1) - crossing(lo, lo - 1);
}

double SignalSpectrum::norm_squared() const { return quadrature_norm_squared(grid, values); }

SignalSpectrum gaussian_signal(const FrequencyGrid& grid, double center, double sigma) {
  require(sigma > 0.0, "signal bandwidth must be positive");
  require(center >= grid[0] && center <= grid[grid.size() - 1], "signal center outside grid");

  const double amplitude = 1.0 / std::sqrt(std::sqrt(std::numbers::pi) * sigma);
  std::vector<cdouble> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = (grid.offset(i) + (grid.center() - center)) / sigma;
    values[i] = amplitude * std::exp(-0.5 * d * d);
  }
  const double n2 = quadrature_norm_squared(grid, values);
  if (std::abs(n2 - 1.0) > kNormDefectTolerance) {
    std::ostringstream msg;
    msg << "gaussian signal (sigma=" << sigma << ") has norm defect " << std::abs(n2 - 1.0)
        << " on a grid of span " << grid.span();
    throw GridCoverageError(msg.str());
  }
  const double scale = 1.0 / std::sqrt(n2);
  for (auto& v : values) v *= scale;
  return SignalSpectrum{grid, std::move(values), center, sigma};
}

SignalSpectrum signal_from_samples(const FrequencyGrid& grid, std::vector<cdouble> values,
                                   double center, double bandwidth) {
  require(values.size() == grid.size(), "sample count does not match grid");
  const double n2 = quadrature_norm_squared(grid, values);
  if (!(n2 > 0.0)) throw InvalidArgument("signal samples vanish");
  const double scale = 1.0 / std::sqrt(n2);
  for (auto& v : values) v *= scale;
  return SignalSpectrum{grid, std::move(values), center, bandwidth};
}

FilterSpectrum gaussian_filter(const FrequencyGrid& grid, double center, double sigma_f) {
  require(sigma_f > 0.0, "filter bandwidth must be positive");
  std::vector<cdouble> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = (grid.offset(i) + (grid.center() - center)) / sigma_f;
    values[i] = std::exp(-0.5 * d * d);
  }
  return FilterSpectrum{grid, std::move(values), center, sigma_f};
}

FilterSpectrum flat_filter(const FrequencyGrid& grid) {
  return FilterSpectrum{grid, std::vector<cdouble>(grid.size(), 1.0), grid.center(),
                        std::numeric_limits<double>::infinity()};
}

cdouble overlap_F(const SignalSpectrum& s, const SignalSpectrum& phi) {
  require(s.grid == phi.grid, "overlap requires spectra on the same grid");
  cdouble sum = 0.0;
  for (std::size_t i = 0; i < s.values.size(); ++i) sum += s.values[i] * std::conj(phi.values[i]);
  return sum * s.grid.step();
}

void PumpParams::validate() const {
  // γP_p = 0 is allowed: it is the phase-matched reference case.
  require(sigma_p > 0.0 && length > 0.0, "pump bandwidth and fiber length must be positive");
  require(peak_power >= 0.0 && gamma >= 0.0, "pump power and nonlinearity must be non-negative");
}

double DispersionModel::delta_k(double offset_s, double offset_i, const PumpParams& pump) const {
  const double spm = 2.0 * pump.gamma * pump.peak_power;
  if (custom) return custom(offset_s, offset_i) + spm;
  const double mean = 0.5 * (offset_s + offset_i);
  const double quad = offset_s * offset_s + offset_i * offset_i - 2.0 * mean * mean;
  const double cubic = offset_s * offset_s * offset_s + offset_i * offset_i * offset_i -
                       2.0 * mean * mean * mean;
  return 0.5 * beta2 * quad + beta3 / 6.0 * cubic + spm;
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

double JointSpectralKernel::norm_squared() const {
  return values.squaredNorm() * signal_grid.step() * idler_grid.step();
}

JointSpectralKernel build_jsf_broadband(const FrequencyGrid& signal_grid,
                                        const FrequencyGrid& idler_grid, double omega_p0,
                                        double sigma_p) {
  require(sigma_p > 0.0, "pump bandwidth must be positive");
  const double detuning = signal_grid.center() + idler_grid.center() - 2.0 * omega_p0;
  require(std::abs(detuning) <= 1e-6 * std::min(signal_grid.step(), idler_grid.step()),
          "band centers must satisfy omega_s0 + omega_i0 = 2 omega_p0");
  require_coverage(signal_grid, sigma_p, "broadband kernel (signal)");
  require_coverage(idler_grid, sigma_p, "broadband kernel (idler)");

  const double prefactor = 1.0 / (2.0 * std::sqrt(std::numbers::pi) * sigma_p);
  JointSpectralKernel k{signal_grid, idler_grid,
                        Eigen::MatrixXcd(signal_grid.size(), idler_grid.size()),
                        KernelKind::Broadband, 1.0};
  for (std::size_t i = 0; i < signal_grid.size(); ++i) {
    for (std::size_t j = 0; j < idler_grid.size(); ++j) {
      const double u = signal_grid.offset(i) + idler_grid.offset(j) + detuning;
      k.values(i, j) = prefactor * std::exp(-u * u / (4.0 * sigma_p * sigma_p));
    }
  }
  return normalize(std::move(k));
}

JointSpectralKernel build_jsf_factorable(const SignalSpectrum& phi_s, const SignalSpectrum& phi_i) {
  require(std::abs(phi_s.norm_squared() - 1.0) <= kNormalizedTolerance &&
              std::abs(phi_i.norm_squared() - 1.0) <= kNormalizedTolerance,
          "factorable kernel requires unit-normalized marginal spectra");
  JointSpectralKernel k{phi_s.grid, phi_i.grid,
                        Eigen::MatrixXcd(phi_s.grid.size(), phi_i.grid.size()),
                        KernelKind::Factorable, 1.0};
  for (std::size_t i = 0; i < phi_s.values.size(); ++i)
    for (std::size_t j = 0; j < phi_i.values.size(); ++j)
      k.values(i, j) = phi_s.values[i] * phi_i.values[j];
  return k;
}

JointSpectralKernel build_jsf_general(const FrequencyGrid& signal_grid,
                                      const FrequencyGrid& idler_grid, const PumpParams& pump,
                                      const DispersionModel& dispersion) {
  pump.validate();
  require_coverage(signal_grid, pump.sigma_p, "general kernel (signal)");
  require_coverage(idler_grid, pump.sigma_p, "general kernel (idler)");

  const double ds0 = signal_grid.center() - pump.omega_p0;
  const double di0 = idler_grid.center() - pump.omega_p0;
  JointSpectralKernel k{signal_grid, idler_grid,
                        Eigen::MatrixXcd(signal_grid.size(), idler_grid.size()),
                        KernelKind::General, 1.0};
  for (std::size_t i = 0; i < signal_grid.size(); ++i) {
    const double ws = ds0 + signal_grid.offset(i);
    for (std::size_t j = 0; j < idler_grid.size(); ++j) {
      const double wi = di0 + idler_grid.offset(j);
      const double u = ws + wi;
      const double envelope = std::exp(-u * u / (4.0 * pump.sigma_p * pump.sigma_p)) /
                              (2.0 * std::sqrt(std::numbers::pi) * pump.sigma_p);
      const double dk = dispersion.delta_k(ws, wi, pump);
      k.values(i, j) = envelope * sinc(0.5 * dk * pump.length);
    }
  }
  return normalize(std::move(k));
}

JointSpectralKernel build_jsf_delta(const FrequencyGrid& signal_grid,
                                    const FrequencyGrid& idler_grid) {
  require(signal_grid.size() == idler_grid.size() &&
              std::abs(signal_grid.step() - idler_grid.step()) <= 1e-12 * signal_grid.step(),
          "delta kernel requires matching grids");
  const std::size_t n = signal_grid.size();
  JointSpectralKernel k{signal_grid, idler_grid, Eigen::MatrixXcd::Zero(n, n), KernelKind::Delta,
                        1.0};
  for (std::size_t i = 0; i < n; ++i) k.values(i, n - 1 - i) = 1.0 / signal_grid.step();
  return normalize(std::move(k));
}

}  // namespace fopa
