#include "fopa/engine.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "fopa/errors.hpp"

namespace fopa {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Largest eigenvalue of a Hermitian positive semi-definite matrix.
double top_eigenvalue(const MatrixXcd& m) {
  if (m.rows() == 0) return 0.0;
  VectorXcd v = VectorXcd::Ones(m.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += 0.25 * std::sin(1.0 + i);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    VectorXcd w = m * v;
    const double next = std::real(v.dot(w));
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (std::abs(next - lambda) <= 1e-13 * std::abs(next)) return next;
    lambda = next;
  }
  return lambda;
}

// Relative size of the last retained term of cosh(x) and sinh(x)/x series.
double series_tail_ratio(double x, int n_trunc) {
  if (x == 0.0) return 0.0;
  const double lx = std::log(x);
  const double t_cosh = std::exp(2.0 * n_trunc * lx - std::lgamma(2.0 * n_trunc + 1.0));
  const double t_sinh = std::exp((2.0 * n_trunc + 1.0) * lx - std::lgamma(2.0 * n_trunc + 2.0));
  return std::max(t_cosh / std::cosh(x), t_sinh / std::sinh(x));
}

MatrixXcd discrete_kernel(const JointSpectralKernel& kernel) {
  return kernel.values * std::sqrt(kernel.signal_grid.step() * kernel.idler_grid.step());
}

void require_same_grid(const FrequencyGrid& a, const FrequencyGrid& b, const char* what) {
  if (!(a == b)) throw InvalidArgument(what);
}

// Per-mode detection probability η|f|².
VectorXd detection_weights(const FrequencyGrid& grid, double eta,
                           const std::optional<FilterSpectrum>& filter, const char* what) {
  VectorXd p = VectorXd::Constant(static_cast<Eigen::Index>(grid.size()), eta);
  if (filter) {
    require_same_grid(filter->grid, grid, what);
    for (std::size_t k = 0; k < grid.size(); ++k) p[k] *= std::norm(filter->values[k]);
  }
  return p;
}

VectorXcd signal_modes(const SignalSpectrum& signal) {
  VectorXcd v(static_cast<Eigen::Index>(signal.values.size()));
  const double w = std::sqrt(signal.grid.step());
  for (std::size_t k = 0; k < signal.values.size(); ++k) v[k] = w * signal.values[k];
  return v;
}

}  // namespace

GreenFunctions::Modes GreenFunctions::modes() const {
  const double hs = signal_grid.step();
  const double hi = idler_grid.step();
  const double hx = std::sqrt(hs * hi);
  return Modes{h1s * hs, h2s * hx, h1i * hi, h2i * hx};
}

GreenFunctions GreenFunctions::from_modes(const FrequencyGrid& sg, const FrequencyGrid& ig,
                                          const Modes& m, int n_trunc, double gain) {
  const double hs = sg.step();
  const double hi = ig.step();
  const double hx = std::sqrt(hs * hi);
  return GreenFunctions{sg, ig, m.A / hs, m.B / hx, m.C / hi, m.D / hx, n_trunc, gain};
}

GreenFunctions green_from_kernel(const JointSpectralKernel& kernel, double gain, int n_trunc,
                                 bool check_truncation) {
  if (!(gain >= 0.0) || !std::isfinite(gain)) throw InvalidArgument("gain must be >= 0");
  if (n_trunc < 1) throw InvalidArgument("truncation order must be >= 1");

  const MatrixXcd k = gain * discrete_kernel(kernel);
  const MatrixXcd m_s = k * k.adjoint();
  const MatrixXcd m_i = k.transpose() * k.conjugate();

  if (check_truncation) {
    const double x = std::sqrt(std::max(0.0, top_eigenvalue(m_s)));
    const double tail = series_tail_ratio(x, n_trunc);
    if (tail > kEngineTailTolerance) {
      std::ostringstream msg;
      msg << "Green-function series: last term ratio " << tail << " at order " << n_trunc
          << " (effective gain " << x << ") exceeds " << kEngineTailTolerance;
      throw TruncationError(msg.str());
    }
  }

  // cosh-like sum Σ Mⁿ/(2n)! and sinh-like sum Σ Mⁿ/(2n+1)!, built by
  // iterated products.
  auto series = [n_trunc](const MatrixXcd& m, MatrixXcd& even, MatrixXcd& odd) {
    const Eigen::Index n = m.rows();
    MatrixXcd term = MatrixXcd::Identity(n, n);
    even = term;
    odd = term;
    for (int j = 1; j <= n_trunc; ++j) {
      term = (term * m) / (double(2 * j - 1) * double(2 * j));
      even += term;
      odd += term / double(2 * j + 1);
    }
  };

  GreenFunctions::Modes modes;
  MatrixXcd odd;
  series(m_s, modes.A, odd);
  modes.B = odd * k;
  series(m_i, modes.C, odd);
  modes.D = odd * k.transpose();
  return GreenFunctions::from_modes(kernel.signal_grid, kernel.idler_grid, modes, n_trunc, gain);
}

GreenFunctions schmidt_oracle(const JointSpectralKernel& kernel, double gain) {
  if (!(gain >= 0.0) || !std::isfinite(gain)) throw InvalidArgument("gain must be >= 0");
  const MatrixXcd k = discrete_kernel(kernel);
  Eigen::BDCSVD<MatrixXcd> svd(k, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("singular value decomposition failed");

  const MatrixXcd& u = svd.matrixU();
  const MatrixXcd& v = svd.matrixV();
  const VectorXd x = gain * svd.singularValues();
  VectorXd ch1(x.size()), sh(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double half = std::sinh(0.5 * x[j]);
    ch1[j] = 2.0 * half * half;  // cosh x − 1 without cancellation
    sh[j] = std::sinh(x[j]);
  }
  const Eigen::Index ns = k.rows(), ni = k.cols();
  GreenFunctions::Modes modes;
  modes.A = MatrixXcd::Identity(ns, ns) + u * ch1.asDiagonal() * u.adjoint();
  modes.B = u * sh.asDiagonal() * v.adjoint();
  modes.C = MatrixXcd::Identity(ni, ni) + v.conjugate() * ch1.asDiagonal() * v.transpose();
  modes.D = v.conjugate() * sh.asDiagonal() * u.transpose();
  return GreenFunctions::from_modes(kernel.signal_grid, kernel.idler_grid, modes, 0, gain);
}

double UnitarityResiduals::max() const { return std::max({rho_a, rho_b, rho_c}); }

UnitarityResiduals unitarity_residuals(const GreenFunctions& green) {
  const auto m = green.modes();
  const Eigen::Index ns = m.A.rows(), ni = m.C.rows();
  const MatrixXcd ra = m.A * m.D.transpose() - m.B * m.C.transpose();
  const MatrixXcd rb = m.A * m.A.adjoint() - m.B * m.B.adjoint() - MatrixXcd::Identity(ns, ns);
  const MatrixXcd rc = m.C * m.C.adjoint() - m.D * m.D.adjoint() - MatrixXcd::Identity(ni, ni);
  return {ra.cwiseAbs().maxCoeff(), rb.cwiseAbs().maxCoeff(), rc.cwiseAbs().maxCoeff()};
}

double green_distance(const GreenFunctions& a, const GreenFunctions& b) {
  require_same_grid(a.signal_grid, b.signal_grid, "Green functions on different signal grids");
  require_same_grid(a.idler_grid, b.idler_grid, "Green functions on different idler grids");
  const auto ma = a.modes();
  const auto mb = b.modes();
  auto spectral = [](const MatrixXcd& d) {
    Eigen::BDCSVD<MatrixXcd> svd(d);
    return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
  };
  return std::max({spectral(ma.A - mb.A), spectral(ma.B - mb.B), spectral(ma.C - mb.C),
                   spectral(ma.D - mb.D)});
}

NoiseReport observables(const GreenFunctions& green, const SignalSpectrum& signal,
                        const DetectionChain& chain, const ObservableOptions& options) {
  chain.validate();
  require_same_grid(signal.grid, green.signal_grid, "signal spectrum not on the signal grid");
  const VectorXd ps = detection_weights(green.signal_grid, chain.eta_s, chain.f_s,
                                        "signal filter not on the signal grid");
  const VectorXd pi = detection_weights(green.idler_grid, chain.eta_i, chain.f_i,
                                        "idler filter not on the idler grid");
  const auto m = green.modes();

  const VectorXcd sigma = signal_modes(signal);
  const VectorXcd u = m.A * sigma;              // signal output amplitude
  const VectorXcd v = m.D * sigma.conjugate();  // idler output amplitude
  const VectorXd u2 = u.cwiseAbs2();
  const VectorXd v2 = v.cwiseAbs2();

  double I_s = ps.dot(u2);
  double I_i = pi.dot(v2);
  const double g = u2.sum();

  // Each five-fold integral factors into a chain of matrix-vector products.
  const VectorXcd pu = ps.cast<cdouble>().cwiseProduct(u);
  const VectorXcd pv = pi.cast<cdouble>().cwiseProduct(v);
  const VectorXcd ws1 = m.A.adjoint() * pu;
  const VectorXcd ws2 = m.B.adjoint() * pu;
  const VectorXcd wi1 = m.D.adjoint() * pv;
  const VectorXcd wi2 = m.C.adjoint() * pv;

  HTerms h;
  h.s1 = ws1.squaredNorm();
  h.s2 = ws2.squaredNorm();
  h.i1 = wi1.squaredNorm();
  h.i2 = wi2.squaredNorm();
  h.vs = (ps.array() * (1.0 - ps.array()) * u2.array()).sum();
  h.vi = (pi.array() * (1.0 - pi.array()) * v2.array()).sum();
  h.si1 = std::real((ws1.array() * wi1.array()).sum());
  h.si2 = std::real((ws2.array() * wi2.array()).sum());

  if (options.spontaneous) {
    if (!(options.input_photons > 0.0))
      throw InvalidArgument("spontaneous terms need a positive input photon number");
    I_s += ps.dot(m.B.rowwise().squaredNorm()) / options.input_photons;
    I_i += pi.dot(m.D.rowwise().squaredNorm()) / options.input_photons;
  }

  NoiseReport rep = assemble_report(h, g, I_s, I_i, chain.r);
  if (rep.R_t < 0.0 || rep.R_t_opt < 0.0 || h.signal_total() < 0.0 || h.idler_total() < 0.0) {
    std::ostringstream msg;
    msg << "negative variance from loss of significance (R_t = " << rep.R_t
        << ", R_t_opt = " << rep.R_t_opt << ")";
    throw NumericalError(msg.str());
  }
  return rep;
}

HTerms observables_naive_hterms(const GreenFunctions& green, const SignalSpectrum& signal,
                                const DetectionChain& chain) {
  chain.validate();
  require_same_grid(signal.grid, green.signal_grid, "signal spectrum not on the signal grid");
  const std::size_t ns = green.signal_grid.size(), ni = green.idler_grid.size();
  if (ns > 32 || ni > 32) throw InvalidArgument("naive evaluation limited to 32-point grids");
  const VectorXd ps = detection_weights(green.signal_grid, chain.eta_s, chain.f_s,
                                        "signal filter not on the signal grid");
  const VectorXd pi = detection_weights(green.idler_grid, chain.eta_i, chain.f_i,
                                        "idler filter not on the idler grid");
  const auto m = green.modes();
  const VectorXcd sigma = signal_modes(signal);

  std::vector<cdouble> u(ns), v(ni);
  for (std::size_t k = 0; k < ns; ++k)
    for (std::size_t j = 0; j < ns; ++j) u[k] += m.A(k, j) * sigma[j];
  for (std::size_t k = 0; k < ni; ++k)
    for (std::size_t j = 0; j < ns; ++j) v[k] += m.D(k, j) * std::conj(sigma[j]);

  // Σ_{k,l} conj(x_k) P_k [Σ_m X_km Y_lm*] P_l y_l, the bracket summed innermost.
  auto quadratic = [](const std::vector<cdouble>& x, const VectorXd& px, const MatrixXcd& X,
                      const std::vector<cdouble>& y, const VectorXd& py, const MatrixXcd& Y,
                      bool conj_y, bool conj_second) {
    cdouble total = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      for (std::size_t l = 0; l < y.size(); ++l) {
        cdouble inner = 0.0;
        for (Eigen::Index j = 0; j < X.cols(); ++j)
          inner += X(k, j) * (conj_y ? std::conj(Y(l, j)) : Y(l, j));
        const cdouble yl = conj_second ? std::conj(y[l]) : y[l];
        total += std::conj(x[k]) * px[k] * inner * py[l] * yl;
      }
    }
    return total;
  };

  HTerms h;
  h.s1 = std::real(quadratic(u, ps, m.A, u, ps, m.A, true, false));
  h.s2 = std::real(quadratic(u, ps, m.B, u, ps, m.B, true, false));
  h.i1 = std::real(quadratic(v, pi, m.D, v, pi, m.D, true, false));
  h.i2 = std::real(quadratic(v, pi, m.C, v, pi, m.C, true, false));
  h.si1 = std::real(quadratic(u, ps, m.A, v, pi, m.D, false, true));
  h.si2 = std::real(quadratic(u, ps, m.B, v, pi, m.C, false, true));
  for (std::size_t k = 0; k < ns; ++k) h.vs += ps[k] * (1.0 - ps[k]) * std::norm(u[k]);
  for (std::size_t k = 0; k < ni; ++k) h.vi += pi[k] * (1.0 - pi[k]) * std::norm(v[k]);
  return h;
}

}  // namespace fopa
