#include "fopa/broadband.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "fopa/errors.hpp"
#include "fopa/summation.hpp"

namespace fopa {

namespace {

// Parities (0 even, 1 odd) of k1..k4 for each quadruple sum.
using Pattern = std::array<int, 4>;
constexpr Pattern kS1{0, 0, 0, 0};
constexpr Pattern kS2{0, 0, 1, 1};
constexpr Pattern kI1{1, 1, 1, 1};
constexpr Pattern kI2{1, 1, 0, 0};
constexpr Pattern kSI1{0, 1, 0, 1};
constexpr Pattern kSI2{1, 0, 1, 0};

void require_series_args(double Gp, double p, int n_trunc) {
  if (!(Gp >= 0.0 && Gp <= kSeriesMaxGain))
    throw InvalidArgument("series gain G' must lie in [0, 4]");
  if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidArgument("bandwidth ratio p must be >= 0");
  if (n_trunc < 1) throw InvalidArgument("truncation order must be >= 1");
}

// a_k = G'^k/k! for k = 0 … 2N+1.
std::vector<double> power_coefficients(double Gp, int n_trunc) {
  std::vector<double> a(2 * n_trunc + 2);
  a[0] = 1.0;
  for (std::size_t k = 1; k < a.size(); ++k) a[k] = a[k - 1] * Gp / static_cast<double>(k);
  return a;
}

// ξ^f with k3, k4 entering only through their sum.
double xi_f_pair(int k1, int k2, int k34, double p, double s) {
  const double p2 = p * p, s2 = s * s;
  const double K = k1 + k2 + k34;
  const double cross = k2 * k34 + k1 * (2.0 * k2 + k34);
  return K * p2 + s2 * (2.0 + 4.0 * K * p2 + 4.0 * cross * p2 * p2) +
         4.0 * s2 * s2 * p2 * (1.0 + 2.0 * k1 * p2) * (1.0 + 2.0 * k2 * p2) * k34;
}

struct ShellSum {
  double total;
  double shell;  // terms with some index at the truncation order

  double tail_ratio() const { return total > 0.0 ? shell / total : 0.0; }
};

// Σ_{n1..n4 ≤ N} Π a_{k_j} / √(1 + ξ^f), k_j = 2n_j + parity_j. The (k3, k4)
// pair is pre-summed per k3 + k4, which ξ^f depends on alone.
ShellSum quadruple_sum(const std::vector<double>& a, int n_trunc, const Pattern& par, double p,
                       double s) {
  const int m_max = 4 * n_trunc + 2;
  std::vector<CompensatedSum> pair_all(m_max + 1), pair_shell(m_max + 1);
  for (int n3 = 0; n3 <= n_trunc; ++n3) {
    for (int n4 = 0; n4 <= n_trunc; ++n4) {
      const int k3 = 2 * n3 + par[2], k4 = 2 * n4 + par[3];
      const double w = a[k3] * a[k4];
      pair_all[k3 + k4] += w;
      if (n3 == n_trunc || n4 == n_trunc) pair_shell[k3 + k4] += w;
    }
  }
  CompensatedSum total, shell;
  for (int n1 = 0; n1 <= n_trunc; ++n1) {
    for (int n2 = 0; n2 <= n_trunc; ++n2) {
      const int k1 = 2 * n1 + par[0], k2 = 2 * n2 + par[1];
      const double w = a[k1] * a[k2];
      const bool edge = n1 == n_trunc || n2 == n_trunc;
      for (int m = 0; m <= m_max; ++m) {
        const double c = pair_all[m].value();
        if (c == 0.0) continue;
        const double inv = 1.0 / std::sqrt(1.0 + xi_f_pair(k1, k2, m, p, s));
        total += w * c * inv;
        shell += w * (edge ? c : pair_shell[m].value()) * inv;
      }
    }
  }
  return {total.value(), shell.value()};
}

double quadruple_sum_naive(const std::vector<double>& a, int n_trunc, const Pattern& par, double p,
                           double s) {
  CompensatedSum total;
  for (int n1 = 0; n1 <= n_trunc; ++n1)
    for (int n2 = 0; n2 <= n_trunc; ++n2)
      for (int n3 = 0; n3 <= n_trunc; ++n3)
        for (int n4 = 0; n4 <= n_trunc; ++n4) {
          const int k1 = 2 * n1 + par[0], k2 = 2 * n2 + par[1];
          const int k3 = 2 * n3 + par[2], k4 = 2 * n4 + par[3];
          total += a[k1] * a[k2] * a[k3] * a[k4] / std::sqrt(1.0 + xi_f(k1, k2, k3, k4, p, s));
        }
  return total.value();
}

// Σ_{n1,n2 ≤ N} a_{k1} a_{k2} · term(k1, k2), k = 2n + parity.
template <typename Term>
ShellSum double_sum(const std::vector<double>& a, int n_trunc, int parity, Term term) {
  CompensatedSum total, shell;
  for (int n1 = 0; n1 <= n_trunc; ++n1) {
    for (int n2 = 0; n2 <= n_trunc; ++n2) {
      const int k1 = 2 * n1 + parity, k2 = 2 * n2 + parity;
      const double t = a[k1] * a[k2] * term(k1, k2);
      total += t;
      if (n1 == n_trunc || n2 == n_trunc) shell += t;
    }
  }
  return {total.value(), shell.value()};
}

void check_tail(const ShellSum& sum, const char* name, const BroadbandParams& prm) {
  if (sum.tail_ratio() > kSeriesTailTolerance) {
    std::ostringstream msg;
    msg << name << ": last-shell ratio " << sum.tail_ratio() << " exceeds "
        << kSeriesTailTolerance << " at G'=" << prm.Gp << ", p=" << prm.p << ", s=" << prm.s
        << ", N_trunc=" << prm.n_trunc;
    throw TruncationError(msg.str());
  }
}

struct PhotonSums {
  ShellSum I_s, I_i;
};

// Detected photon numbers before efficiencies.
PhotonSums photon_sums(const std::vector<double>& a, int n_trunc, double p, double s) {
  auto radicand = [p, s](int k1, int k2) { return 1.0 / std::sqrt(1.0 + xi_vac(k1, k2, 1, p, s)); };
  return {double_sum(a, n_trunc, 0, radicand), double_sum(a, n_trunc, 1, radicand)};
}

ShellSum vacuum_sum(const std::vector<double>& a, int n_trunc, int parity, double eta, double p,
                    double s) {
  return double_sum(a, n_trunc, parity, [&](int k1, int k2) {
    return 1.0 / std::sqrt(1.0 + xi_vac(k1, k2, 1, p, s)) -
           eta / std::sqrt(1.0 + xi_vac(k1, k2, 2, p, s));
  });
}

double gain_sum(const std::vector<double>& a, int n_trunc, double p) {
  return photon_sums(a, n_trunc, p, 0.0).I_s.total;
}

}  // namespace

void BroadbandParams::validate() const {
  require_series_args(Gp, p, n_trunc);
  if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidArgument("bandwidth ratio s must be >= 0");
  if (!(eta_s >= 0.0 && eta_s <= 1.0 && eta_i >= 0.0 && eta_i <= 1.0))
    throw InvalidArgument("quantum efficiencies must lie in [0, 1]");
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("AC response ratio must be positive");
}

double xi_f(int k1, int k2, int k3, int k4, double p, double s) {
  if (k1 < 0 || k2 < 0 || k3 < 0 || k4 < 0) throw InvalidArgument("indices must be >= 0");
  return xi_f_pair(k1, k2, k3 + k4, p, s);
}

double xi_vac(int k1, int k2, int x, double p, double s) {
  if (x != 1 && x != 2) throw InvalidArgument("xi_vac: x must be 1 or 2");
  if (k1 < 0 || k2 < 0) throw InvalidArgument("indices must be >= 0");
  const double p2 = p * p;
  return (k1 + k2) * p2 + x * s * s * (1.0 + 2.0 * k1 * p2) * (1.0 + 2.0 * k2 * p2);
}

double conservation_residual(double Gp, double p, int n_trunc) {
  require_series_args(Gp, p, n_trunc);
  const auto a = power_coefficients(Gp, n_trunc);
  const auto sums = photon_sums(a, n_trunc, p, 0.0);
  return std::abs(sums.I_s.total - sums.I_i.total - 1.0);
}

BroadbandPhotons bb_photon_numbers(double Gp, double p, int n_trunc) {
  require_series_args(Gp, p, n_trunc);
  const auto a = power_coefficients(Gp, n_trunc);
  const auto sums = photon_sums(a, n_trunc, p, 0.0);
  const double residual = std::abs(sums.I_s.total - sums.I_i.total - 1.0);
  if (residual > kConservationTolerance) {
    std::ostringstream msg;
    msg << "photon-number conservation residual " << residual << " at G'=" << Gp << ", p=" << p
        << " exceeds " << kConservationTolerance << " (N_trunc=" << n_trunc << ")";
    throw TruncationError(msg.str());
  }
  return {sums.I_s.total, sums.I_i.total};
}

BroadbandSpectra bb_spectra(double Gp, double p, const FrequencyGrid& grid, int n_trunc) {
  require_series_args(Gp, p, n_trunc);
  const auto a = power_coefficients(Gp, n_trunc);
  const double p2 = p * p;
  const double norm = 1.0 / std::sqrt(std::numbers::pi);

  BroadbandSpectra out{grid, std::vector<double>(grid.size()), std::vector<double>(grid.size())};
  // One-dimensional factors: S = (1/√π)·(Σ_n a_k e^{−x²/2v_n}/√v_n)².
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid.offset(j);
    CompensatedSum sig, idl;
    for (int n = 0; n <= n_trunc; ++n) {
      const double ve = 1.0 + 4.0 * n * p2;
      const double vo = 1.0 + 2.0 * (2 * n + 1) * p2;
      sig += a[2 * n] * std::exp(-x * x / (2.0 * ve)) / std::sqrt(ve);
      idl += a[2 * n + 1] * std::exp(-x * x / (2.0 * vo)) / std::sqrt(vo);
    }
    out.S_s[j] = norm * sig.value() * sig.value();
    out.S_i[j] = norm * idl.value() * idl.value();
  }

  const double g = gain_sum(a, n_trunc, p);
  const double area = integrate(grid, out.S_s);
  if (std::abs(area - g) > 1e-8 * g) {
    std::ostringstream msg;
    msg << "signal spectrum integrates to " << area << " instead of g = " << g
        << "; widen the grid (span " << grid.span() << ")";
    throw GridCoverageError(msg.str());
  }
  return out;
}

HTerms bb_hterms(const BroadbandParams& prm, bool check) {
  prm.validate();
  const auto a = power_coefficients(prm.Gp, prm.n_trunc);
  const int N = prm.n_trunc;
  const double es = prm.eta_s, ei = prm.eta_i;

  struct Entry {
    const char* name;
    const Pattern& pattern;
    double scale;
    double HTerms::*field;
  };
  const Entry entries[] = {
      {"H_s1", kS1, es * es, &HTerms::s1},    {"H_s2", kS2, es * es, &HTerms::s2},
      {"H_i1", kI1, ei * ei, &HTerms::i1},    {"H_i2", kI2, ei * ei, &HTerms::i2},
      {"H_si1", kSI1, es * ei, &HTerms::si1}, {"H_si2", kSI2, es * ei, &HTerms::si2},
  };
  HTerms h;
  for (const auto& e : entries) {
    const ShellSum sum = quadruple_sum(a, N, e.pattern, prm.p, prm.s);
    if (check) check_tail(sum, e.name, prm);
    h.*e.field = e.scale * sum.total;
  }
  const ShellSum vs = vacuum_sum(a, N, 0, es, prm.p, prm.s);
  const ShellSum vi = vacuum_sum(a, N, 1, ei, prm.p, prm.s);
  if (check) {
    check_tail(vs, "H_vs", prm);
    check_tail(vi, "H_vi", prm);
  }
  h.vs = es * vs.total;
  h.vi = ei * vi.total;
  return h;
}

HTerms bb_hterms_naive(const BroadbandParams& prm) {
  prm.validate();
  const auto a = power_coefficients(prm.Gp, prm.n_trunc);
  const int N = prm.n_trunc;
  const double es = prm.eta_s, ei = prm.eta_i;
  HTerms h;
  h.s1 = es * es * quadruple_sum_naive(a, N, kS1, prm.p, prm.s);
  h.s2 = es * es * quadruple_sum_naive(a, N, kS2, prm.p, prm.s);
  h.i1 = ei * ei * quadruple_sum_naive(a, N, kI1, prm.p, prm.s);
  h.i2 = ei * ei * quadruple_sum_naive(a, N, kI2, prm.p, prm.s);
  h.si1 = es * ei * quadruple_sum_naive(a, N, kSI1, prm.p, prm.s);
  h.si2 = es * ei * quadruple_sum_naive(a, N, kSI2, prm.p, prm.s);
  h.vs = es * vacuum_sum(a, N, 0, es, prm.p, prm.s).total;
  h.vi = ei * vacuum_sum(a, N, 1, ei, prm.p, prm.s).total;
  return h;
}

HTerms bb_ideal_hterms(double Gp, double p, int n_trunc) {
  BroadbandParams prm;
  prm.Gp = Gp;
  prm.p = p;
  prm.n_trunc = n_trunc;
  return bb_hterms(prm);
}

NoiseReport bb_filtered_report(const BroadbandParams& prm) {
  const HTerms h = bb_hterms(prm);
  const auto a = power_coefficients(prm.Gp, prm.n_trunc);
  const auto detected = photon_sums(a, prm.n_trunc, prm.p, prm.s);
  check_tail(detected.I_s, "I_s", prm);
  check_tail(detected.I_i, "I_i", prm);

  double g;
  if (prm.s == 0.0) {
    g = detected.I_s.total;
    if (prm.eta_s == 1.0 && prm.eta_i == 1.0) bb_photon_numbers(prm.Gp, prm.p, prm.n_trunc);
  } else {
    g = gain_sum(a, prm.n_trunc, prm.p);
  }
  return assemble_report(h, g, prm.eta_s * detected.I_s.total, prm.eta_i * detected.I_i.total,
                         prm.r);
}

double bb_gain_for(double g, double p, int n_trunc) {
  require_series_args(0.0, p, n_trunc);
  if (!(g >= 1.0) || !std::isfinite(g)) throw InvalidArgument("target gain must be >= 1");
  if (g == 1.0) return 0.0;
  auto f = [&](double Gp) { return gain_sum(power_coefficients(Gp, n_trunc), n_trunc, p) - g; };
  const double f_hi = f(kSeriesMaxGain);
  if (f_hi < 0.0) {
    std::ostringstream msg;
    msg << "gain " << g << " unreachable at p=" << p << " (maximum " << f_hi + g
        << " at G'=" << kSeriesMaxGain << ")";
    throw InvalidArgument(msg.str());
  }
  std::uintmax_t max_iter = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      f, 0.0, kSeriesMaxGain, 1.0 - g, f_hi, boost::math::tools::eps_tolerance<double>(52),
      max_iter);
  return 0.5 * (bracket.first + bracket.second);
}

}  // namespace fopa
