#include "fopa/metrics.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "fopa/errors.hpp"
#include "fopa/golden.hpp"

namespace fopa {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

void DetectionChain::validate() const {
  if (!(eta_s >= 0.0 && eta_s <= 1.0 && eta_i >= 0.0 && eta_i <= 1.0))
    throw InvalidArgument("quantum efficiencies must lie in [0, 1]");
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("AC response ratio must be positive");
}

ExcessNoise ExcessNoise::from_relative_variance(double rel_variance, double I0) {
  if (rel_variance < 0.0) throw InvalidArgument("relative intensity variance must be >= 0");
  if (!(I0 > 0.0)) throw InvalidArgument("mean input photon number must be positive");
  return ExcessNoise{rel_variance * I0 * I0, I0};
}

double rt_at(const HTerms& h, double I_s, double I_i, double r) {
  const double den = I_s + r * r * I_i;
  if (!(den > 0.0)) throw InvalidArgument("no detected photons");
  return (h.signal_total() + r * r * h.idler_total() - 2.0 * r * h.cross_total()) / den;
}

double ropt_general(const HTerms& h, double I_s, double I_i) {
  const double a = h.signal_total();
  const double b = h.idler_total();
  const double c = h.cross_total();
  if (!(c > 0.0) || !(I_i > 0.0))
    throw UndefinedOptimum("optimal ratio undefined without signal-idler correlation");
  // Positive root of c·I_i·r² − (a·I_i − b·I_s)·r − c·I_s = 0, written in
  // whichever form avoids cancellation.
  const double d = a * I_i - b * I_s;
  const double root = std::sqrt(d * d + 4.0 * c * c * I_s * I_i);
  return d >= 0.0 ? (d + root) / (2.0 * c * I_i) : 2.0 * c * I_s / (root - d);
}

double ropt_golden(const HTerms& h, double I_s, double I_i, double lo, double hi) {
  if (!(lo > 0.0 && hi > lo)) throw InvalidArgument("invalid search interval for r");
  // Evaluated in extended precision: near the minimum the objective is flat to
  // O(δ²), so double evaluation would cap the abscissa accuracy at ~1e-8.
  using real = long double;
  const real a = h.signal_total(), b = h.idler_total(), c = h.cross_total();
  auto objective = [&](real log_r) {
    const real r = std::exp(log_r);
    return (a + r * r * b - 2 * r * c) / (real(I_s) + r * r * real(I_i));
  };
  const real x = golden_section_minimize<real>(objective, std::log(real(lo)), std::log(real(hi)),
                                               real(1e-13));
  return static_cast<double>(std::exp(x));
}

NoiseReport assemble_report(const HTerms& h, double g, double I_s, double I_i, double r) {
  if (!(I_s > 0.0)) throw InvalidArgument("signal arm detects no photons");
  NoiseReport rep;
  rep.g = g;
  rep.I_s = I_s;
  rep.I_i = I_i;
  rep.h = h;
  rep.R_s = h.signal_total() / I_s;
  rep.R_i = I_i > 0.0 ? h.idler_total() / I_i : kNaN;
  rep.NF = h.signal_total() / (I_s * I_s);
  rep.r = r;
  rep.R_t = rt_at(h, I_s, I_i, r);
  if (h.cross_total() > 0.0 && I_i > 0.0) {
    rep.r_opt = ropt_general(h, I_s, I_i);
    if (!std::isfinite(*rep.r_opt) || !(*rep.r_opt > 0.0))
      rep.r_opt = ropt_golden(h, I_s, I_i);
    rep.R_t_opt = rt_at(h, I_s, I_i, *rep.r_opt);
  } else {
    rep.R_t_opt = rep.R_t;
  }
  return rep;
}

NoiseReport apply_excess_noise(const NoiseReport& report, const ExcessNoise& ex) {
  if (ex.V_ex < 0.0) throw InvalidArgument("excess noise variance must be >= 0");
  if (!(ex.I0 > 0.0)) throw InvalidArgument("mean input photon number must be positive");
  NoiseReport out = report;
  if (ex.V_ex == 0.0) return out;
  const double k = ex.V_ex / ex.I0;
  auto penalty = [&](double r) {
    const double diff = report.I_s - r * report.I_i;
    return diff * diff / (report.I_s + r * r * report.I_i) * k;
  };
  out.R_s = report.R_s + report.I_s * k;
  if (report.I_i > 0.0) out.R_i = report.R_i + report.I_i * k;
  out.NF = out.R_s / report.I_s;
  out.R_t = report.R_t + penalty(report.r);
  if (report.r_opt) out.R_t_opt = report.R_t_opt + penalty(*report.r_opt);
  else out.R_t_opt = out.R_t;
  return out;
}

double to_dB(double x) {
  if (!(x > 0.0)) throw InvalidArgument("dB conversion requires a positive value");
  return 10.0 * std::log10(x);
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string csv_header() {
  return "G',p,s,eta_s,eta_i,r,g,I_i,R_s,R_i,NF,NF_dB,R_t,R_t_dB,r_opt,R_t_opt,R_t_opt_dB";
}

std::string csv_row(const CsvPoint& pt, const NoiseReport& rep) {
  auto db = [](double x) { return x > 0.0 ? to_dB(x) : kNaN; };
  const double fields[] = {pt.Gp,    pt.p,          pt.s,     pt.eta_s,         pt.eta_i,
                           rep.r,    rep.g,         rep.I_i,  rep.R_s,          rep.R_i,
                           rep.NF,   db(rep.NF),    rep.R_t,  db(rep.R_t),      rep.r_opt.value_or(kNaN),
                           rep.R_t_opt, db(rep.R_t_opt)};
  std::string row;
  for (std::size_t i = 0; i < std::size(fields); ++i) {
    if (i) row += ',';
    row += format_double(fields[i]);
  }
  return row;
}

}  // namespace fopa
