#include "fopa/app/sweep.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include <Eigen/Core>
#include <boost/version.hpp>

#include "fopa/app/parallel.hpp"
#include "fopa/broadband.hpp"
#include "fopa/engine.hpp"
#include "fopa/factorable.hpp"
#include "fopa/singlemode.hpp"

#ifndef FOPA_VERSION
#define FOPA_VERSION "0.0.0"
#endif

namespace fopa::app {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double parse_number(const std::string& text, const std::string& origin, const std::string& key) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(value))
    throw ConfigError(origin + ": `" + key + "` expects a number, got `" + text + "`");
  return value;
}

int parse_int(const std::string& text, const std::string& origin, const std::string& key) {
  int value = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw ConfigError(origin + ": `" + key + "` expects an integer, got `" + text + "`");
  return value;
}

bool parse_bool(const std::string& text, const std::string& origin, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(origin + ": `" + key + "` expects true/false, got `" + text + "`");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    std::size_t b = item.find_first_not_of(" \t");
    std::size_t e = item.find_last_not_of(" \t");
    parts.push_back(b == std::string::npos ? "" : item.substr(b, e - b + 1));
  }
  return parts;
}

const std::set<std::string> kAxisNames{"Gp", "g", "p", "s", "eta_s", "eta_i", "eta", "r", "F"};

void set_axis_value(PointParams& p, const std::string& name, const AxisValue& v) {
  if (name == "Gp") p.Gp = v.a;
  else if (name == "g") p.g = v.a;
  else if (name == "p") p.p = v.a;
  else if (name == "s") p.s = v.a;
  else if (name == "eta_s") p.eta_s = v.a;
  else if (name == "eta_i") p.eta_i = v.a;
  else if (name == "eta") { p.eta_s = v.a; p.eta_i = v.b; }
  else if (name == "r") p.r = v.a;
  else if (name == "F") p.F = v.a;
}

double resolve_r(const SweepSpec& spec, const PointParams& params, const NoiseReport& rep) {
  if (!std::isnan(params.r)) return params.r;
  switch (spec.r.policy) {
    case RPolicy::Fixed: return spec.r.value;
    case RPolicy::Opt: return rep.r_opt.value_or(1.0);
    case RPolicy::PhotonRatio: return rep.I_i > 0.0 ? rep.I_s / rep.I_i : 1.0;
  }
  return 1.0;
}

NoiseReport with_r(NoiseReport rep, double r) {
  rep.r = r;
  rep.R_t = rt_at(rep.h, rep.I_s, rep.I_i, r);
  return rep;
}

SweepRow evaluate_singlemode(const SweepSpec&, const PointParams& prm) {
  const double g = std::isnan(prm.g) ? std::pow(std::cosh(prm.Gp), 2) : prm.g;
  SingleModeParams sm{g, prm.eta_s, prm.eta_i, 1.0};
  return {{std::acosh(std::sqrt(g)), kNaN, kNaN, prm.eta_s, prm.eta_i}, singlemode_report(sm)};
}

SweepRow evaluate_factorable(const SweepSpec&, const PointParams& prm) {
  if (!(prm.F >= 0.0 && prm.F <= 1.0)) throw InvalidArgument("|F| must lie in [0, 1]");
  double G = prm.Gp;
  if (!std::isnan(prm.g)) {
    if (prm.g > 1.0 && prm.F == 0.0) throw InvalidArgument("gain above 1 unreachable with F = 0");
    G = prm.g == 1.0 ? 0.0 : std::asinh(std::sqrt((prm.g - 1.0) / (prm.F * prm.F)));
  }
  FactorableParams fp{G, std::polar(prm.F, prm.F_phase)};
  DetectionChain chain;
  chain.eta_s = prm.eta_s;
  chain.eta_i = prm.eta_i;
  return {{G, kNaN, kNaN, prm.eta_s, prm.eta_i}, fac_report(fp, chain)};
}

SweepRow evaluate_broadband(const SweepSpec& spec, const PointParams& prm) {
  BroadbandParams bp;
  bp.Gp = std::isnan(prm.g) ? prm.Gp : bb_gain_for(prm.g, prm.p, spec.n_trunc);
  bp.p = prm.p;
  bp.s = prm.s;
  bp.eta_s = prm.eta_s;
  bp.eta_i = prm.eta_i;
  bp.n_trunc = spec.n_trunc;
  return {{bp.Gp, prm.p, prm.s, prm.eta_s, prm.eta_i}, bb_filtered_report(bp)};
}

SweepRow evaluate_engine(const SweepSpec& spec, const PointParams& prm) {
  const EngineSettings& es = spec.engine;
  double Gp = prm.Gp;
  if (!std::isnan(prm.g)) {
    if (es.kernel == "broadband") Gp = bb_gain_for(prm.g, prm.p, spec.n_trunc);
    else if (es.kernel == "delta" || es.kernel == "factorable") Gp = std::acosh(std::sqrt(prm.g));
    else throw InvalidArgument("a g axis is not supported for the general kernel");
  }
  const double span = es.span > 0.0 ? es.span : 12.0 * std::sqrt(1.0 + 48.0 * prm.p * prm.p);
  const FrequencyGrid grid(0.0, span, es.points);

  JointSpectralKernel kernel = [&] {
    if (es.kernel == "broadband") return build_jsf_broadband(grid, grid, 0.0, prm.p);
    if (es.kernel == "delta") return build_jsf_delta(grid, grid);
    if (es.kernel == "factorable") {
      const auto phi = gaussian_signal(grid, 0.0, es.phi_width);
      return build_jsf_factorable(phi, phi);
    }
    PumpParams pump;
    pump.sigma_p = prm.p;
    pump.peak_power = 1.0;
    pump.gamma = 0.5 * es.spm;
    pump.length = es.length;
    DispersionModel dispersion;
    dispersion.beta2 = es.beta2;
    dispersion.beta3 = es.beta3;
    return build_jsf_general(grid, grid, pump, dispersion);
  }();

  const auto green = green_from_kernel(kernel, kernel.engine_gain(Gp), es.n_trunc);
  const auto signal = gaussian_signal(grid, 0.0, 1.0);
  DetectionChain chain;
  chain.eta_s = prm.eta_s;
  chain.eta_i = prm.eta_i;
  if (prm.s > 0.0) {
    chain.f_s = gaussian_filter(grid, 0.0, 1.0 / prm.s);
    chain.f_i = gaussian_filter(grid, 0.0, 1.0 / prm.s);
  }
  ObservableOptions options;
  options.spontaneous = es.spontaneous;
  options.input_photons = spec.I0;
  return {{Gp, prm.p, prm.s, prm.eta_s, prm.eta_i}, observables(green, signal, chain, options)};
}

std::string csv_column(const std::string& axis) {
  if (axis == "Gp") return "G'";
  if (axis == "eta") return "eta_s";
  return axis;
}

std::string gp_quote(const std::string& s) { return "\"" + s + "\""; }

}  // namespace

const char* regime_name(Regime regime) {
  switch (regime) {
    case Regime::SingleMode: return "singlemode";
    case Regime::Factorable: return "factorable";
    case Regime::Broadband: return "broadband";
    case Regime::Engine: return "engine";
  }
  return "?";
}

std::string RSetting::str() const {
  switch (policy) {
    case RPolicy::Fixed: return "fixed:" + format_double(value);
    case RPolicy::Opt: return "opt";
    case RPolicy::PhotonRatio: return "photon-ratio";
  }
  return "?";
}

RSetting parse_r(const std::string& text) {
  if (text == "opt") return {RPolicy::Opt, 1.0};
  if (text == "photon-ratio") return {RPolicy::PhotonRatio, 1.0};
  std::string number = text.rfind("fixed:", 0) == 0 ? text.substr(6) : text;
  const double v = parse_number(number, "r", "r");
  if (!(v > 0.0)) throw ConfigError("r: ratio must be positive");
  return {RPolicy::Fixed, v};
}

Axis parse_axis(const std::string& name, const std::string& text) {
  if (!kAxisNames.count(name)) throw ConfigError("unknown sweep axis `" + name + "`");
  Axis axis{name, {}};
  const auto parts = split(text, ':');
  if (parts.size() == 3 || (parts.size() == 4 && parts[0] == "log")) {
    const bool log = parts.size() == 4;
    const std::size_t o = log ? 1 : 0;
    const double lo = parse_number(parts[o], "sweep." + name, "lo");
    const double hi = parse_number(parts[o + 1], "sweep." + name, "hi");
    const int count = parse_int(parts[o + 2], "sweep." + name, "count");
    if (count < 1) throw ConfigError("sweep." + name + ": count must be >= 1");
    if (log && !(lo > 0.0 && hi > 0.0)) throw ConfigError("sweep." + name + ": log range needs positive bounds");
    for (int i = 0; i < count; ++i) {
      const double t = count == 1 ? 0.0 : double(i) / double(count - 1);
      const double v = log ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)))
                           : lo + t * (hi - lo);
      axis.values.push_back({v, v});
    }
    return axis;
  }
  if (parts.size() != 1) throw ConfigError("sweep." + name + ": expected lo:hi:n, log:lo:hi:n or a list");
  for (const auto& item : split(text, ',')) {
    if (name == "eta") {
      const auto pair = split(item, '/');
      if (pair.size() > 2) throw ConfigError("sweep.eta: expected eta_s/eta_i, got `" + item + "`");
      const double a = parse_number(pair[0], "sweep.eta", "eta_s");
      const double b = pair.size() == 2 ? parse_number(pair[1], "sweep.eta", "eta_i") : a;
      axis.values.push_back({a, b});
    } else {
      const double v = parse_number(item, "sweep." + name, name);
      axis.values.push_back({v, v});
    }
  }
  return axis;
}

void SweepSpec::validate() const {
  if (axes.size() > 2) throw ConfigError("at most two swept axes per run");
  if (axes.size() == 2 && axes[0].name == axes[1].name) throw ConfigError("axis swept twice");
  for (const auto& a : axes) {
    if (a.values.empty()) throw ConfigError("sweep." + a.name + ": no values");
    if (a.name == "eta" && (axes.size() == 2 && (axes[0].name.rfind("eta_", 0) == 0 ||
                                                 axes[1].name.rfind("eta_", 0) == 0)))
      throw ConfigError("the paired eta axis cannot be combined with eta_s/eta_i axes");
  }
  if (n_trunc < 1) throw ConfigError("n_trunc must be >= 1");
  if (engine.points < FrequencyGrid::kMinPoints) throw ConfigError("engine.points must be >= 16");
  if (engine.n_trunc < 1) throw ConfigError("engine.n_trunc must be >= 1");
  static const std::set<std::string> kernels{"broadband", "factorable", "delta", "general"};
  if (!kernels.count(engine.kernel)) throw ConfigError("engine.kernel: unknown kernel `" + engine.kernel + "`");
  if (excess_rel_variance < 0.0) throw ConfigError("excess_rel_variance must be >= 0");
  if (!(I0 > 0.0)) throw ConfigError("I0 must be positive");
}

SweepSpec spec_from_config(const ConfigMap& config) {
  SweepSpec spec;
  bool gp_set = false, g_set = false;
  auto num = [](const ConfigEntry& e, const std::string& key) {
    return parse_number(e.value, e.origin, key);
  };
  if (auto it = config.find("regime"); it != config.end()) {
    const auto& v = it->second.value;
    if (v == "singlemode") spec.regime = Regime::SingleMode;
    else if (v == "factorable") spec.regime = Regime::Factorable;
    else if (v == "broadband") spec.regime = Regime::Broadband;
    else if (v == "engine") spec.regime = Regime::Engine;
    else throw ConfigError(it->second.origin + ": unknown regime `" + v + "`");
  }

  for (const auto& [key, entry] : config) {
    const std::string& v = entry.value;
    try {
      if (key == "regime") continue;
      if (key == "Gp") { spec.base.Gp = num(entry, key); gp_set = true; }
      else if (key == "g") { spec.base.g = num(entry, key); g_set = true; }
      else if (key == "p") spec.base.p = num(entry, key);
      else if (key == "s") spec.base.s = num(entry, key);
      else if (key == "eta_s") spec.base.eta_s = num(entry, key);
      else if (key == "eta_i") spec.base.eta_i = num(entry, key);
      else if (key == "eta") {
        const auto parts = split(v, ' ');
        std::vector<std::string> vals;
        for (const auto& x : parts) if (!x.empty()) vals.push_back(x);
        if (vals.empty() || vals.size() > 2) throw ConfigError(entry.origin + ": `eta` expects one or two numbers");
        spec.base.eta_s = parse_number(vals[0], entry.origin, key);
        spec.base.eta_i = vals.size() == 2 ? parse_number(vals[1], entry.origin, key) : spec.base.eta_s;
      }
      else if (key == "F") spec.base.F = num(entry, key);
      else if (key == "F_phase") spec.base.F_phase = num(entry, key);
      else if (key == "r") spec.r = parse_r(v);
      else if (key == "n_trunc") spec.n_trunc = parse_int(v, entry.origin, key);
      else if (key == "output") spec.output = v;
      else if (key == "title") spec.title = v;
      else if (key == "plot_y") spec.plot_y = split(v, ',');
      else if (key == "plot_x") spec.plot_x = v;
      else if (key == "excess_rel_variance") spec.excess_rel_variance = num(entry, key);
      else if (key == "I0") spec.I0 = num(entry, key);
      else if (key == "engine.kernel") spec.engine.kernel = v;
      else if (key == "engine.points") spec.engine.points = static_cast<std::size_t>(std::max(0, parse_int(v, entry.origin, key)));
      else if (key == "engine.span") spec.engine.span = num(entry, key);
      else if (key == "engine.n_trunc") spec.engine.n_trunc = parse_int(v, entry.origin, key);
      else if (key == "engine.beta2") spec.engine.beta2 = num(entry, key);
      else if (key == "engine.beta3") spec.engine.beta3 = num(entry, key);
      else if (key == "engine.spm") spec.engine.spm = num(entry, key);
      else if (key == "engine.length") spec.engine.length = num(entry, key);
      else if (key == "engine.phi_width") spec.engine.phi_width = num(entry, key);
      else if (key == "engine.spontaneous") spec.engine.spontaneous = parse_bool(v, entry.origin, key);
      else if (key.rfind("sweep.", 0) == 0) spec.axes.push_back(parse_axis(key.substr(6), v));
      else throw ConfigError(entry.origin + ": unknown key `" + key + "`");
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      if (msg.rfind(entry.origin, 0) == 0) throw;
      throw ConfigError(entry.origin + ": " + msg);
    }
  }
  if (gp_set && g_set)
    throw ConfigError(config.at("g").origin + ": set either `g` or `Gp`, not both");
  spec.validate();
  return spec;
}

std::vector<PointParams> lattice(const SweepSpec& spec) {
  std::vector<PointParams> points;
  const Axis none{"", {{0.0, 0.0}}};
  const Axis& inner = spec.axes.size() > 0 ? spec.axes[0] : none;
  const Axis& outer = spec.axes.size() > 1 ? spec.axes[1] : none;
  for (const auto& vo : outer.values) {
    for (const auto& vi : inner.values) {
      PointParams p = spec.base;
      if (!outer.name.empty()) set_axis_value(p, outer.name, vo);
      if (!inner.name.empty()) set_axis_value(p, inner.name, vi);
      points.push_back(p);
    }
  }
  return points;
}

std::string describe(const PointParams& p) {
  std::ostringstream out;
  if (!std::isnan(p.g)) out << "g=" << format_double(p.g);
  else out << "G'=" << format_double(p.Gp);
  out << ", p=" << format_double(p.p) << ", s=" << format_double(p.s)
      << ", eta_s=" << format_double(p.eta_s) << ", eta_i=" << format_double(p.eta_i);
  if (!std::isnan(p.r)) out << ", r=" << format_double(p.r);
  if (p.F != 1.0) out << ", F=" << format_double(p.F);
  return out.str();
}

SweepRow evaluate_point(const SweepSpec& spec, const PointParams& params) {
  SweepRow row = [&] {
    switch (spec.regime) {
      case Regime::SingleMode: return evaluate_singlemode(spec, params);
      case Regime::Factorable: return evaluate_factorable(spec, params);
      case Regime::Broadband: return evaluate_broadband(spec, params);
      case Regime::Engine: return evaluate_engine(spec, params);
    }
    throw std::logic_error("unhandled regime");
  }();
  row.report = with_r(row.report, resolve_r(spec, params, row.report));
  if (spec.excess_rel_variance > 0.0)
    row.report = apply_excess_noise(
        row.report, ExcessNoise::from_relative_variance(spec.excess_rel_variance, spec.I0));
  return row;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned threads) {
  spec.validate();
  const auto points = lattice(spec);
  std::vector<SweepRow> rows(points.size());
  parallel_for(points.size(), threads, [&](std::size_t i) {
    try {
      rows[i] = evaluate_point(spec, points[i]);
    } catch (const InvalidArgument& e) {
      throw ConfigError("lattice point (" + describe(points[i]) + "): " + e.what());
    } catch (const NumericalError& e) {
      throw PointError("lattice point (" + describe(points[i]) + "): " + e.what());
    }
  });
  return rows;
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << csv_header() << '\n';
  for (const auto& row : rows) out << csv_row(row.point, row.report) << '\n';
}

std::string gnuplot_script(const SweepSpec& spec, const std::string& csv_name) {
  std::ostringstream gp;
  const std::string x = !spec.plot_x.empty() ? spec.plot_x
                        : spec.axes.empty() ? "G'"
                                            : csv_column(spec.axes[0].name);
  gp << "# " << (spec.title.empty() ? std::string(regime_name(spec.regime)) : spec.title) << '\n'
     << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set xlabel " << gp_quote(x) << '\n';
  if (x == "g") gp << "set logscale x\n";

  std::vector<std::string> series;
  for (const auto& y : spec.plot_y) {
    if (spec.axes.size() < 2) {
      series.push_back(gp_quote(csv_name) + " using (column(" + gp_quote(x) + ")):(column(" +
                       gp_quote(y) + ")) with lines title " + gp_quote(y));
      continue;
    }
    const Axis& outer = spec.axes[1];
    for (const auto& v : outer.values) {
      std::string cond, label;
      if (outer.name == "eta") {
        cond = "column(\"eta_s\")==" + format_double(v.a) + " && column(\"eta_i\")==" + format_double(v.b);
        label = "eta=" + format_double(v.a) + "/" + format_double(v.b);
      } else if (outer.name == "r" || outer.name == "F") {
        cond = "1";  // not a CSV column; series are consecutive blocks
        label = outer.name + "=" + format_double(v.a);
      } else {
        cond = "column(" + gp_quote(csv_column(outer.name)) + ")==" + format_double(v.a);
        label = outer.name + "=" + format_double(v.a);
      }
      series.push_back(gp_quote(csv_name) + " using (" + cond + " ? column(" + gp_quote(x) +
                       ") : NaN):(column(" + gp_quote(y) + ")) with lines title " +
                       gp_quote(y + " " + label));
    }
  }
  gp << "plot ";
  for (std::size_t i = 0; i < series.size(); ++i) gp << (i ? ", \\\n     " : "") << series[i];
  gp << '\n';
  return gp.str();
}

std::string metadata(const SweepSpec& spec) {
  std::ostringstream m;
  m << "version = " << version_string() << '\n'
    << "eigen = " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION << '\n'
    << "boost = " << BOOST_VERSION / 100000 << '.' << BOOST_VERSION / 100 % 1000 << '\n'
    << "regime = " << regime_name(spec.regime) << '\n';
  if (!spec.title.empty()) m << "title = " << spec.title << '\n';
  const PointParams& b = spec.base;
  if (std::isnan(b.g)) m << "Gp = " << format_double(b.Gp) << '\n';
  else m << "g = " << format_double(b.g) << '\n';
  m << "p = " << format_double(b.p) << '\n'
    << "s = " << format_double(b.s) << '\n'
    << "eta_s = " << format_double(b.eta_s) << '\n'
    << "eta_i = " << format_double(b.eta_i) << '\n'
    << "F = " << format_double(b.F) << '\n'
    << "F_phase = " << format_double(b.F_phase) << '\n'
    << "r = " << spec.r.str() << '\n'
    << "n_trunc = " << spec.n_trunc << '\n';
  if (spec.regime == Regime::Engine) {
    const auto& e = spec.engine;
    m << "engine.kernel = " << e.kernel << '\n'
      << "engine.points = " << e.points << '\n'
      << "engine.span = " << (e.span > 0.0 ? format_double(e.span) : "auto") << '\n'
      << "engine.n_trunc = " << e.n_trunc << '\n'
      << "engine.beta2 = " << format_double(e.beta2) << '\n'
      << "engine.beta3 = " << format_double(e.beta3) << '\n'
      << "engine.spm = " << format_double(e.spm) << '\n'
      << "engine.length = " << format_double(e.length) << '\n'
      << "engine.phi_width = " << format_double(e.phi_width) << '\n'
      << "engine.spontaneous = " << (e.spontaneous ? "true" : "false") << '\n';
  }
  m << "excess_rel_variance = " << format_double(spec.excess_rel_variance) << '\n'
    << "I0 = " << format_double(spec.I0) << '\n';
  for (const auto& a : spec.axes) {
    m << "sweep." << a.name << " = ";
    for (std::size_t i = 0; i < a.values.size(); ++i) {
      m << (i ? "," : "") << format_double(a.values[i].a);
      if (a.name == "eta") m << '/' << format_double(a.values[i].b);
    }
    m << '\n';
  }
  return m.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << text;
  if (!out) throw std::runtime_error(path + ": write failed");
}

void write_outputs(const SweepSpec& spec, const std::vector<SweepRow>& rows,
                   const std::string& path) {
  std::ostringstream csv;
  write_csv(csv, rows);
  write_text(path, csv.str());
  const auto slash = path.find_last_of('/');
  const std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  write_text(path + ".gp", gnuplot_script(spec, name));
  write_text(path + ".meta", metadata(spec));
}

std::string version_string() { return std::string("fopa ") + FOPA_VERSION; }

}  // namespace fopa::app
