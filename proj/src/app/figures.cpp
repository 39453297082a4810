#include "fopa/app/figures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fopa/app/parallel.hpp"
#include "fopa/broadband.hpp"

namespace fopa::app {

namespace {

const std::string kEtaPairs = "1/1,0.85/0.85,0.75/0.75,0.75/0.85";

SweepSpec make(Regime regime, const std::string& title, std::vector<Axis> axes, RSetting r) {
  SweepSpec spec;
  spec.regime = regime;
  spec.title = title;
  spec.axes = std::move(axes);
  spec.r = r;
  return spec;
}

const RSetting kUnit{RPolicy::Fixed, 1.0};
const RSetting kOpt{RPolicy::Opt, 1.0};

// Spectra at σ_p = σ for a few gains, long format.
std::string fig3_csv() {
  const FrequencyGrid grid(0.0, 80.0, 1601);
  std::ostringstream csv;
  csv << "G',omega,S_in,S_s,S_i,S_s_norm,S_i_norm\n";
  for (double Gp : {1.0, 2.0, 3.0}) {
    const auto spectra = bb_spectra(Gp, 1.0, grid);
    const double ms = *std::max_element(spectra.S_s.begin(), spectra.S_s.end());
    const double mi = *std::max_element(spectra.S_i.begin(), spectra.S_i.end());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double x = grid.offset(j);
      const double s_in = std::exp(-x * x) / std::sqrt(std::numbers::pi);
      csv << format_double(Gp) << ',' << format_double(x) << ',' << format_double(s_in) << ','
          << format_double(spectra.S_s[j]) << ',' << format_double(spectra.S_i[j]) << ','
          << format_double(spectra.S_s[j] / ms) << ',' << format_double(spectra.S_i[j] / mi)
          << '\n';
    }
  }
  return csv.str();
}

std::string fig3_gp(const std::string& csv) {
  std::ostringstream gp;
  gp << "# normalized output spectra, sigma_p = sigma\n"
     << "set datafile separator ','\nset key autotitle columnhead\nset multiplot layout 1,2\n"
     << "set xrange [-8:8]\nset xlabel \"(omega - omega_0)/sigma\"\n";
  for (const char* col : {"S_s_norm", "S_i_norm"}) {
    gp << "plot \"" << csv << "\" using (column(\"G'\")==1 ? column(\"omega\") : NaN):(column(\""
       << col << "\")) with lines title \"G'=1\", \\\n"
       << "     \"" << csv << "\" using (column(\"G'\")==2 ? column(\"omega\") : NaN):(column(\""
       << col << "\")) with lines title \"G'=2\", \\\n"
       << "     \"" << csv << "\" using (column(\"G'\")==3 ? column(\"omega\") : NaN):(column(\""
       << col << "\")) with lines title \"G'=3\"";
    if (std::string(col) == "S_s_norm")
      gp << ", \\\n     \"" << csv
         << "\" using (column(\"G'\")==1 ? column(\"omega\") : NaN):(column(\"S_in\")*sqrt(pi)) with lines dt 2 title \"input\"";
    gp << '\n';
  }
  gp << "unset multiplot\n";
  return gp.str();
}

// Contour data at G' = 3, η = 1, r = 1 on a 61 × 61 (p, s) lattice.
std::string fig7_csv(char panel, unsigned threads) {
  constexpr int kN = 61;
  std::vector<double> values(kN * kN);
  parallel_for(values.size(), threads, [&](std::size_t idx) {
    const int ip = static_cast<int>(idx) / kN, is = static_cast<int>(idx) % kN;
    BroadbandParams prm;
    prm.Gp = 3.0;
    prm.p = 0.25 + 2.75 * ip / (kN - 1);
    prm.s = 10.0 * is / (kN - 1);
    const auto rep = bb_filtered_report(prm);
    const double snl = rep.I_s + rep.I_i;
    switch (panel) {
      case 'a': values[idx] = rep.R_t; break;
      case 'b': values[idx] = (rep.h.signal_total() + rep.h.idler_total()) / snl; break;
      default: values[idx] = 2.0 * rep.h.cross_total() / snl; break;
    }
  });
  std::ostringstream csv;
  csv << "p,s,value\n";
  for (int ip = 0; ip < kN; ++ip)
    for (int is = 0; is < kN; ++is)
      csv << format_double(0.25 + 2.75 * ip / (kN - 1)) << ',' << format_double(10.0 * is / (kN - 1))
          << ',' << format_double(values[ip * kN + is]) << '\n';
  return csv.str();
}

std::string fig7_gp(const std::string& csv, char panel) {
  std::ostringstream gp;
  gp << "# contour over (p, s) at G'=3, eta=1, r=1; panel " << panel << '\n'
     << "set datafile separator ','\nset xlabel \"p\"\nset ylabel \"s\"\n"
     << "set dgrid3d 61,61\nset view map\nset contour base\nunset surface\nset pm3d\n";
  if (panel == 'a') gp << "set cntrparam levels discrete 0.5,0.75,1,1.25\n";
  gp << "splot \"" << csv << "\" every ::1 using 1:2:3 with pm3d notitle\n";
  return gp.str();
}

std::string basename(const std::string& path) {
  const auto slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

}  // namespace

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids{"fig2a", "fig2b", "fig3",  "fig4",  "fig5a",
                                            "fig5b", "fig6",  "fig7a", "fig7b", "fig7c",
                                            "fig8a", "fig8b", "fig9a", "fig9b"};
  return ids;
}

bool is_figure(const std::string& id) {
  const auto& ids = figure_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

SweepSpec figure_spec(const std::string& id) {
  const Axis g_single = parse_axis("g", "log:1.1:100:60");
  const Axis eta_pairs = parse_axis("eta", kEtaPairs);
  const Axis p3 = parse_axis("p", "0.1,1,10");
  const Axis g_matched = parse_axis("g", "log:1.1:28:40");
  const Axis gp_axis = parse_axis("Gp", "0.1:4:40");

  if (id == "fig2a")
    return make(Regime::SingleMode, "single-mode R_t vs g, r=1", {g_single, eta_pairs}, kUnit);
  if (id == "fig2b")
    return make(Regime::SingleMode, "single-mode R_t vs g, r=r_opt", {g_single, eta_pairs}, kOpt);
  if (id == "fig4") {
    auto spec = make(Regime::Broadband, "gain, R_s, R_i and NF vs G', ideal detection",
                     {parse_axis("Gp", "0:4:41"), parse_axis("p", "0,0.1,1,10")}, kUnit);
    spec.plot_y = {"g", "R_s", "R_i", "NF"};
    return spec;
  }
  if (id == "fig5a") return make(Regime::Broadband, "R_t vs g, r=1", {g_matched, p3}, kUnit);
  if (id == "fig5b") return make(Regime::Broadband, "R_t vs g, r=r_opt", {g_matched, p3}, kOpt);
  if (id == "fig6") {
    auto spec = make(Regime::Broadband, "r_opt vs g", {gp_axis, p3}, kOpt);
    spec.plot_x = "g";
    spec.plot_y = {"r_opt"};
    return spec;
  }
  if (id == "fig8a" || id == "fig8b") {
    auto spec = make(Regime::Broadband,
                     std::string("R_t vs g for filter ratios s, p=") + (id == "fig8a" ? "0.1" : "1"),
                     {gp_axis, parse_axis("s", "0.1,1,10")}, kUnit);
    spec.base.p = id == "fig8a" ? 0.1 : 1.0;
    spec.plot_x = "g";
    return spec;
  }
  if (id == "fig9a" || id == "fig9b") {
    auto spec = make(Regime::Broadband,
                     std::string("R_t vs g for detection efficiencies, p=s=1, r=") +
                         (id == "fig9a" ? "1" : "r_opt"),
                     {parse_axis("g", "log:1.1:100:40"), eta_pairs}, id == "fig9a" ? kUnit : kOpt);
    spec.base.p = 1.0;
    spec.base.s = 1.0;
    return spec;
  }
  throw ConfigError("no standard sweep for figure `" + id + "`");
}

std::string run_figure(const std::string& id, const std::string& dir, unsigned threads) {
  if (!is_figure(id)) throw ConfigError("unknown figure `" + id + "`");
  const std::string path = (dir.empty() ? std::string(".") : dir) + "/" + id + ".csv";
  const std::string name = basename(path);
  if (id == "fig3") {
    write_text(path, fig3_csv());
    write_text(path + ".gp", fig3_gp(name));
    write_text(path + ".meta", "version = " + version_string() +
                                   "\nregime = broadband\np = 1\nGp = 1,2,3\nn_trunc = " +
                                   std::to_string(kSeriesDefaultTrunc) + "\ngrid = 0 80 1601\n");
    return path;
  }
  if (id.rfind("fig7", 0) == 0) {
    const char panel = id.back();
    write_text(path, fig7_csv(panel, threads));
    write_text(path + ".gp", fig7_gp(name, panel));
    write_text(path + ".meta", "version = " + version_string() +
                                   "\nregime = broadband\nGp = 3\neta_s = 1\neta_i = 1\nr = "
                                   "fixed:1\nn_trunc = " +
                                   std::to_string(kSeriesDefaultTrunc) +
                                   "\nsweep.p = 0.25:3:61\nsweep.s = 0:10:61\npanel = " + panel +
                                   "\n");
    return path;
  }
  const SweepSpec spec = figure_spec(id);
  write_outputs(spec, run_sweep(spec, threads), path);
  return path;
}

}  // namespace fopa::app
