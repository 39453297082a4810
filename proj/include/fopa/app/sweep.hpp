#pragma once

#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "fopa/errors.hpp"
#include "fopa/metrics.hpp"

namespace fopa::app {

// Malformed or out-of-range configuration; the message names its origin
// ("run.cfg:12" or "--set").
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// A core-module failure at one lattice point; the message names the point.
class PointError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct ConfigEntry {
  std::string value;
  std::string origin;
};
using ConfigMap = std::map<std::string, ConfigEntry>;

// Flat `key = value` lines; `#` starts a comment.
ConfigMap parse_config(std::istream& in, const std::string& source);
ConfigMap parse_config_file(const std::string& path);
// `key=value` from the command line; replaces any file entry.
void apply_override(ConfigMap& config, const std::string& assignment, const std::string& origin);

enum class Regime { SingleMode, Factorable, Broadband, Engine };
const char* regime_name(Regime regime);

enum class RPolicy { Fixed, Opt, PhotonRatio };
struct RSetting {
  RPolicy policy = RPolicy::Fixed;
  double value = 1.0;
  std::string str() const;
};
RSetting parse_r(const std::string& text);

inline constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

// One parameter point. Gp is ignored when g is set (it is then solved for).
struct PointParams {
  double Gp = 1.0;
  double g = kUnset;
  double p = 0.0;
  double s = 0.0;
  double eta_s = 1.0;
  double eta_i = 1.0;
  double F = 1.0;        // factorable matching magnitude
  double F_phase = 0.0;  // rad
  double r = kUnset;     // per-point fixed r from an "r" axis
};

struct AxisValue {
  double a;
  double b;  // second efficiency on the paired "eta" axis
};
struct Axis {
  std::string name;  // Gp, g, p, s, eta_s, eta_i, eta, r, F
  std::vector<AxisValue> values;
};
Axis parse_axis(const std::string& name, const std::string& text);

struct EngineSettings {
  std::string kernel = "broadband";  // broadband | factorable | delta | general
  std::size_t points = 257;
  double span = 0.0;  // 0: 12·√(1 + 48p²), in units of σ
  int n_trunc = 12;
  double beta2 = 0.0, beta3 = 0.0;  // dispersion in units of σ
  double spm = 0.0;                 // 2γP_p
  double length = 1.0;
  double phi_width = 1.0;  // factorable marginal bandwidth
  bool spontaneous = false;
};

struct SweepSpec {
  Regime regime = Regime::Broadband;
  PointParams base;
  std::vector<Axis> axes;  // at most two; the first varies fastest
  RSetting r;
  int n_trunc = 20;
  EngineSettings engine;
  double excess_rel_variance = 0.0;
  double I0 = 1.0;
  std::string output;
  std::string title;
  std::vector<std::string> plot_y{"R_t"};
  std::string plot_x;  // CSV column for the x axis; empty = first swept axis

  void validate() const;
};

SweepSpec spec_from_config(const ConfigMap& config);

struct SweepRow {
  CsvPoint point;
  NoiseReport report;
};

std::vector<PointParams> lattice(const SweepSpec& spec);
std::string describe(const PointParams& p);
SweepRow evaluate_point(const SweepSpec& spec, const PointParams& params);
std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned threads);

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::string gnuplot_script(const SweepSpec& spec, const std::string& csv_name);
std::string metadata(const SweepSpec& spec);

// Writes <path>, <path>.gp and <path>.meta.
void write_outputs(const SweepSpec& spec, const std::vector<SweepRow>& rows,
                   const std::string& path);

// Text written to a file next to the dataset; throws std::runtime_error on I/O failure.
void write_text(const std::string& path, const std::string& text);

std::string version_string();

}  // namespace fopa::app
