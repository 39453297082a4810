#pragma once

#include <string>
#include <vector>

#include "fopa/app/sweep.hpp"

namespace fopa::app {

const std::vector<std::string>& figure_ids();
bool is_figure(const std::string& id);

// Frozen sweep for the figures that fit the standard CSV schema
// (all except fig3 and fig7*).
SweepSpec figure_spec(const std::string& id);

// Writes <dir>/<id>.csv plus .gp and .meta sidecars; returns the CSV path.
std::string run_figure(const std::string& id, const std::string& dir, unsigned threads);

}  // namespace fopa::app
