#include <cctype>
#include <fstream>
#include <sstream>

#include "fopa/app/sweep.hpp"

namespace fopa::app {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) return false;
  return true;
}

}  // namespace

ConfigMap parse_config(std::istream& in, const std::string& source) {
  ConfigMap config;
  std::string line;
  for (int number = 1; std::getline(in, line); ++number) {
    const std::string where = source + ":" + std::to_string(number);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected `key = value`");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key)) throw ConfigError(where + ": invalid key `" + key + "`");
    if (value.empty()) throw ConfigError(where + ": empty value for `" + key + "`");
    if (const auto it = config.find(key); it != config.end())
      throw ConfigError(where + ": duplicate key `" + key + "` (first set at " +
                        it->second.origin + ")");
    config[key] = ConfigEntry{value, where};
  }
  return config;
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  return parse_config(in, path);
}

void apply_override(ConfigMap& config, const std::string& assignment, const std::string& origin) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError(origin + ": expected key=value, got `" + assignment + "`");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (!valid_key(key)) throw ConfigError(origin + ": invalid key `" + key + "`");
  if (value.empty()) throw ConfigError(origin + ": empty value for `" + key + "`");
  config[key] = ConfigEntry{value, origin};
}

}  // namespace fopa::app
