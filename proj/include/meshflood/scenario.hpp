#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include "meshflood/fixtures.hpp"
#include "meshflood/sim_config.hpp"

namespace meshflood {

/// Scenario text: one `key = value` per line, `#` starts a comment. Keys are
/// those of SimConfig (see apply_setting), plus `fixture`.
inline SimConfig parse_scenario(std::istream& is) {
  SimConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    try {
      apply_setting(cfg, detail::trim(body.substr(0, eq)), detail::trim(body.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (cfg.fixture && !fixtures::is_fixture_name(*cfg.fixture)) {
    throw ConfigError("unknown fixture '" + *cfg.fixture + "'");
  }
  return cfg;
}

inline SimConfig parse_scenario(const std::string& text) {
  std::istringstream is(text);
  return parse_scenario(is);
}

/// A readable scenario file, or failing that a built-in fixture name such as
/// `fig3` or `grid:25`.
inline SimConfig load_scenario(const std::string& path_or_fixture) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(path_or_fixture, ec)) {
    std::ifstream f(path_or_fixture);
    if (!f) throw ConfigError("cannot read scenario " + path_or_fixture);
    return parse_scenario(f);
  }
  if (fixtures::is_fixture_name(path_or_fixture)) {
    SimConfig cfg;
    cfg.fixture = path_or_fixture;
    return cfg;
  }
  throw ConfigError("cannot read scenario " + path_or_fixture);
}

}  // namespace meshflood
