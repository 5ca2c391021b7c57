#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "newsnet/csv.hpp"
#include "newsnet/errors.hpp"
#include "newsnet/text.hpp"

namespace newsnet {

// Pipeline configuration: input locations plus the analysis parameters. The
// parameters are hashed and echoed into every output file so intermediates
// from a different configuration are refused.
struct RunConfig {
  // paths
  std::string corpus_path;
  std::string universe_path;
  std::string market_path;
  std::string index_path;
  std::string out_dir = "out";

  // analysis parameters
  int lookback_event = 180;   // trading days behind the rolling event baseline
  double z = 2.0;             // event threshold in standard deviations
  int min_event_obs = 30;     // observations required in the rolling window
  int k_neighbours = 10;
  int network_window = 60;    // trading days per dynamic network
  int car_window = 7;         // profile half-width and trailing CAR window
  double resolution = 1.0;    // community detection timescale
  int kde_min_events = 20;
  int min_mentions = 4;       // per-quarter frequency floor
  int capm_window = 180;
  int capm_min_obs = 120;
  double nonneutral_eps = 1e-12;
  int mwu_exact_threshold = 400;
  std::string coverage_mode = "mentions";  // or "indicator"
  std::string group_period = "first-year"; // network used for group detection, or "all"

  static RunConfig from_file(const std::string& path);
  void apply(const std::string& key, const std::string& value);

  // Deterministic "key=value ..." echo of the analysis parameters (paths
  // excluded: provenance concerns what was computed, not where it lived).
  std::string param_echo() const {
    std::map<std::string, std::string> kv;
    kv["lookback_event"] = std::to_string(lookback_event);
    kv["z"] = fmt_sig(z, 17);
    kv["min_event_obs"] = std::to_string(min_event_obs);
    kv["k_neighbours"] = std::to_string(k_neighbours);
    kv["network_window"] = std::to_string(network_window);
    kv["car_window"] = std::to_string(car_window);
    kv["resolution"] = fmt_sig(resolution, 17);
    kv["kde_min_events"] = std::to_string(kde_min_events);
    kv["min_mentions"] = std::to_string(min_mentions);
    kv["capm_window"] = std::to_string(capm_window);
    kv["capm_min_obs"] = std::to_string(capm_min_obs);
    kv["nonneutral_eps"] = fmt_sig(nonneutral_eps, 17);
    kv["mwu_exact_threshold"] = std::to_string(mwu_exact_threshold);
    kv["coverage_mode"] = coverage_mode;
    kv["group_period"] = group_period;
    std::string out;
    for (const auto& [k, v] : kv) {
      if (!out.empty()) out += ' ';
      out += k + "=" + v;
    }
    return out;
  }

  // FNV-1a over the parameter echo.
  std::string config_hash() const {
    const std::string echo = param_echo();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : echo) {
      h ^= c;
      h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }
};

inline void RunConfig::apply(const std::string& key, const std::string& value) {
  auto as_int = [&](int& slot) {
    try {
      slot = std::stoi(value);
    } catch (...) {
      throw ConfigError("config: " + key + " expects an integer, got '" + value + "'");
    }
  };
  auto as_double = [&](double& slot) {
    try {
      slot = std::stod(value);
    } catch (...) {
      throw ConfigError("config: " + key + " expects a number, got '" + value + "'");
    }
  };

  if (key == "corpus") corpus_path = value;
  else if (key == "universe") universe_path = value;
  else if (key == "market") market_path = value;
  else if (key == "index") index_path = value;
  else if (key == "out") out_dir = value;
  else if (key == "lookback_event") as_int(lookback_event);
  else if (key == "z") as_double(z);
  else if (key == "min_event_obs") as_int(min_event_obs);
  else if (key == "k_neighbours") as_int(k_neighbours);
  else if (key == "network_window") as_int(network_window);
  else if (key == "car_window") as_int(car_window);
  else if (key == "resolution") as_double(resolution);
  else if (key == "kde_min_events") as_int(kde_min_events);
  else if (key == "min_mentions") as_int(min_mentions);
  else if (key == "capm_window") as_int(capm_window);
  else if (key == "capm_min_obs") as_int(capm_min_obs);
  else if (key == "nonneutral_eps") as_double(nonneutral_eps);
  else if (key == "mwu_exact_threshold") as_int(mwu_exact_threshold);
  else if (key == "coverage_mode") {
    if (value != "mentions" && value != "indicator")
      throw ConfigError("config: coverage_mode must be 'mentions' or 'indicator'");
    coverage_mode = value;
  } else if (key == "group_period") {
    if (value != "first-year" && value != "all")
      throw ConfigError("config: group_period must be 'first-year' or 'all'");
    group_period = value;
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

// Flat key=value file; '#' starts a comment, blank lines ignored.
inline RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError(path);
  RunConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    cfg.apply(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return cfg;
}

inline void validate(const RunConfig& cfg) {
  if (cfg.lookback_event <= 0 || cfg.network_window <= 0 || cfg.car_window <= 0 ||
      cfg.capm_window <= 0)
    throw ConfigError("config: all windows must be positive");
  if (cfg.z <= 0.0) throw ConfigError("config: z must be positive");
  if (cfg.k_neighbours <= 0) throw ConfigError("config: k_neighbours must be positive");
}

}  // namespace newsnet
