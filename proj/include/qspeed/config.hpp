#pragma once

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "qspeed/sweep.hpp"

namespace qspeed {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A SweepConfig assembled from a config file, together with the set of
// "section.key" names the file actually provided, so the CLI can let flags
// and budget presets fill in only what the file left unsaid.
struct ConfigOverlay {
  SweepConfig cfg;
  std::set<std::string> present;

  bool has(const std::string& dotted_key) const {
    return present.count(dotted_key) > 0;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0') {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return x;
}

inline long long to_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0') {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  return x;
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

}  // namespace detail

// Plain-text `key = value` config with [device], [sweep] and [optimizer]
// sections; `#` and `;` start comments. Unknown sections or keys are errors
// rather than silently ignored.
inline ConfigOverlay parse_config(std::istream& in) {
  ConfigOverlay overlay;
  SweepConfig& cfg = overlay.cfg;
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
      }
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section != "device" && section != "sweep" && section != "optimizer") {
        throw ConfigError("unknown config section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (section.empty()) {
      throw ConfigError("key '" + key + "' appears before any section header");
    }
    const std::string dotted = section + "." + key;

    if (section == "device") {
      if (key == "g") cfg.device.g = detail::to_double(dotted, value);
      else if (key == "omega1") cfg.device.omega[0] = detail::to_double(dotted, value);
      else if (key == "omega2") cfg.device.omega[1] = detail::to_double(dotted, value);
      else if (key == "alpha1") cfg.device.alpha[0] = detail::to_double(dotted, value);
      else if (key == "alpha2") cfg.device.alpha[1] = detail::to_double(dotted, value);
      else if (key == "alpha") {
        cfg.device.alpha[0] = cfg.device.alpha[1] = detail::to_double(dotted, value);
      } else if (key == "d_site") cfg.device.d_site = int(detail::to_int(dotted, value));
      else throw ConfigError("unknown device key '" + key + "'");
    } else if (section == "sweep") {
      if (key == "gate") cfg.gate = value;
      else if (key == "optimizer") {
        if (value == "quopt") cfg.optimizer = OptimizerKind::quopt;
        else if (value == "grape") cfg.optimizer = OptimizerKind::grape;
        else throw ConfigError("sweep.optimizer: expected quopt or grape, got '" + value + "'");
      } else if (key == "ort") cfg.ort = detail::to_bool(dotted, value);
      else if (key == "grid_start") cfg.grid_start = detail::to_double(dotted, value);
      else if (key == "grid_stop") cfg.grid_stop = detail::to_double(dotted, value);
      else if (key == "grid_step") cfg.grid_step = detail::to_double(dotted, value);
      else if (key == "output") cfg.output = value;
      else throw ConfigError("unknown sweep key '" + key + "'");
    } else {  // optimizer
      if (key == "iterations") cfg.opt.iterations = int(detail::to_int(dotted, value));
      else if (key == "seeds") cfg.opt.seeds = int(detail::to_int(dotted, value));
      else if (key == "learning_rate") cfg.opt.learning_rate = detail::to_double(dotted, value);
      else if (key == "momentum") cfg.opt.momentum = detail::to_double(dotted, value);
      else if (key == "cap") cfg.opt.cap = detail::to_double(dotted, value);
      else if (key == "rng_seed_base") {
        cfg.opt.rng_seed_base = std::uint64_t(detail::to_int(dotted, value));
      } else if (key == "segments") cfg.opt.segments = int(detail::to_int(dotted, value));
      else if (key == "grape_steps") cfg.opt.grape_steps = int(detail::to_int(dotted, value));
      else throw ConfigError("unknown optimizer key '" + key + "'");
    }
    overlay.present.insert(dotted);
  }
  return overlay;
}

inline ConfigOverlay parse_config(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline ConfigOverlay load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in);
}

}  // namespace qspeed
