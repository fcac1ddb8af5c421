#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mbcsma/scenario.hpp"
#include "mbcsma/sweep.hpp"

namespace mbcsma {

/// Everything the command-line tool needs for one invocation.
struct ToolOptions {
  SweepSpec sweep;
  std::string output;        ///< result file; empty writes to stdout
  std::string format = "csv";
  std::string trace_prefix;  ///< per-run trace files; empty disables tracing
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

inline std::uint64_t parse_u64(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(what) + ": expected an integer, got '" +
                                s + "'");
  }
}

inline std::uint32_t parse_u32(const std::string& s, const char* what) {
  const std::uint64_t v = parse_u64(s, what);
  if (v > 0xffffffffull) {
    throw std::invalid_argument(std::string(what) + ": value out of range");
  }
  return static_cast<std::uint32_t>(v);
}

inline double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(what) + ": expected a number, got '" +
                                s + "'");
  }
}

inline bool parse_bool(const std::string& s, const char* what) {
  if (s == "1" || s == "true" || s == "on" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "off" || s == "no") return false;
  throw std::invalid_argument(std::string(what) + ": expected a boolean, got '" +
                              s + "'");
}

inline std::vector<std::uint32_t> parse_u32_list(const std::string& s,
                                                 const char* what) {
  std::vector<std::uint32_t> out;
  for (const std::string& tok : split(s, ',')) {
    if (tok.empty()) {
      throw std::invalid_argument(std::string(what) + ": empty list element");
    }
    out.push_back(parse_u32(tok, what));
  }
  if (out.empty()) {
    throw std::invalid_argument(std::string(what) + ": empty list");
  }
  return out;
}

/// Seed lists accept plain values and inclusive ranges: "1,5..8" is
/// {1, 5, 6, 7, 8}.
inline std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (const std::string& tok : split(s, ',')) {
    if (tok.empty()) throw std::invalid_argument("seeds: empty list element");
    const auto dots = tok.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_u64(tok, "seeds"));
      continue;
    }
    const std::uint64_t lo = parse_u64(trim(tok.substr(0, dots)), "seeds");
    const std::uint64_t hi = parse_u64(trim(tok.substr(dots + 2)), "seeds");
    if (lo > hi) throw std::invalid_argument("seeds: descending range " + tok);
    if (hi - lo >= 100000) {
      throw std::invalid_argument("seeds: range " + tok + " is too large");
    }
    for (std::uint64_t v = lo; v <= hi; ++v) out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("seeds: empty list");
  return out;
}

}  // namespace detail

/// Applies one key=value setting.  Throws on unknown keys and malformed
/// values; both the config file and the command line funnel through here.
inline void apply_option(ToolOptions& opt, const std::string& key,
                         const std::string& value) {
  using namespace detail;
  SweepSpec& sweep = opt.sweep;
  if (key == "scenario") {
    const auto kind = scenario_from_string(value);
    if (!kind) {
      throw std::invalid_argument(
          "scenario: expected saturated|hidden|exposed|pathologic, got '" +
          value + "'");
    }
    sweep.kind = *kind;
  } else if (key == "stations") {
    sweep.stations = parse_u32_list(value, "stations");
  } else if (key == "bands") {
    sweep.bands = parse_u32_list(value, "bands");
  } else if (key == "seeds") {
    sweep.seeds = parse_seed_list(value);
  } else if (key == "spans") {
    sweep.spans = parse_u32_list(value, "spans");
  } else if (key == "cw_min") {
    sweep.cw_min = parse_u32(value, "cw_min");
  } else if (key == "cw_max") {
    sweep.cw_max = parse_u32(value, "cw_max");
  } else if (key == "duration_exchanges") {
    sweep.target_exchanges = parse_u64(value, "duration_exchanges");
  } else if (key == "warmup") {
    sweep.warmup_exchanges = parse_u64(value, "warmup");
  } else if (key == "time_limit_seconds") {
    sweep.time_limit_seconds = parse_double(value, "time_limit_seconds");
  } else if (key == "traffic") {
    if (value == "saturation") {
      sweep.traffic = TrafficMode::Saturation;
    } else if (value == "single") {
      sweep.traffic = TrafficMode::SinglePacket;
    } else {
      throw std::invalid_argument("traffic: expected saturation|single, got '" +
                                  value + "'");
    }
  } else if (key == "nav") {
    sweep.nav_enabled = parse_bool(value, "nav");
  } else if (key == "fully_connected") {
    sweep.fully_connected = parse_bool(value, "fully_connected");
  } else if (key == "output") {
    opt.output = value;
  } else if (key == "format") {
    if (value != "csv" && value != "json") {
      throw std::invalid_argument("format: expected csv|json, got '" + value +
                                  "'");
    }
    opt.format = value;
  } else if (key == "trace") {
    opt.trace_prefix = value;
  } else if (key == "payload_bits") {
    sweep.phy.payload_bits = parse_double(value, key.c_str());
  } else if (key == "mac_header_bits") {
    sweep.phy.mac_header_bits = parse_double(value, key.c_str());
  } else if (key == "phy_header_bits") {
    sweep.phy.phy_header_bits = parse_double(value, key.c_str());
  } else if (key == "ack_bits") {
    sweep.phy.ack_bits = parse_double(value, key.c_str());
  } else if (key == "rts_bits") {
    sweep.phy.rts_bits = parse_double(value, key.c_str());
  } else if (key == "cts_bits") {
    sweep.phy.cts_bits = parse_double(value, key.c_str());
  } else if (key == "data_rate_bps") {
    sweep.phy.channel_bit_rate = parse_double(value, key.c_str());
  } else if (key == "prop_delay_seconds") {
    sweep.phy.propagation_delay = parse_double(value, key.c_str());
  } else if (key == "sifs_seconds") {
    sweep.phy.sifs = parse_double(value, key.c_str());
  } else if (key == "slot_seconds") {
    sweep.phy.slot_time = parse_double(value, key.c_str());
  } else if (key == "difs_seconds") {
    sweep.phy.difs = parse_double(value, key.c_str());
  } else {
    throw std::invalid_argument("unknown configuration key: '" + key + "'");
  }
}

/// Parses key = value lines.  '#' and ';' start comments; blank lines are
/// skipped.
inline void load_config_text(ToolOptions& opt, const std::string& text,
                             const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.resize(comment);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                  ": expected key = value");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) +
                                  ": missing key");
    }
    try {
      apply_option(opt, key, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(origin + ":" + std::to_string(line_no) + ": " +
                                  e.what());
    }
  }
}

inline void load_config_file(ToolOptions& opt, const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open config file '" + path + "'");
  }
  std::ostringstream text;
  text << in.rdbuf();
  load_config_text(opt, text.str(), path);
}

}  // namespace mbcsma
