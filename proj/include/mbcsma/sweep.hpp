#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mbcsma/metrics.hpp"
#include "mbcsma/scenario.hpp"
#include "mbcsma/simulation.hpp"

namespace mbcsma {

/// Cartesian grid of runs: stations x bands x seeds, all sharing one
/// protocol configuration.
struct SweepSpec {
  ScenarioKind kind = ScenarioKind::SaturatedCell;
  std::vector<std::uint32_t> stations = {10, 50, 100};
  std::vector<std::uint32_t> bands = {1, 2, 3, 4, 5};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::vector<std::uint32_t> spans;
  std::uint32_t cw_min = 16;
  std::uint32_t cw_max = 1024;
  PhyParams phy;
  TrafficMode traffic = TrafficMode::Saturation;
  bool nav_enabled = true;
  bool fully_connected = false;
  std::uint64_t warmup_exchanges = 1000;
  std::uint64_t target_exchanges = 100000;
  std::optional<double> time_limit_seconds;

  /// Fixed topologies have a built-in station count; only the saturated cell
  /// sweeps the stations axis.
  std::vector<std::uint32_t> effective_stations() const {
    if (kind == ScenarioKind::SaturatedCell) return stations;
    return {2};
  }

  ScenarioConfig cell_config(std::uint32_t n_stations, std::uint32_t n_bands,
                             std::uint64_t seed) const {
    ScenarioConfig config;
    config.kind = kind;
    config.n_stations = n_stations;
    config.n_bands = n_bands;
    config.spans = spans;
    config.phy = phy;
    config.cw_min = cw_min;
    config.cw_max = cw_max;
    config.traffic = traffic;
    config.nav_enabled = nav_enabled;
    config.fully_connected = fully_connected;
    config.seed = seed;
    config.warmup_exchanges = warmup_exchanges;
    config.target_exchanges = target_exchanges;
    config.time_limit_seconds = time_limit_seconds;
    return config;
  }
};

/// One output row.  Aggregate rows (per stations x bands cell, averaged over
/// seeds) carry no seed.  Delay quantiles are absent when a run produced no
/// measured exchanges.
struct ResultRow {
  std::uint32_t n_stations = 0;
  std::uint32_t n_bands = 0;
  std::optional<std::uint64_t> seed;
  double collision_prob = 0.0;
  double throughput_bps = 0.0;
  std::optional<double> delay_p50;
  std::optional<double> delay_p90;
  std::optional<double> delay_p95;
  std::optional<double> delay_p98;
  std::optional<double> delay_p99;
};

inline ResultRow result_row_from_metrics(std::uint32_t n_stations,
                                         std::uint32_t n_bands,
                                         std::uint64_t seed,
                                         const RunMetrics& m) {
  ResultRow row;
  row.n_stations = n_stations;
  row.n_bands = n_bands;
  row.seed = seed;
  row.collision_prob = collision_probability(m.rts_attempts, m.rts_collisions);
  row.throughput_bps =
      saturation_throughput_bps(m.acked_payload_bits, m.sim_duration);
  if (!m.delays.empty()) {
    DelayCdf cdf(m.delays);
    row.delay_p50 = cdf.quantile_seconds(0.50);
    row.delay_p90 = cdf.quantile_seconds(0.90);
    row.delay_p95 = cdf.quantile_seconds(0.95);
    row.delay_p98 = cdf.quantile_seconds(0.98);
    row.delay_p99 = cdf.quantile_seconds(0.99);
  }
  return row;
}

/// Mean over a contiguous block of per-seed rows (all one cell).
inline ResultRow aggregate_rows(const std::vector<ResultRow>& rows,
                                std::size_t first, std::size_t last) {
  ResultRow agg;
  agg.n_stations = rows[first].n_stations;
  agg.n_bands = rows[first].n_bands;
  const double count = static_cast<double>(last - first);
  double p50 = 0, p90 = 0, p95 = 0, p98 = 0, p99 = 0;
  std::size_t with_delays = 0;
  for (std::size_t i = first; i < last; ++i) {
    agg.collision_prob += rows[i].collision_prob / count;
    agg.throughput_bps += rows[i].throughput_bps / count;
    if (rows[i].delay_p50) {
      ++with_delays;
      p50 += *rows[i].delay_p50;
      p90 += *rows[i].delay_p90;
      p95 += *rows[i].delay_p95;
      p98 += *rows[i].delay_p98;
      p99 += *rows[i].delay_p99;
    }
  }
  if (with_delays > 0) {
    const double d = static_cast<double>(with_delays);
    agg.delay_p50 = p50 / d;
    agg.delay_p90 = p90 / d;
    agg.delay_p95 = p95 / d;
    agg.delay_p98 = p98 / d;
    agg.delay_p99 = p99 / d;
  }
  return agg;
}

/// Runs the grid in (stations, bands, seed) order, then appends one mean row
/// per (stations, bands) cell.  The optional callback fires after each run,
/// for progress reporting.
inline std::vector<ResultRow> run_sweep(
    const SweepSpec& spec,
    const std::function<void(const ResultRow&)>& on_row = nullptr) {
  std::vector<ResultRow> rows;
  std::vector<ResultRow> aggregates;
  for (std::uint32_t n : spec.effective_stations()) {
    for (std::uint32_t b : spec.bands) {
      const std::size_t first = rows.size();
      for (std::uint64_t seed : spec.seeds) {
        Simulation sim(spec.cell_config(n, b, seed));
        const RunMetrics& m = sim.run();
        rows.push_back(result_row_from_metrics(n, b, seed, m));
        if (on_row) on_row(rows.back());
      }
      aggregates.push_back(aggregate_rows(rows, first, rows.size()));
    }
  }
  rows.insert(rows.end(), aggregates.begin(), aggregates.end());
  return rows;
}

/// Six significant digits, the precision every emitter uses.
inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out =
      "n_stations,n_bands,seed,collision_prob,throughput_bps,"
      "delay_p50,p90,p95,p98,p99\n";
  auto cell = [](const std::optional<double>& v) {
    return v ? format_number(*v) : std::string{};
  };
  for (const ResultRow& r : rows) {
    out += std::to_string(r.n_stations);
    out += ',';
    out += std::to_string(r.n_bands);
    out += ',';
    if (r.seed) out += std::to_string(*r.seed);
    out += ',';
    out += format_number(r.collision_prob);
    out += ',';
    out += format_number(r.throughput_bps);
    out += ',';
    out += cell(r.delay_p50);
    out += ',';
    out += cell(r.delay_p90);
    out += ',';
    out += cell(r.delay_p95);
    out += ',';
    out += cell(r.delay_p98);
    out += ',';
    out += cell(r.delay_p99);
    out += '\n';
  }
  return out;
}

inline std::string to_json(const std::vector<ResultRow>& rows) {
  std::string out = "[\n";
  auto field = [](const std::optional<double>& v) {
    return v && std::isfinite(*v) ? format_number(*v) : std::string("null");
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ResultRow& r = rows[i];
    out += "  {\"n_stations\": " + std::to_string(r.n_stations);
    out += ", \"n_bands\": " + std::to_string(r.n_bands);
    out += ", \"seed\": " + (r.seed ? std::to_string(*r.seed) : "null");
    out += ", \"collision_prob\": " + format_number(r.collision_prob);
    out += ", \"throughput_bps\": " + format_number(r.throughput_bps);
    out += ", \"delay_p50\": " + field(r.delay_p50);
    out += ", \"delay_p90\": " + field(r.delay_p90);
    out += ", \"delay_p95\": " + field(r.delay_p95);
    out += ", \"delay_p98\": " + field(r.delay_p98);
    out += ", \"delay_p99\": " + field(r.delay_p99);
    out += i + 1 < rows.size() ? "},\n" : "}\n";
  }
  out += "]\n";
  return out;
}

}  // namespace mbcsma
