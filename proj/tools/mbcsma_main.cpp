// Command-line front end: runs a sweep of simulations and emits one results
// table (CSV or JSON).  Settings come from built-in defaults, then an optional
// config file (--config or the MBCSMA_CONFIG environment variable), then
// command-line flags, later sources overriding earlier ones.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mbcsma/config.hpp"
#include "mbcsma/simulation.hpp"
#include "mbcsma/sweep.hpp"

namespace {

struct RawFlags {
  std::optional<std::string> scenario, stations, bands, seeds, spans;
  std::optional<std::string> cw_min, cw_max, duration_exchanges, warmup;
  std::optional<std::string> output, format, trace, nav, fully_connected;
  std::optional<std::string> traffic, time_limit;
};

void add_flag(CLI::App& app, const std::string& name,
              std::optional<std::string>& slot, const std::string& help) {
  app.add_option_function<std::string>(
         name, [&slot](const std::string& v) { slot = v; }, help)
      ->type_name("TEXT");
}

void apply_if_set(mbcsma::ToolOptions& opt, const char* key,
                  const std::optional<std::string>& slot) {
  if (slot) mbcsma::apply_option(opt, key, *slot);
}

std::string trace_path(const std::string& prefix, const mbcsma::ResultRow& row) {
  std::string path = prefix + "-s" + std::to_string(row.n_stations) + "-b" +
                     std::to_string(row.n_bands);
  if (row.seed) path += "-seed" + std::to_string(*row.seed);
  return path + ".trace";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Discrete-event simulator for a multiband CSMA/CA RTS/CTS MAC.\n"
      "Runs a stations x bands x seeds sweep and prints one row per run,\n"
      "plus one seed-averaged row per cell."};

  RawFlags raw;
  std::string config_path;
  app.add_option("--config", config_path,
                 "Config file with key = value lines (also via MBCSMA_CONFIG)");
  add_flag(app, "--scenario", raw.scenario,
           "saturated|hidden|exposed|pathologic (default saturated)");
  add_flag(app, "--stations", raw.stations,
           "Station counts, e.g. 10,50,100 (saturated cell only)");
  add_flag(app, "--bands", raw.bands, "Band counts, e.g. 1,2,3,4,5");
  add_flag(app, "--seeds", raw.seeds, "Seeds; ranges allowed, e.g. 1..5,9");
  add_flag(app, "--spans", raw.spans,
           "RTS band span: one value for all stations, or one per station");
  add_flag(app, "--cw-min", raw.cw_min, "Minimum contention window (16)");
  add_flag(app, "--cw-max", raw.cw_max, "Maximum contention window (1024)");
  add_flag(app, "--duration-exchanges", raw.duration_exchanges,
           "Measured exchanges per run, after warmup (100000)");
  add_flag(app, "--warmup", raw.warmup,
           "Exchanges discarded before measuring (1000)");
  add_flag(app, "--time-limit", raw.time_limit,
           "Simulated-seconds cap per run (unset: none)");
  add_flag(app, "--traffic", raw.traffic, "saturation|single (saturation)");
  add_flag(app, "--nav", raw.nav, "Virtual carrier sense on|off (on)");
  add_flag(app, "--fully-connected", raw.fully_connected,
           "Pathologic scenario on a complete graph (off)");
  add_flag(app, "--output", raw.output, "Results file (default: stdout)");
  add_flag(app, "--format", raw.format, "csv|json (csv)");
  add_flag(app, "--trace", raw.trace,
           "Write per-run event traces to PREFIX-s<n>-b<n>-seed<n>.trace");

  CLI11_PARSE(app, argc, argv);

  mbcsma::ToolOptions opt;
  try {
    if (config_path.empty()) {
      if (const char* env = std::getenv("MBCSMA_CONFIG")) config_path = env;
    }
    if (!config_path.empty()) mbcsma::load_config_file(opt, config_path);

    apply_if_set(opt, "scenario", raw.scenario);
    apply_if_set(opt, "stations", raw.stations);
    apply_if_set(opt, "bands", raw.bands);
    apply_if_set(opt, "seeds", raw.seeds);
    apply_if_set(opt, "spans", raw.spans);
    apply_if_set(opt, "cw_min", raw.cw_min);
    apply_if_set(opt, "cw_max", raw.cw_max);
    apply_if_set(opt, "duration_exchanges", raw.duration_exchanges);
    apply_if_set(opt, "warmup", raw.warmup);
    apply_if_set(opt, "time_limit_seconds", raw.time_limit);
    apply_if_set(opt, "traffic", raw.traffic);
    apply_if_set(opt, "nav", raw.nav);
    apply_if_set(opt, "fully_connected", raw.fully_connected);
    apply_if_set(opt, "output", raw.output);
    apply_if_set(opt, "format", raw.format);
    apply_if_set(opt, "trace", raw.trace);

    // Validate every cell up front so a bad grid fails before hours of runs.
    for (std::uint32_t n : opt.sweep.effective_stations()) {
      for (std::uint32_t b : opt.sweep.bands) {
        for (std::uint64_t seed : opt.sweep.seeds) {
          opt.sweep.cell_config(n, b, seed).validate();
        }
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "mbcsma: " << e.what() << '\n';
    return 1;
  }

  try {
    std::vector<mbcsma::ResultRow> rows;
    if (opt.trace_prefix.empty()) {
      rows = mbcsma::run_sweep(opt.sweep, [](const mbcsma::ResultRow& row) {
        std::fprintf(stderr, "done: stations=%u bands=%u seed=%llu\n",
                     row.n_stations, row.n_bands,
                     static_cast<unsigned long long>(row.seed.value_or(0)));
      });
    } else {
      // Traced variant: run cells one by one so each trace can be written out.
      std::vector<mbcsma::ResultRow> aggregates;
      for (std::uint32_t n : opt.sweep.effective_stations()) {
        for (std::uint32_t b : opt.sweep.bands) {
          const std::size_t first = rows.size();
          for (std::uint64_t seed : opt.sweep.seeds) {
            mbcsma::Simulation sim(opt.sweep.cell_config(n, b, seed));
            sim.enable_trace();
            const mbcsma::RunMetrics& m = sim.run();
            rows.push_back(mbcsma::result_row_from_metrics(n, b, seed, m));
            const std::string path = trace_path(opt.trace_prefix, rows.back());
            std::ofstream trace_out(path);
            if (!trace_out) {
              throw std::runtime_error("cannot write trace file '" + path + "'");
            }
            trace_out << sim.engine().trace().serialize();
            std::fprintf(stderr, "done: stations=%u bands=%u seed=%llu (%s)\n",
                         n, b, static_cast<unsigned long long>(seed),
                         path.c_str());
          }
          aggregates.push_back(
              mbcsma::aggregate_rows(rows, first, rows.size()));
        }
      }
      rows.insert(rows.end(), aggregates.begin(), aggregates.end());
    }

    const std::string table =
        opt.format == "json" ? mbcsma::to_json(rows) : mbcsma::to_csv(rows);
    if (opt.output.empty()) {
      std::cout << table;
    } else {
      std::ofstream out(opt.output);
      if (!out) {
        throw std::runtime_error("cannot write output file '" + opt.output +
                                 "'");
      }
      out << table;
    }
  } catch (const std::exception& e) {
    std::cerr << "mbcsma: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
