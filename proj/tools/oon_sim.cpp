// Copyright 2026 The oon-sim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "oon/scenario.hpp"

namespace {

bool write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  for (const auto& l : lines) out << l << '\n';
  return static_cast<bool>(out);
}

bool write_metrics(const std::string& path, const oon::Metrics& m) {
  std::ofstream out(path, std::ios::binary);
  out << oon::metrics_csv_header() << '\n' << oon::metrics_csv_row(m) << '\n';
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Object-oriented networking simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::string trace_path;
  std::string metrics_path;
  auto* run = app.add_subcommand("run", "Run a scenario file");
  run->add_option("scenario", scenario_path, "Scenario JSON")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--trace", trace_path, "Write the event trace here");
  run->add_option("--metrics", metrics_path, "Write the metrics CSV here (default: stdout)");

  auto* validate = app.add_subcommand("validate", "Parse and cross-check a scenario file");
  validate->add_option("scenario", scenario_path, "Scenario JSON")->required();

  oon::BenchOptions bench_opts;
  auto* bench = app.add_subcommand("bench", "Publish a generated workload and query it");
  bench->add_option("--objects", bench_opts.objects, "Objects to publish")->capture_default_str();
  bench->add_option("--queries", bench_opts.queries, "Queries to run")->capture_default_str();
  bench->add_option("--irns", bench_opts.irns, "Information relay nodes")->capture_default_str();
  bench->add_option("--dims", bench_opts.dims, "Class-defining attributes")->capture_default_str();
  bench->add_option("--seed", bench_opts.seed, "Workload seed")->capture_default_str();
  bench->add_option("--metrics", metrics_path, "Write the metrics CSV here (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      auto sc = oon::load_scenario(scenario_path);
      std::cout << "ok: " << sc.name << " (" << sc.objects.size() << " objects, " << sc.script.size()
                << " steps)\n";
      return 0;
    }

    oon::RunResult result;
    if (*run) {
      result = oon::run_scenario(oon::load_scenario(scenario_path), seed);
      if (!trace_path.empty() && !write_lines(trace_path, result.trace)) {
        std::cerr << "error: cannot write " << trace_path << '\n';
        return 1;
      }
      std::cerr << "trace " << oon::format_hash(oon::trace_hash(result.trace)) << " (" << result.trace.size()
                << " lines)\n";
    } else {
      result = oon::run_bench(bench_opts);
    }

    if (metrics_path.empty()) {
      std::cout << oon::metrics_csv_header() << '\n' << oon::metrics_csv_row(result.metrics) << '\n';
    } else if (!write_metrics(metrics_path, result.metrics)) {
      std::cerr << "error: cannot write " << metrics_path << '\n';
      return 1;
    }
    for (const auto& f : result.failures) std::cerr << "FAIL " << f << '\n';
    return result.failures.empty() ? 0 : 3;
  } catch (const oon::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
