// Copyright 2026 The oon-sim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "oon/data_layer.hpp"

namespace oon {

struct Metrics {
  std::string run_id = "run";

  // Data layer. Conservation: data_sent == data_delivered + data_dropped.
  std::uint64_t data_sent = 0;
  std::uint64_t data_delivered = 0;
  std::uint64_t data_dropped = 0;
  std::uint64_t data_hops_total = 0;
  std::uint64_t data_loops = 0;
  std::map<DropCause, std::uint64_t> drops_by_cause;
  std::size_t fib_inter_size = 0;  // largest inter table over all routers
  std::size_t fib_intra_size = 0;  // intra entries summed over all routers

  // Information layer.
  std::uint64_t xfind_messages = 0;   // inter-IRN XFind transmissions
  std::uint64_t xfind_deliveries = 0;
  std::uint64_t results_messages = 0; // Results produced by responders
  std::uint64_t results_hops = 0;
  std::uint64_t routing_updates = 0;  // inter-IRN routing exchanges; no such message exists
  std::uint64_t requests_issued = 0;
  std::uint64_t requests_completed = 0;
  std::uint64_t requests_timed_out = 0;
  std::size_t max_xfind_hops = 0;
  std::uint64_t hop_bound_violations = 0;
  std::uint64_t greedy_violations = 0;
  std::uint64_t reverse_route_violations = 0;
  std::uint64_t query_latency_total = 0;
  std::uint64_t queries_completed = 0;
  std::size_t irn_store_max = 0;

  // Consistency audits.
  std::uint64_t audit_checkpoints = 0;
  std::uint64_t dangling_pointers = 0;  // largest count seen at any checkpoint

  double mean_hops() const {
    return data_delivered == 0 ? 0.0 : static_cast<double>(data_hops_total) / static_cast<double>(data_delivered);
  }
  double mean_query_latency() const {
    return queries_completed == 0 ? 0.0
                                  : static_cast<double>(query_latency_total) / static_cast<double>(queries_completed);
  }
};

// Fixed header row of the metrics CSV (see docs/metrics.md).
std::string_view metrics_csv_header();
std::string metrics_csv_row(const Metrics& m);

// FNV-1a 64-bit over the trace lines joined with '\n'.
std::uint64_t trace_hash(const std::vector<std::string>& lines);
std::string format_hash(std::uint64_t hash);

}  // namespace oon
