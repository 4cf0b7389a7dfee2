// Copyright 2026 The oon-sim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "oon/metrics.hpp"

#include <cstdio>

namespace oon {

std::string_view metrics_csv_header() {
  return "run_id,messages_sent,delivered,dropped,mean_hops,fib_inter_size,fib_intra_size,"
         "xfind_messages,results_messages,routing_updates,requests_completed,requests_timed_out,"
         "max_xfind_hops,mean_query_latency,irn_store_max,audit_checkpoints,dangling_pointers";
}

namespace {

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

std::string metrics_csv_row(const Metrics& m) {
  std::string out = m.run_id;
  auto add = [&out](const std::string& field) {
    out += ',';
    out += field;
  };
  add(std::to_string(m.data_sent));
  add(std::to_string(m.data_delivered));
  add(std::to_string(m.data_dropped));
  add(fixed4(m.mean_hops()));
  add(std::to_string(m.fib_inter_size));
  add(std::to_string(m.fib_intra_size));
  add(std::to_string(m.xfind_messages));
  add(std::to_string(m.results_messages));
  add(std::to_string(m.routing_updates));
  add(std::to_string(m.requests_completed));
  add(std::to_string(m.requests_timed_out));
  add(std::to_string(m.max_xfind_hops));
  add(fixed4(m.mean_query_latency()));
  add(std::to_string(m.irn_store_max));
  add(std::to_string(m.audit_checkpoints));
  add(std::to_string(m.dangling_pointers));
  return out;
}

std::uint64_t trace_hash(const std::vector<std::string>& lines) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const auto& line : lines) {
    for (unsigned char c : line) mix(c);
    mix('\n');
  }
  return h;
}

std::string format_hash(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace oon
