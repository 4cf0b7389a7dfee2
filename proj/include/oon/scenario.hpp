// Copyright 2026 The oon-sim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oon/metrics.hpp"
#include "oon/workload.hpp"
#include "oon/world.hpp"

namespace oon {

// Schema: docs/scenario.md.

struct ClassDecl {
  ObjectClass cls;
  std::map<std::string, std::vector<Value>> cuts;
  std::size_t irn_count = 1;
};

struct LinkDecl {
  std::string a;
  std::string b;
  Tick latency = 1;
};

struct WorkloadDecl {
  std::string class_name;
  std::size_t objects = 0;
  std::size_t queries = 0;
  WorkloadOptions options;
  std::string domain;
};

enum class StepOp {
  Instantiate,
  Publish,
  Discover,
  Pull,
  Push,
  Interactive,
  Migrate,
  Update,
  Delete,
  Fault,
  Audit,
  WorkloadPublish,
  WorkloadQueries,
};

std::string_view to_string(StepOp op);

struct Step {
  std::string context;  // "script[3]", used in messages
  StepOp op = StepOp::Audit;
  std::string object;   // acting object id
  std::string target;   // object id, "$binding" or p-name text
  std::string domain;   // migrate destination
  PublishOrder order = PublishOrder::BottomUp;
  std::optional<Query> query;
  IrnId entry_irn = 0;
  std::string requester;        // object id acting as requester
  std::string requester_class;  // used when no requester object is named
  std::string bind;
  std::size_t count = 1;        // chunks or turns
  std::map<std::string, Value> attributes;
  std::optional<std::size_t> expect_matches;
  std::optional<bool> expect_completed;
  std::optional<std::size_t> expect_dangling;
  std::optional<Errc> expect_error;
};

struct Scenario {
  std::string name = "run";
  std::uint64_t seed = 1;
  WorldConfig config;
  std::vector<ClassDecl> classes;
  std::vector<std::string> domains;
  std::vector<LinkDecl> links;
  std::vector<ObjectSpec> objects;
  std::optional<WorkloadDecl> workload;
  std::vector<Step> script;
};

// Throws ParseError (position = 1-based line) for malformed JSON and
// ValidationError naming the offending field otherwise.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

// Cross-checks every reference by building the world without running it.
void validate_scenario(const Scenario& scenario);

struct RunResult {
  Metrics metrics;
  std::vector<std::string> trace;
  std::vector<std::string> failures;  // unmet expectations and unexpected errors
};

RunResult run_scenario(const Scenario& scenario, std::optional<std::uint64_t> seed_override = std::nullopt);

struct BenchOptions {
  std::size_t objects = 1000;
  std::size_t queries = 100;
  std::size_t irns = 4;
  std::size_t dims = 2;
  std::uint64_t seed = 1;
  QueryMix mix;
};

// Publishes a generated workload into one information domain and runs its
// queries, checking each against the oracle.
RunResult run_bench(const BenchOptions& options);

// Segments per dimension for a bench grid: the smallest uniform g with
// g^dims >= irns.
std::vector<std::size_t> bench_grid(std::size_t irns, std::size_t dims);

}  // namespace oon
