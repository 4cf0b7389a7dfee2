// Copyright 2026 The oon-sim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "oon/information_layer.hpp"
#include "oon/object_model.hpp"

namespace oon {

// All randomness comes from std::mt19937_64, whose output sequence is fixed
// by the standard. Bounded draws use our own mapping below rather than the
// implementation-defined std distributions, so runs reproduce everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }
  bool chance(double p) { return static_cast<double>(engine_() >> 11) * 0x1.0p-53 < p; }

 private:
  std::mt19937_64 engine_;
};

// Relative weights of predicate kinds in generated queries.
struct QueryMix {
  double eq = 1;
  double prefix = 1;
  double range = 1;
  double any = 1;
};

// Value space of generated attributes: text is 1..3 letters of a..z,
// integers are below this bound.
inline constexpr std::uint64_t kWorkloadIntegerSpace = 1000;

struct WorkloadObject {
  std::map<std::string, Value> attributes;
  AccessPolicy policy;
};

struct WorkloadQuery {
  Query query;
  std::string requester_class;
};

struct Workload {
  std::vector<WorkloadObject> objects;  // i-names are pairwise distinct
  std::vector<WorkloadQuery> queries;
};

struct WorkloadOptions {
  QueryMix mix;
  double restricted = 0;   // fraction of objects visible only to "reader"
  double hit_bias = 0.5;   // chance a query value is copied from a stored object
};

// Requester classes used by generated queries; restricted objects admit only
// the first.
inline constexpr std::string_view kReaderClass = "reader";
inline constexpr std::string_view kGuestClass = "guest";

Workload generate_workload(std::uint64_t seed, std::size_t n_objects, std::size_t n_queries,
                           const ObjectClass& cls, const WorkloadOptions& options = {});

// A synthetic class with `dims` defining attributes a0..a{dims-1}; odd
// dimensions are integers, even ones text.
ObjectClass workload_class(std::size_t dims, std::string name = "item");

// Evenly spaced cuts over the workload value space, `grid[i]` segments on
// dimension i.
SegmentCuts workload_cuts(const ObjectClass& cls, const std::vector<std::size_t>& grid);

// Brute-force reference for Find: every form satisfying the query that the
// requester may view, sorted by normalized i-name keys.
std::vector<InformationalForm> oracle_find(const std::vector<InformationalForm>& forms, const Query& query,
                                           const ObjectClass& cls, const RequesterSummary& requester);

}  // namespace oon
