// Copyright 2026 The oon-sim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "oon/event_queue.hpp"
#include "oon/object_model.hpp"

namespace oon {

using IrnId = std::uint32_t;
using CellId = std::size_t;
using RequestId = std::uint64_t;
using GridCoord = std::vector<std::size_t>;

inline constexpr std::uint32_t kDefaultHopLimit = 64;

// ---------------------------------------------------------------------------
// Lexicographic partitioning
// ---------------------------------------------------------------------------

// Per defining attribute, the sorted boundary keys splitting that
// dimension's normalized key space into contiguous segments. k boundaries
// give k + 1 segments; segment j covers [boundary[j-1], boundary[j]).
struct SegmentCuts {
  std::vector<std::vector<std::string>> boundaries;

  // Normalizes raw boundary values. Attributes without an entry get a single
  // segment. Throws UnknownAttribute for non-defining attributes and
  // InvalidCuts for unsorted or duplicate boundaries.
  static SegmentCuts from_values(const ObjectClass& cls,
                                 const std::map<std::string, std::vector<Value>>& raw);

  // Uniform text cuts: `segments` pieces per dimension over 'a'..'z'.
  static SegmentCuts uniform_text(std::size_t dims, std::size_t segments);
};

class PartitionMap {
 public:
  PartitionMap(std::string class_name, std::vector<AttributeSpec> dimensions,
               SegmentCuts cuts, std::size_t irn_count);

  const std::string& class_name() const noexcept { return class_name_; }
  const std::vector<AttributeSpec>& dimensions() const noexcept { return dimensions_; }
  const SegmentCuts& cuts() const noexcept { return cuts_; }
  const std::vector<std::size_t>& grid_dims() const noexcept { return grid_dims_; }
  std::size_t cell_count() const noexcept { return owner_.size(); }
  std::size_t irn_count() const noexcept { return cells_of_.size(); }

  GridCoord coord_of(CellId cell) const;
  CellId cell_of(const GridCoord& coord) const;
  IrnId owner_of(CellId cell) const { return owner_.at(cell); }
  const std::vector<CellId>& cells_of(IrnId irn) const { return cells_of_.at(irn); }

  // Segment index of a normalized key along one dimension.
  std::size_t segment_of(std::size_t dim, std::string_view key) const;

  // The unique cell containing a set of normalized i-name keys.
  CellId cell_for_keys(const std::vector<std::string>& keys) const;

  // Manhattan distance between two cells on the grid.
  std::size_t cell_distance(CellId a, CellId b) const;

  // Smallest cell distance from any cell of `irn` to `target`.
  std::size_t irn_distance(IrnId irn, CellId target) const;

  // Upper bound on inter-IRN hops for greedy delivery: sum of (g_i - 1).
  std::size_t hop_bound() const;

  std::string format_cell(CellId cell) const;

 private:
  std::string class_name_;
  std::vector<AttributeSpec> dimensions_;
  SegmentCuts cuts_;
  std::vector<std::size_t> grid_dims_;
  std::vector<IrnId> owner_;
  std::vector<std::vector<CellId>> cells_of_;
};

// ---------------------------------------------------------------------------
// Messages
// ---------------------------------------------------------------------------

enum class XFindAction { Find, Register, Modify, Delete };

std::string_view to_string(XFindAction action);

// Identity and time stamp of the object issuing an information-layer request.
struct RequesterSummary {
  std::string class_name;
  std::string identity;
  Tick timestamp = 0;
};

struct XFindMessage {
  RequestId request_id = 0;
  XFindAction action = XFindAction::Find;
  std::variant<Query, InformationalForm> payload;
  IrnId origin = 0;
  RequesterSummary requester;
  std::vector<IrnId> path;   // visited IRNs, ending with the current holder
  std::set<CellId> targets;  // cells still to be reached by this copy
  std::uint32_t hop_limit = kDefaultHopLimit;

  IrnId holder() const { return path.back(); }
};

enum class ResultStatus { Found, Affirmed, AlreadyExists, NotFound, HopLimitExceeded };

std::string_view to_string(ResultStatus status);

struct ResultsMessage {
  RequestId request_id = 0;
  XFindAction action = XFindAction::Find;
  IrnId responder = 0;
  ResultStatus status = ResultStatus::Found;
  std::vector<InformationalForm> forms;
  std::vector<IrnId> failed_owners;    // owners a dropped XFind never reached
  std::vector<IrnId> xfind_path;       // path of the XFind that produced this
  std::vector<IrnId> reverse_path;     // hops still to go, ending at the origin
  std::vector<IrnId> traversed;        // hops taken so far, starting at responder
};

// ---------------------------------------------------------------------------
// IRN state
// ---------------------------------------------------------------------------

enum class RequestState { Pending, Complete, TimedOut };

struct PendingRequest {
  XFindAction action = XFindAction::Find;
  std::set<IrnId> expected;
  std::set<IrnId> responded;
  std::vector<InformationalForm> forms;
  std::optional<ResultStatus> outcome;  // mutations only
  RequestState state = RequestState::Pending;
  bool partial = false;
  std::size_t results_received = 0;
  Tick issued_at = 0;
  Tick completed_at = 0;
};

struct IrnNode {
  IrnId id = 0;
  std::vector<CellId> cells;
  std::vector<IrnId> neighbors;
  std::map<std::vector<std::string>, InformationalForm> store;  // keyed by normalized i-name
  std::set<RequestId> handled_finds;
  std::map<RequestId, PendingRequest> requests;  // requests issued with this node as entry

  bool owns(CellId cell) const;
};

struct PartitionBuild {
  PartitionMap map;
  std::vector<IrnNode> nodes;
};

// Cells are numbered row-major (last dimension fastest) and dealt to IRNs
// round-robin. IRNs owning grid-adjacent cells become neighbors.
PartitionBuild build_partition_map(const ObjectClass& cls, SegmentCuts cuts, std::size_t irn_count);

// Cells whose segments intersect every predicate's key interval, ascending.
std::vector<CellId> locate_partitions(const PartitionMap& map, const Query& query);

// ---------------------------------------------------------------------------
// Forwarding and request handling
// ---------------------------------------------------------------------------

struct NextHop {
  IrnId neighbor;
  std::set<CellId> targets;

  friend bool operator==(const NextHop&, const NextHop&) = default;
};

// Splits the targets not owned by `node` among its neighbors. Each target
// goes to the neighbor closest to it on the grid; ties prefer the owner of
// the cell one step along the first differing dimension, then the lowest id.
std::vector<NextHop> next_hops(const IrnNode& node, const PartitionMap& map,
                               const std::set<CellId>& targets);

enum class AccessAction { View, Exchange };

bool check_access(const InformationalForm& form, const RequesterSummary& requester, AccessAction action);

struct XFindOutcome {
  std::vector<ResultsMessage> results;
  std::vector<XFindMessage> forwards;  // path already extended by the next hop
};

// Handles the locally owned targets of `msg` and forwards the rest.
// Throws WrongOwner when a Register/Modify/Delete reaches a node that does
// not own the carried form's cell.
XFindOutcome handle_xfind(IrnNode& node, const PartitionMap& map, const ObjectClass& cls,
                          const XFindMessage& msg);

// Registers a new request at `entry` and builds its initial XFind. Find
// expects one Results per distinct owner of the target cells, everything
// else expects exactly one. Throws InvalidPayload.
XFindMessage issue_request(IrnNode& entry, const PartitionMap& map, const ObjectClass& cls,
                           RequestId id, XFindAction action,
                           std::variant<Query, InformationalForm> payload,
                           RequesterSummary requester, Tick now,
                           std::uint32_t hop_limit = kDefaultHopLimit);

// Accumulates one Results at the entry node. Duplicate responders are
// ignored. Throws UnknownRequest.
const PendingRequest& gather_results(IrnNode& entry, const ResultsMessage& results, Tick now);

// Deadline expiry. Returns true if the request was still pending.
bool expire_request(IrnNode& entry, RequestId id, Tick now);

}  // namespace oon
