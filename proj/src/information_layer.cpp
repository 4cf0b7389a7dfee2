// Copyright 2026 The oon-sim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "oon/information_layer.hpp"

#include <algorithm>
#include <limits>

namespace oon {

std::string_view to_string(XFindAction action) {
  switch (action) {
    case XFindAction::Find: return "find";
    case XFindAction::Register: return "register";
    case XFindAction::Modify: return "modify";
    case XFindAction::Delete: return "delete";
  }
  return "?";
}

std::string_view to_string(ResultStatus status) {
  switch (status) {
    case ResultStatus::Found: return "found";
    case ResultStatus::Affirmed: return "affirmed";
    case ResultStatus::AlreadyExists: return "already_exists";
    case ResultStatus::NotFound: return "not_found";
    case ResultStatus::HopLimitExceeded: return "hop_limit";
  }
  return "?";
}

// ---------------------------------------------------------------------------

SegmentCuts SegmentCuts::from_values(const ObjectClass& cls,
                                     const std::map<std::string, std::vector<Value>>& raw) {
  SegmentCuts cuts;
  cuts.boundaries.resize(cls.defining().size());
  for (const auto& [name, values] : raw) {
    auto idx = cls.defining_index(name);
    if (!idx) {
      throw Error(Errc::UnknownAttribute,
                  "cuts reference '" + name + "', not a defining attribute of class '" + cls.name() + "'");
    }
    auto& out = cuts.boundaries[*idx];
    for (const auto& v : values) out.push_back(normalize_value(v, cls.defining()[*idx].kind));
    for (std::size_t i = 1; i < out.size(); ++i) {
      if (!(out[i - 1] < out[i])) {
        throw Error(Errc::InvalidCuts, "boundaries of '" + name + "' are not strictly increasing");
      }
    }
  }
  return cuts;
}

SegmentCuts SegmentCuts::uniform_text(std::size_t dims, std::size_t segments) {
  SegmentCuts cuts;
  cuts.boundaries.resize(dims);
  for (auto& b : cuts.boundaries) {
    for (std::size_t j = 1; j < segments; ++j) {
      b.push_back(std::string(1, static_cast<char>('a' + (26 * j) / segments)));
    }
  }
  return cuts;
}

PartitionMap::PartitionMap(std::string class_name, std::vector<AttributeSpec> dimensions,
                           SegmentCuts cuts, std::size_t irn_count)
    : class_name_(std::move(class_name)), dimensions_(std::move(dimensions)), cuts_(std::move(cuts)) {
  if (cuts_.boundaries.size() != dimensions_.size()) {
    throw Error(Errc::InvalidCuts, "cuts must list one boundary set per defining attribute");
  }
  std::size_t cells = 1;
  for (const auto& b : cuts_.boundaries) {
    for (std::size_t i = 1; i < b.size(); ++i) {
      if (!(b[i - 1] < b[i])) throw Error(Errc::InvalidCuts, "boundaries are not strictly increasing");
    }
    grid_dims_.push_back(b.size() + 1);
    cells *= b.size() + 1;
  }
  if (irn_count == 0) throw Error(Errc::ValidationError, "irn_count must be at least 1");
  if (irn_count > cells) {
    throw Error(Errc::ValidationError, "irn_count " + std::to_string(irn_count) + " exceeds the " +
                                           std::to_string(cells) + " grid cells");
  }
  owner_.resize(cells);
  cells_of_.resize(irn_count);
  for (CellId c = 0; c < cells; ++c) {
    owner_[c] = static_cast<IrnId>(c % irn_count);
    cells_of_[owner_[c]].push_back(c);
  }
}

GridCoord PartitionMap::coord_of(CellId cell) const {
  GridCoord coord(grid_dims_.size());
  for (std::size_t i = grid_dims_.size(); i-- > 0;) {
    coord[i] = cell % grid_dims_[i];
    cell /= grid_dims_[i];
  }
  return coord;
}

CellId PartitionMap::cell_of(const GridCoord& coord) const {
  CellId cell = 0;
  for (std::size_t i = 0; i < grid_dims_.size(); ++i) cell = cell * grid_dims_[i] + coord.at(i);
  return cell;
}

std::size_t PartitionMap::segment_of(std::size_t dim, std::string_view key) const {
  const auto& b = cuts_.boundaries.at(dim);
  return static_cast<std::size_t>(std::upper_bound(b.begin(), b.end(), key) - b.begin());
}

CellId PartitionMap::cell_for_keys(const std::vector<std::string>& keys) const {
  GridCoord coord(grid_dims_.size());
  for (std::size_t i = 0; i < coord.size(); ++i) coord[i] = segment_of(i, keys.at(i));
  return cell_of(coord);
}

std::size_t PartitionMap::cell_distance(CellId a, CellId b) const {
  auto ca = coord_of(a);
  auto cb = coord_of(b);
  std::size_t d = 0;
  for (std::size_t i = 0; i < ca.size(); ++i) d += ca[i] > cb[i] ? ca[i] - cb[i] : cb[i] - ca[i];
  return d;
}

std::size_t PartitionMap::irn_distance(IrnId irn, CellId target) const {
  std::size_t best = std::numeric_limits<std::size_t>::max();
  for (CellId c : cells_of(irn)) best = std::min(best, cell_distance(c, target));
  return best;
}

std::size_t PartitionMap::hop_bound() const {
  std::size_t sum = 0;
  for (auto g : grid_dims_) sum += g - 1;
  return sum;
}

std::string PartitionMap::format_cell(CellId cell) const {
  auto coord = coord_of(cell);
  std::string out = "(";
  for (std::size_t i = 0; i < coord.size(); ++i) {
    if (i != 0) out += ",";
    out += std::to_string(coord[i]);
  }
  return out + ")";
}

bool IrnNode::owns(CellId cell) const {
  return std::binary_search(cells.begin(), cells.end(), cell);
}

PartitionBuild build_partition_map(const ObjectClass& cls, SegmentCuts cuts, std::size_t irn_count) {
  PartitionMap map(cls.name(), cls.defining(), std::move(cuts), irn_count);
  std::vector<IrnNode> nodes(irn_count);
  std::vector<std::set<IrnId>> adjacent(irn_count);
  const auto& dims = map.grid_dims();
  for (CellId c = 0; c < map.cell_count(); ++c) {
    auto coord = map.coord_of(c);
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (coord[i] + 1 < dims[i]) {
        auto next = coord;
        ++next[i];
        IrnId a = map.owner_of(c);
        IrnId b = map.owner_of(map.cell_of(next));
        if (a != b) {
          adjacent[a].insert(b);
          adjacent[b].insert(a);
        }
      }
    }
  }
  for (IrnId i = 0; i < irn_count; ++i) {
    nodes[i].id = i;
    nodes[i].cells = map.cells_of(i);
    nodes[i].neighbors.assign(adjacent[i].begin(), adjacent[i].end());
  }
  return PartitionBuild{std::move(map), std::move(nodes)};
}

std::vector<CellId> locate_partitions(const PartitionMap& map, const Query& query) {
  if (query.class_name != map.class_name()) {
    throw Error(Errc::ClassMismatch, "query of class '" + query.class_name + "' located on '" + map.class_name() + "'");
  }
  const auto& dims = map.dimensions();
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    auto interval = key_interval(query.predicate_for(dims[i].name), dims[i].kind);
    const auto& b = map.cuts().boundaries[i];
    std::size_t lo = map.segment_of(i, interval.lo);
    std::size_t hi;
    if (interval.prefix_closure) {
      auto it = std::partition_point(b.begin(), b.end(), [&](const std::string& cut) {
        return cut <= interval.hi || std::string_view(cut).starts_with(interval.hi);
      });
      hi = static_cast<std::size_t>(it - b.begin());
    } else {
      hi = map.segment_of(i, interval.hi);
    }
    if (hi < lo) return {};
    spans.emplace_back(lo, hi);
  }
  std::vector<CellId> out;
  GridCoord coord(spans.size());
  for (std::size_t i = 0; i < spans.size(); ++i) coord[i] = spans[i].first;
  while (true) {
    out.push_back(map.cell_of(coord));
    std::size_t i = spans.size();
    while (i-- > 0) {
      if (coord[i] < spans[i].second) {
        ++coord[i];
        break;
      }
      coord[i] = spans[i].first;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// The node's cell closest to `target`, stepped once along the first
// dimension where they differ.
CellId dimension_ordered_step(const IrnNode& node, const PartitionMap& map, CellId target) {
  CellId from = node.cells.front();
  std::size_t best = map.cell_distance(from, target);
  for (CellId c : node.cells) {
    auto d = map.cell_distance(c, target);
    if (d < best) {
      best = d;
      from = c;
    }
  }
  auto coord = map.coord_of(from);
  auto goal = map.coord_of(target);
  for (std::size_t i = 0; i < coord.size(); ++i) {
    if (coord[i] != goal[i]) {
      coord[i] = coord[i] < goal[i] ? coord[i] + 1 : coord[i] - 1;
      break;
    }
  }
  return map.cell_of(coord);
}

}  // namespace

std::vector<NextHop> next_hops(const IrnNode& node, const PartitionMap& map,
                               const std::set<CellId>& targets) {
  std::map<IrnId, std::set<CellId>> grouped;
  for (CellId t : targets) {
    if (node.owns(t)) continue;
    IrnId preferred = map.owner_of(dimension_ordered_step(node, map, t));
    std::optional<IrnId> best;
    std::size_t best_d = std::numeric_limits<std::size_t>::max();
    for (IrnId nb : node.neighbors) {
      auto d = map.irn_distance(nb, t);
      bool better = d < best_d || (d == best_d && nb == preferred && *best != preferred);
      if (better) {
        best = nb;
        best_d = d;
      }
    }
    if (!best) throw Error(Errc::NoRoute, "IRN " + std::to_string(node.id) + " has no neighbors");
    grouped[*best].insert(t);
  }
  std::vector<NextHop> out;
  for (auto& [nb, cells] : grouped) out.push_back({nb, std::move(cells)});
  return out;
}

bool check_access(const InformationalForm& form, const RequesterSummary& requester, AccessAction action) {
  const auto& rule = action == AccessAction::View ? form.policy.view : form.policy.exchange;
  return rule.allows(requester.class_name);
}

namespace {

ResultsMessage make_results(const IrnNode& node, const XFindMessage& msg, ResultStatus status) {
  ResultsMessage r;
  r.request_id = msg.request_id;
  r.action = msg.action;
  r.responder = node.id;
  r.status = status;
  r.xfind_path = msg.path;
  r.reverse_path.assign(msg.path.rbegin() + 1, msg.path.rend());
  r.traversed = {node.id};
  return r;
}

ResultsMessage apply_mutation(IrnNode& node, const PartitionMap& map, const ObjectClass& cls,
                              const XFindMessage& msg) {
  const auto& form = std::get<InformationalForm>(msg.payload);
  auto keys = iname_keys(form.iname, cls);
  CellId cell = map.cell_for_keys(keys);
  if (!node.owns(cell)) {
    throw Error(Errc::WrongOwner, "IRN " + std::to_string(node.id) + " received " +
                                      std::string(to_string(msg.action)) + " for cell " +
                                      map.format_cell(cell) + " owned by IRN " +
                                      std::to_string(map.owner_of(cell)));
  }
  auto it = node.store.find(keys);
  ResultStatus status = ResultStatus::Affirmed;
  switch (msg.action) {
    case XFindAction::Register:
      if (it != node.store.end()) {
        status = ResultStatus::AlreadyExists;
      } else {
        node.store.emplace(std::move(keys), form);
      }
      break;
    case XFindAction::Modify:
      if (it == node.store.end()) {
        status = ResultStatus::NotFound;
      } else {
        it->second = form;
      }
      break;
    case XFindAction::Delete:
      if (it == node.store.end()) {
        status = ResultStatus::NotFound;
      } else {
        node.store.erase(it);
      }
      break;
    case XFindAction::Find:
      break;
  }
  return make_results(node, msg, status);
}

}  // namespace

XFindOutcome handle_xfind(IrnNode& node, const PartitionMap& map, const ObjectClass& cls,
                          const XFindMessage& msg) {
  if (msg.path.empty() || msg.holder() != node.id) {
    throw Error(Errc::InvalidPayload, "XFind delivered to IRN " + std::to_string(node.id) + " off its path");
  }
  XFindOutcome out;
  std::set<CellId> local;
  std::set<CellId> remote;
  for (CellId t : msg.targets) (node.owns(t) ? local : remote).insert(t);

  const bool mutation = msg.action != XFindAction::Find;
  if (mutation && msg.targets.empty()) {
    throw Error(Errc::WrongOwner, "mutation arrived at IRN " + std::to_string(node.id) + " with no target");
  }

  if (!local.empty()) {
    if (mutation) {
      out.results.push_back(apply_mutation(node, map, cls, msg));
    } else if (node.handled_finds.insert(msg.request_id).second) {
      const auto& query = std::get<Query>(msg.payload);
      auto r = make_results(node, msg, ResultStatus::Found);
      for (const auto& [keys, form] : node.store) {
        if (eval_query(query, form, cls) && check_access(form, msg.requester, AccessAction::View)) {
          r.forms.push_back(form);
        }
      }
      out.results.push_back(std::move(r));
    }
  }

  if (!remote.empty()) {
    if (msg.hop_limit == 0) {
      auto r = make_results(node, msg, ResultStatus::HopLimitExceeded);
      std::set<IrnId> owners;
      for (CellId t : remote) owners.insert(map.owner_of(t));
      r.failed_owners.assign(owners.begin(), owners.end());
      out.results.push_back(std::move(r));
    } else {
      for (auto& hop : next_hops(node, map, remote)) {
        XFindMessage fwd = msg;
        fwd.targets = std::move(hop.targets);
        fwd.path.push_back(hop.neighbor);
        fwd.hop_limit = msg.hop_limit - 1;
        out.forwards.push_back(std::move(fwd));
      }
    }
  }
  return out;
}

XFindMessage issue_request(IrnNode& entry, const PartitionMap& map, const ObjectClass& cls,
                           RequestId id, XFindAction action,
                           std::variant<Query, InformationalForm> payload,
                           RequesterSummary requester, Tick now, std::uint32_t hop_limit) {
  if (entry.requests.contains(id)) {
    throw Error(Errc::InvalidPayload, "request id " + std::to_string(id) + " already in use");
  }
  std::vector<CellId> targets;
  PendingRequest pending;
  pending.action = action;
  pending.issued_at = now;
  try {
    if (action == XFindAction::Find) {
      const auto* query = std::get_if<Query>(&payload);
      if (query == nullptr) throw Error(Errc::InvalidPayload, "find carries a query");
      validate_query(*query, cls);
      targets = locate_partitions(map, *query);
      for (CellId c : targets) pending.expected.insert(map.owner_of(c));
    } else {
      const auto* form = std::get_if<InformationalForm>(&payload);
      if (form == nullptr) throw Error(Errc::InvalidPayload, std::string(to_string(action)) + " carries a form");
      auto violations = validate_form(*form, cls);
      if (!violations.empty()) throw Error(Errc::InvalidPayload, violations.front().message);
      CellId cell = map.cell_for_keys(iname_keys(form->iname, cls));
      targets = {cell};
      pending.expected.insert(map.owner_of(cell));
    }
  } catch (const Error& e) {
    if (e.code() == Errc::InvalidPayload) throw;
    throw Error(Errc::InvalidPayload, e.what());
  }
  if (pending.expected.empty()) {
    pending.state = RequestState::Complete;
    pending.completed_at = now;
  }
  entry.requests.emplace(id, std::move(pending));

  requester.timestamp = now;
  XFindMessage msg;
  msg.request_id = id;
  msg.action = action;
  msg.payload = std::move(payload);
  msg.origin = entry.id;
  msg.requester = std::move(requester);
  msg.path = {entry.id};
  msg.targets.insert(targets.begin(), targets.end());
  msg.hop_limit = hop_limit;
  return msg;
}

const PendingRequest& gather_results(IrnNode& entry, const ResultsMessage& results, Tick now) {
  auto it = entry.requests.find(results.request_id);
  if (it == entry.requests.end()) {
    throw Error(Errc::UnknownRequest, "IRN " + std::to_string(entry.id) + " has no request " +
                                          std::to_string(results.request_id));
  }
  auto& req = it->second;
  if (req.state != RequestState::Pending) return req;

  if (results.status == ResultStatus::HopLimitExceeded) {
    for (IrnId owner : results.failed_owners) {
      if (req.expected.contains(owner) && req.responded.insert(owner).second) {
        req.partial = true;
        if (req.action != XFindAction::Find) req.outcome = ResultStatus::HopLimitExceeded;
      }
    }
  } else if (req.expected.contains(results.responder) && req.responded.insert(results.responder).second) {
    ++req.results_received;
    req.forms.insert(req.forms.end(), results.forms.begin(), results.forms.end());
    if (req.action != XFindAction::Find) req.outcome = results.status;
  }

  if (req.responded.size() == req.expected.size()) {
    req.state = RequestState::Complete;
    req.completed_at = now;
  }
  return req;
}

bool expire_request(IrnNode& entry, RequestId id, Tick now) {
  auto it = entry.requests.find(id);
  if (it == entry.requests.end()) {
    throw Error(Errc::UnknownRequest, "IRN " + std::to_string(entry.id) + " has no request " + std::to_string(id));
  }
  auto& req = it->second;
  if (req.state != RequestState::Pending) return false;
  req.state = RequestState::TimedOut;
  req.partial = true;
  req.completed_at = now;
  return true;
}

}  // namespace oon
