// Copyright 2026 The oon-sim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "oon/world.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace oon {

std::string_view to_string(PublishOrder order) {
  return order == PublishOrder::BottomUp ? "bottom_up" : "top_down";
}

PublishOrder parse_publish_order(std::string_view text) {
  if (text == "bottom_up") return PublishOrder::BottomUp;
  if (text == "top_down") return PublishOrder::TopDown;
  throw Error(Errc::ValidationError, "publish order must be bottom_up or top_down, got '" + std::string(text) + "'");
}

World::World(WorldConfig config) : config_(std::move(config)) {}

// ---------------------------------------------------------------------------
// Topology
// ---------------------------------------------------------------------------

DomainId World::add_domain(const std::string& name) {
  if (name.empty() || domain_ids_.contains(name)) {
    throw Error(Errc::ValidationError, "domain name '" + name + "' is empty or already taken");
  }
  auto id = static_cast<DomainId>(domains_.size());
  domains_.push_back(Domain{id, name, Router(id, name), std::nullopt});
  domain_ids_[name] = id;
  adjacency_.emplace_back();
  recompute_domain_routes();
  return id;
}

void World::add_link(const std::string& a, const std::string& b, Tick latency) {
  if (latency < 1) throw Error(Errc::ValidationError, "link latency must be at least 1 tick");
  auto& da = domain(a);
  auto& db = domain(b);
  if (da.id == db.id) throw Error(Errc::ValidationError, "self link on '" + a + "'");
  if (da.router.link_to(db.id)) throw Error(Errc::ValidationError, "duplicate link " + a + "-" + b);
  da.router.add_link(db.id, latency);
  db.router.add_link(da.id, latency);
  adjacency_[da.id].emplace_back(db.id, latency);
  adjacency_[db.id].emplace_back(da.id, latency);
  recompute_domain_routes();
}

void World::add_class(ObjectClass cls, SegmentCuts cuts, std::size_t irn_count) {
  if (networks_.contains(cls.name())) {
    throw Error(Errc::ValidationError, "class '" + cls.name() + "' declared twice");
  }
  auto build = build_partition_map(cls, std::move(cuts), irn_count);
  auto name = cls.name();
  networks_.emplace(name, InfoNetwork{std::move(cls), std::move(build.map), std::move(build.nodes)});
}

DomainId World::domain_id(const std::string& name) const {
  auto it = domain_ids_.find(name);
  if (it == domain_ids_.end()) throw Error(Errc::UnknownDomain, "no data domain '" + name + "'");
  return it->second;
}

World::Domain& World::domain(const std::string& name) { return domains_.at(domain_id(name)); }

const Router& World::router(const std::string& domain) const { return domains_.at(domain_id(domain)).router; }

std::vector<const Router*> World::routers() const {
  std::vector<const Router*> out;
  for (const auto& d : domains_) out.push_back(&d.router);
  return out;
}

const InfoNetwork& World::network(const std::string& class_name) const {
  auto it = networks_.find(class_name);
  if (it == networks_.end()) throw Error(Errc::UnknownClass, "no class '" + class_name + "'");
  return it->second;
}

InfoNetwork& World::net(const std::string& class_name) {
  auto it = networks_.find(class_name);
  if (it == networks_.end()) throw Error(Errc::UnknownClass, "no class '" + class_name + "'");
  return it->second;
}

std::vector<std::string> World::class_names() const {
  std::vector<std::string> out;
  for (const auto& [name, n] : networks_) out.push_back(name);
  return out;
}

// Shortest paths by latency; ties keep the first path found, and neighbors
// are explored in link-creation order, so the result is deterministic.
void World::recompute_domain_routes() {
  const std::size_t n = domains_.size();
  for (DomainId src = 0; src < n; ++src) {
    std::vector<Tick> dist(n, std::numeric_limits<Tick>::max());
    std::vector<std::optional<DomainId>> first(n);
    using Item = std::pair<Tick, DomainId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[src] = 0;
    pq.emplace(0, src);
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d != dist[u]) continue;
      for (auto [v, lat] : adjacency_[u]) {
        if (d + lat < dist[v]) {
          dist[v] = d + lat;
          first[v] = u == src ? v : first[u];
          pq.emplace(dist[v], v);
        }
      }
    }
    auto& r = domains_[src].router;
    r.fib().domain_routes.clear();
    for (DomainId dst = 0; dst < n; ++dst) {
      if (dst == src || !first[dst]) continue;
      r.fib().domain_routes[dst] = *r.link_to(*first[dst]);
    }
  }
  for (const auto& [g, anchor] : anchor_) reinstall_inter(g);
}

// Every router except the anchor reaches the GlobalId through its next hop
// toward the anchor.
void World::reinstall_inter(GlobalId g) {
  DomainId anchor = anchor_.at(g);
  for (auto& d : domains_) {
    if (d.id == anchor) {
      d.router.fib().inter.erase(g);
      continue;
    }
    auto it = d.router.fib().domain_routes.find(anchor);
    if (it == d.router.fib().domain_routes.end()) {
      d.router.fib().inter.erase(g);
    } else {
      update_fib(d.router, g, it->second);
    }
  }
}

// ---------------------------------------------------------------------------
// Objects
// ---------------------------------------------------------------------------

void World::add_object(ObjectSpec spec) {
  if (spec.id.empty() || objects_.contains(spec.id)) {
    throw Error(Errc::ValidationError, "object id '" + spec.id + "' is empty or already taken");
  }
  const auto& n = network(spec.class_name);
  for (const auto& [method, kind] : spec.handlers) {
    if (!n.cls.has_method(method)) {
      throw Error(Errc::ValidationError, "object '" + spec.id + "': class '" + spec.class_name +
                                             "' has no method '" + method + "'");
    }
  }
  if (spec.entry_irn >= n.nodes.size()) {
    throw Error(Errc::ValidationError, "object '" + spec.id + "': entry IRN " + std::to_string(spec.entry_irn) +
                                           " out of range");
  }
  ObjectRecord rec{std::move(spec), std::nullopt, std::nullopt, false, false};
  auto id = rec.spec.id;
  objects_.emplace(id, std::move(rec));
  auto violations = validate_form(build_form(id), n.cls);
  if (!violations.empty()) {
    objects_.erase(id);
    throw Error(Errc::ValidationError, "object '" + id + "': " + violations.front().message);
  }
}

World::ObjectRecord& World::record(const std::string& object) {
  auto it = objects_.find(object);
  if (it == objects_.end()) throw Error(Errc::UnknownObject, "no object '" + object + "'");
  return it->second;
}

const World::ObjectRecord& World::record(const std::string& object) const {
  auto it = objects_.find(object);
  if (it == objects_.end()) throw Error(Errc::UnknownObject, "no object '" + object + "'");
  return it->second;
}

const ObjectSpec& World::object_spec(const std::string& object) const { return record(object).spec; }

std::vector<std::string> World::object_ids() const {
  std::vector<std::string> out;
  for (const auto& [id, rec] : objects_) out.push_back(id);
  return out;
}

std::optional<PName> World::pname_of(const std::string& object) const { return record(object).pname; }

bool World::is_published(const std::string& object) const { return record(object).published; }

std::optional<std::string> World::host_domain(const PName& pname) const {
  auto it = host_domain_.find(pname);
  if (it == host_domain_.end()) return std::nullopt;
  return domains_.at(it->second).name;
}

RequesterSummary World::requester_for(const std::string& object) const {
  const auto& rec = record(object);
  const auto& cls = network(rec.spec.class_name).cls;
  auto form = build_form(object);
  return RequesterSummary{cls.name(), to_string(iname_of(form, cls)), now()};
}

InformationalForm World::build_form(const std::string& object) const {
  const auto& rec = record(object);
  const auto& cls = network(rec.spec.class_name).cls;
  InformationalForm form;
  form.iname.class_name = cls.name();
  for (const auto& attr : cls.defining()) {
    auto it = rec.spec.attributes.find(attr.name);
    if (it != rec.spec.attributes.end()) form.iname.values.push_back(it->second);
  }
  form.description = rec.spec.attributes;
  form.management["published_at"] = static_cast<std::uint64_t>(now());
  form.management["hits"] = std::uint64_t{0};
  if (rec.pname) {
    form.relationship.physical.push_back(*rec.pname);
  } else if (rec.preminted) {
    form.relationship.physical.push_back(*rec.preminted);
  }
  form.methods = cls.methods();
  form.policy = rec.spec.policy;
  return form;
}

PName World::mint_for(const ObjectRecord& rec) {
  if (config_.assigner == PNameAssigner::InfoDomain) {
    if (!info_allocator_) info_allocator_ = LocalAllocator::bind(authority_, config_.info_domain);
    return info_allocator_->mint_pname();
  }
  auto& d = domain(rec.spec.home_domain);
  if (!d.allocator) d.allocator = LocalAllocator::bind(authority_, d.name);
  return d.allocator->mint_pname();
}

PName World::instantiate(const std::string& object) {
  auto& rec = record(object);
  if (rec.pname) throw Error(Errc::AlreadyInstantiated, "object '" + object + "' already instantiated");
  DomainId home = domain_id(rec.spec.home_domain);
  PName pname = rec.preminted ? *rec.preminted : mint_for(rec);
  rec.preminted.reset();
  rec.pname = pname;
  host_up(rec, pname, home);
  note("INSTANTIATE " + object + " " + format_pname(pname) + " at=" + domains_[home].name);
  return pname;
}

void World::host_up(ObjectRecord& rec, const PName& pname, DomainId where) {
  const auto& cls = network(rec.spec.class_name).cls;
  hosts_[pname] = ObjectHost::make(pname, cls, rec.spec.handlers, rec.spec.policy);
  host_domain_[pname] = where;
  object_by_pname_[pname] = rec.spec.id;
  rec.host_alive = true;

  auto& r = domains_[where].router;
  InterfaceId port = r.add_host_port(pname);
  r.fib().intra[pname.global_id][pname.local_id] = port;
  live_by_global_[pname.global_id].insert(pname);

  auto [it, fresh] = anchor_.try_emplace(pname.global_id, where);
  if (fresh) {
    r.owned().insert(pname.global_id);
    reinstall_inter(pname.global_id);
  } else if (it->second != where) {
    domains_[it->second].router.fib().intra[pname.global_id][pname.local_id] = RelayTo{where};
  }
}

void World::host_down(const PName& pname, bool clean) {
  auto hd = host_domain_.find(pname);
  if (hd == host_domain_.end()) return;
  DomainId where = hd->second;
  auto& r = domains_[where].router;
  if (auto port = r.host_port(pname)) r.remove_interface(*port);
  auto erase_intra = [&pname](Router& router) {
    auto& intra = router.fib().intra;
    if (auto it = intra.find(pname.global_id); it != intra.end()) {
      it->second.erase(pname.local_id);
      if (it->second.empty()) intra.erase(it);
    }
  };
  erase_intra(r);
  if (clean) {
    if (auto a = anchor_.find(pname.global_id); a != anchor_.end() && a->second != where) {
      erase_intra(domains_[a->second].router);
    }
  }
  live_by_global_[pname.global_id].erase(pname);
  hosts_.erase(pname);
  host_domain_.erase(hd);
  if (auto it = object_by_pname_.find(pname); it != object_by_pname_.end()) {
    objects_.at(it->second).host_alive = false;
  }
}

void World::publish(const std::string& object, PublishOrder order) {
  auto& rec = record(object);
  if (rec.published) throw Error(Errc::AlreadyPublished, "object '" + object + "' already published");
  const auto& cls_name = rec.spec.class_name;
  const IrnId entry = rec.spec.entry_irn;

  if (order == PublishOrder::BottomUp) {
    if (!rec.pname) throw Error(Errc::NotInstantiated, "bottom-up publish of '" + object + "' before instantiation");
  } else {
    if (rec.pname) throw Error(Errc::AlreadyInstantiated, "top-down publish of instantiated '" + object + "'");
    if (config_.assigner == PNameAssigner::InfoDomain && !rec.preminted) rec.preminted = mint_for(rec);
  }

  note("PUBLISH " + object + " order=" + std::string(to_string(order)));
  auto out = request(cls_name, entry, XFindAction::Register, build_form(object), requester_for(object));
  if (out.state.outcome == ResultStatus::AlreadyExists) {
    throw Error(Errc::AlreadyPublished, "an object with the i-name of '" + object + "' is already registered");
  }
  if (out.state.outcome != ResultStatus::Affirmed) {
    throw Error(Errc::Timeout, "register of '" + object + "' did not complete");
  }
  rec.published = true;

  if (order == PublishOrder::TopDown) {
    instantiate(object);
    auto mod = request(cls_name, entry, XFindAction::Modify, build_form(object), requester_for(object));
    if (mod.state.outcome != ResultStatus::Affirmed) {
      throw Error(Errc::Timeout, "relationship update of '" + object + "' did not complete");
    }
  }
}

DiscoverResult World::discover(const Query& query, IrnId entry, const RequesterSummary& requester) {
  const auto& cls = network(query.class_name).cls;
  auto out = request(query.class_name, entry, XFindAction::Find, query, requester);
  std::vector<std::pair<std::vector<std::string>, Discovery>> rows;
  for (auto& form : out.state.forms) {
    rows.emplace_back(iname_keys(form.iname, cls), Discovery{form.iname, form.relationship.physical});
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  DiscoverResult result;
  for (auto& [keys, d] : rows) result.matches.push_back(std::move(d));
  result.state = out.state.state;
  result.partial = out.state.partial;
  return result;
}

void World::migrate(const PName& pname, const std::string& to_domain) {
  auto ob = object_by_pname_.find(pname);
  if (ob == object_by_pname_.end() || !hosts_.contains(pname)) {
    throw Error(Errc::UnknownObject, "no live object at " + format_pname(pname));
  }
  DomainId target = domain_id(to_domain);
  DomainId source = host_domain_.at(pname);
  const GlobalId g = pname.global_id;
  note("MIGRATE " + format_pname(pname) + " from=" + domains_[source].name + " to=" + to_domain);

  if (source != target) {
    ObjectHost host = std::move(hosts_.at(pname));
    auto& src = domains_[source].router;
    if (auto port = src.host_port(pname)) src.remove_interface(*port);
    src.fib().intra[g].erase(pname.local_id);
    auto& dst = domains_[target].router;
    hosts_[pname] = std::move(host);
    host_domain_[pname] = target;
    dst.add_host_port(pname);
  }

  // The provider prefix follows the object: the target becomes the anchor,
  // holding a host route or relay for every live object under the prefix.
  DomainId old_anchor = anchor_.at(g);
  auto& old_router = domains_[old_anchor].router;
  old_router.owned().erase(g);
  if (auto it = old_router.fib().intra.find(g); it != old_router.fib().intra.end()) {
    std::erase_if(it->second, [](const auto& kv) { return std::holds_alternative<RelayTo>(kv.second); });
    if (it->second.empty()) old_router.fib().intra.erase(it);
  }
  auto& anchor_router = domains_[target].router;
  anchor_router.owned().insert(g);
  auto& table = anchor_router.fib().intra[g];
  for (const auto& p : live_by_global_[g]) {
    DomainId at = host_domain_.at(p);
    if (at == target) {
      table[p.local_id] = *anchor_router.host_port(p);
    } else {
      table[p.local_id] = RelayTo{at};
    }
  }
  anchor_[g] = target;
  reinstall_inter(g);
}

void World::update(const std::string& object, const std::map<std::string, Value>& attributes) {
  auto& rec = record(object);
  const auto& cls = network(rec.spec.class_name).cls;
  for (const auto& [name, value] : attributes) {
    if (cls.defining_index(name)) {
      throw Error(Errc::ValidationError, "cannot modify defining attribute '" + name + "' of '" + object + "'");
    }
    if (cls.find_attribute(name) == nullptr) {
      throw Error(Errc::UnknownAttribute, "class '" + cls.name() + "' has no attribute '" + name + "'");
    }
  }
  for (const auto& [name, value] : attributes) rec.spec.attributes[name] = value;
  if (!rec.published) return;
  note("MODIFY " + object);
  auto out = request(rec.spec.class_name, rec.spec.entry_irn, XFindAction::Modify, build_form(object),
                     requester_for(object));
  if (out.state.outcome != ResultStatus::Affirmed) {
    throw Error(Errc::NotPublished, "modify of '" + object + "' was denied");
  }
}

void World::remove(const std::string& object) {
  auto& rec = record(object);
  if (!rec.published && !rec.pname) throw Error(Errc::NotPublished, "object '" + object + "' is neither published nor hosted");
  note("REMOVE " + object);
  if (rec.published) {
    auto out = request(rec.spec.class_name, rec.spec.entry_irn, XFindAction::Delete, build_form(object),
                       requester_for(object));
    if (out.state.outcome != ResultStatus::Affirmed) {
      throw Error(Errc::NotPublished, "delete of '" + object + "' was denied");
    }
    rec.published = false;
  }
  if (rec.pname) {
    host_down(*rec.pname, true);
    object_by_pname_.erase(*rec.pname);
    rec.pname.reset();
  }
}

void World::kill_host(const std::string& object) {
  auto& rec = record(object);
  if (!rec.pname || !rec.host_alive) throw Error(Errc::NotInstantiated, "object '" + object + "' has no live host");
  note("FAULT kill_host " + object + " " + format_pname(*rec.pname));
  host_down(*rec.pname, false);
}

AuditReport World::audit_consistency() {
  AuditReport report;
  std::set<PName> covered;
  for (const auto& [name, n] : networks_) {
    for (const auto& node : n.nodes) {
      for (const auto& [keys, form] : node.store) {
        for (const auto& p : form.relationship.physical) {
          covered.insert(p);
          if (!hosts_.contains(p)) report.dangling.emplace_back(form.iname, p);
        }
      }
    }
  }
  for (const auto& [p, host] : hosts_) {
    if (!covered.contains(p)) report.orphans.push_back(p);
  }
  ++metrics_.audit_checkpoints;
  metrics_.dangling_pointers = std::max<std::uint64_t>(metrics_.dangling_pointers, report.dangling.size());
  note("AUDIT dangling=" + std::to_string(report.dangling.size()) + " orphans=" +
       std::to_string(report.orphans.size()));
  return report;
}

// ---------------------------------------------------------------------------
// Information layer
// ---------------------------------------------------------------------------

World::RequestOutcome World::request(const std::string& class_name, IrnId entry, XFindAction action,
                                     std::variant<Query, InformationalForm> payload, RequesterSummary requester) {
  auto& n = net(class_name);
  if (entry >= n.nodes.size()) {
    throw Error(Errc::ValidationError, "entry IRN " + std::to_string(entry) + " out of range");
  }
  RequestId id = next_request_++;
  auto msg = issue_request(n.nodes[entry], n.map, n.cls, id, action, std::move(payload), std::move(requester),
                           now(), config_.hop_limit);
  ++metrics_.requests_issued;
  if (n.nodes[entry].requests.at(id).state == RequestState::Pending) {
    deadlines_[id] = queue_.schedule(config_.deadline, RequestDeadline{class_name, entry, id});
    queue_.schedule(0, XFindArrival{class_name, std::move(msg)});
  } else {
    ++metrics_.requests_completed;
  }
  run_until_idle();
  return RequestOutcome{id, n.nodes[entry].requests.at(id)};
}

void World::on_xfind(XFindArrival& ev) {
  auto& n = net(ev.cls);
  auto& msg = ev.msg;
  auto& node = n.nodes.at(msg.holder());
  if (config_.trace) {
    std::string cells = "{";
    bool first = true;
    for (CellId c : msg.targets) {
      if (!first) cells += ",";
      cells += n.map.format_cell(c);
      first = false;
    }
    note("XFIND " + std::string(to_string(msg.action)) + " req=" + std::to_string(msg.request_id) +
         " at=" + std::to_string(node.id) + " targets=" + cells + "}");
  }
  ++metrics_.xfind_deliveries;
  std::size_t hops = msg.path.size() - 1;
  metrics_.max_xfind_hops = std::max(metrics_.max_xfind_hops, hops);
  if (hops > n.map.hop_bound()) ++metrics_.hop_bound_violations;

  auto outcome = handle_xfind(node, n.map, n.cls, msg);
  for (auto& fwd : outcome.forwards) {
    for (CellId t : fwd.targets) {
      if (n.map.irn_distance(fwd.holder(), t) >= n.map.irn_distance(node.id, t)) ++metrics_.greedy_violations;
    }
    ++metrics_.xfind_messages;
    queue_.schedule(config_.irn_latency, XFindArrival{ev.cls, std::move(fwd)});
  }
  for (auto& r : outcome.results) send_results(ev.cls, std::move(r));
}

void World::send_results(const std::string& cls, ResultsMessage r) {
  ++metrics_.results_messages;
  if (r.reverse_path.empty()) {
    IrnId at = r.responder;
    queue_.schedule(0, ResultsArrival{cls, std::move(r), at});
  } else {
    IrnId at = r.reverse_path.front();
    queue_.schedule(config_.irn_latency, ResultsArrival{cls, std::move(r), at});
  }
}

void World::on_results(ResultsArrival& ev) {
  auto& r = ev.msg;
  if (r.traversed.back() != ev.at) {
    r.traversed.push_back(ev.at);
    r.reverse_path.erase(r.reverse_path.begin());
    ++metrics_.results_hops;
  }
  if (!r.reverse_path.empty()) {
    IrnId next = r.reverse_path.front();
    queue_.schedule(config_.irn_latency, ResultsArrival{ev.cls, std::move(r), next});
    return;
  }
  std::vector<IrnId> expected(r.xfind_path.rbegin(), r.xfind_path.rend());
  if (r.traversed != expected) ++metrics_.reverse_route_violations;

  auto& n = net(ev.cls);
  auto& entry = n.nodes.at(ev.at);
  note("RESULTS req=" + std::to_string(r.request_id) + " from=" + std::to_string(r.responder) + " at=" +
       std::to_string(ev.at) + " status=" + std::string(to_string(r.status)) + " forms=" +
       std::to_string(r.forms.size()) + " hops=" + std::to_string(r.traversed.size() - 1));
  auto it = entry.requests.find(r.request_id);
  if (it != entry.requests.end() && it->second.state != RequestState::Pending) return;  // late arrival
  const auto& state = gather_results(entry, r, now());
  if (state.state == RequestState::Complete) {
    ++metrics_.requests_completed;
    ++metrics_.queries_completed;
    metrics_.query_latency_total += state.completed_at - state.issued_at;
    if (auto d = deadlines_.find(r.request_id); d != deadlines_.end()) {
      queue_.cancel(d->second);
      deadlines_.erase(d);
    }
  }
}

void World::on_deadline(const RequestDeadline& ev) {
  deadlines_.erase(ev.id);
  auto& n = net(ev.cls);
  if (expire_request(n.nodes.at(ev.entry), ev.id, now())) {
    ++metrics_.requests_timed_out;
    note("TIMEOUT req=" + std::to_string(ev.id));
  }
}

// ---------------------------------------------------------------------------
// Data layer
// ---------------------------------------------------------------------------

std::string World::caller_class(const PName& caller) const {
  auto it = object_by_pname_.find(caller);
  if (it == object_by_pname_.end()) return {};
  return objects_.at(it->second).spec.class_name;
}

SessionId World::open_session() {
  SessionId id = next_session_++;
  sessions_[id] = SessionState{};
  return id;
}

SessionTrace World::close_session(SessionId id) {
  run_until_idle();
  auto node = sessions_.extract(id);
  auto& s = node.mapped();
  if (s.complete && !s.error && !s.trace.failure) s.trace.outcome = SessionTrace::Outcome::Completed;
  return std::move(s.trace);
}

void World::emit_data(DataMessage msg, DomainId from) {
  ++metrics_.data_sent;
  if (auto s = sessions_.find(msg.session); s != sessions_.end()) {
    s->second.trace.entries.push_back(
        {now(), msg.caller, msg.caller_method, msg.callee, msg.callee_method, summarize(msg)});
  }
  queue_.schedule(0, DataArrival{from, std::move(msg), {from}});
}

void World::drop_data(const DataMessage& msg, DropCause cause, DomainId at) {
  ++metrics_.data_dropped;
  ++metrics_.drops_by_cause[cause];
  if (auto s = sessions_.find(msg.session); s != sessions_.end() && !s->second.trace.failure) {
    s->second.trace.failure = cause;
  }
  note("DROP " + summarize(msg) + " cause=" + std::string(to_string(cause)) + " at=" + domains_[at].name);
}

void World::on_data(DataArrival& ev) {
  auto& r = domains_.at(ev.router).router;
  if (config_.trace) note("DATA " + summarize(ev.msg) + " hop=" + r.name());
  auto decision = route_data(r, ev.msg);
  switch (decision.kind) {
    case ForwardDecision::Kind::Forward: {
      if (std::find(ev.visited.begin(), ev.visited.end(), decision.next) != ev.visited.end()) ++metrics_.data_loops;
      ev.visited.push_back(decision.next);
      queue_.schedule(decision.latency, DataArrival{decision.next, std::move(ev.msg), std::move(ev.visited)});
      break;
    }
    case ForwardDecision::Kind::LocalDeliver:
      queue_.schedule(0, HostArrival{decision.host, std::move(ev.msg), ev.visited.size() - 1});
      break;
    case ForwardDecision::Kind::Drop:
      drop_data(ev.msg, decision.cause, ev.router);
      break;
  }
}

void World::on_host(HostArrival& ev) {
  auto it = hosts_.find(ev.host);
  DomainId at = host_domain_.count(ev.host) ? host_domain_.at(ev.host) : 0;
  if (it == hosts_.end()) {
    drop_data(ev.msg, DropCause::NoSuchLocal, at);
    return;
  }
  auto& host = it->second;
  if (!host.policy.exchange.allows(caller_class(ev.msg.caller))) {
    drop_data(ev.msg, DropCause::ExchangeDenied, at);
    return;
  }
  ++metrics_.data_delivered;
  metrics_.data_hops_total += ev.hops;
  auto result = dispatch(host, ev.msg);
  if (auto s = sessions_.find(ev.msg.session); s != sessions_.end()) {
    if (result.session_complete) s->second.complete = true;
    if (result.session_error) s->second.error = true;
  }
  for (auto& m : result.emitted) emit_data(std::move(m), at);
}

SessionTrace World::send(const std::string& from_object, DataMessage msg) {
  auto& rec = record(from_object);
  if (!rec.pname || !rec.host_alive) throw Error(Errc::NotInstantiated, "object '" + from_object + "' has no live host");
  SessionId s = open_session();
  msg.session = s;
  emit_data(std::move(msg), host_domain_.at(*rec.pname));
  return close_session(s);
}

SessionTrace World::run_pull(const std::string& consumer, const PName& producer, std::size_t chunks,
                             const std::string& reply_to) {
  auto& rec = record(consumer);
  if (!rec.pname || !rec.host_alive) throw Error(Errc::NotInstantiated, "consumer '" + consumer + "' has no live host");
  note("PULL " + consumer + " <- " + format_pname(producer) + " chunks=" + std::to_string(chunks));
  DataMessage m;
  m.caller = *rec.pname;
  m.caller_method = std::string(kGetDataFrom);
  m.callee = producer;
  m.callee_method = std::string(kSendDataTo);
  m.reply_to_method = reply_to;
  m.payload = "chunks=" + std::to_string(chunks);
  m.hop_limit = config_.hop_limit;
  SessionId s = open_session();
  m.session = s;
  emit_data(std::move(m), host_domain_.at(*rec.pname));
  return close_session(s);
}

SessionTrace World::run_push(const std::string& producer, const PName& consumer, std::size_t chunks) {
  auto& rec = record(producer);
  if (!rec.pname || !rec.host_alive) throw Error(Errc::NotInstantiated, "producer '" + producer + "' has no live host");
  note("PUSH " + producer + " -> " + format_pname(consumer) + " chunks=" + std::to_string(chunks));
  SessionId s = open_session();
  DomainId from = host_domain_.at(*rec.pname);
  auto msgs = make_chunks(*rec.pname, std::string(kSendDataTo), consumer, std::string(kSinkDataFrom),
                          std::max<std::size_t>(chunks, 1), s);
  if (chunks == 0) msgs.clear();
  for (auto& m : msgs) {
    m.hop_limit = config_.hop_limit;
    emit_data(std::move(m), from);
  }
  if (chunks == 0) sessions_[s].complete = true;
  return close_session(s);
}

SessionTrace World::run_interactive(const std::string& a, const PName& b, std::size_t turns) {
  auto& rec = record(a);
  if (!rec.pname || !rec.host_alive) throw Error(Errc::NotInstantiated, "object '" + a + "' has no live host");
  note("INTERACTIVE " + a + " <-> " + format_pname(b) + " turns=" + std::to_string(turns));
  SessionId s = open_session();
  if (turns == 0) {
    sessions_[s].complete = true;
    return close_session(s);
  }
  DataMessage m;
  m.caller = *rec.pname;
  m.caller_method = "Talking";
  m.callee = b;
  m.callee_method = "Listening";
  m.reply_to_method = "Listening";
  m.payload = "ping 1/" + std::to_string(turns);
  m.hop_limit = config_.hop_limit;
  m.session = s;
  emit_data(std::move(m), host_domain_.at(*rec.pname));
  return close_session(s);
}

// ---------------------------------------------------------------------------
// Event loop
// ---------------------------------------------------------------------------

void World::process(Payload& payload) {
  std::visit(
      [this](auto& ev) {
        using T = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<T, XFindArrival>) {
          on_xfind(ev);
        } else if constexpr (std::is_same_v<T, ResultsArrival>) {
          on_results(ev);
        } else if constexpr (std::is_same_v<T, DataArrival>) {
          on_data(ev);
        } else if constexpr (std::is_same_v<T, HostArrival>) {
          on_host(ev);
        } else {
          on_deadline(ev);
        }
      },
      payload);
}

void World::run_until_idle() {
  while (auto ev = queue_.pop()) process(ev->payload);
}

void World::note(const std::string& line) {
  if (config_.trace) trace_.push_back("t=" + std::to_string(now()) + " " + line);
}

const Metrics& World::metrics() {
  metrics_.fib_inter_size = 0;
  metrics_.fib_intra_size = 0;
  for (const auto& d : domains_) {
    metrics_.fib_inter_size = std::max(metrics_.fib_inter_size, d.router.fib().inter_size());
    metrics_.fib_intra_size += d.router.fib().intra_size();
  }
  metrics_.irn_store_max = 0;
  for (const auto& [name, n] : networks_) {
    for (const auto& node : n.nodes) metrics_.irn_store_max = std::max(metrics_.irn_store_max, node.store.size());
  }
  return metrics_;
}

}  // namespace oon
