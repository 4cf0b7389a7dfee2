// Copyright 2026 The oon-sim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "oon/data_layer.hpp"
#include "oon/event_queue.hpp"
#include "oon/information_layer.hpp"
#include "oon/metrics.hpp"
#include "oon/naming.hpp"
#include "oon/object_model.hpp"

namespace oon {

struct WorldConfig {
  PNameAssigner assigner = PNameAssigner::DataDomain;
  Tick deadline = 1000;      // per information-layer request
  Tick irn_latency = 1;      // per inter-IRN hop
  std::uint32_t hop_limit = kDefaultHopLimit;
  bool trace = true;
  std::string info_domain = "info";
};

enum class PublishOrder { BottomUp, TopDown };

std::string_view to_string(PublishOrder order);
PublishOrder parse_publish_order(std::string_view text);

struct ObjectSpec {
  std::string id;
  std::string class_name;
  std::map<std::string, Value> attributes;  // defining and extra description values
  std::map<std::string, HandlerKind> handlers;
  AccessPolicy policy;
  std::string home_domain;
  IrnId entry_irn = 0;
};

// One per-class namespace: its partition map and the IRNs serving it.
struct InfoNetwork {
  ObjectClass cls;
  PartitionMap map;
  std::vector<IrnNode> nodes;
};

struct Discovery {
  IName iname;
  std::vector<PName> pnames;
};

struct DiscoverResult {
  std::vector<Discovery> matches;  // sorted by normalized i-name keys
  RequestState state = RequestState::Complete;
  bool partial = false;
};

struct AuditReport {
  std::vector<std::pair<IName, PName>> dangling;  // form pointers with no live host
  std::vector<PName> orphans;                     // hosts no stored form points to
};

class World {
 public:
  explicit World(WorldConfig config = {});

  const WorldConfig& config() const noexcept { return config_; }
  Tick now() const noexcept { return queue_.now(); }

  // -- topology -------------------------------------------------------------
  DomainId add_domain(const std::string& name);
  void add_link(const std::string& a, const std::string& b, Tick latency);
  void add_class(ObjectClass cls, SegmentCuts cuts, std::size_t irn_count);

  bool has_domain(const std::string& name) const { return domain_ids_.contains(name); }
  DomainId domain_id(const std::string& name) const;
  const Router& router(const std::string& domain) const;
  std::vector<const Router*> routers() const;
  const InfoNetwork& network(const std::string& class_name) const;
  std::vector<std::string> class_names() const;
  const Authority& authority() const noexcept { return authority_; }

  // -- lifecycle -------------------------------------------------------------
  void add_object(ObjectSpec spec);
  const ObjectSpec& object_spec(const std::string& object) const;
  std::vector<std::string> object_ids() const;

  PName instantiate(const std::string& object);
  void publish(const std::string& object, PublishOrder order);
  DiscoverResult discover(const Query& query, IrnId entry, const RequesterSummary& requester);
  void migrate(const PName& pname, const std::string& to_domain);
  // Modify with new non-defining description values.
  void update(const std::string& object, const std::map<std::string, Value>& attributes);
  // Delete at the information layer first, then tear the host down.
  void remove(const std::string& object);
  // Tears the host down without touching the informational form.
  void kill_host(const std::string& object);
  AuditReport audit_consistency();

  std::optional<PName> pname_of(const std::string& object) const;
  bool is_published(const std::string& object) const;
  std::optional<std::string> host_domain(const PName& pname) const;
  RequesterSummary requester_for(const std::string& object) const;
  InformationalForm build_form(const std::string& object) const;

  // -- information layer -------------------------------------------------------
  struct RequestOutcome {
    RequestId id = 0;
    PendingRequest state;
  };
  RequestOutcome request(const std::string& class_name, IrnId entry, XFindAction action,
                         std::variant<Query, InformationalForm> payload, RequesterSummary requester);

  // -- data layer --------------------------------------------------------------
  SessionTrace run_pull(const std::string& consumer, const PName& producer, std::size_t chunks,
                        const std::string& reply_to = std::string(kSinkDataFrom));
  SessionTrace run_push(const std::string& producer, const PName& consumer, std::size_t chunks);
  SessionTrace run_interactive(const std::string& a, const PName& b, std::size_t turns);
  // Sends one arbitrary message from a hosted object and runs to quiescence.
  SessionTrace send(const std::string& from_object, DataMessage msg);

  // -- observation ---------------------------------------------------------------
  const Metrics& metrics();
  const std::vector<std::string>& trace() const noexcept { return trace_; }
  void note(const std::string& line);  // appends "t=<tick> <line>" to the trace
  void run_until_idle();

 private:
  struct Domain {
    DomainId id;
    std::string name;
    Router router;
    std::optional<LocalAllocator> allocator;
  };

  struct ObjectRecord {
    ObjectSpec spec;
    std::optional<PName> pname;
    std::optional<PName> preminted;
    bool published = false;
    bool host_alive = false;
  };

  struct SessionState {
    SessionTrace trace;
    bool complete = false;
    bool error = false;
  };

  struct XFindArrival {
    std::string cls;
    XFindMessage msg;
  };
  struct ResultsArrival {
    std::string cls;
    ResultsMessage msg;
    IrnId at;
  };
  struct DataArrival {
    DomainId router;
    DataMessage msg;
    std::vector<DomainId> visited;
  };
  struct HostArrival {
    PName host;
    DataMessage msg;
    std::size_t hops;
  };
  struct RequestDeadline {
    std::string cls;
    IrnId entry;
    RequestId id;
  };
  using Payload = std::variant<XFindArrival, ResultsArrival, DataArrival, HostArrival, RequestDeadline>;

  Domain& domain(DomainId id) { return domains_.at(id); }
  Domain& domain(const std::string& name);
  ObjectRecord& record(const std::string& object);
  const ObjectRecord& record(const std::string& object) const;
  InfoNetwork& net(const std::string& class_name);

  PName mint_for(const ObjectRecord& rec);
  void recompute_domain_routes();
  void reinstall_inter(GlobalId g);
  void host_up(ObjectRecord& rec, const PName& pname, DomainId where);
  void host_down(const PName& pname, bool clean);
  std::string caller_class(const PName& caller) const;

  void process(Payload& payload);
  void on_xfind(XFindArrival& ev);
  void on_results(ResultsArrival& ev);
  void on_data(DataArrival& ev);
  void on_host(HostArrival& ev);
  void on_deadline(const RequestDeadline& ev);
  void send_results(const std::string& cls, ResultsMessage r);
  void emit_data(DataMessage msg, DomainId from);
  void drop_data(const DataMessage& msg, DropCause cause, DomainId at);
  SessionId open_session();
  SessionTrace close_session(SessionId id);

  WorldConfig config_;
  Authority authority_;
  std::optional<LocalAllocator> info_allocator_;
  std::vector<Domain> domains_;
  std::map<std::string, DomainId> domain_ids_;
  std::vector<std::vector<std::pair<DomainId, Tick>>> adjacency_;
  std::map<std::string, InfoNetwork> networks_;
  std::map<std::string, ObjectRecord> objects_;
  std::map<PName, ObjectHost> hosts_;
  std::map<PName, DomainId> host_domain_;
  std::map<PName, std::string> object_by_pname_;
  std::map<GlobalId, DomainId> anchor_;
  std::map<GlobalId, std::set<PName>> live_by_global_;
  std::map<RequestId, EventQueue<Payload>::Key> deadlines_;
  std::map<SessionId, SessionState> sessions_;
  EventQueue<Payload> queue_;
  Metrics metrics_;
  std::vector<std::string> trace_;
  RequestId next_request_ = 1;
  SessionId next_session_ = 1;
};

}  // namespace oon
