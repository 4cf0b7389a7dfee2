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
#include "oon/information_layer.hpp"
#include "oon/naming.hpp"
#include "oon/object_model.hpp"

namespace oon {

using DomainId = std::uint32_t;
using InterfaceId = std::uint32_t;
using SessionId = std::uint64_t;

// ---------------------------------------------------------------------------
// Data message
// ---------------------------------------------------------------------------

inline constexpr std::uint8_t kEndOfData = 0x1;
inline constexpr std::uint8_t kErrorReply = 0x2;

struct DataMessage {
  PName caller;
  std::string caller_method;
  PName callee;
  std::string callee_method;
  std::string reply_to_method;
  std::uint8_t priority = 0;
  Tick cumulated_time = 0;
  std::string payload;
  std::uint32_t hop_limit = kDefaultHopLimit;

  // Transport annotations. None of these take part in routing decisions
  // except relay_to, which only the relaying routers set and clear.
  std::uint8_t flags = 0;
  SessionId session = 0;
  std::optional<DomainId> relay_to;

  bool end_of_data() const { return (flags & kEndOfData) != 0; }
  bool is_error() const { return (flags & kErrorReply) != 0; }
};

// "<caller-pn>.<m> -> <callee-pn>.<m> reply=<m>"
std::string summarize(const DataMessage& msg);

// ---------------------------------------------------------------------------
// Routers
// ---------------------------------------------------------------------------

struct Interface {
  enum class Kind { Link, Host };
  Kind kind = Kind::Link;
  DomainId peer = 0;  // Link
  Tick latency = 1;   // Link
  PName host;         // Host
};

// Intra-domain entry: a local host port, or a relay toward the domain that
// currently hosts a migrated object under this domain's prefix.
struct RelayTo {
  DomainId domain;
  friend bool operator==(const RelayTo&, const RelayTo&) = default;
};
using IntraRoute = std::variant<InterfaceId, RelayTo>;

struct ForwardingTable {
  std::map<GlobalId, InterfaceId> inter;
  std::map<GlobalId, std::map<LocalId, IntraRoute>> intra;
  std::optional<InterfaceId> default_route;
  std::map<DomainId, InterfaceId> domain_routes;  // topology underlay, used for relays only

  std::size_t inter_size() const { return inter.size(); }
  std::size_t intra_size() const;
};

class Router {
 public:
  Router(DomainId id, std::string name) : id_(id), name_(std::move(name)) {}

  DomainId id() const noexcept { return id_; }
  const std::string& name() const noexcept { return name_; }

  InterfaceId add_link(DomainId peer, Tick latency);
  InterfaceId add_host_port(const PName& host);
  void remove_interface(InterfaceId iface);
  const Interface* interface(InterfaceId iface) const;
  std::optional<InterfaceId> link_to(DomainId peer) const;
  std::optional<InterfaceId> host_port(const PName& host) const;
  const std::map<InterfaceId, Interface>& interfaces() const noexcept { return interfaces_; }

  ForwardingTable& fib() noexcept { return fib_; }
  const ForwardingTable& fib() const noexcept { return fib_; }

  // GlobalIds this domain is authoritative for (their intra table lives here).
  std::set<GlobalId>& owned() noexcept { return owned_; }
  const std::set<GlobalId>& owned() const noexcept { return owned_; }

 private:
  DomainId id_;
  std::string name_;
  InterfaceId next_iface_ = 0;
  std::map<InterfaceId, Interface> interfaces_;
  ForwardingTable fib_;
  std::set<GlobalId> owned_;
};

enum class DropCause { NoRoute, NoSuchLocal, HopLimitExceeded, ExchangeDenied };

std::string_view to_string(DropCause cause);

struct ForwardDecision {
  enum class Kind { Forward, LocalDeliver, Drop };
  Kind kind = Kind::Drop;
  InterfaceId iface = 0;
  DomainId next = 0;   // Forward
  Tick latency = 0;    // Forward
  PName host;          // LocalDeliver
  DropCause cause = DropCause::NoRoute;  // Drop
};

// Forwarding on the callee p-name only. On Forward the message's hop_limit
// is decremented and the link latency added to cumulated_time.
ForwardDecision route_data(const Router& router, DataMessage& msg);

// Installs or overwrites the inter-domain route for a GlobalId.
// Throws UnknownInterface unless `iface` is a link of the router.
void update_fib(Router& router, GlobalId global_id, InterfaceId iface);

// ---------------------------------------------------------------------------
// Hosted objects
// ---------------------------------------------------------------------------

// Scripted method behaviors.
//   sink        buffer the payload; end-of-data completes the session
//   send_chunks reply with N chunks to the caller's reply-to method, where
//               the request payload reads "chunks=N"
//   converse    answer "ping t/T" with "pong t/T"; on "pong t/T" send the
//               next ping until t == T
//   ignore      accept and do nothing
enum class HandlerKind { Sink, SendChunks, Converse, Ignore };

std::string_view to_string(HandlerKind kind);
HandlerKind parse_handler_kind(std::string_view text);

struct ObjectHost {
  PName pname;
  std::string class_name;
  std::vector<std::string> methods;
  std::map<std::string, HandlerKind> handlers;
  AccessPolicy policy;
  std::map<std::string, std::vector<std::string>> buffers;

  // Defaults: SendDataTo sends chunks, Talking and Listening converse,
  // everything else sinks.
  static ObjectHost make(PName pname, const ObjectClass& cls,
                         const std::map<std::string, HandlerKind>& overrides = {},
                         AccessPolicy policy = {});

  std::optional<HandlerKind> handler_for(std::string_view method) const;
};

struct DispatchResult {
  std::vector<DataMessage> emitted;
  bool session_complete = false;
  bool session_error = false;
  bool unknown_method = false;
};

// Runs the callee method's handler. Replies go to msg.caller at
// msg.reply_to_method. An unknown method yields one error reply (never in
// answer to another error reply).
DispatchResult dispatch(ObjectHost& host, const DataMessage& msg);

// `count` chunks from one method to another; zero chunks still produce one
// empty end-of-data message. The last message carries kEndOfData.
std::vector<DataMessage> make_chunks(const PName& from, const std::string& from_method,
                                     const PName& to, const std::string& to_method,
                                     std::size_t count, SessionId session, std::uint8_t priority = 0);

// ---------------------------------------------------------------------------
// Sessions
// ---------------------------------------------------------------------------

struct SessionTrace {
  struct Entry {
    Tick tick = 0;
    PName from;
    std::string from_method;
    PName to;
    std::string to_method;
    std::string summary;
  };
  enum class Outcome { Completed, Failed };

  std::vector<Entry> entries;
  Outcome outcome = Outcome::Failed;
  std::optional<DropCause> failure;

  bool completed() const { return outcome == Outcome::Completed; }
};

}  // namespace oon
