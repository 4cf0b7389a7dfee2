// Copyright 2026 The oon-sim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "oon/data_layer.hpp"

#include <algorithm>
#include <cstdio>

namespace oon {

std::string summarize(const DataMessage& msg) {
  return format_pname(msg.caller) + "." + msg.caller_method + " -> " + format_pname(msg.callee) + "." +
         msg.callee_method + " reply=" + msg.reply_to_method;
}

std::size_t ForwardingTable::intra_size() const {
  std::size_t n = 0;
  for (const auto& [g, entries] : intra) n += entries.size();
  return n;
}

InterfaceId Router::add_link(DomainId peer, Tick latency) {
  InterfaceId id = next_iface_++;
  interfaces_[id] = Interface{Interface::Kind::Link, peer, latency, {}};
  return id;
}

InterfaceId Router::add_host_port(const PName& host) {
  InterfaceId id = next_iface_++;
  interfaces_[id] = Interface{Interface::Kind::Host, 0, 0, host};
  return id;
}

void Router::remove_interface(InterfaceId iface) { interfaces_.erase(iface); }

const Interface* Router::interface(InterfaceId iface) const {
  auto it = interfaces_.find(iface);
  return it == interfaces_.end() ? nullptr : &it->second;
}

std::optional<InterfaceId> Router::link_to(DomainId peer) const {
  for (const auto& [id, iface] : interfaces_) {
    if (iface.kind == Interface::Kind::Link && iface.peer == peer) return id;
  }
  return std::nullopt;
}

std::optional<InterfaceId> Router::host_port(const PName& host) const {
  for (const auto& [id, iface] : interfaces_) {
    if (iface.kind == Interface::Kind::Host && iface.host == host) return id;
  }
  return std::nullopt;
}

std::string_view to_string(DropCause cause) {
  switch (cause) {
    case DropCause::NoRoute: return "no_route";
    case DropCause::NoSuchLocal: return "no_such_local";
    case DropCause::HopLimitExceeded: return "hop_limit";
    case DropCause::ExchangeDenied: return "exchange_denied";
  }
  return "?";
}

namespace {

ForwardDecision drop(DropCause cause) {
  ForwardDecision d;
  d.kind = ForwardDecision::Kind::Drop;
  d.cause = cause;
  return d;
}

ForwardDecision forward(const Router& router, InterfaceId iface, DataMessage& msg) {
  const Interface* port = router.interface(iface);
  if (port == nullptr) return drop(DropCause::NoRoute);
  if (port->kind == Interface::Kind::Host) {
    ForwardDecision d;
    d.kind = ForwardDecision::Kind::LocalDeliver;
    d.iface = iface;
    d.host = port->host;
    return d;
  }
  if (msg.hop_limit == 0) return drop(DropCause::HopLimitExceeded);
  --msg.hop_limit;
  msg.cumulated_time += port->latency;
  ForwardDecision d;
  d.kind = ForwardDecision::Kind::Forward;
  d.iface = iface;
  d.next = port->peer;
  d.latency = port->latency;
  return d;
}

ForwardDecision relay(const Router& router, DomainId target, DataMessage& msg) {
  auto it = router.fib().domain_routes.find(target);
  if (it == router.fib().domain_routes.end()) return drop(DropCause::NoRoute);
  msg.relay_to = target;
  return forward(router, it->second, msg);
}

}  // namespace

ForwardDecision route_data(const Router& router, DataMessage& msg) {
  const auto& fib = router.fib();
  const GlobalId g = msg.callee.global_id;
  const LocalId l = msg.callee.local_id;

  if (msg.relay_to && *msg.relay_to != router.id()) return relay(router, *msg.relay_to, msg);
  const bool relayed_here = msg.relay_to.has_value();
  msg.relay_to.reset();

  if (auto gi = fib.intra.find(g); gi != fib.intra.end()) {
    if (auto li = gi->second.find(l); li != gi->second.end()) {
      if (const auto* iface = std::get_if<InterfaceId>(&li->second)) return forward(router, *iface, msg);
      DomainId target = std::get<RelayTo>(li->second).domain;
      if (target != router.id() && !relayed_here) return relay(router, target, msg);
      return drop(DropCause::NoSuchLocal);
    }
  }
  if (relayed_here || router.owned().contains(g)) return drop(DropCause::NoSuchLocal);
  if (auto it = fib.inter.find(g); it != fib.inter.end()) return forward(router, it->second, msg);
  if (fib.default_route) return forward(router, *fib.default_route, msg);
  return drop(DropCause::NoRoute);
}

void update_fib(Router& router, GlobalId global_id, InterfaceId iface) {
  const Interface* port = router.interface(iface);
  if (port == nullptr || port->kind != Interface::Kind::Link) {
    throw Error(Errc::UnknownInterface, "router '" + router.name() + "' has no link interface " + std::to_string(iface));
  }
  router.fib().inter[global_id] = iface;
}

// ---------------------------------------------------------------------------

std::string_view to_string(HandlerKind kind) {
  switch (kind) {
    case HandlerKind::Sink: return "sink";
    case HandlerKind::SendChunks: return "send_chunks";
    case HandlerKind::Converse: return "converse";
    case HandlerKind::Ignore: return "ignore";
  }
  return "?";
}

HandlerKind parse_handler_kind(std::string_view text) {
  if (text == "sink") return HandlerKind::Sink;
  if (text == "send_chunks") return HandlerKind::SendChunks;
  if (text == "converse") return HandlerKind::Converse;
  if (text == "ignore") return HandlerKind::Ignore;
  throw Error(Errc::ValidationError, "unknown handler kind '" + std::string(text) + "'");
}

ObjectHost ObjectHost::make(PName pname, const ObjectClass& cls,
                            const std::map<std::string, HandlerKind>& overrides, AccessPolicy policy) {
  ObjectHost host;
  host.pname = pname;
  host.class_name = cls.name();
  host.methods = cls.methods();
  host.policy = std::move(policy);
  for (const auto& m : host.methods) {
    if (m == kSendDataTo) {
      host.handlers[m] = HandlerKind::SendChunks;
    } else if (m == "Talking" || m == "Listening") {
      host.handlers[m] = HandlerKind::Converse;
    } else {
      host.handlers[m] = HandlerKind::Sink;
    }
  }
  for (const auto& [m, kind] : overrides) {
    if (!cls.has_method(m)) {
      throw Error(Errc::ValidationError, "class '" + cls.name() + "' has no method '" + m + "'");
    }
    host.handlers[m] = kind;
  }
  return host;
}

std::optional<HandlerKind> ObjectHost::handler_for(std::string_view method) const {
  if (std::find(methods.begin(), methods.end(), method) == methods.end()) return std::nullopt;
  auto it = handlers.find(std::string(method));
  if (it == handlers.end()) return std::nullopt;
  return it->second;
}

std::vector<DataMessage> make_chunks(const PName& from, const std::string& from_method,
                                     const PName& to, const std::string& to_method,
                                     std::size_t count, SessionId session, std::uint8_t priority) {
  std::vector<DataMessage> out;
  const std::size_t n = std::max<std::size_t>(count, 1);
  for (std::size_t i = 1; i <= n; ++i) {
    DataMessage m;
    m.caller = from;
    m.caller_method = from_method;
    m.callee = to;
    m.callee_method = to_method;
    m.reply_to_method = from_method;
    m.priority = priority;
    m.session = session;
    if (count > 0) m.payload = "chunk " + std::to_string(i) + "/" + std::to_string(count);
    if (i == n) m.flags |= kEndOfData;
    out.push_back(std::move(m));
  }
  return out;
}

namespace {

bool parse_turn(const std::string& payload, std::string_view verb, std::size_t& turn, std::size_t& total) {
  if (!payload.starts_with(verb)) return false;
  unsigned long t = 0;
  unsigned long n = 0;
  if (std::sscanf(payload.c_str() + verb.size(), " %lu/%lu", &t, &n) != 2) return false;
  turn = t;
  total = n;
  return true;
}

std::size_t parse_chunk_request(const std::string& payload) {
  constexpr std::string_view kKey = "chunks=";
  if (!payload.starts_with(kKey)) return 1;
  try {
    return static_cast<std::size_t>(parse_integer(std::string_view(payload).substr(kKey.size())));
  } catch (const Error&) {
    return 1;
  }
}

DataMessage reply_to(const ObjectHost& host, const DataMessage& msg, std::string from_method,
                     std::string reply_method, std::string payload) {
  DataMessage r;
  r.caller = host.pname;
  r.caller_method = std::move(from_method);
  r.callee = msg.caller;
  r.callee_method = msg.reply_to_method;
  r.reply_to_method = std::move(reply_method);
  r.priority = msg.priority;
  r.payload = std::move(payload);
  r.session = msg.session;
  return r;
}

}  // namespace

DispatchResult dispatch(ObjectHost& host, const DataMessage& msg) {
  DispatchResult out;
  auto handler = host.handler_for(msg.callee_method);
  if (!handler) {
    out.unknown_method = true;
    if (!msg.is_error()) {
      auto r = reply_to(host, msg, msg.callee_method, msg.callee_method, "error: unknown method " + msg.callee_method);
      r.flags = kErrorReply | kEndOfData;
      out.emitted.push_back(std::move(r));
    }
    return out;
  }

  switch (*handler) {
    case HandlerKind::Ignore:
      break;
    case HandlerKind::Sink:
      host.buffers[msg.callee_method].push_back(msg.payload);
      if (msg.is_error()) out.session_error = true;
      if (msg.end_of_data() || msg.is_error()) out.session_complete = true;
      break;
    case HandlerKind::SendChunks:
      for (auto& m : make_chunks(host.pname, msg.callee_method, msg.caller, msg.reply_to_method,
                                 parse_chunk_request(msg.payload), msg.session, msg.priority)) {
        out.emitted.push_back(std::move(m));
      }
      break;
    case HandlerKind::Converse: {
      host.buffers[msg.callee_method].push_back(msg.payload);
      const std::string speak = host.handler_for("Talking") ? "Talking" : msg.callee_method;
      std::size_t turn = 0;
      std::size_t total = 0;
      if (parse_turn(msg.payload, "ping", turn, total)) {
        out.emitted.push_back(reply_to(host, msg, speak, msg.callee_method,
                                       "pong " + std::to_string(turn) + "/" + std::to_string(total)));
      } else if (parse_turn(msg.payload, "pong", turn, total)) {
        if (turn < total) {
          out.emitted.push_back(reply_to(host, msg, speak, msg.callee_method,
                                         "ping " + std::to_string(turn + 1) + "/" + std::to_string(total)));
        } else {
          out.session_complete = true;
        }
      } else if (msg.is_error()) {
        out.session_error = true;
        out.session_complete = true;
      }
      break;
    }
  }
  return out;
}

}  // namespace oon
