// Copyright 2026 The oon-sim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <doctest.h>

#include "oon/data_layer.hpp"
#include "oon/workload.hpp"

using namespace oon;

namespace {

DataMessage to(PName callee, std::string method = "SendDataTo") {
  DataMessage m;
  m.caller = PName{9, 9};
  m.caller_method = "GetDataFrom";
  m.callee = callee;
  m.callee_method = std::move(method);
  m.reply_to_method = "SinkDataFrom";
  return m;
}

ObjectClass file_class() { return ObjectClass("file", {{"path", AttributeKind::Text}}, {}, {"Ingest"}); }

}  // namespace

TEST_SUITE("data-layer") {

TEST_CASE("route_data examples") {
  Router r(0, "d0");
  auto if2 = r.add_link(1, 3);
  update_fib(r, 5, if2);
  auto m = to(PName{5, 7});
  auto d = route_data(r, m);
  CHECK(d.kind == ForwardDecision::Kind::Forward);
  CHECK(d.iface == if2);
  CHECK(d.next == 1);
  CHECK(m.cumulated_time == 3);
  CHECK(m.hop_limit == kDefaultHopLimit - 1);

  Router owner(1, "d1");
  owner.owned().insert(5);
  auto port = owner.add_host_port(PName{5, 7});
  owner.fib().intra[5][7] = port;
  auto m2 = to(PName{5, 7});
  d = route_data(owner, m2);
  CHECK(d.kind == ForwardDecision::Kind::LocalDeliver);
  CHECK(d.host == PName{5, 7});

  auto m3 = to(PName{5, 8});
  d = route_data(owner, m3);
  CHECK(d.kind == ForwardDecision::Kind::Drop);
  CHECK(d.cause == DropCause::NoSuchLocal);

  auto m4 = to(PName{6, 1});
  d = route_data(r, m4);
  CHECK(d.kind == ForwardDecision::Kind::Drop);
  CHECK(d.cause == DropCause::NoRoute);

  r.fib().default_route = if2;
  d = route_data(r, m4);
  CHECK(d.kind == ForwardDecision::Kind::Forward);

  auto m5 = to(PName{5, 7});
  m5.hop_limit = 0;
  d = route_data(r, m5);
  CHECK(d.cause == DropCause::HopLimitExceeded);
}

TEST_CASE("update_fib install and overwrite") {
  Router r(0, "d0");
  auto if2 = r.add_link(1, 1);
  auto if3 = r.add_link(2, 1);
  update_fib(r, 5, if2);
  auto m = to(PName{5, 1});
  CHECK(route_data(r, m).iface == if2);
  update_fib(r, 5, if3);
  m = to(PName{5, 1});
  CHECK(route_data(r, m).iface == if3);
  CHECK_THROWS_AS(update_fib(r, 5, 99), Error);
  auto host = r.add_host_port(PName{1, 1});
  try {
    update_fib(r, 5, host);
    FAIL("host port accepted as inter route");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownInterface);
  }
  for (GlobalId g = 10; g < 17; ++g) update_fib(r, g, if2);
  CHECK(r.fib().inter_size() == 8);
}

TEST_CASE("routing ignores every field but the callee") {
  Router r(0, "d0");
  std::vector<InterfaceId> links;
  for (DomainId p = 1; p <= 4; ++p) links.push_back(r.add_link(p, p));
  for (GlobalId g = 1; g <= 20; ++g) update_fib(r, g, links[g % links.size()]);
  r.owned().insert(21);
  for (LocalId l = 1; l <= 5; ++l) r.fib().intra[21][l] = r.add_host_port(PName{21, l});

  Rng rng(17);
  for (int i = 0; i < 500; ++i) {
    PName callee{1 + rng.below(22), 1 + rng.below(6)};
    auto base = to(callee);
    auto ref = base;
    auto want = route_data(r, ref);
    auto mutated = base;
    mutated.caller = PName{rng.next(), rng.next()};
    mutated.caller_method = "m" + std::to_string(rng.below(100));
    mutated.callee_method = "x" + std::to_string(rng.below(100));
    mutated.reply_to_method = "r" + std::to_string(rng.below(100));
    mutated.priority = static_cast<std::uint8_t>(rng.below(8));
    mutated.cumulated_time = rng.below(1000);
    mutated.payload = std::string(rng.below(20), 'p');
    mutated.flags = static_cast<std::uint8_t>(rng.below(4));
    mutated.session = rng.next();
    auto got = route_data(r, mutated);
    CHECK(got.kind == want.kind);
    CHECK(got.iface == want.iface);
    CHECK(got.cause == want.cause);
    CHECK(got.host == want.host);
  }
}

TEST_CASE("relay entries reach a migrated object and stop there") {
  Router anchor(0, "a");
  auto link = anchor.add_link(1, 2);
  anchor.owned().insert(3);
  anchor.fib().domain_routes[1] = link;
  anchor.fib().intra[3][4] = RelayTo{1};
  auto m = to(PName{3, 4});
  auto d = route_data(anchor, m);
  CHECK(d.kind == ForwardDecision::Kind::Forward);
  CHECK(m.relay_to == DomainId{1});

  Router host(1, "b");
  host.fib().intra[3][4] = host.add_host_port(PName{3, 4});
  d = route_data(host, m);
  CHECK(d.kind == ForwardDecision::Kind::LocalDeliver);
  CHECK_FALSE(m.relay_to.has_value());

  auto gone = to(PName{3, 5});
  gone.relay_to = 1;
  d = route_data(host, gone);
  CHECK(d.cause == DropCause::NoSuchLocal);
}

TEST_CASE("dispatch examples") {
  auto cls = file_class();
  auto file = ObjectHost::make(PName{1, 1}, cls);
  auto req = to(PName{1, 1});
  req.payload = "chunks=3";
  auto out = dispatch(file, req);
  REQUIRE(out.emitted.size() == 3);
  for (const auto& m : out.emitted) {
    CHECK(m.callee == req.caller);
    CHECK(m.callee_method == "SinkDataFrom");
    CHECK(m.caller_method == "SendDataTo");
  }
  CHECK(out.emitted.back().end_of_data());
  CHECK_FALSE(out.emitted.front().end_of_data());

  auto consumer = ObjectHost::make(PName{2, 2}, cls);
  auto chunk = out.emitted.front();
  auto sunk = dispatch(consumer, chunk);
  CHECK(sunk.emitted.empty());
  CHECK(consumer.buffers["SinkDataFrom"].size() == 1);
  CHECK_FALSE(sunk.session_complete);
  CHECK(dispatch(consumer, out.emitted.back()).session_complete);

  auto bad = to(PName{1, 1}, "NoSuchOp");
  auto err = dispatch(file, bad);
  CHECK(err.unknown_method);
  REQUIRE(err.emitted.size() == 1);
  CHECK(err.emitted[0].is_error());
  CHECK(err.emitted[0].callee_method == "SinkDataFrom");
  auto back = dispatch(consumer, err.emitted[0]);
  CHECK(back.session_error);

  auto err_to_missing = err.emitted[0];
  err_to_missing.callee = PName{1, 1};
  err_to_missing.callee_method = "Nope";
  CHECK(dispatch(file, err_to_missing).emitted.empty());

  req.reply_to_method = "Ingest";
  req.payload = "chunks=2";
  for (const auto& m : dispatch(file, req).emitted) CHECK(m.callee_method == "Ingest");
}

TEST_CASE("make_chunks") {
  auto none = make_chunks(PName{1, 1}, "SendDataTo", PName{2, 2}, "SinkDataFrom", 0, 1);
  REQUIRE(none.size() == 1);
  CHECK(none[0].payload.empty());
  CHECK(none[0].end_of_data());
  auto five = make_chunks(PName{1, 1}, "SendDataTo", PName{2, 2}, "SinkDataFrom", 5, 1);
  CHECK(five.size() == 5);
  CHECK(five[2].payload == "chunk 3/5");
}

TEST_CASE("handler kinds") {
  CHECK(parse_handler_kind("converse") == HandlerKind::Converse);
  CHECK(to_string(HandlerKind::SendChunks) == "send_chunks");
  CHECK_THROWS_AS(parse_handler_kind("dance"), Error);
  CHECK_THROWS_AS(ObjectHost::make(PName{1, 1}, file_class(), {{"Fly", HandlerKind::Sink}}), Error);
}

}
