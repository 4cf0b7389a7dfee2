// Copyright 2026 The oon-sim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <doctest.h>

#include <set>

#include "oon/workload.hpp"
#include "oon/world.hpp"

using namespace oon;

namespace {

ObjectClass book_class() {
  return ObjectClass("book", {{"title", AttributeKind::Text}, {"author", AttributeKind::Text}},
                     {{"year", AttributeKind::Integer}}, {"Ingest"});
}

ObjectClass person_class() {
  return ObjectClass("person", {{"name", AttributeKind::Text}}, {}, {"Talking", "Listening"});
}

// d1 - d2 - d3 in a line, plus an isolated d4.
World make_world(WorldConfig cfg = {}) {
  World w(cfg);
  for (const auto* d : {"d1", "d2", "d3", "d4"}) w.add_domain(d);
  w.add_link("d1", "d2", 2);
  w.add_link("d2", "d3", 3);
  w.add_class(book_class(), SegmentCuts::uniform_text(2, 2), 4);
  w.add_class(person_class(), SegmentCuts::uniform_text(1, 2), 2);
  return w;
}

void add_book(World& w, const std::string& id, const std::string& title, const std::string& author,
              const std::string& domain, AccessPolicy policy = {}) {
  w.add_object(ObjectSpec{id, "book", {{"title", title}, {"author", author}}, {}, policy, domain, 0});
}

void add_person(World& w, const std::string& id, const std::string& name, const std::string& domain) {
  w.add_object(ObjectSpec{id, "person", {{"name", name}}, {}, {}, domain, 0});
}

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::ValidationError;
}

Query by_author(const std::string& a) { return Query{"book", {{"author", Equals{a}}}}; }

void check_invariants(World& w) {
  const auto& m = w.metrics();
  CHECK(m.data_sent == m.data_delivered + m.data_dropped);
  CHECK(m.routing_updates == 0);
  CHECK(m.hop_bound_violations == 0);
  CHECK(m.greedy_violations == 0);
  CHECK(m.reverse_route_violations == 0);
  CHECK(m.data_loops == 0);
  CHECK(m.fib_inter_size <= w.authority().allocation_count());
}

}  // namespace

TEST_SUITE("lifecycle") {

TEST_CASE("instantiate mints per assigner") {
  auto w = make_world();
  add_book(w, "b1", "foundation", "asimov", "d1");
  add_book(w, "b2", "dune", "herbert", "d1");
  add_book(w, "b3", "emma", "austen", "d9");
  auto p1 = w.instantiate("b1");
  auto p2 = w.instantiate("b2");
  CHECK(p1 != p2);
  CHECK(p1.global_id == p2.global_id);
  CHECK(w.authority().allocations().at("d1").contains(p1.global_id));
  CHECK(code_of([&] { w.instantiate("b3"); }) == Errc::UnknownDomain);
  CHECK(code_of([&] { w.instantiate("b1"); }) == Errc::AlreadyInstantiated);
  CHECK(code_of([&] { w.instantiate("nope"); }) == Errc::UnknownObject);
  CHECK(w.router("d1").fib().intra.at(p1.global_id).size() == 2);
  CHECK(w.router("d2").fib().inter.contains(p1.global_id));
  CHECK(w.router("d3").fib().inter.contains(p1.global_id));

  WorldConfig info;
  info.assigner = PNameAssigner::InfoDomain;
  auto wi = make_world(info);
  add_book(wi, "b1", "foundation", "asimov", "d2");
  auto p = wi.instantiate("b1");
  CHECK(wi.authority().allocations().at("info").contains(p.global_id));
}

TEST_CASE("publish bottom up then find") {
  auto w = make_world();
  add_book(w, "b1", "Foundation", "Asimov", "d1");
  CHECK(code_of([&] { w.publish("b1", PublishOrder::BottomUp); }) == Errc::NotInstantiated);
  auto p = w.instantiate("b1");
  w.publish("b1", PublishOrder::BottomUp);
  auto res = w.discover(exact_query(IName{"book", {std::string("foundation"), std::string("asimov")}}, book_class()), 3, {});
  REQUIRE(res.matches.size() == 1);
  CHECK(res.matches[0].pnames == std::vector<PName>{p});
  CHECK(code_of([&] { w.publish("b1", PublishOrder::BottomUp); }) == Errc::AlreadyPublished);

  add_book(w, "twin", "FOUNDATION", "asimov", "d2");
  w.instantiate("twin");
  CHECK(code_of([&] { w.publish("twin", PublishOrder::BottomUp); }) == Errc::AlreadyPublished);
  check_invariants(w);
}

TEST_CASE("publish top down fills the relationship") {
  for (auto assigner : {PNameAssigner::DataDomain, PNameAssigner::InfoDomain}) {
    WorldConfig cfg;
    cfg.assigner = assigner;
    auto w = make_world(cfg);
    add_book(w, "b1", "dune", "herbert", "d3");
    add_person(w, "reader", "ann", "d1");
    w.instantiate("reader");
    w.publish("b1", PublishOrder::TopDown);
    auto pn = w.pname_of("b1");
    REQUIRE(pn.has_value());
    auto res = w.discover(by_author("herbert"), 0, {});
    REQUIRE(res.matches.size() == 1);
    CHECK(res.matches[0].pnames == std::vector<PName>{*pn});
    CHECK(w.run_pull("reader", res.matches[0].pnames[0], 2).completed());
    CHECK(w.audit_consistency().dangling.empty());
    check_invariants(w);
  }
}

TEST_CASE("discover examples") {
  auto w = make_world();
  CHECK(w.discover(Query{"book", {}}, 0, {}).matches.empty());
  add_book(w, "b1", "foundation", "Asimov", "d1");
  add_book(w, "b2", "i robot", "asimov", "d2");
  add_book(w, "b3", "rendezvous", "clarke", "d3");
  std::vector<InformationalForm> forms;
  for (const auto* id : {"b1", "b2", "b3"}) {
    w.instantiate(id);
    w.publish(id, PublishOrder::BottomUp);
    forms.push_back(w.build_form(id));
  }
  auto res = w.discover(by_author("asimov"), 2, {});
  REQUIRE(res.matches.size() == 2);
  CHECK(res.matches[0].iname.values[0] == Value{std::string("foundation")});
  CHECK(res.matches[1].iname.values[0] == Value{std::string("i robot")});

  Query loose{"book", {{"title", AnyValue{}}}};
  auto all = w.discover(loose, 1, {});
  auto oracle = oracle_find(forms, loose, book_class(), {});
  REQUIRE(all.matches.size() == oracle.size());
  for (std::size_t i = 0; i < oracle.size(); ++i) CHECK(all.matches[i].iname == oracle[i].iname);
  check_invariants(w);
}

TEST_CASE("view policy hides forms from other classes") {
  auto w = make_world();
  AccessPolicy p;
  p.view = AccessRule::allow_classes({"person"});
  add_book(w, "secret", "diary", "anne", "d1", p);
  add_person(w, "ann", "ann", "d1");
  w.instantiate("secret");
  w.publish("secret", PublishOrder::BottomUp);
  w.instantiate("ann");
  CHECK(w.discover(by_author("anne"), 0, {"sensor", "s", 0}).matches.empty());
  CHECK(w.discover(by_author("anne"), 0, w.requester_for("ann")).matches.size() == 1);
}

TEST_CASE("migration keeps the p-name routable without rediscovery") {
  auto w = make_world();
  add_book(w, "b1", "foundation", "asimov", "d1");
  add_book(w, "b2", "dune", "herbert", "d1");
  add_person(w, "reader", "ann", "d3");
  for (const auto* id : {"b1", "b2", "reader"}) w.instantiate(id);
  w.publish("b1", PublishOrder::BottomUp);
  auto found = w.discover(by_author("asimov"), 0, w.requester_for("reader"));
  REQUIRE(found.matches.size() == 1);
  PName before = found.matches[0].pnames[0];
  CHECK(w.run_pull("reader", before, 1).completed());

  auto xfind = w.metrics().xfind_messages;
  auto results = w.metrics().results_messages;
  w.migrate(before, "d2");
  CHECK(w.host_domain(before) == "d2");
  CHECK(w.pname_of("b1") == before);
  auto trace = w.run_pull("reader", before, 3);
  CHECK(trace.completed());
  CHECK(trace.entries.size() == 4);
  CHECK(w.metrics().xfind_messages == xfind);
  CHECK(w.metrics().results_messages == results);

  // The object left behind under the same prefix is still reachable.
  CHECK(w.run_pull("reader", *w.pname_of("b2"), 1).completed());
  w.migrate(before, "d2");
  CHECK(w.run_pull("reader", before, 1).completed());
  w.migrate(before, "d1");
  CHECK(w.run_pull("reader", before, 1).completed());
  CHECK(w.run_pull("reader", *w.pname_of("b2"), 1).completed());
  CHECK(w.audit_consistency().dangling.empty());

  CHECK(code_of([&] { w.migrate(PName{77, 1}, "d2"); }) == Errc::UnknownObject);
  CHECK(code_of([&] { w.migrate(before, "mars"); }) == Errc::UnknownDomain);
  check_invariants(w);
}

TEST_CASE("migrating an unpublished object touches only the data layer") {
  auto w = make_world();
  add_book(w, "b1", "x", "y", "d1");
  add_person(w, "r", "r", "d3");
  auto p = w.instantiate("b1");
  w.instantiate("r");
  w.migrate(p, "d3");
  CHECK_FALSE(w.is_published("b1"));
  CHECK(w.metrics().xfind_messages == 0);
  CHECK(w.run_pull("r", p, 1).completed());
}

TEST_CASE("audit reports dangling pointers and orphans") {
  auto w = make_world();
  for (int i = 0; i < 5; ++i) {
    auto id = "b" + std::to_string(i);
    add_book(w, id, "t" + std::to_string(i), "a", "d1");
    w.instantiate(id);
    w.publish(id, PublishOrder::BottomUp);
  }
  auto r = w.audit_consistency();
  CHECK(r.dangling.empty());
  CHECK(r.orphans.empty());

  w.kill_host("b2");
  r = w.audit_consistency();
  CHECK(r.dangling.size() == 1);

  add_book(w, "only", "zz", "zz", "d2");
  w.instantiate("only");
  r = w.audit_consistency();
  CHECK(r.orphans.size() == 1);
  CHECK(w.metrics().dangling_pointers == 1);

  w.remove("b3");
  CHECK(w.audit_consistency().dangling.size() == 1);
  CHECK(code_of([&] { w.remove("b3"); }) == Errc::NotPublished);
}

TEST_CASE("update modifies the stored form") {
  auto w = make_world();
  add_book(w, "b1", "x", "y", "d1");
  w.instantiate("b1");
  w.publish("b1", PublishOrder::BottomUp);
  w.update("b1", {{"year", std::uint64_t{1999}}});
  Query q{"book", {{"year", Equals{std::uint64_t{1999}}}}};
  CHECK(w.discover(q, 0, {}).matches.size() == 1);
  CHECK(code_of([&] { w.update("b1", {{"title", std::string("z")}}); }) == Errc::ValidationError);
  CHECK(code_of([&] { w.update("b1", {{"colour", std::string("z")}}); }) == Errc::UnknownAttribute);
}

TEST_CASE("hop limit yields partial discovery") {
  WorldConfig cfg;
  cfg.hop_limit = 0;
  auto w = make_world(cfg);
  auto res = w.discover(Query{"book", {}}, 0, {});
  CHECK(res.partial);
  CHECK(res.state == RequestState::Complete);
}

}

TEST_SUITE("data-layer") {

TEST_CASE("pull session shape") {
  auto w = make_world();
  add_book(w, "file", "f", "a", "d3");
  add_person(w, "reader", "r", "d1");
  auto file = w.instantiate("file");
  w.instantiate("reader");
  for (std::size_t k : {1, 3, 10}) {
    auto t = w.run_pull("reader", file, k);
    CHECK(t.completed());
    REQUIRE(t.entries.size() == 1 + k);
    CHECK(t.entries[0].to_method == "SendDataTo");
    CHECK(t.entries[0].from_method == "GetDataFrom");
    for (std::size_t i = 1; i < t.entries.size(); ++i) {
      CHECK(t.entries[i].to_method == "SinkDataFrom");
      CHECK(t.entries[i - 1].tick <= t.entries[i].tick);
    }
  }
  auto zero = w.run_pull("reader", file, 0);
  CHECK(zero.completed());
  CHECK(zero.entries.size() == 2);

  auto custom = w.run_pull("file", *w.pname_of("reader"), 1, "Ingest");
  CHECK(custom.entries.size() == 2);
  CHECK(custom.entries[1].to_method == "Ingest");
  check_invariants(w);
}

TEST_CASE("push session shape and policies") {
  auto w = make_world();
  AccessPolicy closed;
  closed.exchange = AccessRule::deny_all();
  add_book(w, "src", "s", "a", "d1");
  add_book(w, "dst", "d", "a", "d3");
  add_book(w, "locked", "l", "a", "d2", closed);
  auto src = w.instantiate("src");
  auto dst = w.instantiate("dst");
  auto locked = w.instantiate("locked");
  auto t = w.run_push("src", dst, 5);
  CHECK(t.completed());
  CHECK(t.entries.size() == 5);

  auto denied = w.run_push("src", locked, 2);
  CHECK_FALSE(denied.completed());
  CHECK(denied.failure == DropCause::ExchangeDenied);
  CHECK(w.metrics().drops_by_cause.at(DropCause::ExchangeDenied) == 2);

  auto hops = w.metrics().data_hops_total;
  auto self = w.run_push("src", src, 1);
  CHECK(self.completed());
  CHECK(w.metrics().data_hops_total == hops);
  check_invariants(w);
}

TEST_CASE("interactive session alternates") {
  auto w = make_world();
  add_person(w, "a", "alice", "d1");
  add_person(w, "b", "bob", "d3");
  add_person(w, "c", "carol", "d4");
  auto pa = w.instantiate("a");
  auto pb = w.instantiate("b");
  auto pc = w.instantiate("c");
  for (std::size_t t : {1, 3, 10}) {
    auto s = w.run_interactive("a", pb, t);
    CHECK(s.completed());
    REQUIRE(s.entries.size() == 2 * t);
    for (std::size_t i = 0; i < s.entries.size(); ++i) {
      const auto& e = s.entries[i];
      CHECK(e.from == (i % 2 == 0 ? pa : pb));
      CHECK(e.to == (i % 2 == 0 ? pb : pa));
      CHECK(e.from_method == "Talking");
      CHECK(e.to_method == "Listening");
    }
  }
  auto lost = w.run_interactive("a", pc, 2);
  CHECK_FALSE(lost.completed());
  CHECK(lost.failure == DropCause::NoRoute);
  CHECK(lost.entries.size() == 1);
  check_invariants(w);
}

TEST_CASE("unknown method gets one error reply") {
  auto w = make_world();
  add_book(w, "a", "a", "a", "d1");
  add_book(w, "b", "b", "b", "d2");
  auto pa = w.instantiate("a");
  auto pb = w.instantiate("b");
  DataMessage m;
  m.caller = pa;
  m.caller_method = "GetDataFrom";
  m.callee = pb;
  m.callee_method = "NoSuchOp";
  m.reply_to_method = "SinkDataFrom";
  auto t = w.send("a", m);
  CHECK(t.entries.size() == 2);
  CHECK_FALSE(t.completed());
  check_invariants(w);
}

TEST_CASE("inter FIB stays within the provider count") {
  for (std::size_t providers : {2, 5, 10}) {
    World w;
    for (std::size_t i = 0; i < providers; ++i) w.add_domain("p" + std::to_string(i));
    for (std::size_t i = 1; i < providers; ++i) w.add_link("p" + std::to_string(i - 1), "p" + std::to_string(i), 1);
    w.add_class(book_class(), SegmentCuts::uniform_text(2, 1), 1);
    for (std::size_t i = 0; i < 2000; ++i) {
      auto id = "o" + std::to_string(i);
      w.add_object(ObjectSpec{id, "book", {{"title", id}, {"author", std::string("x")}}, {}, {}, "p" + std::to_string(i % providers), 0});
      w.instantiate(id);
    }
    for (const auto* r : w.routers()) CHECK(r->fib().inter_size() <= providers);
    CHECK(w.authority().allocation_count() == providers);
  }
}

}
