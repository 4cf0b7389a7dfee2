// Copyright 2026 The oon-sim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <doctest.h>

#include <set>

#include "oon/event_queue.hpp"
#include "oon/naming.hpp"

using namespace oon;

TEST_SUITE("naming-authority") {

TEST_CASE("allocate_global_id counts from one") {
  Authority auth;
  CHECK(auth.allocate_global_id("d1") == 1);
  CHECK(auth.allocate_global_id("d1") == 2);
  CHECK(auth.allocations().at("d1") == std::set<GlobalId>{1, 2});
}

TEST_CASE("two domains, three calls each give six distinct ids") {
  Authority auth;
  std::set<GlobalId> ids;
  for (int i = 0; i < 3; ++i) {
    ids.insert(auth.allocate_global_id("a"));
    ids.insert(auth.allocate_global_id("b"));
  }
  CHECK(ids.size() == 6);
  CHECK(auth.allocation_count() == 6);
}

TEST_CASE("10000 allocations are distinct and strictly increasing") {
  Authority auth;
  std::set<GlobalId> ids;
  GlobalId last = 0;
  for (int i = 0; i < 10000; ++i) {
    auto g = auth.allocate_global_id("d" + std::to_string(i % 7));
    CHECK(g > last);
    last = g;
    ids.insert(g);
  }
  CHECK(ids.size() == 10000);
}

TEST_CASE("mint_pname under one allocation") {
  Authority auth;
  for (int i = 0; i < 4; ++i) auth.allocate_global_id("x");
  auto alloc = LocalAllocator::bind(auth, "d1");
  CHECK(alloc.global_id() == 5);
  auto p = alloc.mint_pname();
  CHECK(p.global_id == 5);
  CHECK(p.local_id == 1);

  std::set<PName> minted{p};
  for (int i = 0; i < 999; ++i) {
    auto q = alloc.mint_pname();
    CHECK(q.global_id == 5);
    minted.insert(q);
  }
  CHECK(minted.size() == 1000);
  CHECK(alloc.issued() == 1000);
}

TEST_CASE("allocators never share a global id") {
  Authority auth;
  auto a = LocalAllocator::bind(auth, "d1");
  auto b = LocalAllocator::bind(auth, "d1");
  CHECK(a.global_id() != b.global_id());
  CHECK(a.mint_pname() != b.mint_pname());
}

TEST_CASE("assigner flag text") {
  CHECK(parse_pname_assigner("data_domain") == PNameAssigner::DataDomain);
  CHECK(parse_pname_assigner("info_domain") == PNameAssigner::InfoDomain);
  CHECK(to_string(PNameAssigner::InfoDomain) == "info_domain");
  CHECK_THROWS_AS(parse_pname_assigner("both"), Error);
}

}

TEST_SUITE("sim-harness") {

TEST_CASE("event queue orders by tick then insertion") {
  EventQueue<int> q;
  q.schedule(5, 1);
  q.schedule(0, 2);
  q.schedule(5, 3);
  auto k = q.schedule(2, 4);
  q.schedule(2, 5);
  CHECK(q.cancel(k));
  std::vector<int> order;
  std::vector<Tick> ticks;
  while (auto e = q.pop()) {
    order.push_back(e->payload);
    ticks.push_back(q.now());
  }
  CHECK(order == std::vector<int>{2, 5, 1, 3});
  CHECK(ticks == std::vector<Tick>{0, 2, 5, 5});
  CHECK(q.processed() == 4);
  CHECK(q.empty());
}

TEST_CASE("events scheduled during processing stay ordered") {
  EventQueue<int> q;
  q.schedule(1, 0);
  std::vector<std::pair<Tick, int>> seen;
  int next = 1;
  while (auto e = q.pop()) {
    seen.emplace_back(q.now(), e->payload);
    if (next < 6) {
      q.schedule(static_cast<Tick>(next % 2), next);
      ++next;
    }
  }
  for (std::size_t i = 1; i < seen.size(); ++i) CHECK(seen[i - 1].first <= seen[i].first);
  CHECK(seen.size() == 6);
}

}
