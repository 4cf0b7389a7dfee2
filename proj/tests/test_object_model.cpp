// Copyright 2026 The oon-sim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include <doctest.h>

#include <algorithm>
#include <cctype>
#include <set>

#include "oon/object_model.hpp"
#include "oon/workload.hpp"

using namespace oon;

namespace {

ObjectClass book_class() {
  return ObjectClass("book", {{"title", AttributeKind::Text}, {"author", AttributeKind::Text}},
                     {{"pages", AttributeKind::Integer}, {"year", AttributeKind::Integer}});
}

InformationalForm book(const std::string& title, const std::string& author) {
  return form_from_iname(IName{"book", {title, author}}, book_class());
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

std::string fold(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

TEST_SUITE("object-model") {

TEST_CASE("normalize_value examples") {
  CHECK(normalize_value(std::string("Asimov"), AttributeKind::Text) == "asimov");
  CHECK(normalize_value(std::uint64_t{7}, AttributeKind::Integer) == "00000000000000000007");
  CHECK(normalize_value(std::string("N*"), AttributeKind::Text) > normalize_value(std::string("A*"), AttributeKind::Text));
  CHECK(normalize_value(std::string("42"), AttributeKind::Integer) == "00000000000000000042");
}

TEST_CASE("normalize_value errors") {
  CHECK(code_of([] { normalize_value(std::string(""), AttributeKind::Text); }) == Errc::EmptyText);
  CHECK(code_of([] { normalize_value(std::string("18446744073709551616"), AttributeKind::Integer); }) ==
        Errc::IntegerOutOfRange);
  CHECK(code_of([] { normalize_value(std::string("12a"), AttributeKind::Integer); }) == Errc::KindMismatch);
  CHECK(normalize_value(std::uint64_t{18446744073709551615ULL}, AttributeKind::Integer) == "18446744073709551615");
}

TEST_CASE("ordering coherence over 1000 seeded values") {
  Rng rng(11);
  std::vector<std::string> texts;
  std::vector<std::uint64_t> ints;
  for (int i = 0; i < 1000; ++i) {
    std::string s(1 + rng.below(8), 'a');
    for (auto& c : s) c = static_cast<char>((rng.chance(0.5) ? 'a' : 'A') + rng.below(26));
    texts.push_back(s);
    ints.push_back(rng.chance(0.1) ? rng.next() : rng.below(100000));
  }
  auto by_value = texts;
  std::sort(by_value.begin(), by_value.end(), [](const auto& a, const auto& b) { return fold(a) < fold(b); });
  auto by_key = texts;
  std::sort(by_key.begin(), by_key.end(), [](const auto& a, const auto& b) {
    return normalize_value(a, AttributeKind::Text) < normalize_value(b, AttributeKind::Text);
  });
  for (std::size_t i = 0; i < texts.size(); ++i) CHECK(fold(by_value[i]) == fold(by_key[i]));

  auto ki = ints;
  std::sort(ki.begin(), ki.end(), [](auto a, auto b) {
    return normalize_value(a, AttributeKind::Integer) < normalize_value(b, AttributeKind::Integer);
  });
  auto vi = ints;
  std::sort(vi.begin(), vi.end());
  CHECK(ki == vi);
}

TEST_CASE("object class invariants") {
  auto cls = book_class();
  CHECK(cls.has_method("SendDataTo"));
  CHECK(cls.has_method("GetDataFrom"));
  CHECK(cls.has_method("SinkDataFrom"));
  CHECK(cls.methods().size() == 3);
  ObjectClass with("svc", {{"k", AttributeKind::Text}}, {}, {"Read", "SendDataTo"});
  CHECK(with.methods().size() == 4);
  CHECK(code_of([] { ObjectClass("svc", {{"k", AttributeKind::Text}}, {}, {"Read", "Read"}); }) ==
        Errc::ValidationError);
  CHECK(code_of([] { ObjectClass("x", {}); }) == Errc::ValidationError);
  CHECK(code_of([] { ObjectClass("x", {{"a", AttributeKind::Text}}, {{"a", AttributeKind::Integer}}); }) ==
        Errc::ValidationError);
}

TEST_CASE("validate_form examples") {
  auto cls = book_class();
  CHECK(validate_form(book("Foundation", "Asimov"), cls).empty());

  auto missing = book("Foundation", "Asimov");
  missing.description.erase("author");
  auto v = validate_form(missing, cls);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == Violation::Kind::MissingDefiningAttribute);
  CHECK(v[0].attribute == "author");

  auto mismatch = book("foundation", "asimov");
  mismatch.description["author"] = std::string("clarke");
  v = validate_form(mismatch, cls);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == Violation::Kind::INameMismatch);
  CHECK(v[0].message.find("iname/description mismatch") != std::string::npos);

  auto wrong_kind = book("foundation", "asimov");
  wrong_kind.description["pages"] = std::string("many");
  v = validate_form(wrong_kind, cls);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == Violation::Kind::KindMismatch);

  auto other = book("a", "b");
  other.iname.class_name = "film";
  CHECK(code_of([&] { validate_form(other, cls); }) == Errc::UnknownClass);
}

TEST_CASE("iname_of projection and round trip") {
  auto cls = book_class();
  auto f = book("foundation", "asimov");
  f.description["pages"] = std::uint64_t{255};
  CHECK(iname_of(f, cls) == IName{"book", {std::string("foundation"), std::string("asimov")}});

  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    std::string t(1 + rng.below(10), 'a');
    std::string a(1 + rng.below(10), 'a');
    for (auto& c : t) c = static_cast<char>('a' + rng.below(26));
    for (auto& c : a) c = static_cast<char>('A' + rng.below(26));
    IName n{"book", {t, a}};
    auto form = form_from_iname(n, cls);
    form.description["year"] = rng.below(3000);
    CHECK(validate_form(form, cls).empty());
    CHECK(iname_of(form, cls) == n);
    CHECK(eval_query(exact_query(iname_of(form, cls), cls), form, cls));
  }
}

TEST_CASE("eval_query examples") {
  auto cls = book_class();
  Query q{"book", {{"author", Equals{std::string("asimov")}}}};
  CHECK(eval_query(q, book("Foundation", "Asimov"), cls));

  auto f = book("x", "y");
  f.description["year"] = std::uint64_t{1970};
  Query range{"book", {{"year", InRange{std::uint64_t{1950}, std::uint64_t{1960}, true}}}};
  CHECK_FALSE(eval_query(range, f, cls));
  f.description["year"] = std::uint64_t{1960};
  CHECK(eval_query(range, f, cls));
  range.predicates["year"] = InRange{std::uint64_t{1950}, std::uint64_t{1960}, false};
  CHECK_FALSE(eval_query(range, f, cls));

  Query prefix{"book", {{"title", PrefixOf{"found"}}}};
  int hits = 0;
  for (const auto* t : {"foundation", "foundling", "dune"}) hits += eval_query(prefix, book(t, "z"), cls) ? 1 : 0;
  CHECK(hits == 2);

  Query film{"film", {}};
  CHECK(code_of([&] { eval_query(film, book("a", "b"), cls); }) == Errc::ClassMismatch);
}

TEST_CASE("validate_query errors") {
  auto cls = book_class();
  CHECK(code_of([&] { validate_query(Query{"book", {{"colour", AnyValue{}}}}, cls); }) == Errc::UnknownAttribute);
  CHECK(code_of([&] { validate_query(Query{"book", {{"year", PrefixOf{"19"}}}}, cls); }) == Errc::InvalidPredicate);
  CHECK(code_of([&] {
          validate_query(Query{"book", {{"title", InRange{std::string("z"), std::string("a"), true}}}}, cls);
        }) == Errc::InvalidPredicate);
  validate_query(Query{"book", {{"pages", Equals{std::uint64_t{3}}}}}, cls);
}

TEST_CASE("query monotonicity: weakening a predicate never shrinks the match set") {
  auto cls = workload_class(3);
  WorkloadOptions opts;
  opts.hit_bias = 0.8;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto w = generate_workload(seed, 200, 20, cls, opts);
    std::vector<InformationalForm> store;
    for (const auto& o : w.objects) {
      IName n{cls.name(), {}};
      for (const auto& a : cls.defining()) n.values.push_back(o.attributes.at(a.name));
      auto f = form_from_iname(n, cls);
      f.description = o.attributes;
      store.push_back(f);
    }
    for (const auto& wq : w.queries) {
      std::size_t base = 0;
      for (const auto& f : store) base += eval_query(wq.query, f, cls) ? 1 : 0;
      for (const auto& [name, p] : wq.query.predicates) {
        Query weaker = wq.query;
        weaker.predicates[name] = AnyValue{};
        std::size_t n = 0;
        for (const auto& f : store) {
          bool strict = eval_query(wq.query, f, cls);
          bool weak = eval_query(weaker, f, cls);
          CHECK((!strict || weak));
          n += weak ? 1 : 0;
        }
        CHECK(n >= base);
      }
    }
  }
}

TEST_CASE("pname codec") {
  CHECK(format_pname(PName{0x00A1, 0x0007}) == "pn:00000000000000a1/0000000000000007");
  CHECK(parse_pname(format_pname(PName{0, 0})) == PName{0, 0});
  try {
    parse_pname("pn:zz/1");
    FAIL("accepted bad hex");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ParseError);
    CHECK(e.position().has_value());
  }
  CHECK(code_of([] { parse_pname("pn:00000000000000A1/0000000000000007"); }) == Errc::ParseError);
  CHECK(code_of([] { parse_pname("pn:00000000000000a1/000000000000007"); }) == Errc::ParseError);
  CHECK(code_of([] { parse_pname("px:00000000000000a1/0000000000000007"); }) == Errc::ParseError);

  Rng rng(99);
  std::set<std::string> texts;
  for (int i = 0; i < 1000; ++i) {
    PName p{rng.next(), rng.next()};
    auto t = format_pname(p);
    CHECK(t.size() == 3 + 16 + 1 + 16);
    CHECK(parse_pname(t) == p);
    texts.insert(t);
  }
  CHECK(texts.size() == 1000);
}

TEST_CASE("access rules") {
  CHECK(AccessRule::allow_all().allows("anything"));
  CHECK_FALSE(AccessRule::deny_all().allows("person"));
  CHECK(AccessRule::allow_classes({"person"}).allows("person"));
  CHECK_FALSE(AccessRule::allow_classes({"person"}).allows("sensor"));
}

}
