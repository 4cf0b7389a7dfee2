// Copyright 2026 The oon-sim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "oon/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace oon {

using json = nlohmann::json;

std::string_view to_string(StepOp op) {
  switch (op) {
    case StepOp::Instantiate: return "instantiate";
    case StepOp::Publish: return "publish";
    case StepOp::Discover: return "discover";
    case StepOp::Pull: return "pull";
    case StepOp::Push: return "push";
    case StepOp::Interactive: return "interactive";
    case StepOp::Migrate: return "migrate";
    case StepOp::Update: return "update";
    case StepOp::Delete: return "delete";
    case StepOp::Fault: return "fault";
    case StepOp::Audit: return "audit";
    case StepOp::WorkloadPublish: return "workload_publish";
    case StepOp::WorkloadQueries: return "workload_queries";
  }
  return "?";
}

namespace {

// Already carries its field path; never wrapped again.
struct FieldError : Error {
  FieldError(const std::string& ctx, const std::string& msg) : Error(Errc::ValidationError, ctx + ": " + msg) {}
};

[[noreturn]] void invalid(const std::string& ctx, const std::string& msg) { throw FieldError(ctx, msg); }

// Rethrows any library error with the field path in front.
template <typename F>
auto in_context(const std::string& ctx, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const FieldError&) {
    throw;
  } catch (const Error& e) {
    invalid(ctx, e.what());
  }
}

void allow_keys(const json& j, const std::string& ctx, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) invalid(ctx, "expected an object");
  for (const auto& [k, v] : j.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) invalid(ctx, "unknown field '" + k + "'");
  }
}

const json& require(const json& j, const std::string& ctx, const std::string& key) {
  if (!j.contains(key)) invalid(ctx, "missing field '" + key + "'");
  return j.at(key);
}

std::string as_string(const json& j, const std::string& ctx) {
  if (!j.is_string()) invalid(ctx, "expected a string");
  return j.get<std::string>();
}

std::uint64_t as_uint(const json& j, const std::string& ctx) {
  if (!j.is_number_unsigned()) invalid(ctx, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

double as_fraction(const json& j, const std::string& ctx) {
  if (!j.is_number() || j.get<double>() < 0) invalid(ctx, "expected a non-negative number");
  return j.get<double>();
}

std::string opt_string(const json& j, const std::string& ctx, const std::string& key, std::string fallback = {}) {
  return j.contains(key) ? as_string(j.at(key), ctx + "." + key) : fallback;
}

std::string req_string(const json& j, const std::string& ctx, const std::string& key) {
  return as_string(require(j, ctx, key), ctx + "." + key);
}

Value as_value(const json& j, const std::string& ctx) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  invalid(ctx, "expected a string or non-negative integer");
}

std::map<std::string, Value> as_attributes(const json& j, const std::string& ctx) {
  if (!j.is_object()) invalid(ctx, "expected an object of attribute values");
  std::map<std::string, Value> out;
  for (const auto& [k, v] : j.items()) out[k] = as_value(v, ctx + "." + k);
  return out;
}

AttributeSpec as_attribute_spec(const json& j, const std::string& ctx) {
  allow_keys(j, ctx, {"name", "kind"});
  AttributeSpec a;
  a.name = req_string(j, ctx, "name");
  a.kind = in_context(ctx + ".kind", [&] { return parse_attribute_kind(opt_string(j, ctx, "kind", "text")); });
  return a;
}

std::vector<AttributeSpec> as_attribute_list(const json& j, const std::string& ctx) {
  if (!j.is_array()) invalid(ctx, "expected an array");
  std::vector<AttributeSpec> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_attribute_spec(j[i], ctx + "[" + std::to_string(i) + "]"));
  return out;
}

AccessRule as_rule(const json& j, const std::string& ctx) {
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "all") return AccessRule::allow_all();
    if (s == "none") return AccessRule::deny_all();
    invalid(ctx, "expected \"all\", \"none\" or a list of classes");
  }
  if (!j.is_array()) invalid(ctx, "expected \"all\", \"none\" or a list of classes");
  std::vector<std::string> classes;
  for (std::size_t i = 0; i < j.size(); ++i) classes.push_back(as_string(j[i], ctx + "[" + std::to_string(i) + "]"));
  return AccessRule::allow_classes(std::move(classes));
}

AccessPolicy as_policy(const json& j, const std::string& ctx) {
  allow_keys(j, ctx, {"view", "exchange"});
  AccessPolicy p;
  if (j.contains("view")) p.view = as_rule(j.at("view"), ctx + ".view");
  if (j.contains("exchange")) p.exchange = as_rule(j.at("exchange"), ctx + ".exchange");
  return p;
}

Predicate as_predicate(const json& j, const std::string& ctx) {
  if (j.is_string() && j.get<std::string>() == "any") return AnyValue{};
  if (!j.is_object() || j.empty()) invalid(ctx, "expected \"any\" or an object with eq, prefix or range");
  if (j.contains("eq")) {
    allow_keys(j, ctx, {"eq"});
    return Equals{as_value(j.at("eq"), ctx + ".eq")};
  }
  if (j.contains("prefix")) {
    allow_keys(j, ctx, {"prefix"});
    return PrefixOf{as_string(j.at("prefix"), ctx + ".prefix")};
  }
  if (j.contains("range")) {
    allow_keys(j, ctx, {"range", "inclusive"});
    const auto& r = j.at("range");
    if (!r.is_array() || r.size() != 2) invalid(ctx + ".range", "expected [lo, hi]");
    InRange p{as_value(r[0], ctx + ".range[0]"), as_value(r[1], ctx + ".range[1]"), true};
    if (j.contains("inclusive")) {
      if (!j.at("inclusive").is_boolean()) invalid(ctx + ".inclusive", "expected a boolean");
      p.inclusive = j.at("inclusive").get<bool>();
    }
    return p;
  }
  invalid(ctx, "expected one of eq, prefix, range");
}

Query as_query(const json& j, const std::string& ctx) {
  allow_keys(j, ctx, {"class", "where"});
  Query q;
  q.class_name = req_string(j, ctx, "class");
  if (j.contains("where")) {
    const auto& w = j.at("where");
    if (!w.is_object()) invalid(ctx + ".where", "expected an object");
    for (const auto& [k, v] : w.items()) q.predicates[k] = as_predicate(v, ctx + ".where." + k);
  }
  return q;
}

Errc as_errc(const json& j, const std::string& ctx) {
  auto s = as_string(j, ctx);
  for (int i = 0; i <= static_cast<int>(Errc::Timeout); ++i) {
    if (to_string(static_cast<Errc>(i)) == s) return static_cast<Errc>(i);
  }
  invalid(ctx, "unknown error code '" + s + "'");
}

ClassDecl as_class(const json& j, const std::string& ctx) {
  allow_keys(j, ctx, {"name", "defining", "extra", "methods", "cuts", "irns"});
  auto name = req_string(j, ctx, "name");
  auto defining = as_attribute_list(require(j, ctx, "defining"), ctx + ".defining");
  std::vector<AttributeSpec> extra;
  if (j.contains("extra")) extra = as_attribute_list(j.at("extra"), ctx + ".extra");
  std::vector<std::string> methods;
  if (j.contains("methods")) {
    const auto& m = j.at("methods");
    if (!m.is_array()) invalid(ctx + ".methods", "expected an array");
    for (std::size_t i = 0; i < m.size(); ++i) methods.push_back(as_string(m[i], ctx + ".methods[" + std::to_string(i) + "]"));
  }
  ClassDecl decl{in_context(ctx, [&] { return ObjectClass(name, defining, extra, methods); }), {}, 1};
  if (j.contains("cuts")) {
    const auto& c = j.at("cuts");
    if (!c.is_object()) invalid(ctx + ".cuts", "expected an object");
    for (const auto& [attr, values] : c.items()) {
      std::string vctx = ctx + ".cuts." + attr;
      if (!values.is_array()) invalid(vctx, "expected an array");
      auto& out = decl.cuts[attr];
      for (std::size_t i = 0; i < values.size(); ++i) out.push_back(as_value(values[i], vctx + "[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("irns")) decl.irn_count = as_uint(j.at("irns"), ctx + ".irns");
  if (decl.irn_count == 0) invalid(ctx + ".irns", "at least one IRN is required");
  return decl;
}

ObjectSpec as_object(const json& j, const std::string& ctx) {
  allow_keys(j, ctx, {"id", "class", "attributes", "handlers", "policy", "domain", "entry_irn"});
  ObjectSpec s;
  s.id = req_string(j, ctx, "id");
  s.class_name = req_string(j, ctx, "class");
  s.attributes = as_attributes(require(j, ctx, "attributes"), ctx + ".attributes");
  if (j.contains("handlers")) {
    const auto& h = j.at("handlers");
    if (!h.is_object()) invalid(ctx + ".handlers", "expected an object");
    for (const auto& [m, kind] : h.items()) {
      std::string hctx = ctx + ".handlers." + m;
      s.handlers[m] = in_context(hctx, [&] { return parse_handler_kind(as_string(kind, hctx)); });
    }
  }
  if (j.contains("policy")) s.policy = as_policy(j.at("policy"), ctx + ".policy");
  s.home_domain = req_string(j, ctx, "domain");
  if (j.contains("entry_irn")) s.entry_irn = static_cast<IrnId>(as_uint(j.at("entry_irn"), ctx + ".entry_irn"));
  return s;
}

WorkloadDecl as_workload(const json& j, const std::string& ctx) {
  allow_keys(j, ctx, {"class", "objects", "queries", "mix", "restricted", "hit_bias", "domain"});
  WorkloadDecl w;
  w.class_name = req_string(j, ctx, "class");
  w.objects = as_uint(require(j, ctx, "objects"), ctx + ".objects");
  if (j.contains("queries")) w.queries = as_uint(j.at("queries"), ctx + ".queries");
  if (j.contains("mix")) {
    const auto& m = j.at("mix");
    allow_keys(m, ctx + ".mix", {"eq", "prefix", "range", "any"});
    auto get = [&](const char* k, double& out) {
      if (m.contains(k)) out = as_fraction(m.at(k), ctx + ".mix." + k);
    };
    w.options.mix = {0, 0, 0, 0};
    get("eq", w.options.mix.eq);
    get("prefix", w.options.mix.prefix);
    get("range", w.options.mix.range);
    get("any", w.options.mix.any);
  }
  if (j.contains("restricted")) w.options.restricted = as_fraction(j.at("restricted"), ctx + ".restricted");
  if (j.contains("hit_bias")) w.options.hit_bias = as_fraction(j.at("hit_bias"), ctx + ".hit_bias");
  w.domain = req_string(j, ctx, "domain");
  return w;
}

StepOp as_op(const std::string& s, const std::string& ctx) {
  for (int i = 0; i <= static_cast<int>(StepOp::WorkloadQueries); ++i) {
    if (to_string(static_cast<StepOp>(i)) == s) return static_cast<StepOp>(i);
  }
  invalid(ctx, "unknown op '" + s + "'");
}

Step as_step(const json& j, const std::string& ctx) {
  if (!j.is_object()) invalid(ctx, "expected an object");
  Step s;
  s.context = ctx;
  s.op = as_op(req_string(j, ctx, "op"), ctx + ".op");
  switch (s.op) {
    case StepOp::Instantiate:
    case StepOp::Delete:
      allow_keys(j, ctx, {"op", "object", "expect_error"});
      s.object = req_string(j, ctx, "object");
      break;
    case StepOp::Publish:
      allow_keys(j, ctx, {"op", "object", "order", "expect_error"});
      s.object = req_string(j, ctx, "object");
      s.order = in_context(ctx + ".order", [&] { return parse_publish_order(opt_string(j, ctx, "order", "bottom_up")); });
      break;
    case StepOp::Discover:
      allow_keys(j, ctx, {"op", "query", "entry_irn", "as", "requester_class", "bind", "expect", "expect_error"});
      s.query = as_query(require(j, ctx, "query"), ctx + ".query");
      if (j.contains("entry_irn")) s.entry_irn = static_cast<IrnId>(as_uint(j.at("entry_irn"), ctx + ".entry_irn"));
      s.requester = opt_string(j, ctx, "as");
      s.requester_class = opt_string(j, ctx, "requester_class");
      s.bind = opt_string(j, ctx, "bind");
      if (j.contains("expect")) s.expect_matches = as_uint(j.at("expect"), ctx + ".expect");
      break;
    case StepOp::Pull:
      allow_keys(j, ctx, {"op", "consumer", "producer", "chunks", "expect", "expect_error"});
      s.object = req_string(j, ctx, "consumer");
      s.target = req_string(j, ctx, "producer");
      if (j.contains("chunks")) s.count = as_uint(j.at("chunks"), ctx + ".chunks");
      break;
    case StepOp::Push:
      allow_keys(j, ctx, {"op", "producer", "consumer", "chunks", "expect", "expect_error"});
      s.object = req_string(j, ctx, "producer");
      s.target = req_string(j, ctx, "consumer");
      if (j.contains("chunks")) s.count = as_uint(j.at("chunks"), ctx + ".chunks");
      break;
    case StepOp::Interactive:
      allow_keys(j, ctx, {"op", "object", "peer", "turns", "expect", "expect_error"});
      s.object = req_string(j, ctx, "object");
      s.target = req_string(j, ctx, "peer");
      if (j.contains("turns")) s.count = as_uint(j.at("turns"), ctx + ".turns");
      break;
    case StepOp::Migrate:
      allow_keys(j, ctx, {"op", "object", "to", "expect_error"});
      s.target = req_string(j, ctx, "object");
      s.domain = req_string(j, ctx, "to");
      break;
    case StepOp::Update:
      allow_keys(j, ctx, {"op", "object", "attributes", "expect_error"});
      s.object = req_string(j, ctx, "object");
      s.attributes = as_attributes(require(j, ctx, "attributes"), ctx + ".attributes");
      break;
    case StepOp::Fault: {
      allow_keys(j, ctx, {"op", "kind", "object", "expect_error"});
      auto kind = req_string(j, ctx, "kind");
      if (kind != "kill_host") invalid(ctx + ".kind", "unknown fault '" + kind + "'");
      s.object = req_string(j, ctx, "object");
      break;
    }
    case StepOp::Audit:
      allow_keys(j, ctx, {"op", "expect_dangling", "expect_error"});
      if (j.contains("expect_dangling")) s.expect_dangling = as_uint(j.at("expect_dangling"), ctx + ".expect_dangling");
      break;
    case StepOp::WorkloadPublish:
    case StepOp::WorkloadQueries:
      allow_keys(j, ctx, {"op", "expect_error"});
      break;
  }
  if (j.contains("expect") && (s.op == StepOp::Pull || s.op == StepOp::Push || s.op == StepOp::Interactive)) {
    auto e = as_string(j.at("expect"), ctx + ".expect");
    if (e != "completed" && e != "failed") invalid(ctx + ".expect", "expected \"completed\" or \"failed\"");
    s.expect_completed = e == "completed";
  }
  if (j.contains("expect_error")) s.expect_error = as_errc(j.at("expect_error"), ctx + ".expect_error");
  return s;
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

// ---------------------------------------------------------------------------

struct Prepared {
  std::optional<Workload> workload;
  std::vector<std::string> workload_ids;
};

std::string workload_id(std::size_t i) { return "w" + std::to_string(i); }

Prepared setup_world(World& world, const Scenario& sc, std::uint64_t seed) {
  for (std::size_t i = 0; i < sc.domains.size(); ++i) {
    in_context("domains[" + std::to_string(i) + "]", [&] { return world.add_domain(sc.domains[i]); });
  }
  for (std::size_t i = 0; i < sc.links.size(); ++i) {
    const auto& l = sc.links[i];
    in_context("links[" + std::to_string(i) + "]", [&] {
      world.add_link(l.a, l.b, l.latency);
      return 0;
    });
  }
  for (std::size_t i = 0; i < sc.classes.size(); ++i) {
    const auto& c = sc.classes[i];
    std::string ctx = "classes[" + std::to_string(i) + "]";
    auto cuts = in_context(ctx + ".cuts", [&] { return SegmentCuts::from_values(c.cls, c.cuts); });
    in_context(ctx, [&] {
      world.add_class(c.cls, cuts, c.irn_count);
      return 0;
    });
  }
  for (std::size_t i = 0; i < sc.objects.size(); ++i) {
    const auto& o = sc.objects[i];
    std::string ctx = "objects[" + std::to_string(i) + "]";
    if (!world.has_domain(o.home_domain)) invalid(ctx + ".domain", "no domain '" + o.home_domain + "'");
    in_context(ctx, [&] {
      world.add_object(o);
      return 0;
    });
  }
  Prepared p;
  if (sc.workload) {
    const auto& w = *sc.workload;
    if (!world.has_domain(w.domain)) invalid("workload.domain", "no domain '" + w.domain + "'");
    const auto& net = in_context("workload.class", [&]() -> const InfoNetwork& { return world.network(w.class_name); });
    p.workload = generate_workload(seed, w.objects, w.queries, net.cls, w.options);
    for (std::size_t i = 0; i < p.workload->objects.size(); ++i) {
      const auto& wo = p.workload->objects[i];
      ObjectSpec s;
      s.id = workload_id(i);
      s.class_name = w.class_name;
      s.attributes = wo.attributes;
      s.policy = wo.policy;
      s.home_domain = w.domain;
      s.entry_irn = static_cast<IrnId>(i % net.nodes.size());
      in_context("workload", [&] {
        world.add_object(s);
        return 0;
      });
      p.workload_ids.push_back(s.id);
    }
  }
  return p;
}

void validate_steps(const World& world, const Scenario& sc) {
  std::set<std::string> bound;
  auto known = [&](const std::string& id, const std::string& ctx) {
    auto ids = world.object_ids();
    if (!std::binary_search(ids.begin(), ids.end(), id)) invalid(ctx, "unknown object '" + id + "'");
  };
  auto target = [&](const std::string& t, const std::string& ctx) {
    if (t.starts_with("$")) {
      if (!bound.contains(t.substr(1))) invalid(ctx, "binding '" + t + "' is not set by an earlier discover");
    } else if (t.starts_with("pn:")) {
      in_context(ctx, [&] { return parse_pname(t); });
    } else {
      known(t, ctx);
    }
  };
  for (const auto& s : sc.script) {
    const auto& ctx = s.context;
    switch (s.op) {
      case StepOp::Instantiate:
      case StepOp::Publish:
      case StepOp::Delete:
      case StepOp::Fault:
        known(s.object, ctx + ".object");
        break;
      case StepOp::Discover: {
        const auto& net = in_context(ctx + ".query", [&]() -> const InfoNetwork& {
          return world.network(s.query->class_name);
        });
        in_context(ctx + ".query", [&] {
          validate_query(*s.query, net.cls);
          return 0;
        });
        if (s.entry_irn >= net.nodes.size()) invalid(ctx + ".entry_irn", "IRN out of range");
        if (!s.requester.empty()) known(s.requester, ctx + ".as");
        if (!s.bind.empty()) bound.insert(s.bind);
        break;
      }
      case StepOp::Pull:
        known(s.object, ctx + ".consumer");
        target(s.target, ctx + ".producer");
        break;
      case StepOp::Push:
        known(s.object, ctx + ".producer");
        target(s.target, ctx + ".consumer");
        break;
      case StepOp::Interactive:
        known(s.object, ctx + ".object");
        target(s.target, ctx + ".peer");
        break;
      case StepOp::Migrate:
        target(s.target, ctx + ".object");
        if (!world.has_domain(s.domain)) invalid(ctx + ".to", "no domain '" + s.domain + "'");
        break;
      case StepOp::Update: {
        known(s.object, ctx + ".object");
        const auto& cls = world.network(world.object_spec(s.object).class_name).cls;
        for (const auto& [name, v] : s.attributes) {
          if (cls.find_attribute(name) == nullptr) invalid(ctx + ".attributes." + name, "class '" + cls.name() + "' has no attribute '" + name + "'");
          if (cls.defining_index(name)) invalid(ctx + ".attributes." + name, "defining attributes cannot be modified");
        }
        break;
      }
      case StepOp::Audit:
        break;
      case StepOp::WorkloadPublish:
      case StepOp::WorkloadQueries:
        if (!sc.workload) invalid(ctx, "op requires a workload section");
        break;
    }
  }
}

std::string join_pnames(const std::vector<PName>& pnames) {
  std::string out = "[";
  for (std::size_t i = 0; i < pnames.size(); ++i) {
    if (i) out += ",";
    out += format_pname(pnames[i]);
  }
  return out + "]";
}

std::set<std::vector<std::string>> key_set(const std::vector<InformationalForm>& forms, const ObjectClass& cls) {
  std::set<std::vector<std::string>> out;
  for (const auto& f : forms) out.insert(iname_keys(f.iname, cls));
  return out;
}

// Runs every workload query through the network and against the oracle.
void run_workload_queries(World& world, const Workload& w, const std::vector<std::string>& ids,
                          const std::string& class_name, RunResult& result) {
  const auto& net = world.network(class_name);
  std::vector<InformationalForm> forms;
  for (const auto& id : ids) {
    if (world.is_published(id)) forms.push_back(world.build_form(id));
  }
  std::size_t mismatches = 0;
  for (std::size_t q = 0; q < w.queries.size(); ++q) {
    const auto& wq = w.queries[q];
    RequesterSummary who{wq.requester_class, "workload", world.now()};
    auto res = world.discover(wq.query, static_cast<IrnId>(q % net.nodes.size()), who);
    std::set<std::vector<std::string>> got;
    for (const auto& d : res.matches) got.insert(iname_keys(d.iname, net.cls));
    auto want = key_set(oracle_find(forms, wq.query, net.cls, who), net.cls);
    bool ok = got == want && !res.partial;
    if (!ok) {
      ++mismatches;
      result.failures.push_back("workload query " + std::to_string(q) + " differs from the oracle");
    }
    world.note("QUERY " + std::to_string(q) + " matches=" + std::to_string(got.size()) +
               " oracle=" + std::to_string(want.size()) + (ok ? " ok" : " MISMATCH"));
  }
  world.note("ORACLE queries=" + std::to_string(w.queries.size()) + " mismatches=" + std::to_string(mismatches));
}

PName resolve_target(const World& world, const std::map<std::string, PName>& bindings, const std::string& t) {
  if (t.starts_with("$")) {
    auto it = bindings.find(t.substr(1));
    if (it == bindings.end()) throw Error(Errc::ValidationError, "binding '" + t + "' is empty");
    return it->second;
  }
  if (t.starts_with("pn:")) return parse_pname(t);
  auto p = world.pname_of(t);
  if (!p) throw Error(Errc::NotInstantiated, "object '" + t + "' has no p-name");
  return *p;
}

void run_step(World& world, const Scenario& sc, const Prepared& prep, const Step& s,
              std::map<std::string, PName>& bindings, RunResult& result) {
  auto fail = [&](const std::string& what) {
    result.failures.push_back(s.context + ": " + what);
    world.note("EXPECT FAIL " + s.context + " " + what);
  };
  auto session = [&](const SessionTrace& t) {
    world.note("SESSION " + std::string(to_string(s.op)) + " outcome=" + (t.completed() ? "completed" : "failed") +
               " messages=" + std::to_string(t.entries.size()));
    if (s.expect_completed && *s.expect_completed != t.completed()) {
      fail(std::string("session ") + (t.completed() ? "completed" : "failed"));
    }
  };
  switch (s.op) {
    case StepOp::Instantiate:
      world.instantiate(s.object);
      break;
    case StepOp::Publish:
      world.publish(s.object, s.order);
      break;
    case StepOp::Discover: {
      RequesterSummary who = s.requester.empty() ? RequesterSummary{s.requester_class, "anonymous", world.now()}
                                                 : world.requester_for(s.requester);
      auto res = world.discover(*s.query, s.entry_irn, who);
      std::vector<PName> all;
      for (const auto& d : res.matches) all.insert(all.end(), d.pnames.begin(), d.pnames.end());
      world.note("DISCOVER matches=" + std::to_string(res.matches.size()) + " pnames=" + join_pnames(all) +
                 (res.partial ? " partial" : ""));
      if (s.expect_matches && *s.expect_matches != res.matches.size()) {
        fail("expected " + std::to_string(*s.expect_matches) + " matches, got " + std::to_string(res.matches.size()));
      }
      if (!s.bind.empty()) {
        if (all.empty()) {
          fail("nothing to bind to $" + s.bind);
        } else {
          bindings[s.bind] = all.front();
        }
      }
      break;
    }
    case StepOp::Pull:
      session(world.run_pull(s.object, resolve_target(world, bindings, s.target), s.count));
      break;
    case StepOp::Push:
      session(world.run_push(s.object, resolve_target(world, bindings, s.target), s.count));
      break;
    case StepOp::Interactive:
      session(world.run_interactive(s.object, resolve_target(world, bindings, s.target), s.count));
      break;
    case StepOp::Migrate:
      world.migrate(resolve_target(world, bindings, s.target), s.domain);
      break;
    case StepOp::Update:
      world.update(s.object, s.attributes);
      break;
    case StepOp::Delete:
      world.remove(s.object);
      break;
    case StepOp::Fault:
      world.kill_host(s.object);
      break;
    case StepOp::Audit: {
      auto report = world.audit_consistency();
      if (s.expect_dangling && *s.expect_dangling != report.dangling.size()) {
        fail("expected " + std::to_string(*s.expect_dangling) + " dangling, got " +
             std::to_string(report.dangling.size()));
      }
      break;
    }
    case StepOp::WorkloadPublish:
      for (const auto& id : prep.workload_ids) {
        world.instantiate(id);
        world.publish(id, PublishOrder::BottomUp);
      }
      break;
    case StepOp::WorkloadQueries:
      run_workload_queries(world, *prep.workload, prep.workload_ids, sc.workload->class_name, result);
      break;
  }
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = line_of(text, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(Errc::ParseError, "line " + std::to_string(line) + ": " + e.what(), line);
  }
  const std::string ctx = "scenario";
  allow_keys(root, ctx, {"name", "seed", "assigner", "info_domain", "deadline", "irn_latency", "hop_limit",
                         "classes", "domains", "links", "objects", "workload", "script"});
  Scenario sc;
  sc.name = opt_string(root, ctx, "name", "run");
  if (root.contains("seed")) sc.seed = as_uint(root.at("seed"), "seed");
  if (root.contains("assigner")) {
    sc.config.assigner = in_context("assigner", [&] { return parse_pname_assigner(as_string(root.at("assigner"), "assigner")); });
  }
  sc.config.info_domain = opt_string(root, ctx, "info_domain", sc.config.info_domain);
  if (root.contains("deadline")) sc.config.deadline = as_uint(root.at("deadline"), "deadline");
  if (root.contains("irn_latency")) sc.config.irn_latency = as_uint(root.at("irn_latency"), "irn_latency");
  if (root.contains("hop_limit")) sc.config.hop_limit = static_cast<std::uint32_t>(as_uint(root.at("hop_limit"), "hop_limit"));
  if (sc.config.deadline == 0) invalid("deadline", "must be at least 1 tick");
  if (sc.config.irn_latency == 0) invalid("irn_latency", "must be at least 1 tick");

  auto array = [&](const char* key) -> json {
    if (!root.contains(key)) return json::array();
    if (!root.at(key).is_array()) invalid(key, "expected an array");
    return root.at(key);
  };
  auto classes = array("classes");
  for (std::size_t i = 0; i < classes.size(); ++i) sc.classes.push_back(as_class(classes[i], "classes[" + std::to_string(i) + "]"));
  auto domains = array("domains");
  for (std::size_t i = 0; i < domains.size(); ++i) sc.domains.push_back(as_string(domains[i], "domains[" + std::to_string(i) + "]"));
  auto links = array("links");
  for (std::size_t i = 0; i < links.size(); ++i) {
    std::string lctx = "links[" + std::to_string(i) + "]";
    allow_keys(links[i], lctx, {"a", "b", "latency"});
    LinkDecl l{req_string(links[i], lctx, "a"), req_string(links[i], lctx, "b"), 1};
    if (links[i].contains("latency")) l.latency = as_uint(links[i].at("latency"), lctx + ".latency");
    sc.links.push_back(std::move(l));
  }
  auto objects = array("objects");
  for (std::size_t i = 0; i < objects.size(); ++i) sc.objects.push_back(as_object(objects[i], "objects[" + std::to_string(i) + "]"));
  if (root.contains("workload")) sc.workload = as_workload(root.at("workload"), "workload");
  auto script = array("script");
  for (std::size_t i = 0; i < script.size(); ++i) sc.script.push_back(as_step(script[i], "script[" + std::to_string(i) + "]"));
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ParseError, "cannot open '" + path.string() + "'", 0);
  std::stringstream buf;
  buf << in.rdbuf();
  auto sc = parse_scenario(buf.str());
  validate_scenario(sc);
  return sc;
}

void validate_scenario(const Scenario& scenario) {
  World world(scenario.config);
  setup_world(world, scenario, scenario.seed);
  validate_steps(world, scenario);
}

RunResult run_scenario(const Scenario& scenario, std::optional<std::uint64_t> seed_override) {
  const std::uint64_t seed = seed_override.value_or(scenario.seed);
  World world(scenario.config);
  auto prep = setup_world(world, scenario, seed);
  RunResult result;
  world.note("RUN " + scenario.name + " seed=" + std::to_string(seed));
  std::map<std::string, PName> bindings;
  for (const auto& step : scenario.script) {
    world.note("STEP " + step.context + " " + std::string(to_string(step.op)));
    try {
      run_step(world, scenario, prep, step, bindings, result);
      if (step.expect_error) {
        result.failures.push_back(step.context + ": expected " + std::string(to_string(*step.expect_error)));
        world.note("EXPECT FAIL " + step.context + " no error");
      }
    } catch (const Error& e) {
      world.note("ERROR " + std::string(to_string(e.code())));
      if (step.expect_error != e.code()) result.failures.push_back(step.context + ": " + e.what());
    }
  }
  world.note("END failures=" + std::to_string(result.failures.size()));
  result.metrics = world.metrics();
  result.metrics.run_id = scenario.name;
  result.trace = world.trace();
  return result;
}

std::vector<std::size_t> bench_grid(std::size_t irns, std::size_t dims) {
  std::size_t g = 1;
  auto cells = [&](std::size_t seg) {
    std::size_t c = 1;
    for (std::size_t i = 0; i < dims; ++i) c *= seg;
    return c;
  };
  while (cells(g) < irns) ++g;
  return std::vector<std::size_t>(dims, g);
}

RunResult run_bench(const BenchOptions& options) {
  if (options.dims == 0 || options.irns == 0) throw Error(Errc::ValidationError, "bench needs at least one dimension and one IRN");
  WorldConfig cfg;
  cfg.trace = false;
  World world(cfg);
  world.add_domain("d0");
  auto cls = workload_class(options.dims);
  world.add_class(cls, workload_cuts(cls, bench_grid(options.irns, options.dims)), options.irns);
  WorkloadOptions wopts;
  wopts.mix = options.mix;
  auto w = generate_workload(options.seed, options.objects, options.queries, cls, wopts);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < w.objects.size(); ++i) {
    ObjectSpec s{workload_id(i), cls.name(), w.objects[i].attributes, {}, w.objects[i].policy, "d0",
                 static_cast<IrnId>(i % options.irns)};
    world.add_object(s);
    world.instantiate(s.id);
    world.publish(s.id, PublishOrder::BottomUp);
    ids.push_back(s.id);
  }
  RunResult result;
  run_workload_queries(world, w, ids, cls.name(), result);
  result.metrics = world.metrics();
  result.metrics.run_id = "bench";
  return result;
}

}  // namespace oon
