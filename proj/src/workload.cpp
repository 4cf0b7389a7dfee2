// Copyright 2026 The oon-sim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "oon/workload.hpp"

#include <algorithm>
#include <set>

namespace oon {

namespace {

std::string random_text(Rng& rng) {
  std::string s(1 + rng.below(3), 'a');
  for (auto& c : s) c = static_cast<char>('a' + rng.below(26));
  if (rng.chance(0.1)) s[0] = static_cast<char>(s[0] - 'a' + 'A');  // exercises case folding
  return s;
}

Value random_value(Rng& rng, AttributeKind kind) {
  if (kind == AttributeKind::Integer) return rng.below(kWorkloadIntegerSpace);
  return random_text(rng);
}

enum class Kind { Eq, Prefix, Range, Any };

Kind pick_kind(Rng& rng, const QueryMix& mix, AttributeKind attr) {
  double prefix = attr == AttributeKind::Integer ? 0 : mix.prefix;
  double total = mix.eq + prefix + mix.range + mix.any;
  if (total <= 0) return Kind::Any;
  double x = static_cast<double>(rng.next() >> 11) * 0x1.0p-53 * total;
  if ((x -= mix.eq) < 0) return Kind::Eq;
  if ((x -= prefix) < 0) return Kind::Prefix;
  if ((x -= mix.range) < 0) return Kind::Range;
  return Kind::Any;
}

}  // namespace

ObjectClass workload_class(std::size_t dims, std::string name) {
  std::vector<AttributeSpec> defining;
  for (std::size_t i = 0; i < dims; ++i) {
    defining.push_back({"a" + std::to_string(i), i % 2 == 1 ? AttributeKind::Integer : AttributeKind::Text});
  }
  return ObjectClass(std::move(name), std::move(defining), {{"note", AttributeKind::Text}});
}

SegmentCuts workload_cuts(const ObjectClass& cls, const std::vector<std::size_t>& grid) {
  std::map<std::string, std::vector<Value>> raw;
  const auto& dims = cls.defining();
  for (std::size_t i = 0; i < dims.size() && i < grid.size(); ++i) {
    auto& cuts = raw[dims[i].name];
    for (std::size_t j = 1; j < grid[i]; ++j) {
      if (dims[i].kind == AttributeKind::Integer) {
        cuts.emplace_back(static_cast<std::uint64_t>(kWorkloadIntegerSpace * j / grid[i]));
      } else {
        cuts.emplace_back(std::string(1, static_cast<char>('a' + 26 * j / grid[i])));
      }
    }
  }
  return SegmentCuts::from_values(cls, raw);
}

Workload generate_workload(std::uint64_t seed, std::size_t n_objects, std::size_t n_queries,
                           const ObjectClass& cls, const WorkloadOptions& options) {
  Rng rng(seed);
  Workload w;
  const auto& dims = cls.defining();
  std::set<std::vector<std::string>> seen;
  std::size_t attempts = 0;
  while (w.objects.size() < n_objects && attempts++ < n_objects * 20 + 100) {
    WorkloadObject obj;
    std::vector<std::string> keys;
    for (const auto& a : dims) {
      auto v = random_value(rng, a.kind);
      keys.push_back(normalize_value(v, a.kind));
      obj.attributes[a.name] = std::move(v);
    }
    if (!seen.insert(keys).second) continue;
    obj.attributes["note"] = "n" + std::to_string(w.objects.size());
    if (rng.chance(options.restricted)) {
      obj.policy.view = AccessRule::allow_classes({std::string(kReaderClass)});
    }
    w.objects.push_back(std::move(obj));
  }

  for (std::size_t q = 0; q < n_queries; ++q) {
    WorkloadQuery wq;
    wq.query.class_name = cls.name();
    wq.requester_class = rng.chance(0.5) ? std::string(kReaderClass) : std::string(kGuestClass);
    const WorkloadObject* anchor =
        !w.objects.empty() && rng.chance(options.hit_bias) ? &w.objects[rng.below(w.objects.size())] : nullptr;
    for (const auto& a : dims) {
      Value v = anchor ? anchor->attributes.at(a.name) : random_value(rng, a.kind);
      switch (pick_kind(rng, options.mix, a.kind)) {
        case Kind::Eq:
          wq.query.predicates[a.name] = Equals{v};
          break;
        case Kind::Prefix: {
          auto text = std::get<std::string>(v);
          wq.query.predicates[a.name] = PrefixOf{text.substr(0, 1 + rng.below(text.size()))};
          break;
        }
        case Kind::Range: {
          Value other = random_value(rng, a.kind);
          auto ka = normalize_value(v, a.kind);
          auto kb = normalize_value(other, a.kind);
          bool inclusive = rng.chance(0.7);
          if (kb < ka) {
            wq.query.predicates[a.name] = InRange{other, v, inclusive};
          } else {
            wq.query.predicates[a.name] = InRange{v, other, inclusive};
          }
          break;
        }
        case Kind::Any:
          if (rng.chance(0.5)) wq.query.predicates[a.name] = AnyValue{};
          break;
      }
    }
    w.queries.push_back(std::move(wq));
  }
  return w;
}

std::vector<InformationalForm> oracle_find(const std::vector<InformationalForm>& forms, const Query& query,
                                           const ObjectClass& cls, const RequesterSummary& requester) {
  std::vector<std::pair<std::vector<std::string>, const InformationalForm*>> hits;
  for (const auto& f : forms) {
    if (f.iname.class_name != query.class_name) continue;
    if (eval_query(query, f, cls) && check_access(f, requester, AccessAction::View)) {
      hits.emplace_back(iname_keys(f.iname, cls), &f);
    }
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<InformationalForm> out;
  for (const auto& [k, f] : hits) out.push_back(*f);
  return out;
}

}  // namespace oon
