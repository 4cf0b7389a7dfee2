// Copyright 2026 The oon-sim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "oon/object_model.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <set>

namespace oon {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::IntegerOutOfRange: return "IntegerOutOfRange";
    case Errc::EmptyText: return "EmptyText";
    case Errc::KindMismatch: return "KindMismatch";
    case Errc::UnknownClass: return "UnknownClass";
    case Errc::ClassMismatch: return "ClassMismatch";
    case Errc::UnknownAttribute: return "UnknownAttribute";
    case Errc::InvalidPredicate: return "InvalidPredicate";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
    case Errc::InvalidCuts: return "InvalidCuts";
    case Errc::InvalidPayload: return "InvalidPayload";
    case Errc::UnknownRequest: return "UnknownRequest";
    case Errc::WrongOwner: return "WrongOwner";
    case Errc::HopLimitExceeded: return "HopLimitExceeded";
    case Errc::Exhausted: return "Exhausted";
    case Errc::NoRoute: return "NoRoute";
    case Errc::NoSuchLocal: return "NoSuchLocal";
    case Errc::UnknownInterface: return "UnknownInterface";
    case Errc::UnknownDomain: return "UnknownDomain";
    case Errc::UnknownObject: return "UnknownObject";
    case Errc::NotInstantiated: return "NotInstantiated";
    case Errc::AlreadyInstantiated: return "AlreadyInstantiated";
    case Errc::AlreadyPublished: return "AlreadyPublished";
    case Errc::NotPublished: return "NotPublished";
    case Errc::Timeout: return "Timeout";
  }
  return "Unknown";
}

std::string_view to_string(AttributeKind kind) {
  return kind == AttributeKind::Text ? "text" : "integer";
}

AttributeKind parse_attribute_kind(std::string_view text) {
  if (text == "text") return AttributeKind::Text;
  if (text == "integer") return AttributeKind::Integer;
  throw Error(Errc::ValidationError, "unknown attribute kind '" + std::string(text) + "'");
}

std::string value_to_string(const Value& value) {
  if (const auto* s = std::get_if<std::string>(&value)) return *s;
  return std::to_string(std::get<std::uint64_t>(value));
}

std::uint64_t parse_integer(std::string_view text) {
  if (text.empty() || !std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw Error(Errc::KindMismatch, "'" + std::string(text) + "' is not an unsigned decimal integer");
  }
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec == std::errc::result_out_of_range) {
    throw Error(Errc::IntegerOutOfRange, "'" + std::string(text) + "' exceeds 64-bit unsigned");
  }
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(Errc::KindMismatch, "'" + std::string(text) + "' is not an unsigned decimal integer");
  }
  return out;
}

namespace {

std::string fold_case(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
  });
  return out;
}

std::string integer_key(std::uint64_t v) {
  std::string digits = std::to_string(v);
  return std::string(kIntegerKeyWidth - digits.size(), '0') + digits;
}

}  // namespace

std::string normalize_value(const Value& raw, AttributeKind kind) {
  if (kind == AttributeKind::Text) {
    const auto* text = std::get_if<std::string>(&raw);
    if (text == nullptr) throw Error(Errc::KindMismatch, "integer supplied for a text attribute");
    if (text->empty()) throw Error(Errc::EmptyText, "text values must be non-empty");
    return fold_case(*text);
  }
  if (const auto* v = std::get_if<std::uint64_t>(&raw)) return integer_key(*v);
  return integer_key(parse_integer(std::get<std::string>(raw)));
}

// ---------------------------------------------------------------------------

bool is_generic_method(std::string_view method) {
  return method == kSendDataTo || method == kGetDataFrom || method == kSinkDataFrom;
}

ObjectClass::ObjectClass(std::string name, std::vector<AttributeSpec> defining,
                         std::vector<AttributeSpec> extra_description,
                         std::vector<std::string> methods)
    : name_(std::move(name)),
      defining_(std::move(defining)),
      extra_(std::move(extra_description)) {
  if (name_.empty()) throw Error(Errc::ValidationError, "class name must be non-empty");
  if (defining_.empty()) {
    throw Error(Errc::ValidationError, "class '" + name_ + "' has no defining attributes");
  }
  std::set<std::string> seen;
  for (const auto* list : {&defining_, &extra_}) {
    for (const auto& attr : *list) {
      if (attr.name.empty() || !seen.insert(attr.name).second) {
        throw Error(Errc::ValidationError,
                    "class '" + name_ + "' has an empty or duplicate attribute '" + attr.name + "'");
      }
    }
  }
  std::set<std::string> seen_methods;
  for (auto generic : {kSendDataTo, kGetDataFrom, kSinkDataFrom}) {
    methods_.emplace_back(generic);
    seen_methods.emplace(generic);
  }
  for (auto& m : methods) {
    if (m.empty()) throw Error(Errc::ValidationError, "empty method name in class '" + name_ + "'");
    if (is_generic_method(m)) continue;
    if (!seen_methods.insert(m).second) {
      throw Error(Errc::ValidationError, "duplicate method '" + m + "' in class '" + name_ + "'");
    }
    methods_.push_back(std::move(m));
  }
}

const AttributeSpec* ObjectClass::find_attribute(std::string_view name) const {
  for (const auto* list : {&defining_, &extra_}) {
    for (const auto& attr : *list) {
      if (attr.name == name) return &attr;
    }
  }
  return nullptr;
}

std::optional<std::size_t> ObjectClass::defining_index(std::string_view name) const {
  for (std::size_t i = 0; i < defining_.size(); ++i) {
    if (defining_[i].name == name) return i;
  }
  return std::nullopt;
}

bool ObjectClass::has_method(std::string_view method) const {
  return std::find(methods_.begin(), methods_.end(), method) != methods_.end();
}

// ---------------------------------------------------------------------------

std::string to_string(const IName& iname) {
  std::string out = iname.class_name + "[";
  for (std::size_t i = 0; i < iname.values.size(); ++i) {
    if (i != 0) out += ",";
    out += value_to_string(iname.values[i]);
  }
  return out + "]";
}

std::vector<std::string> iname_keys(const IName& iname, const ObjectClass& cls) {
  if (iname.class_name != cls.name()) {
    throw Error(Errc::ClassMismatch, "i-name of class '" + iname.class_name + "' used with '" + cls.name() + "'");
  }
  if (iname.values.size() != cls.defining().size()) {
    throw Error(Errc::ValidationError, "i-name arity does not match class '" + cls.name() + "'");
  }
  std::vector<std::string> keys;
  keys.reserve(iname.values.size());
  for (std::size_t i = 0; i < iname.values.size(); ++i) {
    keys.push_back(normalize_value(iname.values[i], cls.defining()[i].kind));
  }
  return keys;
}

std::string format_pname(const PName& pname) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "pn:";
  out.reserve(3 + 16 + 1 + 16);
  auto put = [&out](std::uint64_t v) {
    for (int shift = 60; shift >= 0; shift -= 4) out.push_back(kHex[(v >> shift) & 0xF]);
  };
  put(pname.global_id);
  out.push_back('/');
  put(pname.local_id);
  return out;
}

PName parse_pname(std::string_view text) {
  constexpr std::string_view kPrefix = "pn:";
  if (!text.starts_with(kPrefix)) {
    throw Error(Errc::ParseError, "p-name must start with 'pn:'", 0);
  }
  std::size_t pos = kPrefix.size();
  auto read_hex = [&](std::uint64_t& out) {
    out = 0;
    for (int i = 0; i < 16; ++i, ++pos) {
      if (pos >= text.size()) throw Error(Errc::ParseError, "p-name truncated", pos);
      char c = text[pos];
      std::uint64_t digit;
      if (c >= '0' && c <= '9') {
        digit = static_cast<std::uint64_t>(c - '0');
      } else if (c >= 'a' && c <= 'f') {
        digit = static_cast<std::uint64_t>(c - 'a' + 10);
      } else {
        throw Error(Errc::ParseError, std::string("invalid hex digit '") + c + "'", pos);
      }
      out = (out << 4) | digit;
    }
  };
  PName p;
  read_hex(p.global_id);
  if (pos >= text.size() || text[pos] != '/') throw Error(Errc::ParseError, "expected '/'", pos);
  ++pos;
  read_hex(p.local_id);
  if (pos != text.size()) throw Error(Errc::ParseError, "trailing characters", pos);
  return p;
}

// ---------------------------------------------------------------------------

bool AccessRule::allows(std::string_view requester_class) const {
  switch (mode) {
    case Mode::AllowAll: return true;
    case Mode::DenyAll: return false;
    case Mode::AllowClasses:
      return std::find(classes.begin(), classes.end(), requester_class) != classes.end();
  }
  return false;
}

// ---------------------------------------------------------------------------

InformationalForm form_from_iname(const IName& iname, const ObjectClass& cls) {
  InformationalForm form;
  form.iname = iname;
  for (std::size_t i = 0; i < cls.defining().size() && i < iname.values.size(); ++i) {
    form.description[cls.defining()[i].name] = iname.values[i];
  }
  form.methods = cls.methods();
  return form;
}

std::string_view to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::MissingDefiningAttribute: return "missing defining attribute";
    case Violation::Kind::KindMismatch: return "kind mismatch";
    case Violation::Kind::INameMismatch: return "iname/description mismatch";
    case Violation::Kind::UnknownAttribute: return "unknown attribute";
    case Violation::Kind::ArityMismatch: return "iname arity mismatch";
  }
  return "violation";
}

namespace {

std::optional<std::string> try_normalize(const Value& v, AttributeKind kind) {
  try {
    return normalize_value(v, kind);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

std::vector<Violation> validate_form(const InformationalForm& form, const ObjectClass& cls) {
  if (form.iname.class_name != cls.name()) {
    throw Error(Errc::UnknownClass, "form of class '" + form.iname.class_name + "' checked against '" + cls.name() + "'");
  }
  std::vector<Violation> report;
  auto add = [&report](Violation::Kind kind, const std::string& attr) {
    report.push_back({kind, attr, std::string(to_string(kind)) + " '" + attr + "'"});
  };

  const bool arity_ok = form.iname.values.size() == cls.defining().size();
  if (!arity_ok) add(Violation::Kind::ArityMismatch, cls.name());

  for (std::size_t i = 0; i < cls.defining().size(); ++i) {
    const auto& spec = cls.defining()[i];
    auto it = form.description.find(spec.name);
    if (it == form.description.end()) {
      add(Violation::Kind::MissingDefiningAttribute, spec.name);
      continue;
    }
    auto described = try_normalize(it->second, spec.kind);
    if (!described) {
      add(Violation::Kind::KindMismatch, spec.name);
      continue;
    }
    if (arity_ok) {
      auto named = try_normalize(form.iname.values[i], spec.kind);
      if (!named) {
        add(Violation::Kind::KindMismatch, spec.name);
      } else if (*named != *described) {
        add(Violation::Kind::INameMismatch, spec.name);
      }
    }
  }
  for (const auto& [name, value] : form.description) {
    const auto* spec = cls.find_attribute(name);
    if (spec == nullptr) {
      add(Violation::Kind::UnknownAttribute, name);
    } else if (!cls.defining_index(name) && !try_normalize(value, spec->kind)) {
      add(Violation::Kind::KindMismatch, name);
    }
  }
  return report;
}

IName iname_of(const InformationalForm& form, const ObjectClass& cls) {
  IName out{cls.name(), {}};
  out.values.reserve(cls.defining().size());
  for (const auto& spec : cls.defining()) out.values.push_back(form.description.at(spec.name));
  return out;
}

// ---------------------------------------------------------------------------

std::string to_string(const Predicate& predicate) {
  struct Visitor {
    std::string operator()(const AnyValue&) const { return "any"; }
    std::string operator()(const Equals& p) const { return "eq(" + value_to_string(p.value) + ")"; }
    std::string operator()(const PrefixOf& p) const { return "prefix(" + p.prefix + ")"; }
    std::string operator()(const InRange& p) const {
      return std::string(p.inclusive ? "[" : "(") + value_to_string(p.lo) + ".." +
             value_to_string(p.hi) + (p.inclusive ? "]" : ")");
    }
  };
  return std::visit(Visitor{}, predicate);
}

bool KeyInterval::contains(std::string_view key) const {
  if (key < lo) return false;
  if (key <= hi) return true;
  return prefix_closure && key.starts_with(hi);
}

KeyInterval key_interval(const Predicate& predicate, AttributeKind kind) {
  struct Visitor {
    AttributeKind kind;
    KeyInterval operator()(const AnyValue&) const { return {"", "", true}; }
    KeyInterval operator()(const Equals& p) const {
      auto k = normalize_value(p.value, kind);
      return {k, k, false};
    }
    KeyInterval operator()(const PrefixOf& p) const {
      auto k = fold_case(p.prefix);
      return {k, k, true};
    }
    KeyInterval operator()(const InRange& p) const {
      return {normalize_value(p.lo, kind), normalize_value(p.hi, kind), false};
    }
  };
  return std::visit(Visitor{kind}, predicate);
}

bool satisfies(const Predicate& predicate, const std::string& key, AttributeKind kind) {
  struct Visitor {
    const std::string& key;
    AttributeKind kind;
    bool operator()(const AnyValue&) const { return true; }
    bool operator()(const Equals& p) const { return key == normalize_value(p.value, kind); }
    bool operator()(const PrefixOf& p) const { return key.starts_with(fold_case(p.prefix)); }
    bool operator()(const InRange& p) const {
      auto lo = normalize_value(p.lo, kind);
      auto hi = normalize_value(p.hi, kind);
      return p.inclusive ? (lo <= key && key <= hi) : (lo < key && key < hi);
    }
  };
  return std::visit(Visitor{key, kind}, predicate);
}

Predicate Query::predicate_for(const std::string& attribute) const {
  auto it = predicates.find(attribute);
  return it == predicates.end() ? Predicate{AnyValue{}} : it->second;
}

void validate_query(const Query& query, const ObjectClass& cls) {
  if (query.class_name != cls.name()) {
    throw Error(Errc::ClassMismatch, "query of class '" + query.class_name + "' used with '" + cls.name() + "'");
  }
  for (const auto& [name, predicate] : query.predicates) {
    const auto* spec = cls.find_attribute(name);
    if (spec == nullptr) {
      throw Error(Errc::UnknownAttribute, "class '" + cls.name() + "' declares no attribute '" + name + "'");
    }
    if (std::holds_alternative<PrefixOf>(predicate) && spec->kind == AttributeKind::Integer) {
      throw Error(Errc::InvalidPredicate, "prefix predicate on integer attribute '" + name + "'");
    }
    if (const auto* range = std::get_if<InRange>(&predicate)) {
      if (normalize_value(range->lo, spec->kind) > normalize_value(range->hi, spec->kind)) {
        throw Error(Errc::InvalidPredicate, "range lo > hi on attribute '" + name + "'");
      }
    } else if (const auto* eq = std::get_if<Equals>(&predicate)) {
      normalize_value(eq->value, spec->kind);
    }
  }
}

Query exact_query(const IName& iname, const ObjectClass& cls) {
  Query q{cls.name(), {}};
  for (std::size_t i = 0; i < cls.defining().size() && i < iname.values.size(); ++i) {
    q.predicates[cls.defining()[i].name] = Equals{iname.values[i]};
  }
  return q;
}

bool eval_query(const Query& query, const InformationalForm& form, const ObjectClass& cls) {
  if (query.class_name != form.iname.class_name || query.class_name != cls.name()) {
    throw Error(Errc::ClassMismatch, "query class '" + query.class_name + "' vs form class '" + form.iname.class_name + "'");
  }
  for (const auto& [name, predicate] : query.predicates) {
    if (std::holds_alternative<AnyValue>(predicate)) continue;
    const auto* spec = cls.find_attribute(name);
    if (spec == nullptr) return false;
    auto it = form.description.find(name);
    if (it == form.description.end()) return false;
    auto key = try_normalize(it->second, spec->kind);
    if (!key || !satisfies(predicate, *key, spec->kind)) return false;
  }
  return true;
}

}  // namespace oon
