// Copyright 2026 The oon-sim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "oon/error.hpp"

namespace oon {

// ---------------------------------------------------------------------------
// Attribute values and their ordered keys
// ---------------------------------------------------------------------------

enum class AttributeKind { Text, Integer };

std::string_view to_string(AttributeKind kind);
AttributeKind parse_attribute_kind(std::string_view text);

// A raw attribute value. Integer attributes may also be supplied as decimal
// text; normalize_value() reconciles the two.
using Value = std::variant<std::string, std::uint64_t>;

std::string value_to_string(const Value& value);

// Maps a value onto a byte string whose plain lexicographic order is the
// intended value order: text is ASCII case-folded, integers are rendered as
// 20-digit zero-padded decimals.
std::string normalize_value(const Value& raw, AttributeKind kind);

// Parses a decimal uint64. Throws IntegerOutOfRange on overflow and
// KindMismatch on anything that is not a plain digit string.
std::uint64_t parse_integer(std::string_view text);

inline constexpr std::size_t kIntegerKeyWidth = 20;

// ---------------------------------------------------------------------------
// Classes
// ---------------------------------------------------------------------------

inline constexpr std::string_view kSendDataTo = "SendDataTo";
inline constexpr std::string_view kGetDataFrom = "GetDataFrom";
inline constexpr std::string_view kSinkDataFrom = "SinkDataFrom";

bool is_generic_method(std::string_view method);

struct AttributeSpec {
  std::string name;
  AttributeKind kind = AttributeKind::Text;

  friend bool operator==(const AttributeSpec&, const AttributeSpec&) = default;
};

class ObjectClass {
 public:
  // Throws ValidationError on an empty defining list or duplicate names. The
  // three generic data methods are always appended when missing.
  ObjectClass(std::string name, std::vector<AttributeSpec> defining,
              std::vector<AttributeSpec> extra_description = {},
              std::vector<std::string> methods = {});

  const std::string& name() const noexcept { return name_; }
  const std::vector<AttributeSpec>& defining() const noexcept { return defining_; }
  const std::vector<AttributeSpec>& extra() const noexcept { return extra_; }
  const std::vector<std::string>& methods() const noexcept { return methods_; }

  const AttributeSpec* find_attribute(std::string_view name) const;
  std::optional<std::size_t> defining_index(std::string_view name) const;
  bool has_method(std::string_view method) const;

 private:
  std::string name_;
  std::vector<AttributeSpec> defining_;
  std::vector<AttributeSpec> extra_;
  std::vector<std::string> methods_;
};

// ---------------------------------------------------------------------------
// Names
// ---------------------------------------------------------------------------

struct IName {
  std::string class_name;
  std::vector<Value> values;

  friend bool operator==(const IName&, const IName&) = default;
};

std::string to_string(const IName& iname);

// Normalized keys of an i-name, one per defining attribute. Two i-names
// denote the same object iff their keys are equal.
std::vector<std::string> iname_keys(const IName& iname, const ObjectClass& cls);

struct PName {
  std::uint64_t global_id = 0;
  std::uint64_t local_id = 0;

  friend auto operator<=>(const PName&, const PName&) = default;
};

static_assert(sizeof(PName) == 16);

// Canonical text form: "pn:" + 16 lowercase hex + "/" + 16 lowercase hex.
std::string format_pname(const PName& pname);
PName parse_pname(std::string_view text);

// ---------------------------------------------------------------------------
// Access policy
// ---------------------------------------------------------------------------

struct AccessRule {
  enum class Mode { AllowAll, DenyAll, AllowClasses };
  Mode mode = Mode::AllowAll;
  std::vector<std::string> classes;

  static AccessRule allow_all() { return {}; }
  static AccessRule deny_all() { return {Mode::DenyAll, {}}; }
  static AccessRule allow_classes(std::vector<std::string> c) {
    return {Mode::AllowClasses, std::move(c)};
  }

  bool allows(std::string_view requester_class) const;

  friend bool operator==(const AccessRule&, const AccessRule&) = default;
};

struct AccessPolicy {
  AccessRule view;
  AccessRule exchange;

  friend bool operator==(const AccessPolicy&, const AccessPolicy&) = default;
};

// ---------------------------------------------------------------------------
// Informational form
// ---------------------------------------------------------------------------

struct Relationship {
  std::vector<PName> physical;
  std::vector<IName> related;

  friend bool operator==(const Relationship&, const Relationship&) = default;
};

struct InformationalForm {
  IName iname;
  std::map<std::string, Value> description;
  std::map<std::string, Value> management;
  Relationship relationship;
  std::vector<std::string> methods;
  AccessPolicy policy;

  friend bool operator==(const InformationalForm&, const InformationalForm&) = default;
};

// Builds a form whose description holds exactly the i-name's defining values.
InformationalForm form_from_iname(const IName& iname, const ObjectClass& cls);

struct Violation {
  enum class Kind { MissingDefiningAttribute, KindMismatch, INameMismatch, UnknownAttribute, ArityMismatch };
  Kind kind;
  std::string attribute;
  std::string message;
};

std::string_view to_string(Violation::Kind kind);

// Empty result iff the form is valid for the class.
// Throws UnknownClass if the form names a different class.
std::vector<Violation> validate_form(const InformationalForm& form, const ObjectClass& cls);

// Projection of the description onto the defining attributes, in schema
// order. The form must be valid.
IName iname_of(const InformationalForm& form, const ObjectClass& cls);

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

struct AnyValue {
  friend bool operator==(const AnyValue&, const AnyValue&) = default;
};
struct Equals {
  Value value;
  friend bool operator==(const Equals&, const Equals&) = default;
};
struct PrefixOf {
  std::string prefix;
  friend bool operator==(const PrefixOf&, const PrefixOf&) = default;
};
struct InRange {
  Value lo;
  Value hi;
  bool inclusive = true;
  friend bool operator==(const InRange&, const InRange&) = default;
};

using Predicate = std::variant<AnyValue, Equals, PrefixOf, InRange>;

std::string to_string(const Predicate& predicate);

// Closed interval of normalized keys covered by a predicate. When
// `prefix_closure` is set the upper end is `hi` followed by an unbounded
// maximal suffix, so every key starting with `hi` is inside.
struct KeyInterval {
  std::string lo;
  std::string hi;
  bool prefix_closure = false;

  bool contains(std::string_view key) const;
};

KeyInterval key_interval(const Predicate& predicate, AttributeKind kind);

bool satisfies(const Predicate& predicate, const std::string& normalized_key,
               AttributeKind kind);

struct Query {
  std::string class_name;
  std::map<std::string, Predicate> predicates;  // absent attribute == Any

  // Predicate for a defining attribute (Any when absent).
  Predicate predicate_for(const std::string& attribute) const;
};

// Throws UnknownAttribute for undeclared attributes and InvalidPredicate for
// Prefix on integers or Range with lo > hi.
void validate_query(const Query& query, const ObjectClass& cls);

// Equality query pinning every defining attribute to the i-name's value.
Query exact_query(const IName& iname, const ObjectClass& cls);

// Conjunction of per-attribute predicates over the form's normalized values.
// Throws ClassMismatch when classes differ.
bool eval_query(const Query& query, const InformationalForm& form, const ObjectClass& cls);

}  // namespace oon
