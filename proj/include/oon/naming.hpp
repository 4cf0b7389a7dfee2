// Copyright 2026 The oon-sim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>

#include "oon/object_model.hpp"

namespace oon {

using GlobalId = std::uint64_t;
using LocalId = std::uint64_t;

// Trusted allocator of top-level identifiers. Ids are sequential starting
// at 1 and never reused.
class Authority {
 public:
  GlobalId allocate_global_id(const std::string& domain);

  std::size_t allocation_count() const noexcept { return total_; }
  const std::map<std::string, std::set<GlobalId>>& allocations() const noexcept { return allocations_; }

 private:
  GlobalId next_global_ = 1;
  std::size_t total_ = 0;
  std::map<std::string, std::set<GlobalId>> allocations_;
};

// Mints p-names below one allocated GlobalId. Only obtainable from an
// Authority allocation, so two allocators can never share a GlobalId.
class LocalAllocator {
 public:
  static LocalAllocator bind(Authority& authority, const std::string& domain) {
    return LocalAllocator(authority.allocate_global_id(domain));
  }

  PName mint_pname();

  GlobalId global_id() const noexcept { return global_id_; }
  LocalId issued() const noexcept { return next_local_ - 1; }

 private:
  explicit LocalAllocator(GlobalId g) : global_id_(g) {}

  GlobalId global_id_;
  LocalId next_local_ = 1;
};

enum class PNameAssigner { DataDomain, InfoDomain };

std::string_view to_string(PNameAssigner assigner);
PNameAssigner parse_pname_assigner(std::string_view text);

}  // namespace oon
