// Copyright 2026 The oon-sim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#include "oon/naming.hpp"

namespace oon {

GlobalId Authority::allocate_global_id(const std::string& domain) {
  if (next_global_ == 0) throw Error(Errc::Exhausted, "global identifier space exhausted");
  GlobalId id = next_global_++;  // wraps to 0 after the last id
  allocations_[domain].insert(id);
  ++total_;
  return id;
}

PName LocalAllocator::mint_pname() {
  if (next_local_ == 0) throw Error(Errc::Exhausted, "local identifier space exhausted");
  return PName{global_id_, next_local_++};
}

std::string_view to_string(PNameAssigner assigner) {
  return assigner == PNameAssigner::DataDomain ? "data_domain" : "info_domain";
}

PNameAssigner parse_pname_assigner(std::string_view text) {
  if (text == "data_domain") return PNameAssigner::DataDomain;
  if (text == "info_domain") return PNameAssigner::InfoDomain;
  throw Error(Errc::ValidationError, "pname_assigner must be data_domain or info_domain, got '" + std::string(text) + "'");
}

}  // namespace oon
