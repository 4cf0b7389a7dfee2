// Copyright 2026 The oon-sim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace oon {

enum class Errc {
  IntegerOutOfRange,
  EmptyText,
  KindMismatch,
  UnknownClass,
  ClassMismatch,
  UnknownAttribute,
  InvalidPredicate,
  ParseError,
  ValidationError,
  InvalidCuts,
  InvalidPayload,
  UnknownRequest,
  WrongOwner,
  HopLimitExceeded,
  Exhausted,
  NoRoute,
  NoSuchLocal,
  UnknownInterface,
  UnknownDomain,
  UnknownObject,
  NotInstantiated,
  AlreadyInstantiated,
  AlreadyPublished,
  NotPublished,
  Timeout,
};

std::string_view to_string(Errc code);

// Every failure surfaced by the library is an oon::Error carrying a code.
// Parse failures additionally carry a position (byte offset or line).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  Error(Errc code, const std::string& what, std::size_t position)
      : std::runtime_error(std::string(to_string(code)) + " at " +
                           std::to_string(position) + ": " + what),
        code_(code),
        position_(position) {}

  Errc code() const noexcept { return code_; }
  std::optional<std::size_t> position() const noexcept { return position_; }

 private:
  Errc code_;
  std::optional<std::size_t> position_;
};

}  // namespace oon
