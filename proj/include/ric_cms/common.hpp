//------------------------------------------------------------------------------
//
//   Copyright 2026 The ric-cms Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace ric_cms {

/// Machine-readable failure categories. The CLI prints these verbatim.
enum class ErrorCode
{
  kInvalidArgument,
  kInvalidConfig,
  kDuplicateId,
  kUnknownId,
  kOwnershipConflict,
  kRedundantPromotion,
  kClockRegression,
  kNotAViolation,
  kUnattributable,
  kEmptyInput,
  kMissingContext,
  kMixedParameters,
  kNoConsistentTuple,
  kIo,
};

constexpr std::string_view to_string(ErrorCode code) noexcept
{
  switch (code)
  {
  case ErrorCode::kInvalidArgument:
    return "invalid_argument";
  case ErrorCode::kInvalidConfig:
    return "invalid_config";
  case ErrorCode::kDuplicateId:
    return "duplicate_id";
  case ErrorCode::kUnknownId:
    return "unknown_id";
  case ErrorCode::kOwnershipConflict:
    return "ownership_conflict";
  case ErrorCode::kRedundantPromotion:
    return "redundant_promotion";
  case ErrorCode::kClockRegression:
    return "clock_regression";
  case ErrorCode::kNotAViolation:
    return "not_a_violation";
  case ErrorCode::kUnattributable:
    return "unattributable";
  case ErrorCode::kEmptyInput:
    return "empty_input";
  case ErrorCode::kMissingContext:
    return "missing_context";
  case ErrorCode::kMixedParameters:
    return "mixed_parameters";
  case ErrorCode::kNoConsistentTuple:
    return "no_consistent_tuple";
  case ErrorCode::kIo:
    return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, std::string const &what)
    : std::runtime_error(what)
    , code_(code)
  {}

  ErrorCode code() const noexcept
  {
    return code_;
  }

private:
  ErrorCode code_;
};

/// Opaque string identifier, distinct per tag so xApp, parameter and KPI ids
/// cannot be mixed up. Ordering is lexicographic.
template <typename Tag>
class Id
{
public:
  Id() = default;
  explicit Id(std::string value)
    : value_(std::move(value))
  {}
  explicit Id(char const *value)
    : value_(value)
  {}

  std::string const &str() const noexcept
  {
    return value_;
  }

  bool empty() const noexcept
  {
    return value_.empty();
  }

  auto operator<=>(Id const &) const = default;
  bool operator==(Id const &) const  = default;

private:
  std::string value_;
};

template <typename Tag>
std::ostream &operator<<(std::ostream &os, Id<Tag> const &id)
{
  return os << id.str();
}

using XAppId  = Id<struct XAppTag>;
using ParamId = Id<struct ParamTag>;
using KpiId   = Id<struct KpiTag>;

/// Simulation clock in milliseconds.
using TimeMs = double;

enum class Direction
{
  kMaximize,
  kMinimize,
};

constexpr std::string_view to_string(Direction d) noexcept
{
  return d == Direction::kMaximize ? "MAXIMIZE" : "MINIMIZE";
}

inline Direction parse_direction(std::string_view s)
{
  if (s == "MAXIMIZE" || s == "maximize")
  {
    return Direction::kMaximize;
  }
  if (s == "MINIMIZE" || s == "minimize")
  {
    return Direction::kMinimize;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown KPI direction: " + std::string(s));
}

/// True when `observed` sits on the violating side of `threshold`.
constexpr bool violates(Direction d, double observed, double threshold) noexcept
{
  return d == Direction::kMaximize ? observed < threshold : observed > threshold;
}

}  // namespace ric_cms

template <typename Tag>
struct std::hash<ric_cms::Id<Tag>>
{
  std::size_t operator()(ric_cms::Id<Tag> const &id) const noexcept
  {
    return std::hash<std::string>{}(id.str());
  }
};
