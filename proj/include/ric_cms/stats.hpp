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

#include "ric_cms/common.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace ric_cms {

/// Quantile of a sample by linear interpolation between closest ranks
/// (inclusive method: position q * (n - 1) on the sorted sample).
inline double quantile_sorted(std::vector<double> const &sorted, double q)
{
  if (sorted.empty())
  {
    throw Error(ErrorCode::kEmptyInput, "quantile of an empty sample");
  }
  double const pos  = q * static_cast<double>(sorted.size() - 1);
  auto const   lo   = static_cast<std::size_t>(std::floor(pos));
  auto const   hi   = std::min(lo + 1, sorted.size() - 1);
  double const frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

inline double quantile(std::vector<double> sample, double q)
{
  std::sort(sample.begin(), sample.end());
  return quantile_sorted(sample, q);
}

inline double median(std::vector<double> sample)
{
  return quantile(std::move(sample), 0.5);
}

inline double mean(std::vector<double> const &sample)
{
  if (sample.empty())
  {
    throw Error(ErrorCode::kEmptyInput, "mean of an empty sample");
  }
  // Summed in sorted order so the result does not depend on input order.
  std::vector<double> sorted(sample);
  std::sort(sorted.begin(), sorted.end());
  return std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(sorted.size());
}

}  // namespace ric_cms
