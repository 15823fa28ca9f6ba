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

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace ric_cms {

/// mt19937_64 with distribution code of our own, so a seed maps to the same
/// stream on every standard library.
class Rng
{
public:
  explicit Rng(std::uint64_t seed)
    : engine_(seed)
  {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform()
  {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi)
  {
    return lo + (hi - lo) * uniform();
  }

  /// Uniform index in [0, n). Rejection sampling, no modulo bias.
  std::size_t index(std::size_t n)
  {
    auto const     range = static_cast<std::uint64_t>(n);
    std::uint64_t const limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t  x;
    do
    {
      x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % range);
  }

  template <typename T>
  void shuffle(std::vector<T> &v)
  {
    for (std::size_t i = v.size(); i > 1; --i)
    {
      std::swap(v[i - 1], v[index(i)]);
    }
  }

private:
  std::mt19937_64 engine_;
};

}  // namespace ric_cms
