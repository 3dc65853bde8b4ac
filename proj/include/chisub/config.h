// Copyright 2026 The chisub Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include <fmt/format.h>

#include "chisub/index.h"

namespace chisub {

// Engine knobs shared by the command-line front end.
struct EngineConfig {
  double gamma = 3.0;
  double kappa = 0.001;
  int k = 1;
  std::optional<uint64_t> sample_pairs;
  uint64_t master_seed = 1;
  std::optional<unsigned> thread_count;
  NeighborhoodMode mode = NeighborhoodMode::kMultiset;

  void Validate() const {
    if (!(gamma >= 1.0)) throw std::invalid_argument(fmt::format("gamma must be >= 1, got {}", gamma));
    if (!(kappa > 0.0)) throw std::invalid_argument(fmt::format("kappa must be > 0, got {}", kappa));
    if (k < 1) throw std::invalid_argument(fmt::format("k must be >= 1, got {}", k));
    if (sample_pairs && *sample_pairs == 0) throw std::invalid_argument("sample-pairs must be positive");
  }

  unsigned threads() const { return thread_count.value_or(1); }

  IndexConfig ToIndexConfig() const {
    IndexConfig c;
    c.similarity = {gamma, mode};
    c.kappa = kappa;
    c.distribution.sample_pairs = sample_pairs;
    c.distribution.seed = master_seed;
    c.distribution.threads = threads();
    return c;
  }
};

}  // namespace chisub
