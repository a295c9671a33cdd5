//
// Copyright 2026 The rllow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef RLLOW_RNG_HPP_
#define RLLOW_RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace rllow {

using Engine = std::mt19937_64;

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

// Derives an independent stream seed from a parent seed, a purpose label and
// optional integer coordinates. Adding a new label never perturbs streams
// derived under other labels.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                          std::initializer_list<std::uint64_t> parts = {});

Engine make_engine(std::uint64_t seed, std::string_view label,
                   std::initializer_list<std::uint64_t> parts = {});

}  // namespace rllow

#endif  // RLLOW_RNG_HPP_
