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

#include "rllow/rng.hpp"

namespace rllow {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                          std::initializer_list<std::uint64_t> parts) {
  // FNV-1a over the label, folded through SplitMix64 with each coordinate.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t state = mix64(seed ^ mix64(h));
  for (std::uint64_t p : parts) state = mix64(state ^ mix64(p + 0x632be59bd9b4e019ULL));
  return state;
}

Engine make_engine(std::uint64_t seed, std::string_view label,
                   std::initializer_list<std::uint64_t> parts) {
  return Engine(derive_seed(seed, label, parts));
}

}  // namespace rllow
