// Copyright 2026 The Shufflepan Authors
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

#ifndef SHUFFLEPAN_PARALLEL_H_
#define SHUFFLEPAN_PARALLEL_H_

#include <cstddef>
#include <functional>
#include <vector>

namespace shufflepan {

// Runs body(i) for i in [0, count) on up to `threads` workers. Work items are
// handed out through an atomic counter; callers must write results into
// per-index slots so the outcome does not depend on scheduling.
void ParallelFor(size_t count, int threads,
                 const std::function<void(size_t)>& body);

// Collects fn(i) for every i in [0, count), ordered by i.
template <typename T, typename Fn>
std::vector<T> ParallelMap(size_t count, int threads, Fn fn) {
  std::vector<T> out(count);
  ParallelFor(count, threads, [&](size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace shufflepan

#endif  // SHUFFLEPAN_PARALLEL_H_
