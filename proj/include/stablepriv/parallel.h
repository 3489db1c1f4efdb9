//
// Copyright 2026 The StablePriv Authors
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

#ifndef STABLEPRIV_PARALLEL_H_
#define STABLEPRIV_PARALLEL_H_

#include <cstdint>
#include <functional>

namespace stablepriv {

// Runs fn(i) for i in [0, count) on up to `threads` workers with a static
// index partition. fn must write only to per-index slots so results do not
// depend on scheduling. threads <= 1 runs inline.
void ParallelFor(int64_t count, int threads,
                 const std::function<void(int64_t)>& fn);

}  // namespace stablepriv

#endif  // STABLEPRIV_PARALLEL_H_
