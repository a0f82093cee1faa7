// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef BIM_PARALLEL_HPP
#define BIM_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bim {

// Runs fn(t) for t in [0, count) on up to `workers` threads (0 = hardware
// concurrency) and returns the results indexed by t, so any later reduction
// happens in trial order regardless of scheduling.
template <typename Fn>
auto parallel_trials(int count, Fn fn, unsigned workers = 0) -> std::vector<decltype(fn(0))>
{
    using Result = decltype(fn(0));
    std::vector<Result> out(static_cast<std::size_t>(std::max(count, 0)));
    if (count <= 0)
        return out;
    if (workers == 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(count));

    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (int t = next++; t < count; t = next++) {
            try {
                out[static_cast<std::size_t>(t)] = fn(t);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(body);
        for (auto& th : pool)
            th.join();
    }
    if (error)
        std::rethrow_exception(error);
    return out;
}

} // namespace bim

#endif
