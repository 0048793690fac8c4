// SPDX-License-Identifier: Apache-2.0
//
// oddm-isac: delay-Doppler ISAC simulation library
// Copyright (C) 2026 The oddm-isac authors
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

#ifndef ODDM_PARALLEL_HPP
#define ODDM_PARALLEL_HPP

#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <mutex>
#include <vector>

namespace oddm
{
    /// Selects the OpenMP kernel or the serial reference path. Both produce
    /// identical results: every index writes its own slot and reductions are
    /// done afterwards in index order.
    enum class Execution
    {
        serial,
        parallel
    };

    /// Calls f(i) for i in [0, n). Exceptions thrown by f are rethrown on the
    /// calling thread (the first one by index is kept).
    template <class F>
    void for_each_index(std::ptrdiff_t n, Execution exec, F &&f)
    {
        if (exec == Execution::serial || n < 2)
        {
            for (std::ptrdiff_t i = 0; i < n; ++i)
                f(i);
            return;
        }
        std::exception_ptr error;
        std::ptrdiff_t error_index = n;
        std::mutex error_mutex;
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < n; ++i)
        {
            try
            {
                f(i);
            }
            catch (...)
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (i < error_index)
                {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
        if (error)
            std::rethrow_exception(error);
    }

    /// out[i] = f(i) for i in [0, n).
    template <class T, class F>
    std::vector<T> map_indices(std::ptrdiff_t n, Execution exec, F &&f)
    {
        std::vector<T> out(static_cast<std::size_t>(n));
        for_each_index(n, exec, [&](std::ptrdiff_t i) { out[static_cast<std::size_t>(i)] = f(i); });
        return out;
    }

    /// Index of the largest finite value; ties go to the lowest index.
    /// Returns values.size() when no finite value exists.
    inline std::size_t argmax_lowest_index(const std::vector<double> &values)
    {
        std::size_t best = values.size();
        double best_value = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < values.size(); ++i)
        {
            if (!std::isfinite(values[i]))
                continue;
            if (best == values.size() || values[i] > best_value)
            {
                best = i;
                best_value = values[i];
            }
        }
        return best;
    }
} // namespace oddm

#endif
