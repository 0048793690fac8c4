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

#include "oddm/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace
{
    // fftw_plan creation is not thread-safe; execution with fftw_execute_dft is.
    std::mutex plan_mutex;

    struct PlanCache
    {
        std::map<std::pair<int, bool>, fftw_plan> plans;
        ~PlanCache()
        {
            for (auto &[key, plan] : plans)
                fftw_destroy_plan(plan);
        }
    };

    fftw_plan get_plan(int n, bool inverse)
    {
        static PlanCache cache;
        std::lock_guard<std::mutex> lock(plan_mutex);
        auto it = cache.plans.find({n, inverse});
        if (it != cache.plans.end())
            return it->second;
        fftw_complex *buf = fftw_alloc_complex(static_cast<std::size_t>(n));
        fftw_plan plan = fftw_plan_dft_1d(n, buf, buf, inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(buf);
        if (plan == nullptr)
            throw std::runtime_error("fftw: plan creation failed for n = " + std::to_string(n));
        cache.plans.emplace(std::make_pair(n, inverse), plan);
        return plan;
    }
} // namespace

void oddm::fft_inplace(cd *data, int n, bool inverse)
{
    if (n <= 0)
        throw std::invalid_argument("fft_inplace: length must be positive");
    if (n == 1)
        return;
    auto *p = reinterpret_cast<fftw_complex *>(data);
    fftw_execute_dft(get_plan(n, inverse), p, p);
}

oddm::CVector oddm::dft(const CVector &x)
{
    CVector y = x;
    fft_inplace(y.data(), static_cast<int>(y.size()), false);
    return y / std::sqrt(static_cast<double>(y.size()));
}

oddm::CVector oddm::idft(const CVector &x)
{
    CVector y = x;
    fft_inplace(y.data(), static_cast<int>(y.size()), true);
    return y / std::sqrt(static_cast<double>(y.size()));
}

oddm::CMatrix oddm::dft_columns(const CMatrix &X, bool inverse)
{
    CMatrix Y = X;
    const int n = static_cast<int>(Y.rows());
    for (Eigen::Index c = 0; c < Y.cols(); ++c)
        fft_inplace(Y.col(c).data(), n, inverse);
    return Y / std::sqrt(static_cast<double>(n));
}

oddm::CMatrix oddm::dft_rows(const CMatrix &X, bool inverse)
{
    CMatrix Yt = X.transpose();
    return dft_columns(Yt, inverse).transpose();
}
