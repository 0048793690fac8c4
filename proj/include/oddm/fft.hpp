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

#ifndef ODDM_FFT_HPP
#define ODDM_FFT_HPP

#include "oddm/types.hpp"

namespace oddm
{
    /// In-place length-n DFT of a contiguous buffer, unnormalized.
    /// forward: X[k] = sum_i x[i] e^{-j 2 pi i k / n}; inverse uses e^{+j...}.
    /// Plans are cached process-wide; concurrent calls on distinct buffers are safe.
    void fft_inplace(cd *data, int n, bool inverse);

    /// Unitary DFT (scaled by 1/sqrt(n)).
    CVector dft(const CVector &x);
    CVector idft(const CVector &x);

    /// Unitary DFT of every column, i.e. F_n X (or F_n^H X when inverse).
    CMatrix dft_columns(const CMatrix &X, bool inverse = false);

    /// Unitary DFT along every row, i.e. X F_n (or X F_n^H when inverse).
    /// F_n is symmetric, so X F_n is the row-wise transform.
    CMatrix dft_rows(const CMatrix &X, bool inverse = false);
} // namespace oddm

#endif
