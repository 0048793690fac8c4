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

#ifndef ODDM_WAVEFORM_HPP
#define ODDM_WAVEFORM_HPP

#include "oddm/random.hpp"
#include "oddm/types.hpp"

#include <string_view>
#include <vector>

namespace oddm
{
    enum class Constellation
    {
        qpsk,
        qam16
    };

    enum class Scheme
    {
        oddm,
        otfs,
        ofdm,
        dfts_oddm,
        dfts_otfs,
        dfts_ofdm
    };

    inline constexpr Scheme all_schemes[] = {Scheme::oddm,      Scheme::otfs,      Scheme::ofdm,
                                             Scheme::dfts_oddm, Scheme::dfts_otfs, Scheme::dfts_ofdm};

    std::string_view scheme_name(Scheme s);
    Scheme scheme_from_name(std::string_view name);
    bool is_dft_spread(Scheme s);
    /// The scheme with the DFT spreading removed (DFTS_ODDM -> ODDM, ...).
    Scheme base_scheme(Scheme s);

    /// M x N delay-Doppler symbol grid (rows: delay m, columns: Doppler n).
    struct DDFrame
    {
        CMatrix symbols;
        Constellation constellation = Constellation::qpsk;
        Scheme scheme = Scheme::oddm;

        int num_delay() const { return static_cast<int>(symbols.rows()); }
        int num_doppler() const { return static_cast<int>(symbols.cols()); }
    };

    /// Unit average energy constellation points.
    std::vector<cd> constellation_points(Constellation c);

    /// Frame of i.i.d. uniformly drawn constellation symbols.
    DDFrame random_frame(int M, int N, Constellation c, Scheme s, RandomStream &stream);

    /// x = (F_N^H kron I_M) vec(X), unitary.
    CVector oddm_modulate(const CMatrix &X);
    /// Inverse of oddm_modulate. Throws std::invalid_argument on length mismatch.
    CMatrix oddm_demodulate(const CVector &y, int M, int N);

    /// Samples at spacing T_s for any scheme. OFDM places symbol n's subcarriers
    /// X[:, n] through an M-point unitary IDFT; ODDM and OTFS share the sample
    /// values. DFT-spread variants first apply a unitary DFT across Doppler
    /// (ODDM/OTFS) or across subcarriers (OFDM).
    CVector modulate(const DDFrame &frame);
    /// Inverse of modulate, including the de-spreading.
    CMatrix demodulate(const CVector &y, int M, int N, Scheme s);

    /// Unitary spreading applied before modulation, and its inverse.
    CMatrix dft_spread(const CMatrix &X, Scheme s);
    CMatrix dft_despread(const CMatrix &X, Scheme s);

    /// Raised-cosine g(t) = a(t) * a^*(-t) with t in units of T_s.
    double pulse_g(double t, double rolloff);
    /// Square-root raised cosine a(t), t in units of T_s, unit energy per T_s.
    double pulse_a(double t, double rolloff);
    /// g(t) by numerical quadrature of a(s) a(s - t) over |s| <= span.
    double pulse_g_numeric(double t, double rolloff, double span = 40.0, int points_per_ts = 64);

    CVector add_cp(const CVector &x, int cp_length);
    CVector remove_cp(const CVector &x, int cp_length);

    /// Oversampled continuous-time approximation used for PAPR.
    /// ODDM-family: cyclic superposition of a(t - q T_s) truncated to |t| <= Q T_s.
    /// OTFS/OFDM-family: per-symbol rectangular pulse, band-limited interpolation.
    CVector shaped_waveform(const DDFrame &frame, int oversample, int half_span, double rolloff);

    /// 10 log10(max |x|^2 / mean |x|^2). Throws std::domain_error on zero energy.
    double papr_db(const CVector &x);
    double papr_db(const DDFrame &frame, int oversample, int half_span, double rolloff);
} // namespace oddm

#endif
