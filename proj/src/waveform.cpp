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

#include "oddm/waveform.hpp"

#include "oddm/fft.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace
{
    using oddm::cd;
    using oddm::pi;

    double sinc(double x)
    {
        if (x == 0.0)
            return 1.0;
        return std::sin(pi * x) / (pi * x);
    }

    void check_frame_length(const oddm::CVector &y, int M, int N)
    {
        if (M <= 0 || N <= 0 || y.size() != static_cast<Eigen::Index>(M) * N)
            throw std::invalid_argument("demodulate: expected " + std::to_string(static_cast<long long>(M) * N) +
                                        " samples, got " + std::to_string(y.size()));
    }

    // Band-limited interpolation of one block by zero-padding its spectrum.
    oddm::CVector interpolate_block(const oddm::CVector &block, int oversample)
    {
        const int M = static_cast<int>(block.size());
        oddm::CVector spec = block;
        oddm::fft_inplace(spec.data(), M, false);
        oddm::CVector padded = oddm::CVector::Zero(static_cast<Eigen::Index>(M) * oversample);
        const int half = M / 2;
        for (int k = 0; k < M; ++k)
        {
            const int dst = k < half ? k : k + M * (oversample - 1);
            padded[dst] = spec[k];
        }
        oddm::fft_inplace(padded.data(), static_cast<int>(padded.size()), true);
        return padded / static_cast<double>(M);
    }
} // namespace

std::string_view oddm::scheme_name(Scheme s)
{
    switch (s)
    {
    case Scheme::oddm: return "ODDM";
    case Scheme::otfs: return "OTFS";
    case Scheme::ofdm: return "OFDM";
    case Scheme::dfts_oddm: return "DFTS_ODDM";
    case Scheme::dfts_otfs: return "DFTS_OTFS";
    case Scheme::dfts_ofdm: return "DFTS_OFDM";
    }
    throw std::invalid_argument("unknown scheme");
}

oddm::Scheme oddm::scheme_from_name(std::string_view name)
{
    for (Scheme s : all_schemes)
        if (scheme_name(s) == name)
            return s;
    throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

bool oddm::is_dft_spread(Scheme s)
{
    return s == Scheme::dfts_oddm || s == Scheme::dfts_otfs || s == Scheme::dfts_ofdm;
}

oddm::Scheme oddm::base_scheme(Scheme s)
{
    switch (s)
    {
    case Scheme::dfts_oddm: return Scheme::oddm;
    case Scheme::dfts_otfs: return Scheme::otfs;
    case Scheme::dfts_ofdm: return Scheme::ofdm;
    default: return s;
    }
}

std::vector<oddm::cd> oddm::constellation_points(Constellation c)
{
    std::vector<cd> pts;
    if (c == Constellation::qpsk)
    {
        const double s = 1.0 / std::sqrt(2.0);
        pts = {{s, s}, {-s, s}, {-s, -s}, {s, -s}};
    }
    else
    {
        // Levels {-3,-1,1,3}, average energy 10.
        const double s = 1.0 / std::sqrt(10.0);
        for (int i = -3; i <= 3; i += 2)
            for (int q = -3; q <= 3; q += 2)
                pts.emplace_back(s * i, s * q);
    }
    return pts;
}

oddm::DDFrame oddm::random_frame(int M, int N, Constellation c, Scheme s, RandomStream &stream)
{
    if (M <= 0 || N <= 0)
        throw std::invalid_argument("random_frame: M and N must be positive");
    const auto pts = constellation_points(c);
    DDFrame frame;
    frame.constellation = c;
    frame.scheme = s;
    frame.symbols.resize(M, N);
    for (int n = 0; n < N; ++n)
        for (int m = 0; m < M; ++m)
            frame.symbols(m, n) = pts[stream.below(pts.size())];
    return frame;
}

oddm::CVector oddm::oddm_modulate(const CMatrix &X)
{
    return vec(dft_rows(X, true));
}

oddm::CMatrix oddm::oddm_demodulate(const CVector &y, int M, int N)
{
    check_frame_length(y, M, N);
    return dft_rows(unvec(y, M, N), false);
}

oddm::CMatrix oddm::dft_spread(const CMatrix &X, Scheme s)
{
    switch (s)
    {
    case Scheme::dfts_oddm:
    case Scheme::dfts_otfs: return dft_rows(X, false);
    case Scheme::dfts_ofdm: return dft_columns(X, false);
    default: return X;
    }
}

oddm::CMatrix oddm::dft_despread(const CMatrix &X, Scheme s)
{
    switch (s)
    {
    case Scheme::dfts_oddm:
    case Scheme::dfts_otfs: return dft_rows(X, true);
    case Scheme::dfts_ofdm: return dft_columns(X, true);
    default: return X;
    }
}

oddm::CVector oddm::modulate(const DDFrame &frame)
{
    const CMatrix spread = dft_spread(frame.symbols, frame.scheme);
    if (base_scheme(frame.scheme) == Scheme::ofdm)
        return vec(dft_columns(spread, true));
    return oddm_modulate(spread);
}

oddm::CMatrix oddm::demodulate(const CVector &y, int M, int N, Scheme s)
{
    check_frame_length(y, M, N);
    CMatrix X;
    if (base_scheme(s) == Scheme::ofdm)
        X = dft_columns(unvec(y, M, N), false);
    else
        X = oddm_demodulate(y, M, N);
    return dft_despread(X, s);
}

double oddm::pulse_g(double t, double rolloff)
{
    if (t == 0.0)
        return 1.0;
    if (std::nearbyint(t) == t)
        return 0.0;
    const double bt2 = 2.0 * rolloff * t;
    const double den = 1.0 - bt2 * bt2;
    if (std::abs(den) < 1e-10)
        return 0.25 * pi * sinc(0.5 / rolloff);
    return sinc(t) * std::cos(pi * rolloff * t) / den;
}

double oddm::pulse_a(double t, double rolloff)
{
    const double b = rolloff;
    if (b == 0.0)
        return sinc(t);
    if (t == 0.0)
        return 1.0 - b + 4.0 * b / pi;
    const double bt4 = 4.0 * b * t;
    if (std::abs(1.0 - bt4 * bt4) < 1e-10)
    {
        const double arg = pi / (4.0 * b);
        return b / std::sqrt(2.0) * ((1.0 + 2.0 / pi) * std::sin(arg) + (1.0 - 2.0 / pi) * std::cos(arg));
    }
    const double num = std::sin(pi * t * (1.0 - b)) + bt4 * std::cos(pi * t * (1.0 + b));
    return num / (pi * t * (1.0 - bt4 * bt4));
}

double oddm::pulse_g_numeric(double t, double rolloff, double span, int points_per_ts)
{
    // Trapezoidal rule; the integrand decays like 1/s^4 so the tails are small.
    const double h = 1.0 / points_per_ts;
    const long n = static_cast<long>(std::ceil(2.0 * span / h));
    double acc = 0.0;
    for (long i = 0; i <= n; ++i)
    {
        const double s = -span + i * h;
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        acc += w * pulse_a(s, rolloff) * pulse_a(s - t, rolloff);
    }
    return acc * h;
}

oddm::CVector oddm::add_cp(const CVector &x, int cp_length)
{
    if (cp_length < 0 || cp_length >= x.size())
        throw std::invalid_argument("add_cp: cp_length must lie in [0, " + std::to_string(x.size()) + ")");
    CVector y(x.size() + cp_length);
    y.head(cp_length) = x.tail(cp_length);
    y.tail(x.size()) = x;
    return y;
}

oddm::CVector oddm::remove_cp(const CVector &x, int cp_length)
{
    if (cp_length < 0 || cp_length >= x.size())
        throw std::invalid_argument("remove_cp: signal shorter than the cyclic prefix");
    return x.tail(x.size() - cp_length);
}

oddm::CVector oddm::shaped_waveform(const DDFrame &frame, int oversample, int half_span, double rolloff)
{
    if (oversample < 1)
        throw std::invalid_argument("shaped_waveform: oversample must be >= 1");
    const int M = frame.num_delay();
    const int N = frame.num_doppler();
    const CVector x = modulate(frame);
    const Eigen::Index len = x.size();
    const Scheme base = base_scheme(frame.scheme);

    if (base == Scheme::oddm)
    {
        // Pulse taps are shared by every sample with the same sub-sample phase.
        RMatrix taps(oversample, 2 * half_span + 1);
        for (int p = 0; p < oversample; ++p)
            for (int d = -half_span; d <= half_span; ++d)
                taps(p, d + half_span) = pulse_a(static_cast<double>(p) / oversample - d, rolloff);
        CVector out = CVector::Zero(len * oversample);
        for (Eigen::Index i = 0; i < len; ++i)
            for (int p = 0; p < oversample; ++p)
            {
                cd acc = 0.0;
                for (int d = -half_span; d <= half_span; ++d)
                {
                    Eigen::Index q = (i + d) % len;
                    if (q < 0)
                        q += len;
                    acc += x[q] * taps(p, d + half_span);
                }
                out[i * oversample + p] = acc;
            }
        return out;
    }

    CVector out(len * oversample);
    for (int n = 0; n < N; ++n)
        out.segment(static_cast<Eigen::Index>(n) * M * oversample, static_cast<Eigen::Index>(M) * oversample) =
            interpolate_block(x.segment(static_cast<Eigen::Index>(n) * M, M), oversample);
    return out;
}

double oddm::papr_db(const CVector &x)
{
    const double mean = x.squaredNorm() / static_cast<double>(x.size());
    if (x.size() == 0 || !(mean > 0.0))
        throw std::domain_error("papr_db: zero-energy signal");
    const double peak = x.cwiseAbs2().maxCoeff();
    return 10.0 * std::log10(peak / mean);
}

double oddm::papr_db(const DDFrame &frame, int oversample, int half_span, double rolloff)
{
    return papr_db(shaped_waveform(frame, oversample, half_span, rolloff));
}
