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

#include "doctest.h"
#include "oracles.hpp"

#include "oddm/channel.hpp"
#include "oddm/waveform.hpp"

using namespace oddm;

namespace
{
    // Non-cyclic reference for linear_delay_doppler.
    CVector linear_oracle(const CVector &x, double l, double k, int MN, int Q, double b)
    {
        const double fl = std::floor(l), frac = l - fl;
        CVector y = CVector::Zero(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i)
        {
            for (int m = -Q; m <= Q + 1; ++m)
            {
                const long long src = (long long)i - m - (long long)fl;
                if (src >= 0 && src < x.size())
                    y[i] += pulse_g(m - frac, b) * x[src];
            }
            y[i] *= std::polar(1.0, 2.0 * pi * k * double(i) / MN);
        }
        return y;
    }
} // namespace

TEST_CASE("steering vector matches the element-position formula")
{
    oracle::for_all(30, "channel/steering",
                    [](RandomStream &s, int)
                    {
                        UpaGeometry g{1 + int(s.below(6)), 1 + int(s.below(6)), s.uniform(0.3, 0.7)};
                        const double th = s.uniform(-90, 90), ph = s.uniform(0, 180);
                        const CVector a = steering_vector(th, ph, g);
                        CHECK(a.size() == g.size());
                        CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-14));
                        CHECK(oracle::rel_error(a, oracle::steering(th, ph, g.ny, g.nz, g.spacing_wavelengths)) < 1e-13);
                        const CMatrix A = sensing_matrix(a);
                        CHECK(oracle::rel_error(A, A.transpose()) == 0.0);
                    });
}

TEST_CASE("steering derivatives agree with central differences")
{
    const UpaGeometry g{8, 8, 0.5};
    oracle::for_all(20, "channel/derivatives",
                    [&](RandomStream &s, int)
                    {
                        const double th = s.uniform(-60, 60), ph = s.uniform(30, 150);
                        const double h = 1e-6; // degrees
                        const SteeringDerivatives d = steering_derivatives(th, ph, g);
                        const CVector fd_th = (steering_vector(th + h, ph, g) - steering_vector(th - h, ph, g)) /
                                              (2.0 * deg2rad(h));
                        const CVector fd_ph = (steering_vector(th, ph + h, g) - steering_vector(th, ph - h, g)) /
                                              (2.0 * deg2rad(h));
                        CHECK(oracle::rel_error(d.d_theta, fd_th) < 1e-6);
                        CHECK(oracle::rel_error(d.d_phi, fd_ph) < 1e-6);
                    });
}

TEST_CASE("fast delay-Doppler operator equals the dense matrix")
{
    oracle::for_all(60, "channel/dense",
                    [](RandomStream &s, int)
                    {
                        const int Q = 1 + int(s.below(5));
                        const int MN = 2 * Q + 2 + int(s.below(60));
                        const double l = s.uniform(0.0, double(MN));
                        const double k = s.uniform(-double(MN) / 2, double(MN) / 2);
                        const double b = s.uniform(0.05, 1.0);
                        const DelayDopplerOperator op(l, k, MN, Q, b);
                        const CMatrix D = oracle::delay_doppler_matrix(l, k, MN, Q, b);
                        const CMatrix X = oracle::random_matrix(MN, 3, s);
                        CHECK(oracle::rel_error(op.apply(X), D * X) < 1e-12);
                        CHECK(oracle::rel_error(op.apply(CVector(X.col(1))), D * X.col(1)) < 1e-12);
                        CHECK(op.frobenius_norm_sq() == doctest::Approx(D.squaredNorm()).epsilon(1e-12));
                        CHECK(op.shift() == int(std::floor(l)));
                        CHECK(op.taps().size() == 2 * Q + 2);

                        CVector y = op.apply_delay(CVector(X.col(0)));
                        op.apply_doppler_inplace(y.data());
                        CHECK(oracle::rel_error(y, D * X.col(0)) < 1e-12);
                    });
}

TEST_CASE("integer delay and Doppler reduce to a cyclic shift and phase ramp")
{
    RandomStream s = rng_stream(3, "channel/integer");
    const int MN = 64;
    const CVector x = oracle::random_vector(MN, s);
    for (int l = 0; l < 16; ++l)
        for (int k = -4; k <= 4; ++k)
        {
            const DelayDopplerOperator op(l, k, MN, 4, 0.3);
            CHECK(oracle::rel_error(op.apply(x), oracle::shift_and_ramp(x, l, k)) < 1e-14);
            CHECK(op.frobenius_norm_sq() == doctest::Approx(double(MN)).epsilon(1e-14));
        }
}

TEST_CASE("operator norm: exact at integer delays, below one at fractional delays")
{
    // Truncating the raised-cosine taps to 2Q + 2 samples drops energy when the
    // delay falls between samples, so ||G_l x|| < ||x|| off the grid.
    const int MN = 256, Q = 4;
    const double b = 0.1;
    RandomStream s = rng_stream(5, "channel/norm");
    const CVector x = oracle::random_vector(MN, s);
    CHECK(DelayDopplerOperator(7.0, 1.3, MN, Q, b).apply(x).norm() == doctest::Approx(x.norm()).epsilon(1e-13));
    double previous = 1.0;
    for (double frac : {0.1, 0.25, 0.5})
    {
        const double per_entry = DelayDopplerOperator(7.0 + frac, 0.0, MN, Q, b).frobenius_norm_sq() / MN;
        CHECK(per_entry < previous);
        CHECK(per_entry > 0.9);
        previous = per_entry;
    }
    // Symmetric about the half-sample point.
    CHECK(DelayDopplerOperator(3.25, 0.0, MN, Q, b).frobenius_norm_sq() ==
          doctest::Approx(DelayDopplerOperator(3.75, 0.0, MN, Q, b).frobenius_norm_sq()).epsilon(1e-12));
}

TEST_CASE("operator argument checks")
{
    CHECK_THROWS_AS(DelayDopplerOperator(1.0, 0.0, 9, 4, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(DelayDopplerOperator(std::nan(""), 0.0, 64, 4, 0.1), std::invalid_argument);
    const DelayDopplerOperator op(1.0, 0.0, 64, 4, 0.1);
    CHECK_THROWS_AS(op.apply(CVector(CVector::Zero(10))), std::invalid_argument);
}

TEST_CASE("linear delay-Doppler on a sample stream")
{
    oracle::for_all(20, "channel/linear",
                    [](RandomStream &s, int)
                    {
                        const int MN = 128, Q = 4, len = 100 + int(s.below(100));
                        const double l = s.uniform(0.0, 20.0), k = s.uniform(-10, 10), b = s.uniform(0.1, 0.5);
                        const CVector x = oracle::random_vector(len, s);
                        CHECK(oracle::rel_error(linear_delay_doppler(x, l, k, MN, Q, b),
                                                linear_oracle(x, l, k, MN, Q, b)) < 1e-12);
                    });
}

TEST_CASE("CP makes the linear channel cyclic on the frame")
{
    const ScenarioConfig cfg = desk_profile();
    const int MN = cfg.frame_size(), cp = cfg.cp_length, Q = cfg.pulse_half_span;
    RandomStream s = rng_stream(8, "channel/cp");
    const CVector x = oracle::random_vector(MN, s);
    const double l = 5.12354, k = 2.7797;
    const CVector lin = remove_cp(linear_delay_doppler(add_cp(x, cp), l, k, MN, Q, cfg.rolloff), cp);
    // The CP occupies absolute samples [0, cp); remove it and undo its Doppler offset.
    const CVector cyc = std::polar(1.0, 2.0 * pi * k * cp / MN) *
                        DelayDopplerOperator(l, k, MN, Q, cfg.rolloff).apply(x);
    // Taps up to l + Q + 1 = 10.1 samples back stay inside the 16-sample prefix.
    CHECK(oracle::rel_error(lin, cyc) < 1e-12);
}

TEST_CASE("SISO channel sums the targets")
{
    const ScenarioConfig cfg = desk_profile();
    RandomStream s = rng_stream(4, "channel/siso");
    const CVector x = oracle::random_vector(cfg.frame_size(), s);
    TargetParams t1, t2;
    t2.range_m = 80.0;
    t2.velocity_mps = -30.0;
    t2.path_coeff = {0.2, 0.4};
    const auto d1 = derive_delay_doppler(t1, cfg), d2 = derive_delay_doppler(t2, cfg);
    const CVector expected =
        t1.path_coeff * oracle::delay_doppler_matrix(d1.l, d1.k, cfg.frame_size(), cfg.pulse_half_span, cfg.rolloff) * x +
        t2.path_coeff * oracle::delay_doppler_matrix(d2.l, d2.k, cfg.frame_size(), cfg.pulse_half_span, cfg.rolloff) * x;
    CHECK(oracle::rel_error(siso_channel(x, {t1, t2}, cfg), expected) < 1e-12);
    CHECK_THROWS_AS(siso_channel(CVector::Zero(3), {t1}, cfg), std::invalid_argument);
}

TEST_CASE("MIMO echo equals the dense Kronecker construction")
{
    ScenarioConfig cfg = oracle::tiny_config();
    cfg.noise_variance = 0.0;
    const int M = cfg.num_delay_bins, N = cfg.num_doppler_bins, MN = cfg.frame_size();
    oracle::for_all(20, "channel/kron",
                    [&](RandomStream &s, int)
                    {
                        const CMatrix X_dd = oracle::random_matrix(MN, cfg.num_streams, s);
                        const CMatrix F = oracle::random_matrix(4, cfg.num_streams, s);
                        const CMatrix W = oracle::random_matrix(4, cfg.num_streams, s);
                        TargetParams t;
                        t.azimuth_deg = s.uniform(-60, 60);
                        t.elevation_deg = s.uniform(40, 140);
                        t.range_m = s.uniform(1.0, 2.0 * 299792458.0 * cfg.max_delay() / 2.0 - 1.0) / 2.0;
                        t.velocity_mps = s.uniform(-100, 100);
                        t.path_coeff = s.complex_normal();
                        const auto dd = derive_delay_doppler(t, cfg);

                        const CVector a = oracle::steering(t.azimuth_deg, t.elevation_deg, 2, 2, 0.5);
                        const CMatrix A = a * a.transpose();
                        const CMatrix DG = oracle::delay_doppler_matrix(dd.l, dd.k, MN, cfg.pulse_half_span, cfg.rolloff);
                        const CMatrix X_time = oracle::oddm_modulation_matrix(M, N) * X_dd;
                        const CVector vecY = std::sqrt(16.0) * t.path_coeff *
                                             oracle::kron(W.adjoint() * A * F, DG) * X_time.reshaped();

                        RandomStream unused = rng_stream(0, "none");
                        const CMatrix Y = mimo_receive(X_dd, F, W, {t}, cfg, unused);
                        CHECK(oracle::rel_error(Y.reshaped(), vecY) < 1e-12);
                        CHECK(oracle::rel_error(dd_to_time(X_dd, M, N), X_time) < 1e-13);
                    });
}

TEST_CASE("mimo_receive shape and range checks")
{
    const ScenarioConfig cfg = desk_profile();
    RandomStream s = rng_stream(1, "shapes");
    const CMatrix X = CMatrix::Ones(cfg.frame_size(), cfg.num_streams);
    const CMatrix F = CMatrix::Ones(cfg.num_tx_antennas, cfg.num_streams);
    CHECK_THROWS_AS(mimo_receive(X.leftCols(2), F, F, {TargetParams{}}, cfg, s), std::invalid_argument);
    CHECK_THROWS_AS(mimo_receive(X, F.topRows(3), F, {TargetParams{}}, cfg, s), std::invalid_argument);
    CHECK_THROWS_AS(mimo_receive(X, F, F.leftCols(1), {TargetParams{}}, cfg, s), std::invalid_argument);
    TargetParams far;
    far.range_m = 500.0;
    CHECK_THROWS_AS(mimo_receive(X, F, F, {far}, cfg, s), std::out_of_range);
    CHECK_THROWS_AS(dd_to_time(X.topRows(5), cfg.num_delay_bins, cfg.num_doppler_bins), std::invalid_argument);
}

TEST_CASE("combined noise covariance")
{
    RandomStream s = rng_stream(2, "noise");
    const CMatrix W = oracle::random_matrix(16, 3, s);
    const double sigma2 = 0.7;
    const Eigen::Index K = 40000;
    const CMatrix Nc = combined_noise(W, sigma2, K, s);
    const CMatrix R = Nc.transpose() * Nc.conjugate() / double(K);
    CHECK(oracle::rel_error(R, sigma2 * W.adjoint() * W) < 0.05);
}
