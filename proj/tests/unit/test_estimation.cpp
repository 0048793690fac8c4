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

#include "oddm/beamforming.hpp"
#include "oddm/estimation.hpp"
#include "oddm/optimizer.hpp"

using namespace oddm;

namespace
{
    struct Link
    {
        ScenarioConfig cfg;
        TargetParams target;
        CMatrix X_dd, X_time, F, W;
    };

    Link desk_link(double noise_variance, std::uint64_t seed = 1)
    {
        Link k;
        k.cfg = desk_profile();
        k.cfg.noise_variance = noise_variance;
        RandomStream s = rng_stream(seed, "estimation/link");
        k.X_dd.resize(k.cfg.frame_size(), k.cfg.num_streams);
        for (auto &v : k.X_dd.reshaped())
            v = std::polar(1.0, pi / 4 + pi / 2 * double(s.below(4)));
        k.X_time = dd_to_time(k.X_dd, k.cfg.num_delay_bins, k.cfg.num_doppler_bins);
        k.F = sensing_precoder(k.target.azimuth_deg, k.target.elevation_deg, k.cfg).effective;
        k.W = combiner_from_genes({{12.0, 85.0}, {18.0, 92.0}, {14.0, 97.0}, {16.0, 88.0}}, k.cfg).effective;
        return k;
    }

    CMatrix receive(const Link &k, RandomStream &s) { return mimo_receive(k.X_dd, k.F, k.W, {k.target}, k.cfg, s); }

    // Target whose delay and Doppler fall exactly on grid points.
    TargetParams on_grid_target(const ScenarioConfig &cfg, int l, int k)
    {
        TargetParams t;
        t.range_m = 0.5 * speed_of_light * l * cfg.sample_period();
        t.velocity_mps = k * cfg.doppler_resolution() * speed_of_light / (2.0 * cfg.carrier_frequency_hz);
        return t;
    }
} // namespace

TEST_CASE("path coefficient and ML objective")
{
    RandomStream s = rng_stream(1, "est/alpha");
    const CMatrix B = oracle::random_matrix(20, 3, s);
    const cd alpha{0.3, -1.2};
    CHECK(std::abs(alpha_hat(alpha * B, B) - alpha) < 1e-14);
    CHECK(ml_objective(alpha * B, B) == doctest::Approx(std::norm(alpha) * B.squaredNorm()).epsilon(1e-13));
    const CMatrix Y = oracle::random_matrix(20, 3, s);
    CHECK(ml_objective(Y, B) == doctest::Approx(std::norm((Y.adjoint() * B).trace()) / B.squaredNorm()).epsilon(1e-13));
    // Cauchy-Schwarz: the objective never exceeds ||Y||^2.
    CHECK(ml_objective(Y, B) <= Y.squaredNorm());
    CHECK_THROWS_AS(alpha_hat(Y, CMatrix::Zero(20, 3)), std::domain_error);
}

TEST_CASE("coordinate golden-section search")
{
    auto bowl = [](const std::vector<double> &x)
    { return -(x[0] - 0.3) * (x[0] - 0.3) - 2.0 * (x[1] + 0.7) * (x[1] + 0.7) + 0.5 * (x[0] - 0.3) * (x[1] + 0.7); };
    const BoxSearchResult r = coordinate_golden_search(bowl, {0.0, 0.0}, {-1.0, -1.0}, {1.0, 1.0}, 200, 1e-12);
    CHECK(r.x[0] == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(r.x[1] == doctest::Approx(-0.7).epsilon(1e-6));
    CHECK(r.improved);
    CHECK(r.value >= bowl({0.0, 0.0}));

    // Optimum outside the box lands on the boundary.
    const BoxSearchResult edge = coordinate_golden_search(bowl, {0.0, 0.0}, {-1.0, -0.5}, {0.1, 1.0}, 200, 1e-12);
    CHECK(edge.x[0] <= 0.1);
    CHECK(edge.x[1] == doctest::Approx(-0.5).epsilon(1e-6));

    // A start at the maximum is kept.
    const BoxSearchResult still = coordinate_golden_search(bowl, {0.3, -0.7}, {-1.0, -1.0}, {1.0, 1.0}, 50, 1e-12);
    CHECK_FALSE(still.improved);
    CHECK(still.value == bowl({0.3, -0.7}));
}

TEST_CASE("delay-Doppler grid search and refinement")
{
    const ScenarioConfig cfg = desk_profile();
    const DelayDopplerGrid g = DelayDopplerGrid::from_config(cfg);
    CHECK(g.l_count == cfg.cp_length);
    CHECK(g.k_min == -3);
    CHECK(g.k_max == 4);

    auto peak = [](double l, double k) { return 1.0 / (1.0 + (l - 6.3) * (l - 6.3) + 3.0 * (k + 1.4) * (k + 1.4)); };
    const DelayDopplerEstimate e = search_delay_doppler(peak, g, cfg.cp_length, Execution::serial);
    CHECK(e.grid_l == 6);
    CHECK(e.grid_k == -1);
    CHECK(e.l == doctest::Approx(6.3).epsilon(1e-6));
    CHECK(e.k == doctest::Approx(-1.4).epsilon(1e-6));
    CHECK(e.objective >= e.grid_objective);

    const DelayDopplerEstimate flat = search_delay_doppler([](double, double) { return 1.0; }, g, cfg.cp_length,
                                                           Execution::parallel);
    CHECK(flat.grid_l == 0);
    CHECK(flat.grid_k == g.k_min);
}

TEST_CASE("sensing problem objective")
{
    Link k = desk_link(0.5);
    RandomStream s = rng_stream(2, "est/problem");
    const CMatrix Y = receive(k, s);
    const DelayDoppler dd = derive_delay_doppler(k.target, k.cfg);
    const SensingProblem plain(Y, k.X_time, k.F, k.W, k.cfg, false);
    const CMatrix B = plain.basis(14.2, 91.0, dd.l + 0.1, dd.k);
    CHECK(oracle::rel_error(B, mimo_echo(k.X_time, k.F, k.W, dd.l + 0.1, dd.k, 1.0, 14.2, 91.0, k.cfg)) < 1e-14);
    CHECK(plain.objective(14.2, 91.0, dd.l + 0.1, dd.k) == doctest::Approx(ml_objective(Y, B)).epsilon(1e-11));
    CHECK(std::abs(plain.alpha(14.2, 91.0, dd.l + 0.1, dd.k) - alpha_hat(Y, B)) < 1e-12 * std::abs(alpha_hat(Y, B)));

    // The whitened objective depends only on the combiner column space.
    s = rng_stream(3, "est/problem/mix");
    const CMatrix R = CMatrix::Identity(4, 4) + 0.3 * oracle::random_matrix(4, 4, s);
    const SensingProblem white(Y, k.X_time, k.F, k.W, k.cfg, true);
    const SensingProblem mixed(Y * R.conjugate(), k.X_time, k.F, k.W * R, k.cfg, true);
    CHECK(mixed.objective(14.2, 91.0, dd.l, dd.k) ==
          doctest::Approx(white.objective(14.2, 91.0, dd.l, dd.k)).epsilon(1e-9));

    CHECK_THROWS_AS(SensingProblem(Y.leftCols(2), k.X_time, k.F, k.W, k.cfg, true), std::invalid_argument);
}

TEST_CASE("noiseless MUSIC")
{
    Link k = desk_link(0.0);
    RandomStream s = rng_stream(4, "est/music");
    const CMatrix Y = receive(k, s);
    const AngleGrid grid = AngleGrid::around(15.0, 90.0, 8.0, 1.0);
    CHECK(grid.theta_deg.size() == 17);
    CHECK(grid.phi_deg.size() == 17);
    for (bool whiten : {false, true})
    {
        EstimatorOptions opt;
        opt.whiten = whiten;
        const MusicResult m = music_angles(Y, k.W, k.cfg, AngleGrid::around(13.0, 92.0, 8.0, 1.0), opt);
        CHECK(m.theta_deg == 15.0);
        CHECK(m.phi_deg == 90.0);
        CHECK(m.confident);
        CHECK(m.eigenvalues.size() == 4);
        for (int i = 1; i < 4; ++i)
            CHECK(m.eigenvalues[i] >= m.eigenvalues[i - 1]);
    }
    CHECK_THROWS_AS(music_angles(CMatrix::Zero(256, 4), k.W, k.cfg, grid), std::domain_error);
    CHECK_THROWS_AS(music_angles(Y.leftCols(1), k.W.leftCols(1), k.cfg, grid), std::invalid_argument);
    // Elevation grid points outside [0, 180] are dropped.
    CHECK(AngleGrid::around(0.0, 3.0, 5.0, 1.0).phi_deg.front() == 0.0);
    CHECK_THROWS_AS(AngleGrid::around(0.0, 90.0, 5.0, 0.0), std::invalid_argument);
}

TEST_CASE("noiseless estimation is exact on the grid and accurate off it")
{
    SUBCASE("on grid")
    {
        Link k = desk_link(0.0);
        k.target = on_grid_target(k.cfg, 7, -2);
        RandomStream s = rng_stream(5, "est/ongrid");
        const SensingProblem p(receive(k, s), k.X_time, k.F, k.W, k.cfg, true);
        const EstimationResult e = estimate(p);
        CHECK(e.trace.delay_doppler.grid_l == 7);
        CHECK(e.trace.delay_doppler.grid_k == -2);
        CHECK(std::abs(e.l - 7.0) < 1e-6);
        CHECK(std::abs(e.k + 2.0) < 1e-6);
        CHECK(std::abs(e.theta_deg - 15.0) < 1e-6);
        CHECK(std::abs(e.phi_deg - 90.0) < 1e-6);
        CHECK(std::abs(e.alpha_hat - k.target.path_coeff) < 1e-6);
    }
    SUBCASE("off grid")
    {
        Link k = desk_link(0.0);
        k.target.azimuth_deg = 15.37;
        k.target.elevation_deg = 89.41;
        RandomStream s = rng_stream(6, "est/offgrid");
        const SensingProblem p(receive(k, s), k.X_time, k.F, k.W, k.cfg, true);
        const EstimationResult e = estimate(p);
        const DelayDoppler dd = derive_delay_doppler(k.target, k.cfg);
        CHECK(std::abs(e.l - dd.l) < 1e-3);
        CHECK(std::abs(e.k - dd.k) < 1e-3);
        CHECK(std::abs(e.theta_deg - k.target.azimuth_deg) < 1e-3);
        CHECK(std::abs(e.phi_deg - k.target.elevation_deg) < 1e-3);
        CHECK(e.range_m == doctest::Approx(k.target.range_m).epsilon(1e-4));
        CHECK(e.velocity_mps == doctest::Approx(k.target.velocity_mps).epsilon(1e-3));
        CHECK(e.delay_s == doctest::Approx(e.l * k.cfg.sample_period()).epsilon(1e-12));
        CHECK(e.objective >= e.trace.coarse_objective);
    }
}

TEST_CASE("serial and parallel estimation agree bit for bit")
{
    Link k = desk_link(2.0);
    RandomStream s = rng_stream(7, "est/exec");
    const SensingProblem p(receive(k, s), k.X_time, k.F, k.W, k.cfg, true);
    EstimatorOptions a, b;
    a.exec = Execution::serial;
    b.exec = Execution::parallel;
    const EstimationResult ea = estimate(p, a), eb = estimate(p, b);
    CHECK(ea.theta_deg == eb.theta_deg);
    CHECK(ea.phi_deg == eb.phi_deg);
    CHECK(ea.l == eb.l);
    CHECK(ea.k == eb.k);
    CHECK(ea.objective == eb.objective);
}
