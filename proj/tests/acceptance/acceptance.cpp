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

// Acceptance criteria 1-12. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails or exceeds its runtime limit.
//
//   oddm_acceptance            run everything
//   oddm_acceptance 4 10       run selected criteria

#include "oracles.hpp"

#include "oddm/beamforming.hpp"
#include "oddm/crlb.hpp"
#include "oddm/estimation.hpp"
#include "oddm/harness.hpp"
#include "oddm/optimizer.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <string>

using namespace oddm;

namespace
{
    struct Outcome
    {
        bool passed;
        std::string detail;
    };

    std::string fmt(const char *f, double a)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, f, a);
        return buf;
    }

    // ---- 1 -----------------------------------------------------------------
    Outcome oracle_equivalence()
    {
        double worst = 0.0;
        oracle::for_all(200, "acceptance/1",
                        [&](RandomStream &s, int)
                        {
                            const int Q = 1 + int(s.below(6));
                            int M = 2 * Q + 2 + int(s.below(20)), N = 1 + int(s.below(8));
                            while (M * N > 256)
                                --N;
                            const int MN = M * N;
                            double l, k;
                            do
                            {
                                l = s.uniform(0.0, double(MN) / 4);
                                k = s.uniform(-double(N) / 2, double(N) / 2);
                            } while (l == std::floor(l) || k == std::floor(k));
                            const double b = s.uniform(0.05, 1.0);
                            const CMatrix fast = DelayDopplerOperator(l, k, MN, Q, b).apply(CMatrix(CMatrix::Identity(MN, MN)));
                            worst = std::max(worst, oracle::rel_error(fast, oracle::delay_doppler_matrix(l, k, MN, Q, b)));
                        });
        return {worst <= 1e-10, "max relative error " + fmt("%.2e", worst) + " over 200 operators (<= 1e-10)"};
    }

    // ---- 2 -----------------------------------------------------------------
    Outcome kronecker_factorization()
    {
        ScenarioConfig cfg = oracle::tiny_config();
        cfg.noise_variance = 0.0;
        const int M = cfg.num_delay_bins, N = cfg.num_doppler_bins, MN = cfg.frame_size();
        double worst = 0.0;
        oracle::for_all(50, "acceptance/2",
                        [&](RandomStream &s, int)
                        {
                            const CMatrix X_dd = oracle::random_matrix(MN, cfg.num_streams, s);
                            const CMatrix F = oracle::random_matrix(4, cfg.num_streams, s);
                            const CMatrix W = oracle::random_matrix(4, cfg.num_streams, s);
                            TargetParams t;
                            t.azimuth_deg = s.uniform(-60, 60);
                            t.elevation_deg = s.uniform(40, 140);
                            t.range_m = 0.5 * speed_of_light * s.uniform(0.05, 1.95) * cfg.sample_period();
                            t.velocity_mps = s.uniform(-0.9, 0.9) * cfg.doppler_resolution() * speed_of_light /
                                             (2.0 * cfg.carrier_frequency_hz);
                            t.path_coeff = s.complex_normal();
                            const DelayDoppler dd = derive_delay_doppler(t, cfg);

                            const CVector a = oracle::steering(t.azimuth_deg, t.elevation_deg, 2, 2, 0.5);
                            const CMatrix DG = oracle::delay_doppler_matrix(dd.l, dd.k, MN, cfg.pulse_half_span, cfg.rolloff);
                            const CMatrix X_time = oracle::oddm_modulation_matrix(M, N) * X_dd;
                            const CVector dense = 4.0 * t.path_coeff *
                                                  oracle::kron(W.adjoint() * a * a.transpose() * F, DG) *
                                                  X_time.reshaped();
                            RandomStream unused = rng_stream(0, "unused");
                            const CMatrix Y = mimo_receive(X_dd, F, W, {t}, cfg, unused);
                            worst = std::max(worst, oracle::rel_error(Y.reshaped(), dense));
                        });
        return {worst <= 1e-9, "max relative error " + fmt("%.2e", worst) + " over 50 instances (<= 1e-9)"};
    }

    // ---- 3 -----------------------------------------------------------------
    Outcome integer_reduction()
    {
        const int M = 8, N = 4, MN = M * N, Q = 3, Mcp = 8;
        const CMatrix I = CMatrix::Identity(MN, MN);
        double worst = 0.0;
        int cases = 0;
        for (int l = 0; l < Mcp; ++l)
            for (int k = 0; k < MN; ++k)
            {
                const CMatrix fast = DelayDopplerOperator(l, k, MN, Q, 0.1).apply(I);
                for (int c = 0; c < MN; ++c)
                    worst = std::max(worst, (fast.col(c) - oracle::shift_and_ramp(I.col(c), l, k)).cwiseAbs().maxCoeff());
                ++cases;
            }
        return {worst <= 1e-14, "max entry error " + fmt("%.2e", worst) + " over " + std::to_string(cases) +
                                    " (l, k) pairs (<= 1e-14)"};
    }

    // Random desk-scale link used by criteria 4 and 5.
    struct DeskInstance
    {
        ScenarioConfig cfg;
        double theta, phi, l, k;
        cd alpha;
        CMatrix X_time, F, W;
    };

    DeskInstance desk_instance(RandomStream &s)
    {
        DeskInstance d;
        d.cfg = desk_profile();
        d.cfg.noise_variance = s.uniform(0.5, 5.0);
        d.theta = s.uniform(-40, 40);
        d.phi = s.uniform(60, 120);
        d.l = s.uniform(0.5, 15.0);
        d.k = s.uniform(-3.5, 3.5);
        d.alpha = s.complex_normal();
        const CMatrix X_dd = pilot_frame(d.cfg, s.next_u64(), "acceptance");
        d.X_time = dd_to_time(X_dd, d.cfg.num_delay_bins, d.cfg.num_doppler_bins);
        d.F = sensing_precoder(d.theta + s.uniform(-3, 3), d.phi + s.uniform(-3, 3), d.cfg).effective;
        d.W = combiner_from_genes(random_genes(d.theta, d.phi, 10.0, d.cfg.num_rf_chains_rx, s), d.cfg).effective;
        return d;
    }

    // ---- 4 -----------------------------------------------------------------
    Outcome fim_cross_validation()
    {
        double worst = 0.0;
        oracle::for_all(20, "acceptance/4",
                        [&](RandomStream &s, int)
                        {
                            const DeskInstance d = desk_instance(s);
                            const RMatrix a = analytic_angle_fim(d.theta, d.phi, d.alpha, d.F, d.W,
                                                                 exact_gram(d.X_time, d.l, d.k, d.cfg), d.cfg)
                                                  .fim;
                            const RMatrix n = fim_block(
                                numerical_fim_4d(d.theta, d.phi, d.l, d.k, d.alpha, d.X_time, d.F, d.W, d.cfg),
                                {"theta_rad", "phi_rad", "re_alpha", "im_alpha"});
                            for (int i = 0; i < 4; ++i)
                                for (int j = 0; j < 4; ++j)
                                    worst = std::max(worst, std::abs(a(i, j) - n(i, j)) / std::sqrt(n(i, i) * n(j, j)));
                        });
        return {worst <= 1e-3, "max |J_a - J_n| / sqrt(J_n,ii J_n,jj) = " + fmt("%.2e", worst) +
                                   " over 20 instances (<= 1e-3)"};
    }

    // ---- 5 -----------------------------------------------------------------
    Outcome crlb_invariances()
    {
        double w_mix = 0.0, w_scale = 0.0, w_noise = 0.0;
        auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
        oracle::for_all(50, "acceptance/5",
                        [&](RandomStream &s, int)
                        {
                            const DeskInstance d = desk_instance(s);
                            const TransmitGram g = exact_gram(d.X_time, d.l, d.k, d.cfg);
                            const AngleCrlb base = crlb_angles(analytic_angle_fim(d.theta, d.phi, d.alpha, d.F, d.W, g, d.cfg));

                            const CMatrix R = CMatrix::Identity(4, 4) + 0.3 * oracle::random_matrix(4, 4, s);
                            const AngleCrlb mixed =
                                crlb_angles(analytic_angle_fim(d.theta, d.phi, d.alpha, d.F, d.W * R, g, d.cfg));
                            w_mix = std::max({w_mix, rel(mixed.theta_deg2, base.theta_deg2), rel(mixed.phi_deg2, base.phi_deg2)});

                            const cd c = s.complex_normal() + 0.2;
                            const AngleCrlb scaled =
                                crlb_angles(analytic_angle_fim(d.theta, d.phi, d.alpha, c * d.F, d.W, g, d.cfg));
                            w_scale = std::max({w_scale, rel(scaled.theta_deg2 * std::norm(c), base.theta_deg2),
                                                rel(scaled.phi_deg2 * std::norm(c), base.phi_deg2)});

                            ScenarioConfig noisy = d.cfg;
                            noisy.noise_variance *= 2.0;
                            const AngleCrlb doubled =
                                crlb_angles(analytic_angle_fim(d.theta, d.phi, d.alpha, d.F, d.W, g, noisy));
                            const FimReport n1 = numerical_fim_4d(d.theta, d.phi, d.l, d.k, d.alpha, d.X_time, d.F, d.W, d.cfg);
                            const FimReport n2 = numerical_fim_4d(d.theta, d.phi, d.l, d.k, d.alpha, d.X_time, d.F, d.W, noisy);
                            w_noise = std::max({w_noise, rel(doubled.theta_deg2, 2.0 * base.theta_deg2),
                                                rel(doubled.phi_deg2, 2.0 * base.phi_deg2),
                                                rel(n2.bound("range_m2"), 2.0 * n1.bound("range_m2")),
                                                rel(n2.bound("velocity_mps2"), 2.0 * n1.bound("velocity_mps2"))});
                        });
        const bool ok = w_mix <= 1e-10 && w_scale <= 1e-10 && w_noise <= 1e-10;
        return {ok, "max relative deviation: W->WR " + fmt("%.1e", w_mix) + ", F->cF " + fmt("%.1e", w_scale) +
                        ", 2 sigma^2 " + fmt("%.1e", w_noise) + " over 50 instances (<= 1e-10)"};
    }

    // ---- 6 -----------------------------------------------------------------
    Outcome noise_covariance()
    {
        const ScenarioConfig cfg = desk_profile();
        RandomStream s = rng_stream(6, "acceptance/6");
        const CMatrix W =
            combiner_from_genes(random_genes(15, 90, 20, cfg.num_rf_chains_rx, s), cfg).effective;
        const double sigma2 = 0.8;
        const Eigen::Index K = 100000;
        const CMatrix Nc = combined_noise(W, sigma2, K, s);
        const CMatrix R = Nc.transpose() * Nc.conjugate() / double(K);
        const double err = oracle::rel_error(R, sigma2 * W.adjoint() * W);
        return {err <= 0.05, "relative Frobenius error " + fmt("%.4f", err) + " at 1e5 samples (<= 0.05)"};
    }

    // ---- 7 -----------------------------------------------------------------
    Outcome estimator_consistency()
    {
        ScenarioConfig cfg = desk_profile();
        cfg.noise_variance = 0.0;
        const CMatrix X_dd = pilot_frame(cfg, 7, "acceptance/7");
        const CMatrix X_time = dd_to_time(X_dd, cfg.num_delay_bins, cfg.num_doppler_bins);
        RandomStream s = rng_stream(7, "acceptance/7/combiner");
        const CMatrix W = combiner_from_genes(random_genes(15, 90, 10, cfg.num_rf_chains_rx, s), cfg).effective;

        auto run = [&](const TargetParams &t)
        {
            const CMatrix F = sensing_precoder(15, 90, cfg).effective;
            RandomStream unused = rng_stream(0, "unused");
            const SensingProblem p(mimo_receive(X_dd, F, W, {t}, cfg, unused), X_time, F, W, cfg, true);
            return estimate(p);
        };

        TargetParams on;
        on.range_m = 0.5 * speed_of_light * 7 * cfg.sample_period();
        on.velocity_mps = -2 * cfg.doppler_resolution() * speed_of_light / (2.0 * cfg.carrier_frequency_hz);
        const EstimationResult a = run(on);
        const double on_err = std::max({std::abs(a.l - 7.0), std::abs(a.k + 2.0), std::abs(a.theta_deg - 15.0),
                                        std::abs(a.phi_deg - 90.0)});
        const bool on_ok = a.trace.delay_doppler.grid_l == 7 && a.trace.delay_doppler.grid_k == -2 && on_err < 1e-6;

        TargetParams off; // 50 m, 300 km/h: l = 5.1235, k = 2.7797
        off.azimuth_deg = 15.37;
        off.elevation_deg = 89.41;
        const DelayDoppler dd = derive_delay_doppler(off, cfg);
        const EstimationResult b = run(off);
        const double el = std::abs(b.l - dd.l), ek = std::abs(b.k - dd.k);
        const double ea = std::max(std::abs(b.theta_deg - off.azimuth_deg), std::abs(b.phi_deg - off.elevation_deg));
        const bool off_ok = el < 1e-3 && ek < 1e-3 && ea < 1e-3;
        return {on_ok && off_ok, "on-grid max error " + fmt("%.1e", on_err) + "; off-grid |dl| " + fmt("%.1e", el) +
                                     " T_s, |dk| " + fmt("%.1e", ek) + " /(NT), angle " + fmt("%.1e", ea) +
                                     " deg (< 1e-3)"};
    }

    // ---- 8 -----------------------------------------------------------------
    Outcome rmse_near_crlb()
    {
        ScenarioConfig cfg = desk_profile();
        const TargetParams t;
        const DelayDoppler dd = derive_delay_doppler(t, cfg);
        const CMatrix X_dd = pilot_frame(cfg, cfg.rng_seed, "acceptance/8");
        const CMatrix X_time = dd_to_time(X_dd, cfg.num_delay_bins, cfg.num_doppler_bins);
        const CMatrix F = sensing_precoder(t.azimuth_deg, t.elevation_deg, cfg).effective;
        const CombinerFitness fitness(t.azimuth_deg, t.elevation_deg, t.path_coeff, dd.l, dd.k, F, cfg);
        const OptimizationResult ga = optimize_combiner(fitness, t.azimuth_deg, t.elevation_deg, cfg, GaConfig{}, 8);
        const CMatrix &W = ga.combiner.effective;
        cfg.noise_variance = noise_for_theta_std(0.01, t, X_time, F, W, cfg);
        const double sqrt_crlb =
            std::sqrt(numerical_fim_4d(t.azimuth_deg, t.elevation_deg, dd.l, dd.k, t.path_coeff, X_time, F, W, cfg)
                          .bound("theta_deg2"));
        const SensingTrialStats st =
            run_sensing_trials(t, X_dd, F, W, cfg, EstimatorOptions{}, 50, "acceptance/8", Execution::parallel);
        const double ratio = st.rmse_theta_deg / sqrt_crlb;
        return {ratio <= 3.0, "RMSE(theta) " + fmt("%.5f", st.rmse_theta_deg) + " deg, sqrt(CRLB) " +
                                  fmt("%.5f", sqrt_crlb) + " deg, ratio " + fmt("%.3f", ratio) + " (<= 3), SNR " +
                                  fmt("%.1f", mimo_snr_db(t.path_coeff, X_time, cfg)) + " dB"};
    }

    std::string describe(const ExperimentReport &r)
    {
        std::string s;
        for (const auto &c : r.checks)
            s += std::string(s.empty() ? "" : "; ") + (c.passed ? "ok " : "FAILED ") + c.name + " = " +
                 fmt("%.4g", c.value) + " (" + fmt("%g", c.threshold) + (c.detail.empty() ? "" : " " + c.detail) + ")";
        return s;
    }

    // ---- 9 -----------------------------------------------------------------
    Outcome genetic_optimizer()
    {
        const ExperimentReport r = run_optimize_combiner(default_spec(ExperimentKind::optimize_combiner, desk_profile()));
        return {r.passed(), describe(r)};
    }

    // ---- 10 ----------------------------------------------------------------
    Outcome papr()
    {
        ExperimentSpec spec = default_spec(ExperimentKind::papr, paper_profile());
        spec.trials = 10000;
        const ExperimentReport r = run_papr(spec);
        bool ok = true;
        for (std::size_t i = 0; i < 4 && i < r.checks.size(); ++i)
            ok = ok && r.checks[i].passed;
        return {ok, describe(r)};
    }

    // ---- 11 ----------------------------------------------------------------
    Outcome doppler_robustness()
    {
        const ScenarioConfig cfg = desk_profile();
        const SisoRmseResult r = compute_siso_rmse(cfg, TargetParams{}, {3.0, 300.0}, {20.0}, 200, cfg.rng_seed,
                                                   Execution::parallel);
        const double ofdm = r.rmse_range_m.at("OFDM").at(300.0)[0] / r.rmse_range_m.at("OFDM").at(3.0)[0];
        const double oddm = r.rmse_range_m.at("ODDM").at(300.0)[0] / r.rmse_range_m.at("ODDM").at(3.0)[0];
        return {ofdm >= 5.0 && oddm <= 2.0, "range RMSE ratio 300/3 km/h at 20 dB: OFDM " + fmt("%.2f", ofdm) +
                                                " (>= 5), ODDM " + fmt("%.2f", oddm) + " (<= 2), 200 trials"};
    }

    // ---- 12 ----------------------------------------------------------------
    Outcome isac_tradeoff()
    {
        const ExperimentReport r = run_isac_tradeoff(default_spec(ExperimentKind::isac_tradeoff, desk_profile()));
        return {r.passed(), describe(r)};
    }

    struct Criterion
    {
        int id;
        const char *name;
        double limit_s;
        std::function<Outcome()> run;
    };
} // namespace

int main(int argc, char **argv)
{
    const std::vector<Criterion> all{
        {1, "oracle equivalence (channel)", 10, oracle_equivalence},
        {2, "Kronecker factorization", 5, kronecker_factorization},
        {3, "integer reduction", 60, integer_reduction},
        {4, "FIM cross-validation", 120, fim_cross_validation},
        {5, "CRLB invariances", 600, crlb_invariances},
        {6, "noise covariance", 600, noise_covariance},
        {7, "estimator consistency", 60, estimator_consistency},
        {8, "RMSE approaches CRLB", 900, rmse_near_crlb},
        {9, "genetic optimizer", 600, genetic_optimizer},
        {10, "PAPR", 300, papr},
        {11, "Doppler robustness", 600, doppler_robustness},
        {12, "ISAC trade-off", 900, isac_tradeoff},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i)
        selected.insert(std::stoi(argv[i]));

    int failures = 0;
    for (const auto &c : all)
    {
        if (!selected.empty() && !selected.count(c.id))
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = c.run();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.limit_s;
        const bool ok = o.passed && in_time;
        failures += !ok;
        std::printf("%s  [%2d] %s: %s [%.1f s / %.0f s limit%s]\n", ok ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs, c.limit_s, in_time ? "" : ", too slow");
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
