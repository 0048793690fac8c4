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

// Serial reference vs OpenMP kernels. Arg 0 = serial, 1 = parallel.

#include "oddm/beamforming.hpp"
#include "oddm/estimation.hpp"
#include "oddm/harness.hpp"
#include "oddm/optimizer.hpp"

#include <benchmark/benchmark.h>

using namespace oddm;

namespace
{
    Execution mode(const benchmark::State &state) { return state.range(0) ? Execution::parallel : Execution::serial; }

    struct Link
    {
        ScenarioConfig cfg = desk_profile();
        TargetParams target;
        DelayDoppler dd = derive_delay_doppler(target, cfg);
        CMatrix X_dd = pilot_frame(cfg, cfg.rng_seed, "bench");
        CMatrix X_time = dd_to_time(X_dd, cfg.num_delay_bins, cfg.num_doppler_bins);
        CMatrix F = sensing_precoder(target.azimuth_deg, target.elevation_deg, cfg).effective;
        CMatrix W;

        Link()
        {
            RandomStream s = rng_stream(cfg.rng_seed, "bench/combiner");
            W = combiner_from_genes(random_genes(target.azimuth_deg, target.elevation_deg, 10, 4, s), cfg).effective;
        }
    };

    void BM_GeneticOptimizer(benchmark::State &state)
    {
        const Link link;
        const CombinerFitness fitness(link.target.azimuth_deg, link.target.elevation_deg, link.target.path_coeff,
                                      link.dd.l, link.dd.k, link.F, link.cfg);
        GaConfig ga;
        ga.generations = 20;
        ga.exec = mode(state);
        for (auto _ : state)
            benchmark::DoNotOptimize(
                optimize_combiner(fitness, link.target.azimuth_deg, link.target.elevation_deg, link.cfg, ga, 1));
    }
    BENCHMARK(BM_GeneticOptimizer)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

    void BM_PaprFrames(benchmark::State &state)
    {
        const ScenarioConfig cfg = desk_profile();
        for (auto _ : state)
            benchmark::DoNotOptimize(compute_papr(cfg, {0.1, 0.5}, 200, 7, mode(state)));
    }
    BENCHMARK(BM_PaprFrames)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

    void BM_DelayDopplerSearch(benchmark::State &state)
    {
        const Link link;
        RandomStream s = rng_stream(1, "bench/noise");
        const CMatrix Y = mimo_receive(link.X_dd, link.F, link.W, {link.target}, link.cfg, s);
        const SensingProblem p(Y, link.X_time, link.F, link.W, link.cfg, true);
        EstimatorOptions opt;
        opt.exec = mode(state);
        for (auto _ : state)
            benchmark::DoNotOptimize(ml_delay_doppler(p, link.target.azimuth_deg, link.target.elevation_deg, opt));
    }
    BENCHMARK(BM_DelayDopplerSearch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

    void BM_SensingTrials(benchmark::State &state)
    {
        const Link link;
        for (auto _ : state)
            benchmark::DoNotOptimize(run_sensing_trials(link.target, link.X_dd, link.F, link.W, link.cfg,
                                                        EstimatorOptions{}, 8, "bench", mode(state)));
    }
    BENCHMARK(BM_SensingTrials)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
} // namespace

BENCHMARK_MAIN();
