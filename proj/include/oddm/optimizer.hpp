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

#ifndef ODDM_OPTIMIZER_HPP
#define ODDM_OPTIMIZER_HPP

#include "oddm/beamforming.hpp"
#include "oddm/crlb.hpp"
#include "oddm/parallel.hpp"
#include "oddm/scenario.hpp"
#include "oddm/types.hpp"

#include <cstdint>
#include <vector>

namespace oddm
{
    struct GeneAngle
    {
        double theta_deg = 0.0;
        double phi_deg = 90.0;
    };

    /// One candidate combiner: a steering direction per RF chain.
    struct CombinerIndividual
    {
        std::vector<GeneAngle> genes;
        double fitness = 0.0; // CRLB(theta) + CRLB(phi) in deg^2, +inf if W^H W is singular
    };

    struct GaConfig
    {
        int population_size = 64;
        double elite_rate = 0.4;
        int generations = 100;
        double mutation_sigma_deg = 1.0;
        double init_spread_deg = 20.0;
        bool mutation = true;
        /// Stop when the best fitness improved by less than this fraction over
        /// the last stall_generations generations.
        double stall_tolerance = 1e-9;
        int stall_generations = 25;
        Execution exec = Execution::parallel;

        int elite_count() const;
        /// Throws std::invalid_argument if elite_rate * population_size < 2 or
        /// other fields are out of range.
        void validate() const;
    };

    /// Hybrid combiner whose analog columns are steering vectors at the gene angles.
    /// With N_RF = N_s the digital part is the identity; otherwise it maps onto the
    /// dominant N_s-dimensional column space. ||effective||_F^2 = N_s.
    HybridBeamformer combiner_from_genes(const std::vector<GeneAngle> &genes, const ScenarioConfig &cfg);

    /// Sensing fitness of a combiner for a fixed precoder, target direction and
    /// path coefficient: CRLB(theta) + CRLB(phi) in deg^2 from the analytic FIM with
    /// the isotropic transmit Gram at the target's delay and Doppler.
    class CombinerFitness
    {
    public:
        CombinerFitness(double theta_deg, double phi_deg, cd alpha, double l, double k, const CMatrix &precoder,
                        const ScenarioConfig &cfg);
        double operator()(const CMatrix &W) const;
        double operator()(const std::vector<GeneAngle> &genes) const;

    private:
        double theta_, phi_;
        cd alpha_;
        CMatrix F_;
        ScenarioConfig cfg_;
        TransmitGram gram_;
    };

    struct OptimizationResult
    {
        CombinerIndividual best;
        HybridBeamformer combiner;
        std::vector<double> best_history;   // per generation, generation 0 = initial population
        std::vector<double> median_history; // finite fitness values only
        int generations_run = 0;
    };

    /// Elitist genetic search over gene angles. Initial genes are uniform in
    /// theta_bar +/- spread, phi_bar +/- spread. Each offspring comes from single-point
    /// crossover of two distinct random elites plus optional Gaussian mutation.
    /// Every individual draws from rng_stream(seed, "ga/g<gen>/i<idx>").
    /// Throws std::runtime_error if the population is infeasible after one re-seed.
    OptimizationResult optimize_combiner(const CombinerFitness &fitness, double theta_bar, double phi_bar,
                                         const ScenarioConfig &cfg, const GaConfig &ga, std::uint64_t seed);

    /// First generation whose best fitness is within `fraction` of the final best.
    int generations_to_converge(const std::vector<double> &best_history, double fraction = 0.01);

    /// Random beam-steered combiner: genes uniform in the same box as the GA start.
    std::vector<GeneAngle> random_genes(double theta_bar, double phi_bar, double spread_deg, int count,
                                        RandomStream &stream);

    /// Shifts every gene by (theta_scan - theta_bar, phi_scan - phi_bar). Throws
    /// std::out_of_range if a shifted angle leaves theta in [-90, 90] or phi in [0, 180].
    std::vector<GeneAngle> shift_genes(const std::vector<GeneAngle> &genes, double theta_bar, double phi_bar,
                                       double theta_scan, double phi_scan);
    HybridBeamformer regenerate_for_scan(const std::vector<GeneAngle> &genes, double theta_bar, double phi_bar,
                                         double theta_scan, double phi_scan, const ScenarioConfig &cfg);
} // namespace oddm

#endif
