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

#include "oddm/optimizer.hpp"

#include "oddm/channel.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace
{
    using namespace oddm;

    constexpr double inf = std::numeric_limits<double>::infinity();

    GeneAngle clamp_gene(GeneAngle g)
    {
        g.theta_deg = std::clamp(g.theta_deg, -90.0, 90.0);
        g.phi_deg = std::clamp(g.phi_deg, 0.0, 180.0);
        return g;
    }

    double median_of_finite(const std::vector<CombinerIndividual> &pop)
    {
        std::vector<double> v;
        for (const auto &ind : pop)
            if (std::isfinite(ind.fitness))
                v.push_back(ind.fitness);
        if (v.empty())
            return inf;
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    }

    std::string label(const char *prefix, int gen, std::size_t idx)
    {
        return std::string(prefix) + std::to_string(gen) + "/i" + std::to_string(idx);
    }
} // namespace

int oddm::GaConfig::elite_count() const
{
    return std::max(2, static_cast<int>(std::lround(elite_rate * population_size)));
}

void oddm::GaConfig::validate() const
{
    if (population_size < 3)
        throw std::invalid_argument("GaConfig: population_size must be at least 3");
    if (!(elite_rate > 0.0 && elite_rate < 1.0))
        throw std::invalid_argument("GaConfig: elite_rate must lie in (0, 1)");
    if (elite_rate * population_size < 2.0)
        throw std::invalid_argument("GaConfig: elite_rate * population_size must be at least 2");
    if (elite_count() >= population_size)
        throw std::invalid_argument("GaConfig: elites would fill the whole population");
    if (generations < 0 || mutation_sigma_deg < 0.0 || init_spread_deg < 0.0 || stall_generations < 1)
        throw std::invalid_argument("GaConfig: negative generations, sigma, spread or stall window");
}

oddm::HybridBeamformer oddm::combiner_from_genes(const std::vector<GeneAngle> &genes, const ScenarioConfig &cfg)
{
    const UpaGeometry geom = UpaGeometry::from_config(cfg);
    const int ns = cfg.num_streams;
    if (static_cast<int>(genes.size()) < ns)
        throw std::invalid_argument("combiner_from_genes: fewer genes than streams");
    CMatrix analog(geom.size(), static_cast<Eigen::Index>(genes.size()));
    for (std::size_t i = 0; i < genes.size(); ++i)
        analog.col(static_cast<Eigen::Index>(i)) = steering_vector(genes[i].theta_deg, genes[i].phi_deg, geom);
    CMatrix digital;
    if (static_cast<int>(genes.size()) == ns)
        digital = CMatrix::Identity(ns, ns);
    else
    {
        Eigen::JacobiSVD<CMatrix> svd(analog, Eigen::ComputeThinV);
        digital = svd.matrixV().leftCols(ns);
    }
    auto bf = HybridBeamformer::from_parts(std::move(analog), std::move(digital));
    bf.normalize(ns);
    return bf;
}

oddm::CombinerFitness::CombinerFitness(double theta_deg, double phi_deg, cd alpha, double l, double k,
                                       const CMatrix &precoder, const ScenarioConfig &cfg)
    : theta_(theta_deg), phi_(phi_deg), alpha_(alpha), F_(precoder), cfg_(cfg), gram_(isotropic_gram(l, k, cfg))
{
}

double oddm::CombinerFitness::operator()(const CMatrix &W) const
{
    try
    {
        const FimReport r = analytic_angle_fim(theta_, phi_, alpha_, F_, W, gram_, cfg_);
        const double f = r.crlb.at("theta_deg2") + r.crlb.at("phi_deg2");
        return std::isfinite(f) ? f : inf;
    }
    catch (const std::domain_error &)
    {
        return inf;
    }
}

double oddm::CombinerFitness::operator()(const std::vector<GeneAngle> &genes) const
{
    return (*this)(combiner_from_genes(genes, cfg_).effective);
}

std::vector<oddm::GeneAngle> oddm::random_genes(double theta_bar, double phi_bar, double spread_deg, int count,
                                                RandomStream &stream)
{
    std::vector<GeneAngle> genes(static_cast<std::size_t>(count));
    for (auto &g : genes)
    {
        g.theta_deg = stream.uniform(theta_bar - spread_deg, theta_bar + spread_deg);
        g.phi_deg = stream.uniform(phi_bar - spread_deg, phi_bar + spread_deg);
        g = clamp_gene(g);
    }
    return genes;
}

oddm::OptimizationResult oddm::optimize_combiner(const CombinerFitness &fitness, double theta_bar, double phi_bar,
                                                 const ScenarioConfig &cfg, const GaConfig &ga, std::uint64_t seed)
{
    ga.validate();
    const int n_genes = cfg.num_rf_chains_rx;
    const std::size_t P = static_cast<std::size_t>(ga.population_size);
    const std::size_t n_elite = static_cast<std::size_t>(ga.elite_count());

    auto evaluate = [&](std::vector<CombinerIndividual> &pop, std::size_t from)
    {
        for_each_index(static_cast<std::ptrdiff_t>(pop.size() - from), ga.exec,
                       [&](std::ptrdiff_t i) { pop[from + i].fitness = fitness(pop[from + i].genes); });
    };
    auto initial = [&](const char *prefix)
    {
        std::vector<CombinerIndividual> pop(P);
        for (std::size_t i = 0; i < P; ++i)
        {
            RandomStream s = rng_stream(seed, label(prefix, 0, i));
            pop[i].genes = random_genes(theta_bar, phi_bar, ga.init_spread_deg, n_genes, s);
        }
        evaluate(pop, 0);
        return pop;
    };
    auto any_feasible = [](const std::vector<CombinerIndividual> &pop)
    { return std::any_of(pop.begin(), pop.end(), [](const auto &ind) { return std::isfinite(ind.fitness); }); };
    // Stable sort keeps the lower index first among equal fitness values.
    auto rank = [](std::vector<CombinerIndividual> &pop)
    {
        std::stable_sort(pop.begin(), pop.end(),
                         [](const CombinerIndividual &a, const CombinerIndividual &b) { return a.fitness < b.fitness; });
    };

    std::vector<CombinerIndividual> pop = initial("ga/g");
    if (!any_feasible(pop))
    {
        pop = initial("ga/reseed/g");
        if (!any_feasible(pop))
            throw std::runtime_error("optimize_combiner: every individual has a singular combiner Gram matrix");
    }
    rank(pop);

    OptimizationResult out;
    out.best_history.push_back(pop.front().fitness);
    out.median_history.push_back(median_of_finite(pop));

    for (int gen = 1; gen <= ga.generations; ++gen)
    {
        std::vector<CombinerIndividual> next(pop.begin(), pop.begin() + static_cast<std::ptrdiff_t>(n_elite));
        next.resize(P);
        for (std::size_t i = n_elite; i < P; ++i)
        {
            RandomStream s = rng_stream(seed, label("ga/g", gen, i));
            const std::size_t p1 = s.below(n_elite);
            std::size_t p2 = s.below(n_elite - 1);
            if (p2 >= p1)
                ++p2;
            std::vector<GeneAngle> child = pop[p1].genes;
            if (n_genes > 1)
            {
                const std::size_t cut = 1 + s.below(static_cast<std::uint64_t>(n_genes - 1));
                std::copy(pop[p2].genes.begin() + static_cast<std::ptrdiff_t>(cut), pop[p2].genes.end(),
                          child.begin() + static_cast<std::ptrdiff_t>(cut));
            }
            if (ga.mutation)
                for (auto &g : child)
                {
                    g.theta_deg += ga.mutation_sigma_deg * s.normal();
                    g.phi_deg += ga.mutation_sigma_deg * s.normal();
                    g = clamp_gene(g);
                }
            next[i].genes = std::move(child);
        }
        evaluate(next, n_elite);
        rank(next);
        pop = std::move(next);
        out.best_history.push_back(pop.front().fitness);
        out.median_history.push_back(median_of_finite(pop));
        out.generations_run = gen;

        const std::size_t h = out.best_history.size();
        if (h > static_cast<std::size_t>(ga.stall_generations))
        {
            const double old = out.best_history[h - 1 - static_cast<std::size_t>(ga.stall_generations)];
            const double now = out.best_history.back();
            if (old - now <= ga.stall_tolerance * std::abs(now))
                break;
        }
    }

    out.best = pop.front();
    out.combiner = combiner_from_genes(out.best.genes, cfg);
    return out;
}

int oddm::generations_to_converge(const std::vector<double> &best_history, double fraction)
{
    if (best_history.empty())
        return 0;
    const double target = best_history.back() * (1.0 + fraction);
    for (std::size_t g = 0; g < best_history.size(); ++g)
        if (best_history[g] <= target)
            return static_cast<int>(g);
    return static_cast<int>(best_history.size() - 1);
}

std::vector<oddm::GeneAngle> oddm::shift_genes(const std::vector<GeneAngle> &genes, double theta_bar, double phi_bar,
                                               double theta_scan, double phi_scan)
{
    std::vector<GeneAngle> out = genes;
    for (auto &g : out)
    {
        g.theta_deg += theta_scan - theta_bar;
        g.phi_deg += phi_scan - phi_bar;
        if (g.theta_deg < -90.0 || g.theta_deg > 90.0 || g.phi_deg < 0.0 || g.phi_deg > 180.0)
            throw std::out_of_range("regenerate_for_scan: shifted gene (" + std::to_string(g.theta_deg) + ", " +
                                    std::to_string(g.phi_deg) + ") deg leaves theta in [-90, 90], phi in [0, 180]");
    }
    return out;
}

oddm::HybridBeamformer oddm::regenerate_for_scan(const std::vector<GeneAngle> &genes, double theta_bar, double phi_bar,
                                                 double theta_scan, double phi_scan, const ScenarioConfig &cfg)
{
    return combiner_from_genes(shift_genes(genes, theta_bar, phi_bar, theta_scan, phi_scan), cfg);
}
