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

// Command-line front end: one subcommand per experiment.

#include "oddm/harness.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>

namespace
{
    struct Options
    {
        std::string config;
        std::string profile = "desk";
        std::optional<std::uint64_t> seed;
        std::string out = "results";
        std::optional<int> trials;
        bool no_mutation = false;
        bool serial = false;
        bool json = false;
    };

    void add_common(CLI::App *cmd, Options &o)
    {
        cmd->add_option("--config", o.config, "Scenario config file (key = value lines)");
        cmd->add_option("--profile", o.profile, "Base parameter set")->check(CLI::IsMember({"desk", "paper"}));
        cmd->add_option("--seed", o.seed, "Override rng_seed");
        cmd->add_option("--out", o.out, "Output directory for CSV files");
        cmd->add_option("--trials", o.trials, "Monte-Carlo trials (frames for papr, seeds for optimize-combiner)")
            ->check(CLI::PositiveNumber);
        cmd->add_flag("--no-mutation", o.no_mutation, "Crossover-only genetic optimizer");
        cmd->add_flag("--serial", o.serial, "Run trials on one thread");
        cmd->add_flag("--json", o.json, "Print a JSON summary instead of text");
    }

    int run(oddm::ExperimentKind kind, const Options &o)
    {
        oddm::ScenarioConfig cfg = oddm::profile_by_name(o.profile);
        if (!o.config.empty())
            cfg = oddm::load_config(o.config, cfg);
        if (o.seed)
            cfg.rng_seed = *o.seed;
        cfg.validate();

        oddm::ExperimentSpec spec = oddm::default_spec(kind, cfg);
        spec.output_path = o.out;
        if (o.trials)
            spec.trials = *o.trials;
        spec.ga.mutation = !o.no_mutation;
        if (o.serial)
            spec.exec = spec.ga.exec = oddm::Execution::serial;

        const oddm::ExperimentReport report = oddm::run_experiment(spec);
        if (o.json)
            std::cout << report.to_json() << "\n";
        else
        {
            std::cout << report.experiment << " scenario_hash=" << report.scenario_hash << "\n";
            for (const auto &[key, value] : report.summary)
                std::printf("  %-44s %.6g\n", key.c_str(), value);
            for (const auto &c : report.checks)
                std::printf("%s  %s: %.6g (threshold %.6g%s%s)\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.value,
                            c.threshold, c.detail.empty() ? "" : ", ", c.detail.c_str());
            for (const auto &f : report.files)
                std::cout << "  wrote " << f << "\n";
        }
        return report.passed() ? 0 : 1;
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Delay-Doppler ISAC experiments"};
    app.require_subcommand(1);
    Options opts;
    const oddm::ExperimentKind kinds[] = {oddm::ExperimentKind::papr,           oddm::ExperimentKind::siso_rmse,
                                          oddm::ExperimentKind::precoder_sweep, oddm::ExperimentKind::optimize_combiner,
                                          oddm::ExperimentKind::combiner_sweep, oddm::ExperimentKind::isac_tradeoff};
    const char *descriptions[] = {"PAPR CCDF with and without DFT spreading",
                                  "SISO range RMSE vs SNR, ODDM vs OFDM at two velocities",
                                  "Angle RMSE and CRLB vs precoder steering angle",
                                  "Genetic combiner optimization vs random combiners",
                                  "Estimator lock-in vs scan-angle offset",
                                  "Spectral efficiency and sensing RMSE, sensing vs SVD precoder"};
    for (int i = 0; i < 6; ++i)
        add_common(app.add_subcommand(std::string(oddm::experiment_name(kinds[i])), descriptions[i]), opts);
    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try
    {
        for (auto k : kinds)
            if (app.got_subcommand(std::string(oddm::experiment_name(k))))
                return run(k, opts);
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
