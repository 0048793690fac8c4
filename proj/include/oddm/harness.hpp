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

#ifndef ODDM_HARNESS_HPP
#define ODDM_HARNESS_HPP

#include "oddm/beamforming.hpp"
#include "oddm/crlb.hpp"
#include "oddm/estimation.hpp"
#include "oddm/optimizer.hpp"
#include "oddm/parallel.hpp"
#include "oddm/scenario.hpp"
#include "oddm/waveform.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace oddm
{
    enum class ExperimentKind
    {
        papr,
        siso_rmse,
        precoder_sweep,
        optimize_combiner,
        combiner_sweep,
        isac_tradeoff
    };

    std::string_view experiment_name(ExperimentKind kind); // CLI verb, e.g. "siso-rmse"
    ExperimentKind experiment_from_name(std::string_view name);

    struct SweepAxis
    {
        std::string label;
        std::vector<double> values;
    };

    struct ExperimentSpec
    {
        ExperimentKind kind = ExperimentKind::papr;
        ScenarioConfig scenario;
        SweepAxis sweep_axis;
        int trials = 50;
        std::string output_path; // directory for CSV files; empty disables writing
        TargetParams target;
        GaConfig ga;
        Execution exec = Execution::parallel;

        /// Throws std::invalid_argument if trials < 1 or the axis is unsorted or repeats values.
        void validate() const;
    };

    /// Axis and trial defaults for each experiment.
    ExperimentSpec default_spec(ExperimentKind kind, const ScenarioConfig &scenario);

    /// One embedded assertion.
    struct Check
    {
        std::string name;
        bool passed = false;
        double value = 0.0;
        double threshold = 0.0;
        std::string detail;
    };

    struct ExperimentReport
    {
        std::string experiment;
        std::string scenario_hash;
        std::vector<Check> checks;
        std::vector<std::string> files;
        std::map<std::string, double> summary;

        bool passed() const;
        std::string to_json() const;
    };

    /// RFC-4180 CSV with a leading "# scenario_hash=<hash>" comment line.
    class CsvWriter
    {
    public:
        CsvWriter(const std::string &path, const std::string &scenario_hash, const std::vector<std::string> &header);
        void row(const std::vector<std::string> &cells);
        static std::string quote(const std::string &cell);
        static std::string num(double v);

    private:
        std::ofstream out_;
        std::string path_;
    };

    // ---- Shared experiment plumbing -------------------------------------------

    /// Random QPSK pilot, MN x N_s, one vectorized delay-Doppler frame per column.
    CMatrix pilot_frame(const ScenarioConfig &cfg, std::uint64_t seed, const std::string &experiment);

    /// Noise variance at which sqrt(CRLB(theta)) equals target_std_deg for the given
    /// link, from the 4D numerical FIM (CRLB scales linearly with the noise variance).
    double noise_for_theta_std(double target_std_deg, const TargetParams &target, const CMatrix &X_time,
                               const CMatrix &F, const CMatrix &W, const ScenarioConfig &cfg);

    /// 10 log10(|alpha|^2 Nt Nr ||X||_F^2 / (MN sigma2)).
    double mimo_snr_db(cd alpha, const CMatrix &X_time, const ScenarioConfig &cfg);

    struct SensingTrialStats
    {
        std::vector<EstimationResult> trials;
        double rmse_theta_deg = 0.0;
        double rmse_phi_deg = 0.0;
        double rmse_range_m = 0.0;
        double rmse_velocity_mps = 0.0;
    };

    /// Monte-Carlo runs of the full estimator for one link. Trial t draws noise from
    /// rng_stream(seed, label + "/t<t>").
    SensingTrialStats run_sensing_trials(const TargetParams &target, const CMatrix &X_dd, const CMatrix &F,
                                         const CMatrix &W, const ScenarioConfig &cfg, const EstimatorOptions &opt,
                                         int trials, const std::string &label, Execution exec);

    // ---- Experiments ---------------------------------------------------------

    /// Sorted PAPR samples (dB) per scheme and per (scheme, rolloff).
    struct PaprResult
    {
        std::map<Scheme, std::vector<double>> by_scheme;
        std::map<std::pair<Scheme, double>, std::vector<double>> by_rolloff;
    };
    /// Value exceeded with probability p in a sorted sample.
    double ccdf_level(const std::vector<double> &sorted, double p);
    double median_sorted(const std::vector<double> &sorted);

    PaprResult compute_papr(const ScenarioConfig &cfg, const std::vector<double> &rolloffs, int frames,
                            std::uint64_t seed, Execution exec);

    struct SisoRmseResult
    {
        std::vector<double> snr_db;
        /// rmse[waveform][velocity_kmh][snr index], waveform "ODDM" or "OFDM".
        std::map<std::string, std::map<double, std::vector<double>>> rmse_range_m;
    };
    /// Range RMSE from the generic delay-Doppler ML search on SISO time samples.
    /// ODDM uses one frame-level CP; OFDM uses a CP per symbol and a receiver model
    /// with per-symbol Doppler phase only.
    SisoRmseResult compute_siso_rmse(const ScenarioConfig &cfg, const TargetParams &target,
                                     const std::vector<double> &velocities_kmh, const std::vector<double> &snr_db,
                                     int trials, std::uint64_t seed, Execution exec);

    ExperimentReport run_papr(const ExperimentSpec &spec);
    ExperimentReport run_siso_rmse(const ExperimentSpec &spec);
    ExperimentReport run_precoder_sweep(const ExperimentSpec &spec);
    ExperimentReport run_optimize_combiner(const ExperimentSpec &spec);
    ExperimentReport run_combiner_sweep(const ExperimentSpec &spec);
    ExperimentReport run_isac_tradeoff(const ExperimentSpec &spec);

    ExperimentReport run_experiment(const ExperimentSpec &spec);
} // namespace oddm

#endif
