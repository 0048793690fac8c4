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

#ifndef ODDM_SCENARIO_HPP
#define ODDM_SCENARIO_HPP

#include "oddm/random.hpp"
#include "oddm/types.hpp"

#include <cstdint>
#include <string>
#include <string_view>

namespace oddm
{
    enum class PathGainMode
    {
        direct,        // alpha taken from TargetParams::path_coeff
        radar_equation // free-space monostatic radar equation with random phase
    };

    /// Scenario parameters. Units: Hz, s, m, m/s, degrees, dBm.
    ///
    /// Defaults are the desk-scale profile (see desk_profile()).
    struct ScenarioConfig
    {
        double carrier_frequency_hz = 0.3e12;
        double subcarrier_spacing_hz = 480e3;
        int num_delay_bins = 32;   // M
        int num_doppler_bins = 8;  // N
        double rolloff = 0.1;      // pulse roll-off
        int pulse_half_span = 4;   // Q, pulse support is 2Q sample periods
        int cp_length = 16;        // M_cp, in samples
        int num_tx_antennas = 64;
        int num_rx_antennas = 64;
        int upa_y = 8;
        int upa_z = 8;
        double element_spacing_wavelengths = 0.5;
        int num_rf_chains_tx = 4;
        int num_rf_chains_rx = 4;
        int num_streams = 4;
        double transmit_power_dbm = 20.0;
        double noise_variance = 1.0;
        std::uint64_t rng_seed = 42;

        PathGainMode path_gain_mode = PathGainMode::direct;
        double radar_cross_section_m2 = 1.0;

        // Communication link (user equipment side).
        int ue_upa_y = 4;
        int ue_upa_z = 4;
        int comm_paths = 6;
        double comm_los_dominance_db = 10.0;
        double comm_noise_variance = 1e-3;

        int frame_size() const { return num_delay_bins * num_doppler_bins; }
        double symbol_period() const { return 1.0 / subcarrier_spacing_hz; } // T
        double sample_period() const { return symbol_period() / num_delay_bins; } // T_s
        double delay_resolution() const { return sample_period(); }
        double doppler_resolution() const { return 1.0 / (num_doppler_bins * symbol_period()); }
        double wavelength() const { return speed_of_light / carrier_frequency_hz; }
        double max_delay() const { return cp_length * sample_period(); }
        double max_doppler() const { return 0.5 / symbol_period(); }
        int num_ue_antennas() const { return ue_upa_y * ue_upa_z; }
        double transmit_power_w() const;

        /// Throws std::invalid_argument naming the first violated constraint.
        void validate() const;

        bool operator==(const ScenarioConfig &) const = default;
    };

    ScenarioConfig desk_profile();
    ScenarioConfig paper_profile();

    /// "desk" or "paper"; throws std::invalid_argument otherwise.
    ScenarioConfig profile_by_name(std::string_view name);

    /// Flat key = value text, one key per line, '#' starts a comment.
    /// Keys not present keep the value from `base`. Unknown keys throw.
    ScenarioConfig parse_config(std::string_view text, const ScenarioConfig &base = {});
    std::string to_config_text(const ScenarioConfig &cfg);
    ScenarioConfig load_config(const std::string &path, const ScenarioConfig &base = {});
    void save_config(const ScenarioConfig &cfg, const std::string &path);

    /// 16 hex digit hash of the canonical config text.
    std::string scenario_hash(const ScenarioConfig &cfg);

    struct TargetParams
    {
        double azimuth_deg = 15.0;
        double elevation_deg = 90.0;
        double range_m = 50.0;
        double velocity_mps = 300.0 / 3.6;
        cd path_coeff{1.0, 0.0};
    };

    struct DelayDoppler
    {
        double delay_s;
        double doppler_hz;
        double l; // delay in sample periods
        double k; // Doppler in units of 1/(N T)
    };

    /// tau = 2 r / c0, nu = 2 f_c v / c0, l = tau / T_s, k = nu M N T_s.
    /// Throws std::out_of_range when tau is outside (0, M_cp T_s] or nu outside
    /// (-1/(2T), 1/(2T)].
    DelayDoppler derive_delay_doppler(const TargetParams &target, const ScenarioConfig &cfg);

    double range_from_delay(double delay_s);
    double velocity_from_doppler(double doppler_hz, const ScenarioConfig &cfg);

    /// Path coefficient per cfg.path_gain_mode. The stream is used only for the
    /// random phase of the radar-equation mode.
    cd path_coefficient(const TargetParams &target, const ScenarioConfig &cfg, RandomStream &stream);
} // namespace oddm

#endif
