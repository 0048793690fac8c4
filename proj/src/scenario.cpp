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

#include "oddm/scenario.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <variant>

namespace
{
    using oddm::ScenarioConfig;

    using Field = std::variant<double ScenarioConfig::*, int ScenarioConfig::*, std::uint64_t ScenarioConfig::*,
                               oddm::PathGainMode ScenarioConfig::*>;

    struct Key
    {
        const char *name;
        Field field;
    };

    // Order here is the canonical serialization order.
    const std::array<Key, 25> keys{{
        {"carrier_frequency_hz", &ScenarioConfig::carrier_frequency_hz},
        {"subcarrier_spacing_hz", &ScenarioConfig::subcarrier_spacing_hz},
        {"num_delay_bins", &ScenarioConfig::num_delay_bins},
        {"num_doppler_bins", &ScenarioConfig::num_doppler_bins},
        {"rolloff", &ScenarioConfig::rolloff},
        {"pulse_half_span", &ScenarioConfig::pulse_half_span},
        {"cp_length", &ScenarioConfig::cp_length},
        {"num_tx_antennas", &ScenarioConfig::num_tx_antennas},
        {"num_rx_antennas", &ScenarioConfig::num_rx_antennas},
        {"upa_y", &ScenarioConfig::upa_y},
        {"upa_z", &ScenarioConfig::upa_z},
        {"element_spacing_wavelengths", &ScenarioConfig::element_spacing_wavelengths},
        {"num_rf_chains_tx", &ScenarioConfig::num_rf_chains_tx},
        {"num_rf_chains_rx", &ScenarioConfig::num_rf_chains_rx},
        {"num_streams", &ScenarioConfig::num_streams},
        {"transmit_power_dbm", &ScenarioConfig::transmit_power_dbm},
        {"noise_variance", &ScenarioConfig::noise_variance},
        {"rng_seed", &ScenarioConfig::rng_seed},
        {"path_gain_mode", &ScenarioConfig::path_gain_mode},
        {"radar_cross_section_m2", &ScenarioConfig::radar_cross_section_m2},
        {"ue_upa_y", &ScenarioConfig::ue_upa_y},
        {"ue_upa_z", &ScenarioConfig::ue_upa_z},
        {"comm_paths", &ScenarioConfig::comm_paths},
        {"comm_los_dominance_db", &ScenarioConfig::comm_los_dominance_db},
        {"comm_noise_variance", &ScenarioConfig::comm_noise_variance},
    }};

    std::string_view trim(std::string_view s)
    {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string_view::npos)
            return {};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    std::string format_double(double v)
    {
        // %.17g round-trips every finite double.
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

    [[noreturn]] void bad_value(std::string_view key, std::string_view value)
    {
        throw std::invalid_argument("config: bad value '" + std::string(value) + "' for key '" + std::string(key) + "'");
    }

    template <class T>
    T parse_integer(std::string_view key, std::string_view value)
    {
        T out{};
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
        if (ec != std::errc{} || ptr != value.data() + value.size())
            bad_value(key, value);
        return out;
    }

    double parse_double(std::string_view key, std::string_view value)
    {
        std::string s(value);
        char *end = nullptr;
        const double out = std::strtod(s.c_str(), &end);
        if (s.empty() || end != s.c_str() + s.size())
            bad_value(key, value);
        return out;
    }

    void require(bool ok, const std::string &what)
    {
        if (!ok)
            throw std::invalid_argument("ScenarioConfig: " + what);
    }
} // namespace

double oddm::ScenarioConfig::transmit_power_w() const
{
    return std::pow(10.0, (transmit_power_dbm - 30.0) / 10.0);
}

void oddm::ScenarioConfig::validate() const
{
    require(carrier_frequency_hz > 0.0, "carrier_frequency_hz must be positive");
    require(subcarrier_spacing_hz > 0.0, "subcarrier_spacing_hz must be positive");
    require(num_delay_bins >= 2 && num_doppler_bins >= 1, "frame must have M >= 2 and N >= 1");
    require(rolloff >= 0.0 && rolloff <= 1.0, "rolloff must lie in [0, 1]");
    require(pulse_half_span >= 1 && 2 * pulse_half_span < num_delay_bins, "pulse_half_span Q must satisfy 1 <= Q < M/2");
    require(cp_length >= pulse_half_span + 1, "cp_length must be at least Q + 1");
    require(cp_length + pulse_half_span + 1 < frame_size(), "cp_length + Q + 1 must be below M N");
    require(upa_y >= 1 && upa_z >= 1, "UPA dimensions must be positive");
    require(num_tx_antennas == upa_y * upa_z, "num_tx_antennas must equal upa_y * upa_z");
    require(num_rx_antennas == upa_y * upa_z, "num_rx_antennas must equal upa_y * upa_z (co-located array)");
    require(element_spacing_wavelengths > 0.0, "element spacing must be positive");
    require(num_streams >= 1, "num_streams must be positive");
    require(num_streams <= num_rf_chains_tx && num_rf_chains_tx <= num_tx_antennas,
            "need num_streams <= num_rf_chains_tx <= num_tx_antennas");
    require(num_streams <= num_rf_chains_rx && num_rf_chains_rx <= num_rx_antennas,
            "need num_streams <= num_rf_chains_rx <= num_rx_antennas");
    require(noise_variance >= 0.0, "noise_variance must be non-negative");
    require(radar_cross_section_m2 > 0.0, "radar_cross_section_m2 must be positive");
    require(ue_upa_y >= 1 && ue_upa_z >= 1, "UE UPA dimensions must be positive");
    require(comm_paths >= 1, "comm_paths must be positive");
    require(comm_noise_variance > 0.0, "comm_noise_variance must be positive");
}

oddm::ScenarioConfig oddm::desk_profile()
{
    return ScenarioConfig{};
}

oddm::ScenarioConfig oddm::paper_profile()
{
    ScenarioConfig cfg;
    cfg.num_delay_bins = 64;
    cfg.num_doppler_bins = 16;
    cfg.pulse_half_span = 8;
    cfg.cp_length = 32;
    cfg.upa_y = 32;
    cfg.upa_z = 32;
    cfg.num_tx_antennas = 1024;
    cfg.num_rx_antennas = 1024;
    return cfg;
}

oddm::ScenarioConfig oddm::profile_by_name(std::string_view name)
{
    if (name == "desk")
        return desk_profile();
    if (name == "paper")
        return paper_profile();
    throw std::invalid_argument("unknown profile '" + std::string(name) + "' (expected desk or paper)");
}

oddm::ScenarioConfig oddm::parse_config(std::string_view text, const ScenarioConfig &base)
{
    ScenarioConfig cfg = base;
    std::size_t line_no = 0;
    while (!text.empty())
    {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));

        bool found = false;
        for (const auto &k : keys)
        {
            if (key != k.name)
                continue;
            found = true;
            std::visit(
                [&](auto member)
                {
                    using M = std::remove_reference_t<decltype(cfg.*member)>;
                    if constexpr (std::is_same_v<M, double>)
                        cfg.*member = parse_double(key, value);
                    else if constexpr (std::is_same_v<M, int>)
                        cfg.*member = parse_integer<int>(key, value);
                    else if constexpr (std::is_same_v<M, std::uint64_t>)
                        cfg.*member = parse_integer<std::uint64_t>(key, value);
                    else
                    {
                        if (value == "direct")
                            cfg.*member = PathGainMode::direct;
                        else if (value == "radar_equation")
                            cfg.*member = PathGainMode::radar_equation;
                        else
                            bad_value(key, value);
                    }
                },
                k.field);
        }
        if (!found)
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
    return cfg;
}

std::string oddm::to_config_text(const ScenarioConfig &cfg)
{
    std::string out;
    for (const auto &k : keys)
    {
        out += k.name;
        out += " = ";
        std::visit(
            [&](auto member)
            {
                using M = std::remove_cvref_t<decltype(cfg.*member)>;
                if constexpr (std::is_same_v<M, double>)
                    out += format_double(cfg.*member);
                else if constexpr (std::is_same_v<M, PathGainMode>)
                    out += cfg.*member == PathGainMode::direct ? "direct" : "radar_equation";
                else
                    out += std::to_string(cfg.*member);
            },
            k.field);
        out += '\n';
    }
    return out;
}

oddm::ScenarioConfig oddm::load_config(const std::string &path, const ScenarioConfig &base)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), base);
}

void oddm::save_config(const ScenarioConfig &cfg, const std::string &path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write config file '" + path + "'");
    out << "# oddm-isac scenario\n" << to_config_text(cfg);
}

std::string oddm::scenario_hash(const ScenarioConfig &cfg)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_config_text(cfg))));
    return buf;
}

oddm::DelayDoppler oddm::derive_delay_doppler(const TargetParams &target, const ScenarioConfig &cfg)
{
    DelayDoppler dd{};
    dd.delay_s = 2.0 * target.range_m / speed_of_light;
    dd.doppler_hz = 2.0 * cfg.carrier_frequency_hz * target.velocity_mps / speed_of_light;
    dd.l = dd.delay_s / cfg.sample_period();
    dd.k = dd.doppler_hz * cfg.num_delay_bins * cfg.num_doppler_bins * cfg.sample_period();

    // Relative slack so that a bound hit exactly by the closed form is accepted.
    constexpr double slack = 1e-12;
    if (!(dd.delay_s > 0.0) || dd.delay_s > cfg.max_delay() * (1.0 + slack))
        throw std::out_of_range("delay " + format_double(dd.delay_s) + " s outside (0, M_cp*T_s = " +
                                format_double(cfg.max_delay()) + " s]");
    const double nu_max = cfg.max_doppler();
    if (dd.doppler_hz > nu_max * (1.0 + slack) || dd.doppler_hz <= -nu_max)
        throw std::out_of_range("Doppler " + format_double(dd.doppler_hz) + " Hz outside (-1/(2T), 1/(2T)] = (" +
                                format_double(-nu_max) + ", " + format_double(nu_max) + "] Hz");
    return dd;
}

double oddm::range_from_delay(double delay_s)
{
    return 0.5 * speed_of_light * delay_s;
}

double oddm::velocity_from_doppler(double doppler_hz, const ScenarioConfig &cfg)
{
    return doppler_hz * speed_of_light / (2.0 * cfg.carrier_frequency_hz);
}

oddm::cd oddm::path_coefficient(const TargetParams &target, const ScenarioConfig &cfg, RandomStream &stream)
{
    if (cfg.path_gain_mode == PathGainMode::direct)
        return target.path_coeff;
    const double lambda = cfg.wavelength();
    const double r = target.range_m;
    const double amp = std::sqrt(lambda * lambda * cfg.radar_cross_section_m2 / (std::pow(4.0 * pi, 3) * std::pow(r, 4)));
    const double psi = stream.uniform(0.0, 2.0 * pi);
    return std::polar(amp, psi);
}
