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

#include "oddm/harness.hpp"

#include "oddm/channel.hpp"
#include "oddm/fft.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <stdexcept>

namespace
{
    using namespace oddm;

    constexpr double kmh = 1.0 / 3.6;

    double rms(const std::vector<double> &errors)
    {
        if (errors.empty())
            return 0.0;
        double acc = 0.0;
        for (double e : errors)
            acc += e * e;
        return std::sqrt(acc / static_cast<double>(errors.size()));
    }

    double pearson(const std::vector<double> &x, const std::vector<double> &y)
    {
        const double n = static_cast<double>(x.size());
        const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
        const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
        double sxy = 0.0, sxx = 0.0, syy = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            sxy += (x[i] - mx) * (y[i] - my);
            sxx += (x[i] - mx) * (x[i] - mx);
            syy += (y[i] - my) * (y[i] - my);
        }
        return sxy / std::sqrt(sxx * syy);
    }

    std::size_t nearest_index(const std::vector<double> &values, double x)
    {
        std::size_t best = 0;
        for (std::size_t i = 1; i < values.size(); ++i)
            if (std::abs(values[i] - x) < std::abs(values[best] - x))
                best = i;
        return best;
    }

    std::string file_in(const ExperimentSpec &spec, const std::string &name)
    {
        std::filesystem::create_directories(spec.output_path);
        return (std::filesystem::path(spec.output_path) / name).string();
    }

    Check make_check(std::string name, bool passed, double value, double threshold, std::string detail = {})
    {
        return {std::move(name), passed, value, threshold, std::move(detail)};
    }

    ExperimentReport new_report(const ExperimentSpec &spec)
    {
        ExperimentReport r;
        r.experiment = std::string(experiment_name(spec.kind));
        r.scenario_hash = scenario_hash(spec.scenario);
        return r;
    }

    // Sensing precoder at the target plus a GA-optimized combiner, as used by the
    // MIMO experiments.
    struct SensingLink
    {
        CMatrix X_dd;
        CMatrix X_time;
        CMatrix F;
        OptimizationResult ga;
        ScenarioConfig cfg; // noise variance calibrated
        DelayDoppler dd;
    };

    SensingLink make_sensing_link(const ExperimentSpec &spec, const std::string &experiment)
    {
        SensingLink link;
        link.cfg = spec.scenario;
        const TargetParams &t = spec.target;
        link.dd = derive_delay_doppler(t, link.cfg);
        link.X_dd = pilot_frame(link.cfg, link.cfg.rng_seed, experiment);
        link.X_time = dd_to_time(link.X_dd, link.cfg.num_delay_bins, link.cfg.num_doppler_bins);
        link.F = sensing_precoder(t.azimuth_deg, t.elevation_deg, link.cfg).effective;
        const CombinerFitness fitness(t.azimuth_deg, t.elevation_deg, t.path_coeff, link.dd.l, link.dd.k, link.F,
                                      link.cfg);
        link.ga = optimize_combiner(fitness, t.azimuth_deg, t.elevation_deg, link.cfg, spec.ga,
                                    rng_stream(link.cfg.rng_seed, experiment + "/ga").next_u64());
        link.cfg.noise_variance =
            noise_for_theta_std(0.01, t, link.X_time, link.F, link.ga.combiner.effective, link.cfg);
        return link;
    }

    FimReport link_crlb(const TargetParams &t, const DelayDoppler &dd, const CMatrix &X_time, const CMatrix &F,
                        const CMatrix &W, const ScenarioConfig &cfg)
    {
        return numerical_fim_4d(t.azimuth_deg, t.elevation_deg, dd.l, dd.k, t.path_coeff, X_time, F, W, cfg);
    }

    void write_trials(CsvWriter &csv, double axis_value, double snr_db, const SensingTrialStats &stats)
    {
        for (std::size_t i = 0; i < stats.trials.size(); ++i)
        {
            const auto &e = stats.trials[i];
            csv.row({CsvWriter::num(axis_value), std::to_string(i), CsvWriter::num(snr_db), CsvWriter::num(e.theta_deg),
                     CsvWriter::num(e.phi_deg), CsvWriter::num(e.range_m), CsvWriter::num(e.velocity_mps),
                     CsvWriter::num(e.objective), CsvWriter::num(e.trace.music_ms),
                     CsvWriter::num(e.trace.delay_doppler_ms), CsvWriter::num(e.trace.refine_ms)});
        }
    }

    const std::vector<std::string> trial_header{"axis_value", "trial",   "snr_db",   "theta_hat",       "phi_hat",
                                                "range_hat",  "vel_hat", "objective", "music_ms", "delay_doppler_ms",
                                                "refine_ms"};
} // namespace

// ---- Names, specs, reports ---------------------------------------------------

std::string_view oddm::experiment_name(ExperimentKind kind)
{
    switch (kind)
    {
    case ExperimentKind::papr: return "papr";
    case ExperimentKind::siso_rmse: return "siso-rmse";
    case ExperimentKind::precoder_sweep: return "precoder-sweep";
    case ExperimentKind::optimize_combiner: return "optimize-combiner";
    case ExperimentKind::combiner_sweep: return "combiner-sweep";
    case ExperimentKind::isac_tradeoff: return "isac-tradeoff";
    }
    throw std::invalid_argument("unknown experiment kind");
}

oddm::ExperimentKind oddm::experiment_from_name(std::string_view name)
{
    for (auto k : {ExperimentKind::papr, ExperimentKind::siso_rmse, ExperimentKind::precoder_sweep,
                   ExperimentKind::optimize_combiner, ExperimentKind::combiner_sweep, ExperimentKind::isac_tradeoff})
        if (experiment_name(k) == name)
            return k;
    throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

void oddm::ExperimentSpec::validate() const
{
    if (trials < 1)
        throw std::invalid_argument("ExperimentSpec: trials must be at least 1");
    for (std::size_t i = 1; i < sweep_axis.values.size(); ++i)
        if (!(sweep_axis.values[i] > sweep_axis.values[i - 1]))
            throw std::invalid_argument("ExperimentSpec: sweep values must be sorted and unique");
    scenario.validate();
}

oddm::ExperimentSpec oddm::default_spec(ExperimentKind kind, const ScenarioConfig &scenario)
{
    ExperimentSpec s;
    s.kind = kind;
    s.scenario = scenario;
    auto range = [](double a, double b, double step)
    {
        std::vector<double> v;
        for (double x = a; x <= b + 1e-9; x += step)
            v.push_back(x);
        return v;
    };
    switch (kind)
    {
    case ExperimentKind::papr:
        s.sweep_axis = {"rolloff", {0.1, 0.3, 0.5}};
        s.trials = 10000;
        break;
    case ExperimentKind::siso_rmse:
        s.sweep_axis = {"snr_db", range(-10.0, 30.0, 5.0)};
        s.trials = 200;
        break;
    case ExperimentKind::precoder_sweep:
        s.sweep_axis = {"precoder_azimuth_deg", range(3.0, 27.0, 2.0)};
        s.trials = 50;
        break;
    case ExperimentKind::optimize_combiner:
        s.sweep_axis = {"elite_rate", {0.4, 0.7}};
        s.trials = 10;
        break;
    case ExperimentKind::combiner_sweep:
        s.sweep_axis = {"scan_azimuth_deg", range(3.0, 27.0, 1.0)};
        s.trials = 50;
        break;
    case ExperimentKind::isac_tradeoff:
        s.sweep_axis = {"case", {0.0, 1.0}};
        s.trials = 50;
        break;
    }
    return s;
}

bool oddm::ExperimentReport::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const Check &c) { return c.passed; });
}

std::string oddm::ExperimentReport::to_json() const
{
    nlohmann::json j;
    j["experiment"] = experiment;
    j["scenario_hash"] = scenario_hash;
    j["passed"] = passed();
    j["checks"] = nlohmann::json::array();
    for (const auto &c : checks)
        j["checks"].push_back(
            {{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold}, {"detail", c.detail}});
    j["files"] = files;
    j["summary"] = summary;
    return j.dump(2);
}

oddm::CsvWriter::CsvWriter(const std::string &path, const std::string &hash, const std::vector<std::string> &header)
    : out_(path), path_(path)
{
    if (!out_)
        throw std::runtime_error("cannot write '" + path + "'");
    out_ << "# scenario_hash=" << hash << "\r\n";
    row(header);
}

void oddm::CsvWriter::row(const std::vector<std::string> &cells)
{
    for (std::size_t i = 0; i < cells.size(); ++i)
        out_ << (i ? "," : "") << quote(cells[i]);
    out_ << "\r\n";
}

std::string oddm::CsvWriter::quote(const std::string &cell)
{
    if (cell.find_first_of(",\"\r\n") == std::string::npos)
        return cell;
    std::string q = "\"";
    for (char c : cell)
    {
        if (c == '"')
            q += '"';
        q += c;
    }
    return q + '"';
}

std::string oddm::CsvWriter::num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// ---- Shared plumbing ---------------------------------------------------------

oddm::CMatrix oddm::pilot_frame(const ScenarioConfig &cfg, std::uint64_t seed, const std::string &experiment)
{
    RandomStream s = rng_stream(seed, experiment + "/pilot");
    CMatrix X(cfg.frame_size(), cfg.num_streams);
    for (int c = 0; c < cfg.num_streams; ++c)
        X.col(c) = vec(random_frame(cfg.num_delay_bins, cfg.num_doppler_bins, Constellation::qpsk, Scheme::oddm, s)
                           .symbols);
    return X;
}

double oddm::noise_for_theta_std(double target_std_deg, const TargetParams &target, const CMatrix &X_time,
                                 const CMatrix &F, const CMatrix &W, const ScenarioConfig &cfg)
{
    ScenarioConfig unit = cfg;
    unit.noise_variance = 1.0;
    const DelayDoppler dd = derive_delay_doppler(target, cfg);
    const double crlb = link_crlb(target, dd, X_time, F, W, unit).bound("theta_deg2");
    return target_std_deg * target_std_deg / crlb;
}

double oddm::mimo_snr_db(cd alpha, const CMatrix &X_time, const ScenarioConfig &cfg)
{
    const double signal = std::norm(alpha) * cfg.num_tx_antennas * cfg.num_rx_antennas * X_time.squaredNorm() /
                          static_cast<double>(cfg.frame_size());
    return 10.0 * std::log10(signal / cfg.noise_variance);
}

oddm::SensingTrialStats oddm::run_sensing_trials(const TargetParams &target, const CMatrix &X_dd, const CMatrix &F,
                                                 const CMatrix &W, const ScenarioConfig &cfg,
                                                 const EstimatorOptions &opt, int trials, const std::string &label,
                                                 Execution exec)
{
    EstimatorOptions inner = opt;
    inner.exec = Execution::serial;
    const CMatrix X_time = dd_to_time(X_dd, cfg.num_delay_bins, cfg.num_doppler_bins);
    SensingTrialStats stats;
    stats.trials = map_indices<EstimationResult>(trials, exec,
                                                 [&](std::ptrdiff_t t)
                                                 {
                                                     RandomStream noise =
                                                         rng_stream(cfg.rng_seed, label + "/t" + std::to_string(t));
                                                     const CMatrix Y = mimo_receive(X_dd, F, W, {target}, cfg, noise);
                                                     const SensingProblem problem(Y, X_time, F, W, cfg, inner.whiten);
                                                     return estimate(problem, inner);
                                                 });
    std::vector<double> et, ep, er, ev;
    for (const auto &e : stats.trials)
    {
        et.push_back(e.theta_deg - target.azimuth_deg);
        ep.push_back(e.phi_deg - target.elevation_deg);
        er.push_back(e.range_m - target.range_m);
        ev.push_back(e.velocity_mps - target.velocity_mps);
    }
    stats.rmse_theta_deg = rms(et);
    stats.rmse_phi_deg = rms(ep);
    stats.rmse_range_m = rms(er);
    stats.rmse_velocity_mps = rms(ev);
    return stats;
}

// ---- PAPR --------------------------------------------------------------------

double oddm::ccdf_level(const std::vector<double> &sorted, double p)
{
    if (sorted.empty())
        throw std::invalid_argument("ccdf_level: empty sample");
    const auto n = sorted.size();
    const auto above = static_cast<std::size_t>(std::floor(p * static_cast<double>(n)));
    return sorted[n - 1 - std::min(above, n - 1)];
}

double oddm::median_sorted(const std::vector<double> &sorted)
{
    const auto n = sorted.size();
    return n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

oddm::PaprResult oddm::compute_papr(const ScenarioConfig &cfg, const std::vector<double> &rolloffs, int frames,
                                    std::uint64_t seed, Execution exec)
{
    const int M = cfg.num_delay_bins, N = cfg.num_doppler_bins, Q = cfg.pulse_half_span;
    auto sample = [&](Scheme s, double rolloff)
    {
        // Frame f of every scheme shares the same symbols.
        auto v = map_indices<double>(frames, exec,
                                     [&](std::ptrdiff_t f)
                                     {
                                         RandomStream st = rng_stream(seed, "papr/frame" + std::to_string(f));
                                         const DDFrame fr = random_frame(M, N, Constellation::qpsk, s, st);
                                         return papr_db(fr, 4, Q, rolloff);
                                     });
        std::sort(v.begin(), v.end());
        return v;
    };
    PaprResult r;
    for (Scheme s : all_schemes)
        r.by_scheme[s] = sample(s, cfg.rolloff);
    for (double b : rolloffs)
        for (Scheme s : {Scheme::oddm, Scheme::dfts_oddm})
            r.by_rolloff[{s, b}] = b == cfg.rolloff ? r.by_scheme[s] : sample(s, b);
    return r;
}

oddm::ExperimentReport oddm::run_papr(const ExperimentSpec &spec)
{
    spec.validate();
    ExperimentReport rep = new_report(spec);
    const PaprResult r = compute_papr(spec.scenario, spec.sweep_axis.values, spec.trials, spec.scenario.rng_seed,
                                      spec.exec);

    if (!spec.output_path.empty())
    {
        auto write_ccdf = [&](CsvWriter &csv, const std::vector<double> &v, const std::vector<std::string> &prefix)
        {
            const double n = static_cast<double>(v.size());
            for (std::size_t i = 0; i < v.size(); ++i)
            {
                auto cells = prefix;
                cells.push_back(CsvWriter::num(v[i]));
                cells.push_back(CsvWriter::num((n - 1.0 - static_cast<double>(i)) / n));
                csv.row(cells);
            }
        };
        const std::string p1 = file_in(spec, "papr_ccdf.csv");
        CsvWriter c1(p1, rep.scenario_hash, {"scheme", "papr_db", "ccdf"});
        for (const auto &[s, v] : r.by_scheme)
            write_ccdf(c1, v, {std::string(scheme_name(s))});
        const std::string p2 = file_in(spec, "papr_rolloff.csv");
        CsvWriter c2(p2, rep.scenario_hash, {"scheme", "rolloff", "papr_db", "ccdf"});
        for (const auto &[key, v] : r.by_rolloff)
            write_ccdf(c2, v, {std::string(scheme_name(key.first)), CsvWriter::num(key.second)});
        rep.files = {p1, p2};
    }

    for (Scheme s : {Scheme::oddm, Scheme::otfs, Scheme::ofdm})
    {
        const Scheme spread = s == Scheme::oddm ? Scheme::dfts_oddm : s == Scheme::otfs ? Scheme::dfts_otfs
                                                                                        : Scheme::dfts_ofdm;
        const double gap = median_sorted(r.by_scheme.at(s)) - median_sorted(r.by_scheme.at(spread));
        rep.summary["median_gap_db_" + std::string(scheme_name(s))] = gap;
        rep.checks.push_back(make_check("median PAPR reduction by DFT spreading, " + std::string(scheme_name(s)),
                                        gap >= 3.0, gap, 3.0, "dB, >="));
    }
    const double gap3 = ccdf_level(r.by_scheme.at(Scheme::oddm), 1e-3) - ccdf_level(r.by_scheme.at(Scheme::dfts_oddm), 1e-3);
    rep.summary["ccdf_1e-3_gap_db"] = gap3;
    rep.checks.push_back(make_check("ODDM vs DFTS-ODDM gap at CCDF 1e-3", std::abs(gap3 - 5.0) <= 1.0, gap3, 5.0,
                                    "dB, within +/-1"));

    const auto &rolls = spec.sweep_axis.values;
    bool dfts_monotone = true;
    for (std::size_t i = 1; i < rolls.size(); ++i)
    {
        const double prev = ccdf_level(r.by_rolloff.at({Scheme::dfts_oddm, rolls[i - 1]}), 1e-2);
        const double cur = ccdf_level(r.by_rolloff.at({Scheme::dfts_oddm, rolls[i]}), 1e-2);
        dfts_monotone = dfts_monotone && cur <= prev;
    }
    for (double b : rolls)
    {
        rep.summary["oddm_ccdf_1e-2_db_beta_" + CsvWriter::num(b)] = ccdf_level(r.by_rolloff.at({Scheme::oddm, b}), 1e-2);
        rep.summary["dfts_oddm_ccdf_1e-2_db_beta_" + CsvWriter::num(b)] =
            ccdf_level(r.by_rolloff.at({Scheme::dfts_oddm, b}), 1e-2);
    }
    rep.checks.push_back(make_check("DFTS-ODDM PAPR non-increasing in rolloff (CCDF 1e-2)", dfts_monotone,
                                    dfts_monotone ? 1.0 : 0.0, 1.0));
    return rep;
}

// ---- SISO range RMSE -----------------------------------------------------------

oddm::SisoRmseResult oddm::compute_siso_rmse(const ScenarioConfig &cfg, const TargetParams &target,
                                             const std::vector<double> &velocities_kmh,
                                             const std::vector<double> &snr_db, int trials, std::uint64_t seed,
                                             Execution exec)
{
    const int M = cfg.num_delay_bins, N = cfg.num_doppler_bins, Q = cfg.pulse_half_span, cp = cfg.cp_length;
    const int MN = cfg.frame_size();
    const double beta = cfg.rolloff;
    const DelayDopplerGrid grid = DelayDopplerGrid::from_config(cfg);
    const cd alpha = target.path_coeff;

    std::vector<DelayDoppler> dds;
    std::vector<double> ranges;
    for (double v : velocities_kmh)
    {
        TargetParams t = target;
        t.velocity_mps = v * kmh;
        dds.push_back(derive_delay_doppler(t, cfg));
        ranges.push_back(t.range_m);
    }

    // errors[wave][velocity][snr][trial]
    const std::size_t nv = velocities_kmh.size(), ns = snr_db.size();
    std::vector<double> err(2 * nv * ns * static_cast<std::size_t>(trials));
    auto at = [&](std::size_t w, std::size_t v, std::size_t s, std::size_t t) -> double &
    { return err[((w * nv + v) * ns + s) * static_cast<std::size_t>(trials) + t]; };

    // Each (snr, trial) draws a fresh data frame and noise, shared by every
    // velocity (common random numbers).
    for_each_index(static_cast<std::ptrdiff_t>(ns) * trials, exec,
                   [&](std::ptrdiff_t job)
                   {
                       const auto si = static_cast<std::size_t>(job / trials);
                       const auto tr = static_cast<std::size_t>(job % trials);
                       const std::string key = "siso-rmse/s" + std::to_string(si) + "/t" + std::to_string(tr);
                       RandomStream ds = rng_stream(seed, key + "/frame");
                       const CMatrix X = random_frame(M, N, Constellation::qpsk, Scheme::oddm, ds).symbols;

                       const CVector x_oddm = oddm_modulate(X);
                       const CVector tx_oddm = add_cp(x_oddm, cp);
                       std::vector<CVector> blocks_tx(N);
                       CVector tx_ofdm(static_cast<Eigen::Index>(N) * (M + cp));
                       for (int n = 0; n < N; ++n)
                       {
                           blocks_tx[n] = idft(CVector(X.col(n)));
                           tx_ofdm.segment(static_cast<Eigen::Index>(n) * (M + cp), M + cp) = add_cp(blocks_tx[n], cp);
                       }
                       const double sigma2 =
                           std::norm(alpha) * x_oddm.squaredNorm() / MN / std::pow(10.0, snr_db[si] / 10.0);

                       RandomStream n_oddm = rng_stream(seed, key + "/noise/ODDM");
                       CVector noise_oddm(MN);
                       for (auto &e : noise_oddm)
                           e = n_oddm.complex_normal(sigma2);
                       RandomStream n_ofdm = rng_stream(seed, key + "/noise/OFDM");
                       CVector noise_ofdm(MN);
                       for (auto &e : noise_ofdm)
                           e = n_ofdm.complex_normal(sigma2);

                       auto oddm_objective = [&](const CVector &y)
                       {
                           return [&](double l, double k)
                           {
                               const CVector b = DelayDopplerOperator(l, k, MN, Q, beta).apply(x_oddm);
                               const double e = b.squaredNorm();
                               return e > 0.0 ? std::norm(b.dot(y)) / e : 0.0;
                           };
                       };
                       auto ofdm_objective = [&](const std::vector<CVector> &rx)
                       {
                           return [&](double l, double k)
                           {
                               const DelayDopplerOperator g(l, 0.0, M, Q, beta);
                               cd inner = 0.0;
                               double e = 0.0;
                               for (int n = 0; n < N; ++n)
                               {
                                   const double start = static_cast<double>(n) * (M + cp) + cp;
                                   const CVector b =
                                       std::polar(1.0, 2.0 * pi * k * start / MN) * g.apply_delay(blocks_tx[n]);
                                   inner += b.dot(rx[n]);
                                   e += b.squaredNorm();
                               }
                               return e > 0.0 ? std::norm(inner) / e : 0.0;
                           };
                       };

                       for (std::size_t vi = 0; vi < nv; ++vi)
                       {
                           const DelayDoppler &dd = dds[vi];
                           const CVector y =
                               alpha * remove_cp(linear_delay_doppler(tx_oddm, dd.l, dd.k, MN, Q, beta), cp) +
                               noise_oddm;
                           const auto e1 = search_delay_doppler(oddm_objective(y), grid, cp, Execution::serial);
                           at(0, vi, si, tr) = range_from_delay(e1.l * cfg.sample_period()) - ranges[vi];

                           const CVector rx = alpha * linear_delay_doppler(tx_ofdm, dd.l, dd.k, MN, Q, beta);
                           std::vector<CVector> blocks(N);
                           for (int n = 0; n < N; ++n)
                               blocks[n] = rx.segment(static_cast<Eigen::Index>(n) * (M + cp) + cp, M) +
                                           noise_ofdm.segment(static_cast<Eigen::Index>(n) * M, M);
                           const auto e2 = search_delay_doppler(ofdm_objective(blocks), grid, cp, Execution::serial);
                           at(1, vi, si, tr) = range_from_delay(e2.l * cfg.sample_period()) - ranges[vi];
                       }
                   });

    SisoRmseResult out;
    out.snr_db = snr_db;
    const char *names[] = {"ODDM", "OFDM"};
    for (std::size_t w = 0; w < 2; ++w)
        for (std::size_t vi = 0; vi < nv; ++vi)
        {
            std::vector<double> rmse;
            for (std::size_t si = 0; si < ns; ++si)
                rmse.push_back(rms(std::vector<double>(&at(w, vi, si, 0), &at(w, vi, si, 0) + trials)));
            out.rmse_range_m[names[w]][velocities_kmh[vi]] = std::move(rmse);
        }
    return out;
}

oddm::ExperimentReport oddm::run_siso_rmse(const ExperimentSpec &spec)
{
    spec.validate();
    ExperimentReport rep = new_report(spec);
    const std::vector<double> vel{3.0, 300.0};
    const SisoRmseResult r = compute_siso_rmse(spec.scenario, spec.target, vel, spec.sweep_axis.values, spec.trials,
                                               spec.scenario.rng_seed, spec.exec);
    if (!spec.output_path.empty())
    {
        const std::string p = file_in(spec, "siso_rmse.csv");
        CsvWriter csv(p, rep.scenario_hash, {"waveform", "velocity_kmh", "snr_db", "rmse_range_m"});
        for (const auto &[wave, by_v] : r.rmse_range_m)
            for (const auto &[v, rm] : by_v)
                for (std::size_t i = 0; i < rm.size(); ++i)
                    csv.row({wave, CsvWriter::num(v), CsvWriter::num(r.snr_db[i]), CsvWriter::num(rm[i])});
        rep.files = {p};
    }
    const std::size_t i20 = nearest_index(r.snr_db, 20.0);
    const double oddm_ratio = r.rmse_range_m.at("ODDM").at(300.0)[i20] / r.rmse_range_m.at("ODDM").at(3.0)[i20];
    const double ofdm_ratio = r.rmse_range_m.at("OFDM").at(300.0)[i20] / r.rmse_range_m.at("OFDM").at(3.0)[i20];
    const double slow_a = r.rmse_range_m.at("ODDM").at(3.0)[i20];
    const double slow_b = r.rmse_range_m.at("OFDM").at(3.0)[i20];
    const double slow_spread = std::abs(slow_a - slow_b) / std::min(slow_a, slow_b);
    rep.summary["oddm_ratio_300_over_3"] = oddm_ratio;
    rep.summary["ofdm_ratio_300_over_3"] = ofdm_ratio;
    rep.summary["slow_relative_spread"] = slow_spread;
    const std::string at = " at " + CsvWriter::num(r.snr_db[i20]) + " dB";
    rep.checks.push_back(make_check("ODDM RMSE(300 km/h) / RMSE(3 km/h)" + at, oddm_ratio <= 2.0, oddm_ratio, 2.0, "<="));
    rep.checks.push_back(make_check("OFDM RMSE(300 km/h) / RMSE(3 km/h)" + at, ofdm_ratio >= 5.0, ofdm_ratio, 5.0, ">="));
    rep.checks.push_back(make_check("3 km/h RMSE of ODDM and OFDM within 20%" + at, slow_spread <= 0.2, slow_spread, 0.2,
                                    "relative difference <="));
    return rep;
}

// ---- MIMO sweeps ----------------------------------------------------------------

oddm::ExperimentReport oddm::run_precoder_sweep(const ExperimentSpec &spec)
{
    spec.validate();
    ExperimentReport rep = new_report(spec);
    const std::string name = "precoder-sweep";
    const SensingLink link = make_sensing_link(spec, name);
    const TargetParams &t = spec.target;
    const CMatrix &W = link.ga.combiner.effective;
    const UpaGeometry geom = UpaGeometry::from_config(link.cfg);
    const auto &axis = spec.sweep_axis.values;

    EstimatorOptions opt;
    opt.scan_theta_deg = t.azimuth_deg;
    opt.scan_phi_deg = t.elevation_deg;

    std::vector<double> rmse_t, crlb_t, beam;
    std::unique_ptr<CsvWriter> sweep_csv, crlb_csv, trial_csv;
    if (!spec.output_path.empty())
    {
        rep.files = {file_in(spec, "precoder_sweep.csv"), file_in(spec, "precoder_crlb.csv"),
                     file_in(spec, "precoder_trials.csv")};
        sweep_csv = std::make_unique<CsvWriter>(
            rep.files[0], rep.scenario_hash,
            std::vector<std::string>{"precoder_azimuth_deg", "rmse_theta_deg", "rmse_phi_deg", "rmse_range_m",
                                     "rmse_vel_mps", "crlb_theta_deg2", "crlb_phi_deg2", "crlb_range_m2",
                                     "crlb_vel_mps2", "beam_gain_db"});
        crlb_csv = std::make_unique<CsvWriter>(rep.files[1], rep.scenario_hash,
                                               std::vector<std::string>{"precoder_azimuth_deg", "crlb_theta_deg2",
                                                                        "crlb_phi_deg2", "crlb_range_m2",
                                                                        "crlb_vel_mps2"});
        trial_csv = std::make_unique<CsvWriter>(rep.files[2], rep.scenario_hash, trial_header);
    }
    for (std::size_t i = 0; i < axis.size(); ++i)
    {
        const CMatrix F = sensing_precoder(axis[i], t.elevation_deg, link.cfg).effective;
        const auto stats = run_sensing_trials(t, link.X_dd, F, W, link.cfg, opt, spec.trials,
                                              name + "/a" + std::to_string(i), spec.exec);
        const FimReport fim = link_crlb(t, link.dd, link.X_time, F, W, link.cfg);
        const double gain = beampattern(F, {t.azimuth_deg}, {t.elevation_deg}, geom, BeamSide::transmit)(0, 0);
        rmse_t.push_back(stats.rmse_theta_deg);
        crlb_t.push_back(fim.bound("theta_deg2"));
        beam.push_back(gain);
        if (sweep_csv)
        {
            sweep_csv->row({CsvWriter::num(axis[i]), CsvWriter::num(stats.rmse_theta_deg),
                            CsvWriter::num(stats.rmse_phi_deg), CsvWriter::num(stats.rmse_range_m),
                            CsvWriter::num(stats.rmse_velocity_mps), CsvWriter::num(fim.bound("theta_deg2")),
                            CsvWriter::num(fim.bound("phi_deg2")), CsvWriter::num(fim.bound("range_m2")),
                            CsvWriter::num(fim.bound("velocity_mps2")), CsvWriter::num(gain)});
            crlb_csv->row({CsvWriter::num(axis[i]), CsvWriter::num(fim.bound("theta_deg2")),
                           CsvWriter::num(fim.bound("phi_deg2")), CsvWriter::num(fim.bound("range_m2")),
                           CsvWriter::num(fim.bound("velocity_mps2"))});
            write_trials(*trial_csv, axis[i], mimo_snr_db(t.path_coeff, link.X_time, link.cfg), stats);
        }
    }

    const std::size_t aligned = nearest_index(axis, t.azimuth_deg);
    const double ratio = rmse_t[aligned] / std::sqrt(crlb_t[aligned]);
    const std::size_t best_crlb =
        static_cast<std::size_t>(std::min_element(crlb_t.begin(), crlb_t.end()) - crlb_t.begin());
    const double rmse_min = *std::min_element(rmse_t.begin(), rmse_t.end());
    // The relative standard error of an n-trial RMSE is about 1/sqrt(2n).
    const double rmse_margin = 1.0 + 2.0 / std::sqrt(2.0 * spec.trials);
    std::vector<double> rmse_db, neg_beam;
    for (std::size_t i = 0; i < axis.size(); ++i)
    {
        rmse_db.push_back(20.0 * std::log10(rmse_t[i]));
        neg_beam.push_back(-beam[i]);
    }
    const double corr = axis.size() > 2 ? pearson(rmse_db, neg_beam) : 1.0;
    rep.summary["noise_variance"] = link.cfg.noise_variance;
    rep.summary["aligned_rmse_over_sqrt_crlb"] = ratio;
    rep.summary["pearson_rmse_db_vs_neg_beam_db"] = corr;
    rep.checks.push_back(make_check("aligned precoder: RMSE(theta) / sqrt(CRLB(theta))", ratio <= 3.0, ratio, 3.0, "<="));
    rep.checks.push_back(make_check("CRLB(theta) minimized at the aligned precoder angle", best_crlb == aligned,
                                    axis[best_crlb], axis[aligned]));
    rep.checks.push_back(make_check("RMSE(theta) at the aligned angle / sweep minimum", rmse_t[aligned] <= rmse_margin * rmse_min,
                                    rmse_t[aligned] / rmse_min, rmse_margin, "<=, two standard errors"));
    rep.checks.push_back(make_check("Pearson correlation of RMSE(dB) with -beampattern(dB)", corr > 0.8, corr, 0.8, ">"));
    return rep;
}

oddm::ExperimentReport oddm::run_optimize_combiner(const ExperimentSpec &spec)
{
    spec.validate();
    ExperimentReport rep = new_report(spec);
    const ScenarioConfig &cfg = spec.scenario;
    const TargetParams &t = spec.target;
    const DelayDoppler dd = derive_delay_doppler(t, cfg);
    const CMatrix F = sensing_precoder(t.azimuth_deg, t.elevation_deg, cfg).effective;
    const CombinerFitness fitness(t.azimuth_deg, t.elevation_deg, t.path_coeff, dd.l, dd.k, F, cfg);

    std::vector<double> random_fitness;
    for (int i = 0; i < 100; ++i)
    {
        RandomStream s = rng_stream(cfg.rng_seed, "optimize-combiner/random/i" + std::to_string(i));
        random_fitness.push_back(
            fitness(random_genes(t.azimuth_deg, t.elevation_deg, spec.ga.init_spread_deg, cfg.num_rf_chains_rx, s)));
    }
    std::sort(random_fitness.begin(), random_fitness.end());
    const double random_median = median_sorted(random_fitness);

    std::unique_ptr<CsvWriter> conv;
    if (!spec.output_path.empty())
    {
        rep.files.push_back(file_in(spec, "ga_convergence.csv"));
        conv = std::make_unique<CsvWriter>(rep.files.back(), rep.scenario_hash,
                                           std::vector<std::string>{"elite_rate", "seed_index", "generation",
                                                                    "best_fitness", "median_fitness"});
    }
    bool monotone = true;
    std::map<double, double> median_gens;
    double first_best = 0.0;
    OptimizationResult first;
    for (std::size_t ai = 0; ai < spec.sweep_axis.values.size(); ++ai)
    {
        GaConfig ga = spec.ga;
        ga.elite_rate = spec.sweep_axis.values[ai];
        std::vector<int> gens;
        for (int s = 0; s < spec.trials; ++s)
        {
            const std::uint64_t seed = rng_stream(cfg.rng_seed, "optimize-combiner/seed" + std::to_string(s)).next_u64();
            const OptimizationResult r = optimize_combiner(fitness, t.azimuth_deg, t.elevation_deg, cfg, ga, seed);
            for (std::size_t g = 1; g < r.best_history.size(); ++g)
                monotone = monotone && r.best_history[g] <= r.best_history[g - 1];
            gens.push_back(generations_to_converge(r.best_history));
            if (ai == 0 && s == 0)
            {
                first = r;
                first_best = r.best.fitness;
            }
            if (conv)
                for (std::size_t g = 0; g < r.best_history.size(); ++g)
                    conv->row({CsvWriter::num(ga.elite_rate), std::to_string(s), std::to_string(g),
                               CsvWriter::num(r.best_history[g]), CsvWriter::num(r.median_history[g])});
        }
        std::sort(gens.begin(), gens.end());
        const double med = gens.size() % 2 ? gens[gens.size() / 2]
                                           : 0.5 * (gens[gens.size() / 2 - 1] + gens[gens.size() / 2]);
        median_gens[ga.elite_rate] = med;
        rep.summary["median_generations_to_1pct_elite_" + CsvWriter::num(ga.elite_rate)] = med;
    }

    if (!spec.output_path.empty())
    {
        rep.files.push_back(file_in(spec, "combiner_beampattern.csv"));
        CsvWriter bp(rep.files.back(), rep.scenario_hash, {"theta_deg", "phi_deg", "gain_db"});
        std::vector<double> th, ph;
        for (int i = -90; i <= 90; ++i)
            th.push_back(i);
        for (int i = 0; i <= 180; i += 2)
            ph.push_back(i);
        const RMatrix g = beampattern(first.combiner.effective, th, ph, UpaGeometry::from_config(cfg), BeamSide::receive);
        for (std::size_t i = 0; i < th.size(); ++i)
            for (std::size_t j = 0; j < ph.size(); ++j)
                bp.row({CsvWriter::num(th[i]), CsvWriter::num(ph[j]), CsvWriter::num(g(i, j))});
    }

    const double ratio = first_best / random_median;
    rep.summary["optimized_fitness"] = first_best;
    rep.summary["random_median_fitness"] = random_median;
    rep.checks.push_back(make_check("optimized fitness / median random combiner fitness", ratio <= 0.1, ratio, 0.1, "<="));
    rep.checks.push_back(make_check("best-fitness history non-increasing", monotone, monotone ? 1.0 : 0.0, 1.0));
    if (median_gens.count(0.4) && median_gens.count(0.7))
        rep.checks.push_back(make_check("elite rate 0.4 converges in fewer generations than 0.7",
                                        median_gens[0.4] < median_gens[0.7], median_gens[0.4], median_gens[0.7],
                                        "median generations to within 1% of final"));
    return rep;
}

oddm::ExperimentReport oddm::run_combiner_sweep(const ExperimentSpec &spec)
{
    spec.validate();
    ExperimentReport rep = new_report(spec);
    const std::string name = "combiner-sweep";
    const SensingLink link = make_sensing_link(spec, name);
    const TargetParams &t = spec.target;
    const auto &axis = spec.sweep_axis.values;

    std::unique_ptr<CsvWriter> csv, trial_csv;
    if (!spec.output_path.empty())
    {
        rep.files = {file_in(spec, "combiner_sweep.csv"), file_in(spec, "combiner_trials.csv")};
        csv = std::make_unique<CsvWriter>(rep.files[0], rep.scenario_hash,
                                          std::vector<std::string>{"scan_azimuth_deg", "rmse_theta_deg", "rmse_phi_deg",
                                                                   "rmse_range_m", "rmse_vel_mps", "crlb_theta_deg2",
                                                                   "crlb_phi_deg2", "crlb_range_m2", "crlb_vel_mps2"});
        trial_csv = std::make_unique<CsvWriter>(rep.files[1], rep.scenario_hash, trial_header);
    }
    std::vector<bool> locked(axis.size(), false);
    for (std::size_t i = 0; i < axis.size(); ++i)
    {
        const double scan = axis[i];
        const CMatrix F = sensing_precoder(scan, t.elevation_deg, link.cfg).effective;
        const CMatrix W = regenerate_for_scan(link.ga.best.genes, t.azimuth_deg, t.elevation_deg, scan,
                                              t.elevation_deg, link.cfg)
                              .effective;
        EstimatorOptions opt;
        opt.scan_theta_deg = scan;
        opt.scan_phi_deg = t.elevation_deg;
        const auto stats = run_sensing_trials(t, link.X_dd, F, W, link.cfg, opt, spec.trials,
                                              name + "/a" + std::to_string(i), spec.exec);
        const FimReport fim = link_crlb(t, link.dd, link.X_time, F, W, link.cfg);
        locked[i] = stats.rmse_theta_deg <= 3.0 * std::sqrt(fim.bound("theta_deg2"));
        if (csv)
        {
            csv->row({CsvWriter::num(scan), CsvWriter::num(stats.rmse_theta_deg), CsvWriter::num(stats.rmse_phi_deg),
                      CsvWriter::num(stats.rmse_range_m), CsvWriter::num(stats.rmse_velocity_mps),
                      CsvWriter::num(fim.bound("theta_deg2")), CsvWriter::num(fim.bound("phi_deg2")),
                      CsvWriter::num(fim.bound("range_m2")), CsvWriter::num(fim.bound("velocity_mps2"))});
            write_trials(*trial_csv, scan, mimo_snr_db(t.path_coeff, link.X_time, link.cfg), stats);
        }
    }
    // Contiguous lock-in run around the scan angle closest to the target.
    const std::size_t c = nearest_index(axis, t.azimuth_deg);
    double width = 0.0;
    if (locked[c])
    {
        std::size_t lo = c, hi = c;
        while (lo > 0 && locked[lo - 1])
            --lo;
        while (hi + 1 < axis.size() && locked[hi + 1])
            ++hi;
        width = axis[hi] - axis[lo];
    }
    rep.summary["lock_in_window_deg"] = width;
    rep.checks.push_back(make_check("lock-in window where RMSE(theta) <= 3 sqrt(CRLB(theta))", width >= 8.0, width, 8.0,
                                    "deg, >="));
    return rep;
}

oddm::ExperimentReport oddm::run_isac_tradeoff(const ExperimentSpec &spec)
{
    spec.validate();
    ExperimentReport rep = new_report(spec);
    const std::string name = "isac-tradeoff";
    const SensingLink link = make_sensing_link(spec, name);
    const TargetParams &t = spec.target;
    const CMatrix &W = link.ga.combiner.effective;

    RandomStream cs = rng_stream(link.cfg.rng_seed, name + "/channel");
    const CMatrix H = comm_channel(t, link.cfg, cs);
    const CommDesign comm = svd_comm_design(H, link.cfg);
    const double rho = link.cfg.transmit_power_w();
    const double sn = link.cfg.comm_noise_variance;

    EstimatorOptions opt;
    opt.scan_theta_deg = t.azimuth_deg;
    opt.scan_phi_deg = t.elevation_deg;

    const std::vector<std::pair<std::string, CMatrix>> cases{{"best_sensing", link.F},
                                                             {"best_comm", comm.precoder.effective}};
    std::vector<double> se, rmse, crlb;
    std::unique_ptr<CsvWriter> csv;
    if (!spec.output_path.empty())
    {
        rep.files = {file_in(spec, "isac_tradeoff.csv")};
        csv = std::make_unique<CsvWriter>(rep.files[0], rep.scenario_hash,
                                          std::vector<std::string>{"case", "spectral_efficiency", "rmse_theta_deg",
                                                                   "rmse_phi_deg", "rmse_range_m", "rmse_vel_mps",
                                                                   "crlb_theta_deg2", "crlb_phi_deg2", "crlb_range_m2",
                                                                   "crlb_vel_mps2"});
    }
    for (const auto &[label, F] : cases)
    {
        const double s = spectral_efficiency(H, F, comm.combiner.effective, rho, sn);
        // Both cases see identical noise draws.
        const auto stats = run_sensing_trials(t, link.X_dd, F, W, link.cfg, opt, spec.trials, name, spec.exec);
        const FimReport fim = link_crlb(t, link.dd, link.X_time, F, W, link.cfg);
        se.push_back(s);
        rmse.push_back(stats.rmse_theta_deg);
        crlb.push_back(fim.bound("theta_deg2"));
        if (csv)
            csv->row({label, CsvWriter::num(s), CsvWriter::num(stats.rmse_theta_deg), CsvWriter::num(stats.rmse_phi_deg),
                      CsvWriter::num(stats.rmse_range_m), CsvWriter::num(stats.rmse_velocity_mps),
                      CsvWriter::num(fim.bound("theta_deg2")), CsvWriter::num(fim.bound("phi_deg2")),
                      CsvWriter::num(fim.bound("range_m2")), CsvWriter::num(fim.bound("velocity_mps2"))});
    }
    rep.summary["se_best_sensing"] = se[0];
    rep.summary["se_best_comm"] = se[1];
    rep.summary["rmse_theta_best_sensing"] = rmse[0];
    rep.summary["rmse_theta_best_comm"] = rmse[1];
    rep.summary["sqrt_crlb_ratio"] = std::sqrt(crlb[1] / crlb[0]);
    const double ratio = rmse[1] / rmse[0];
    rep.checks.push_back(make_check("SE(SVD precoder) > SE(sensing precoder)", se[1] > se[0], se[1], se[0], "bits/s/Hz"));
    rep.checks.push_back(make_check("RMSE(theta) SVD precoder / sensing precoder", ratio <= 4.0, ratio, 4.0, "<="));
    return rep;
}

oddm::ExperimentReport oddm::run_experiment(const ExperimentSpec &spec)
{
    switch (spec.kind)
    {
    case ExperimentKind::papr: return run_papr(spec);
    case ExperimentKind::siso_rmse: return run_siso_rmse(spec);
    case ExperimentKind::precoder_sweep: return run_precoder_sweep(spec);
    case ExperimentKind::optimize_combiner: return run_optimize_combiner(spec);
    case ExperimentKind::combiner_sweep: return run_combiner_sweep(spec);
    case ExperimentKind::isac_tradeoff: return run_isac_tradeoff(spec);
    }
    throw std::invalid_argument("unknown experiment kind");
}
