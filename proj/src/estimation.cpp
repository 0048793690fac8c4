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

#include "oddm/estimation.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace
{
    using namespace oddm;

    double elapsed_ms(std::chrono::steady_clock::time_point start)
    {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }

    // Golden-section maximization of f on [a, b]; returns (argmax, value).
    std::pair<double, double> golden_max(const std::function<double(double)> &f, double a, double b)
    {
        constexpr double invphi = 0.6180339887498949;
        const double min_width = 1e-10 * std::max(1.0, std::abs(b - a));
        double c = b - invphi * (b - a);
        double d = a + invphi * (b - a);
        double fc = f(c), fd = f(d);
        while (b - a > min_width)
        {
            if (fc >= fd)
            {
                b = d;
                d = c;
                fd = fc;
                c = b - invphi * (b - a);
                fc = f(c);
            }
            else
            {
                a = c;
                c = d;
                fc = fd;
                d = a + invphi * (b - a);
                fd = f(d);
            }
        }
        return fc >= fd ? std::make_pair(c, fc) : std::make_pair(d, fd);
    }

    CMatrix inverse_sqrt(const CMatrix &K)
    {
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(K);
        const RVector s = eig.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
        return eig.eigenvectors() * s.asDiagonal() * eig.eigenvectors().adjoint();
    }
} // namespace

oddm::cd oddm::alpha_hat(const CMatrix &Y, const CMatrix &B)
{
    const double e = B.squaredNorm();
    if (!(e > 0.0))
        throw std::domain_error("alpha_hat: zero basis matrix");
    // Eigen's dot conjugates its first argument: sum conj(B) Y = tr(B^H Y).
    return Eigen::Map<const CVector>(B.data(), B.size()).dot(Eigen::Map<const CVector>(Y.data(), Y.size())) / e;
}

double oddm::ml_objective(const CMatrix &Y, const CMatrix &B)
{
    const double e = B.squaredNorm();
    if (!(e > 0.0))
        return 0.0;
    return std::norm((Y.adjoint() * B).trace()) / e;
}

oddm::BoxSearchResult oddm::coordinate_golden_search(const std::function<double(const std::vector<double> &)> &f,
                                                     std::vector<double> x0, const std::vector<double> &lo,
                                                     const std::vector<double> &hi, int max_cycles,
                                                     double tolerance)
{
    if (x0.size() != lo.size() || x0.size() != hi.size())
        throw std::invalid_argument("coordinate_golden_search: dimension mismatch");
    BoxSearchResult r;
    r.x = std::move(x0);
    r.value = f(r.x);
    const double start = r.value;
    for (int cycle = 0; cycle < max_cycles; ++cycle)
    {
        const double before = r.value;
        for (std::size_t i = 0; i < r.x.size(); ++i)
        {
            std::vector<double> probe = r.x;
            auto line = [&](double t)
            {
                probe[i] = t;
                return f(probe);
            };
            const auto [t, v] = golden_max(line, lo[i], hi[i]);
            if (v >= r.value)
            {
                r.x[i] = t;
                r.value = v;
            }
        }
        r.cycles = cycle + 1;
        if (r.value - before <= tolerance * std::abs(r.value))
            break;
    }
    r.improved = r.value > start;
    return r;
}

oddm::DelayDopplerGrid oddm::DelayDopplerGrid::from_config(const ScenarioConfig &cfg)
{
    return {cfg.cp_length, -(cfg.num_doppler_bins / 2) + 1, cfg.num_doppler_bins / 2};
}

oddm::DelayDopplerEstimate oddm::search_delay_doppler(const std::function<double(double, double)> &objective,
                                                      const DelayDopplerGrid &grid, double l_upper, Execution exec,
                                                      int max_cycles, double tolerance)
{
    const int nk = grid.k_max - grid.k_min + 1;
    if (grid.l_count < 1 || nk < 1)
        throw std::invalid_argument("search_delay_doppler: empty grid");
    const auto values = map_indices<double>(static_cast<std::ptrdiff_t>(grid.l_count) * nk, exec,
                                            [&](std::ptrdiff_t i)
                                            {
                                                const int li = static_cast<int>(i / nk);
                                                const int ki = grid.k_min + static_cast<int>(i % nk);
                                                return objective(li, ki);
                                            });
    const std::size_t best = argmax_lowest_index(values);
    if (best == values.size())
        throw std::domain_error("search_delay_doppler: objective is not finite anywhere on the grid");

    DelayDopplerEstimate est;
    est.grid_l = static_cast<int>(best / nk);
    est.grid_k = grid.k_min + static_cast<int>(best % nk);
    est.grid_objective = values[best];

    const std::vector<double> lo{std::max(0.0, est.grid_l - 1.0), est.grid_k - 1.0};
    const std::vector<double> hi{std::min(l_upper, est.grid_l + 1.0), est.grid_k + 1.0};
    const auto r = coordinate_golden_search([&](const std::vector<double> &x) { return objective(x[0], x[1]); },
                                            {static_cast<double>(est.grid_l), static_cast<double>(est.grid_k)}, lo,
                                            hi, max_cycles, tolerance);
    est.l = r.x[0];
    est.k = r.x[1];
    est.objective = r.value;
    return est;
}

oddm::SensingProblem::SensingProblem(const CMatrix &Y, const CMatrix &X_time, const CMatrix &F, const CMatrix &W,
                                     const ScenarioConfig &cfg, bool whiten)
    : Y_(Y), X_(X_time), F_(F), W_(W), Yh_(Y.adjoint()), cfg_(cfg), geom_(UpaGeometry::from_config(cfg)),
      gain_(std::sqrt(static_cast<double>(cfg.num_tx_antennas) * cfg.num_rx_antennas))
{
    if (Y.rows() != cfg.frame_size() || X_time.rows() != cfg.frame_size() || Y.cols() != W.cols() ||
        X_time.cols() != F.cols() || F.rows() != geom_.size() || W.rows() != geom_.size())
        throw std::invalid_argument("SensingProblem: inconsistent shapes");
    if (whiten)
    {
        const CMatrix K = W.adjoint() * W;
        Kinv_ = K.ldlt().solve(CMatrix::Identity(K.rows(), K.cols()));
    }
    else
        Kinv_ = CMatrix::Identity(W.cols(), W.cols());
}

oddm::SensingProblem::Projection oddm::SensingProblem::project(double theta_deg, double phi_deg, double l,
                                                              double k) const
{
    const CVector a = steering_vector(theta_deg, phi_deg, geom_);
    const CVector u = W_.adjoint() * a;
    const CVector v = F_.transpose() * a;
    const CVector z = DelayDopplerOperator::from_config(l, k, cfg_).apply(CVector(X_ * v));
    const CVector Ku = Kinv_ * u;
    Projection p;
    p.inner = gain_ * z.dot(Y_ * Ku.conjugate());
    p.energy = gain_ * gain_ * z.squaredNorm() * u.dot(Ku).real();
    return p;
}

oddm::CMatrix oddm::SensingProblem::basis(double theta_deg, double phi_deg, double l, double k) const
{
    return mimo_echo(X_, F_, W_, l, k, 1.0, theta_deg, phi_deg, cfg_);
}

double oddm::SensingProblem::objective(double theta_deg, double phi_deg, double l, double k) const
{
    const Projection p = project(theta_deg, phi_deg, l, k);
    return p.energy > 0.0 ? std::norm(p.inner) / p.energy : 0.0;
}

oddm::cd oddm::SensingProblem::alpha(double theta_deg, double phi_deg, double l, double k) const
{
    const Projection p = project(theta_deg, phi_deg, l, k);
    if (!(p.energy > 0.0))
        throw std::domain_error("SensingProblem::alpha: zero model energy");
    return p.inner / p.energy;
}

oddm::AngleGrid oddm::AngleGrid::around(double theta_deg, double phi_deg, double half_width_deg, double step_deg)
{
    if (!(step_deg > 0.0) || half_width_deg < 0.0)
        throw std::invalid_argument("AngleGrid: step must be positive and half width non-negative");
    AngleGrid g;
    const int n = static_cast<int>(std::floor(half_width_deg / step_deg + 1e-9));
    for (int i = -n; i <= n; ++i)
    {
        g.theta_deg.push_back(theta_deg + i * step_deg);
        const double ph = phi_deg + i * step_deg;
        if (ph >= 0.0 && ph <= 180.0)
            g.phi_deg.push_back(ph);
    }
    return g;
}

oddm::MusicResult oddm::music_angles(const CMatrix &Y, const CMatrix &W, const ScenarioConfig &cfg,
                                     const AngleGrid &grid, const EstimatorOptions &opt)
{
    const Eigen::Index ns = Y.cols();
    if (ns < 2)
        throw std::invalid_argument("music_angles: at least two streams are needed for a noise subspace");
    if (Y.squaredNorm() == 0.0)
        throw std::domain_error("music_angles: received matrix is all zeros");
    if (grid.theta_deg.empty() || grid.phi_deg.empty())
        throw std::invalid_argument("music_angles: empty angle grid");

    CMatrix R = (Y.transpose() * Y.conjugate()) / static_cast<double>(Y.rows());
    CMatrix T = CMatrix::Identity(ns, ns);
    if (opt.whiten)
    {
        T = inverse_sqrt(W.adjoint() * W);
        R = T * R * T;
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(R);
    const CMatrix Un = eig.eigenvectors().leftCols(ns - 1);

    MusicResult out;
    out.eigenvalues = eig.eigenvalues();
    const UpaGeometry geom = UpaGeometry::from_config(cfg);
    const std::ptrdiff_t nt = static_cast<std::ptrdiff_t>(grid.theta_deg.size());
    const std::ptrdiff_t np = static_cast<std::ptrdiff_t>(grid.phi_deg.size());
    const auto values = map_indices<double>(nt * np, opt.exec,
                                            [&](std::ptrdiff_t i)
                                            {
                                                const CVector a = steering_vector(grid.theta_deg[i / np],
                                                                                  grid.phi_deg[i % np], geom);
                                                const CVector u = T * (W.adjoint() * a);
                                                const double num = u.squaredNorm();
                                                const double den = (Un.adjoint() * u).squaredNorm();
                                                return num / std::max(den, 1e-30 * num);
                                            });
    out.pseudospectrum.resize(nt, np);
    for (std::ptrdiff_t i = 0; i < nt * np; ++i)
        out.pseudospectrum(i / np, i % np) = values[i];
    const std::size_t best = argmax_lowest_index(values);
    if (best == values.size())
        throw std::domain_error("music_angles: pseudospectrum is not finite");
    out.theta_deg = grid.theta_deg[best / np];
    out.phi_deg = grid.phi_deg[best % np];

    std::vector<double> sorted = values;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    out.peak_to_median_db = 10.0 * std::log10(values[best] / median);
    out.confident = out.peak_to_median_db > opt.music_threshold_db;
    return out;
}

oddm::DelayDopplerEstimate oddm::ml_delay_doppler(const SensingProblem &problem, double theta_deg, double phi_deg,
                                                  const EstimatorOptions &opt)
{
    const ScenarioConfig &cfg = problem.config();
    return search_delay_doppler([&](double l, double k) { return problem.objective(theta_deg, phi_deg, l, k); },
                                DelayDopplerGrid::from_config(cfg), static_cast<double>(cfg.cp_length), opt.exec,
                                opt.max_cycles, opt.tolerance);
}

oddm::EstimationResult oddm::joint_refine(const SensingProblem &problem, double theta_deg, double phi_deg, double l,
                                          double k, const EstimatorOptions &opt)
{
    const ScenarioConfig &cfg = problem.config();
    const double s = opt.angle_step_deg;
    const std::vector<double> lo{theta_deg - s, std::max(0.0, phi_deg - s), std::max(0.0, l - 1.0), k - 1.0};
    const std::vector<double> hi{theta_deg + s, std::min(180.0, phi_deg + s),
                                 std::min(static_cast<double>(cfg.cp_length), l + 1.0), k + 1.0};
    const auto r = coordinate_golden_search(
        [&](const std::vector<double> &x) { return problem.objective(x[0], x[1], x[2], x[3]); },
        {theta_deg, phi_deg, l, k}, lo, hi, opt.max_cycles, opt.tolerance);

    EstimationResult e;
    e.theta_deg = r.x[0];
    e.phi_deg = r.x[1];
    e.l = r.x[2];
    e.k = r.x[3];
    e.objective = r.value;
    e.refined = r.improved;
    e.trace.refine_cycles = r.cycles;
    e.delay_s = e.l * cfg.sample_period();
    e.doppler_hz = e.k / (cfg.num_doppler_bins * cfg.symbol_period());
    e.range_m = range_from_delay(e.delay_s);
    e.velocity_mps = velocity_from_doppler(e.doppler_hz, cfg);
    e.alpha_hat = problem.alpha(e.theta_deg, e.phi_deg, e.l, e.k);
    return e;
}

oddm::EstimationResult oddm::estimate(const SensingProblem &problem, const EstimatorOptions &opt)
{
    auto t0 = std::chrono::steady_clock::now();
    const AngleGrid grid =
        AngleGrid::around(opt.scan_theta_deg, opt.scan_phi_deg, opt.angle_half_width_deg, opt.angle_step_deg);
    MusicResult music = music_angles(problem.received(), problem.combiner(), problem.config(), grid, opt);
    const double music_ms = elapsed_ms(t0);

    t0 = std::chrono::steady_clock::now();
    const DelayDopplerEstimate dd = ml_delay_doppler(problem, music.theta_deg, music.phi_deg, opt);
    const double dd_ms = elapsed_ms(t0);

    t0 = std::chrono::steady_clock::now();
    EstimationResult e = joint_refine(problem, music.theta_deg, music.phi_deg, dd.l, dd.k, opt);
    e.trace.refine_ms = elapsed_ms(t0);
    e.trace.music = std::move(music);
    e.trace.delay_doppler = dd;
    e.trace.coarse_objective = dd.objective;
    e.trace.music_ms = music_ms;
    e.trace.delay_doppler_ms = dd_ms;
    return e;
}
