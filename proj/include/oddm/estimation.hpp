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

#ifndef ODDM_ESTIMATION_HPP
#define ODDM_ESTIMATION_HPP

#include "oddm/channel.hpp"
#include "oddm/parallel.hpp"
#include "oddm/scenario.hpp"
#include "oddm/types.hpp"

#include <functional>
#include <vector>

namespace oddm
{
    /// tr(B^H Y) / ||B||_F^2, the least-squares path coefficient for Y ~ alpha B.
    /// Throws std::domain_error for B = 0.
    cd alpha_hat(const CMatrix &Y, const CMatrix &B);

    /// |tr(Y^H B)|^2 / ||B||_F^2.
    double ml_objective(const CMatrix &Y, const CMatrix &B);

    /// Maximizes f by cyclic golden-section line searches inside the box [lo, hi],
    /// starting from x0. A coordinate move is kept only if it does not lower f.
    struct BoxSearchResult
    {
        std::vector<double> x;
        double value = 0.0;
        int cycles = 0;
        bool improved = false; // strictly better than f(x0)
    };
    BoxSearchResult coordinate_golden_search(const std::function<double(const std::vector<double> &)> &f,
                                             std::vector<double> x0, const std::vector<double> &lo,
                                             const std::vector<double> &hi, int max_cycles, double tolerance);

    /// Integer delay/Doppler candidates: l in [0, l_count), k in [k_min, k_max].
    struct DelayDopplerGrid
    {
        int l_count = 1;
        int k_min = 0;
        int k_max = 0;

        /// l in [0, M_cp), k in (-N/2, N/2].
        static DelayDopplerGrid from_config(const ScenarioConfig &cfg);
    };

    struct DelayDopplerEstimate
    {
        double l = 0.0;
        double k = 0.0;
        double objective = 0.0;
        int grid_l = 0;
        int grid_k = 0;
        double grid_objective = 0.0;
    };

    /// Grid search over `grid` followed by off-grid refinement of (l, k) within one
    /// cell of the grid argmax (l kept inside [0, l_upper]). Ties on the grid go to
    /// the lowest (l, k) index.
    DelayDopplerEstimate search_delay_doppler(const std::function<double(double l, double k)> &objective,
                                              const DelayDopplerGrid &grid, double l_upper, Execution exec,
                                              int max_cycles = 100, double tolerance = 1e-10);

    struct EstimatorOptions
    {
        double angle_step_deg = 1.0;
        double angle_half_width_deg = 8.0;
        double scan_theta_deg = 15.0; // centre of the MUSIC grid
        double scan_phi_deg = 90.0;
        int max_cycles = 100;
        double tolerance = 1e-10;
        double music_threshold_db = 6.0;
        /// Weight the fit by (W^H W)^{-1}, the inverse combined-noise covariance.
        bool whiten = true;
        Execution exec = Execution::parallel;
    };

    /// Echo model of one target for fixed pilot and beamformers, with the
    /// O(MN log MN) objective evaluation used by every search stage.
    class SensingProblem
    {
    public:
        SensingProblem(const CMatrix &Y, const CMatrix &X_time, const CMatrix &F, const CMatrix &W,
                       const ScenarioConfig &cfg, bool whiten);

        /// B(theta, phi, l, k): sqrt(Nt Nr) Delta G X F^T A^T W^*.
        CMatrix basis(double theta_deg, double phi_deg, double l, double k) const;
        /// |<Y, B>|^2 / <B, B> in the (possibly whitened) inner product.
        double objective(double theta_deg, double phi_deg, double l, double k) const;
        cd alpha(double theta_deg, double phi_deg, double l, double k) const;

        const ScenarioConfig &config() const { return cfg_; }
        const CMatrix &received() const { return Y_; }
        const CMatrix &combiner() const { return W_; }

    private:
        struct Projection
        {
            cd inner;      // <Y, B>
            double energy; // <B, B>
        };
        Projection project(double theta_deg, double phi_deg, double l, double k) const;

        CMatrix Y_, X_, F_, W_;
        CMatrix Yh_;   // Y^H
        CMatrix Kinv_; // (W^H W)^{-1} or identity
        ScenarioConfig cfg_;
        UpaGeometry geom_;
        double gain_;
    };

    struct AngleGrid
    {
        std::vector<double> theta_deg;
        std::vector<double> phi_deg;

        static AngleGrid around(double theta_deg, double phi_deg, double half_width_deg, double step_deg);
    };

    struct MusicResult
    {
        double theta_deg = 0.0;
        double phi_deg = 0.0;
        RMatrix pseudospectrum; // rows: theta, cols: phi
        RVector eigenvalues;    // ascending
        double peak_to_median_db = 0.0;
        bool confident = false;
    };

    /// Single-source MUSIC in the N_s-dimensional combined space: R_y = (1/MN) Y^T conj(Y),
    /// noise subspace from the N_s - 1 smallest eigenvectors. Throws std::invalid_argument
    /// for N_s < 2 and std::domain_error for an all-zero Y.
    MusicResult music_angles(const CMatrix &Y, const CMatrix &W, const ScenarioConfig &cfg, const AngleGrid &grid,
                             const EstimatorOptions &opt = {});

    struct EstimationResult
    {
        double theta_deg = 0.0;
        double phi_deg = 0.0;
        double l = 0.0;
        double k = 0.0;
        double delay_s = 0.0;
        double doppler_hz = 0.0;
        double range_m = 0.0;
        double velocity_mps = 0.0;
        cd alpha_hat{};
        double objective = 0.0;
        bool refined = false; // joint refinement improved on the coarse estimate

        struct Trace
        {
            MusicResult music;
            DelayDopplerEstimate delay_doppler;
            double coarse_objective = 0.0;
            int refine_cycles = 0;
            double music_ms = 0.0;
            double delay_doppler_ms = 0.0;
            double refine_ms = 0.0;
        } trace;
    };

    DelayDopplerEstimate ml_delay_doppler(const SensingProblem &problem, double theta_deg, double phi_deg,
                                          const EstimatorOptions &opt = {});

    /// 4D refinement over (theta, phi, l, k) in a box of one angle step and one
    /// delay/Doppler cell around the coarse estimate.
    EstimationResult joint_refine(const SensingProblem &problem, double theta_deg, double phi_deg, double l, double k,
                                  const EstimatorOptions &opt = {});

    /// MUSIC angles, then ML delay/Doppler, then joint refinement.
    EstimationResult estimate(const SensingProblem &problem, const EstimatorOptions &opt = {});
} // namespace oddm

#endif
