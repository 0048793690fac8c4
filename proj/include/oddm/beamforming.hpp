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

#ifndef ODDM_BEAMFORMING_HPP
#define ODDM_BEAMFORMING_HPP

#include "oddm/channel.hpp"
#include "oddm/random.hpp"
#include "oddm/scenario.hpp"
#include "oddm/types.hpp"

#include <vector>

namespace oddm
{
    /// analog (N_ant x N_RF, entries of modulus 1/sqrt(N_ant)), digital (N_RF x N_s),
    /// effective = analog * digital.
    struct HybridBeamformer
    {
        CMatrix analog;
        CMatrix digital;
        CMatrix effective;

        static HybridBeamformer from_parts(CMatrix analog, CMatrix digital);
        /// Scales the digital part so that ||effective||_F^2 = num_streams.
        void normalize(int num_streams);
    };

    struct HybridFactorization
    {
        HybridBeamformer beamformer;  // normalized to ||effective||_F^2 = N_s
        std::vector<double> residuals; // ||target - analog digital||_F per iteration, before normalization
    };

    /// Alternating minimization: digital by least squares, analog by entrywise phase of
    /// target * digital^H. An analog update is kept only if the residual does not grow.
    /// Stops after `iters` iterations or when the residual improves by less than 1e-8.
    HybridFactorization factorize_hybrid(const CMatrix &target, int n_rf, int iters = 50);

    /// All RF chains steered at (theta_bar, phi_bar): effective = conj(a) 1^T, so that the
    /// transmit response a^T f peaks at the target.
    HybridBeamformer sensing_precoder(double theta_bar, double phi_bar, const ScenarioConfig &cfg);

    /// Unconstrained SVD design: leading N_s right (precoder) and left (combiner)
    /// singular vectors of H, each with ||.||_F^2 = N_s.
    struct SvdTargets
    {
        CMatrix precoder;
        CMatrix combiner;
        RVector singular_values;
    };
    /// Throws std::domain_error if rank(H) < num_streams.
    SvdTargets svd_comm_targets(const CMatrix &H, int num_streams);

    struct CommDesign
    {
        HybridBeamformer precoder;
        HybridBeamformer combiner;
    };
    /// SVD targets factorized into hybrid form (transmit N_RF from cfg, UE uses
    /// num_rf_chains_rx).
    CommDesign svd_comm_design(const CMatrix &H, const ScenarioConfig &cfg);

    /// log2 det(I + (rho/N_s) R_n^{-1} C^H H F F^H H^H C), R_n = sigma2 C^H C.
    /// Throws std::domain_error if R_n is singular.
    double spectral_efficiency(const CMatrix &H, const CMatrix &F, const CMatrix &C, double rho, double sigma2);

    /// Geometric multipath channel (N_ue x N_t):
    /// sqrt(N_t N_ue) sum_l gamma_l a_r(l) a_t(l)^T. Path 0 leaves towards the target and
    /// carries comm_los_dominance_db more power than each of the others; total power 1.
    CMatrix comm_channel(const TargetParams &target, const ScenarioConfig &cfg, RandomStream &stream);

    enum class BeamSide
    {
        transmit, // sum_s |a^T f_s|^2
        receive   // sum_s |a^H w_s|^2
    };

    /// Gain in dB on the theta x phi grid (rows: theta), clamped below at -120 dB.
    RMatrix beampattern(const CMatrix &effective, const std::vector<double> &theta_deg,
                        const std::vector<double> &phi_deg, const UpaGeometry &geom, BeamSide side);
} // namespace oddm

#endif
