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

#ifndef ODDM_CRLB_HPP
#define ODDM_CRLB_HPP

#include "oddm/scenario.hpp"
#include "oddm/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace oddm
{
    /// Fisher information over `params` (angles in radians, delay/Doppler in grid
    /// units l and k, path coefficient as real and imaginary parts) together with
    /// derived variance bounds. CRLB keys:
    ///   theta_deg2, phi_deg2                     (always)
    ///   l, k, tau_s2, nu_hz2, range_m2, velocity_mps2 (4D report only)
    /// Unbounded (degenerate) entries are +inf.
    struct FimReport
    {
        std::vector<std::string> params;
        RMatrix fim;
        std::map<std::string, double> crlb;
        double scale_factor = 0.0; // M N N_s ||Delta G||_F^2

        double bound(const std::string &key) const;
    };

    /// Gram matrix of the transmitted delay-Doppler-shifted streams entering the
    /// angle FIM: Sigma = conj(Z^H Z), Z = Delta G X (MN x N_s).
    struct TransmitGram
    {
        CMatrix sigma;
        double scale_factor = 0.0;
    };
    /// Uses the actual pilot frame (time domain, MN x N_s).
    TransmitGram exact_gram(const CMatrix &X_time, double l, double k, const ScenarioConfig &cfg);
    /// Expectation over i.i.d. unit-energy symbols: Sigma = ||Delta G||_F^2 I.
    TransmitGram isotropic_gram(double l, double k, const ScenarioConfig &cfg);

    /// Closed-form FIM over (theta, phi, Re alpha, Im alpha) for the echo
    /// sqrt(Nt Nr) alpha Delta G X F^T A^T W^*, noise variance cfg.noise_variance.
    /// Throws std::domain_error if W^H W is singular.
    FimReport analytic_angle_fim(double theta_deg, double phi_deg, cd alpha, const CMatrix &F, const CMatrix &W,
                                 const TransmitGram &gram, const ScenarioConfig &cfg);

    struct AngleCrlb
    {
        double theta_deg2;
        double phi_deg2;
        bool bounded;
    };
    /// Angle bounds by eliminating the path coefficient and then the other angle
    /// (nested Schur complements). Non-positive complements give +inf, bounded=false.
    AngleCrlb crlb_angles(const FimReport &report);

    struct FiniteDifferenceOptions
    {
        double h_angle_rad = 1e-5;
        double h_delay = 1e-4;   // in units of T_s
        double h_doppler = 1e-4; // in units of 1/(N T)
        double richardson_tolerance = 1e-2;
        int max_halvings = 8;
    };

    /// FIM over (theta, phi, l, k, Re alpha, Im alpha) from central differences of the
    /// noiseless mean, each step checked against its half step (Richardson) and
    /// extrapolated. Throws std::domain_error if W^H W is singular or a step fails to
    /// settle, std::out_of_range if a step leaves the valid delay range.
    FimReport numerical_fim_4d(double theta_deg, double phi_deg, double l, double k, cd alpha, const CMatrix &X_time,
                               const CMatrix &F, const CMatrix &W, const ScenarioConfig &cfg,
                               const FiniteDifferenceOptions &opt = {});

    /// Sub-matrix of a FIM restricted to the listed parameter labels (in that order).
    RMatrix fim_block(const FimReport &report, const std::vector<std::string> &labels);
} // namespace oddm

#endif
