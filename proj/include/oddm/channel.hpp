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

#ifndef ODDM_CHANNEL_HPP
#define ODDM_CHANNEL_HPP

#include "oddm/random.hpp"
#include "oddm/scenario.hpp"
#include "oddm/types.hpp"

#include <vector>

namespace oddm
{
    /// Uniform planar array in the y-z plane. Element (ny, nz) sits at index nz*ny_count + ny.
    struct UpaGeometry
    {
        int ny = 1;
        int nz = 1;
        double spacing_wavelengths = 0.5;

        int size() const { return ny * nz; }
        static UpaGeometry from_config(const ScenarioConfig &cfg);
        static UpaGeometry ue_from_config(const ScenarioConfig &cfg);
    };

    /// a(theta, phi) = a_z(phi) kron a_y(theta, phi), unit norm.
    /// Entry phase: 2 pi d/lambda (ny sin(theta) sin(phi) + nz cos(phi)).
    CVector steering_vector(double theta_deg, double phi_deg, const UpaGeometry &geom);

    /// Partial derivatives of the steering vector, per radian.
    struct SteeringDerivatives
    {
        CVector d_theta;
        CVector d_phi;
    };
    SteeringDerivatives steering_derivatives(double theta_deg, double phi_deg, const UpaGeometry &geom);

    /// A = a a^T (symmetric, rank one).
    CMatrix sensing_matrix(const CVector &a);

    /// Delta G_l on length-MN vectors: fractional delay l (in T_s) with raised-cosine
    /// taps g(m - frac(l)), m in [-Q, Q+1], cyclically shifted by floor(l), followed
    /// by the Doppler ramp z^i, z = exp(j 2 pi k / MN).
    class DelayDopplerOperator
    {
    public:
        DelayDopplerOperator(double l, double k, int frame_size, int half_span, double rolloff);
        static DelayDopplerOperator from_config(double l, double k, const ScenarioConfig &cfg);

        double l() const { return l_; }
        double k() const { return k_; }
        int frame_size() const { return size_; }
        int half_span() const { return half_span_; }

        /// Integer part of l, and tap values g(m - frac(l)) for m = -Q..Q+1.
        int shift() const { return shift_; }
        const RVector &taps() const { return taps_; }

        /// Fast path: FFT circular convolution (exact cyclic shift when l is an integer).
        CVector apply(const CVector &x) const;
        /// Column-wise apply.
        CMatrix apply(const CMatrix &X) const;

        /// G_l alone (no Doppler ramp).
        CVector apply_delay(const CVector &x) const;
        /// Multiply by the Doppler diagonal in place.
        void apply_doppler_inplace(cd *x) const;

        /// ||Delta G_l||_F^2 = MN * sum of squared taps.
        double frobenius_norm_sq() const;

    private:
        double l_, k_;
        int size_, half_span_, shift_;
        bool integer_delay_;
        RVector taps_;
        CVector tap_spectrum_;
    };

    /// Non-cyclic delay and Doppler on a sample stream: same taps as
    /// DelayDopplerOperator, zero before the stream start, phase exp(j 2 pi k i / MN)
    /// at absolute sample index i. Output has the input length.
    CVector linear_delay_doppler(const CVector &x, double l, double k, int frame_size, int half_span, double rolloff);

    /// sum_p alpha_p Delta_p G_p x for targets' delay/Doppler; alpha_p = path_coeff.
    CVector siso_channel(const CVector &x, const std::vector<TargetParams> &targets, const ScenarioConfig &cfg);

    /// Noiseless single-path echo in the combined domain:
    /// sqrt(Nt Nr) alpha (Delta G X) F^T A^T W^*, X given in the time domain (MN x Ns).
    CMatrix mimo_echo(const CMatrix &X_time, const CMatrix &F, const CMatrix &W, double l, double k, cd alpha,
                      double theta_deg, double phi_deg, const ScenarioConfig &cfg);

    /// Combined noise N W^* with vec(N) ~ CN(0, sigma2 I), N of size rows x Nr.
    CMatrix combined_noise(const CMatrix &W, double noise_variance, Eigen::Index rows, RandomStream &stream);

    /// Full MIMO receive model. X_dd holds one vectorized M x N delay-Doppler frame
    /// per column (MN x Ns); noise uses cfg.noise_variance.
    /// Throws std::invalid_argument on shape mismatch, std::out_of_range for
    /// delays beyond the CP.
    CMatrix mimo_receive(const CMatrix &X_dd, const CMatrix &F, const CMatrix &W,
                         const std::vector<TargetParams> &targets, const ScenarioConfig &cfg, RandomStream &noise_stream);

    /// Time-domain frame (F_N^H kron I_M) X_dd, column by column.
    CMatrix dd_to_time(const CMatrix &X_dd, int M, int N);
} // namespace oddm

#endif
