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

#include "oddm/channel.hpp"

#include "oddm/fft.hpp"
#include "oddm/waveform.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

oddm::UpaGeometry oddm::UpaGeometry::from_config(const ScenarioConfig &cfg)
{
    return {cfg.upa_y, cfg.upa_z, cfg.element_spacing_wavelengths};
}

oddm::UpaGeometry oddm::UpaGeometry::ue_from_config(const ScenarioConfig &cfg)
{
    return {cfg.ue_upa_y, cfg.ue_upa_z, cfg.element_spacing_wavelengths};
}

oddm::CVector oddm::steering_vector(double theta_deg, double phi_deg, const UpaGeometry &geom)
{
    const double th = deg2rad(theta_deg);
    const double ph = deg2rad(phi_deg);
    const double kd = 2.0 * pi * geom.spacing_wavelengths;
    const double uy = kd * std::sin(th) * std::sin(ph);
    const double uz = kd * std::cos(ph);
    const double amp = 1.0 / std::sqrt(static_cast<double>(geom.size()));
    CVector a(geom.size());
    for (int nz = 0; nz < geom.nz; ++nz)
        for (int ny = 0; ny < geom.ny; ++ny)
            a[nz * geom.ny + ny] = std::polar(amp, ny * uy + nz * uz);
    return a;
}

oddm::SteeringDerivatives oddm::steering_derivatives(double theta_deg, double phi_deg, const UpaGeometry &geom)
{
    const double th = deg2rad(theta_deg);
    const double ph = deg2rad(phi_deg);
    const double kd = 2.0 * pi * geom.spacing_wavelengths;
    const CVector a = steering_vector(theta_deg, phi_deg, geom);
    SteeringDerivatives d{CVector(a.size()), CVector(a.size())};
    for (int nz = 0; nz < geom.nz; ++nz)
        for (int ny = 0; ny < geom.ny; ++ny)
        {
            const int i = nz * geom.ny + ny;
            d.d_theta[i] = j1 * kd * (ny * std::cos(th) * std::sin(ph)) * a[i];
            d.d_phi[i] = j1 * kd * (ny * std::sin(th) * std::cos(ph) - nz * std::sin(ph)) * a[i];
        }
    return d;
}

oddm::CMatrix oddm::sensing_matrix(const CVector &a)
{
    return a * a.transpose();
}

oddm::DelayDopplerOperator::DelayDopplerOperator(double l, double k, int frame_size, int half_span, double rolloff)
    : l_(l), k_(k), size_(frame_size), half_span_(half_span)
{
    if (frame_size < 2 * half_span + 2 || half_span < 0)
        throw std::invalid_argument("DelayDopplerOperator: frame size " + std::to_string(frame_size) +
                                    " too small for pulse half span " + std::to_string(half_span));
    if (!std::isfinite(l) || !std::isfinite(k))
        throw std::invalid_argument("DelayDopplerOperator: non-finite delay or Doppler");
    const double fl = std::floor(l);
    const double frac = l - fl;
    shift_ = static_cast<int>(fl);
    integer_delay_ = frac == 0.0;

    taps_.resize(2 * half_span + 2);
    for (int m = -half_span; m <= half_span + 1; ++m)
        taps_[m + half_span] = pulse_g(m - frac, rolloff);

    if (!integer_delay_)
    {
        tap_spectrum_ = CVector::Zero(size_);
        for (int m = -half_span; m <= half_span + 1; ++m)
        {
            int idx = (m + shift_) % size_;
            if (idx < 0)
                idx += size_;
            tap_spectrum_[idx] += taps_[m + half_span];
        }
        fft_inplace(tap_spectrum_.data(), size_, false);
    }
}

oddm::DelayDopplerOperator oddm::DelayDopplerOperator::from_config(double l, double k, const ScenarioConfig &cfg)
{
    return {l, k, cfg.frame_size(), cfg.pulse_half_span, cfg.rolloff};
}

oddm::CVector oddm::DelayDopplerOperator::apply_delay(const CVector &x) const
{
    if (x.size() != size_)
        throw std::invalid_argument("DelayDopplerOperator: input length " + std::to_string(x.size()) +
                                    " != frame size " + std::to_string(size_));
    if (integer_delay_)
    {
        CVector y(size_);
        int s = shift_ % size_;
        if (s < 0)
            s += size_;
        y.tail(size_ - s) = x.head(size_ - s);
        y.head(s) = x.tail(s);
        return y;
    }
    CVector y = x;
    fft_inplace(y.data(), size_, false);
    y.array() *= tap_spectrum_.array();
    fft_inplace(y.data(), size_, true);
    return y / static_cast<double>(size_);
}

void oddm::DelayDopplerOperator::apply_doppler_inplace(cd *x) const
{
    if (k_ == 0.0)
        return;
    const double w = 2.0 * pi * k_ / size_;
    for (int i = 0; i < size_; ++i)
        x[i] *= std::polar(1.0, w * i);
}

oddm::CVector oddm::DelayDopplerOperator::apply(const CVector &x) const
{
    CVector y = apply_delay(x);
    apply_doppler_inplace(y.data());
    return y;
}

oddm::CMatrix oddm::DelayDopplerOperator::apply(const CMatrix &X) const
{
    CMatrix Y(X.rows(), X.cols());
    for (Eigen::Index c = 0; c < X.cols(); ++c)
        Y.col(c) = apply(CVector(X.col(c)));
    return Y;
}

double oddm::DelayDopplerOperator::frobenius_norm_sq() const
{
    return size_ * taps_.squaredNorm();
}

oddm::CVector oddm::linear_delay_doppler(const CVector &x, double l, double k, int frame_size, int half_span,
                                         double rolloff)
{
    const double fl = std::floor(l);
    const double frac = l - fl;
    const Eigen::Index shift = static_cast<Eigen::Index>(fl);
    const Eigen::Index len = x.size();
    CVector y = CVector::Zero(len);
    for (int m = -half_span; m <= half_span + 1; ++m)
    {
        const double g = pulse_g(m - frac, rolloff);
        if (g == 0.0)
            continue;
        const Eigen::Index d = m + shift;
        for (Eigen::Index i = std::max<Eigen::Index>(0, d); i < len && i - d < len; ++i)
            y[i] += g * x[i - d];
    }
    const double w = 2.0 * pi * k / frame_size;
    for (Eigen::Index i = 0; i < len; ++i)
        y[i] *= std::polar(1.0, w * static_cast<double>(i));
    return y;
}

oddm::CVector oddm::siso_channel(const CVector &x, const std::vector<TargetParams> &targets, const ScenarioConfig &cfg)
{
    if (x.size() != cfg.frame_size())
        throw std::invalid_argument("siso_channel: signal length must equal M N");
    CVector y = CVector::Zero(x.size());
    for (const auto &t : targets)
    {
        const DelayDoppler dd = derive_delay_doppler(t, cfg);
        y += t.path_coeff * DelayDopplerOperator::from_config(dd.l, dd.k, cfg).apply(x);
    }
    return y;
}

oddm::CMatrix oddm::dd_to_time(const CMatrix &X_dd, int M, int N)
{
    if (X_dd.rows() != static_cast<Eigen::Index>(M) * N)
        throw std::invalid_argument("dd_to_time: expected MN rows");
    CMatrix X(X_dd.rows(), X_dd.cols());
    for (Eigen::Index c = 0; c < X_dd.cols(); ++c)
        X.col(c) = oddm_modulate(unvec(X_dd.col(c), M, N));
    return X;
}

oddm::CMatrix oddm::mimo_echo(const CMatrix &X_time, const CMatrix &F, const CMatrix &W, double l, double k, cd alpha,
                              double theta_deg, double phi_deg, const ScenarioConfig &cfg)
{
    const UpaGeometry geom = UpaGeometry::from_config(cfg);
    if (F.rows() != geom.size() || W.rows() != geom.size() || X_time.cols() != F.cols() ||
        X_time.rows() != cfg.frame_size())
        throw std::invalid_argument("mimo_echo: inconsistent shapes");
    const CVector a = steering_vector(theta_deg, phi_deg, geom);
    // F^T A^T W^* = (F^T a)(W^H a)^T since A = a a^T.
    const CVector v = F.transpose() * a;
    const CVector u = W.adjoint() * a;
    const CVector z = DelayDopplerOperator::from_config(l, k, cfg).apply(CVector(X_time * v));
    const double gain = std::sqrt(static_cast<double>(cfg.num_tx_antennas) * cfg.num_rx_antennas);
    return (gain * alpha) * z * u.transpose();
}

oddm::CMatrix oddm::combined_noise(const CMatrix &W, double noise_variance, Eigen::Index rows, RandomStream &stream)
{
    CMatrix Nmat(rows, W.rows());
    for (Eigen::Index c = 0; c < Nmat.cols(); ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
            Nmat(r, c) = stream.complex_normal(noise_variance);
    return Nmat * W.conjugate();
}

oddm::CMatrix oddm::mimo_receive(const CMatrix &X_dd, const CMatrix &F, const CMatrix &W,
                                 const std::vector<TargetParams> &targets, const ScenarioConfig &cfg,
                                 RandomStream &noise_stream)
{
    const int Ns = cfg.num_streams;
    if (X_dd.rows() != cfg.frame_size() || X_dd.cols() != Ns)
        throw std::invalid_argument("mimo_receive: X_dd must be MN x Ns");
    if (F.rows() != cfg.num_tx_antennas || F.cols() != Ns)
        throw std::invalid_argument("mimo_receive: precoder must be Nt x Ns");
    if (W.rows() != cfg.num_rx_antennas || W.cols() != Ns)
        throw std::invalid_argument("mimo_receive: combiner must be Nr x Ns");

    const CMatrix X = dd_to_time(X_dd, cfg.num_delay_bins, cfg.num_doppler_bins);
    CMatrix Y = CMatrix::Zero(X.rows(), Ns);
    for (const auto &t : targets)
    {
        const DelayDoppler dd = derive_delay_doppler(t, cfg);
        Y += mimo_echo(X, F, W, dd.l, dd.k, t.path_coeff, t.azimuth_deg, t.elevation_deg, cfg);
    }
    if (cfg.noise_variance > 0.0)
        Y += combined_noise(W, cfg.noise_variance, X.rows(), noise_stream);
    return Y;
}
