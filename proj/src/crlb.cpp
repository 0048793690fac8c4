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

#include "oddm/crlb.hpp"

#include "oddm/channel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace
{
    using namespace oddm;

    constexpr double inf = std::numeric_limits<double>::infinity();
    constexpr double rad2_to_deg2 = (180.0 / pi) * (180.0 / pi);

    // (W^H W)^{-1}, rejecting combiners whose Gram matrix is numerically singular.
    CMatrix combiner_gram_inverse(const CMatrix &W)
    {
        const CMatrix K = W.adjoint() * W;
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(K, Eigen::EigenvaluesOnly);
        const double lmax = eig.eigenvalues().maxCoeff();
        const double lmin = eig.eigenvalues().minCoeff();
        if (!(lmax > 0.0) || lmin < 1e-12 * lmax)
            throw std::domain_error("combiner Gram matrix W^H W is singular");
        return K.ldlt().solve(CMatrix::Identity(K.rows(), K.cols()));
    }

    double array_gain(const ScenarioConfig &cfg)
    {
        return static_cast<double>(cfg.num_tx_antennas) * cfg.num_rx_antennas;
    }
} // namespace

double oddm::FimReport::bound(const std::string &key) const
{
    auto it = crlb.find(key);
    if (it == crlb.end())
        throw std::out_of_range("FimReport: no bound named '" + key + "'");
    return it->second;
}

oddm::TransmitGram oddm::exact_gram(const CMatrix &X_time, double l, double k, const ScenarioConfig &cfg)
{
    const auto op = DelayDopplerOperator::from_config(l, k, cfg);
    const CMatrix Z = op.apply(X_time);
    TransmitGram g;
    g.sigma = (Z.adjoint() * Z).conjugate();
    g.scale_factor = static_cast<double>(cfg.frame_size()) * cfg.num_streams * op.frobenius_norm_sq();
    return g;
}

oddm::TransmitGram oddm::isotropic_gram(double l, double k, const ScenarioConfig &cfg)
{
    const auto op = DelayDopplerOperator::from_config(l, k, cfg);
    TransmitGram g;
    g.sigma = op.frobenius_norm_sq() * CMatrix::Identity(cfg.num_streams, cfg.num_streams);
    g.scale_factor = static_cast<double>(cfg.frame_size()) * cfg.num_streams * op.frobenius_norm_sq();
    return g;
}

oddm::FimReport oddm::analytic_angle_fim(double theta_deg, double phi_deg, cd alpha, const CMatrix &F,
                                         const CMatrix &W, const TransmitGram &gram, const ScenarioConfig &cfg)
{
    if (!(cfg.noise_variance > 0.0))
        throw std::domain_error("analytic_angle_fim: noise variance must be positive");
    const CMatrix Kinv = combiner_gram_inverse(W);
    const UpaGeometry geom = UpaGeometry::from_config(cfg);
    const CVector a = steering_vector(theta_deg, phi_deg, geom);
    const SteeringDerivatives d = steering_derivatives(theta_deg, phi_deg, geom);

    // E = (dA) F with dA = da a^T + a da^T, and E_alpha = A F.
    const Eigen::RowVectorXcd aF = a.transpose() * F;
    const CMatrix E_theta = d.d_theta * aF + a * (d.d_theta.transpose() * F);
    const CMatrix E_phi = d.d_phi * aF + a * (d.d_phi.transpose() * F);
    const CMatrix E_alpha = a * aF;

    // tr(E_i^H P E_j Sigma) with P = W K^{-1} W^H.
    const CMatrix Wt = W.adjoint();
    const CMatrix C_theta = Wt * E_theta, C_phi = Wt * E_phi, C_alpha = Wt * E_alpha;
    auto form = [&](const CMatrix &Ci, const CMatrix &Cj) { return (Ci.adjoint() * Kinv * Cj * gram.sigma).trace(); };

    const double f_tt = form(C_theta, C_theta).real();
    const double f_pp = form(C_phi, C_phi).real();
    const double f_tp = form(C_theta, C_phi).real();
    const double f_aa = form(C_alpha, C_alpha).real();
    const cd t_t = form(C_theta, C_alpha);
    const cd t_p = form(C_phi, C_alpha);

    const double c = 2.0 * array_gain(cfg) / cfg.noise_variance;
    const double a2 = std::norm(alpha);
    const cd ac = std::conj(alpha);

    FimReport r;
    r.params = {"theta_rad", "phi_rad", "re_alpha", "im_alpha"};
    r.scale_factor = gram.scale_factor;
    r.fim.resize(4, 4);
    r.fim(0, 0) = c * a2 * f_tt;
    r.fim(1, 1) = c * a2 * f_pp;
    r.fim(0, 1) = r.fim(1, 0) = c * a2 * f_tp;
    r.fim(0, 2) = r.fim(2, 0) = c * (ac * t_t).real();
    r.fim(0, 3) = r.fim(3, 0) = c * (j1 * ac * t_t).real();
    r.fim(1, 2) = r.fim(2, 1) = c * (ac * t_p).real();
    r.fim(1, 3) = r.fim(3, 1) = c * (j1 * ac * t_p).real();
    r.fim(2, 2) = r.fim(3, 3) = c * f_aa;
    r.fim(2, 3) = r.fim(3, 2) = 0.0;

    const AngleCrlb b = crlb_angles(r);
    r.crlb["theta_deg2"] = b.theta_deg2;
    r.crlb["phi_deg2"] = b.phi_deg2;
    return r;
}

oddm::AngleCrlb oddm::crlb_angles(const FimReport &report)
{
    const RMatrix &J = report.fim;
    if (J.rows() < 4 || J.cols() != J.rows())
        throw std::invalid_argument("crlb_angles: expected an angle FIM with a path-coefficient block");
    // Angle rows are 0 and 1, path coefficient occupies the last two rows.
    const Eigen::Index n = J.rows();
    const Eigen::Matrix2d Jaa = J.block(n - 2, n - 2, 2, 2);
    const Eigen::Matrix2d Jxx = J.topLeftCorner(2, 2);
    const Eigen::Matrix2d Jxa = J.block(0, n - 2, 2, 2);
    const double det_aa = Jaa.determinant();
    if (!(det_aa > 0.0))
        return {inf, inf, false};
    const Eigen::Matrix2d S = Jxx - Jxa * Jaa.inverse() * Jxa.transpose();
    const double s_tt = S(0, 0) - S(0, 1) * S(1, 0) / S(1, 1);
    const double s_pp = S(1, 1) - S(0, 1) * S(1, 0) / S(0, 0);
    AngleCrlb out{inf, inf, false};
    if (s_tt > 0.0 && s_pp > 0.0 && S(0, 0) > 0.0 && S(1, 1) > 0.0)
        out = {rad2_to_deg2 / s_tt, rad2_to_deg2 / s_pp, true};
    return out;
}

oddm::FimReport oddm::numerical_fim_4d(double theta_deg, double phi_deg, double l, double k, cd alpha,
                                       const CMatrix &X_time, const CMatrix &F, const CMatrix &W,
                                       const ScenarioConfig &cfg, const FiniteDifferenceOptions &opt)
{
    if (!(cfg.noise_variance > 0.0))
        throw std::domain_error("numerical_fim_4d: noise variance must be positive");
    const CMatrix Kinv = combiner_gram_inverse(W);

    // Parameter vector (theta rad, phi rad, l, k); alpha enters linearly.
    const std::array<double, 4> x0{deg2rad(theta_deg), deg2rad(phi_deg), l, k};
    const std::array<double, 4> h0{opt.h_angle_rad, opt.h_angle_rad, opt.h_delay, opt.h_doppler};

    auto mean = [&](const std::array<double, 4> &x)
    {
        if (!(x[2] > 0.0) || x[2] >= cfg.cp_length)
            throw std::out_of_range("numerical_fim_4d: finite-difference step leaves (0, M_cp) in delay");
        return mimo_echo(X_time, F, W, x[2], x[3], alpha, rad2deg(x[0]), rad2deg(x[1]), cfg);
    };
    auto central = [&](int i, double h)
    {
        auto xp = x0, xm = x0;
        xp[i] += h;
        xm[i] -= h;
        return CMatrix((mean(xp) - mean(xm)) / (2.0 * h));
    };

    std::vector<CMatrix> deriv;
    for (int i = 0; i < 4; ++i)
    {
        double h = h0[i];
        bool settled = false;
        for (int tries = 0; tries <= opt.max_halvings; ++tries, h *= 0.5)
        {
            const CMatrix d1 = central(i, h);
            const CMatrix d2 = central(i, 0.5 * h);
            const double scale = d2.norm();
            if (scale == 0.0 || (d1 - d2).norm() <= opt.richardson_tolerance * scale)
            {
                deriv.push_back((4.0 * d2 - d1) / 3.0);
                settled = true;
                break;
            }
        }
        if (!settled)
            throw std::domain_error("numerical_fim_4d: finite-difference step did not settle");
    }
    const CMatrix mu_alpha = mimo_echo(X_time, F, W, l, k, 1.0, theta_deg, phi_deg, cfg);
    deriv.push_back(mu_alpha);
    deriv.push_back(j1 * mu_alpha);

    FimReport r;
    r.params = {"theta_rad", "phi_rad", "l", "k", "re_alpha", "im_alpha"};
    r.fim.resize(6, 6);
    const double c = 2.0 / cfg.noise_variance;
    for (int i = 0; i < 6; ++i)
    {
        const CMatrix left = deriv[i].conjugate() * Kinv;
        for (int j = i; j < 6; ++j)
            r.fim(i, j) = r.fim(j, i) = c * left.cwiseProduct(deriv[j]).sum().real();
    }
    const auto op = DelayDopplerOperator::from_config(l, k, cfg);
    r.scale_factor = static_cast<double>(cfg.frame_size()) * cfg.num_streams * op.frobenius_norm_sq();

    const RMatrix inv = r.fim.fullPivLu().inverse();
    auto diag = [&](int i) { return inv(i, i) > 0.0 && std::isfinite(inv(i, i)) ? inv(i, i) : inf; };
    const double Ts = cfg.sample_period();
    const double NT = cfg.num_doppler_bins * cfg.symbol_period();
    const double var_tau = diag(2) * Ts * Ts;
    const double var_nu = diag(3) / (NT * NT);
    const double half_c = 0.5 * speed_of_light;
    const double vel_scale = speed_of_light / (2.0 * cfg.carrier_frequency_hz);
    r.crlb["theta_deg2"] = diag(0) * rad2_to_deg2;
    r.crlb["phi_deg2"] = diag(1) * rad2_to_deg2;
    r.crlb["l"] = diag(2);
    r.crlb["k"] = diag(3);
    r.crlb["tau_s2"] = var_tau;
    r.crlb["nu_hz2"] = var_nu;
    r.crlb["range_m2"] = var_tau * half_c * half_c;
    r.crlb["velocity_mps2"] = var_nu * vel_scale * vel_scale;
    return r;
}

oddm::RMatrix oddm::fim_block(const FimReport &report, const std::vector<std::string> &labels)
{
    std::vector<Eigen::Index> idx;
    for (const auto &label : labels)
    {
        auto it = std::find(report.params.begin(), report.params.end(), label);
        if (it == report.params.end())
            throw std::out_of_range("fim_block: unknown parameter '" + label + "'");
        idx.push_back(it - report.params.begin());
    }
    RMatrix out(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j)
            out(i, j) = report.fim(idx[i], idx[j]);
    return out;
}
