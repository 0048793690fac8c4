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

#include "oddm/beamforming.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace
{
    oddm::CMatrix phase_only(const oddm::CMatrix &M)
    {
        const double amp = 1.0 / std::sqrt(static_cast<double>(M.rows()));
        oddm::CMatrix out(M.rows(), M.cols());
        for (Eigen::Index c = 0; c < M.cols(); ++c)
            for (Eigen::Index r = 0; r < M.rows(); ++r)
                out(r, c) = std::polar(amp, std::arg(M(r, c)));
        return out;
    }

    oddm::CMatrix least_squares(const oddm::CMatrix &A, const oddm::CMatrix &B)
    {
        return A.completeOrthogonalDecomposition().solve(B);
    }
} // namespace

oddm::HybridBeamformer oddm::HybridBeamformer::from_parts(CMatrix analog, CMatrix digital)
{
    HybridBeamformer bf;
    bf.effective = analog * digital;
    bf.analog = std::move(analog);
    bf.digital = std::move(digital);
    return bf;
}

void oddm::HybridBeamformer::normalize(int num_streams)
{
    const double norm = effective.norm();
    if (norm == 0.0)
        return;
    const double s = std::sqrt(static_cast<double>(num_streams)) / norm;
    digital *= s;
    effective *= s;
}

oddm::HybridFactorization oddm::factorize_hybrid(const CMatrix &target, int n_rf, int iters)
{
    const Eigen::Index ns = target.cols();
    if (n_rf < ns)
        throw std::invalid_argument("factorize_hybrid: n_rf must be at least the number of streams");

    CMatrix seed(target.rows(), n_rf);
    for (int c = 0; c < n_rf; ++c)
        seed.col(c) = target.col(c % ns);
    CMatrix analog = phase_only(seed);
    CMatrix digital = least_squares(analog, target);
    double residual = (target - analog * digital).norm();

    HybridFactorization out;
    out.residuals.push_back(residual);
    for (int it = 0; it < iters; ++it)
    {
        const CMatrix cand_analog = phase_only(target * digital.adjoint());
        const CMatrix cand_digital = least_squares(cand_analog, target);
        const double cand_residual = (target - cand_analog * cand_digital).norm();
        if (!(cand_residual <= residual))
            break;
        const double gain = residual - cand_residual;
        analog = cand_analog;
        digital = cand_digital;
        residual = cand_residual;
        out.residuals.push_back(residual);
        if (gain < 1e-8)
            break;
    }
    out.beamformer = HybridBeamformer::from_parts(std::move(analog), std::move(digital));
    out.beamformer.normalize(static_cast<int>(ns));
    return out;
}

oddm::HybridBeamformer oddm::sensing_precoder(double theta_bar, double phi_bar, const ScenarioConfig &cfg)
{
    const CVector a = steering_vector(theta_bar, phi_bar, UpaGeometry::from_config(cfg));
    const int n_rf = cfg.num_rf_chains_tx;
    const CMatrix analog = a.conjugate().replicate(1, n_rf);
    const CMatrix digital = CMatrix::Constant(n_rf, cfg.num_streams, cd(1.0 / n_rf, 0.0));
    auto bf = HybridBeamformer::from_parts(analog, digital);
    bf.normalize(cfg.num_streams);
    return bf;
}

oddm::SvdTargets oddm::svd_comm_targets(const CMatrix &H, int num_streams)
{
    if (num_streams < 1 || num_streams > std::min(H.rows(), H.cols()))
        throw std::domain_error("svd_comm_targets: stream count exceeds channel dimensions");
    Eigen::JacobiSVD<CMatrix> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVector &s = svd.singularValues();
    if (!(s[num_streams - 1] > 1e-10 * s[0]))
        throw std::domain_error("svd_comm_targets: channel rank is below the stream count");
    SvdTargets t;
    t.precoder = svd.matrixV().leftCols(num_streams);
    t.combiner = svd.matrixU().leftCols(num_streams);
    t.singular_values = s.head(num_streams);
    return t;
}

oddm::CommDesign oddm::svd_comm_design(const CMatrix &H, const ScenarioConfig &cfg)
{
    const SvdTargets t = svd_comm_targets(H, cfg.num_streams);
    CommDesign d;
    d.precoder = factorize_hybrid(t.precoder, cfg.num_rf_chains_tx).beamformer;
    d.combiner = factorize_hybrid(t.combiner, std::min(cfg.num_rf_chains_rx, static_cast<int>(H.rows()))).beamformer;
    return d;
}

double oddm::spectral_efficiency(const CMatrix &H, const CMatrix &F, const CMatrix &C, double rho, double sigma2)
{
    if (H.cols() != F.rows() || H.rows() != C.rows() || F.cols() != C.cols())
        throw std::invalid_argument("spectral_efficiency: inconsistent shapes");
    const Eigen::Index ns = F.cols();
    const CMatrix Rn = sigma2 * (C.adjoint() * C);
    Eigen::LLT<CMatrix> llt(Rn);
    if (llt.info() != Eigen::Success || !(sigma2 > 0.0))
        throw std::domain_error("spectral_efficiency: singular noise covariance");
    const CMatrix G = C.adjoint() * H * F;
    const CMatrix Lg = llt.matrixL().solve(G);
    const CMatrix S = (rho / static_cast<double>(ns)) * (Lg * Lg.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(S, Eigen::EigenvaluesOnly);
    double se = 0.0;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i)
        se += std::log2(1.0 + std::max(0.0, eig.eigenvalues()[i]));
    return se;
}

oddm::CMatrix oddm::comm_channel(const TargetParams &target, const ScenarioConfig &cfg, RandomStream &stream)
{
    const UpaGeometry tx = UpaGeometry::from_config(cfg);
    const UpaGeometry rx = UpaGeometry::ue_from_config(cfg);
    const int L = cfg.comm_paths;
    const double dominance = std::pow(10.0, cfg.comm_los_dominance_db / 10.0);
    const double total = dominance + (L - 1);

    CMatrix H = CMatrix::Zero(rx.size(), tx.size());
    for (int p = 0; p < L; ++p)
    {
        double th_t, ph_t;
        if (p == 0)
        {
            th_t = target.azimuth_deg;
            ph_t = target.elevation_deg;
        }
        else
        {
            th_t = stream.uniform(-60.0, 60.0);
            ph_t = stream.uniform(60.0, 120.0);
        }
        const double th_r = stream.uniform(-60.0, 60.0);
        const double ph_r = stream.uniform(60.0, 120.0);
        const double power = (p == 0 ? dominance : 1.0) / total;
        const cd gamma = p == 0 ? std::polar(std::sqrt(power), stream.uniform(0.0, 2.0 * pi))
                                : stream.complex_normal(power);
        H += gamma * steering_vector(th_r, ph_r, rx) * steering_vector(th_t, ph_t, tx).transpose();
    }
    return std::sqrt(static_cast<double>(tx.size()) * rx.size()) * H;
}

oddm::RMatrix oddm::beampattern(const CMatrix &effective, const std::vector<double> &theta_deg,
                                const std::vector<double> &phi_deg, const UpaGeometry &geom, BeamSide side)
{
    RMatrix out(theta_deg.size(), phi_deg.size());
    for (std::size_t i = 0; i < theta_deg.size(); ++i)
        for (std::size_t j = 0; j < phi_deg.size(); ++j)
        {
            const CVector a = steering_vector(theta_deg[i], phi_deg[j], geom);
            const CVector r = side == BeamSide::transmit ? CVector(effective.transpose() * a)
                                                         : CVector(effective.adjoint() * a);
            const double gain = r.squaredNorm();
            out(i, j) = gain > 1e-12 ? 10.0 * std::log10(gain) : -120.0;
        }
    return out;
}
