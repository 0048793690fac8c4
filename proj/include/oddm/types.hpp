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

#ifndef ODDM_TYPES_HPP
#define ODDM_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <numbers>

namespace oddm
{
    using cd = std::complex<double>;
    using CMatrix = Eigen::MatrixXcd;
    using CVector = Eigen::VectorXcd;
    using RMatrix = Eigen::MatrixXd;
    using RVector = Eigen::VectorXd;

    inline constexpr double pi = std::numbers::pi;
    inline constexpr double speed_of_light = 299792458.0; // m/s
    inline constexpr cd j1{0.0, 1.0};

    inline constexpr double deg2rad(double deg) { return deg * pi / 180.0; }
    inline constexpr double rad2deg(double rad) { return rad * 180.0 / pi; }

    /// Column-major vectorization, vec(X).
    inline CVector vec(const CMatrix &X)
    {
        return Eigen::Map<const CVector>(X.data(), X.size());
    }

    /// Inverse of vec for a rows x cols matrix.
    inline CMatrix unvec(const CVector &x, Eigen::Index rows, Eigen::Index cols)
    {
        return Eigen::Map<const CMatrix>(x.data(), rows, cols);
    }
} // namespace oddm

#endif
