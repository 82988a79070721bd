/*
   Copyright 2026 The lagprod Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lagprod/scaling.hpp"
#include "lagprod/variates.hpp"

namespace lagprod {

struct EnsembleParams {
    std::int64_t n = 1;
    std::int64_t kappa = 1;
    double beta = 1.0;

    void validate() const {
        if (n < 1 || kappa < n) {
            throw std::invalid_argument("ensemble: requires kappa >= n >= 1 (got n=" + std::to_string(n) +
                                        ", kappa=" + std::to_string(kappa) + ")");
        }
        if (!(beta > 0.0) || !std::isfinite(beta)) {
            throw std::invalid_argument("ensemble: beta must be positive and finite");
        }
    }
};

/// Lower-bidiagonal chi factor B of a beta-Laguerre matrix.
///
///   diag[j]    ~ chi_{beta (kappa - j)},  j = 0..n-1
///   subdiag[j] ~ chi_{beta (n - 1 - j)},  j = 0..n-2   (entry B(j+1, j))
struct BidiagonalFactor {
    std::int64_t n = 0;
    std::int64_t kappa = 0;
    double beta = 1.0;
    std::vector<double> diag;
    std::vector<double> subdiag;
};

struct SymmetricTridiagonal {
    std::vector<double> diag;
    std::vector<double> offdiag;

    std::size_t size() const noexcept { return diag.size(); }
};

/// Chi parameter of factor diagonal entry j (0-based).
inline double diag_chi_param(const EnsembleParams& params, std::int64_t j) {
    return params.beta * static_cast<double>(params.kappa - j);
}

/// Chi parameter of factor subdiagonal entry j (0-based).
inline double subdiag_chi_param(const EnsembleParams& params, std::int64_t j) {
    return params.beta * static_cast<double>(params.n - 1 - j);
}

/// Draws a bidiagonal factor. Diagonal entry j uses substream j of `stream`;
/// subdiagonal entry j uses substream n + j. `stream` itself is not advanced.
inline BidiagonalFactor sample_bidiagonal(const EnsembleParams& params, const RandomStream& stream) {
    params.validate();
    const auto n = params.n;
    BidiagonalFactor f;
    f.n = n;
    f.kappa = params.kappa;
    f.beta = params.beta;
    f.diag.resize(static_cast<std::size_t>(n));
    f.subdiag.resize(static_cast<std::size_t>(n - 1));
    for (std::int64_t j = 0; j < n; ++j) {
        auto s = stream.substream(static_cast<std::uint64_t>(j));
        f.diag[static_cast<std::size_t>(j)] = chi(s, {diag_chi_param(params, j)});
    }
    for (std::int64_t j = 0; j + 1 < n; ++j) {
        auto s = stream.substream(static_cast<std::uint64_t>(n + j));
        f.subdiag[static_cast<std::size_t>(j)] = chi(s, {subdiag_chi_param(params, j)});
    }
    return f;
}

namespace detail {

inline void check_factor(const BidiagonalFactor& f) {
    if (f.n < 1 || f.diag.size() != static_cast<std::size_t>(f.n) ||
        f.subdiag.size() != static_cast<std::size_t>(f.n - 1)) {
        throw std::invalid_argument("bidiagonal factor has inconsistent lengths");
    }
    if (!(f.beta > 0.0)) {
        throw std::invalid_argument("bidiagonal factor has nonpositive beta");
    }
}

}  // namespace detail

/// X = B^T B / beta. Scaling by 1/beta puts the soft edge at (sqrt n + sqrt kappa)^2.
inline SymmetricTridiagonal laguerre_matrix(const BidiagonalFactor& f) {
    detail::check_factor(f);
    const std::size_t n = f.diag.size();
    const double inv_beta = 1.0 / f.beta;
    SymmetricTridiagonal x;
    x.diag.resize(n);
    x.offdiag.resize(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        const double s = j + 1 < n ? f.subdiag[j] : 0.0;
        x.diag[j] = (f.diag[j] * f.diag[j] + s * s) * inv_beta;
    }
    for (std::size_t j = 0; j + 1 < n; ++j) {
        x.offdiag[j] = f.diag[j + 1] * f.subdiag[j] * inv_beta;
    }
    return x;
}

inline std::vector<double> tridiag_matvec(const SymmetricTridiagonal& t, std::span<const double> v) {
    const std::size_t n = t.size();
    if (v.size() != n || t.offdiag.size() + 1 != n) {
        throw std::invalid_argument("tridiag_matvec: length mismatch");
    }
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = t.diag[k] * v[k];
        if (k > 0) acc += t.offdiag[k - 1] * v[k - 1];
        if (k + 1 < n) acc += t.offdiag[k] * v[k + 1];
        out[k] = acc;
    }
    return out;
}

/// Realized edge potential y_1 + y_2 of a single Laguerre matrix, sampled at
/// grid[k-1] = k / m for k = 1..n. The value at k = 0 is identically zero.
struct PotentialPath {
    std::vector<double> grid;
    std::vector<double> values;

    double at(std::size_t k) const { return k == 0 ? 0.0 : values.at(k - 1); }
};

namespace detail {

// Cumulative potential from per-row increments
//   (n + i - X_kk) + 2 (sqrt(n i) - X_k,k+1),
// scaled by m / sqrt(n i).
inline PotentialPath accumulate_potential(std::span<const double> diag, std::span<const double> offdiag,
                                          const SingleScaling& sc) {
    const std::size_t n = diag.size();
    const double ni = static_cast<double>(sc.n) * static_cast<double>(sc.i);
    const double root_ni = std::sqrt(ni);
    const double scale = sc.m / root_ni;
    const double centre = static_cast<double>(sc.n + sc.i);
    PotentialPath path;
    path.grid.resize(n);
    path.values.resize(n);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        acc += centre - diag[k];
        if (k < offdiag.size()) acc += 2.0 * (root_ni - offdiag[k]);
        path.grid[k] = static_cast<double>(k + 1) / sc.m;
        path.values[k] = scale * acc;
    }
    return path;
}

inline void check_potential_args(std::int64_t n, std::int64_t kappa, const SingleScaling& sc) {
    if (sc.n != n || sc.i != kappa) {
        throw std::invalid_argument("potential_path: scaling refers to (n=" + std::to_string(sc.n) +
                                    ", i=" + std::to_string(sc.i) + ") but factor has (n=" + std::to_string(n) +
                                    ", kappa=" + std::to_string(kappa) + ")");
    }
}

}  // namespace detail

inline PotentialPath potential_path(const BidiagonalFactor& f, const SingleScaling& sc) {
    detail::check_factor(f);
    detail::check_potential_args(f.n, f.kappa, sc);
    const auto x = laguerre_matrix(f);
    return detail::accumulate_potential(x.diag, x.offdiag, sc);
}

/// Potential path with every chi variate replaced by its mean (products of
/// independent chis by the product of means).
inline PotentialPath mean_potential_path(const EnsembleParams& params, const SingleScaling& sc) {
    params.validate();
    detail::check_potential_args(params.n, params.kappa, sc);
    const auto n = static_cast<std::size_t>(params.n);
    std::vector<double> diag(n);
    std::vector<double> off(n - 1);
    for (std::size_t k = 0; k < n; ++k) {
        const auto j = static_cast<std::int64_t>(k);
        diag[k] = (diag_chi_param(params, j) + (k + 1 < n ? subdiag_chi_param(params, j) : 0.0)) / params.beta;
    }
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const auto j = static_cast<std::int64_t>(k);
        off[k] = chi_mean(diag_chi_param(params, j + 1)) * chi_mean(subdiag_chi_param(params, j)) / params.beta;
    }
    return detail::accumulate_potential(diag, off, sc);
}

}  // namespace lagprod
