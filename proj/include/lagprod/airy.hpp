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
#include <stdexcept>
#include <string>
#include <vector>

#include "lagprod/eig.hpp"
#include "lagprod/ensemble.hpp"
#include "lagprod/parallel.hpp"
#include "lagprod/stats.hpp"
#include "lagprod/variates.hpp"

namespace lagprod {

/// Finite-difference grid for the stochastic Airy operator
///   -d^2/dx^2 + x + (2 / sqrt(beta)) B'(x)   on [0, L], f(0) = 0.
struct AiryDiscretization {
    double beta = 2.0;
    double h = 0.02;
    double L = 12.0;
    /// Multiplies the white-noise term. 0 gives the deterministic Airy operator.
    double noise_weight = 1.0;

    std::int64_t N() const { return std::llround(L / h); }

    void validate() const {
        if (!(beta > 0.0)) throw std::invalid_argument("airy: beta must be positive");
        if (!(h > 0.0) || h > 0.1) throw std::invalid_argument("airy: mesh h must lie in (0, 0.1]");
        if (!(L >= 8.0) || !std::isfinite(L)) throw std::invalid_argument("airy: cutoff L must be >= 8");
        if (N() < 80) throw std::invalid_argument("airy: N = round(L/h) must be >= 80");
        if (noise_weight < 0.0) throw std::invalid_argument("airy: noise weight must be nonnegative");
    }
};

/// Tridiagonal discretization on x_k = k h, k = 1..N:
///   A_kk = 2/h^2 + x_k + noise_weight (2/sqrt(beta)) g_k / sqrt(h),  A_k,k+1 = -1/h^2.
/// Draws N standard normals from `stream` in row order. No range checks on
/// (h, N); see AiryDiscretization::validate for the sampler's limits.
inline SymmetricTridiagonal airy_matrix(double beta, double h, std::int64_t N, double noise_weight,
                                        RandomStream& stream) {
    if (N < 1 || !(h > 0.0) || !(beta > 0.0)) throw std::invalid_argument("airy_matrix: bad grid");
    const double inv_h2 = 1.0 / (h * h);
    const double noise = noise_weight * 2.0 / std::sqrt(beta) / std::sqrt(h);
    SymmetricTridiagonal a;
    a.diag.resize(static_cast<std::size_t>(N));
    a.offdiag.assign(static_cast<std::size_t>(N - 1), -inv_h2);
    for (std::int64_t k = 1; k <= N; ++k) {
        double v = 2.0 * inv_h2 + static_cast<double>(k) * h;
        if (noise_weight != 0.0) v += noise * gaussian(stream);
        a.diag[static_cast<std::size_t>(k - 1)] = v;
    }
    return a;
}

/// One TW_beta sample: minus the ground-state eigenvalue of the discretized operator.
inline double sample_tw(const AiryDiscretization& disc, RandomStream stream, const EigConfig& cfg = {}) {
    disc.validate();
    const auto a = airy_matrix(disc.beta, disc.h, disc.N(), disc.noise_weight, stream);
    return -tridiag_extreme_eig(a, Extreme::smallest, cfg);
}

/// M reference samples; replicate r uses split_stream(seed, r).
inline SampleBatch tw_reference_batch(double beta, std::int64_t M, std::uint64_t seed, AiryDiscretization disc,
                                      std::size_t workers = 1, const EigConfig& cfg = {}) {
    if (M < 1) throw std::invalid_argument("tw_reference_batch: M must be >= 1");
    disc.beta = beta;
    disc.validate();
    std::vector<Sample> samples(static_cast<std::size_t>(M));
    parallel_for(samples.size(), workers, [&](std::size_t r) {
        samples[r] = {r, sample_tw(disc, split_stream(seed, r), cfg)};
    });
    Metadata meta;
    meta.set("generator", "stochastic-airy");
    meta.set("beta", format_double(beta));
    meta.set("M", std::to_string(M));
    meta.set("seed", std::to_string(seed));
    meta.set("mesh", format_double(disc.h));
    meta.set("cutoff", format_double(disc.L));
    return SampleBatch::make("tw-reference", std::move(meta), std::move(samples));
}

}  // namespace lagprod
