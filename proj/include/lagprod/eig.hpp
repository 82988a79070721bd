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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "lagprod/ensemble.hpp"
#include "lagprod/product.hpp"
#include "lagprod/variates.hpp"

namespace lagprod {

struct EigConfig {
    double rel_tol = 1e-10;
    /// Iteration budget; 0 selects 10 n + 100.
    std::int64_t max_iter = 0;

    void validate() const {
        if (!(rel_tol > 0.0) || rel_tol > 1e-2) {
            throw std::invalid_argument("EigConfig: rel_tol must lie in (0, 1e-2]");
        }
        if (max_iter < 0) {
            throw std::invalid_argument("EigConfig: max_iter must be positive (or 0 for the default)");
        }
    }

    std::int64_t budget(std::size_t n) const {
        return max_iter > 0 ? max_iter : 10 * static_cast<std::int64_t>(n) + 100;
    }
};

enum class Extreme { smallest, largest };

/// Number of eigenvalues of `t` strictly below `x`, from the signs of the
/// LDL^T pivots of T - xI. Exact zero pivots are nudged to a tiny positive
/// value so that an eigenvalue equal to x is not counted.
inline std::size_t sturm_count(const SymmetricTridiagonal& t, double x) {
    const std::size_t n = t.size();
    if (n == 0) return 0;
    double scale = 0.0;
    for (double d : t.diag) scale = std::max(scale, std::abs(d));
    for (double e : t.offdiag) scale = std::max(scale, std::abs(e));
    const double pivmin = std::max({scale, std::abs(x), 1.0}) * std::numeric_limits<double>::min() /
                          std::numeric_limits<double>::epsilon();
    std::size_t count = 0;
    double q = t.diag[0] - x;
    for (std::size_t k = 0;; ++k) {
        if (q == 0.0) q = pivmin;
        if (q < 0.0) ++count;
        if (k + 1 == n) break;
        const double e = t.offdiag[k];
        q = t.diag[k + 1] - x - e * e / q;
    }
    return count;
}

/// Gershgorin enclosure [lo, hi] of the spectrum.
inline std::pair<double, double> gershgorin_bounds(const SymmetricTridiagonal& t) {
    const std::size_t n = t.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t k = 0; k < n; ++k) {
        double r = 0.0;
        if (k > 0) r += std::abs(t.offdiag[k - 1]);
        if (k + 1 < n) r += std::abs(t.offdiag[k]);
        lo = std::min(lo, t.diag[k] - r);
        hi = std::max(hi, t.diag[k] + r);
    }
    return {lo, hi};
}

/// Extreme eigenvalue by Sturm bisection inside the Gershgorin interval.
/// Absolute error <= rel_tol * (hi - lo) of the initial enclosure.
inline double tridiag_extreme_eig(const SymmetricTridiagonal& t, Extreme which, const EigConfig& cfg = {}) {
    cfg.validate();
    const std::size_t n = t.size();
    if (n == 0) throw std::invalid_argument("tridiag_extreme_eig: empty matrix");
    if (t.offdiag.size() + 1 != n) throw std::invalid_argument("tridiag_extreme_eig: band length mismatch");
    auto [lo, hi] = gershgorin_bounds(t);
    const double width = hi - lo;
    if (width == 0.0) return lo;
    // Widen slightly so both ends are strict brackets.
    lo -= 1e-12 * width + std::numeric_limits<double>::min();
    hi += 1e-12 * width + std::numeric_limits<double>::min();
    const double target = cfg.rel_tol * width;
    // smallest: count(lo) == 0 < count(hi); largest: count(lo) < n == count(hi).
    const std::size_t threshold = which == Extreme::smallest ? 1 : n;
    const std::int64_t budget = cfg.budget(n);
    for (std::int64_t it = 0; it < budget && hi - lo > target; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (sturm_count(t, mid) >= threshold) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Outcome of a Krylov extreme-eigenvalue solve. When `converged` is false,
/// `value` and `residual` hold the best Ritz pair found.
struct EigResult {
    double value = 0.0;
    double residual = std::numeric_limits<double>::infinity();
    double tolerance = 0.0;
    std::int64_t iterations = 0;
    int restarts = 0;
    bool converged = false;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace detail

/// Largest eigenvalue of a symmetric operator by explicitly restarted Lanczos
/// with full reorthogonalization. Acceptance requires the true residual
/// ||A x - theta x||_2 <= rel_tol * op_norm for the unit Ritz vector x.
///
/// `fresh_start` supplies a replacement start vector if the top Ritz value
/// stagnates across restarts; it is used at most once.
template <class MatVec, class FreshStart>
EigResult lanczos_largest(std::size_t n, MatVec&& apply, double op_norm, std::vector<double> start,
                          FreshStart&& fresh_start, const EigConfig& cfg = {}) {
    cfg.validate();
    if (n == 0 || start.size() != n) throw std::invalid_argument("lanczos_largest: bad start vector");

    EigResult res;
    res.tolerance = cfg.rel_tol * op_norm;
    const std::int64_t budget = cfg.budget(n);
    const std::size_t basis_cap = std::min<std::size_t>(n, 160);
    constexpr std::size_t check_stride = 4;
    constexpr int stagnation_window = 3;

    bool used_fresh = false;
    int stagnant = 0;
    double previous_top = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> best_vec;

    auto normalize = [](std::vector<double>& v) {
        const double nv = detail::norm2(v);
        if (!(nv > 0.0)) return false;
        for (double& x : v) x /= nv;
        return true;
    };
    if (!normalize(start)) throw std::invalid_argument("lanczos_largest: zero start vector");

    std::vector<std::vector<double>> basis;
    std::vector<double> alpha;
    std::vector<double> beta;
    basis.reserve(basis_cap);

    while (res.iterations < budget) {
        basis.clear();
        alpha.clear();
        beta.clear();
        basis.push_back(start);

        double theta = 0.0;
        std::vector<double> ritz;
        bool have_ritz = false;
        for (std::size_t k = 0; k < basis_cap && res.iterations < budget; ++k) {
            std::vector<double> w = apply(std::span<const double>(basis[k]));
            ++res.iterations;
            const double a = detail::dot(w, basis[k]);
            alpha.push_back(a);
            for (std::size_t i = 0; i < n; ++i) {
                w[i] -= a * basis[k][i];
                if (k > 0) w[i] -= beta[k - 1] * basis[k - 1][i];
            }
            // Two passes of classical Gram-Schmidt against the whole basis.
            for (int pass = 0; pass < 2; ++pass) {
                for (const auto& v : basis) {
                    const double c = detail::dot(w, v);
                    for (std::size_t i = 0; i < n; ++i) w[i] -= c * v[i];
                }
            }
            const double b = detail::norm2(w);
            const std::size_t dim = k + 1;
            const bool exhausted = b <= 1e-14 * std::max(op_norm, std::abs(a)) || dim == n;
            const bool last = exhausted || dim == basis_cap || res.iterations >= budget;

            if (last || dim % check_stride == 0) {
                Eigen::VectorXd d(static_cast<Eigen::Index>(dim));
                Eigen::VectorXd e(static_cast<Eigen::Index>(dim > 1 ? dim - 1 : 1));
                for (std::size_t i = 0; i < dim; ++i) d[static_cast<Eigen::Index>(i)] = alpha[i];
                for (std::size_t i = 0; i + 1 < dim; ++i) e[static_cast<Eigen::Index>(i)] = beta[i];
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
                tri.computeFromTridiagonal(d, e.head(static_cast<Eigen::Index>(dim - 1)), Eigen::ComputeEigenvectors);
                const auto top = static_cast<Eigen::Index>(dim - 1);
                theta = tri.eigenvalues()[top];
                const double estimate = b * std::abs(tri.eigenvectors()(top, top));
                if (last || estimate <= 0.5 * res.tolerance) {
                    ritz.assign(n, 0.0);
                    for (std::size_t j = 0; j < dim; ++j) {
                        const double y = tri.eigenvectors()(static_cast<Eigen::Index>(j), top);
                        for (std::size_t i = 0; i < n; ++i) ritz[i] += y * basis[j][i];
                    }
                    normalize(ritz);
                    have_ritz = true;
                    std::vector<double> ax = apply(std::span<const double>(ritz));
                    for (std::size_t i = 0; i < n; ++i) ax[i] -= theta * ritz[i];
                    const double r = detail::norm2(ax);
                    if (r < res.residual || best_vec.empty()) {
                        res.residual = r;
                        res.value = theta;
                        best_vec = ritz;
                    }
                    if (r <= res.tolerance) {
                        res.value = theta;
                        res.residual = r;
                        res.converged = true;
                        return res;
                    }
                    if (last) break;
                }
            }
            if (exhausted) break;
            beta.push_back(b);
            for (double& x : w) x /= b;
            basis.push_back(std::move(w));
        }

        if (!have_ritz) break;
        // Stagnation: top Ritz value frozen while the residual test keeps failing.
        if (!std::isnan(previous_top) &&
            std::abs(theta - previous_top) < 0.1 * cfg.rel_tol * std::max(std::abs(theta), 1.0)) {
            ++stagnant;
        } else {
            stagnant = 0;
        }
        previous_top = theta;
        if (stagnant >= stagnation_window) {
            if (used_fresh) break;
            used_fresh = true;
            stagnant = 0;
            previous_top = std::numeric_limits<double>::quiet_NaN();
            start = fresh_start();
            if (start.size() != n || !normalize(start)) break;
        } else {
            start = ritz;
        }
        ++res.restarts;
    }
    return res;
}

/// Deterministic Lanczos start: the normalized all-ones vector plus one
/// zero-mean Gaussian perturbation drawn from `stream`.
inline std::vector<double> perturbed_ones_start(std::size_t n, RandomStream stream) {
    std::vector<double> v(n, 1.0);
    for (double& x : v) x += 0.5 * gaussian(stream);
    return v;
}

/// Largest eigenvalue of a symmetric pentadiagonal matrix.
inline EigResult banded_largest_eig(const SymmetricPentadiagonal& s, const EigConfig& cfg,
                                    const RandomStream& stream) {
    const std::size_t n = s.size();
    if (n == 0) throw std::invalid_argument("banded_largest_eig: empty matrix");
    const double norm = s.norm1();
    if (norm == 0.0) {
        EigResult r;
        r.converged = true;
        r.residual = 0.0;
        return r;
    }
    auto apply = [&](std::span<const double> v) { return banded_matvec(s, v); };
    auto fresh = [&] { return perturbed_ones_start(n, stream.substream(1)); };
    return lanczos_largest(n, apply, norm, perturbed_ones_start(n, stream.substream(0)), fresh, cfg);
}

inline EigResult banded_largest_eig(const SymmetricPentadiagonal& s, const EigConfig& cfg = {}) {
    return banded_largest_eig(s, cfg, RandomStream(0));
}

}  // namespace lagprod
