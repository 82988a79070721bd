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
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "lagprod/ensemble.hpp"

namespace lagprod {

/// Symmetric matrix with bands at offsets 0, 1 and 2.
struct SymmetricPentadiagonal {
    std::vector<double> diag;
    std::vector<double> off1;
    std::vector<double> off2;

    std::size_t size() const noexcept { return diag.size(); }

    /// Entry (i, j); zero outside the band.
    double at(std::size_t i, std::size_t j) const {
        const std::size_t lo = std::min(i, j);
        switch (std::max(i, j) - lo) {
            case 0: return diag[lo];
            case 1: return off1[lo];
            case 2: return off2[lo];
            default: return 0.0;
        }
    }

    /// Max absolute column sum.
    double norm1() const {
        double best = 0.0;
        const std::size_t n = size();
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = j >= 2 ? j - 2 : 0; i < std::min(n, j + 3); ++i) s += std::abs(at(i, j));
            best = std::max(best, s);
        }
        return best;
    }
};

/// S = B_q X_p B_q^T / beta, similar to X_p X_q through
/// B_q (X_p X_q) B_q^{-1} with X_q = B_q^T B_q / beta. B_q is never inverted.
inline SymmetricPentadiagonal product_similarity(const BidiagonalFactor& bq, const SymmetricTridiagonal& xp) {
    detail::check_factor(bq);
    const std::size_t n = bq.diag.size();
    if (xp.size() != n || xp.offdiag.size() + 1 != n) {
        throw std::invalid_argument("product_similarity: dimension mismatch between B_q and X_p");
    }
    auto b = [&](std::size_t i, std::size_t k) -> double {
        if (i == k) return bq.diag[i];
        if (i == k + 1) return bq.subdiag[k];
        return 0.0;
    };
    auto x = [&](std::size_t i, std::size_t k) -> double {
        if (i == k) return xp.diag[i];
        if (i == k + 1) return xp.offdiag[k];
        if (k == i + 1) return xp.offdiag[i];
        return 0.0;
    };
    // (B X)(i, k): B has entries at columns i-1 and i of row i.
    auto bx = [&](std::size_t i, std::size_t k) -> double {
        double s = b(i, i) * x(i, k);
        if (i > 0) s += b(i, i - 1) * x(i - 1, k);
        return s;
    };
    // (B X B^T)(i, j): B^T(k, j) = B(j, k) is nonzero for k in {j-1, j}.
    auto sym = [&](std::size_t i, std::size_t j) -> double {
        double s = bx(i, j) * b(j, j);
        if (j > 0) s += bx(i, j - 1) * b(j, j - 1);
        return s / bq.beta;
    };

    SymmetricPentadiagonal s;
    s.diag.resize(n);
    s.off1.resize(n >= 1 ? n - 1 : 0);
    s.off2.resize(n >= 2 ? n - 2 : 0);
    for (std::size_t i = 0; i < n; ++i) {
        s.diag[i] = sym(i, i);
        if (i + 1 < n) s.off1[i] = sym(i, i + 1);
        if (i + 2 < n) s.off2[i] = sym(i, i + 2);
    }
    return s;
}

inline std::vector<double> banded_matvec(const SymmetricPentadiagonal& s, std::span<const double> v) {
    const std::size_t n = s.size();
    if (v.size() != n || s.off1.size() + 1 != std::max<std::size_t>(n, 1) ||
        s.off2.size() + 2 != std::max<std::size_t>(n, 2)) {
        throw std::invalid_argument("banded_matvec: length mismatch");
    }
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = s.diag[k] * v[k];
        if (k >= 1) acc += s.off1[k - 1] * v[k - 1];
        if (k >= 2) acc += s.off2[k - 2] * v[k - 2];
        if (k + 1 < n) acc += s.off1[k] * v[k + 1];
        if (k + 2 < n) acc += s.off2[k] * v[k + 2];
        out[k] = acc;
    }
    return out;
}

inline Eigen::MatrixXd to_dense(const SymmetricTridiagonal& t) {
    const auto n = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        m(i, i) = t.diag[static_cast<std::size_t>(i)];
        if (i + 1 < n) {
            m(i, i + 1) = m(i + 1, i) = t.offdiag[static_cast<std::size_t>(i)];
        }
    }
    return m;
}

inline Eigen::MatrixXd to_dense(const SymmetricPentadiagonal& s) {
    const auto n = static_cast<Eigen::Index>(s.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            m(i, j) = s.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        }
    }
    return m;
}

inline Eigen::MatrixXd to_dense(const BidiagonalFactor& f) {
    const auto n = static_cast<Eigen::Index>(f.diag.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        m(i, i) = f.diag[static_cast<std::size_t>(i)];
        if (i + 1 < n) m(i + 1, i) = f.subdiag[static_cast<std::size_t>(i)];
    }
    return m;
}

/// Spectrum of the dense nonsymmetric product, for cross-checking at small n.
struct DenseSpectrum {
    std::vector<double> values;  // real parts, ascending
    double max_imag = 0.0;
};

inline constexpr std::size_t kDenseOracleMaxN = 64;

inline DenseSpectrum dense_product_eigs(const SymmetricTridiagonal& xp, const SymmetricTridiagonal& xq) {
    if (xp.size() != xq.size()) {
        throw std::invalid_argument("dense_product_eigs: dimension mismatch");
    }
    if (xp.size() > kDenseOracleMaxN) {
        throw std::invalid_argument("dense_product_eigs: n exceeds the dense oracle bound of 64");
    }
    const Eigen::MatrixXd prod = to_dense(xp) * to_dense(xq);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(prod, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("dense_product_eigs: eigensolver failed");
    }
    DenseSpectrum out;
    const auto& ev = solver.eigenvalues();
    out.values.reserve(static_cast<std::size_t>(ev.size()));
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        out.values.push_back(ev[k].real());
        out.max_imag = std::max(out.max_imag, std::abs(ev[k].imag()));
    }
    std::sort(out.values.begin(), out.values.end());
    return out;
}

}  // namespace lagprod
