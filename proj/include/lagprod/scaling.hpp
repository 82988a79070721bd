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
#include <cstdint>
#include <stdexcept>
#include <string>

namespace lagprod {

/// Edge scaling of a single n x i Laguerre matrix.
///
///   m     = (sqrt(n i) / (sqrt n + sqrt i))^(2/3)   grid density of the edge
///   mu    = (sqrt n + sqrt i)^2                     soft-edge location
///   sigma = (sqrt n + sqrt i)^(4/3) / (n i)^(1/6)   fluctuation scale
///
/// These satisfy sigma * m^2 = sqrt(n i) and mu / sigma^2 = m.
struct SingleScaling {
    std::int64_t n = 0;
    std::int64_t i = 0;
    double m = 0.0;
    double mu = 0.0;
    double sigma = 0.0;
};

inline SingleScaling single_scaling(std::int64_t n, std::int64_t i) {
    if (n < 1 || i < n) {
        throw std::invalid_argument("single_scaling: requires 1 <= n <= i (got n=" + std::to_string(n) +
                                    ", i=" + std::to_string(i) + ")");
    }
    const double sn = std::sqrt(static_cast<double>(n));
    const double si = std::sqrt(static_cast<double>(i));
    const double edge = sn + si;
    SingleScaling s;
    s.n = n;
    s.i = i;
    s.m = std::cbrt((sn * si / edge) * (sn * si / edge));
    s.mu = edge * edge;
    s.sigma = std::cbrt(edge * edge * edge * edge) / std::cbrt(sn * si);
    return s;
}

/// Every constant of the coupled edge scaling for X^p X^q.
///
/// `c_n` and `C_n` are the definition-level quantities (a_n + b_n and the
/// inverse-sum noise weight). The printed closed forms are exposed separately
/// through closed_form_cn / closed_form_Cn for cross-checking.
struct ScalingConstants {
    std::int64_t n = 0;
    std::int64_t p = 0;
    std::int64_t q = 0;
    double beta = 0.0;
    SingleScaling single_p;
    SingleScaling single_q;
    double m_n = 0.0;
    double a_n = 0.0;
    double b_n = 0.0;
    double d_n = 0.0;
    double c_n = 0.0;
    double C_n = 0.0;
    double beta0 = 0.0;
    double mu_n = 0.0;
    double stat_denom = 0.0;
};

namespace detail {

inline void check_ordering(std::int64_t n, std::int64_t p, std::int64_t q) {
    if (n < 1 || p < n || q < p) {
        throw std::invalid_argument("scaling: requires 1 <= n <= p <= q (got n=" + std::to_string(n) +
                                    ", p=" + std::to_string(p) + ", q=" + std::to_string(q) + ")");
    }
}

}  // namespace detail

inline ScalingConstants coupled_scaling(std::int64_t n, std::int64_t p, std::int64_t q, double beta) {
    detail::check_ordering(n, p, q);
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw std::invalid_argument("scaling: beta must be positive and finite");
    }
    ScalingConstants sc;
    sc.n = n;
    sc.p = p;
    sc.q = q;
    sc.beta = beta;
    sc.single_p = single_scaling(n, p);
    sc.single_q = single_scaling(n, q);

    const auto& P = sc.single_p;
    const auto& Q = sc.single_q;
    // Weights of H^p and H^q in the expansion of (mu_p mu_q - X^p X^q) / (sigma_p^2 sigma_q^2).
    const double wp = Q.mu / (Q.sigma * Q.sigma * P.sigma);
    const double wq = P.mu / (P.sigma * P.sigma * Q.sigma);

    const double num = (wp * P.m * P.m + wq * Q.m * Q.m) * P.m * Q.m;
    const double den = wp * Q.m + wq * P.m;
    sc.m_n = std::cbrt(num / den);

    const double mn2 = sc.m_n * sc.m_n;
    sc.a_n = P.m * P.m * wp / mn2;
    sc.b_n = Q.m * Q.m * wq / mn2;
    sc.d_n = (P.m * P.m * Q.m * Q.m) / (mn2 * mn2 * P.sigma * Q.sigma);
    sc.c_n = sc.a_n + sc.b_n;

    const double mn3 = mn2 * sc.m_n;
    const double ra = sc.a_n / sc.c_n;
    const double rb = sc.b_n / sc.c_n;
    sc.C_n = 1.0 / (mn3 / (P.m * P.m * P.m) * ra * ra + mn3 / (Q.m * Q.m * Q.m) * rb * rb);
    sc.beta0 = sc.C_n * beta;
    sc.mu_n = P.mu * Q.mu;
    sc.stat_denom = sc.c_n * P.sigma * P.sigma * Q.sigma * Q.sigma;
    return sc;
}

/// The printed closed form for c_n. Evaluates to (a_n + b_n)^3, not a_n + b_n.
inline double closed_form_cn(std::int64_t n, std::int64_t p, std::int64_t q) {
    detail::check_ordering(n, p, q);
    const double sn = std::sqrt(static_cast<double>(n));
    const double sp = std::sqrt(static_cast<double>(p));
    const double sq = std::sqrt(static_cast<double>(q));
    const double ep2 = (sn + sp) * (sn + sp);
    const double eq2 = (sn + sq) * (sn + sq);
    const double snp = sn * sp;
    const double snq = sn * sq;
    return (snp + snq) * (snp + snq) * (eq2 * snp + ep2 * snq) / (ep2 * ep2 * eq2 * eq2);
}

/// The printed closed form for C_n at finite n. Agrees with the
/// definition-level C_n only when p == q.
inline double closed_form_Cn(std::int64_t n, std::int64_t p, std::int64_t q) {
    detail::check_ordering(n, p, q);
    const double sn = std::sqrt(static_cast<double>(n));
    const double sp = std::sqrt(static_cast<double>(p));
    const double sq = std::sqrt(static_cast<double>(q));
    const double ep2 = (sn + sp) * (sn + sp);
    const double eq2 = (sn + sq) * (sn + sq);
    const double pd = static_cast<double>(p);
    const double qd = static_cast<double>(q);
    return 1.0 + (pd * ep2 + qd * eq2) / (sp * sq * (ep2 + eq2));
}

/// Centered and scaled product edge statistic (lambda_max - mu_n) / stat_denom.
inline double product_statistic(double lambda_max, const ScalingConstants& sc) {
    return (lambda_max - sc.mu_n) / sc.stat_denom;
}

/// Single-matrix edge statistic (lambda_max - mu) / sigma.
inline double single_statistic(double lambda_max, const SingleScaling& s) {
    return (lambda_max - s.mu) / s.sigma;
}

}  // namespace lagprod
