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
#include <cstdio>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lagprod {

/// 17 significant digits, enough to round-trip any double.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Ordered key/value metadata. Values are kept as text so they round-trip
/// through persistence unchanged.
class Metadata {
public:
    void set(const std::string& key, std::string value) {
        for (auto& [k, v] : entries_) {
            if (k == key) {
                v = std::move(value);
                return;
            }
        }
        entries_.emplace_back(key, std::move(value));
    }

    std::optional<std::string> get(const std::string& key) const {
        for (const auto& [k, v] : entries_) {
            if (k == key) return v;
        }
        return std::nullopt;
    }

    const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

    bool operator==(const Metadata&) const = default;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

struct Sample {
    std::uint64_t replicate = 0;
    double value = 0.0;

    bool operator==(const Sample&) const = default;
};

/// A batch of Monte Carlo samples. `samples` is ordered by replicate index;
/// `values` holds the same numbers sorted ascending.
struct SampleBatch {
    std::string label;
    Metadata params;
    std::vector<Sample> samples;
    std::vector<double> values;

    static SampleBatch make(std::string label, Metadata params, std::vector<Sample> samples) {
        std::sort(samples.begin(), samples.end(),
                  [](const Sample& a, const Sample& b) { return a.replicate < b.replicate; });
        SampleBatch b;
        b.label = std::move(label);
        b.params = std::move(params);
        b.values.reserve(samples.size());
        for (const auto& s : samples) b.values.push_back(s.value);
        std::sort(b.values.begin(), b.values.end());
        b.samples = std::move(samples);
        return b;
    }

    /// Batch from plain values, replicate indices 0..M-1 in the given order.
    static SampleBatch from_values(std::string label, std::span<const double> xs) {
        std::vector<Sample> s;
        s.reserve(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) s.push_back({i, xs[i]});
        return make(std::move(label), {}, std::move(s));
    }

    std::size_t size() const noexcept { return values.size(); }
};

struct KSReport {
    double D = 0.0;
    std::size_t n_a = 0;
    std::size_t n_b = 0;
    double p_value = 1.0;
};

/// Asymptotic Kolmogorov tail Q(lambda) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2).
inline double kolmogorov_tail(double lambda) {
    if (lambda <= 0.0) return 1.0;
    // Below this the alternating series converges too slowly and Q = 1 to double precision.
    if (lambda < 0.18) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// Two-sample KS distance from a merge scan of the sorted samples. Runs of
/// tied values are consumed from both sides before the ECDFs are compared.
inline KSReport ks_two_sample(const SampleBatch& a, const SampleBatch& b) {
    if (a.values.empty() || b.values.empty()) {
        throw std::invalid_argument("ks_two_sample: empty batch");
    }
    const auto& x = a.values;
    const auto& y = b.values;
    const double na = static_cast<double>(x.size());
    const double nb = static_cast<double>(y.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double t = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == t) ++i;
        while (j < y.size() && y[j] == t) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KSReport r;
    r.D = d;
    r.n_a = x.size();
    r.n_b = y.size();
    r.p_value = kolmogorov_tail(d * std::sqrt(na * nb / (na + nb)));
    return r;
}

/// Fraction of batch values <= x.
inline double ecdf_eval(const SampleBatch& batch, double x) {
    if (batch.values.empty()) throw std::invalid_argument("ecdf_eval: empty batch");
    const auto it = std::upper_bound(batch.values.begin(), batch.values.end(), x);
    return static_cast<double>(it - batch.values.begin()) / static_cast<double>(batch.values.size());
}

struct MomentSummary {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    std::optional<double> mean_stderr;
    std::optional<double> variance_stderr;
};

inline constexpr std::size_t kBatchMeansBlocks = 20;

namespace detail {

struct Moments2 {
    double mean;
    double variance;  // unbiased; 0 for a single value
};

inline Moments2 mean_var(std::span<const double> xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, xs.size() > 1 ? ss / (n - 1.0) : 0.0};
}

}  // namespace detail

/// Unbiased mean and variance, moment skewness m3 / m2^(3/2), and batch-means
/// standard errors over 20 contiguous blocks in replicate order (M >= 20).
inline MomentSummary moments(const SampleBatch& batch) {
    if (batch.samples.empty()) throw std::invalid_argument("moments: empty batch");
    std::vector<double> xs;
    xs.reserve(batch.samples.size());
    for (const auto& s : batch.samples) xs.push_back(s.value);

    MomentSummary out;
    const auto mv = detail::mean_var(xs);
    out.mean = mv.mean;
    out.variance = mv.variance;
    double m2 = 0.0;
    double m3 = 0.0;
    for (double x : xs) {
        const double c = x - mv.mean;
        m2 += c * c;
        m3 += c * c * c;
    }
    m2 /= static_cast<double>(xs.size());
    m3 /= static_cast<double>(xs.size());
    out.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;

    const std::size_t m = xs.size();
    if (m >= kBatchMeansBlocks) {
        std::vector<double> block_means;
        std::vector<double> block_vars;
        for (std::size_t k = 0; k < kBatchMeansBlocks; ++k) {
            const std::size_t lo = k * m / kBatchMeansBlocks;
            const std::size_t hi = (k + 1) * m / kBatchMeansBlocks;
            const auto bmv = detail::mean_var(std::span<const double>(xs).subspan(lo, hi - lo));
            block_means.push_back(bmv.mean);
            block_vars.push_back(bmv.variance);
        }
        const double root_blocks = std::sqrt(static_cast<double>(kBatchMeansBlocks));
        out.mean_stderr = std::sqrt(detail::mean_var(block_means).variance) / root_blocks;
        out.variance_stderr = std::sqrt(detail::mean_var(block_vars).variance) / root_blocks;
    }
    return out;
}

}  // namespace lagprod
