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

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "lagprod/airy.hpp"
#include "lagprod/batch_io.hpp"
#include "lagprod/eig.hpp"
#include "lagprod/ensemble.hpp"
#include "lagprod/parallel.hpp"
#include "lagprod/product.hpp"
#include "lagprod/scaling.hpp"
#include "lagprod/stats.hpp"

namespace lagprod {

using Json = nlohmann::ordered_json;

/// Invalid experiment configuration (maps to exit code 2 in the CLI).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Mode { product, single, tw_reference };

inline std::string mode_name(Mode m) {
    switch (m) {
        case Mode::product: return "product";
        case Mode::single: return "single";
        case Mode::tw_reference: return "tw-reference";
    }
    return "?";
}

struct ExperimentConfig {
    Mode mode = Mode::product;
    std::int64_t n = 64;
    std::int64_t p = 64;
    std::int64_t q = 64;
    double beta = 1.0;
    std::int64_t reps = 100;
    std::uint64_t seed = 1;
    EigConfig eig;
    double mesh = 0.02;
    double cutoff = 12.0;
    std::filesystem::path out = "out";
    std::size_t workers = 1;

    AiryDiscretization airy() const {
        AiryDiscretization d;
        d.beta = beta;
        d.h = mesh;
        d.L = cutoff;
        return d;
    }

    void validate() const {
        auto fail = [](const std::string& msg) { throw ConfigError(msg); };
        if (reps < 1) fail("reps must be >= 1");
        if (workers < 1) fail("workers must be >= 1");
        if (!(beta > 0.0) || !std::isfinite(beta)) fail("beta must be positive and finite");
        try {
            eig.validate();
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
        switch (mode) {
            case Mode::product:
                if (n < 1 || n > p || p > q) {
                    fail("product mode requires 1 <= n <= p <= q (got n=" + std::to_string(n) +
                         ", p=" + std::to_string(p) + ", q=" + std::to_string(q) + ")");
                }
                break;
            case Mode::single:
                if (n < 1 || n > p) {
                    fail("single mode requires 1 <= n <= p (got n=" + std::to_string(n) + ", p=" + std::to_string(p) + ")");
                }
                break;
            case Mode::tw_reference:
                try {
                    airy().validate();
                } catch (const std::invalid_argument& e) {
                    fail(e.what());
                }
                break;
        }
    }
};

struct ArtifactRecord {
    std::string file;  // name relative to the output directory
    std::uintmax_t bytes = 0;
    std::string crc32;
};

struct RunReport {
    ExperimentConfig config;
    std::optional<ScalingConstants> constants;
    std::optional<SingleScaling> single;
    MomentSummary moments;
    std::size_t completed = 0;
    std::vector<std::uint64_t> failed;
    std::int64_t max_eig_iterations = 0;
    std::vector<ArtifactRecord> artifacts;
    double wall_seconds = 0.0;
    double per_replicate_seconds = 0.0;
    SampleBatch batch;
};

// ---------------------------------------------------------------------------
// JSON views

inline Json to_json(const SingleScaling& s) {
    return Json{{"n", s.n}, {"i", s.i}, {"m", s.m}, {"mu", s.mu}, {"sigma", s.sigma}};
}

inline Json to_json(const ScalingConstants& sc) {
    return Json{{"n", sc.n},       {"p", sc.p},         {"q", sc.q},       {"beta", sc.beta},
                {"single_p", to_json(sc.single_p)},     {"single_q", to_json(sc.single_q)},
                {"m_n", sc.m_n},   {"a_n", sc.a_n},     {"b_n", sc.b_n},   {"d_n", sc.d_n},
                {"c_n", sc.c_n},   {"C_n", sc.C_n},     {"beta0", sc.beta0}, {"mu_n", sc.mu_n},
                {"stat_denom", sc.stat_denom}};
}

inline Json to_json(const MomentSummary& m) {
    Json j{{"mean", m.mean}, {"variance", m.variance}, {"skewness", m.skewness}};
    j["mean_stderr"] = m.mean_stderr ? Json(*m.mean_stderr) : Json(nullptr);
    j["variance_stderr"] = m.variance_stderr ? Json(*m.variance_stderr) : Json(nullptr);
    return j;
}

inline Json to_json(const KSReport& r) {
    return Json{{"D", r.D}, {"n_a", r.n_a}, {"n_b", r.n_b}, {"p_value", r.p_value}};
}

/// Configuration echo. Worker count and output directory are left out: they
/// never change results, and leaving them out keeps reports byte-identical.
inline Json config_json(const ExperimentConfig& c) {
    Json j{{"mode", mode_name(c.mode)}};
    if (c.mode != Mode::tw_reference) {
        j["n"] = c.n;
        j["p"] = c.p;
    }
    if (c.mode == Mode::product) j["q"] = c.q;
    j["beta"] = c.beta;
    j["reps"] = c.reps;
    j["seed"] = c.seed;
    j["tol"] = c.eig.rel_tol;
    if (c.mode == Mode::tw_reference) {
        j["mesh"] = c.mesh;
        j["cutoff"] = c.cutoff;
    }
    return j;
}

inline Json report_json(const RunReport& r) {
    Json j;
    j["config"] = config_json(r.config);
    switch (r.config.mode) {
        case Mode::product:
            j["statistic"] = "(lambda_max(X_p X_q) - mu_n) / (c_n sigma_p^2 sigma_q^2)";
            j["constants"] = to_json(*r.constants);
            break;
        case Mode::single:
            j["statistic"] = "(lambda_max(X_p) - mu_p) / sigma_p";
            j["constants"] = to_json(*r.single);
            break;
        case Mode::tw_reference:
            j["statistic"] = "-lambda_min(discretized stochastic Airy operator)";
            j["constants"] = nullptr;
            break;
    }
    j["moments"] = to_json(r.moments);
    j["replicates"] = Json{{"requested", r.config.reps},
                           {"completed", r.completed},
                           {"failed", r.failed.size()},
                           {"failed_indices", r.failed}};
    if (r.config.mode == Mode::product) j["max_eig_iterations"] = r.max_eig_iterations;
    Json arts = Json::array();
    for (const auto& a : r.artifacts) arts.push_back(Json{{"file", a.file}, {"bytes", a.bytes}, {"crc32", a.crc32}});
    j["artifacts"] = arts;
    return j;
}

inline Json timing_json(const RunReport& r) {
    return Json{{"workers", r.config.workers},
                {"wall_seconds", r.wall_seconds},
                {"per_replicate_seconds", r.per_replicate_seconds}};
}

// ---------------------------------------------------------------------------
// Experiments

inline std::string samples_file_name(Mode m) { return mode_name(m) + "_samples.csv"; }
inline std::string report_file_name(Mode m) { return mode_name(m) + "_report.json"; }
inline std::string timing_file_name(Mode m) { return mode_name(m) + "_timing.json"; }

/// Index of the Lanczos start-vector substream inside the B_q stream; above
/// every entry index the factor sampler uses (0..2n-2).
inline std::uint64_t lanczos_substream_index(std::int64_t n) { return static_cast<std::uint64_t>(2 * n); }

struct ProductReplicate {
    double statistic = 0.0;
    EigResult eig;
};

/// One product replicate: B_p from split_stream(seed, 2r), B_q from
/// split_stream(seed, 2r + 1), then T = product_statistic(lambda_max(S)).
inline ProductReplicate product_replicate(const ScalingConstants& sc, std::uint64_t seed, std::uint64_t r,
                                          const EigConfig& cfg) {
    const auto sp = split_stream(seed, 2 * r);
    const auto sq = split_stream(seed, 2 * r + 1);
    const auto bp = sample_bidiagonal({sc.n, sc.p, sc.beta}, sp);
    const auto bq = sample_bidiagonal({sc.n, sc.q, sc.beta}, sq);
    const auto s = product_similarity(bq, laguerre_matrix(bp));
    ProductReplicate out;
    out.eig = banded_largest_eig(s, cfg, sq.substream(lanczos_substream_index(sc.n)));
    out.statistic = product_statistic(out.eig.value, sc);
    return out;
}

/// Single-matrix replicate: same B_p stream as the product mode.
inline double single_replicate(const SingleScaling& s, double beta, std::uint64_t seed, std::uint64_t r,
                               const EigConfig& cfg) {
    const auto bp = sample_bidiagonal({s.n, s.i, beta}, split_stream(seed, 2 * r));
    const double lmax = tridiag_extreme_eig(laguerre_matrix(bp), Extreme::largest, cfg);
    return single_statistic(lmax, s);
}

/// Runs the configured experiment in memory; nothing is written.
inline RunReport simulate(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    RunReport rep;
    rep.config = cfg;
    const auto M = static_cast<std::size_t>(cfg.reps);

    Metadata meta;
    meta.set("mode", mode_name(cfg.mode));
    std::vector<Sample> samples;
    switch (cfg.mode) {
        case Mode::product: {
            const auto sc = coupled_scaling(cfg.n, cfg.p, cfg.q, cfg.beta);
            rep.constants = sc;
            std::vector<ProductReplicate> out(M);
            parallel_for(M, cfg.workers, [&](std::size_t r) { out[r] = product_replicate(sc, cfg.seed, r, cfg.eig); });
            for (std::size_t r = 0; r < M; ++r) {
                rep.max_eig_iterations = std::max(rep.max_eig_iterations, out[r].eig.iterations);
                if (out[r].eig.converged) {
                    samples.push_back({r, out[r].statistic});
                } else {
                    rep.failed.push_back(r);
                }
            }
            meta.set("n", std::to_string(cfg.n));
            meta.set("p", std::to_string(cfg.p));
            meta.set("q", std::to_string(cfg.q));
            meta.set("beta", format_double(cfg.beta));
            meta.set("beta0", format_double(sc.beta0));
            break;
        }
        case Mode::single: {
            const auto s = single_scaling(cfg.n, cfg.p);
            rep.single = s;
            std::vector<double> out(M);
            parallel_for(M, cfg.workers, [&](std::size_t r) { out[r] = single_replicate(s, cfg.beta, cfg.seed, r, cfg.eig); });
            for (std::size_t r = 0; r < M; ++r) samples.push_back({r, out[r]});
            meta.set("n", std::to_string(cfg.n));
            meta.set("p", std::to_string(cfg.p));
            meta.set("beta", format_double(cfg.beta));
            break;
        }
        case Mode::tw_reference: {
            auto b = tw_reference_batch(cfg.beta, cfg.reps, cfg.seed, cfg.airy(), cfg.workers, cfg.eig);
            samples = b.samples;
            meta.set("beta", format_double(cfg.beta));
            meta.set("mesh", format_double(cfg.mesh));
            meta.set("cutoff", format_double(cfg.cutoff));
            break;
        }
    }
    rep.completed = samples.size();
    meta.set("M", std::to_string(cfg.reps));
    meta.set("seed", std::to_string(cfg.seed));
    meta.set("generator", cfg.mode == Mode::tw_reference ? "stochastic-airy" : "beta-laguerre-tridiagonal");
    std::string missing;
    for (auto r : rep.failed) missing += (missing.empty() ? "" : " ") + std::to_string(r);
    meta.set("failures", std::to_string(rep.failed.size()));
    meta.set("missing", missing);
    if (samples.empty()) {
        throw std::runtime_error("every replicate failed; no samples to report");
    }
    rep.batch = SampleBatch::make(mode_name(cfg.mode), std::move(meta), std::move(samples));
    rep.moments = moments(rep.batch);

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.wall_seconds = secs;
    rep.per_replicate_seconds = secs / static_cast<double>(M);
    return rep;
}

/// Runs the experiment and persists <mode>_samples.csv, <mode>_report.json
/// and <mode>_timing.json under cfg.out.
inline RunReport run_experiment(const ExperimentConfig& cfg) {
    auto rep = simulate(cfg);
    std::filesystem::create_directories(cfg.out);
    const auto csv = cfg.out / samples_file_name(cfg.mode);
    write_batch_csv(csv, rep.batch);
    rep.artifacts.push_back({csv.filename().string(), std::filesystem::file_size(csv), file_crc32(csv)});
    write_text_file(cfg.out / report_file_name(cfg.mode), report_json(rep).dump(2) + "\n");
    write_text_file(cfg.out / timing_file_name(cfg.mode), timing_json(rep).dump(2) + "\n");
    return rep;
}

// ---------------------------------------------------------------------------
// compare

inline Json batch_header_json(const std::filesystem::path& path, const SampleBatch& b) {
    Json meta = Json::object();
    for (const auto& [k, v] : b.params.entries()) meta[k] = v;
    return Json{{"path", path.string()}, {"label", b.label}, {"size", b.size()}, {"metadata", meta}};
}

struct CompareResult {
    KSReport ks;
    Json report;
};

inline CompareResult compare_batches(const std::filesystem::path& a_path, const std::filesystem::path& b_path) {
    const auto a = read_batch_csv(a_path);
    const auto b = read_batch_csv(b_path);
    CompareResult out;
    out.ks = ks_two_sample(a, b);
    out.report = to_json(out.ks);
    out.report["batch_a"] = batch_header_json(a_path, a);
    out.report["batch_b"] = batch_header_json(b_path, b);
    return out;
}

// ---------------------------------------------------------------------------
// constants

inline Json constants_json(std::int64_t n, std::int64_t p, std::int64_t q, double beta) {
    const auto sc = coupled_scaling(n, p, q, beta);
    Json j = to_json(sc);
    const double ccn = closed_form_cn(n, p, q);
    const double cCn = closed_form_Cn(n, p, q);
    j["closed_form_cn"] = ccn;
    j["closed_form_Cn"] = cCn;
    const double cube = sc.c_n * sc.c_n * sc.c_n;
    j["closed_form_cn_over_c_n_cubed"] = ccn / cube;
    Json notes = Json::array();
    constexpr double tol = 1e-12;
    if (std::abs(ccn - sc.c_n) > tol * std::abs(sc.c_n)) {
        std::string note = "closed_form_cn differs from operative c_n = a_n + b_n";
        if (std::abs(ccn - cube) <= tol * cube) note += "; closed_form_cn equals c_n^3 (cube relation)";
        notes.push_back(note);
    }
    if (std::abs(cCn - sc.C_n) > tol * std::abs(sc.C_n)) {
        notes.push_back("closed_form_Cn differs from operative (definition-level) C_n; operative value is used for beta0");
    }
    j["notes"] = notes;
    return j;
}

// ---------------------------------------------------------------------------
// diagnose-potential

struct PotentialDiagnostic {
    std::vector<double> x;          // x[0] = 0, then k / m
    std::vector<double> mean;
    std::vector<double> std_error;
    std::vector<double> reference;  // x^2 / 2

    /// sup over grid points with x <= xmax of |mean - x^2/2|.
    double sup_deviation(double xmax) const {
        double s = 0.0;
        for (std::size_t k = 0; k < x.size() && x[k] <= xmax; ++k) s = std::max(s, std::abs(mean[k] - reference[k]));
        return s;
    }
};

/// Replicate r draws its factor from split_stream(seed, r).
inline PotentialDiagnostic diagnose_potential(std::int64_t n, std::int64_t i, double beta, std::int64_t M,
                                              std::uint64_t seed, std::size_t workers = 1) {
    if (M < 2) throw ConfigError("diagnose-potential: reps must be >= 2");
    EnsembleParams params{n, i, beta};
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const auto sc = single_scaling(n, i);
    const auto reps = static_cast<std::size_t>(M);
    std::vector<std::vector<double>> paths(reps);
    parallel_for(reps, workers, [&](std::size_t r) {
        paths[r] = potential_path(sample_bidiagonal(params, split_stream(seed, r)), sc).values;
    });
    const auto len = static_cast<std::size_t>(n);
    PotentialDiagnostic d;
    d.x.push_back(0.0);
    d.mean.push_back(0.0);
    d.std_error.push_back(0.0);
    d.reference.push_back(0.0);
    for (std::size_t k = 0; k < len; ++k) {
        double s = 0.0;
        for (const auto& p : paths) s += p[k];
        const double mean = s / static_cast<double>(reps);
        double ss = 0.0;
        for (const auto& p : paths) ss += (p[k] - mean) * (p[k] - mean);
        const double x = static_cast<double>(k + 1) / sc.m;
        d.x.push_back(x);
        d.mean.push_back(mean);
        d.std_error.push_back(std::sqrt(ss / static_cast<double>(reps - 1) / static_cast<double>(reps)));
        d.reference.push_back(0.5 * x * x);
    }
    return d;
}

inline std::string potential_csv(const PotentialDiagnostic& d, const Metadata& meta) {
    std::string out;
    for (const auto& [k, v] : meta.entries()) out += "# " + k + "=" + v + "\n";
    out += "k,x,mean,stderr,reference\n";
    for (std::size_t k = 0; k < d.x.size(); ++k) {
        out += std::to_string(k) + "," + format_double(d.x[k]) + "," + format_double(d.mean[k]) + "," +
               format_double(d.std_error[k]) + "," + format_double(d.reference[k]) + "\n";
    }
    return out;
}

}  // namespace lagprod
