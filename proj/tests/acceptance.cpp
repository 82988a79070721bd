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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when all pass).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <thread>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "lagprod/airy.hpp"
#include "lagprod/batch_io.hpp"
#include "lagprod/ensemble.hpp"
#include "lagprod/harness.hpp"
#include "lagprod/product.hpp"
#include "lagprod/scaling.hpp"
#include "lagprod/stats.hpp"

using namespace lagprod;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kConstTol = 1e-12;
constexpr double kSpectrumTol = 1e-9;
constexpr double kImagTol = 1e-8;
constexpr double kSimilarityBudgetSeconds = 5.0;
constexpr double kStdErrs = 5.0;
constexpr double kKsMax = 0.12;
constexpr double kGroundTol = 5e-3;
constexpr double kMeshTol = 0.03;
constexpr double kCutoffTol = 0.01;
constexpr double kDriftTol = 0.1;

struct Outcome {
    bool pass;
    std::string detail;
};

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

char buf[512];

template <class... Args>
std::string fmt(const char* f, Args... args) {
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome constants_suite() {
    double worst = 0.0;
    bool ok = true;
    auto track = [&](double a, double b) {
        const double r = std::abs(a - b) / std::max(std::abs(a), std::abs(b));
        worst = std::max(worst, r);
        ok = ok && r <= kConstTol;
    };
    const std::vector<std::int64_t> ns{1, 2, 5, 16, 100, 256, 1000, 4096, 100000};
    for (std::int64_t n : ns) {
        for (std::int64_t f : {1, 2, 3, 10}) {
            const std::int64_t p = n * f;
            const auto sc = coupled_scaling(n, p, p, 1.0);
            track(sc.C_n, 2.0);
            const auto s = single_scaling(n, p);
            track(s.sigma * s.m * s.m, std::sqrt(static_cast<double>(n) * static_cast<double>(p)));
            track(s.mu / (s.sigma * s.sigma), s.m);
        }
    }
    bool bound_ok = true;
    int grid = 0;
    for (std::int64_t n : {1, 9, 250}) {
        for (std::int64_t dp : {0, 5, 700}) {
            for (std::int64_t dq : {0, 13, 9000}) {
                const std::int64_t p = n + dp;
                const std::int64_t q = p + dq;
                const auto sc = coupled_scaling(n, p, q, 1.0);
                const double r = std::sqrt(static_cast<double>(q) / static_cast<double>(n));
                const double lhs = sc.d_n / sc.a_n * sc.m_n * sc.m_n;
                track(lhs, r / ((1.0 + r) * (1.0 + r)));
                bound_ok = bound_ok && lhs <= 0.25 * (1.0 + kConstTol);
                track(closed_form_cn(n, p, q), std::pow(sc.a_n + sc.b_n, 3));
                ++grid;
            }
        }
    }
    return {ok && bound_ok && grid == 27, fmt("max rel err %.3g (tol %.0e), d_n/a_n bound %s, cube grid %d points", worst,
                                              kConstTol, bound_ok ? "holds" : "violated", grid)};
}

Outcome similarity_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    double worst_imag = 0.0;
    for (std::int64_t n : {2, 4, 8}) {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto bp = sample_bidiagonal({n, n + 3, 1.0}, split_stream(seed, 0));
            const auto bq = sample_bidiagonal({n, n + 7, 1.0}, split_stream(seed, 1));
            const auto xp = laguerre_matrix(bp);
            const auto s = product_similarity(bq, xp);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_dense(s), Eigen::EigenvaluesOnly);
            const auto dense = dense_product_eigs(xp, laguerre_matrix(bq));
            for (std::size_t k = 0; k < dense.values.size(); ++k) {
                worst = std::max(worst, std::abs(es.eigenvalues()[static_cast<Eigen::Index>(k)] - dense.values[k]));
            }
            worst_imag = std::max(worst_imag, dense.max_imag);
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {worst < kSpectrumTol && worst_imag < kImagTol && secs < kSimilarityBudgetSeconds,
            fmt("max |eig diff| %.3g (tol %.0e), max imag %.3g (tol %.0e), %.2fs", worst, kSpectrumTol, worst_imag,
                kImagTol, secs)};
}

Outcome sampler_moments() {
    bool ok = true;
    double worst_z = 0.0;
    const std::size_t N = 100000;
    for (double alpha : {0.5, 1.0, 2.0, 8.0, 64.0}) {
        auto s = split_stream(31337, static_cast<std::uint64_t>(alpha * 2));
        double m = 0.0, m2 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double c = chi(s, {alpha});
            m += c * c;
            m2 += c * c * c * c;
        }
        m /= N;
        const double var = (m2 / N - m * m) * N / (N - 1);
        const double z = std::abs(m - alpha) / std::sqrt(var / N);
        worst_z = std::max(worst_z, z);
        ok = ok && z < kStdErrs;
    }
    const std::int64_t n = 16, kappa = 16;
    const int reps = 10000;
    std::vector<double> s1(n, 0.0), s2(n, 0.0);
    for (int r = 0; r < reps; ++r) {
        const auto x = laguerre_matrix(sample_bidiagonal({n, kappa, 1.0}, split_stream(4711, r)));
        for (std::int64_t j = 0; j < n; ++j) {
            s1[j] += x.diag[j];
            s2[j] += x.diag[j] * x.diag[j];
        }
    }
    double worst_diag = 0.0;
    for (std::int64_t j = 1; j <= n; ++j) {
        const double mean = s1[j - 1] / reps;
        const double var = (s2[j - 1] - reps * mean * mean) / (reps - 1);
        const double z = std::abs(mean - static_cast<double>((kappa - j + 1) + (n - j))) / std::sqrt(var / reps);
        worst_diag = std::max(worst_diag, z);
        ok = ok && z < kStdErrs;
    }
    return {ok, fmt("chi^2 worst z %.2f, diagonal-mean worst z %.2f (limit %.0f)", worst_z, worst_diag, kStdErrs)};
}

SampleBatch tw_reference(double beta, std::int64_t M, std::uint64_t seed) {
    return tw_reference_batch(beta, M, seed, {}, workers());
}

Outcome single_edge_law() {
    ExperimentConfig cfg;
    cfg.mode = Mode::single;
    cfg.n = cfg.p = 400;
    cfg.beta = 2.0;
    cfg.reps = 1000;
    cfg.seed = 401;
    cfg.workers = workers();
    const auto rep = simulate(cfg);
    const auto ks = ks_two_sample(rep.batch, tw_reference(2.0, 4000, 402));
    return {ks.D < kKsMax, fmt("D = %.4f (limit %.2f), p = %.3g", ks.D, kKsMax, ks.p_value)};
}

Outcome product_end_to_end() {
    ExperimentConfig cfg;
    cfg.mode = Mode::product;
    cfg.n = cfg.p = cfg.q = 256;
    cfg.beta = 1.0;
    cfg.reps = 1000;
    cfg.seed = 256;
    cfg.workers = workers();
    const auto rep = simulate(cfg);
    const auto d2 = ks_two_sample(rep.batch, tw_reference(2.0, 5000, 257)).D;
    const auto d1 = ks_two_sample(rep.batch, tw_reference(1.0, 5000, 258)).D;
    return {d2 < kKsMax && d2 < d1 && rep.failed.empty(),
            fmt("D(TW2) = %.4f (limit %.2f), D(TW1) = %.4f, beta0 = %.6g, failed %zu, max iters %lld", d2, kKsMax, d1,
                rep.constants->beta0, rep.failed.size(), static_cast<long long>(rep.max_eig_iterations))};
}

Outcome airy_self_consistency() {
    auto ground = [](double h) {
        RandomStream unused(0);
        return tridiag_extreme_eig(airy_matrix(2.0, h, std::llround(12.0 / h), 0.0, unused), Extreme::smallest);
    };
    // Richardson limit from the O(h^2) finite-difference error.
    const double g01 = ground(0.01);
    const double g005 = ground(0.005);
    const double limit = (4.0 * g005 - g01) / 3.0;
    const double ground_err = std::abs(g01 - limit);

    auto mean_of = [](double h, double L) {
        AiryDiscretization d;
        d.h = h;
        d.L = L;
        double acc = 0.0;
        const auto b = tw_reference_batch(2.0, 4000, 606, d, workers());
        for (const auto& s : b.samples) acc += s.value;
        return acc / 4000.0;
    };
    const double mesh_gap = std::abs(mean_of(0.04, 12.0) - mean_of(0.02, 12.0));
    const double cut_gap = std::abs(mean_of(0.02, 10.0) - mean_of(0.02, 14.0));
    return {ground_err < kGroundTol && mesh_gap < kMeshTol && cut_gap < kCutoffTol,
            fmt("ground state %.6f vs limit %.6f (err %.2g, tol %.0e); mesh gap %.4f (tol %.2f); cutoff gap %.5f (tol %.2f)",
                g01, limit, ground_err, kGroundTol, mesh_gap, kMeshTol, cut_gap, kCutoffTol)};
}

Outcome potential_drift() {
    const auto d = diagnose_potential(400, 400, 2.0, 2000, 77, workers());
    double sup = 0.0;
    double at = 0.0;
    for (std::size_t k = 0; k < d.x.size() && d.x[k] <= 3.0; ++k) {
        const double dev = std::abs(d.mean[k] - d.reference[k]);
        if (dev > sup) {
            sup = dev;
            at = d.x[k];
        }
    }
    return {sup < kDriftTol, fmt("sup |mean - x^2/2| over [0,3] = %.4f at x = %.3f (limit %.1f)", sup, at, kDriftTol)};
}

Outcome determinism() {
    const auto root = fs::temp_directory_path() / "lagprod_acceptance_determinism";
    fs::remove_all(root);
    bool ok = true;
    int files = 0;
    for (Mode mode : {Mode::product, Mode::single, Mode::tw_reference}) {
        std::vector<std::string> csv, report;
        for (std::size_t w : {1u, 2u, 8u}) {
            ExperimentConfig cfg;
            cfg.mode = mode;
            cfg.n = 48;
            cfg.p = 60;
            cfg.q = 75;
            cfg.beta = 1.0;
            cfg.reps = 100;
            cfg.seed = 2718281828ULL;
            cfg.workers = w;
            cfg.out = root / (mode_name(mode) + "_" + std::to_string(w));
            run_experiment(cfg);
            csv.push_back(read_text_file(cfg.out / samples_file_name(mode)));
            report.push_back(read_text_file(cfg.out / report_file_name(mode)));
        }
        ok = ok && csv[0] == csv[1] && csv[0] == csv[2] && report[0] == report[1] && report[0] == report[2];
        files += 2;
    }
    std::vector<std::string> pot;
    for (std::size_t w : {1u, 2u, 8u}) pot.push_back(potential_csv(diagnose_potential(64, 80, 2.0, 50, 5, w), {}));
    ok = ok && pot[0] == pot[1] && pot[0] == pot[2];
    ++files;
    fs::remove_all(root);
    return {ok, fmt("%d output kinds compared across workers {1, 2, 8}", files)};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"constants suite", constants_suite},
        {"similarity oracle", similarity_oracle},
        {"sampler moments", sampler_moments},
        {"single-matrix edge law vs TW2", single_edge_law},
        {"product edge law vs TW2 and beta0 discrimination", product_end_to_end},
        {"stochastic Airy self-consistency", airy_self_consistency},
        {"potential-path drift", potential_drift},
        {"determinism across worker counts", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed;
}
