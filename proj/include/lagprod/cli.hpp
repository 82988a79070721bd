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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "lagprod/batch_io.hpp"
#include "lagprod/config.hpp"
#include "lagprod/harness.hpp"

namespace lagprod {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfigError = 2,
    kExitThresholdBreach = 3,
};

namespace detail {

struct CliOptions {
    std::int64_t n = 64;
    std::int64_t p = 64;
    std::int64_t q = 64;
    double beta = 1.0;
    std::int64_t reps = 100;
    std::uint64_t seed = 1;
    std::string out = "out";
    std::size_t workers = 1;
    double tol = 1e-10;
    double mesh = 0.02;
    double cutoff = 12.0;
    double threshold = 0.12;
    bool assert_threshold = false;
    double xmax = 3.0;
    std::string batch_a;
    std::string batch_b;
};

// Pulls "--config FILE" / "--config=FILE" out of args.
inline std::optional<std::string> extract_config_path(std::vector<std::string>& args) {
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size();) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ConfigError("--config needs a file argument");
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
        }
    }
    return path;
}

inline bool flag_given(const std::vector<std::string>& args, const std::string& key) {
    const std::string flag = "--" + key;
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

}  // namespace detail

/// Entry point of the `lagprod` tool. `args` excludes the program name.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    detail::CliOptions o;
    CLI::App app{"Monte Carlo lab for edge fluctuations of products of beta-Laguerre matrices", "lagprod"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", o.seed, "Experiment seed");
        sub->add_option("--out", o.out, "Output directory");
        sub->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
    };
    auto add_sampling = [&](CLI::App* sub) {
        add_common(sub);
        sub->add_option("--beta", o.beta, "Ensemble parameter beta");
        sub->add_option("--reps", o.reps, "Number of replicates");
        sub->add_option("--tol", o.tol, "Relative eigensolver tolerance");
    };

    auto* product = app.add_subcommand("sample-product", "Sample the centered/scaled top eigenvalue of X_p X_q");
    add_sampling(product);
    product->add_option("--n", o.n, "Matrix size");
    product->add_option("--p", o.p, "First Laguerre parameter (n <= p)");
    product->add_option("--q", o.q, "Second Laguerre parameter (p <= q)");

    auto* single = app.add_subcommand("sample-single", "Sample the centered/scaled top eigenvalue of X_p");
    add_sampling(single);
    single->add_option("--n", o.n, "Matrix size");
    single->add_option("--p", o.p, "Laguerre parameter (n <= p)");

    auto* tw = app.add_subcommand("sample-tw", "Sample TW_beta via the stochastic Airy operator");
    add_sampling(tw);
    tw->add_option("--mesh", o.mesh, "Mesh step h");
    tw->add_option("--cutoff", o.cutoff, "Domain cutoff L");

    auto* compare = app.add_subcommand("compare", "Two-sample KS comparison of two sample CSV files");
    compare->add_option("batch_a", o.batch_a, "First sample CSV")->required();
    compare->add_option("batch_b", o.batch_b, "Second sample CSV")->required();
    compare->add_option("--out", o.out, "Output directory for compare_report.json");
    compare->add_option("--threshold", o.threshold, "Maximum KS distance accepted by --assert");
    compare->add_flag("--assert", o.assert_threshold, "Exit with code 3 if D exceeds --threshold");

    auto* constants = app.add_subcommand("constants", "Print every scaling constant for (n, p, q, beta)");
    constants->add_option("--n", o.n, "Matrix size");
    constants->add_option("--p", o.p, "First Laguerre parameter");
    constants->add_option("--q", o.q, "Second Laguerre parameter");
    constants->add_option("--beta", o.beta, "Ensemble parameter beta");
    constants->add_option("--out", o.out, "Output directory for constants.json");

    auto* potential = app.add_subcommand("diagnose-potential", "Mean edge potential path of X_p against x^2/2");
    add_common(potential);
    potential->add_option("--n", o.n, "Matrix size");
    potential->add_option("--p", o.p, "Laguerre parameter i (n <= i)");
    potential->add_option("--beta", o.beta, "Ensemble parameter beta");
    potential->add_option("--reps", o.reps, "Number of replicates");
    potential->add_option("--xmax", o.xmax, "Upper end of the summary window");

    try {
        if (auto cfg_path = detail::extract_config_path(args)) {
            const auto entries = read_config_file(*cfg_path);
            const auto sub_pos = std::find_if(args.begin(), args.end(), [&](const std::string& a) {
                return app.get_subcommand_no_throw(a) != nullptr;
            });
            if (sub_pos != args.end()) {
                const CLI::App* sub = app.get_subcommand(*sub_pos);
                std::vector<std::string> injected;
                for (const auto& [key, value] : entries) {
                    if (detail::flag_given(args, key)) continue;
                    if (sub->get_option_no_throw("--" + key) == nullptr) continue;
                    injected.push_back("--" + key);
                    injected.push_back(value);
                }
                args.insert(sub_pos + 1, injected.begin(), injected.end());
            }
        }
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        ExperimentConfig cfg;
        cfg.n = o.n;
        cfg.p = o.p;
        cfg.q = o.q;
        cfg.beta = o.beta;
        cfg.reps = o.reps;
        cfg.seed = o.seed;
        cfg.eig.rel_tol = o.tol;
        cfg.mesh = o.mesh;
        cfg.cutoff = o.cutoff;
        cfg.out = o.out;
        cfg.workers = o.workers;

        auto run_mode = [&](Mode m) {
            cfg.mode = m;
            const auto rep = run_experiment(cfg);
            out << report_json(rep).dump(2) << "\n";
            if (!rep.failed.empty()) {
                err << rep.failed.size() << " replicate(s) failed to converge and were recorded as missing\n";
            }
            return kExitOk;
        };

        if (product->parsed()) return run_mode(Mode::product);
        if (single->parsed()) return run_mode(Mode::single);
        if (tw->parsed()) return run_mode(Mode::tw_reference);

        if (compare->parsed()) {
            auto res = compare_batches(o.batch_a, o.batch_b);
            const bool breach = res.ks.D > o.threshold;
            res.report["threshold"] = o.threshold;
            res.report["within_threshold"] = !breach;
            const std::string text = res.report.dump(2) + "\n";
            if (compare->count("--out") > 0) write_text_file(std::filesystem::path(o.out) / "compare_report.json", text);
            out << text;
            return o.assert_threshold && breach ? kExitThresholdBreach : kExitOk;
        }

        if (constants->parsed()) {
            const std::string text = constants_json(o.n, o.p, o.q, o.beta).dump(2) + "\n";
            if (constants->count("--out") > 0) write_text_file(std::filesystem::path(o.out) / "constants.json", text);
            out << text;
            return kExitOk;
        }

        if (potential->parsed()) {
            const auto d = diagnose_potential(o.n, o.p, o.beta, o.reps, o.seed, o.workers);
            Metadata meta;
            meta.set("n", std::to_string(o.n));
            meta.set("i", std::to_string(o.p));
            meta.set("beta", format_double(o.beta));
            meta.set("M", std::to_string(o.reps));
            meta.set("seed", std::to_string(o.seed));
            const auto path = std::filesystem::path(o.out) / "potential_path.csv";
            write_text_file(path, potential_csv(d, meta));
            Json summary{{"file", path.filename().string()},
                         {"crc32", file_crc32(path)},
                         {"xmax", o.xmax},
                         {"sup_deviation", d.sup_deviation(o.xmax)}};
            out << summary.dump(2) << "\n";
            return kExitOk;
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace lagprod
