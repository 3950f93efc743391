// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include "rsharp/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"rsharp: matrix-free spectral sharpness toolkit"};
    app.require_subcommand(1);

    rsharp::cli::EntropyArgs entropy_args;
    auto* entropy = app.add_subcommand(
        "entropy", "Estimate matrix Renyi entropy via stochastic Lanczos quadrature");
    entropy->add_option("--matrix", entropy_args.matrix_path, "CSV or SYMF matrix file")
        ->required();
    entropy->add_option("--alpha", entropy_args.alpha, "Renyi order")->required();
    entropy->add_option("--probes", entropy_args.probes, "number of probe vectors (l)");
    entropy->add_option("--lanczos", entropy_args.lanczos, "Lanczos steps (m)");
    entropy->add_option("--seed", entropy_args.seed, "RNG seed");
    entropy->add_option("--policy", entropy_args.policy,
                        "negative-eigenvalue policy: abs|clip|shift");
    entropy->add_flag("--paper-ratio", entropy_args.paper_ratio,
                      "use the plain sum(A)/sum(B) normalization");
    entropy->add_option("--threads", entropy_args.threads, "probe worker threads");

    rsharp::cli::OracleArgs oracle_args;
    auto* oracle =
        app.add_subcommand("oracle", "Exact dense-eigendecomposition entropy");
    oracle->add_option("--matrix", oracle_args.matrix_path, "CSV or SYMF matrix file")
        ->required();
    oracle->add_option("--alpha", oracle_args.alpha, "Renyi order")->required();
    oracle->add_option("--policy", oracle_args.policy,
                       "negative-eigenvalue policy: abs|clip|shift");
    oracle->add_option("--spectrum-out", oracle_args.spectrum_out,
                       "write eigenvalues to CSV, one per line");

    rsharp::cli::TrainArgs train_args;
    auto* train = app.add_subcommand("train", "Train one model from a JSON config");
    train->add_option("--config", train_args.config_path, "train config JSON")->required();
    train->add_option("--out", train_args.out_dir, "output directory")->required();

    rsharp::cli::GridArgs grid_args;
    auto* grid = app.add_subcommand("grid", "Run an experiment grid");
    grid->add_option("--config", grid_args.config_path, "grid config JSON")->required();
    grid->add_option("--out", grid_args.out_path, "results file (NDJSON)")->required();
    grid->add_option("--workers", grid_args.workers, "parallel cell workers");
    grid->add_flag("--resume", grid_args.resume, "skip cells already in the results file");

    rsharp::cli::CorrelateArgs corr_args;
    auto* corr = app.add_subcommand("correlate",
                                    "Kendall correlation of measures vs generalization");
    corr->add_option("--in", corr_args.in_path, "results file from grid")->required();
    corr->add_option("--target", corr_args.target, "gap|test_loss");
    corr->add_option("--alpha-list", corr_args.alpha_list,
                     "restrict Renyi rows to these orders");
    corr->add_option("--out", corr_args.out_prefix, "write <prefix>.csv and <prefix>.json");
    corr->add_flag("--json", corr_args.json_stdout, "print JSON instead of CSV");

    auto* selfcheck =
        app.add_subcommand("selfcheck", "Run the invariance/inequality/oracle suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (entropy->parsed()) return rsharp::cli::cmd_entropy(entropy_args);
        if (oracle->parsed()) return rsharp::cli::cmd_oracle(oracle_args);
        if (train->parsed()) return rsharp::cli::cmd_train(train_args);
        if (grid->parsed()) return rsharp::cli::cmd_grid(grid_args);
        if (corr->parsed()) return rsharp::cli::cmd_correlate(corr_args);
        if (selfcheck->parsed()) return rsharp::cli::cmd_selfcheck();
    } catch (const rsharp::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const rsharp::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
