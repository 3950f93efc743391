// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rsharp::cli {

struct EntropyArgs {
    std::string matrix_path;
    double alpha = 0.5;
    std::size_t probes = 100;
    std::size_t lanczos = 15;
    std::uint64_t seed = 0;
    std::string policy = "clip";
    bool paper_ratio = false;
    std::size_t threads = 1;
};

struct OracleArgs {
    std::string matrix_path;
    double alpha = 0.5;
    std::string policy = "clip";
    std::string spectrum_out; // optional CSV, one eigenvalue per line
};

struct TrainArgs {
    std::string config_path;
    std::string out_dir;
};

struct GridArgs {
    std::string config_path;
    std::string out_path;
    std::size_t workers = 1;
    bool resume = false;
};

struct CorrelateArgs {
    std::string in_path;
    std::string target = "gap";
    std::vector<double> alpha_list;
    std::string out_prefix; // optional: writes <prefix>.csv and <prefix>.json
    bool json_stdout = false;
};

int cmd_entropy(const EntropyArgs& args);
int cmd_oracle(const OracleArgs& args);
int cmd_train(const TrainArgs& args);
int cmd_grid(const GridArgs& args);
int cmd_correlate(const CorrelateArgs& args);
int cmd_selfcheck();

} // namespace rsharp::cli
