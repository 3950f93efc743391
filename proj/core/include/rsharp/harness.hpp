// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rsharp/correlation.hpp"
#include "rsharp/entropy.hpp"
#include "rsharp/network.hpp"
#include "rsharp/optim.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rsharp::harness {

// --- synthetic data ----------------------------------------------------------

enum class DataKind { gaussian_blobs, two_spirals, random_label_noise };
DataKind data_kind_from_string(const std::string& s);
std::string to_string(DataKind k);

struct DataSpec {
    DataKind kind = DataKind::gaussian_blobs;
    std::size_t n = 1000;  // total points before the 80/20 split
    std::size_t d = 2;
    std::size_t classes = 2;
    std::uint64_t seed = 0;
    double noise_fraction = 0.0; // random_label_noise: share of train labels flipped
};

struct DatasetPair {
    net::Dataset train;
    net::Dataset test;
};

/// Deterministic under seed; 80/20 split with classes balanced within one
/// point in each part. Label noise touches the training split only.
DatasetPair gen_dataset(const DataSpec& spec);

// --- training ----------------------------------------------------------------

struct TrainConfig {
    std::size_t epochs = 10;
    std::size_t batch_size = 64;
    std::uint64_t seed = 0;
    std::size_t eval_every = 1;
};

struct EpochMetrics {
    std::size_t epoch = 0;
    double lr = 0.0;
    optim::Phase phase = optim::Phase::warmup;
    double train_loss = 0.0, train_acc = 0.0;
    double test_loss = 0.0, test_acc = 0.0;
};

struct TrainResult {
    net::NetworkParams params;
    std::vector<EpochMetrics> metrics;
    bool diverged = false;
    std::size_t diverged_epoch = 0;
};

/// Deterministic under cfg.seed (init and batch order included). The warm-up
/// gate reads the test-split accuracy as its validation signal.
TrainResult train(const net::MlpSpec& spec, const DatasetPair& data,
                  const optim::OptimConfig& opt, const TrainConfig& cfg);

void write_metrics_csv(const std::vector<EpochMetrics>& metrics, const std::string& path);

// --- sharpness measurement ---------------------------------------------------

struct MeasureConfig {
    std::vector<double> alphas{0.5, 1.5}; // order presets
    std::size_t probes = 100;
    std::size_t lanczos_steps = 15;
    std::size_t lambda_max_steps = 30;
    std::size_t sample_size = 512; // training points used for all measures
    std::vector<double> sam_rhos{0.001, 0.01, 0.05, 0.1};
    entropy::EigPolicy policy = entropy::EigPolicy::clip_to_zero;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

struct MeasureValue {
    double value = 0.0;
    bool ok = false;
    std::string error;  // populated when !ok
    std::string note;   // e.g. the abs-policy fallback tag
};

struct RenyiMeasurement {
    std::string scope; // "global" or "layer<k>"
    double alpha = 0.0;
    MeasureValue v;
};

struct HyperParams {
    std::string optimizer = "sgd";
    double lr = 0.0;
    std::size_t batch_size = 0;
    double weight_decay = 0.0;
    std::uint64_t seed = 0;
};

struct SharpnessReport {
    std::string run_id;
    HyperParams hp;
    bool completed = false;
    std::string failure_reason;

    double train_loss = 0.0, test_loss = 0.0;
    double train_acc = 0.0, test_acc = 0.0;
    double generalization_gap = 0.0; // test_loss - train_loss
    double accuracy_gap = 0.0;       // train_acc - test_acc, for reference

    std::vector<RenyiMeasurement> renyi; // sharpness values (negated entropy)
    MeasureValue hessian_trace;
    MeasureValue lambda_max;
    MeasureValue weight_l2;
    std::vector<std::pair<double, MeasureValue>> sam_sharpness; // (rho, value)
};

/// All sharpness measures on a fixed subsample of the training set. Failures
/// are recorded per measure, never thrown. Indefinite spectra retry with the
/// abs policy and tag the entry.
SharpnessReport measure_sharpness(const net::MlpSpec& spec,
                                  const net::NetworkParams& params,
                                  const net::Dataset& train_data,
                                  const MeasureConfig& cfg);

// --- persistence -------------------------------------------------------------

std::string report_to_json_line(const SharpnessReport& r);
SharpnessReport report_from_json_line(const std::string& line);
void write_reports(const std::vector<SharpnessReport>& reports, const std::string& path);
std::vector<SharpnessReport> read_reports(const std::string& path);

// --- correlation -------------------------------------------------------------

enum class Target { gap, test_loss };
Target target_from_string(const std::string& s);

/// Kendall tau per (measure, scope, alpha) against the chosen target over
/// completed reports, plus one best-alpha row per scope for the Renyi
/// measure. Throws unless at least two completed reports exist.
CorrelationTable correlate(const std::vector<SharpnessReport>& reports, Target target,
                           const std::vector<double>& alpha_filter = {});

// --- grid --------------------------------------------------------------------

struct GridSpec {
    DataSpec data;
    net::MlpSpec model;
    std::vector<double> learning_rates;
    std::vector<std::size_t> batch_sizes;
    std::vector<double> weight_decays;
    std::vector<std::string> optimizers; // "sgd" | "sam" | "rsam"
    std::vector<std::uint64_t> seeds;
    std::size_t epochs = 10;
    std::size_t eval_every = 1;
    std::uint64_t seed = 0; // master seed for per-cell derivation
    double momentum = 0.9;
    double rho = 0.5;     // sam/rsam radius
    double alpha = 1.1;   // rsam order
    std::size_t warmup_epochs = 5;
    bool cosine_schedule = true;
    MeasureConfig measure;

    void validate() const;
    std::size_t cell_count() const;
};

GridSpec grid_spec_from_json_file(const std::string& path);

struct GridOutcome {
    std::vector<SharpnessReport> reports; // canonical order (run_id sorted)
    std::size_t executed = 0;
    std::size_t skipped = 0; // resumed cells
};

/// Runs every cell (resume skips run_ids already in the file), appends
/// records as they finish, then rewrites the file in canonical run_id order.
/// Cell seeds derive from (grid seed, cell index), so any worker count
/// produces byte-identical canonical files.
GridOutcome grid_run(const GridSpec& grid, const std::string& out_path,
                     std::size_t workers = 1, bool resume = false);

} // namespace rsharp::harness
