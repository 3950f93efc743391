// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rsharp/network.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rsharp::optim {

enum class OptKind { sgd, sam, rsam };
OptKind opt_kind_from_string(const std::string& s);
std::string to_string(OptKind k);

enum class Phase { warmup, sharpness_aware };

struct WarmupPolicy {
    enum class Mode { fixed_epochs, metric_threshold };
    Mode mode = Mode::fixed_epochs;
    std::size_t epochs = 0;      // fixed_epochs: switch once epoch >= epochs
    double threshold = 0.0;      // metric_threshold: switch once val acc >= threshold
};

struct LrSchedule {
    enum class Kind { constant, cosine };
    Kind kind = Kind::constant;
    std::size_t total_epochs = 0;  // cosine horizon
    std::size_t warmup_epochs = 0; // linear ramp before the cosine decay
};

struct OptimConfig {
    OptKind kind = OptKind::sgd;
    double lr = 0.1;
    double momentum = 0.0;
    double weight_decay = 0.0;
    double rho = 0.0;     // perturbation radius (sam, rsam)
    double alpha = 1.1;   // Renyi order (rsam); desk-scale default
    WarmupPolicy warmup;
    LrSchedule schedule;
    /// Use the ascent-flipped perturbation sign (+rho*sign(1-alpha)*s*g).
    bool flip_perturbation_sign = false;

    void validate() const;
};

struct OptimState {
    std::vector<double> momentum_buffer;
    std::size_t epoch = 0;
    Phase phase = Phase::warmup;

    static OptimState init(const net::NetworkParams& params);
};

/// Effective learning rate at an epoch under cfg.schedule.
double scheduled_lr(const OptimConfig& cfg, std::size_t epoch);

/// buffer <- momentum*buffer + (grad + wd*params); params <- params - lr*buffer.
void sgd_step(net::NetworkParams& params, std::span<const double> grad,
              const OptimConfig& cfg, OptimState& state);

/// epsilon = rho * g / ||g||; zero gradient yields zero perturbation.
std::vector<double> sam_perturbation(std::span<const double> grad, double rho);

/// epsilon = -rho * sign(1-alpha) * s(g) * g with
/// s(g) = (sum_j |g_j|^{2 alpha}) / (sum_j g_j^2)^{alpha+1}, evaluated in log
/// space. For alpha > 1 this ascends the loss. flip_sign selects the opposite
/// convention.
std::vector<double> rsam_perturbation(std::span<const double> grad, double rho,
                                      double alpha, bool flip_sign = false);

/// -sign(1-alpha) * (sum |g_j|^{2 alpha}) / (sum g_j^2)^alpha: the
/// gradient-magnitude surrogate of the (negative) spectral entropy penalty.
double renyi_regularizer_value(std::span<const double> grad, double alpha);

struct StepResult {
    double batch_loss = 0.0; // loss at the unperturbed parameters
};

/// One mini-batch update honoring cfg.kind and state.phase (warmup phase runs
/// plain SGD for every kind). sam/rsam spend one extra gradient evaluation at
/// params + epsilon; momentum and weight decay are applied exactly as in
/// sgd_step, with decay on the unperturbed parameters.
StepResult optimizer_step(const net::MlpSpec& spec, net::NetworkParams& params,
                          const net::Dataset& batch, const OptimConfig& cfg,
                          OptimState& state);

/// Explicit single steps, mostly for tests and the first-order checks.
StepResult sam_step(const net::MlpSpec& spec, net::NetworkParams& params,
                    const net::Dataset& batch, const OptimConfig& cfg, OptimState& state);
StepResult rsam_step(const net::MlpSpec& spec, net::NetworkParams& params,
                     const net::Dataset& batch, const OptimConfig& cfg, OptimState& state);

struct GateMetrics {
    std::size_t epoch = 0;
    double val_accuracy = 0.0;
};

/// Monotone phase gate: once sharpness_aware, always sharpness_aware.
Phase warmup_gate(const OptimState& state, const GateMetrics& metrics,
                  const OptimConfig& cfg);

} // namespace rsharp::optim
