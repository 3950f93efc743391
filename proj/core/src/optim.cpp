// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#include "rsharp/optim.hpp"

#include "rsharp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rsharp::optim {

OptKind opt_kind_from_string(const std::string& s) {
    if (s == "sgd") return OptKind::sgd;
    if (s == "sam") return OptKind::sam;
    if (s == "rsam") return OptKind::rsam;
    throw ValidationError("unknown optimizer kind: " + s);
}

std::string to_string(OptKind k) {
    switch (k) {
        case OptKind::sgd: return "sgd";
        case OptKind::sam: return "sam";
        case OptKind::rsam: return "rsam";
    }
    return "?";
}

void OptimConfig::validate() const {
    if (!(lr > 0.0) && lr != 0.0) throw ValidationError("optim: lr must be >= 0");
    if (lr < 0.0) throw ValidationError("optim: lr must be >= 0");
    if (momentum < 0.0 || momentum >= 1.0)
        throw ValidationError("optim: momentum must lie in [0, 1)");
    if (weight_decay < 0.0) throw ValidationError("optim: weight_decay must be >= 0");
    if (kind == OptKind::sam && !(rho > 0.0))
        throw ValidationError("optim: sam requires rho > 0");
    if (kind == OptKind::rsam) {
        if (!(rho > 0.0)) throw ValidationError("optim: rsam requires rho > 0");
        if (!(alpha > 0.0) || std::abs(alpha - 1.0) < 1e-3)
            throw ValidationError("optim: rsam requires a Renyi order away from 1");
    }
    if (schedule.kind == LrSchedule::Kind::cosine && schedule.total_epochs == 0)
        throw ValidationError("optim: cosine schedule needs total_epochs");
}

OptimState OptimState::init(const net::NetworkParams& params) {
    OptimState s;
    s.momentum_buffer.assign(params.flat.size(), 0.0);
    return s;
}

double scheduled_lr(const OptimConfig& cfg, std::size_t epoch) {
    if (cfg.schedule.kind == LrSchedule::Kind::constant) return cfg.lr;
    const std::size_t w = cfg.schedule.warmup_epochs;
    const std::size_t total = cfg.schedule.total_epochs;
    if (w > 0 && epoch < w)
        return cfg.lr * static_cast<double>(epoch + 1) / static_cast<double>(w);
    const std::size_t span = total > w ? total - w : 1;
    const double t = static_cast<double>(std::min(epoch - w, span)) /
                     static_cast<double>(span);
    return 0.5 * cfg.lr * (1.0 + std::cos(3.141592653589793 * t));
}

void sgd_step(net::NetworkParams& params, std::span<const double> grad,
              const OptimConfig& cfg, OptimState& state) {
    if (grad.size() != params.flat.size() ||
        state.momentum_buffer.size() != params.flat.size())
        throw ValidationError("sgd_step: shape mismatch");
    const double lr = scheduled_lr(cfg, state.epoch);
    for (std::size_t i = 0; i < grad.size(); ++i) {
        const double g = grad[i] + cfg.weight_decay * params.flat[i];
        state.momentum_buffer[i] = cfg.momentum * state.momentum_buffer[i] + g;
        params.flat[i] -= lr * state.momentum_buffer[i];
    }
}

std::vector<double> sam_perturbation(std::span<const double> grad, double rho) {
    std::vector<double> eps(grad.size(), 0.0);
    const double norm = linalg::norm2(grad);
    if (norm == 0.0 || rho == 0.0) return eps;
    const double s = rho / norm;
    for (std::size_t i = 0; i < grad.size(); ++i) eps[i] = s * grad[i];
    return eps;
}

namespace {

double log_sum_pow(std::span<const double> grad, double exponent) {
    // log sum_j |g_j|^exponent via log-sum-exp; zero entries dropped.
    double max_log = -std::numeric_limits<double>::infinity();
    for (double g : grad)
        if (g != 0.0) max_log = std::max(max_log, exponent * std::log(std::abs(g)));
    if (!std::isfinite(max_log)) return -std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (double g : grad)
        if (g != 0.0) acc += std::exp(exponent * std::log(std::abs(g)) - max_log);
    return max_log + std::log(acc);
}

} // namespace

std::vector<double> rsam_perturbation(std::span<const double> grad, double rho,
                                      double alpha, bool flip_sign) {
    if (std::abs(alpha - 1.0) < 1e-3)
        throw ValidationError("rsam_perturbation: alpha must stay away from 1");
    std::vector<double> eps(grad.size(), 0.0);
    if (rho == 0.0) return eps;
    const double norm = linalg::norm2(grad);
    if (norm == 0.0) return eps;

    // s(g) = sum |g|^{2a} / (sum g^2)^{a+1}, in log space against overflow
    // at large alpha or extreme gradient scales.
    const double log_num = log_sum_pow(grad, 2.0 * alpha);
    const double log_den = (alpha + 1.0) * log_sum_pow(grad, 2.0);
    const double s = std::exp(log_num - log_den);
    double coeff = -rho * (alpha < 1.0 ? 1.0 : -1.0) * s;
    if (flip_sign) coeff = -coeff;
    for (std::size_t i = 0; i < grad.size(); ++i) eps[i] = coeff * grad[i];
    return eps;
}

double renyi_regularizer_value(std::span<const double> grad, double alpha) {
    if (std::abs(alpha - 1.0) < 1e-3)
        throw ValidationError("renyi_regularizer_value: alpha must stay away from 1");
    if (linalg::norm2(grad) == 0.0)
        throw ValidationError("renyi_regularizer_value: zero gradient");
    const double log_num = log_sum_pow(grad, 2.0 * alpha);
    const double log_den = alpha * log_sum_pow(grad, 2.0);
    const double sign = alpha < 1.0 ? 1.0 : -1.0;
    return -sign * std::exp(log_num - log_den);
}

namespace {

StepResult perturbed_step(const net::MlpSpec& spec, net::NetworkParams& params,
                          const net::Dataset& batch, const OptimConfig& cfg,
                          OptimState& state, bool renyi) {
    const auto lg = net::loss_and_grad(spec, params, batch);
    std::vector<double> eps =
        renyi ? rsam_perturbation(lg.grad, cfg.rho, cfg.alpha, cfg.flip_perturbation_sign)
              : sam_perturbation(lg.grad, cfg.rho);
    if (linalg::norm2(eps) == 0.0) {
        sgd_step(params, lg.grad, cfg, state);
        return StepResult{lg.loss};
    }
    net::NetworkParams moved = params;
    for (std::size_t i = 0; i < eps.size(); ++i) moved.flat[i] += eps[i];
    const auto lg2 = net::loss_and_grad(spec, moved, batch);
    sgd_step(params, lg2.grad, cfg, state); // decay still on the unperturbed params
    return StepResult{lg.loss};
}

} // namespace

StepResult sam_step(const net::MlpSpec& spec, net::NetworkParams& params,
                    const net::Dataset& batch, const OptimConfig& cfg, OptimState& state) {
    return perturbed_step(spec, params, batch, cfg, state, false);
}

StepResult rsam_step(const net::MlpSpec& spec, net::NetworkParams& params,
                     const net::Dataset& batch, const OptimConfig& cfg, OptimState& state) {
    return perturbed_step(spec, params, batch, cfg, state, true);
}

StepResult optimizer_step(const net::MlpSpec& spec, net::NetworkParams& params,
                          const net::Dataset& batch, const OptimConfig& cfg,
                          OptimState& state) {
    if (cfg.kind == OptKind::sgd || state.phase == Phase::warmup) {
        const auto lg = net::loss_and_grad(spec, params, batch);
        sgd_step(params, lg.grad, cfg, state);
        return StepResult{lg.loss};
    }
    return cfg.kind == OptKind::sam ? sam_step(spec, params, batch, cfg, state)
                                    : rsam_step(spec, params, batch, cfg, state);
}

Phase warmup_gate(const OptimState& state, const GateMetrics& metrics,
                  const OptimConfig& cfg) {
    if (state.phase == Phase::sharpness_aware) return Phase::sharpness_aware;
    if (cfg.kind == OptKind::sgd) return Phase::warmup;
    switch (cfg.warmup.mode) {
        case WarmupPolicy::Mode::fixed_epochs:
            return metrics.epoch >= cfg.warmup.epochs ? Phase::sharpness_aware
                                                      : Phase::warmup;
        case WarmupPolicy::Mode::metric_threshold:
            return metrics.val_accuracy >= cfg.warmup.threshold ? Phase::sharpness_aware
                                                                : Phase::warmup;
    }
    return Phase::warmup;
}

} // namespace rsharp::optim
