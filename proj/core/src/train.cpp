// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#include "rsharp/harness.hpp"

#include "rsharp/errors.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

namespace rsharp::harness {

using linalg::SeededRng;

TrainResult train(const net::MlpSpec& spec, const DatasetPair& data,
                  const optim::OptimConfig& opt, const TrainConfig& cfg) {
    spec.validate();
    opt.validate();
    if (cfg.batch_size == 0) throw ValidationError("train: batch_size must be >= 1");
    if (cfg.eval_every == 0) throw ValidationError("train: eval_every must be >= 1");
    if (data.train.size() == 0) throw ValidationError("train: empty training set");

    SeededRng init_rng(cfg.seed, 0);
    TrainResult result;
    result.params = net::NetworkParams::random_init(spec, init_rng);
    auto state = optim::OptimState::init(result.params);

    const std::size_t n = data.train.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    double last_val_acc = 0.0;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        state.epoch = epoch;
        state.phase = optim::warmup_gate(state, {epoch, last_val_acc}, opt);

        SeededRng order_rng(cfg.seed, 1 + epoch);
        for (std::size_t i = n; i > 1; --i) {
            const std::size_t j = order_rng.next_below(i);
            std::swap(idx[i - 1], idx[j]);
        }

        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t len = std::min(cfg.batch_size, n - start);
            const auto batch = data.train.subset(
                std::span<const std::size_t>(idx).subspan(start, len));
            const auto step = optimizer_step(spec, result.params, batch, opt, state);
            if (!std::isfinite(step.batch_loss)) {
                result.diverged = true;
                result.diverged_epoch = epoch;
                return result;
            }
        }

        if (epoch % cfg.eval_every == 0 || epoch + 1 == cfg.epochs) {
            EpochMetrics m;
            m.epoch = epoch;
            m.lr = optim::scheduled_lr(opt, epoch);
            m.phase = state.phase;
            m.train_loss = net::loss_only(spec, result.params, data.train);
            m.train_acc = net::accuracy(spec, result.params, data.train);
            m.test_loss = net::loss_only(spec, result.params, data.test);
            m.test_acc = net::accuracy(spec, result.params, data.test);
            if (!std::isfinite(m.train_loss) || !std::isfinite(m.test_loss)) {
                result.diverged = true;
                result.diverged_epoch = epoch;
                return result;
            }
            last_val_acc = m.test_acc;
            result.metrics.push_back(m);
        }
    }
    return result;
}

void write_metrics_csv(const std::vector<EpochMetrics>& metrics, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write metrics file: " + path);
    out.precision(17);
    out << "epoch,lr,phase,train_loss,train_acc,test_loss,test_acc\n";
    for (const auto& m : metrics) {
        out << m.epoch << ',' << m.lr << ','
            << (m.phase == optim::Phase::warmup ? "warmup" : "sharpness_aware") << ','
            << m.train_loss << ',' << m.train_acc << ',' << m.test_loss << ','
            << m.test_acc << '\n';
    }
}

} // namespace rsharp::harness
