// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "rsharp/matrix.hpp"
#include "rsharp/rng.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rsharp::net {

enum class Activation { relu, leaky_relu, gelu };
enum class Loss { mse, softmax_cross_entropy };

Activation activation_from_string(const std::string& s);
Loss loss_from_string(const std::string& s);
std::string to_string(Activation a);
std::string to_string(Loss l);

/// Feedforward MLP: x -> W_L act(W_{L-1} ... act(W_1 x)). The last layer is
/// linear. relu and leaky_relu are positively homogeneous; gelu only
/// approximately so.
struct MlpSpec {
    std::vector<std::pair<std::size_t, std::size_t>> layer_shapes; // (out, in)
    Activation activation = Activation::relu;
    double leaky_slope = 0.01;
    Loss loss = Loss::mse;
    bool bias = false;

    void validate() const;
    std::size_t num_layers() const { return layer_shapes.size(); }
    std::size_t input_dim() const { return layer_shapes.front().second; }
    std::size_t output_dim() const { return layer_shapes.back().first; }
    std::size_t layer_param_count(std::size_t l) const;
    std::size_t param_count() const;
};

/// Flat parameter vector with per-layer index ranges. Within a layer the
/// weight matrix comes first (row-major), then the bias when enabled.
struct NetworkParams {
    std::vector<double> flat;
    std::vector<std::pair<std::size_t, std::size_t>> layer_ranges; // [begin, end)

    static NetworkParams zeros(const MlpSpec& spec);
    /// He-style init: weight scale sqrt(2 / fan_in), biases zero.
    static NetworkParams random_init(const MlpSpec& spec, linalg::SeededRng& rng);

    std::span<double> layer(std::size_t l);
    std::span<const double> layer(std::size_t l) const;
    double l2_norm() const;
};

struct Dataset {
    linalg::Matrix inputs;  // n x d
    linalg::Matrix targets; // n x c (one-hot for classification)

    void validate() const;
    std::size_t size() const { return inputs.rows(); }
    Dataset subset(std::span<const std::size_t> rows) const;
};

/// Features then label per CSV row. classes > 0 one-hot encodes an integer
/// label column; classes == 0 keeps the last column as a real target.
Dataset load_dataset_csv(const std::string& path, std::size_t classes);

std::vector<double> forward(const MlpSpec& spec, const NetworkParams& params,
                            std::span<const double> x);

struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad; // aligned with NetworkParams::flat
};

LossGrad loss_and_grad(const MlpSpec& spec, const NetworkParams& params,
                       const Dataset& batch);
double loss_only(const MlpSpec& spec, const NetworkParams& params, const Dataset& batch);
/// argmax(prediction) == argmax(target) rate.
double accuracy(const MlpSpec& spec, const NetworkParams& params, const Dataset& data);

/// H*v by central differences of the gradient, step
/// cbrt(eps) * (1 + ||params|| / ||v||). Zero v short-circuits to zero.
std::vector<double> hvp(const MlpSpec& spec, const NetworkParams& params,
                        const Dataset& batch, std::span<const double> v);

/// For relu-family nets: if any pre-activation over the batch is exactly
/// zero, nudge the inputs so Hessians are taken in general position.
/// Returns whether a nudge happened.
bool ensure_general_position(const MlpSpec& spec, const NetworkParams& params,
                             Dataset& batch);

/// Hessian action restricted to one layer's parameter block. The returned
/// operator owns snapshots of params and batch.
linalg::SymmetricOperator layer_operator(const MlpSpec& spec, const NetworkParams& params,
                                         const Dataset& batch, std::size_t layer);
/// Hessian action on the full flat parameter vector.
linalg::SymmetricOperator full_operator(const MlpSpec& spec, const NetworkParams& params,
                                        const Dataset& batch);

/// Dense layer Hessian, column by column through hvp, then symmetrized.
/// Refuses layers above `cap` parameters.
linalg::DenseSymmetricMatrix explicit_layer_hessian(const MlpSpec& spec,
                                                    const NetworkParams& params,
                                                    const Dataset& batch, std::size_t layer,
                                                    std::size_t cap = 4096);

/// W_l -> c_l * W_l. Factors must be positive with product 1 (within 1e-12).
NetworkParams rescale_layers(const NetworkParams& params, std::span<const double> factors);

/// Evaluates g(W(h + rho*A*h)) against g((W + rho*W*A)h) on a 2-layer spec
/// whose first layer holds W, and returns the max absolute deviation. Pure
/// algebra: the two sides agree to rounding.
double multiplicative_perturb_identity_check(const MlpSpec& spec,
                                             const NetworkParams& params,
                                             std::span<const double> h,
                                             const linalg::Matrix& a, double rho);

// --- serialization -----------------------------------------------------------
// JSON document with shapes, activation, loss, bias flag and the flat weight
// vector as base64 of little-endian f64.

std::string model_to_json(const MlpSpec& spec, const NetworkParams& params);
std::pair<MlpSpec, NetworkParams> model_from_json(const std::string& text);

} // namespace rsharp::net
