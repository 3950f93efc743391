// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#include "rsharp/network.hpp"

#include "rsharp/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace rsharp::net {

using nlohmann::json;

Activation activation_from_string(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "leaky_relu") return Activation::leaky_relu;
    if (s == "gelu") return Activation::gelu;
    throw ValidationError("unknown activation: " + s);
}

Loss loss_from_string(const std::string& s) {
    if (s == "mse") return Loss::mse;
    if (s == "softmax_cross_entropy") return Loss::softmax_cross_entropy;
    throw ValidationError("unknown loss: " + s);
}

std::string to_string(Activation a) {
    switch (a) {
        case Activation::relu: return "relu";
        case Activation::leaky_relu: return "leaky_relu";
        case Activation::gelu: return "gelu";
    }
    return "?";
}

std::string to_string(Loss l) {
    return l == Loss::mse ? "mse" : "softmax_cross_entropy";
}

void MlpSpec::validate() const {
    if (layer_shapes.empty()) throw ValidationError("MlpSpec: no layers");
    for (std::size_t l = 0; l < layer_shapes.size(); ++l) {
        if (layer_shapes[l].first == 0 || layer_shapes[l].second == 0)
            throw ValidationError("MlpSpec: zero layer dimension");
        if (l > 0 && layer_shapes[l].second != layer_shapes[l - 1].first)
            throw ValidationError("MlpSpec: adjacent layer shapes do not compose");
    }
    if (activation == Activation::leaky_relu && !(leaky_slope > 0.0))
        throw ValidationError("MlpSpec: leaky_relu needs a positive slope");
}

std::size_t MlpSpec::layer_param_count(std::size_t l) const {
    const auto [out, in] = layer_shapes.at(l);
    return out * in + (bias ? out : 0);
}

std::size_t MlpSpec::param_count() const {
    std::size_t total = 0;
    for (std::size_t l = 0; l < layer_shapes.size(); ++l) total += layer_param_count(l);
    return total;
}

NetworkParams NetworkParams::zeros(const MlpSpec& spec) {
    spec.validate();
    NetworkParams p;
    p.flat.assign(spec.param_count(), 0.0);
    std::size_t off = 0;
    for (std::size_t l = 0; l < spec.num_layers(); ++l) {
        const std::size_t count = spec.layer_param_count(l);
        p.layer_ranges.emplace_back(off, off + count);
        off += count;
    }
    return p;
}

NetworkParams NetworkParams::random_init(const MlpSpec& spec, linalg::SeededRng& rng) {
    NetworkParams p = zeros(spec);
    for (std::size_t l = 0; l < spec.num_layers(); ++l) {
        const auto [out, in] = spec.layer_shapes[l];
        const double s = std::sqrt(2.0 / static_cast<double>(in));
        auto block = p.layer(l);
        for (std::size_t k = 0; k < out * in; ++k) block[k] = s * rng.normal();
        // biases stay zero
    }
    return p;
}

std::span<double> NetworkParams::layer(std::size_t l) {
    const auto [b, e] = layer_ranges.at(l);
    return std::span<double>(flat).subspan(b, e - b);
}

std::span<const double> NetworkParams::layer(std::size_t l) const {
    const auto [b, e] = layer_ranges.at(l);
    return std::span<const double>(flat).subspan(b, e - b);
}

double NetworkParams::l2_norm() const { return linalg::norm2(flat); }

void Dataset::validate() const {
    if (inputs.rows() != targets.rows())
        throw ValidationError("Dataset: input/target row counts differ");
    for (double v : inputs.data())
        if (!std::isfinite(v)) throw ValidationError("Dataset: non-finite input");
    for (double v : targets.data())
        if (!std::isfinite(v)) throw ValidationError("Dataset: non-finite target");
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    Dataset out;
    out.inputs = linalg::Matrix(rows.size(), inputs.cols());
    out.targets = linalg::Matrix(rows.size(), targets.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t j = 0; j < inputs.cols(); ++j) out.inputs(r, j) = inputs(rows[r], j);
        for (std::size_t j = 0; j < targets.cols(); ++j)
            out.targets(r, j) = targets(rows[r], j);
    }
    return out;
}

Dataset load_dataset_csv(const std::string& path, std::size_t classes) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open dataset file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::string buf = line;
        for (char& c : buf)
            if (c == ',' || c == ';' || c == '\t') c = ' ';
        std::istringstream iss(buf);
        std::vector<double> vals;
        double v;
        while (iss >> v) vals.push_back(v);
        if (!vals.empty()) rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw ValidationError("empty dataset file: " + path);
    const std::size_t width = rows[0].size();
    if (width < 2) throw ValidationError("dataset rows need features and a label");

    Dataset d;
    d.inputs = linalg::Matrix(rows.size(), width - 1);
    d.targets = linalg::Matrix(rows.size(), classes > 0 ? classes : 1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != width) throw ValidationError("ragged dataset file: " + path);
        for (std::size_t j = 0; j + 1 < width; ++j) d.inputs(i, j) = rows[i][j];
        const double label = rows[i][width - 1];
        if (classes > 0) {
            const auto c = static_cast<long long>(label);
            if (c < 0 || static_cast<std::size_t>(c) >= classes)
                throw ValidationError("label out of range in dataset file: " + path);
            d.targets(i, static_cast<std::size_t>(c)) = 1.0;
        } else {
            d.targets(i, 0) = label;
        }
    }
    d.validate();
    return d;
}

namespace {

double act_value(const MlpSpec& spec, double z) {
    switch (spec.activation) {
        case Activation::relu: return z > 0.0 ? z : 0.0;
        case Activation::leaky_relu: return z > 0.0 ? z : spec.leaky_slope * z;
        case Activation::gelu: {
            const double phi = 0.5 * (1.0 + std::erf(z / std::sqrt(2.0)));
            return z * phi;
        }
    }
    return 0.0;
}

double act_deriv(const MlpSpec& spec, double z) {
    switch (spec.activation) {
        case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::leaky_relu: return z > 0.0 ? 1.0 : spec.leaky_slope;
        case Activation::gelu: {
            const double phi = 0.5 * (1.0 + std::erf(z / std::sqrt(2.0)));
            const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.141592653589793);
            return phi + z * pdf;
        }
    }
    return 0.0;
}

// Applies one layer: z = W x (+ b).
void apply_layer(const MlpSpec& spec, std::span<const double> block, std::size_t l,
                 std::span<const double> x, std::vector<double>& z) {
    const auto [out, in] = spec.layer_shapes[l];
    z.assign(out, 0.0);
    for (std::size_t r = 0; r < out; ++r) {
        const double* w = block.data() + r * in;
        double acc = 0.0;
        for (std::size_t c = 0; c < in; ++c) acc += w[c] * x[c];
        if (spec.bias) acc += block[out * in + r];
        z[r] = acc;
    }
}

struct ForwardTrace {
    // acts[0] is the input; acts[l] the activation output of layer l (the
    // last entry is the raw network output).
    std::vector<std::vector<double>> acts;
    std::vector<std::vector<double>> preacts; // one per layer
};

ForwardTrace forward_trace(const MlpSpec& spec, const NetworkParams& params,
                           std::span<const double> x) {
    if (x.size() != spec.input_dim()) throw ValidationError("forward: input shape mismatch");
    ForwardTrace t;
    t.acts.emplace_back(x.begin(), x.end());
    std::vector<double> z;
    for (std::size_t l = 0; l < spec.num_layers(); ++l) {
        apply_layer(spec, params.layer(l), l, t.acts.back(), z);
        t.preacts.push_back(z);
        if (l + 1 < spec.num_layers()) {
            std::vector<double> a(z.size());
            for (std::size_t i = 0; i < z.size(); ++i) a[i] = act_value(spec, z[i]);
            t.acts.push_back(std::move(a));
        } else {
            t.acts.push_back(z);
        }
    }
    return t;
}

// Per-sample loss and dL/d(output). MSE sums over output coordinates;
// both losses are averaged over the batch by the caller.
double output_loss(const MlpSpec& spec, std::span<const double> y_hat,
                   std::span<const double> y, std::vector<double>& dloss) {
    const std::size_t c = y_hat.size();
    dloss.assign(c, 0.0);
    if (spec.loss == Loss::mse) {
        double loss = 0.0;
        for (std::size_t i = 0; i < c; ++i) {
            const double r = y_hat[i] - y[i];
            loss += r * r;
            dloss[i] = 2.0 * r;
        }
        return loss;
    }
    // softmax cross entropy with one-hot (or general probability) targets
    double zmax = -std::numeric_limits<double>::infinity();
    for (double v : y_hat) zmax = std::max(zmax, v);
    double denom = 0.0;
    for (double v : y_hat) denom += std::exp(v - zmax);
    const double log_denom = std::log(denom) + zmax;
    double loss = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
        const double logp = y_hat[i] - log_denom;
        loss -= y[i] * logp;
        dloss[i] = std::exp(logp);
    }
    for (std::size_t i = 0; i < c; ++i) dloss[i] -= y[i];
    return loss;
}

} // namespace

std::vector<double> forward(const MlpSpec& spec, const NetworkParams& params,
                            std::span<const double> x) {
    return forward_trace(spec, params, x).acts.back();
}

LossGrad loss_and_grad(const MlpSpec& spec, const NetworkParams& params,
                       const Dataset& batch) {
    spec.validate();
    if (batch.size() == 0) throw ValidationError("loss_and_grad: empty batch");
    if (batch.inputs.cols() != spec.input_dim() ||
        batch.targets.cols() != spec.output_dim())
        throw ValidationError("loss_and_grad: batch shape mismatch");

    const std::size_t n = batch.size();
    const std::size_t layers = spec.num_layers();
    LossGrad out;
    out.grad.assign(params.flat.size(), 0.0);

    std::vector<double> x(spec.input_dim()), y(spec.output_dim());
    std::vector<double> delta, delta_prev, dloss;
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t j = 0; j < x.size(); ++j) x[j] = batch.inputs(s, j);
        for (std::size_t j = 0; j < y.size(); ++j) y[j] = batch.targets(s, j);
        const ForwardTrace t = forward_trace(spec, params, x);
        out.loss += output_loss(spec, t.acts.back(), y, dloss);

        delta = dloss;
        for (std::size_t l = layers; l-- > 0;) {
            const auto [rows, cols] = spec.layer_shapes[l];
            const auto& input = t.acts[l];
            const auto [b, e] = params.layer_ranges[l];
            (void)e;
            for (std::size_t r = 0; r < rows; ++r) {
                double* grow = out.grad.data() + b + r * cols;
                const double d = delta[r];
                for (std::size_t c = 0; c < cols; ++c) grow[c] += d * input[c];
                if (spec.bias) out.grad[b + rows * cols + r] += d;
            }
            if (l == 0) break;
            delta_prev.assign(cols, 0.0);
            const auto block = params.layer(l);
            for (std::size_t r = 0; r < rows; ++r) {
                const double* w = block.data() + r * cols;
                const double d = delta[r];
                for (std::size_t c = 0; c < cols; ++c) delta_prev[c] += w[c] * d;
            }
            const auto& z = t.preacts[l - 1];
            for (std::size_t c = 0; c < cols; ++c) delta_prev[c] *= act_deriv(spec, z[c]);
            delta.swap(delta_prev);
        }
    }
    const double inv = 1.0 / static_cast<double>(n);
    out.loss *= inv;
    for (double& g : out.grad) g *= inv;
    return out;
}

double loss_only(const MlpSpec& spec, const NetworkParams& params, const Dataset& batch) {
    if (batch.size() == 0) throw ValidationError("loss_only: empty batch");
    std::vector<double> x(spec.input_dim()), y(spec.output_dim()), dloss;
    double loss = 0.0;
    for (std::size_t s = 0; s < batch.size(); ++s) {
        for (std::size_t j = 0; j < x.size(); ++j) x[j] = batch.inputs(s, j);
        for (std::size_t j = 0; j < y.size(); ++j) y[j] = batch.targets(s, j);
        const auto out = forward(spec, params, x);
        loss += output_loss(spec, out, y, dloss);
    }
    return loss / static_cast<double>(batch.size());
}

double accuracy(const MlpSpec& spec, const NetworkParams& params, const Dataset& data) {
    if (data.size() == 0) return 0.0;
    std::vector<double> x(spec.input_dim());
    std::size_t hits = 0;
    for (std::size_t s = 0; s < data.size(); ++s) {
        for (std::size_t j = 0; j < x.size(); ++j) x[j] = data.inputs(s, j);
        const auto out = forward(spec, params, x);
        std::size_t pred = 0, truth = 0;
        for (std::size_t j = 1; j < out.size(); ++j)
            if (out[j] > out[pred]) pred = j;
        for (std::size_t j = 1; j < data.targets.cols(); ++j)
            if (data.targets(s, j) > data.targets(s, truth)) truth = j;
        if (pred == truth) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(data.size());
}

std::vector<double> hvp(const MlpSpec& spec, const NetworkParams& params,
                        const Dataset& batch, std::span<const double> v) {
    if (v.size() != params.flat.size()) throw ValidationError("hvp: direction shape mismatch");
    const double vnorm = linalg::norm2(v);
    if (vnorm == 0.0) return std::vector<double>(v.size(), 0.0);

    const double eps = std::numeric_limits<double>::epsilon();
    const double h = std::cbrt(eps) * (1.0 + linalg::norm2(params.flat) / vnorm);

    NetworkParams plus = params, minus = params;
    for (std::size_t i = 0; i < v.size(); ++i) {
        plus.flat[i] += h * v[i];
        minus.flat[i] -= h * v[i];
    }
    const auto gp = loss_and_grad(spec, plus, batch);
    const auto gm = loss_and_grad(spec, minus, batch);
    std::vector<double> out(v.size());
    const double inv = 1.0 / (2.0 * h);
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (gp.grad[i] - gm.grad[i]) * inv;
    return out;
}

bool ensure_general_position(const MlpSpec& spec, const NetworkParams& params,
                             Dataset& batch) {
    if (spec.activation == Activation::gelu) return false;
    bool exact_zero = false;
    std::vector<double> x(spec.input_dim());
    for (std::size_t s = 0; s < batch.size() && !exact_zero; ++s) {
        for (std::size_t j = 0; j < x.size(); ++j) x[j] = batch.inputs(s, j);
        const auto t = forward_trace(spec, params, x);
        for (std::size_t l = 0; l + 1 < spec.num_layers() && !exact_zero; ++l)
            for (double z : t.preacts[l])
                if (z == 0.0) {
                    exact_zero = true;
                    break;
                }
    }
    if (!exact_zero) return false;
    for (std::size_t i = 0; i < batch.inputs.data().size(); ++i)
        batch.inputs.data()[i] += 1e-9;
    return true;
}

linalg::SymmetricOperator full_operator(const MlpSpec& spec, const NetworkParams& params,
                                        const Dataset& batch) {
    auto spec_copy = spec;
    auto params_copy = params;
    auto batch_copy = batch;
    ensure_general_position(spec_copy, params_copy, batch_copy);
    return linalg::SymmetricOperator{
        params.flat.size(),
        [spec_copy, params_copy, batch_copy](std::span<const double> in,
                                             std::span<double> out) {
            const auto r = hvp(spec_copy, params_copy, batch_copy, in);
            std::copy(r.begin(), r.end(), out.begin());
        }};
}

linalg::SymmetricOperator layer_operator(const MlpSpec& spec, const NetworkParams& params,
                                         const Dataset& batch, std::size_t layer) {
    if (layer >= spec.num_layers()) throw ValidationError("layer_operator: bad layer index");
    auto spec_copy = spec;
    auto params_copy = params;
    auto batch_copy = batch;
    ensure_general_position(spec_copy, params_copy, batch_copy);
    const auto [begin, end] = params.layer_ranges[layer];
    const std::size_t dim = end - begin, total = params.flat.size();
    return linalg::SymmetricOperator{
        dim, [spec_copy, params_copy, batch_copy, begin, dim, total](
                 std::span<const double> in, std::span<double> out) {
            std::vector<double> embedded(total, 0.0);
            std::copy(in.begin(), in.end(), embedded.begin() + static_cast<long>(begin));
            const auto r = hvp(spec_copy, params_copy, batch_copy, embedded);
            for (std::size_t i = 0; i < dim; ++i) out[i] = r[begin + i];
        }};
}

linalg::DenseSymmetricMatrix explicit_layer_hessian(const MlpSpec& spec,
                                                    const NetworkParams& params,
                                                    const Dataset& batch, std::size_t layer,
                                                    std::size_t cap) {
    if (layer >= spec.num_layers())
        throw ValidationError("explicit_layer_hessian: bad layer index");
    const auto [begin, end] = params.layer_ranges[layer];
    const std::size_t dim = end - begin;
    if (dim > cap) throw ValidationError("explicit_layer_hessian: layer exceeds size cap");

    auto op = layer_operator(spec, params, batch, layer);
    linalg::Matrix cols(dim, dim);
    std::vector<double> e(dim, 0.0), col(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        e[j] = 1.0;
        op.apply(e, col);
        for (std::size_t i = 0; i < dim; ++i) cols(i, j) = col[i];
        e[j] = 0.0;
    }
    linalg::DenseSymmetricMatrix h(dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j <= i; ++j) h(i, j) = 0.5 * (cols(i, j) + cols(j, i));
    h.symmetrize_from_lower();
    return h;
}

NetworkParams rescale_layers(const NetworkParams& params, std::span<const double> factors) {
    if (factors.size() != params.layer_ranges.size())
        throw ValidationError("rescale_layers: one factor per layer required");
    double prod = 1.0;
    for (double c : factors) {
        if (!(c > 0.0)) throw ValidationError("rescale_layers: factors must be positive");
        prod *= c;
    }
    if (std::abs(prod - 1.0) > 1e-12)
        throw ValidationError("rescale_layers: factor product must be 1 within 1e-12");
    NetworkParams out = params;
    for (std::size_t l = 0; l < factors.size(); ++l) {
        auto block = out.layer(l);
        for (double& w : block) w *= factors[l];
    }
    return out;
}

double multiplicative_perturb_identity_check(const MlpSpec& spec,
                                             const NetworkParams& params,
                                             std::span<const double> h,
                                             const linalg::Matrix& a, double rho) {
    spec.validate();
    if (spec.num_layers() != 2)
        throw ValidationError("multiplicative_perturb_identity_check: needs a 2-layer spec");
    if (spec.bias)
        throw ValidationError("multiplicative_perturb_identity_check: bias-free only");
    const std::size_t d = spec.input_dim();
    if (h.size() != d || a.rows() != d || a.cols() != d)
        throw ValidationError("multiplicative_perturb_identity_check: shape mismatch");

    // left side: perturb the input, h + rho*A*h
    const auto ah = a.matvec(h);
    std::vector<double> h_pert(h.begin(), h.end());
    for (std::size_t i = 0; i < d; ++i) h_pert[i] += rho * ah[i];
    const auto lhs = forward(spec, params, h_pert);

    // right side: perturb the first-layer weights, W + rho*W*A
    NetworkParams moved = params;
    const auto [out_dim, in_dim] = spec.layer_shapes[0];
    auto w = moved.layer(0);
    const auto w0 = params.layer(0);
    for (std::size_t r = 0; r < out_dim; ++r) {
        for (std::size_t c = 0; c < in_dim; ++c) {
            double acc = 0.0;
            for (std::size_t k = 0; k < in_dim; ++k) acc += w0[r * in_dim + k] * a(k, c);
            w[r * in_dim + c] = w0[r * in_dim + c] + rho * acc;
        }
    }
    const auto rhs = forward(spec, moved, h);

    double dev = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i)
        dev = std::max(dev, std::abs(lhs[i] - rhs[i]));
    return dev;
}

namespace {

const char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const unsigned char* data, std::size_t len) {
    std::string out;
    out.reserve((len + 2) / 3 * 4);
    for (std::size_t i = 0; i < len; i += 3) {
        unsigned int v = data[i] << 16;
        if (i + 1 < len) v |= data[i + 1] << 8;
        if (i + 2 < len) v |= data[i + 2];
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
        out.push_back(i + 1 < len ? kB64Alphabet[(v >> 6) & 63] : '=');
        out.push_back(i + 2 < len ? kB64Alphabet[v & 63] : '=');
    }
    return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
    auto val = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    std::vector<unsigned char> out;
    int buf = 0, bits = 0;
    for (char c : text) {
        if (c == '=' || c == '\n' || c == '\r') continue;
        const int v = val(c);
        if (v < 0) throw ValidationError("invalid base64 payload");
        buf = (buf << 6) | v;
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<unsigned char>((buf >> bits) & 0xFF));
        }
    }
    return out;
}

} // namespace

std::string model_to_json(const MlpSpec& spec, const NetworkParams& params) {
    json j;
    j["layer_shapes"] = json::array();
    for (auto [out, in] : spec.layer_shapes) j["layer_shapes"].push_back({out, in});
    j["activation"] = to_string(spec.activation);
    if (spec.activation == Activation::leaky_relu) j["leaky_slope"] = spec.leaky_slope;
    j["loss"] = to_string(spec.loss);
    j["bias"] = spec.bias;
    // f64 little endian; this code assumes a little-endian host.
    j["weights_b64"] = base64_encode(
        reinterpret_cast<const unsigned char*>(params.flat.data()),
        params.flat.size() * sizeof(double));
    return j.dump(2);
}

std::pair<MlpSpec, NetworkParams> model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad model JSON: ") + e.what());
    }
    MlpSpec spec;
    for (const auto& pair : j.at("layer_shapes"))
        spec.layer_shapes.emplace_back(pair.at(0).get<std::size_t>(),
                                       pair.at(1).get<std::size_t>());
    spec.activation = activation_from_string(j.at("activation").get<std::string>());
    if (j.contains("leaky_slope")) spec.leaky_slope = j["leaky_slope"].get<double>();
    spec.loss = loss_from_string(j.at("loss").get<std::string>());
    spec.bias = j.value("bias", false);
    spec.validate();

    NetworkParams params = NetworkParams::zeros(spec);
    const auto bytes = base64_decode(j.at("weights_b64").get<std::string>());
    if (bytes.size() != params.flat.size() * sizeof(double))
        throw ValidationError("model JSON: weight payload size mismatch");
    std::memcpy(params.flat.data(), bytes.data(), bytes.size());
    return {std::move(spec), std::move(params)};
}

} // namespace rsharp::net
