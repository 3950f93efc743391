// Copyright (c) 2026 rsharp contributors
// SPDX-License-Identifier: Apache-2.0
#include "rsharp/harness.hpp"

#include "rsharp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rsharp::harness {

using linalg::SeededRng;

DataKind data_kind_from_string(const std::string& s) {
    if (s == "gaussian_blobs") return DataKind::gaussian_blobs;
    if (s == "two_spirals") return DataKind::two_spirals;
    if (s == "random_label_noise") return DataKind::random_label_noise;
    throw ValidationError("unknown dataset kind: " + s);
}

std::string to_string(DataKind k) {
    switch (k) {
        case DataKind::gaussian_blobs: return "gaussian_blobs";
        case DataKind::two_spirals: return "two_spirals";
        case DataKind::random_label_noise: return "random_label_noise";
    }
    return "?";
}

namespace {

constexpr double kBlobRadius = 6.0;

// Well-separated class means. Orthogonal directions when the ambient
// dimension allows it, a circle layout otherwise.
std::vector<std::vector<double>> class_means(const DataSpec& spec, SeededRng& rng) {
    const std::size_t k = spec.classes, d = spec.d;
    std::vector<std::vector<double>> means(k, std::vector<double>(d, 0.0));
    if (d >= k) {
        const auto q = linalg::haar_orthogonal(rng, d);
        for (std::size_t c = 0; c < k; ++c)
            for (std::size_t i = 0; i < d; ++i) means[c][i] = kBlobRadius * q(i, c);
    } else if (d >= 2) {
        for (std::size_t c = 0; c < k; ++c) {
            const double phi = 2.0 * 3.141592653589793 * static_cast<double>(c) /
                               static_cast<double>(k);
            means[c][0] = kBlobRadius * std::cos(phi);
            means[c][1] = kBlobRadius * std::sin(phi);
        }
    } else {
        for (std::size_t c = 0; c < k; ++c)
            means[c][0] = kBlobRadius * (2.0 * static_cast<double>(c) -
                                         static_cast<double>(k - 1));
    }
    return means;
}

struct RawData {
    std::vector<std::vector<double>> x;
    std::vector<std::size_t> labels;
};

RawData gen_blobs(const DataSpec& spec, SeededRng& mean_rng, SeededRng& data_rng) {
    const auto means = class_means(spec, mean_rng);
    RawData raw;
    for (std::size_t c = 0; c < spec.classes; ++c) {
        const std::size_t count = spec.n / spec.classes + (c < spec.n % spec.classes ? 1 : 0);
        for (std::size_t i = 0; i < count; ++i) {
            std::vector<double> x(spec.d);
            for (std::size_t j = 0; j < spec.d; ++j) x[j] = means[c][j] + data_rng.normal();
            raw.x.push_back(std::move(x));
            raw.labels.push_back(c);
        }
    }
    return raw;
}

RawData gen_spirals(const DataSpec& spec, SeededRng& data_rng) {
    if (spec.d < 2) throw ValidationError("two_spirals needs d >= 2");
    RawData raw;
    const double turns = 1.75;
    for (std::size_t c = 0; c < spec.classes; ++c) {
        const std::size_t count = spec.n / spec.classes + (c < spec.n % spec.classes ? 1 : 0);
        const double phase =
            2.0 * 3.141592653589793 * static_cast<double>(c) / static_cast<double>(spec.classes);
        for (std::size_t i = 0; i < count; ++i) {
            const double t = 0.2 + 0.8 * data_rng.next_double();
            const double angle = 2.0 * 3.141592653589793 * turns * t + phase;
            const double r = kBlobRadius * t;
            std::vector<double> x(spec.d, 0.0);
            x[0] = r * std::cos(angle) + 0.1 * data_rng.normal();
            x[1] = r * std::sin(angle) + 0.1 * data_rng.normal();
            for (std::size_t j = 2; j < spec.d; ++j) x[j] = 0.1 * data_rng.normal();
            raw.x.push_back(std::move(x));
            raw.labels.push_back(c);
        }
    }
    return raw;
}

net::Dataset assemble(const RawData& raw, std::span<const std::size_t> rows,
                      std::size_t d, std::size_t classes) {
    net::Dataset out;
    out.inputs = linalg::Matrix(rows.size(), d);
    out.targets = linalg::Matrix(rows.size(), classes);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t j = 0; j < d; ++j) out.inputs(r, j) = raw.x[rows[r]][j];
        out.targets(r, raw.labels[rows[r]]) = 1.0;
    }
    return out;
}

void shuffle_indices(std::vector<std::size_t>& idx, SeededRng& rng) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        const std::size_t j = rng.next_below(i);
        std::swap(idx[i - 1], idx[j]);
    }
}

} // namespace

DatasetPair gen_dataset(const DataSpec& spec) {
    if (spec.classes < 2) throw ValidationError("gen_dataset: need at least two classes");
    if (spec.n < 2 * spec.classes)
        throw ValidationError("gen_dataset: need n >= 2 * classes");
    if (spec.d == 0) throw ValidationError("gen_dataset: need d >= 1");
    if (spec.kind == DataKind::random_label_noise &&
        (spec.noise_fraction < 0.0 || spec.noise_fraction > 1.0))
        throw ValidationError("gen_dataset: noise fraction must lie in [0, 1]");

    SeededRng mean_rng(spec.seed, 0);
    SeededRng data_rng(spec.seed, 1);
    RawData raw = spec.kind == DataKind::two_spirals ? gen_spirals(spec, data_rng)
                                                     : gen_blobs(spec, mean_rng, data_rng);

    // Per-class 80/20 split keeps both parts balanced within one point.
    std::vector<std::size_t> train_rows, test_rows;
    std::size_t offset = 0;
    for (std::size_t c = 0; c < spec.classes; ++c) {
        const std::size_t count = spec.n / spec.classes + (c < spec.n % spec.classes ? 1 : 0);
        const std::size_t ntrain = count * 4 / 5;
        for (std::size_t i = 0; i < count; ++i)
            (i < ntrain ? train_rows : test_rows).push_back(offset + i);
        offset += count;
    }
    SeededRng order_rng(spec.seed, 2);
    shuffle_indices(train_rows, order_rng);
    shuffle_indices(test_rows, order_rng);

    DatasetPair out;
    out.train = assemble(raw, train_rows, spec.d, spec.classes);
    out.test = assemble(raw, test_rows, spec.d, spec.classes);

    if (spec.kind == DataKind::random_label_noise && spec.noise_fraction > 0.0) {
        SeededRng flip_rng(spec.seed, 3);
        for (std::size_t r = 0; r < out.train.size(); ++r) {
            if (flip_rng.next_double() >= spec.noise_fraction) continue;
            std::size_t current = 0;
            for (std::size_t c = 1; c < spec.classes; ++c)
                if (out.train.targets(r, c) > 0.5) current = c;
            std::size_t flipped =
                (current + 1 + flip_rng.next_below(spec.classes - 1)) % spec.classes;
            out.train.targets(r, current) = 0.0;
            out.train.targets(r, flipped) = 1.0;
        }
    }
    return out;
}

} // namespace rsharp::harness
