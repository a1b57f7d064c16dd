// Copyright 2026 The senseplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file mc.hpp
 * @brief Chunked, reproducible sampling from Gaussian mixtures.
 *
 * A run of `count` samples under `seed` is split into chunks of
 * kChunkSize samples. Chunk c draws from random::Stream(seed, c), so the
 * partition and every sample depend on (seed, count) alone. Per-chunk
 * accumulators are merged in chunk order.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "senseplan/errors.hpp"
#include "senseplan/model.hpp"
#include "senseplan/parallel.hpp"
#include "senseplan/random.hpp"

namespace senseplan {

inline constexpr std::uint64_t kChunkSize = 8192;

/// Default sample counts: one-off estimates and per-point sweep estimates.
inline constexpr std::uint64_t kDefaultSamples = 1'000'000;
inline constexpr std::uint64_t kDefaultSweepSamples = 100'000;

constexpr std::uint64_t chunk_count(std::uint64_t count) noexcept
{
    return (count + kChunkSize - 1) / kChunkSize;
}

/// Welford accumulator with a deterministic pairwise merge.
struct RunningStats {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double x) noexcept
    {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const RunningStats& o) noexcept
    {
        if (o.n == 0)
            return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n);
        const double nb = static_cast<double>(o.n);
        const double d = o.mean - mean;
        const double total = na + nb;
        mean += d * nb / total;
        m2 += o.m2 + d * d * na * nb / total;
        n += o.n;
    }

    /// Unbiased sample variance.
    double variance() const noexcept { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double std_error() const noexcept { return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0; }
};

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t count = 0;
    std::uint64_t seed = 0;

    bool operator==(const McEstimate&) const = default;
};

inline McEstimate make_estimate(const RunningStats& stats, std::uint64_t seed) noexcept
{
    return {stats.mean, stats.std_error(), stats.n, seed};
}

template <std::size_t Dim>
struct SampleBatch {
    std::vector<Point<Dim>> points;
    std::vector<std::uint8_t> labels;
    std::uint64_t seed = 0;
    std::uint64_t count = 0;
};

/// Draws component labels by inverting the cumulative weights.
template <std::size_t K>
class ComponentPicker {
public:
    template <std::size_t Dim>
    explicit ComponentPicker(const GaussianMixture<Dim, K>& model)
    {
        double acc = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            acc += model.component(k).weight;
            cumulative_[k] = acc;
            if (model.component(k).weight > 0.0)
                last_positive_ = k;
        }
    }

    std::size_t operator()(random::Stream& rng) const noexcept
    {
        const double u = rng.uniform() * cumulative_[K - 1];
        for (std::size_t k = 0; k < K; ++k)
            if (u < cumulative_[k])
                return k;
        return last_positive_;
    }

private:
    std::array<double, K> cumulative_{};
    std::size_t last_positive_ = 0;
};

/**
 * Runs visit(acc, y, label) over `count` samples of `model`, one Acc per
 * chunk, and returns the accumulators in chunk order.
 *
 * Each sample takes one uniform for its label and then Dim normals added to
 * the component mean.
 */
template <class Acc, std::size_t Dim, std::size_t K, class Visit>
std::vector<Acc> run_chunks(const GaussianMixture<Dim, K>& model, std::uint64_t count, std::uint64_t seed,
                            Exec exec, Visit&& visit)
{
    const std::uint64_t chunks = chunk_count(count);
    const ComponentPicker<K> pick(model);
    std::vector<Acc> out(chunks);
    parallel_for(chunks, exec, [&](std::size_t c) {
        random::Stream rng(seed, c);
        const std::uint64_t begin = c * kChunkSize;
        const std::uint64_t end = std::min(count, begin + kChunkSize);
        Acc acc{};
        for (std::uint64_t i = begin; i < end; ++i) {
            const std::size_t label = pick(rng);
            Point<Dim> y = model.component(label).mean;
            for (std::size_t d = 0; d < Dim; ++d)
                y[d] += rng.normal();
            visit(acc, y, label, i);
        }
        out[c] = acc;
    });
    return out;
}

template <std::size_t Dim, std::size_t K>
SampleBatch<Dim> sample_mixture(const GaussianMixture<Dim, K>& model, std::uint64_t count, std::uint64_t seed,
                                Exec exec = Exec::serial())
{
    if (count == 0)
        throw DomainError("sample count must be at least 1");
    SampleBatch<Dim> batch;
    batch.points.resize(count);
    batch.labels.resize(count);
    batch.seed = seed;
    batch.count = count;
    struct Nothing {};
    run_chunks<Nothing>(model, count, seed, exec, [&](Nothing&, const Point<Dim>& y, std::size_t label, std::uint64_t i) {
        batch.points[i] = y;
        batch.labels[i] = static_cast<std::uint8_t>(label);
    });
    return batch;
}

/// Per-sample entropy term -log2 f(y).
template <std::size_t Dim, std::size_t K>
double surprisal_bits(const GaussianMixture<Dim, K>& model, const Point<Dim>& y) noexcept
{
    return -model.log_density(y) / std::numbers::ln2;
}

/// Differential entropy H(Y) in bits, as the sample mean of -log2 f(s_i).
template <std::size_t Dim, std::size_t K>
McEstimate entropy_mc(const GaussianMixture<Dim, K>& model, std::uint64_t count, std::uint64_t seed,
                      Exec exec = Exec::serial())
{
    if (count < 2)
        throw DomainError("entropy estimate needs at least 2 samples");
    auto parts = run_chunks<RunningStats>(
        model, count, seed, exec,
        [&](RunningStats& acc, const Point<Dim>& y, std::size_t, std::uint64_t) { acc.push(surprisal_bits(model, y)); });
    RunningStats total;
    for (const auto& p : parts)
        total.merge(p);
    return make_estimate(total, seed);
}

}  // namespace senseplan
