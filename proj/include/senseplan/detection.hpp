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
 * @file detection.hpp
 * @brief MAP detection of the joint hypothesis and its success probability.
 *
 * With identity covariance the posterior comparison reduces to
 * log prior_k - |y - mu_k|^2 / 2; the shared normalizer cancels exactly.
 * Ties go to the lowest hypothesis index.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>

#include "senseplan/errors.hpp"
#include "senseplan/mc.hpp"
#include "senseplan/model.hpp"

namespace senseplan {

/// counts[i][j]: samples generated under hypothesis i and decided as j.
struct ConfusionMatrix {
    std::array<std::array<std::uint64_t, kHypotheses>, kHypotheses> counts{};
    std::uint64_t total = 0;

    void add(std::size_t truth, std::size_t decided) noexcept
    {
        ++counts[truth][decided];
        ++total;
    }

    void merge(const ConfusionMatrix& o) noexcept
    {
        for (std::size_t i = 0; i < kHypotheses; ++i)
            for (std::size_t j = 0; j < kHypotheses; ++j)
                counts[i][j] += o.counts[i][j];
        total += o.total;
    }

    std::uint64_t trace() const noexcept
    {
        std::uint64_t t = 0;
        for (std::size_t i = 0; i < kHypotheses; ++i)
            t += counts[i][i];
        return t;
    }

    std::uint64_t row_total(std::size_t truth) const noexcept
    {
        std::uint64_t t = 0;
        for (auto c : counts[truth])
            t += c;
        return t;
    }

    bool operator==(const ConfusionMatrix&) const = default;
};

struct PdResult {
    McEstimate pd;
    double bayes_risk = 0.0;
    ConfusionMatrix confusion;
};

/// Standard normal CDF via erfc, accurate in both tails.
inline double normal_cdf(double x) noexcept
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

template <std::size_t Dim, std::size_t K>
std::size_t map_decide(const GaussianMixture<Dim, K>& model, const Point<Dim>& y) noexcept
{
    const auto scores = model.log_scores(y);
    std::size_t best = 0;
    for (std::size_t k = 1; k < K; ++k)
        if (scores[k] > scores[best])
            best = k;
    return best;
}

/// Pd = trace / total with binomial standard error.
inline PdResult pd_from_confusion(const ConfusionMatrix& confusion, std::uint64_t seed)
{
    const double n = static_cast<double>(confusion.total);
    const double pd = static_cast<double>(confusion.trace()) / n;
    PdResult r;
    r.pd = {pd, std::sqrt(pd * (1.0 - pd) / n), confusion.total, seed};
    r.bayes_risk = 1.0 - pd;
    r.confusion = confusion;
    return r;
}

/**
 * Risk under 0-1 costs from conditional decision frequencies:
 * sum_i weight_i * sum_{j != i} P(decide j | truth i).
 *
 * Rows with no samples contribute nothing.
 */
inline double bayes_risk_from_confusion(const ConfusionMatrix& confusion, const std::array<double, kHypotheses>& weights)
{
    double r = 0.0;
    for (std::size_t i = 0; i < kHypotheses; ++i) {
        const std::uint64_t n_i = confusion.row_total(i);
        if (n_i == 0)
            continue;
        double off = 0.0;
        for (std::size_t j = 0; j < kHypotheses; ++j)
            if (j != i)
                off += static_cast<double>(confusion.counts[i][j]) / static_cast<double>(n_i);
        r += weights[i] * off;
    }
    return r;
}

inline PdResult pd_mc(const ChannelParams& params, const Allocation& alloc, std::uint64_t count, std::uint64_t seed,
                      Exec exec = Exec::serial())
{
    validate_allocation(alloc, params);
    if (count < 2)
        throw DomainError("detection estimate needs at least 2 samples");
    const MixtureModel model = build_mixture(params, alloc);
    auto parts = run_chunks<ConfusionMatrix>(
        model, count, seed, exec, [&](ConfusionMatrix& acc, const Point<3>& y, std::size_t label, std::uint64_t) {
            acc.add(label, map_decide(model, y));
        });
    ConfusionMatrix total;
    for (const auto& p : parts)
        total.merge(p);
    return pd_from_confusion(total, seed);
}

inline double bayes_risk(const ChannelParams& params, const Allocation& alloc, std::uint64_t count, std::uint64_t seed,
                         Exec exec = Exec::serial())
{
    return 1.0 - pd_mc(params, alloc, count, seed, exec).pd.value;
}

/// Success probability of the binary MAP test on one target observed for time t.
inline double scalar_map_pd(const ChannelParams& params, double t)
{
    if (!(t >= 0.0) || !std::isfinite(t))
        throw DomainError("sensing time must be finite and nonnegative");
    if (!(params.lambda1() > params.lambda0()))
        throw DomainError("binary test needs lambda1 > lambda0");
    const double p = params.prior_p();
    if (p == 0.0 || p == 1.0)
        return 1.0;
    if (t == 0.0)
        return std::max(p, 1.0 - p);

    const double r = std::sqrt(t);
    const double m0 = params.lambda0() * r;
    const double m1 = params.lambda1() * r;
    const double threshold = 0.5 * (m0 + m1) + std::log((1.0 - p) / p) / (m1 - m0);
    return (1.0 - p) * normal_cdf(threshold - m0) + p * normal_cdf(m1 - threshold);
}

/// With t3 = 0 the two targets decouple; both binary decisions must be right.
inline double pd_closed_form_t3zero(const ChannelParams& params, double t1, double t2)
{
    return scalar_map_pd(params, t1) * scalar_map_pd(params, t2);
}

}  // namespace senseplan
