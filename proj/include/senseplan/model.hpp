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
 * @file model.hpp
 * @brief Two-target time-allocated Gaussian channel.
 *
 * Two binary sources X1, X2 in {lambda0, lambda1} are observed through
 *
 *     Y1 = sqrt(t1) X1 + N1
 *     Y2 = sqrt(t2) X2 + N2
 *     Y3 = sqrt(t3) (X1 + X2) + N3
 *
 * with N ~ N(0, I) and t1 + t2 + t3 = T. The marginal of Y is a four
 * component Gaussian mixture with identity covariance; the covariance is
 * implicit everywhere in this library and never stored.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>

#include "senseplan/errors.hpp"

namespace senseplan {

/// Absolute tolerance for t1 + t2 + t3 == T.
inline constexpr double kAllocationTolerance = 1e-9;

/// Number of joint hypotheses, ordered (l0 l0, l0 l1, l1 l0, l1 l1).
inline constexpr std::size_t kHypotheses = 4;

/// Problem instance: input levels, Bernoulli prior and the time budget.
class ChannelParams {
public:
    ChannelParams(double lambda0, double lambda1, double prior_p, double total_time)
        : lambda0_(lambda0), lambda1_(lambda1), prior_p_(prior_p), total_time_(total_time)
    {
        if (!std::isfinite(lambda0) || !std::isfinite(lambda1))
            throw DomainError("input levels must be finite");
        if (lambda0 > lambda1)
            throw DomainError("lambda0 must not exceed lambda1");
        if (!(prior_p >= 0.0 && prior_p <= 1.0))
            throw DomainError("prior p must lie in [0, 1]");
        if (!(total_time >= 0.0) || !std::isfinite(total_time))
            throw DomainError("total time must be finite and nonnegative");
    }

    double lambda0() const noexcept { return lambda0_; }
    double lambda1() const noexcept { return lambda1_; }
    double prior_p() const noexcept { return prior_p_; }
    double total_time() const noexcept { return total_time_; }

    /// Same instance with a different budget.
    ChannelParams with_total_time(double total_time) const
    {
        return ChannelParams(lambda0_, lambda1_, prior_p_, total_time);
    }

private:
    double lambda0_;
    double lambda1_;
    double prior_p_;
    double total_time_;
};

/// A point (t1, t2, t3) of the time simplex, in seconds.
struct Allocation {
    double t1 = 0.0;
    double t2 = 0.0;
    double t3 = 0.0;

    double total() const noexcept { return t1 + t2 + t3; }

    /// The allocation with the two individual sensing times exchanged.
    Allocation swapped() const noexcept { return {t2, t1, t3}; }

    bool operator==(const Allocation&) const = default;
};

inline void require_nonnegative(const Allocation& alloc)
{
    const bool finite = std::isfinite(alloc.t1) && std::isfinite(alloc.t2) && std::isfinite(alloc.t3);
    if (!finite || alloc.t1 < 0.0 || alloc.t2 < 0.0 || alloc.t3 < 0.0)
        throw DomainError("allocation components must be finite and nonnegative");
}

/// Checks nonnegativity and that the allocation spends exactly the budget.
inline void validate_allocation(const Allocation& alloc, const ChannelParams& params)
{
    require_nonnegative(alloc);
    if (std::abs(alloc.total() - params.total_time()) > kAllocationTolerance)
        throw DomainError("allocation does not sum to the total time");
}

/// Point on the symmetric line ((T - alpha)/2, (T - alpha)/2, alpha).
inline Allocation line_allocation(double total_time, double alpha)
{
    const double half = 0.5 * (total_time - alpha);
    return {half, half, alpha};
}

struct InputSymbol {
    double x1 = 0.0;
    double x2 = 0.0;
    std::size_t hypothesis_index = 0;
    double prior = 0.0;
};

inline std::array<InputSymbol, kHypotheses> input_symbols(const ChannelParams& params)
{
    const double p = params.prior_p();
    const double q = 1.0 - p;
    const double l0 = params.lambda0();
    const double l1 = params.lambda1();
    return {{
        {l0, l0, 0, q * q},
        {l0, l1, 1, p * q},
        {l1, l0, 2, p * q},
        {l1, l1, 3, p * p},
    }};
}

/// H(X) in bits for the four-symbol input.
inline double input_entropy_bits(const ChannelParams& params)
{
    double h = 0.0;
    for (const auto& s : input_symbols(params))
        if (s.prior > 0.0)
            h -= s.prior * std::log2(s.prior);
    return h;
}

/// The 3x2 scaling matrix [[sqrt t1, 0], [0, sqrt t2], [sqrt t3, sqrt t3]].
struct ScalingMatrix {
    std::array<std::array<double, 2>, 3> rows{};

    double operator()(std::size_t r, std::size_t c) const { return rows[r][c]; }

    std::array<double, 3> apply(double x1, double x2) const
    {
        return {rows[0][0] * x1 + rows[0][1] * x2,
                rows[1][0] * x1 + rows[1][1] * x2,
                rows[2][0] * x1 + rows[2][1] * x2};
    }
};

inline ScalingMatrix build_scaling_matrix(const Allocation& alloc)
{
    require_nonnegative(alloc);
    const double r3 = std::sqrt(alloc.t3);
    ScalingMatrix m;
    m.rows = {{{std::sqrt(alloc.t1), 0.0}, {0.0, std::sqrt(alloc.t2)}, {r3, r3}}};
    return m;
}

inline std::array<double, 3> conditional_mean(const Allocation& alloc, const InputSymbol& symbol)
{
    return {std::sqrt(alloc.t1) * symbol.x1,
            std::sqrt(alloc.t2) * symbol.x2,
            std::sqrt(alloc.t3) * (symbol.x1 + symbol.x2)};
}

template <std::size_t Dim>
using Point = std::array<double, Dim>;

template <std::size_t Dim>
struct MixtureComponent {
    double weight = 0.0;
    Point<Dim> mean{};
};

/// log of the mixture density of N(0, I_Dim) at the origin, i.e. -Dim/2 log(2 pi).
template <std::size_t Dim>
inline const double kLogNormalizer = -0.5 * static_cast<double>(Dim) * std::log(2.0 * std::numbers::pi);

/**
 * Finite mixture of identity-covariance Gaussians in Dim dimensions.
 *
 * Weights must be nonnegative and sum to one. Zero-weight components are
 * kept so that component indices stay aligned with hypothesis indices.
 */
template <std::size_t Dim, std::size_t K>
class GaussianMixture {
public:
    static constexpr std::size_t dimension = Dim;
    static constexpr std::size_t size = K;
    using point_type = Point<Dim>;

    GaussianMixture() = default;

    explicit GaussianMixture(const std::array<MixtureComponent<Dim>, K>& components)
        : components_(components)
    {
        double sum = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            const double w = components_[k].weight;
            if (!(w >= 0.0) || !std::isfinite(w))
                throw DomainError("mixture weights must be finite and nonnegative");
            sum += w;
            log_weights_[k] = w > 0.0 ? std::log(w) : -std::numeric_limits<double>::infinity();
        }
        if (!(sum > 0.0))
            throw DomainError("mixture has no positive weight");
    }

    const std::array<MixtureComponent<Dim>, K>& components() const noexcept { return components_; }
    const MixtureComponent<Dim>& component(std::size_t k) const { return components_[k]; }
    double log_weight(std::size_t k) const { return log_weights_[k]; }

    /// log w_k - |y - mu_k|^2 / 2 for every component (normalizer omitted).
    std::array<double, K> log_scores(const point_type& y) const noexcept
    {
        std::array<double, K> s;
        for (std::size_t k = 0; k < K; ++k) {
            double d2 = 0.0;
            for (std::size_t i = 0; i < Dim; ++i) {
                const double d = y[i] - components_[k].mean[i];
                d2 += d * d;
            }
            s[k] = log_weights_[k] - 0.5 * d2;
        }
        return s;
    }

    /// Natural log of the mixture density, evaluated by log-sum-exp.
    double log_density(const point_type& y) const noexcept
    {
        return log_sum_exp(log_scores(y)) + kLogNormalizer<Dim>;
    }

    static double log_sum_exp(const std::array<double, K>& s) noexcept
    {
        const double top = *std::max_element(s.begin(), s.end());
        double acc = 0.0;
        for (double v : s)
            acc += std::exp(v - top);
        return top + std::log(acc);
    }

private:
    std::array<MixtureComponent<Dim>, K> components_{};
    std::array<double, K> log_weights_{};
};

/// Marginal of Y for the vector channel: 4 trivariate components.
using MixtureModel = GaussianMixture<3, kHypotheses>;

/// Marginal of Y1 for the single-target channel: 2 univariate components.
using ScalarMixture = GaussianMixture<1, 2>;

template <std::size_t Dim, std::size_t K>
double log_density(const GaussianMixture<Dim, K>& model, const Point<Dim>& y)
{
    return model.log_density(y);
}

inline MixtureModel build_mixture(const ChannelParams& params, const Allocation& alloc)
{
    require_nonnegative(alloc);
    std::array<MixtureComponent<3>, kHypotheses> comps;
    for (const auto& s : input_symbols(params))
        comps[s.hypothesis_index] = {s.prior, conditional_mean(alloc, s)};
    return MixtureModel(comps);
}

/// One target observed for time t: means lambda0 sqrt(t), lambda1 sqrt(t), weights (1-p, p).
inline ScalarMixture build_scalar_mixture(const ChannelParams& params, double t)
{
    if (!(t >= 0.0) || !std::isfinite(t))
        throw DomainError("sensing time must be finite and nonnegative");
    const double r = std::sqrt(t);
    const double p = params.prior_p();
    return ScalarMixture({{{1.0 - p, {params.lambda0() * r}}, {p, {params.lambda1() * r}}}});
}

}  // namespace senseplan
