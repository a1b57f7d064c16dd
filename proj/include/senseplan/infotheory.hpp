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
 * @file infotheory.hpp
 * @brief Mutual information I(X;Y) = H(Y) - H(Y|X) in bits.
 *
 * H(Y|X) is the entropy of a unit-covariance Gaussian and is exact; H(Y) is
 * a Monte Carlo estimate, so the MI inherits its standard error unchanged.
 * Trapezoid quadratures over truncated boxes serve as deterministic
 * cross-checks in one and three dimensions.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include "senseplan/errors.hpp"
#include "senseplan/mc.hpp"
#include "senseplan/model.hpp"

namespace senseplan {

/// Entropy of N(0, I_k) in bits: k/2 log2(2 pi e).
inline double conditional_entropy_bits(int dimensions)
{
    if (dimensions <= 0)
        throw DomainError("dimension count must be positive");
    return 0.5 * dimensions * std::log2(2.0 * std::numbers::pi * std::numbers::e);
}

struct MiResult {
    McEstimate mi_bits;
    McEstimate h_y_bits;
    double h_y_given_x_bits = 0.0;
};

inline MiResult mi_from_entropy(const McEstimate& h_y, int dimensions)
{
    const double h_cond = conditional_entropy_bits(dimensions);
    McEstimate mi = h_y;
    mi.value = h_y.value - h_cond;
    return {mi, h_y, h_cond};
}

inline MiResult mutual_information_vector(const ChannelParams& params, const Allocation& alloc, std::uint64_t count,
                                          std::uint64_t seed, Exec exec = Exec::serial())
{
    validate_allocation(alloc, params);
    return mi_from_entropy(entropy_mc(build_mixture(params, alloc), count, seed, exec), 3);
}

/// I(X1;Y1) for one target observed alone for time t.
inline MiResult mutual_information_scalar(const ChannelParams& params, double t, std::uint64_t count,
                                          std::uint64_t seed, Exec exec = Exec::serial())
{
    return mi_from_entropy(entropy_mc(build_scalar_mixture(params, t), count, seed, exec), 1);
}

namespace detail {

/// Uniform grid of n+1 nodes spanning [lo, hi] with spacing as close to step as possible.
struct Grid {
    double lo;
    double h;
    std::size_t nodes;

    Grid(double lo_, double hi_, double step) : lo(lo_)
    {
        const auto intervals = static_cast<std::size_t>(std::ceil((hi_ - lo_) / step - 1e-9));
        nodes = std::max<std::size_t>(intervals, 1) + 1;
        h = (hi_ - lo_) / static_cast<double>(nodes - 1);
    }

    double at(std::size_t i) const noexcept { return lo + h * static_cast<double>(i); }
    double weight(std::size_t i) const noexcept { return (i == 0 || i + 1 == nodes) ? 0.5 * h : h; }
};

template <std::size_t Dim, std::size_t K>
Grid covering_grid(const GaussianMixture<Dim, K>& model, std::size_t axis, double step, double half_width)
{
    double lo = model.component(0).mean[axis];
    double hi = lo;
    for (const auto& c : model.components()) {
        lo = std::min(lo, c.mean[axis]);
        hi = std::max(hi, c.mean[axis]);
    }
    return Grid(lo - half_width, hi + half_width, step);
}

/// -f log2 f from log f; zero where f underflows.
inline double entropy_integrand(double log_f)
{
    if (std::isnan(log_f) || log_f == std::numeric_limits<double>::infinity())
        throw NumericError("non-finite density in quadrature");
    const double f = std::exp(log_f);
    const double v = f == 0.0 ? 0.0 : -f * log_f / std::numbers::ln2;
    if (!std::isfinite(v))
        throw NumericError("non-finite entropy integrand");
    return v;
}

inline void check_quadrature_args(double grid_step, double half_width_sigmas)
{
    if (!(grid_step > 0.0))
        throw DomainError("grid step must be positive");
    if (!(half_width_sigmas >= 6.0))
        throw DomainError("half width must be at least 6 standard deviations");
}

}  // namespace detail

/// Trapezoid estimate of H(Y1) in bits over [min mean - w, max mean + w].
inline double entropy_quadrature_1d(const ChannelParams& params, double t, double grid_step, double half_width_sigmas)
{
    detail::check_quadrature_args(grid_step, half_width_sigmas);
    const ScalarMixture model = build_scalar_mixture(params, t);
    const detail::Grid g = detail::covering_grid(model, 0, grid_step, half_width_sigmas);
    double h = 0.0;
    for (std::size_t i = 0; i < g.nodes; ++i)
        h += g.weight(i) * detail::entropy_integrand(model.log_density({g.at(i)}));
    return h;
}

/// Integral of f and of -f log2 f over a box around the mixture means.
struct BoxQuadrature {
    double mass = 0.0;
    double entropy_bits = 0.0;
};

/// Largest budget and smallest spacing accepted by the 3-D box quadrature.
inline constexpr double kQuadrature3dMaxTime = 4.0;
inline constexpr double kQuadrature3dMinStep = 0.05;

inline BoxQuadrature quadrature_3d(const ChannelParams& params, const Allocation& alloc, double grid_step,
                                   double half_width_sigmas)
{
    detail::check_quadrature_args(grid_step, half_width_sigmas);
    validate_allocation(alloc, params);
    if (params.total_time() > kQuadrature3dMaxTime)
        throw DomainError("3-D quadrature is limited to total time <= 4");
    if (grid_step < kQuadrature3dMinStep)
        throw DomainError("3-D quadrature needs grid step >= 0.05");

    const MixtureModel model = build_mixture(params, alloc);
    const detail::Grid gx = detail::covering_grid(model, 0, grid_step, half_width_sigmas);
    const detail::Grid gy = detail::covering_grid(model, 1, grid_step, half_width_sigmas);
    const detail::Grid gz = detail::covering_grid(model, 2, grid_step, half_width_sigmas);

    BoxQuadrature q;
    for (std::size_t i = 0; i < gx.nodes; ++i)
        for (std::size_t j = 0; j < gy.nodes; ++j)
            for (std::size_t k = 0; k < gz.nodes; ++k) {
                const double w = gx.weight(i) * gy.weight(j) * gz.weight(k);
                const double log_f = model.log_density({gx.at(i), gy.at(j), gz.at(k)});
                q.mass += w * std::exp(log_f);
                q.entropy_bits += w * detail::entropy_integrand(log_f);
            }
    return q;
}

}  // namespace senseplan
