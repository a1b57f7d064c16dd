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
 * @file sweep.hpp
 * @brief Exhaustive grid searches over time allocations.
 *
 * Three drivers are provided:
 *  - line_sweep: the symmetric line ((T - a)/2, (T - a)/2, a), a in [0, T],
 *    endpoints included;
 *  - simplex_sweep: the triangular lattice of the full time simplex;
 *  - param_scan: a line sweep for every (lambda0, lambda1) grid cell with
 *    lambda1 > lambda0, keeping the optimum of each.
 *
 * Point i of a sweep draws its samples under derive_seed(seed, i), so points
 * are independent and any schedule reproduces the same result. Argmax is
 * taken on the raw estimates; a plateau flag marks maxima that another
 * point matches within one standard error.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "senseplan/detection.hpp"
#include "senseplan/errors.hpp"
#include "senseplan/infotheory.hpp"
#include "senseplan/mc.hpp"
#include "senseplan/model.hpp"
#include "senseplan/parallel.hpp"
#include "senseplan/random.hpp"

namespace senseplan {

enum class Metrics { mi, pd, both };

constexpr bool wants_mi(Metrics m) noexcept { return m != Metrics::pd; }
constexpr bool wants_pd(Metrics m) noexcept { return m != Metrics::mi; }

constexpr std::string_view to_string(Metrics m) noexcept
{
    switch (m) {
    case Metrics::mi: return "mi";
    case Metrics::pd: return "pd";
    case Metrics::both: return "both";
    }
    return "?";
}

enum class Regime { individual, joint, hybrid };

constexpr std::string_view to_string(Regime r) noexcept
{
    switch (r) {
    case Regime::individual: return "individual";
    case Regime::joint: return "joint";
    case Regime::hybrid: return "hybrid";
    }
    return "?";
}

/// Regime of grid point `index` on a line sweep of `steps` points.
constexpr Regime classify_line_point(std::size_t index, std::size_t steps) noexcept
{
    if (index == 0)
        return Regime::individual;
    if (index + 1 == steps)
        return Regime::joint;
    return Regime::hybrid;
}

struct SweepPoint {
    Allocation alloc;
    double alpha = 0.0;  // t3 on the symmetric line; unused by simplex sweeps
    std::optional<McEstimate> mi;
    std::optional<McEstimate> pd;
};

struct Argmax {
    std::size_t index = 0;
    bool plateau = false;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::optional<Argmax> argmax_mi;
    std::optional<Argmax> argmax_pd;
    ChannelParams params;
    std::uint64_t count = 0;
    std::uint64_t seed = 0;
    Metrics metrics = Metrics::both;

    /// |alpha at MI argmax - alpha at Pd argmax|, when both were computed.
    std::optional<double> alpha_gap() const
    {
        if (!argmax_mi || !argmax_pd)
            return std::nullopt;
        return std::abs(points[argmax_mi->index].alpha - points[argmax_pd->index].alpha);
    }
};

/// MI and/or Pd at one allocation from a single shared sample run.
inline SweepPoint evaluate_point(const ChannelParams& params, const Allocation& alloc, std::uint64_t count,
                                 std::uint64_t seed, Metrics metrics, Exec exec = Exec::serial())
{
    validate_allocation(alloc, params);
    if (count < 2)
        throw DomainError("estimates need at least 2 samples");
    const MixtureModel model = build_mixture(params, alloc);
    const bool mi = wants_mi(metrics);
    const bool pd = wants_pd(metrics);

    struct Acc {
        RunningStats entropy;
        ConfusionMatrix confusion;
    };
    auto parts = run_chunks<Acc>(model, count, seed, exec,
                                 [&](Acc& acc, const Point<3>& y, std::size_t label, std::uint64_t) {
                                     if (mi)
                                         acc.entropy.push(surprisal_bits(model, y));
                                     if (pd)
                                         acc.confusion.add(label, map_decide(model, y));
                                 });
    Acc total;
    for (const auto& p : parts) {
        total.entropy.merge(p.entropy);
        total.confusion.merge(p.confusion);
    }

    SweepPoint out;
    out.alloc = alloc;
    out.alpha = alloc.t3;
    if (mi)
        out.mi = mi_from_entropy(make_estimate(total.entropy, seed), 3).mi_bits;
    if (pd)
        out.pd = pd_from_confusion(total.confusion, seed).pd;
    return out;
}

/// First index of the largest value; plateau if any other point is within
/// one standard error of it.
inline Argmax find_argmax(const std::vector<McEstimate>& values)
{
    if (values.empty())
        throw DomainError("argmax of an empty sweep");
    Argmax a;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i].value > values[a.index].value)
            a.index = i;
    const double floor = values[a.index].value - values[a.index].std_error;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (i != a.index && values[i].value >= floor)
            a.plateau = true;
    return a;
}

namespace detail {

inline SweepResult run_sweep(const ChannelParams& params, std::vector<SweepPoint> points, std::uint64_t count,
                             std::uint64_t seed, Metrics metrics, Exec exec)
{
    parallel_for(points.size(), exec, [&](std::size_t i) {
        const double alpha = points[i].alpha;
        points[i] = evaluate_point(params, points[i].alloc, count, random::derive_seed(seed, i), metrics);
        points[i].alpha = alpha;
    });

    SweepResult r{std::move(points), std::nullopt, std::nullopt, params, count, seed, metrics};
    if (wants_mi(metrics)) {
        std::vector<McEstimate> v;
        for (const auto& p : r.points)
            v.push_back(*p.mi);
        r.argmax_mi = find_argmax(v);
    }
    if (wants_pd(metrics)) {
        std::vector<McEstimate> v;
        for (const auto& p : r.points)
            v.push_back(*p.pd);
        r.argmax_pd = find_argmax(v);
    }
    return r;
}

}  // namespace detail

/// alpha_i = T i / (steps - 1), i = 0 .. steps-1.
inline std::vector<double> line_alphas(double total_time, std::size_t steps)
{
    if (steps < 2)
        throw DomainError("line sweep needs at least 2 steps");
    std::vector<double> a(steps);
    for (std::size_t i = 0; i < steps; ++i)
        a[i] = total_time * static_cast<double>(i) / static_cast<double>(steps - 1);
    a.back() = total_time;
    return a;
}

inline SweepResult line_sweep(const ChannelParams& params, std::size_t steps, std::uint64_t count, std::uint64_t seed,
                              Metrics metrics, Exec exec = Exec::serial())
{
    std::vector<SweepPoint> points;
    for (double a : line_alphas(params.total_time(), steps)) {
        SweepPoint p;
        p.alloc = line_allocation(params.total_time(), a);
        p.alpha = a;
        points.push_back(p);
    }
    return detail::run_sweep(params, std::move(points), count, seed, metrics, exec);
}

/// Lattice {(i, j, k) T / resolution : i + j + k = resolution}, ordered by k, then j.
inline std::vector<Allocation> simplex_lattice(double total_time, std::size_t resolution)
{
    if (resolution < 2)
        throw DomainError("simplex sweep needs resolution >= 2");
    const double step = total_time / static_cast<double>(resolution);
    std::vector<Allocation> out;
    for (std::size_t k = 0; k <= resolution; ++k)
        for (std::size_t j = 0; j + k <= resolution; ++j) {
            const std::size_t i = resolution - j - k;
            out.push_back({step * static_cast<double>(i), step * static_cast<double>(j), step * static_cast<double>(k)});
        }
    return out;
}

inline SweepResult simplex_sweep(const ChannelParams& params, std::size_t resolution, std::uint64_t count,
                                 std::uint64_t seed, Metrics metrics, Exec exec = Exec::serial())
{
    std::vector<SweepPoint> points;
    for (const auto& a : simplex_lattice(params.total_time(), resolution)) {
        SweepPoint p;
        p.alloc = a;
        p.alpha = a.t3;
        points.push_back(p);
    }
    return detail::run_sweep(params, std::move(points), count, seed, metrics, exec);
}

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

struct ScanSpec {
    Range lambda0_range;
    Range lambda1_range;
    std::size_t grid_n = 2;
};

struct ScanRow {
    double lambda0 = 0.0;
    double lambda1 = 0.0;
    McEstimate optimum;
    double opt_t3 = 0.0;
    Regime regime = Regime::hybrid;
    bool plateau = false;
};

/// grid_n equally spaced values over [lo, hi], both ends included.
inline std::vector<double> linspace(Range r, std::size_t n)
{
    if (n == 0)
        throw DomainError("grid needs at least one point");
    if (n == 1)
        return {r.lo};
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = r.lo + (r.hi - r.lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    v.back() = r.hi;
    return v;
}

/**
 * Line-sweep optimum of one metric for every grid cell with lambda1 > lambda0.
 *
 * Rows are ordered lambda0-major. Cell (i, j) uses derive_seed(seed, i * grid_n + j),
 * so skipped cells do not shift the seeds of the others.
 */
inline std::vector<ScanRow> param_scan(const ScanSpec& scan, double p, double total_time, std::size_t steps,
                                       std::uint64_t count, std::uint64_t seed, Metrics metric,
                                       Exec exec = Exec::serial())
{
    if (metric == Metrics::both)
        throw DomainError("parameter scan optimizes a single metric");
    const auto l0 = linspace(scan.lambda0_range, scan.grid_n);
    const auto l1 = linspace(scan.lambda1_range, scan.grid_n);

    struct Cell {
        double lambda0, lambda1;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < l0.size(); ++i)
        for (std::size_t j = 0; j < l1.size(); ++j)
            if (l1[j] > l0[i])
                cells.push_back({l0[i], l1[j], random::derive_seed(seed, i * scan.grid_n + j)});

    std::vector<ScanRow> rows(cells.size());
    parallel_for(cells.size(), exec, [&](std::size_t c) {
        const ChannelParams params(cells[c].lambda0, cells[c].lambda1, p, total_time);
        const SweepResult s = line_sweep(params, steps, count, cells[c].seed, metric);
        const Argmax best = metric == Metrics::mi ? *s.argmax_mi : *s.argmax_pd;
        const SweepPoint& pt = s.points[best.index];
        rows[c] = {cells[c].lambda0, cells[c].lambda1,
                   metric == Metrics::mi ? *pt.mi : *pt.pd,
                   pt.alpha,
                   classify_line_point(best.index, steps),
                   best.plateau};
    });
    return rows;
}

}  // namespace senseplan
