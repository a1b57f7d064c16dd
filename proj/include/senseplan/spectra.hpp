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

// Singular values of the 3x2 scaling matrix. Its third singular value is
// structurally zero and not stored.

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
#include "senseplan/random.hpp"

namespace senseplan {

struct SingularValues {
    std::array<double, 2> sigma{};  // descending

    double squared(std::size_t i) const { return sigma[i] * sigma[i]; }
};

/// sigma^2 = (t1 + t2 + 2 t3 -/+ sqrt((t1 - t2)^2 + 4 t3^2)) / 2.
inline SingularValues singular_values_formula(const Allocation& alloc)
{
    require_nonnegative(alloc);
    const double s = alloc.t1 + alloc.t2 + 2.0 * alloc.t3;
    const double dt = alloc.t1 - alloc.t2;
    const double r = std::sqrt(dt * dt + 4.0 * alloc.t3 * alloc.t3);
    double lo = s - r;
    // s >= r holds exactly; allow for one rounding step near a rank drop.
    if (lo < 0.0) {
        if (lo < -1e-12 * s)
            throw NumericError("negative radicand in singular value formula");
        lo = 0.0;
    }
    SingularValues sv;
    sv.sigma = {std::sqrt(s + r) / std::numbers::sqrt2, std::sqrt(lo) / std::numbers::sqrt2};
    if (sv.sigma[0] < sv.sigma[1])
        std::swap(sv.sigma[0], sv.sigma[1]);
    return sv;
}

/// Square roots of the eigenvalues of the Gram matrix [[t1+t3, t3], [t3, t2+t3]].
inline SingularValues singular_values_numeric(const Allocation& alloc)
{
    require_nonnegative(alloc);
    const double a = alloc.t1 + alloc.t3;
    const double d = alloc.t2 + alloc.t3;
    const double b = alloc.t3;
    const double big = 0.5 * (a + d) + std::hypot(0.5 * (a - d), b);
    // Small root from det / big; det expanded so no cancellation occurs.
    const double det = alloc.t1 * alloc.t2 + alloc.t3 * (alloc.t1 + alloc.t2);
    const double small = big > 0.0 ? det / big : 0.0;
    SingularValues sv;
    sv.sigma = {std::sqrt(big), std::sqrt(small)};
    return sv;
}

/// Uniformly random point of the time simplex with T uniform on [0, max_total].
inline Allocation random_allocation(random::Stream& rng, double max_total)
{
    const double total = max_total * rng.uniform();
    double a = rng.uniform();
    double b = rng.uniform();
    if (a > b)
        std::swap(a, b);
    return {total * a, total * (b - a), total * (1.0 - b)};
}

struct SpectrumAudit {
    std::size_t count = 0;
    double max_abs_error = 0.0;        // formula vs Gram eigen-solve, componentwise
    double max_frobenius_error = 0.0;  // |sigma0^2 + sigma1^2 - (t1 + t2 + 2 t3)|
};

/// Compares both singular value routes on `count` random allocations.
inline SpectrumAudit audit_singular_values(std::size_t count, double max_total, std::uint64_t seed)
{
    if (count == 0)
        throw DomainError("audit needs at least one allocation");
    if (!(max_total >= 0.0) || !std::isfinite(max_total))
        throw DomainError("maximum total time must be finite and nonnegative");
    random::Stream rng(seed, 0);
    SpectrumAudit audit;
    audit.count = count;
    for (std::size_t n = 0; n < count; ++n) {
        const Allocation a = random_allocation(rng, max_total);
        const SingularValues f = singular_values_formula(a);
        const SingularValues g = singular_values_numeric(a);
        for (std::size_t i = 0; i < 2; ++i)
            audit.max_abs_error = std::max(audit.max_abs_error, std::abs(f.sigma[i] - g.sigma[i]));
        const double frob = f.squared(0) + f.squared(1) - (a.t1 + a.t2 + 2.0 * a.t3);
        audit.max_frobenius_error = std::max(audit.max_frobenius_error, std::abs(frob));
    }
    return audit;
}

/// Least-squares line through the squared singular values along ((T-a)/2, (T-a)/2, a).
struct LineSpectrumFit {
    std::array<double, 2> slope{};
    std::array<double, 2> intercept{};
    double max_residual = 0.0;
};

inline LineSpectrumFit fit_line_spectrum(double total_time, std::size_t steps)
{
    if (steps < 2)
        throw DomainError("line fit needs at least 2 points");
    std::vector<double> alpha(steps);
    std::array<std::vector<double>, 2> sq;
    for (std::size_t i = 0; i < steps; ++i) {
        alpha[i] = total_time * static_cast<double>(i) / static_cast<double>(steps - 1);
        const SingularValues sv = singular_values_formula(line_allocation(total_time, alpha[i]));
        // Order by role: the (T + 3a)/2 branch is the larger one for every a >= 0.
        sq[0].push_back(sv.squared(0));
        sq[1].push_back(sv.squared(1));
    }
    double mean_a = 0.0;
    for (double a : alpha)
        mean_a += a;
    mean_a /= static_cast<double>(steps);
    double saa = 0.0;
    for (double a : alpha)
        saa += (a - mean_a) * (a - mean_a);

    LineSpectrumFit fit;
    for (std::size_t k = 0; k < 2; ++k) {
        double mean_s = 0.0;
        for (double v : sq[k])
            mean_s += v;
        mean_s /= static_cast<double>(steps);
        double sas = 0.0;
        for (std::size_t i = 0; i < steps; ++i)
            sas += (alpha[i] - mean_a) * (sq[k][i] - mean_s);
        fit.slope[k] = saa > 0.0 ? sas / saa : 0.0;
        fit.intercept[k] = mean_s - fit.slope[k] * mean_a;
        for (std::size_t i = 0; i < steps; ++i)
            fit.max_residual = std::max(fit.max_residual,
                                        std::abs(sq[k][i] - (fit.intercept[k] + fit.slope[k] * alpha[i])));
    }
    return fit;
}

}  // namespace senseplan
