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

// Acceptance checks. Each prints one PASS/FAIL line with the measured values.
// Every criterion draws its seeds from one fixed master seed.

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"
#include "senseplan/senseplan.hpp"

using namespace senseplan;

namespace {

constexpr std::uint64_t kMasterSeed = 2718281828;

std::uint64_t seed_for(int criterion, std::uint64_t index = 0)
{
    return random::derive_seed(random::derive_seed(kMasterSeed, static_cast<std::uint64_t>(criterion)), index);
}

struct Verdict {
    bool pass;
    std::string detail;
};

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

const Exec kExec = Exec::hardware();

class Timer {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Verdict entropy_oracle()
{
    Timer timer;
    const ChannelParams params(0, 0, 0.5, 3);
    const auto h = entropy_mc(build_mixture(params, {1, 1, 1}), 100000, seed_for(1), kExec);
    const double target = 1.5 * std::log2(2 * std::numbers::pi * std::numbers::e);
    const double err = std::abs(h.value - target);
    const double secs = timer.seconds();
    const bool ok = err <= 3 * h.std_error && secs < 1.0;
    return {ok, "H(Y)=" + num(h.value) + " target=" + num(target) + " |err|=" + num(err) +
                    " 3se=" + num(3 * h.std_error) + " runtime=" + num(secs) + "s (<1s)"};
}

Verdict saturation()
{
    const ChannelParams scalar_params(0, 2, 0.5, 100);
    const auto s = mutual_information_scalar(scalar_params, 100, 100000, seed_for(2, 0), kExec);
    const auto v = mutual_information_vector(scalar_params, {50, 50, 0}, 100000, seed_for(2, 1), kExec);
    const double es = std::abs(s.mi_bits.value - 1.0);
    const double ev = std::abs(v.mi_bits.value - 2.0);
    return {es <= 0.01 && ev <= 0.02, "scalar MI=" + num(s.mi_bits.value) + " (|err| " + num(es) +
                                          " <= 0.01) vector MI=" + num(v.mi_bits.value) + " (|err| " + num(ev) +
                                          " <= 0.02)"};
}

Verdict zero_information()
{
    bool ok = true;
    std::string detail;
    const auto t0 = mutual_information_vector(ChannelParams(0, 2, 0.5, 0), {0, 0, 0}, 100000, seed_for(3, 0), kExec);
    const auto flat = mutual_information_vector(ChannelParams(1, 1, 0.5, 3), {1, 1, 1}, 100000, seed_for(3, 1), kExec);
    for (const auto& [name, r] : {std::pair{"T=0", t0}, std::pair{"l0=l1", flat}}) {
        const bool good = std::abs(r.mi_bits.value) <= 3 * r.mi_bits.std_error;
        ok &= good;
        detail += std::string(name) + " MI=" + num(r.mi_bits.value) + " 3se=" + num(3 * r.mi_bits.std_error) + "; ";
    }
    std::uint64_t i = 2;
    for (double p : {0.125, 0.5, 0.75, 0.99}) {
        const double expect = std::max({(1 - p) * (1 - p), p * (1 - p), p * p});
        const auto r = pd_mc(ChannelParams(0, 2, p, 0), {0, 0, 0}, 100000, seed_for(3, i++), kExec);
        const double sigma = std::sqrt(expect * (1 - expect) / 100000.0);
        const bool good = std::abs(r.pd.value - expect) <= 3 * sigma;
        ok &= good;
        detail += "p=" + num(p) + " Pd=" + num(r.pd.value) + " expect=" + num(expect) + (good ? "" : " (out)") + "; ";
    }
    return {ok, detail};
}

Verdict symmetry()
{
    random::Stream rng(seed_for(4, 999), 0);
    int within = 0;
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        const double l0 = 2 * rng.uniform();
        const double l1 = l0 + 0.25 + 2.75 * rng.uniform();
        const double p = 0.05 + 0.9 * rng.uniform();
        const double total = 0.5 + 7.5 * rng.uniform();
        double a = rng.uniform(), b = rng.uniform();
        if (a > b)
            std::swap(a, b);
        const Allocation alloc{total * a, total * (b - a), total * (1 - b)};
        const ChannelParams params(l0, l1, p, alloc.total());
        const auto x = mutual_information_vector(params, alloc, 100000, seed_for(4, 2 * k), kExec);
        const auto y = mutual_information_vector(params, alloc.swapped(), 100000, seed_for(4, 2 * k + 1), kExec);
        const double z = std::abs(x.mi_bits.value - y.mi_bits.value) / std::hypot(x.mi_bits.std_error, y.mi_bits.std_error);
        worst = std::max(worst, z);
        within += z <= 3.0;
    }
    return {within >= 19, std::to_string(within) + "/20 within 3 combined se (need >= 19); worst z=" + num(worst)};
}

Verdict additivity()
{
    random::Stream rng(seed_for(5, 999), 0);
    int within = 0;
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 10; ++k) {
        // Uniform point of {t1, t2 >= 0, t1 + t2 <= 8}.
        double t1 = 8 * rng.uniform(), t2 = 8 * rng.uniform();
        if (t1 + t2 > 8) {
            t1 = 8 - t1;
            t2 = 8 - t2;
        }
        const ChannelParams params(0, 2, 0.5, t1 + t2);
        const auto v = mutual_information_vector(params, {t1, t2, 0}, 100000, seed_for(5, 3 * k), kExec);
        const auto s1 = mutual_information_scalar(params, t1, 100000, seed_for(5, 3 * k + 1), kExec);
        const auto s2 = mutual_information_scalar(params, t2, 100000, seed_for(5, 3 * k + 2), kExec);
        const double se = std::sqrt(v.mi_bits.std_error * v.mi_bits.std_error +
                                    s1.mi_bits.std_error * s1.mi_bits.std_error +
                                    s2.mi_bits.std_error * s2.mi_bits.std_error);
        const double z = std::abs(v.mi_bits.value - s1.mi_bits.value - s2.mi_bits.value) / se;
        worst = std::max(worst, z);
        within += z <= 3.0;
    }
    return {within >= 9, std::to_string(within) + "/10 within 3 combined se (need >= 9); worst z=" + num(worst)};
}

Verdict singular_values()
{
    const auto audit = audit_singular_values(10000, 100.0, seed_for(6));
    const auto fit = fit_line_spectrum(100.0, 400);
    const bool ok = audit.max_abs_error <= 1e-10 && fit.max_residual <= 1e-10;
    return {ok, "max abs error=" + num(audit.max_abs_error) + " line fit residual=" + num(fit.max_residual) +
                    " slopes=(" + num(fit.slope[0]) + ", " + num(fit.slope[1]) + ")"};
}

Verdict detection_oracle()
{
    Timer timer;
    int cells = 0, good = 0;
    double worst = 0.0, closed_form_err = 0.0;
    std::uint64_t i = 0;
    for (double p : {0.3, 0.5, 0.8})
        for (double t1 : {0.25, 1.0, 4.0})
            for (double t2 : {0.25, 1.0, 4.0}) {
                const ChannelParams params(0, 2, p, t1 + t2);
                const double exact = pd_closed_form_t3zero(params, t1, t2);
                const double reference = oracle::scalar_pd_by_quadrature(0, 2, p, t1) *
                                         oracle::scalar_pd_by_quadrature(0, 2, p, t2);
                closed_form_err = std::max(closed_form_err, std::abs(exact - reference));
                const auto r = pd_mc(params, {t1, t2, 0}, 1000000, seed_for(7, i++), kExec);
                const double sigma = std::sqrt(exact * (1 - exact) / 1e6);
                const double z = std::abs(r.pd.value - exact) / sigma;
                worst = std::max(worst, z);
                ++cells;
                good += z <= 3.0;
            }
    const double secs = timer.seconds();
    const bool ok = good == cells && closed_form_err < 1e-9 && secs < 60.0;
    return {ok, std::to_string(good) + "/" + std::to_string(cells) + " cells within 3 sigma; worst z=" + num(worst) +
                    " closed form vs quadrature=" + num(closed_form_err) + " runtime=" + num(secs) + "s (<60s)"};
}

/// Points whose smoothed second difference exceeds +6 se, and the interior points examined.
std::pair<int, int> convex_excursions(const std::vector<McEstimate>& v)
{
    const std::size_t n = v.size();
    std::vector<double> smooth(n, 0.0);
    for (std::size_t i = 2; i + 2 < n; ++i)
        smooth[i] = (v[i - 2].value + v[i - 1].value + v[i].value + v[i + 1].value + v[i + 2].value) / 5.0;
    int bad = 0, examined = 0;
    for (std::size_t i = 3; i + 3 < n; ++i) {
        const double d2 = smooth[i - 1] - 2 * smooth[i] + smooth[i + 1];
        ++examined;
        bad += d2 > 6.0 * v[i].std_error;
    }
    return {bad, examined};
}

Verdict concavity()
{
    Timer timer;
    const auto r = line_sweep(ChannelParams(0, 2, 0.5, 1), 400, 100000, seed_for(8), Metrics::both, kExec);
    std::vector<McEstimate> mi, pd;
    for (const auto& p : r.points) {
        mi.push_back(*p.mi);
        pd.push_back(*p.pd);
    }
    const auto [mi_bad, n] = convex_excursions(mi);
    const auto [pd_bad, n2] = convex_excursions(pd);
    const double secs = timer.seconds();
    const int allowed = n / 100;
    const bool ok = mi_bad <= allowed && pd_bad <= allowed && secs < 300.0;
    return {ok, "MI excursions " + std::to_string(mi_bad) + "/" + std::to_string(n) + ", Pd excursions " +
                    std::to_string(pd_bad) + "/" + std::to_string(n2) + " (allowed " + std::to_string(allowed) +
                    ") runtime=" + num(secs) + "s (<300s, workers=" + std::to_string(kExec.threads) + ")"};
}

Verdict divergence()
{
    const std::size_t steps = 400;
    const auto r = line_sweep(ChannelParams(0, 2, 0.99, 1), steps, 100000, seed_for(9), Metrics::both, kExec);
    const std::size_t i_mi = r.argmax_mi->index;
    const std::size_t i_pd = r.argmax_pd->index;
    const double a_mi = r.points[i_mi].alpha;
    const double a_pd = r.points[i_pd].alpha;
    const auto& pd_best = *r.points[i_pd].pd;
    const auto& pd_at_mi = *r.points[i_mi].pd;
    const double gap = pd_best.value - pd_at_mi.value;
    const double sigma = std::hypot(pd_best.std_error, pd_at_mi.std_error);
    const std::size_t sep = i_mi > i_pd ? i_mi - i_pd : i_pd - i_mi;

    const bool mi_top = a_mi >= 0.9;
    const bool pd_interior = a_pd > 0.05 && a_pd < 0.95;
    const bool separated = sep > 20;
    const bool gap_ok = gap > 3 * sigma;
    return {mi_top && pd_interior && separated && gap_ok,
            "alpha_mi=" + num(a_mi) + (mi_top ? "" : " (not top decile)") + " alpha_pd=" + num(a_pd) +
                (pd_interior ? "" : " (not interior)") + " separation=" + std::to_string(sep) + " steps" +
                (separated ? "" : " (<= 20)") + " Pd gap=" + num(gap) + " 3sigma=" + num(3 * sigma) +
                (gap_ok ? "" : " (gap too small)")};
}

Verdict param_scan_edges()
{
    Timer timer;
    const ScanSpec grid{{0.0, 4.75}, {0.25, 5.0}, 20};
    const std::size_t steps = 400;
    bool ok = true;
    std::string detail;
    for (const Metrics metric : {Metrics::mi, Metrics::pd}) {
        const auto rows = param_scan(grid, 0.5, 1.0, steps, 10000,
                                     seed_for(10, metric == Metrics::mi ? 0 : 1), metric, kExec);
        std::size_t best = 0;
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i].optimum.value > rows[best].optimum.value)
                best = i;
        const bool corner = rows[best].lambda0 == 0.0 && rows[best].lambda1 == 5.0;

        bool regimes_ok = true;
        double diag_max = -1.0;
        for (const auto& r : rows) {
            const bool interior = r.opt_t3 > 0.0 && r.opt_t3 < 1.0;
            if (interior && r.regime != Regime::hybrid && !r.plateau)
                regimes_ok = false;
            if (r.lambda1 - r.lambda0 <= 0.25 + 1e-9)
                diag_max = std::max(diag_max, r.optimum.value);
        }
        const bool diag_ok = metric == Metrics::pd || diag_max <= 0.02;
        ok &= corner && regimes_ok && diag_ok;
        detail += std::string(to_string(metric)) + ": max at (" + num(rows[best].lambda0) + ", " +
                  num(rows[best].lambda1) + ")" + (corner ? "" : " (not the corner)") +
                  " regimes " + (regimes_ok ? "consistent" : "inconsistent");
        if (metric == Metrics::mi)
            detail += " near-diagonal max MI=" + num(diag_max) + (diag_ok ? "" : " (> 0.02)");
        detail += "; ";
    }
    const double secs = timer.seconds();
    ok &= secs < 600.0;
    return {ok, detail + "runtime=" + num(secs) + "s (<600s)"};
}

std::string read_file(const std::filesystem::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

Verdict reproducibility()
{
    const auto dir = std::filesystem::temp_directory_path() / ("senseplan-acceptance-" + std::to_string(seed_for(11)));
    std::filesystem::create_directories(dir);
    const std::string seed = std::to_string(seed_for(11));
    const std::vector<std::vector<std::string>> commands{
        {"mi", "--lambda0", "0", "--lambda1", "2", "--p", "0.3", "--alloc", "0.5,0.5,1", "--samples", "200000"},
        {"pd", "--lambda0", "0", "--lambda1", "2", "--p", "0.3", "--alloc", "0.5,0.5,1", "--samples", "200000"},
        {"sweep-line", "--lambda0", "0", "--lambda1", "2", "--p", "0.5", "--total", "1", "--steps", "40",
         "--samples", "5000"},
        {"sweep-simplex", "--lambda0", "0", "--lambda1", "2", "--p", "0.5", "--total", "1", "--resolution", "6",
         "--samples", "5000"},
        {"scan", "--p", "0.5", "--total", "1", "--metric", "pd", "--grid-n", "4", "--steps", "20", "--samples",
         "2000"},
        {"svd-check", "--samples", "1000"}};

    int identical = 0;
    std::string mismatched;
    for (std::size_t c = 0; c < commands.size(); ++c) {
        std::vector<std::string> outputs;
        for (const char* threads : {"1", "8", "1"}) {
            auto args = commands[c];
            args.insert(args.end(), {"--seed", seed});
            if (args.front() != "svd-check")
                args.insert(args.end(), {"--threads", threads});
            const auto path = dir / (args.front() + "-" + threads + "-" + std::to_string(outputs.size()) + ".out");
            args.insert(args.end(), {"--out", path.string()});
            std::ostringstream out, err;
            if (cli::run(args, out, err) != cli::kExitOk)
                return {false, args.front() + " failed: " + err.str()};
            outputs.push_back(read_file(path));
        }
        if (!outputs[0].empty() && outputs[0] == outputs[1] && outputs[0] == outputs[2])
            ++identical;
        else
            mismatched += commands[c].front() + " ";
    }
    std::filesystem::remove_all(dir);
    return {identical == static_cast<int>(commands.size()),
            std::to_string(identical) + "/" + std::to_string(commands.size()) +
                " commands byte-identical across reruns with --threads 1 and 8" +
                (mismatched.empty() ? "" : "; differing: " + mismatched)};
}

const std::vector<std::pair<const char*, std::function<Verdict()>>> kCriteria{
    {"entropy oracle", entropy_oracle},
    {"MI saturation", saturation},
    {"zero-information cases", zero_information},
    {"symmetry under target swap", symmetry},
    {"additivity without joint time", additivity},
    {"singular values", singular_values},
    {"detection closed form", detection_oracle},
    {"concavity along the line", concavity},
    {"MI vs Pd divergence", divergence},
    {"parameter scan edges", param_scan_edges},
    {"reproducibility", reproducibility},
};

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"senseplan acceptance checks"};
    int only = 0;
    app.add_option("--criterion", only, "run a single criterion (1-11)")->check(CLI::Range(1, 11));
    CLI11_PARSE(app, argc, argv);

    int failures = 0;
    for (std::size_t i = 0; i < kCriteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (only != 0 && id != only)
            continue;
        Verdict v;
        try {
            v = kCriteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failures += !v.pass;
        std::cout << "criterion " << (id < 10 ? " " : "") << id << " [" << (v.pass ? "PASS" : "FAIL") << "] "
                  << kCriteria[i].first << ": " << v.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
