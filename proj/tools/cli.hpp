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
 * @file cli.hpp
 * @brief The senseplan command line: argument handling and file emission.
 *
 * Exit codes: 0 success, 1 runtime or numeric failure, 2 invalid arguments.
 * JSON goes to --out or stdout; CSV files start with '#' lines that echo the
 * full configuration. The worker count is never echoed, since output does
 * not depend on it.
 */
#pragma once

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "senseplan/senseplan.hpp"

namespace senseplan::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Shortest decimal text that round-trips a double.
inline std::string fmt(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct Options {
    std::optional<double> lambda0;
    std::optional<double> lambda1;
    std::optional<double> p;
    std::optional<double> total;
    std::vector<double> alloc;
    std::optional<std::uint64_t> samples;
    std::size_t steps = 400;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string out;
    std::string metric = "both";
    std::size_t resolution = 10;
    std::size_t grid_n = 20;
    std::vector<double> lambda0_range{0.0, 4.75};
    std::vector<double> lambda1_range{0.25, 5.0};
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Exec resolve_exec(const Options& o)
{
    if (o.threads)
        return {std::max(1u, *o.threads)};
    if (const char* env = std::getenv("SENSEPLAN_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1)
                return {static_cast<unsigned>(v)};
        } catch (const std::exception&) {
        }
        throw UsageError("SENSEPLAN_THREADS must be a positive integer");
    }
    return Exec::hardware();
}

template <class T>
T require(const std::optional<T>& v, const char* flag)
{
    if (!v)
        throw UsageError(std::string("missing required flag ") + flag);
    return *v;
}

inline Metrics parse_metric(const std::string& s)
{
    if (s == "mi")
        return Metrics::mi;
    if (s == "pd")
        return Metrics::pd;
    if (s == "both")
        return Metrics::both;
    throw UsageError("--metric must be mi, pd or both");
}

inline ChannelParams params_from(const Options& o, double total)
{
    return ChannelParams(require(o.lambda0, "--lambda0"), require(o.lambda1, "--lambda1"), require(o.p, "--p"), total);
}

/// Allocation from --alloc; the budget is --total when given, else the allocation's sum.
inline std::pair<ChannelParams, Allocation> instance_from(const Options& o)
{
    if (o.alloc.size() != 3)
        throw UsageError("--alloc takes exactly three values t1,t2,t3");
    const Allocation a{o.alloc[0], o.alloc[1], o.alloc[2]};
    require_nonnegative(a);
    const ChannelParams params = params_from(o, o.total.value_or(a.total()));
    validate_allocation(a, params);
    return {params, a};
}

inline nlohmann::ordered_json params_json(const ChannelParams& p)
{
    nlohmann::ordered_json j;
    j["lambda0"] = p.lambda0();
    j["lambda1"] = p.lambda1();
    j["p"] = p.prior_p();
    j["total"] = p.total_time();
    return j;
}

inline nlohmann::ordered_json estimate_config(const char* command, const ChannelParams& params, const Allocation& a,
                                              std::uint64_t samples, std::uint64_t seed)
{
    nlohmann::ordered_json c;
    c["command"] = command;
    c["version"] = SENSEPLAN_VERSION;
    c.update(params_json(params));
    c["alloc"] = {a.t1, a.t2, a.t3};
    c["samples"] = samples;
    c["seed"] = seed;
    return c;
}

/// Writes text to --out, or to `out` when no path was given.
inline void emit(const Options& o, const std::string& text, std::ostream& out)
{
    if (o.out.empty()) {
        out << text;
        return;
    }
    std::ofstream f(o.out, std::ios::binary | std::ios::trunc);
    if (!f)
        throw std::runtime_error("cannot open output file " + o.out);
    f << text;
    f.close();
    if (!f)
        throw std::runtime_error("failed writing output file " + o.out);
}

inline std::string cmd_mi(const Options& o, Exec exec)
{
    const auto [params, a] = instance_from(o);
    const std::uint64_t n = o.samples.value_or(kDefaultSamples);
    const std::uint64_t seed = require(o.seed, "--seed");
    const MiResult r = mutual_information_vector(params, a, n, seed, exec);
    nlohmann::ordered_json j;
    j["mi_bits"] = r.mi_bits.value;
    j["std_error"] = r.mi_bits.std_error;
    j["h_y"] = r.h_y_bits.value;
    j["h_y_given_x"] = r.h_y_given_x_bits;
    j["config"] = estimate_config("mi", params, a, n, seed);
    return j.dump(2) + "\n";
}

inline std::string cmd_pd(const Options& o, Exec exec)
{
    const auto [params, a] = instance_from(o);
    const std::uint64_t n = o.samples.value_or(kDefaultSamples);
    const std::uint64_t seed = require(o.seed, "--seed");
    const PdResult r = pd_mc(params, a, n, seed, exec);
    nlohmann::ordered_json j;
    j["pd"] = r.pd.value;
    j["std_error"] = r.pd.std_error;
    j["bayes_risk"] = r.bayes_risk;
    j["confusion"] = r.confusion.counts;
    j["config"] = estimate_config("pd", params, a, n, seed);
    return j.dump(2) + "\n";
}

inline std::string config_line(const std::vector<std::pair<std::string, std::string>>& kv)
{
    std::string s = "#";
    for (const auto& [k, v] : kv)
        s += v.empty() ? " " + k : " " + k + "=" + v;
    return s + "\n";
}

inline std::string argmax_line(const char* name, const std::optional<Argmax>& a, const SweepResult& r)
{
    if (!a)
        return {};
    const SweepPoint& pt = r.points[a->index];
    return config_line({{name, ""},
                        {"index", std::to_string(a->index)},
                        {"t1", fmt(pt.alloc.t1)},
                        {"t2", fmt(pt.alloc.t2)},
                        {"t3", fmt(pt.alloc.t3)},
                        {"plateau", a->plateau ? "true" : "false"}});
}

inline std::string opt_cell(const std::optional<McEstimate>& e, bool se)
{
    if (!e)
        return "";
    return fmt(se ? e->std_error : e->value);
}

inline std::string sweep_header(const char* command, const ChannelParams& params, const Options& o,
                                std::uint64_t samples, std::uint64_t seed,
                                std::vector<std::pair<std::string, std::string>> extra)
{
    std::vector<std::pair<std::string, std::string>> kv{{"command", command},
                                                        {"lambda0", fmt(params.lambda0())},
                                                        {"lambda1", fmt(params.lambda1())},
                                                        {"p", fmt(params.prior_p())},
                                                        {"total", fmt(params.total_time())}};
    for (auto& e : extra)
        kv.push_back(std::move(e));
    kv.push_back({"samples", std::to_string(samples)});
    kv.push_back({"seed", std::to_string(seed)});
    kv.push_back({"metric", o.metric});
    return std::string("# senseplan ") + SENSEPLAN_VERSION + "\n" + config_line(kv);
}

inline std::string cmd_sweep_line(const Options& o, Exec exec)
{
    const ChannelParams params = params_from(o, require(o.total, "--total"));
    const Metrics metrics = parse_metric(o.metric);
    const std::uint64_t n = o.samples.value_or(kDefaultSweepSamples);
    const std::uint64_t seed = require(o.seed, "--seed");
    const SweepResult r = line_sweep(params, o.steps, n, seed, metrics, exec);

    std::string s = sweep_header("sweep-line", params, o, n, seed, {{"steps", std::to_string(o.steps)}});
    s += argmax_line("argmax_mi", r.argmax_mi, r);
    s += argmax_line("argmax_pd", r.argmax_pd, r);
    if (r.argmax_mi)
        s += config_line({{"regime_mi", std::string(to_string(classify_line_point(r.argmax_mi->index, o.steps)))}});
    if (r.argmax_pd)
        s += config_line({{"regime_pd", std::string(to_string(classify_line_point(r.argmax_pd->index, o.steps)))}});
    if (auto gap = r.alpha_gap())
        s += config_line({{"alpha_gap", fmt(*gap)}});
    s += "alpha,t1,t2,t3,mi_bits,mi_se,pd,pd_se\n";
    for (const auto& p : r.points)
        s += fmt(p.alpha) + "," + fmt(p.alloc.t1) + "," + fmt(p.alloc.t2) + "," + fmt(p.alloc.t3) + "," +
             opt_cell(p.mi, false) + "," + opt_cell(p.mi, true) + "," + opt_cell(p.pd, false) + "," +
             opt_cell(p.pd, true) + "\n";
    return s;
}

inline std::string cmd_sweep_simplex(const Options& o, Exec exec)
{
    const ChannelParams params = params_from(o, require(o.total, "--total"));
    const Metrics metrics = parse_metric(o.metric);
    const std::uint64_t n = o.samples.value_or(kDefaultSweepSamples);
    const std::uint64_t seed = require(o.seed, "--seed");
    const SweepResult r = simplex_sweep(params, o.resolution, n, seed, metrics, exec);

    std::string s =
        sweep_header("sweep-simplex", params, o, n, seed, {{"resolution", std::to_string(o.resolution)}});
    s += argmax_line("argmax_mi", r.argmax_mi, r);
    s += argmax_line("argmax_pd", r.argmax_pd, r);
    s += "t1,t2,t3,mi_bits,mi_se,pd,pd_se\n";
    for (const auto& p : r.points)
        s += fmt(p.alloc.t1) + "," + fmt(p.alloc.t2) + "," + fmt(p.alloc.t3) + "," + opt_cell(p.mi, false) + "," +
             opt_cell(p.mi, true) + "," + opt_cell(p.pd, false) + "," + opt_cell(p.pd, true) + "\n";
    return s;
}

inline Range range_from(const std::vector<double>& v, const char* flag)
{
    if (v.size() != 2)
        throw UsageError(std::string(flag) + " takes two values lo,hi");
    return {v[0], v[1]};
}

inline std::string cmd_scan(const Options& o, Exec exec)
{
    const Metrics metric = parse_metric(o.metric);
    if (metric == Metrics::both)
        throw UsageError("scan needs --metric mi or --metric pd");
    const double p = require(o.p, "--p");
    const double total = require(o.total, "--total");
    const std::uint64_t n = o.samples.value_or(kDefaultSweepSamples);
    const std::uint64_t seed = require(o.seed, "--seed");
    const ScanSpec grid{range_from(o.lambda0_range, "--lambda0-range"), range_from(o.lambda1_range, "--lambda1-range"),
                        o.grid_n};
    const auto rows = param_scan(grid, p, total, o.steps, n, seed, metric, exec);

    std::string s = std::string("# senseplan ") + SENSEPLAN_VERSION + "\n";
    s += config_line({{"command", "scan"},
                      {"lambda0_range", fmt(grid.lambda0_range.lo) + ":" + fmt(grid.lambda0_range.hi)},
                      {"lambda1_range", fmt(grid.lambda1_range.lo) + ":" + fmt(grid.lambda1_range.hi)},
                      {"grid_n", std::to_string(grid.grid_n)},
                      {"p", fmt(p)},
                      {"total", fmt(total)},
                      {"steps", std::to_string(o.steps)},
                      {"samples", std::to_string(n)},
                      {"seed", std::to_string(seed)},
                      {"metric", o.metric}});
    std::string plateau;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].plateau)
            plateau += (plateau.empty() ? "" : ",") + std::to_string(i);
    s += config_line({{"plateau_rows", plateau.empty() ? "none" : plateau}});
    s += "lambda0,lambda1,opt_value,opt_se,opt_t3,regime\n";
    for (const auto& r : rows)
        s += fmt(r.lambda0) + "," + fmt(r.lambda1) + "," + fmt(r.optimum.value) + "," + fmt(r.optimum.std_error) +
             "," + fmt(r.opt_t3) + "," + std::string(to_string(r.regime)) + "\n";
    return s;
}

inline std::string cmd_svd_check(const Options& o)
{
    const std::uint64_t n = o.samples.value_or(10'000);
    if (n == 0)
        throw UsageError("--samples must be at least 1");
    const double max_total = o.total.value_or(100.0);
    const std::uint64_t seed = require(o.seed, "--seed");
    const SpectrumAudit audit = audit_singular_values(n, max_total, seed);
    const LineSpectrumFit fit = fit_line_spectrum(max_total, o.steps);

    nlohmann::ordered_json j;
    j["max_abs_error"] = audit.max_abs_error;
    j["max_frobenius_error"] = audit.max_frobenius_error;
    j["line_fit_residual"] = fit.max_residual;
    j["line_fit_slopes"] = fit.slope;
    nlohmann::ordered_json c;
    c["command"] = "svd-check";
    c["version"] = SENSEPLAN_VERSION;
    c["samples"] = n;
    c["total"] = max_total;
    c["steps"] = o.steps;
    c["seed"] = seed;
    j["config"] = c;
    return j.dump(2) + "\n";
}

/**
 * Entry point shared by the executable and the tests. args excludes the
 * program name.
 */
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"senseplan: time allocation for two-target sensing on a vector Gaussian channel"};
    app.require_subcommand(1);
    app.set_version_flag("--version", SENSEPLAN_VERSION);
    Options o;

    auto add_channel = [&](CLI::App* s) {
        s->add_option("--lambda0", o.lambda0, "low input level");
        s->add_option("--lambda1", o.lambda1, "high input level");
        s->add_option("--p", o.p, "probability that a target is at lambda1");
    };
    auto add_common = [&](CLI::App* s) {
        s->add_option("--seed", o.seed, "master seed (required)");
        s->add_option("--samples", o.samples, "Monte Carlo samples per estimate");
        s->add_option("--threads", o.threads, "worker threads (env SENSEPLAN_THREADS)");
        s->add_option("--out", o.out, "output file (default stdout)");
    };

    auto* mi = app.add_subcommand("mi", "mutual information at one allocation (JSON)");
    auto* pd = app.add_subcommand("pd", "MAP probability of total correct detection at one allocation (JSON)");
    for (auto* s : {mi, pd}) {
        add_channel(s);
        add_common(s);
        s->add_option("--alloc", o.alloc, "t1,t2,t3")->delimiter(',')->expected(3);
        s->add_option("--total", o.total, "budget T; checked against the allocation");
    }

    auto* line = app.add_subcommand("sweep-line", "sweep ((T-a)/2, (T-a)/2, a) for a in [0, T] (CSV)");
    auto* simplex = app.add_subcommand("sweep-simplex", "sweep the time simplex lattice (CSV)");
    for (auto* s : {line, simplex}) {
        add_channel(s);
        add_common(s);
        s->add_option("--total", o.total, "budget T");
        s->add_option("--metric", o.metric, "mi, pd or both");
    }
    line->add_option("--steps", o.steps, "grid points including both ends");
    simplex->add_option("--resolution", o.resolution, "lattice subdivisions per edge");

    auto* scan = app.add_subcommand("scan", "optimum over the line for every (lambda0, lambda1) cell (CSV)");
    add_common(scan);
    scan->add_option("--p", o.p, "probability that a target is at lambda1");
    scan->add_option("--total", o.total, "budget T");
    scan->add_option("--steps", o.steps, "line points per cell");
    scan->add_option("--metric", o.metric, "mi or pd");
    scan->add_option("--grid-n", o.grid_n, "grid points per axis");
    scan->add_option("--lambda0-range", o.lambda0_range, "lo,hi")->delimiter(',')->expected(2);
    scan->add_option("--lambda1-range", o.lambda1_range, "lo,hi")->delimiter(',')->expected(2);

    auto* svd = app.add_subcommand("svd-check", "compare singular value routes on random allocations (JSON)");
    svd->add_option("--samples", o.samples, "random allocations");
    svd->add_option("--total", o.total, "largest budget drawn");
    svd->add_option("--steps", o.steps, "points of the line fit");
    svd->add_option("--seed", o.seed, "seed (required)");
    svd->add_option("--out", o.out, "output file (default stdout)");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << SENSEPLAN_VERSION << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    std::string text;
    try {
        if (svd->parsed()) {
            text = cmd_svd_check(o);
        } else {
            const Exec exec = resolve_exec(o);
            if (mi->parsed())
                text = cmd_mi(o, exec);
            else if (pd->parsed())
                text = cmd_pd(o, exec);
            else if (line->parsed())
                text = cmd_sweep_line(o, exec);
            else if (simplex->parsed())
                text = cmd_sweep_simplex(o, exec);
            else
                text = cmd_scan(o, exec);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }

    try {
        emit(o, text, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace senseplan::cli
