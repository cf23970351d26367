#pragma once

// Command implementations behind the hfp-bench tool: validate, run, compare
// and sweep. Every command returns a process exit code:
//   0 success, 1 semantic violation, 2 parse error, 3 budget stop,
//   4 numeric failure.

#include "hfp/core.hpp"
#include "hfp/operators.hpp"
#include "hfp/problem_file.hpp"
#include "hfp/schedules.hpp"
#include "hfp/solver.hpp"
#include "hfp/text.hpp"
#include "hfp/trace_csv.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace hfp::bench {

namespace exit_code {
inline constexpr int kSuccess = 0;
inline constexpr int kViolation = 1;
inline constexpr int kParseError = 2;
inline constexpr int kBudgetStop = 3;
inline constexpr int kNumericFailure = 4;
} // namespace exit_code

/// Sample count and seed offset used when certifying declared metadata.
inline constexpr std::size_t kCertifySamples = 1000;
/// Largest power checked by the nearly-nonexpansive certifier during validation.
inline constexpr std::size_t kCertifyPowerMax = 8;
/// Horizon of the power-regularity check.
inline constexpr std::size_t kRegularityHorizon = 10'000;

struct Options {
    std::vector<std::string> overrides;
    std::optional<std::string> trace_out;
    std::optional<std::size_t> max_iters;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

struct Loaded {
    config::ProblemConfig config;
    std::optional<ProblemSpec> spec;
};

namespace detail {

inline std::vector<std::string> effective_overrides(const Options& opts) {
    std::vector<std::string> all = opts.overrides;
    if (opts.max_iters) all.push_back("stop.max_iters=" + std::to_string(*opts.max_iters));
    if (opts.seed) all.push_back("problem.seed=" + std::to_string(*opts.seed));
    return all;
}

/// Parses and builds; on failure prints the error and sets `code`.
inline std::optional<Loaded> load(const std::string& path, const Options& opts, std::ostream& err, int& code,
                                  bool force_full_power = false) {
    Loaded loaded;
    try {
        loaded.config = config::load_config(path, effective_overrides(opts));
    } catch (const config::ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        code = exit_code::kParseError;
        return std::nullopt;
    }
    try {
        auto cfg = loaded.config;
        if (force_full_power) cfg.variant = "full_power";
        loaded.spec.emplace(config::build_problem(cfg));
    } catch (const std::exception& e) {
        err << "violation: " << e.what() << "\n";
        code = exit_code::kViolation;
        return std::nullopt;
    }
    return loaded;
}

inline std::string vector_text(const Vector& v) {
    std::string out;
    for (Index i = 0; i < v.size(); ++i) {
        if (i > 0) out += ", ";
        out += text::format_double(v[i]);
    }
    return out;
}

inline void certify_into(ValidationResult& out, const std::string& what, const Certificate& cert) {
    if (cert.passed) return;
    std::ostringstream msg;
    msg << what << " not certified: worst margin " << cert.worst_margin << " over " << cert.samples_used
        << " samples (seed " << cert.seed << ")";
    if (cert.witness) msg << ", witness (" << vector_text(cert.witness->first) << ") / (" << vector_text(cert.witness->second) << ")";
    out.violations.push_back(msg.str());
}

inline std::vector<Vector> regularity_probes(const ProblemSpec& p) {
    std::vector<Vector> probes;
    if (contains(p.T.domain(), p.x1)) probes.push_back(p.x1);
    Rng rng(p.seed);
    for (int i = 0; i < 2; ++i) probes.push_back(sample_point(p.T.domain(), rng));
    return probes;
}

} // namespace detail

/// validate_problem plus sampled certification of every declared constant,
/// and (FullPower mode) the power-regularity trend check as a warning.
inline ValidationResult check_problem(const ProblemSpec& p) {
    ValidationResult out = validate_problem(p);
    const std::uint64_t seed = p.seed;
    auto guarded = [&](const std::string& what, auto&& fn) {
        try {
            detail::certify_into(out, what, fn());
        } catch (const std::exception& e) {
            out.warnings.push_back(what + " could not be certified: " + e.what());
        }
    };
    const auto& fm = p.F.meta();
    if (fm.lipschitz) {
        guarded("F Lipschitz constant L = " + text::format_double(*fm.lipschitz),
                [&] { return certify_lipschitz(p.F, *fm.lipschitz, kCertifySamples, seed); });
    }
    if (fm.strong_monotone) {
        guarded("F strong monotonicity eta = " + text::format_double(*fm.strong_monotone),
                [&] { return certify_strong_monotone(p.F, *fm.strong_monotone, kCertifySamples, seed); });
    }
    if (p.rho != 0.0 && p.V.meta().lipschitz) {
        guarded("V Lipschitz constant gamma = " + text::format_double(*p.V.meta().lipschitz),
                [&] { return certify_lipschitz(p.V, *p.V.meta().lipschitz, kCertifySamples, seed); });
    }
    guarded("S nonexpansiveness", [&] { return certify_lipschitz(p.S, 1.0, kCertifySamples, seed); });
    if (auto seq = nearness_of(p); seq && p.T.maps_into_domain()) {
        guarded("T near-nonexpansiveness",
                [&] { return certify_nearly_nonexpansive(p.T, *seq, kCertifyPowerMax, kCertifySamples, seed); });
    }
    if (std::holds_alternative<FullPower>(p.mode) && p.T.maps_into_domain()) {
        try {
            const auto reg = check_power_regularity(p.T, p.schedule, detail::regularity_probes(p), kRegularityHorizon);
            if (!reg.passed) {
                for (const auto& pr : reg.probes) {
                    if (pr.difference.passed && pr.relative.passed) continue;
                    std::ostringstream msg;
                    msg << "condition (iii) power regularity fails at probe (" << detail::vector_text(pr.probe)
                        << "): ||T^n x - T^(n-1) x|| = " << pr.difference.at_horizon()
                        << " and its ratio to alpha_n = " << pr.relative.at_horizon() << " at n = "
                        << pr.difference.at[2];
                    out.warnings.push_back(msg.str());
                    break;
                }
            }
        } catch (const std::exception& e) {
            out.warnings.push_back(std::string("power regularity could not be checked: ") + e.what());
        }
    }
    return out;
}

inline void print_validation(const ValidationResult& v, std::ostream& out) {
    for (const auto& w : v.warnings) out << "warning: " << w << "\n";
    for (const auto& msg : v.violations) out << "violation: " << msg << "\n";
}

inline int cmd_validate(const std::string& path, const Options& opts, std::ostream& out, std::ostream& err) {
    int code = exit_code::kSuccess;
    auto loaded = detail::load(path, opts, err, code);
    if (!loaded) return code;
    const auto result = check_problem(*loaded->spec);
    print_validation(result, result.valid() ? out : err);
    if (!result.valid()) return exit_code::kViolation;
    if (!opts.quiet) out << "valid\n";
    return exit_code::kSuccess;
}

inline StopRule stop_rule(const config::ProblemConfig& c) { return c.stop; }

namespace detail {

inline std::string opt_text(const std::optional<double>& v) { return v ? text::format_double(*v) : "-"; }

inline void print_summary(std::ostream& out, const SolveReport& r) {
    out << "stop_reason: " << to_string(r.reason) << "\n"
        << "iterations: " << r.iterations << "\n"
        << "final_point: " << vector_text(r.x) << "\n";
    if (r.last) {
        out << "step_norm: " << text::format_double(r.last->step_norm) << "\n"
            << "fix_residual: " << text::format_double(r.last->fix_residual) << "\n"
            << "vi_residual: " << opt_text(r.last->vi_residual) << "\n"
            << "dist_to_reference: " << opt_text(r.last->dist_to_reference) << "\n";
    }
}

struct RunOutcome {
    std::optional<SolveReport> report;
    std::string error;
};

inline RunOutcome run_one(const ProblemSpec& p, const config::ProblemConfig& c,
                          const std::optional<std::string>& trace_path) {
    RunOutcome outcome;
    try {
        std::unique_ptr<TraceWriter> writer;
        if (trace_path) writer = std::make_unique<TraceWriter>(*trace_path);
        SolveOptions so;
        so.timing = c.timing;
        if (writer) so.on_row = [&writer](const TraceRow& row) { writer->write(row); };
        outcome.report = solve(p, stop_rule(c), so);
    } catch (const std::exception& e) {
        outcome.error = e.what();
    }
    return outcome;
}

inline std::string with_suffix(const std::string& path, const std::string& suffix) {
    const std::filesystem::path p(path);
    std::filesystem::path out = p.parent_path() / (p.stem().string() + "." + suffix + p.extension().string());
    return out.string();
}

} // namespace detail

inline int cmd_run(const std::string& path, const Options& opts, std::ostream& out, std::ostream& err) {
    int code = exit_code::kSuccess;
    auto loaded = detail::load(path, opts, err, code);
    if (!loaded) return code;
    const ProblemSpec& p = *loaded->spec;
    const auto validation = check_problem(p);
    print_validation(validation, err);
    if (!validation.valid()) return exit_code::kViolation;

    const auto trace_path = opts.trace_out ? opts.trace_out : loaded->config.trace;
    auto outcome = detail::run_one(p, loaded->config, trace_path);
    if (!outcome.report) {
        err << "numeric failure: " << outcome.error << "\n";
        return exit_code::kNumericFailure;
    }
    if (!opts.quiet) detail::print_summary(out, *outcome.report);
    return outcome.report->tolerance_met() ? exit_code::kSuccess : exit_code::kBudgetStop;
}

inline int cmd_compare(const std::string& path, const std::vector<std::string>& variants, const Options& opts,
                       std::ostream& out, std::ostream& err) {
    int code = exit_code::kSuccess;
    if (variants.empty()) {
        err << "compare: no variants given\n";
        return exit_code::kViolation;
    }
    auto loaded = detail::load(path, opts, err, code, true);
    if (!loaded) return code;
    const ProblemSpec& base = *loaded->spec;

    std::vector<std::pair<std::string, ProblemSpec>> runs;
    for (const auto& name : variants) {
        const auto method = parse_method(name);
        if (!method) {
            err << "variant '" << name << "' is unknown\n";
            return exit_code::kViolation;
        }
        try {
            runs.emplace_back(name, reduce_variant(base, *method));
        } catch (const UsageError& e) {
            err << "variant '" << name << "' is not applicable: " << e.what() << "\n";
            return exit_code::kViolation;
        }
        const auto v = validate_problem(runs.back().second);
        if (!v.valid()) {
            err << "variant '" << name << "' is not applicable:\n";
            print_validation(v, err);
            return exit_code::kViolation;
        }
    }
    const auto base_check = check_problem(base);
    print_validation(base_check, err);
    if (!base_check.valid()) return exit_code::kViolation;

    std::string trace_base = opts.trace_out  ? *opts.trace_out
                             : loaded->config.trace ? *loaded->config.trace
                                                    : std::filesystem::path(path).stem().string() + ".csv";

    struct Row {
        std::string variant, iterations, stop, step, fix, vi, dist;
    };
    std::vector<Row> table;
    int result = exit_code::kSuccess;
    for (const auto& [name, spec] : runs) {
        auto outcome = detail::run_one(spec, loaded->config, detail::with_suffix(trace_base, name));
        if (!outcome.report) {
            err << "variant '" << name << "' numeric failure: " << outcome.error << "\n";
            table.push_back({name, "-", "numeric_error", "-", "-", "-", "-"});
            result = exit_code::kNumericFailure;
            continue;
        }
        const auto& r = *outcome.report;
        if (!r.tolerance_met() && result == exit_code::kSuccess) result = exit_code::kBudgetStop;
        table.push_back({name, std::to_string(r.iterations), std::string(to_string(r.reason)),
                         text::format_double(r.last->step_norm), text::format_double(r.last->fix_residual),
                         detail::opt_text(r.last->vi_residual), detail::opt_text(r.last->dist_to_reference)});
    }

    if (!opts.quiet) {
        const std::vector<std::string> header = {"variant", "iterations", "stop", "step_norm",
                                                 "fix_residual", "vi_residual", "dist_to_reference"};
        std::vector<std::size_t> width(header.size());
        for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
        auto cells = [](const Row& r) {
            return std::vector<std::string>{r.variant, r.iterations, r.stop, r.step, r.fix, r.vi, r.dist};
        };
        for (const auto& r : table) {
            const auto c = cells(r);
            for (std::size_t i = 0; i < c.size(); ++i) width[i] = std::max(width[i], c[i].size());
        }
        auto print = [&](const std::vector<std::string>& c) {
            for (std::size_t i = 0; i < c.size(); ++i) {
                out << std::left << std::setw(static_cast<int>(width[i])) << c[i];
                out << (i + 1 < c.size() ? "  " : "\n");
            }
        };
        print(header);
        for (const auto& r : table) print(cells(r));
    }
    return result;
}

struct SweepGrid {
    std::vector<double> p;
    std::vector<double> q;            ///< used when q_offset is empty
    std::optional<double> q_offset;   ///< q = p + offset
};

inline int cmd_sweep(const std::string& path, const SweepGrid& grid, const std::string& out_path, const Options& opts,
                     std::ostream& out, std::ostream& err) {
    int code = exit_code::kSuccess;
    config::ProblemConfig base_cfg;
    try {
        base_cfg = config::load_config(path, detail::effective_overrides(opts));
    } catch (const config::ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return exit_code::kParseError;
    }

    std::vector<std::pair<double, double>> points;
    for (double p : grid.p) {
        if (grid.q_offset) {
            points.emplace_back(p, p + *grid.q_offset);
        } else {
            for (double q : grid.q) points.emplace_back(p, q);
        }
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    if (points.empty()) {
        err << "sweep: empty grid\n";
        return exit_code::kViolation;
    }

    std::ofstream csv(out_path, std::ios::binary | std::ios::trunc);
    if (!csv) {
        err << "cannot open sweep output '" << out_path << "'\n";
        return exit_code::kViolation;
    }
    csv << "p,q,status,iterations_to_tol,final_residual\n";
    std::size_t admissible = 0;
    bool numeric_failure = false;
    for (const auto& [p, q] : points) {
        csv << text::format_double(p) << ',' << text::format_double(q) << ',';
        auto cfg = base_cfg;
        cfg.schedule.p = p;
        cfg.schedule.q = q;
        std::optional<ProblemSpec> spec;
        std::string rejection;
        try {
            spec.emplace(config::build_problem(cfg));
            const auto v = validate_problem(*spec);
            if (!v.valid()) {
                const auto nearly = nearness_of(*spec).value_or(NearnessSequence::zero());
                const auto report = validate_schedule(spec->schedule, nearly, spec->schedule_horizon);
                std::string names;
                for (const auto& f : report.failures()) names += (names.empty() ? "" : " and ") + f;
                rejection = names.empty() ? v.violations.front() : names + " fails";
            }
        } catch (const std::exception& e) {
            rejection = e.what();
        }
        if (!rejection.empty()) {
            std::replace(rejection.begin(), rejection.end(), ',', ';');
            csv << "rejected: " << rejection << ",,\n";
            continue;
        }
        ++admissible;
        auto outcome = detail::run_one(*spec, cfg, std::nullopt);
        if (!outcome.report) {
            numeric_failure = true;
            csv << "numeric_error,,\n";
            continue;
        }
        const auto& r = *outcome.report;
        csv << (r.tolerance_met() ? "converged" : "budget") << ',' << r.iterations << ','
            << text::format_double(r.last->fix_residual) << '\n';
    }
    csv.flush();
    if (admissible == 0) {
        err << "sweep: no admissible grid point\n";
        return exit_code::kViolation;
    }
    if (!opts.quiet) out << "wrote " << points.size() << " rows to " << out_path << "\n";
    return numeric_failure ? exit_code::kNumericFailure : code;
}

inline std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    for (auto part : text::split(s, ',')) {
        auto v = text::parse_double(part);
        if (!v) throw CLI::ValidationError("expected a comma-separated list of numbers, got '" + s + "'");
        out.push_back(*v);
    }
    return out;
}

/// Entry point of the hfp-bench tool.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hierarchical fixed point solver benchmark"};
    app.require_subcommand(1);

    Options opts;
    auto add_common = [&opts](CLI::App* sub) {
        sub->add_option("--set", opts.overrides, "Override section.key=value (repeatable)");
        sub->add_option("--trace-out", opts.trace_out, "Trace CSV path");
        sub->add_option("--max-iters", opts.max_iters, "Iteration budget");
        sub->add_option("--seed", opts.seed, "Seed for sampling");
        sub->add_flag("--quiet", opts.quiet, "Suppress the summary");
    };

    std::string problem;
    auto* validate = app.add_subcommand("validate", "Check a problem file");
    validate->add_option("problem", problem, "Problem file")->required();
    add_common(validate);

    auto* run = app.add_subcommand("run", "Solve a problem and write its trace");
    run->add_option("problem", problem, "Problem file")->required();
    add_common(run);

    std::vector<std::string> variants;
    auto* compare = app.add_subcommand("compare", "Solve under several method variants");
    compare->add_option("problem", problem, "Problem file")->required();
    compare->add_option("variants", variants, "full_power, wang_xu, ceng, marino_xu, sahu")->required();
    add_common(compare);

    std::string p_list, q_list, sweep_out;
    std::optional<double> q_offset;
    auto* sweep = app.add_subcommand("sweep", "Grid over schedule exponents p, q");
    sweep->add_option("problem", problem, "Problem file")->required();
    sweep->add_option("--p", p_list, "Comma-separated alpha exponents")->required();
    sweep->add_option("--q", q_list, "Comma-separated beta exponents");
    sweep->add_option("--q-offset", q_offset, "Use q = p + offset");
    sweep->add_option("--out", sweep_out, "Output CSV path");
    add_common(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_code::kSuccess;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return exit_code::kParseError;
    }

    if (validate->parsed()) return cmd_validate(problem, opts, out, err);
    if (run->parsed()) return cmd_run(problem, opts, out, err);
    if (compare->parsed()) return cmd_compare(problem, variants, opts, out, err);

    SweepGrid grid;
    try {
        grid.p = parse_list(p_list);
        if (!q_list.empty()) grid.q = parse_list(q_list);
    } catch (const CLI::ValidationError& e) {
        err << e.what() << "\n";
        return exit_code::kParseError;
    }
    grid.q_offset = q_offset;
    if (!grid.q_offset && grid.q.empty()) {
        err << "sweep: give --q or --q-offset\n";
        return exit_code::kParseError;
    }
    if (sweep_out.empty()) sweep_out = std::filesystem::path(problem).stem().string() + ".sweep.csv";
    return cmd_sweep(problem, grid, sweep_out, opts, out, err);
}

} // namespace hfp::bench
