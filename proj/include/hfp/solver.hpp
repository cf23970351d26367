#pragma once

// Modified iterative projection method for hierarchical fixed point
// problems of nearly nonexpansive mappings:
//
//   y_n     = beta_n S x_n + (1 - beta_n) x_n
//   x_{n+1} = P_C[ alpha_n rho V x_n + (I - alpha_n mu F) T^n y_n ],  n >= 1
//
// and the classical special cases obtained by replacing T^n with T (Wang-Xu,
// Ceng et al., Marino-Xu) or with a member T_n of a mapping sequence (Sahu et al.).

#include "hfp/core.hpp"
#include "hfp/geometry.hpp"
#include "hfp/operators.hpp"
#include "hfp/schedules.hpp"
#include "hfp/fixtures.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace hfp {

/// Apply T^n at iteration n.
struct FullPower {};
/// Apply T once per iteration.
struct SinglePower {};
/// Apply the n-th member T_n of a sequence of nearly nonexpansive mappings.
struct MappingSequence {
    std::function<Mapping(std::size_t)> at;
    NearnessSequence nearly;

    static MappingSequence constant(Mapping T) {
        NearnessSequence seq = T.meta().nearly.value_or(NearnessSequence::zero());
        return {[T = std::move(T)](std::size_t) { return T; }, std::move(seq)};
    }
};

using PowerMode = std::variant<FullPower, SinglePower, MappingSequence>;

struct Singleton {
    Vector point;
};
struct ConvexSubset {
    ConvexSet set;
};
struct SampledPoints {
    std::vector<Vector> points;
};

/// Known description of Fix(T), used for VI residuals.
using FixSetDescriptor = std::variant<Singleton, ConvexSubset, SampledPoints>;

/// Maximum distance ||T p - p|| tolerated for a declared fixed point.
inline constexpr double kFixedPointTol = 1e-6;
/// Number of seeded samples drawn from a ConvexSubset fixed-point set.
inline constexpr std::size_t kFixSetSamples = 64;

struct ProblemSpec {
    ConvexSet C;
    Mapping T;
    Mapping S;
    Mapping V;
    Mapping F;
    double rho = 0.0;
    double mu = 1.0;
    Schedule schedule;
    PowerMode mode = FullPower{};
    Vector x1;
    std::optional<FixSetDescriptor> fix_set;
    /// Known solution, when available; enables the distance column of the trace.
    std::optional<Vector> reference;
    std::uint64_t seed = 0;
    /// Upper bound on n * max_iters for FullPower runs without a closed-form power.
    std::size_t power_budget = 100'000'000;
    /// Horizon used when validating the schedule.
    std::size_t schedule_horizon = 1'000'000;
};

enum class Method { FullPower, WangXu, Ceng, MarinoXu, Sahu };

inline constexpr std::string_view method_name(Method m) {
    switch (m) {
        case Method::FullPower: return "full_power";
        case Method::WangXu: return "wang_xu";
        case Method::Ceng: return "ceng";
        case Method::MarinoXu: return "marino_xu";
        case Method::Sahu: return "sahu";
    }
    return "?";
}

inline std::optional<Method> parse_method(std::string_view name) {
    for (Method m : {Method::FullPower, Method::WangXu, Method::Ceng, Method::MarinoXu, Method::Sahu}) {
        if (method_name(m) == name) return m;
    }
    return std::nullopt;
}

struct ValidationResult {
    std::vector<std::string> violations;
    std::vector<std::string> warnings;
    bool valid() const { return violations.empty(); }
};

/// The {a_n} sequence governing the run: the mapping sequence's in
/// MappingSequence mode, otherwise T's declared one.
inline std::optional<NearnessSequence> nearness_of(const ProblemSpec& p) {
    if (const auto* seq = std::get_if<MappingSequence>(&p.mode)) return seq->nearly;
    return p.T.meta().nearly;
}

/// Probe points of the fixed-point set (vertices and seeded samples for a
/// ConvexSubset).
inline std::vector<Vector> fix_set_probes(const FixSetDescriptor& fix, std::uint64_t seed) {
    return std::visit(
        [seed](const auto& f) -> std::vector<Vector> {
            using K = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<K, Singleton>) {
                return {f.point};
            } else if constexpr (std::is_same_v<K, SampledPoints>) {
                return f.points;
            } else {
                std::vector<Vector> out = box_vertices(f.set);
                Rng rng(seed);
                for (std::size_t i = 0; i < kFixSetSamples; ++i) out.push_back(sample_point(f.set, rng));
                return out;
            }
        },
        fix);
}

inline ValidationResult validate_problem(const ProblemSpec& p) {
    ValidationResult out;
    auto violation = [&out](auto&&... parts) {
        std::ostringstream msg;
        (msg << ... << parts);
        out.violations.push_back(msg.str());
    };

    const Index d = p.C.dim();
    const std::pair<const char*, const Mapping*> maps[] = {{"T", &p.T}, {"S", &p.S}, {"V", &p.V}, {"F", &p.F}};
    bool dims_ok = p.x1.size() == d;
    for (const auto& [label, m] : maps) {
        if (m->dim() != d) {
            violation(label, " (", m->name(), ") has dimension ", m->dim(), ", set C has dimension ", d);
            dims_ok = false;
        }
    }
    if (p.x1.size() != d) violation("initial point has dimension ", p.x1.size(), ", expected ", d);
    if (p.reference && p.reference->size() != d) violation("reference point has wrong dimension");

    if (!p.T.maps_into_domain()) violation("T (", p.T.name(), ") must map into its domain");
    if (!p.S.maps_into_domain()) violation("S (", p.S.name(), ") must map into its domain");

    const auto& fm = p.F.meta();
    if (!fm.lipschitz || !fm.strong_monotone) {
        violation("F (", p.F.name(), ") must declare a Lipschitz constant L and a strong monotonicity modulus eta");
    }
    if (!(p.rho >= 0.0)) violation("rho = ", p.rho, " must be nonnegative");
    const bool v_used = p.rho != 0.0;
    if (v_used && !p.V.meta().lipschitz) violation("V (", p.V.name(), ") must declare a Lipschitz constant gamma");

    if (fm.lipschitz && fm.strong_monotone) {
        const double L = *fm.lipschitz;
        const double eta = *fm.strong_monotone;
        const double bound = 2.0 * eta / (L * L);
        if (!(p.mu > 0.0 && p.mu < bound)) {
            violation("mu = ", p.mu, " violates the bound 0 < mu < 2*eta/L^2 = ", bound);
        } else {
            const double nu = nu_constant(p.mu, eta, L);
            const double gamma = v_used ? p.V.meta().lipschitz.value_or(0.0) : 0.0;
            if (!(p.rho * gamma < nu)) {
                violation("rho*gamma = ", p.rho * gamma, " violates rho*gamma < nu = ", nu);
            }
        }
    }

    if (p.x1.size() == d && !contains(p.C, p.x1)) {
        violation("initial point lies outside C (distance ", distance(p.C, p.x1), ")");
    }

    const auto nearly = nearness_of(p);
    if (!nearly) {
        violation("T (", p.T.name(), ") must declare a nearness sequence {a_n}");
    } else {
        if (!nearness_sequence_plausible(*nearly)) {
            out.warnings.emplace_back("nearness sequence {a_n} does not look like a null sequence");
        }
        try {
            const auto report = validate_schedule(p.schedule, *nearly, p.schedule_horizon);
            for (const auto& name : report.failures()) {
                if (name == "sum diverges") {
                    violation("schedule condition 'sum of alpha_n diverges' fails");
                } else {
                    const auto& c = report.numeric_checks.at(name);
                    violation("schedule condition ", name, " fails (", c.values[0], ", ", c.values[1],
                              ", ", c.values[2], " at n = ", c.at[0], ", ", c.at[1], ", ", c.at[2], ")");
                }
            }
            for (const auto& w : report.warnings) out.warnings.push_back("schedule: " + w);
        } catch (const UsageError& e) {
            violation(e.what());
        }
    }

    if (p.fix_set && dims_ok) {
        try {
            for (const Vector& q : fix_set_probes(*p.fix_set, p.seed)) {
                if (q.size() != d) {
                    violation("fixed-point set probe has wrong dimension");
                    break;
                }
                const double r = (p.T(q) - q).norm();
                if (r > kFixedPointTol) {
                    violation("declared fixed point is not fixed by T: ||Tp - p|| = ", r);
                    break;
                }
            }
        } catch (const std::exception& e) {
            violation("fixed-point set: ", e.what());
        }
    }
    return out;
}

struct SolverState {
    std::size_t n = 1;
    Vector x;
    /// y_{n-1} of the step that produced x (empty before the first step).
    Vector y;
};

/// T^n y, T y or T_n y according to the power mode.
inline Vector apply_mode(const ProblemSpec& p, std::size_t n, const Vector& y) {
    return std::visit(
        [&](const auto& mode) -> Vector {
            using K = std::decay_t<decltype(mode)>;
            if constexpr (std::is_same_v<K, FullPower>) return power(p.T, n, y);
            else if constexpr (std::is_same_v<K, SinglePower>) return p.T(y);
            else return mode.at(n)(y);
        },
        p.mode);
}

/// One iteration; alpha and beta are evaluated at the current index n.
inline SolverState step(const ProblemSpec& p, const SolverState& s) {
    if (s.n < 1) throw UsageError("step: iteration index starts at 1");
    const double alpha = p.schedule.alpha(s.n);
    const double beta = p.schedule.beta(s.n);
    Vector y = beta * p.S(s.x) + (1.0 - beta) * s.x;
    const Vector z = apply_mode(p, s.n, y);
    Vector t = z - (alpha * p.mu) * p.F(z);
    if (p.rho != 0.0) t += (alpha * p.rho) * p.V(s.x);
    Vector next = project(p.C, t);
    require_finite(next, "step");
    return {s.n + 1, std::move(next), std::move(y)};
}

/// max(0, max over probes y of <(rho V - mu F) x, y - x>).
inline double vi_residual(const Vector& x, const ProblemSpec& p, const std::vector<Vector>& probes) {
    Vector g = -p.mu * p.F(x);
    if (p.rho != 0.0) g += p.rho * p.V(x);
    double r = 0.0;
    for (const Vector& y : probes) r = std::max(r, g.dot(y - x));
    return r;
}

inline double vi_residual(const Vector& x, const ProblemSpec& p) {
    if (!p.fix_set) throw UsageError("vi_residual: problem has no fixed-point set description");
    return vi_residual(x, p, fix_set_probes(*p.fix_set, p.seed));
}

struct StopRule {
    std::size_t max_iters = 100'000;
    std::optional<double> tol_step = 1e-10;
    std::optional<double> tol_fix = 1e-8;
    /// Only consulted when the problem carries a fixed-point set.
    std::optional<double> tol_vi = 1e-8;
    bool operator==(const StopRule&) const = default;
};

enum class StopReason { Budget, StepTolerance, FixTolerance, ViTolerance };

inline constexpr std::string_view to_string(StopReason r) {
    switch (r) {
        case StopReason::Budget: return "budget";
        case StopReason::StepTolerance: return "step_tolerance";
        case StopReason::FixTolerance: return "fix_tolerance";
        case StopReason::ViTolerance: return "vi_tolerance";
    }
    return "?";
}

/// One trace row per iteration n. Residuals refer to the iterate x_{n+1}
/// produced by that iteration.
struct TraceRow {
    std::size_t n = 0;
    double alpha = 0.0;
    double beta = 0.0;
    double step_norm = 0.0;     ///< ||x_{n+1} - x_n||
    double fix_residual = 0.0;  ///< ||x_{n+1} - T x_{n+1}||
    std::optional<double> vi_residual;
    std::optional<double> dist_to_reference;
    std::optional<std::int64_t> elapsed_ns;
};

struct SolveOptions {
    /// Record wall-clock time per step (makes traces non-reproducible).
    bool timing = false;
    bool keep_trace = true;
    std::function<void(const TraceRow&)> on_row;
};

struct SolveReport {
    Vector x;
    std::vector<TraceRow> trace;
    StopReason reason = StopReason::Budget;
    std::size_t iterations = 0;
    std::optional<TraceRow> last;

    bool tolerance_met() const { return reason != StopReason::Budget; }
};

inline bool needs_power_budget(const ProblemSpec& p) {
    return std::holds_alternative<FullPower>(p.mode) && !p.T.meta().closed_form_power;
}

/// Runs step until one of the configured stop rules fires. Deterministic for
/// a given problem and stop rule when timing is off.
inline SolveReport solve(const ProblemSpec& p, const StopRule& stop, const SolveOptions& opts = {}) {
    if (stop.max_iters == 0) throw UsageError("solve: max_iters must be positive");
    if (!contains(p.C, p.x1)) throw UsageError("solve: initial point lies outside C");
    std::vector<Vector> probes;
    if (p.fix_set) probes = fix_set_probes(*p.fix_set, p.seed);
    const bool budgeted = needs_power_budget(p);

    SolveReport report;
    SolverState state{1, p.x1, Vector()};
    using Clock = std::chrono::steady_clock;
    for (std::size_t n = 1; n <= stop.max_iters; ++n) {
        if (budgeted && n > p.power_budget / stop.max_iters) {
            std::ostringstream msg;
            msg << "power budget exceeded: n * max_iters = " << n << " * " << stop.max_iters << " > "
                << p.power_budget << " evaluations of T";
            throw NumericError(msg.str());
        }
        const auto t0 = opts.timing ? Clock::now() : Clock::time_point{};
        SolverState next = step(p, state);

        TraceRow row;
        row.n = n;
        row.alpha = p.schedule.alpha(n);
        row.beta = p.schedule.beta(n);
        row.step_norm = (next.x - state.x).norm();
        row.fix_residual = (next.x - p.T(next.x)).norm();
        if (p.fix_set) row.vi_residual = vi_residual(next.x, p, probes);
        if (p.reference) row.dist_to_reference = (next.x - *p.reference).norm();
        if (opts.timing) {
            row.elapsed_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
        }
        if (opts.on_row) opts.on_row(row);

        state = std::move(next);
        report.iterations = n;

        std::optional<StopReason> reason;
        if (stop.tol_step && row.step_norm <= *stop.tol_step) reason = StopReason::StepTolerance;
        else if (stop.tol_fix && row.fix_residual <= *stop.tol_fix) reason = StopReason::FixTolerance;
        else if (stop.tol_vi && row.vi_residual && *row.vi_residual <= *stop.tol_vi) reason = StopReason::ViTolerance;

        report.last = row;
        if (opts.keep_trace) report.trace.push_back(std::move(row));
        if (reason) {
            report.reason = *reason;
            break;
        }
    }
    report.x = std::move(state.x);
    return report;
}

struct ProbeRegularity {
    Vector probe;
    TrendCheck difference;  ///< ||T^n x - T^{n-1} x||
    TrendCheck relative;    ///< ||T^n x - T^{n-1} x|| / alpha_n
};

struct PowerRegularityReport {
    std::vector<ProbeRegularity> probes;
    bool passed = true;
};

/// Trend check of ||T^n x - T^{n-1} x|| -> 0 and of the same quantity over
/// alpha_n, at n = horizon/100, horizon/10, horizon for each probe point.
inline PowerRegularityReport check_power_regularity(const Mapping& T, const Schedule& s,
                                                    const std::vector<Vector>& probes,
                                                    std::size_t horizon, double tol = 0.05) {
    if (horizon < 200) throw UsageError("check_power_regularity: horizon must be at least 200");
    if (!T.maps_into_domain()) {
        throw UsageError("check_power_regularity: " + T.name() + " is not declared to map into its domain");
    }
    PowerRegularityReport report;
    for (const Vector& x : probes) {
        auto gap = [&](std::size_t n) { return (power(T, n, x) - power(T, n - 1, x)).norm(); };
        ProbeRegularity pr{x, trend_check(horizon, tol, gap),
                           trend_check(horizon, tol, [&](std::size_t n) { return gap(n) / s.alpha(n); })};
        report.passed = report.passed && pr.difference.passed && pr.relative.passed;
        report.probes.push_back(std::move(pr));
    }
    return report;
}

/// Rewrites a problem into one of the named method configurations:
///   full_power  T^n at step n
///   wang_xu     T once per step
///   ceng        wang_xu with S = I
///   marino_xu   ceng on C = R^d with a declared linear F
///   sahu        constant mapping sequence T_n = T (unless already a sequence)
inline ProblemSpec reduce_variant(ProblemSpec p, Method m) {
    switch (m) {
        case Method::FullPower:
            p.mode = FullPower{};
            break;
        case Method::WangXu:
            p.mode = SinglePower{};
            break;
        case Method::MarinoXu:
            if (p.C.get_if<WholeSpace>() == nullptr) {
                throw UsageError("marino_xu requires C to be the whole space, got " + p.C.kind());
            }
            if (!p.F.meta().linear) throw UsageError("marino_xu requires a declared linear operator F");
            [[fallthrough]];
        case Method::Ceng:
            p.mode = SinglePower{};
            p.S = fixtures::identity(p.C.dim());
            break;
        case Method::Sahu:
            if (!std::holds_alternative<MappingSequence>(p.mode)) p.mode = MappingSequence::constant(p.T);
            break;
    }
    return p;
}

} // namespace hfp
