#pragma once

#include "hfp/core.hpp"
#include "hfp/operators.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace hfp {

/// Power-family parameters: alpha_n = alpha0 n^-p, beta_n = beta0 n^-q.
struct PowerFamily {
    double alpha0 = 1.0;
    double p = 0.5;
    double beta0 = 1.0;
    double q = 0.9;
    bool operator==(const PowerFamily&) const = default;
};

/// Control sequences {alpha_n}, {beta_n} for n >= 1.
struct Schedule {
    std::function<double(std::size_t)> alpha;
    std::function<double(std::size_t)> beta;
    std::optional<PowerFamily> family;

    /// Builds the power family. Out-of-range exponents are accepted so that
    /// validate_schedule can report them.
    static Schedule power(PowerFamily f) {
        if (!(f.alpha0 > 0.0 && f.alpha0 <= 1.0)) throw UsageError("schedule: alpha0 must lie in (0, 1]");
        if (!(f.beta0 >= 0.0 && f.beta0 <= 1.0)) throw UsageError("schedule: beta0 must lie in [0, 1]");
        if (!(f.p > 0.0) || !(f.q >= 0.0) || !std::isfinite(f.p) || !std::isfinite(f.q)) {
            throw UsageError("schedule: exponents must satisfy p > 0, q >= 0");
        }
        Schedule s;
        s.alpha = [a0 = f.alpha0, p = f.p](std::size_t n) {
            return a0 * std::pow(static_cast<double>(n), -p);
        };
        s.beta = [b0 = f.beta0, q = f.q](std::size_t n) {
            return b0 * std::pow(static_cast<double>(n), -q);
        };
        s.family = f;
        return s;
    }

    static Schedule shipped_default() { return power({1.0, 0.5, 1.0, 0.9}); }
};

enum class Verdict { Pass, Fail, Unknown };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Unknown: return "unknown";
    }
    return "?";
}

/// A quantity sampled at three increasing indices. Passes when the last
/// value is below the tolerance and the values do not increase.
struct TrendCheck {
    std::array<std::size_t, 3> at{};
    std::array<double, 3> values{};
    bool passed = false;

    double at_horizon() const { return values[2]; }
};

/// Probe indices horizon/100, horizon/10, horizon.
inline std::array<std::size_t, 3> trend_probes(std::size_t horizon) {
    return {horizon / 100, horizon / 10, horizon};
}

template <class Fn>
TrendCheck trend_check(std::size_t horizon, double tol, Fn&& value_at) {
    TrendCheck t;
    t.at = trend_probes(horizon);
    for (std::size_t i = 0; i < 3; ++i) t.values[i] = value_at(t.at[i]);
    t.passed = std::isfinite(t.values[2]) && t.values[2] < tol && t.values[0] >= t.values[1] &&
               t.values[1] >= t.values[2];
    return t;
}

/// Condition names used as keys of ScheduleReport::numeric_checks.
namespace condition {
inline constexpr const char* kAlphaToZero = "alpha_to_zero";
inline constexpr const char* kAOverAlpha = "a_over_alpha";
inline constexpr const char* kBetaOverAlpha = "beta_over_alpha";
inline constexpr const char* kAlphaVariation = "alpha_variation";
inline constexpr const char* kBetaVariation = "beta_variation";
} // namespace condition

struct ScheduleReport {
    /// Whether sum alpha_n = infinity, decided from the power family.
    Verdict structural_divergence = Verdict::Unknown;
    std::map<std::string, TrendCheck> numeric_checks;
    std::size_t horizon = 0;
    /// Non-fatal findings (beta_n > alpha_n at a probe, undecidable divergence).
    std::vector<std::string> warnings;

    bool passed() const {
        if (structural_divergence == Verdict::Fail) return false;
        for (const auto& [name, check] : numeric_checks) {
            if (!check.passed) return false;
        }
        return true;
    }

    std::vector<std::string> failures() const {
        std::vector<std::string> out;
        if (structural_divergence == Verdict::Fail) out.emplace_back("sum diverges");
        for (const auto& [name, check] : numeric_checks) {
            if (!check.passed) out.push_back(name);
        }
        return out;
    }
};

/// Heuristic check of the schedule conditions: alpha_n -> 0 with a
/// divergent sum, and a_n/alpha_n, beta_n/alpha_n, |alpha_n - alpha_{n-1}|/alpha_n,
/// |beta_n - beta_{n-1}|/alpha_n -> 0. Limits are judged by trend at the
/// horizon; see TrendCheck.
inline ScheduleReport validate_schedule(const Schedule& s, const NearnessSequence& a_seq,
                                        std::size_t horizon, double trend_tol = 0.05) {
    if (horizon < 1000) throw UsageError("validate_schedule: horizon must be at least 1000");
    ScheduleReport report;
    report.horizon = horizon;

    if (s.family) {
        report.structural_divergence = s.family->p <= 1.0 ? Verdict::Pass : Verdict::Fail;
    } else {
        report.structural_divergence = Verdict::Unknown;
        report.warnings.emplace_back(
            "divergence of sum alpha_n cannot be decided without a power-family tag");
    }

    auto alpha = [&](std::size_t n) {
        const double a = s.alpha(n);
        if (a == 0.0) {
            throw UsageError("validate_schedule: alpha(" + std::to_string(n) + ") = 0, ratios undefined");
        }
        if (!(a > 0.0 && a <= 1.0)) {
            throw UsageError("validate_schedule: alpha(" + std::to_string(n) + ") outside (0, 1]");
        }
        return a;
    };
    auto beta = [&](std::size_t n) {
        const double b = s.beta(n);
        if (!(b >= 0.0 && b <= 1.0)) {
            throw UsageError("validate_schedule: beta(" + std::to_string(n) + ") outside [0, 1]");
        }
        return b;
    };

    auto& checks = report.numeric_checks;
    checks[condition::kAlphaToZero] = trend_check(horizon, trend_tol, alpha);
    checks[condition::kAOverAlpha] =
        trend_check(horizon, trend_tol, [&](std::size_t n) { return a_seq(n) / alpha(n); });
    checks[condition::kBetaOverAlpha] =
        trend_check(horizon, trend_tol, [&](std::size_t n) { return beta(n) / alpha(n); });
    checks[condition::kAlphaVariation] = trend_check(horizon, trend_tol, [&](std::size_t n) {
        return std::abs(alpha(n) - alpha(n - 1)) / alpha(n);
    });
    checks[condition::kBetaVariation] = trend_check(horizon, trend_tol, [&](std::size_t n) {
        return std::abs(beta(n) - beta(n - 1)) / alpha(n);
    });

    for (std::size_t n : trend_probes(horizon)) {
        if (beta(n) > alpha(n)) {
            std::ostringstream msg;
            msg << "beta_n > alpha_n at n = " << n;
            report.warnings.push_back(msg.str());
        }
    }
    return report;
}

struct RecursionResult {
    double final_value = 0.0;
    /// x_1, ..., x_{N+1}; empty when not requested.
    std::vector<double> trajectory;
};

/// Iterates x_{n+1} = (1 - alpha_n) x_n + alpha_n beta_n for n = 1..N.
inline RecursionResult scalar_recursion(double x1, const std::function<double(std::size_t)>& alpha,
                                        const std::function<double(std::size_t)>& beta,
                                        std::size_t N, bool keep_trajectory = true) {
    if (!(x1 >= 0.0) || !std::isfinite(x1)) throw UsageError("scalar_recursion: x1 must be nonnegative");
    RecursionResult res;
    if (keep_trajectory) {
        res.trajectory.reserve(N + 1);
        res.trajectory.push_back(x1);
    }
    double x = x1;
    for (std::size_t n = 1; n <= N; ++n) {
        const double a = alpha(n);
        if (!(a >= 0.0 && a <= 1.0)) {
            throw UsageError("scalar_recursion: alpha(" + std::to_string(n) + ") outside [0, 1]");
        }
        x = (1.0 - a) * x + a * beta(n);
        if (keep_trajectory) res.trajectory.push_back(x);
    }
    res.final_value = x;
    return res;
}

} // namespace hfp
