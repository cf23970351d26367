#pragma once

#include "hfp/core.hpp"
#include "hfp/geometry.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace hfp {

/// The sequence {a_n} (n >= 1) of a nearly nonexpansive mapping:
/// ||T^n x - T^n y|| <= ||x - y|| + a_n.
struct NearnessSequence {
    std::function<double(std::size_t)> a;
    /// Index after which `a` is nonincreasing.
    std::size_t burn_in = 1;

    double operator()(std::size_t n) const { return a(n); }

    static NearnessSequence zero() {
        return {[](std::size_t) { return 0.0; }, 1};
    }

    /// Explicit leading terms a_1, ..., a_k followed by zeros.
    static NearnessSequence leading(std::vector<double> head) {
        const std::size_t burn = head.size() + 1;
        return {[head = std::move(head)](std::size_t n) {
                    return n >= 1 && n <= head.size() ? head[n - 1] : 0.0;
                },
                burn};
    }

    /// a_n = scale * n^(-exponent).
    static NearnessSequence power(double scale, double exponent) {
        return {[scale, exponent](std::size_t n) {
                    return scale * std::pow(static_cast<double>(n), -exponent);
                },
                1};
    }
};

/// Numeric sanity check of a NearnessSequence: a(n) >= 0 everywhere probed,
/// a(n) < 1e-6 for probed n >= 1e6 and nonincreasing after the burn-in.
inline bool nearness_sequence_plausible(const NearnessSequence& seq) {
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n <= 100000000; n *= 10) {
        for (std::size_t k : {n, n + 1, 2 * n, 5 * n}) {
            if (!(seq(k) >= 0.0)) return false;
        }
        if (n >= 1000000 && !(seq(n) < 1e-6)) return false;
        if (n >= seq.burn_in) {
            if (seq(n) > prev) return false;
            prev = seq(n);
        }
    }
    return true;
}

enum class Codomain { Domain, Ambient };

struct OperatorMeta {
    std::optional<double> lipschitz;        ///< L for F, gamma for V
    std::optional<double> strong_monotone;  ///< eta for F
    std::optional<NearnessSequence> nearly; ///< {a_n} for T
    /// Closed form of the n-th power, when known.
    std::function<Vector(std::size_t, const Vector&)> closed_form_power;
    /// Declared linear (x -> A x); required by the Marino-Xu reduction.
    bool linear = false;
};

/// An evaluatable mapping with its domain and declared metadata. Immutable
/// after construction; copies share nothing mutable.
class Mapping {
public:
    using Fn = std::function<Vector(const Vector&)>;

    Mapping(std::string name, ConvexSet domain, Codomain codomain, OperatorMeta meta, Fn fn)
        : name_(std::move(name)),
          domain_(std::move(domain)),
          codomain_(codomain),
          meta_(std::move(meta)),
          fn_(std::move(fn)) {
        if (!fn_) throw ProblemError(name_ + ": missing evaluation function");
        if (meta_.lipschitz && !(*meta_.lipschitz >= 0.0)) {
            throw ProblemError(name_ + ": Lipschitz constant must be nonnegative");
        }
        if (meta_.strong_monotone) {
            if (!(*meta_.strong_monotone > 0.0)) {
                throw ProblemError(name_ + ": strong monotonicity modulus must be positive");
            }
            if (!meta_.lipschitz) {
                throw ProblemError(name_ + ": strong monotonicity declared without a Lipschitz constant");
            }
            if (*meta_.strong_monotone > *meta_.lipschitz) {
                throw ProblemError(name_ + ": eta exceeds L, impossible by Cauchy-Schwarz");
            }
        }
    }

    Vector operator()(const Vector& x) const {
        if (x.size() != domain_.dim()) {
            throw UsageError(name_ + ": argument dimension " + std::to_string(x.size()) +
                             " does not match domain dimension " + std::to_string(domain_.dim()));
        }
        Vector y = fn_(x);
        if (y.size() != x.size()) throw NumericError(name_ + ": evaluation changed dimension");
        return y;
    }

    const std::string& name() const { return name_; }
    const ConvexSet& domain() const { return domain_; }
    Index dim() const { return domain_.dim(); }
    Codomain codomain() const { return codomain_; }
    bool maps_into_domain() const { return codomain_ == Codomain::Domain; }
    const OperatorMeta& meta() const { return meta_; }

private:
    std::string name_;
    ConvexSet domain_;
    Codomain codomain_;
    OperatorMeta meta_;
    Fn fn_;
};

/// T^n x. Uses the declared closed form when present, otherwise applies T
/// n times and checks every intermediate image stays in the domain.
inline Vector power(const Mapping& T, std::size_t n, const Vector& x) {
    if (n == 0) throw UsageError("power: n must be positive");
    if (!T.maps_into_domain()) {
        throw UsageError("power: " + T.name() + " is not declared to map into its domain");
    }
    if (T.meta().closed_form_power) {
        Vector y = T.meta().closed_form_power(n, x);
        if (y.size() != x.size()) throw NumericError(T.name() + ": closed-form power changed dimension");
        return y;
    }
    Vector y = x;
    for (std::size_t k = 1; k <= n; ++k) {
        y = T(y);
        if (k < n && !contains(T.domain(), y)) {
            throw NumericError("power: " + T.name() + " left its domain at step " + std::to_string(k));
        }
    }
    return y;
}

struct Certificate {
    bool passed = true;
    /// Largest amount by which the certified inequality was violated over all
    /// samples (lhs - rhs of "lhs <= rhs"); <= 0 means slack everywhere.
    double worst_margin = -std::numeric_limits<double>::infinity();
    /// First violating pair by sample index.
    std::optional<std::pair<Vector, Vector>> witness;
    /// Power index of the witness (nearly-nonexpansive certificates only).
    std::size_t witness_power = 0;
    /// Power index at which worst_margin was attained.
    std::size_t worst_power = 0;
    std::size_t samples_used = 0;
    std::uint64_t seed = 0;
};

namespace detail {

inline std::pair<Vector, Vector> sample_distinct_pair(const ConvexSet& domain, Rng& rng) {
    for (int attempt = 0; attempt < 16; ++attempt) {
        Vector x = sample_point(domain, rng);
        Vector y = sample_point(domain, rng);
        if (x != y) return {std::move(x), std::move(y)};
    }
    throw UsageError("certifier: cannot sample two distinct points from the domain");
}

/// Runs `margin(x, y)` over seeded pairs. `margin` returns lhs - rhs of the
/// inequality being certified.
template <class MarginFn>
Certificate certify_pairs(const ConvexSet& domain, std::size_t samples, std::uint64_t seed,
                          MarginFn&& margin) {
    if (samples < 2) throw UsageError("certifier: at least 2 samples required");
    Certificate cert;
    cert.seed = seed;
    Rng rng(seed);
    for (std::size_t i = 0; i < samples; ++i) {
        auto [x, y] = sample_distinct_pair(domain, rng);
        const double m = margin(x, y);
        if (m > cert.worst_margin) cert.worst_margin = m;
        if (m > kCertifyTol && !cert.witness) {
            cert.passed = false;
            cert.witness.emplace(std::move(x), std::move(y));
        }
        ++cert.samples_used;
    }
    return cert;
}

inline double require_meta(const std::optional<double>& value, const Mapping& m, const char* what) {
    if (!value) throw UsageError(m.name() + ": missing declared " + what);
    return *value;
}

} // namespace detail

/// Margin of ||Mx - My|| <= L ||x - y|| at one pair.
inline double lipschitz_margin(const Mapping& M, double claimed, const Vector& x, const Vector& y) {
    return (M(x) - M(y)).norm() - claimed * (x - y).norm();
}

inline Certificate certify_lipschitz(const Mapping& M, double claimed, std::size_t samples,
                                     std::uint64_t seed) {
    if (!(claimed >= 0.0)) throw UsageError("certify_lipschitz: claimed constant must be nonnegative");
    return detail::certify_pairs(M.domain(), samples, seed, [&](const Vector& x, const Vector& y) {
        return lipschitz_margin(M, claimed, x, y);
    });
}

/// Margin of eta ||x - y||^2 <= <Fx - Fy, x - y> at one pair.
inline double strong_monotone_margin(const Mapping& F, double eta, const Vector& x, const Vector& y) {
    const Vector d = x - y;
    return eta * d.squaredNorm() - (F(x) - F(y)).dot(d);
}

inline Certificate certify_strong_monotone(const Mapping& F, double eta, std::size_t samples,
                                           std::uint64_t seed) {
    if (!(eta > 0.0)) throw UsageError("certify_strong_monotone: eta must be positive");
    return detail::certify_pairs(F.domain(), samples, seed, [&](const Vector& x, const Vector& y) {
        return strong_monotone_margin(F, eta, x, y);
    });
}

/// Margin of ||T^n x - T^n y|| <= ||x - y|| + a_n at one pair.
inline double nearly_margin(const Mapping& T, const NearnessSequence& seq, std::size_t n,
                            const Vector& x, const Vector& y) {
    return (power(T, n, x) - power(T, n, y)).norm() - (x - y).norm() - seq(n);
}

/// Checks the nearly-nonexpansive inequality for every n in 1..n_max on each
/// sampled pair. The witness is the first violation in (sample, n) order.
inline Certificate certify_nearly_nonexpansive(const Mapping& T, const NearnessSequence& seq,
                                               std::size_t n_max, std::size_t samples,
                                               std::uint64_t seed) {
    if (n_max < 1) throw UsageError("certify_nearly_nonexpansive: n_max must be >= 1");
    if (samples < 2) throw UsageError("certifier: at least 2 samples required");
    if (!T.maps_into_domain()) {
        throw UsageError("certify_nearly_nonexpansive: " + T.name() +
                         " is not declared to map into its domain");
    }
    Certificate cert;
    cert.seed = seed;
    Rng rng(seed);
    for (std::size_t i = 0; i < samples; ++i) {
        auto [x, y] = detail::sample_distinct_pair(T.domain(), rng);
        for (std::size_t n = 1; n <= n_max; ++n) {
            const double m = nearly_margin(T, seq, n, x, y);
            if (m > cert.worst_margin) {
                cert.worst_margin = m;
                cert.worst_power = n;
            }
            if (m > kCertifyTol && !cert.witness) {
                cert.passed = false;
                cert.witness.emplace(x, y);
                cert.witness_power = n;
            }
        }
        ++cert.samples_used;
    }
    return cert;
}

/// Margin of (mu*eta - rho*gamma) ||x - y||^2 <= <(muF - rhoV)x - (muF - rhoV)y, x - y>.
inline double combined_monotone_margin(const Mapping& F, const Mapping& V, double rho, double mu,
                                       const Vector& x, const Vector& y) {
    const double modulus = mu * *F.meta().strong_monotone - rho * *V.meta().lipschitz;
    const Vector d = x - y;
    const Vector gx = mu * F(x) - rho * V(x);
    const Vector gy = mu * F(y) - rho * V(y);
    return modulus * d.squaredNorm() - (gx - gy).dot(d);
}

/// Strong monotonicity of mu F - rho V with modulus mu*eta - rho*gamma.
inline Certificate certify_combined_monotone(const Mapping& F, const Mapping& V, double rho,
                                             double mu, std::size_t samples, std::uint64_t seed) {
    const double eta = detail::require_meta(F.meta().strong_monotone, F, "strong monotonicity modulus");
    detail::require_meta(F.meta().lipschitz, F, "Lipschitz constant");
    const double gamma = detail::require_meta(V.meta().lipschitz, V, "Lipschitz constant");
    if (F.dim() != V.dim()) throw UsageError("certify_combined_monotone: F and V dimensions differ");
    if (!(rho >= 0.0) || !(rho * gamma < mu * eta)) {
        throw UsageError("certify_combined_monotone: requires 0 <= rho*gamma < mu*eta");
    }
    return detail::certify_pairs(F.domain(), samples, seed, [&](const Vector& x, const Vector& y) {
        return combined_monotone_margin(F, V, rho, mu, x, y);
    });
}

/// nu = 1 - sqrt(1 - mu (2 eta - mu L^2)), defined for 0 < mu < 2 eta / L^2.
inline double nu_constant(double mu, double eta, double L) {
    if (!(eta > 0.0) || !(L > 0.0)) throw UsageError("nu_constant: eta and L must be positive");
    if (eta > L) throw UsageError("nu_constant: eta must not exceed L");
    if (!(mu > 0.0) || !(mu < 2.0 * eta / (L * L))) {
        std::ostringstream msg;
        msg << "nu_constant: mu = " << mu << " outside (0, 2*eta/L^2) = (0, " << 2.0 * eta / (L * L)
            << ")";
        throw UsageError(msg.str());
    }
    const double radicand = 1.0 - mu * (2.0 * eta - mu * L * L);
    return 1.0 - std::sqrt(std::max(0.0, radicand));
}

/// Margin of ||Gx - Gy|| <= (1 - lambda nu) ||x - y|| with G = I - lambda mu F.
inline double yamada_margin(const Mapping& F, double lambda, double mu, double nu, const Vector& x,
                            const Vector& y) {
    const Vector gx = x - lambda * mu * F(x);
    const Vector gy = y - lambda * mu * F(y);
    return (gx - gy).norm() - (1.0 - lambda * nu) * (x - y).norm();
}

inline Certificate certify_yamada_contraction(const Mapping& F, double lambda, double mu,
                                              std::size_t samples, std::uint64_t seed) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw UsageError("certify_yamada_contraction: lambda must lie in (0, 1)");
    }
    const double eta = detail::require_meta(F.meta().strong_monotone, F, "strong monotonicity modulus");
    const double L = detail::require_meta(F.meta().lipschitz, F, "Lipschitz constant");
    const double nu = nu_constant(mu, eta, L);
    return detail::certify_pairs(F.domain(), samples, seed, [&](const Vector& x, const Vector& y) {
        return yamada_margin(F, lambda, mu, nu, x, y);
    });
}

} // namespace hfp
