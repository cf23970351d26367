#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hfp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Deterministic generator used by every seeded routine in the library.
using Rng = std::mt19937_64;

/// Absolute tolerance for set membership tests.
inline constexpr double kMembershipTol = 1e-9;

/// Slack allowed on every sampled inequality checked by a certifier.
inline constexpr double kCertifyTol = 1e-9;

/// Radius of the ball used to sample points from unbounded domains.
inline constexpr double kUnboundedSampleRadius = 10.0;

/// Caller violated a documented precondition.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A problem component (set, mapping, fixed-point set) is ill-defined.
class ProblemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numeric procedure failed to deliver its post-condition.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Vector make_vector(std::initializer_list<double> values) {
    Vector v(static_cast<Index>(values.size()));
    Index i = 0;
    for (double value : values) v[i++] = value;
    return v;
}

inline bool all_finite(const Vector& v) { return v.allFinite(); }

inline void require_finite(const Vector& v, std::string_view what) {
    if (!v.allFinite()) throw NumericError(std::string(what) + ": non-finite coordinate");
}

inline void require_same_dim(const Vector& a, const Vector& b, std::string_view what) {
    if (a.size() != b.size()) {
        throw UsageError(std::string(what) + ": dimension mismatch (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + ")");
    }
}

/// Euclidean inner product on R^d.
inline double inner(const Vector& a, const Vector& b) {
    require_same_dim(a, b, "inner");
    return a.dot(b);
}

inline double norm(const Vector& a) { return a.norm(); }

inline double distance(const Vector& a, const Vector& b) {
    require_same_dim(a, b, "distance");
    return (a - b).norm();
}

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double standard_normal(Rng& rng) { return std::normal_distribution<double>()(rng); }

/// Uniform point in the Euclidean ball of the given radius about `center`.
inline Vector uniform_in_ball(Rng& rng, const Vector& center, double radius) {
    const Index d = center.size();
    Vector dir(d);
    double len = 0.0;
    do {
        for (Index i = 0; i < d; ++i) dir[i] = standard_normal(rng);
        len = dir.norm();
    } while (len == 0.0);
    const double r = radius * std::pow(uniform(rng, 0.0, 1.0), 1.0 / static_cast<double>(d));
    return center + (r / len) * dir;
}

} // namespace hfp
