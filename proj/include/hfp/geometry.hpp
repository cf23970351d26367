#pragma once

#include "hfp/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace hfp {

class ConvexSet;

struct WholeSpace {
    Index dim = 0;
    bool operator==(const WholeSpace&) const = default;
};

struct Ball {
    Vector center;
    double radius = 0.0;
    bool operator==(const Ball& o) const { return center == o.center && radius == o.radius; }
};

struct Box {
    Vector lower;
    Vector upper;
    bool operator==(const Box& o) const { return lower == o.lower && upper == o.upper; }
};

/// {x : <normal, x> <= offset}
struct Halfspace {
    Vector normal;
    double offset = 0.0;
    bool operator==(const Halfspace& o) const { return normal == o.normal && offset == o.offset; }
};

/// {x : <normal, x> = offset}
struct AffineHyperplane {
    Vector normal;
    double offset = 0.0;
    bool operator==(const AffineHyperplane& o) const {
        return normal == o.normal && offset == o.offset;
    }
};

/// Stopping parameters for Dykstra's alternating projections.
struct DykstraOptions {
    double tolerance = 1e-10;    ///< change of iterates and increments over one full cycle
    std::size_t max_cycles = 100000;
    bool operator==(const DykstraOptions&) const = default;
};

struct Intersection {
    std::vector<ConvexSet> parts;
    DykstraOptions options;
    bool operator==(const Intersection& o) const;
};

/// A nonempty closed convex subset of R^d with an exact (or Dykstra-exact)
/// metric projection. Instances are only created through the validating
/// factories below.
class ConvexSet {
public:
    using Variant = std::variant<WholeSpace, Ball, Box, Halfspace, AffineHyperplane, Intersection>;

    static ConvexSet whole_space(Index dim) {
        if (dim <= 0) throw ProblemError("WholeSpace: dimension must be positive");
        return ConvexSet(WholeSpace{dim});
    }

    static ConvexSet ball(Vector center, double radius) {
        check_point(center, "Ball center");
        if (!(radius > 0.0) || !std::isfinite(radius)) {
            throw ProblemError("Ball: radius must be positive and finite");
        }
        return ConvexSet(Ball{std::move(center), radius});
    }

    static ConvexSet box(Vector lower, Vector upper) {
        check_point(lower, "Box lower");
        check_point(upper, "Box upper");
        if (lower.size() != upper.size()) throw ProblemError("Box: bound dimensions differ");
        if ((lower.array() > upper.array()).any()) {
            throw ProblemError("Box: lower bound exceeds upper bound");
        }
        return ConvexSet(Box{std::move(lower), std::move(upper)});
    }

    static ConvexSet halfspace(Vector normal, double offset) {
        check_normal(normal, offset, "Halfspace");
        return ConvexSet(Halfspace{std::move(normal), offset});
    }

    static ConvexSet hyperplane(Vector normal, double offset) {
        check_normal(normal, offset, "AffineHyperplane");
        return ConvexSet(AffineHyperplane{std::move(normal), offset});
    }

    /// Builds the intersection and runs a feasibility probe; throws
    /// ProblemError when the parts have no common point.
    static ConvexSet intersection(std::vector<ConvexSet> parts, DykstraOptions options = {});

    const Variant& variant() const { return value_; }

    template <class T>
    const T* get_if() const { return std::get_if<T>(&value_); }

    Index dim() const;
    std::string kind() const;

    bool operator==(const ConvexSet& o) const { return value_ == o.value_; }

private:
    explicit ConvexSet(Variant v) : value_(std::move(v)) {}

    static void check_point(const Vector& v, const char* what) {
        if (v.size() == 0) throw ProblemError(std::string(what) + ": empty vector");
        if (!v.allFinite()) throw ProblemError(std::string(what) + ": non-finite coordinate");
    }

    static void check_normal(const Vector& normal, double offset, const char* what) {
        check_point(normal, what);
        if (normal.squaredNorm() == 0.0) throw ProblemError(std::string(what) + ": zero normal");
        if (!std::isfinite(offset)) throw ProblemError(std::string(what) + ": non-finite offset");
    }

    Variant value_;
};

inline bool Intersection::operator==(const Intersection& o) const {
    return parts == o.parts && options == o.options;
}

inline Index ConvexSet::dim() const {
    return std::visit(
        [](const auto& s) -> Index {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, WholeSpace>) return s.dim;
            else if constexpr (std::is_same_v<T, Ball>) return s.center.size();
            else if constexpr (std::is_same_v<T, Box>) return s.lower.size();
            else if constexpr (std::is_same_v<T, Intersection>) return s.parts.front().dim();
            else return s.normal.size();
        },
        value_);
}

inline std::string ConvexSet::kind() const {
    static constexpr const char* names[] = {"whole_space", "ball",       "box",
                                            "halfspace",   "hyperplane", "intersection"};
    return names[value_.index()];
}

namespace detail {

inline void check_dim(const ConvexSet& set, const Vector& x, const char* what) {
    if (x.size() != set.dim()) {
        throw UsageError(std::string(what) + ": point dimension " + std::to_string(x.size()) +
                         " does not match set dimension " + std::to_string(set.dim()));
    }
}

inline Vector project_simple(const ConvexSet& set, const Vector& x);

/// Result of a Dykstra run; `cycles` counts completed sweeps.
struct DykstraResult {
    Vector point;
    std::size_t cycles = 0;
    double last_change = 0.0;
    bool converged = false;
};

inline DykstraResult dykstra(const Intersection& inter, const Vector& x) {
    const std::size_t m = inter.parts.size();
    std::vector<Vector> increments(m, Vector::Zero(x.size()));
    // Intermediate iterate after each part in the previous cycle. The change
    // per cycle is the largest movement of any intermediate iterate or
    // increment; iterates alone can stall at an infeasible corner while an
    // increment is still growing.
    std::vector<Vector> previous(m, x);
    DykstraResult res{x, 0, 0.0, false};
    Vector& cur = res.point;
    Vector shifted(x.size());
    for (std::size_t cycle = 0; cycle < inter.options.max_cycles; ++cycle) {
        double change = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            shifted = cur + increments[i];
            cur = project_simple(inter.parts[i], shifted);
            const Vector increment = shifted - cur;
            change = std::max({change, (cur - previous[i]).norm(), (increment - increments[i]).norm()});
            increments[i] = increment;
            previous[i] = cur;
        }
        res.cycles = cycle + 1;
        res.last_change = change;
        if (change <= inter.options.tolerance) {
            res.converged = true;
            break;
        }
    }
    return res;
}

inline double max_part_distance(const Intersection& inter, const Vector& x) {
    double worst = 0.0;
    for (const auto& part : inter.parts) {
        worst = std::max(worst, (x - project_simple(part, x)).norm());
    }
    return worst;
}

inline Vector project_simple(const ConvexSet& set, const Vector& x) {
    return std::visit(
        [&x](const auto& s) -> Vector {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, WholeSpace>) {
                return x;
            } else if constexpr (std::is_same_v<T, Ball>) {
                const Vector offset = x - s.center;
                const double len = offset.norm();
                if (len <= s.radius) return x;
                return s.center + (s.radius / len) * offset;
            } else if constexpr (std::is_same_v<T, Box>) {
                return x.cwiseMax(s.lower).cwiseMin(s.upper);
            } else if constexpr (std::is_same_v<T, Halfspace>) {
                const double excess = s.normal.dot(x) - s.offset;
                if (excess <= 0.0) return x;
                return x - (excess / s.normal.squaredNorm()) * s.normal;
            } else if constexpr (std::is_same_v<T, AffineHyperplane>) {
                const double excess = s.normal.dot(x) - s.offset;
                return x - (excess / s.normal.squaredNorm()) * s.normal;
            } else {
                throw UsageError("nested Intersection is not supported");
            }
        },
        set.variant());
}

} // namespace detail

/// Metric projection onto `set`.
///
/// Closed forms for the simple variants; Dykstra's algorithm for
/// Intersection. Throws NumericError when Dykstra hits its cycle cap and
/// ProblemError when it settles on a point outside some part (empty
/// intersection).
inline Vector project(const ConvexSet& set, const Vector& x) {
    detail::check_dim(set, x, "project");
    const auto* inter = set.get_if<Intersection>();
    if (inter == nullptr) return detail::project_simple(set, x);

    auto res = detail::dykstra(*inter, x);
    if (!res.converged) {
        std::ostringstream msg;
        msg << "Dykstra did not converge within " << inter->options.max_cycles
            << " cycles (last change " << res.last_change << ", tolerance "
            << inter->options.tolerance << ")";
        throw NumericError(msg.str());
    }
    const double gap = detail::max_part_distance(*inter, res.point);
    if (gap > kMembershipTol) {
        std::ostringstream msg;
        msg << "Intersection appears empty: Dykstra limit is " << gap
            << " away from one of its parts";
        throw ProblemError(msg.str());
    }
    return std::move(res.point);
}

inline double distance(const ConvexSet& set, const Vector& x) { return (x - project(set, x)).norm(); }

/// Membership within absolute tolerance `tol`.
inline bool contains(const ConvexSet& set, const Vector& x, double tol = kMembershipTol) {
    detail::check_dim(set, x, "contains");
    if (const auto* inter = set.get_if<Intersection>()) {
        return detail::max_part_distance(*inter, x) <= tol;
    }
    return (x - detail::project_simple(set, x)).norm() <= tol;
}

inline ConvexSet ConvexSet::intersection(std::vector<ConvexSet> parts, DykstraOptions options) {
    if (parts.empty()) throw ProblemError("Intersection: no parts");
    const Index d = parts.front().dim();
    for (const auto& part : parts) {
        if (part.get_if<Intersection>() != nullptr) {
            throw ProblemError("Intersection: nested intersections are not supported");
        }
        if (part.dim() != d) throw ProblemError("Intersection: parts differ in dimension");
    }
    if (!(options.tolerance > 0.0) || options.max_cycles == 0) {
        throw ProblemError("Intersection: invalid Dykstra options");
    }
    ConvexSet set(Intersection{std::move(parts), options});
    // Feasibility probe from the origin. On an empty intersection the
    // increments diverge, so the cap is hit with a persistent gap.
    const auto& inter = std::get<Intersection>(set.value_);
    const auto probe = detail::dykstra(inter, Vector::Zero(d));
    const double gap = detail::max_part_distance(inter, probe.point);
    if (gap > kMembershipTol) {
        std::ostringstream msg;
        msg << "Intersection appears empty: feasibility probe ended " << gap
            << " away from one of its parts after " << probe.cycles << " cycles";
        throw ProblemError(msg.str());
    }
    return set;
}

/// Seeded point of `set` for sampling-based checks. Bounded simple sets are
/// sampled uniformly; everything else draws from the ball of radius
/// kUnboundedSampleRadius about the origin and projects.
inline Vector sample_point(const ConvexSet& set, Rng& rng) {
    const Index d = set.dim();
    if (const auto* b = set.get_if<Ball>()) return uniform_in_ball(rng, b->center, b->radius);
    if (const auto* box = set.get_if<Box>()) {
        Vector x(d);
        for (Index i = 0; i < d; ++i) {
            x[i] = box->lower[i] == box->upper[i] ? box->lower[i]
                                                  : uniform(rng, box->lower[i], box->upper[i]);
        }
        return x;
    }
    const Vector raw = uniform_in_ball(rng, Vector::Zero(d), kUnboundedSampleRadius);
    return project(set, raw);
}

/// Corner points of a Box (empty for other variants or when d > 16).
inline std::vector<Vector> box_vertices(const ConvexSet& set) {
    std::vector<Vector> out;
    const auto* box = set.get_if<Box>();
    if (box == nullptr || box->lower.size() > 16) return out;
    const Index d = box->lower.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
        Vector v(d);
        for (Index i = 0; i < d; ++i) v[i] = (mask >> i) & 1U ? box->upper[i] : box->lower[i];
        out.push_back(std::move(v));
    }
    return out;
}

} // namespace hfp
