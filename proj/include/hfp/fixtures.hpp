#pragma once

// Shipped test mappings with declared metadata. Every fixture's metadata is
// expected to pass its own certifier; the test suite enforces that.

#include "hfp/core.hpp"
#include "hfp/geometry.hpp"
#include "hfp/operators.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>
#include <string>

namespace hfp::fixtures {

/// Default radius of the ball domain used by the rotation fixtures.
inline constexpr double kRotationDomainRadius = 10.0;

inline Mapping identity(Index dim) {
    OperatorMeta meta;
    meta.lipschitz = 1.0;
    meta.strong_monotone = 1.0;
    meta.nearly = NearnessSequence::zero();
    meta.closed_form_power = [](std::size_t, const Vector& x) { return x; };
    meta.linear = true;
    return Mapping("identity", ConvexSet::whole_space(dim), Codomain::Domain, std::move(meta),
                   [](const Vector& x) { return x; });
}

inline Mapping zero(Index dim) {
    OperatorMeta meta;
    meta.lipschitz = 0.0;
    meta.linear = true;
    return Mapping("zero", ConvexSet::whole_space(dim), Codomain::Ambient, std::move(meta),
                   [](const Vector& x) -> Vector { return Vector::Zero(x.size()); });
}

inline Mapping constant(Vector value) {
    if (!value.allFinite()) throw ProblemError("constant: non-finite value");
    const Index d = value.size();
    OperatorMeta meta;
    meta.lipschitz = 0.0;
    return Mapping("constant", ConvexSet::whole_space(d), Codomain::Ambient, std::move(meta),
                   [value = std::move(value)](const Vector&) { return value; });
}

/// x -> k x. Strongly monotone with modulus k when k > 0.
inline Mapping scaled(double k, Index dim) {
    if (!std::isfinite(k)) throw ProblemError("scaled: non-finite factor");
    OperatorMeta meta;
    meta.lipschitz = std::abs(k);
    if (k > 0.0) meta.strong_monotone = k;
    meta.linear = true;
    std::ostringstream name;
    name << "scaled(" << k << ")";
    return Mapping(name.str(), ConvexSet::whole_space(dim), Codomain::Ambient, std::move(meta),
                   [k](const Vector& x) -> Vector { return k * x; });
}

/// x -> k x with 0 <= k < 1.
inline Mapping contraction(double k, Index dim) {
    if (!(k >= 0.0 && k < 1.0)) throw ProblemError("contraction: factor must lie in [0, 1)");
    return scaled(k, dim);
}

/// F x = A x for symmetric positive definite A, with declared eta and L.
inline Mapping linear(Matrix A, double eta, double L) {
    if (A.rows() != A.cols() || A.rows() == 0) throw ProblemError("linear: matrix must be square");
    if (!A.allFinite()) throw ProblemError("linear: non-finite entry");
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 0.0) {
        throw ProblemError("linear: matrix must be symmetric");
    }
    if (!(eta > 0.0)) throw ProblemError("linear: matrix must be positive definite");
    OperatorMeta meta;
    meta.lipschitz = L;
    meta.strong_monotone = eta;
    meta.linear = true;
    const Index d = A.rows();
    return Mapping("linear", ConvexSet::whole_space(d), Codomain::Ambient, std::move(meta),
                   [A = std::move(A)](const Vector& x) -> Vector { return A * x; });
}

/// F x = A x with eta and L taken from the extreme eigenvalues of A.
inline Mapping linear(Matrix A) {
    if (A.rows() != A.cols() || A.rows() == 0) throw ProblemError("linear: matrix must be square");
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 0.0) {
        throw ProblemError("linear: matrix must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(A, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0)) throw ProblemError("linear: matrix must be positive definite");
    return linear(std::move(A), lo, hi);
}

/// Metric projection onto a hyperplane. Nonexpansive and idempotent, so
/// every power equals one application.
inline Mapping proj_affine(Vector normal, double offset) {
    const ConvexSet target = ConvexSet::hyperplane(std::move(normal), offset);
    const Index d = target.dim();
    OperatorMeta meta;
    meta.lipschitz = 1.0;
    meta.nearly = NearnessSequence::zero();
    meta.closed_form_power = [target](std::size_t, const Vector& x) { return project(target, x); };
    return Mapping("proj_affine", ConvexSet::whole_space(d), Codomain::Domain, std::move(meta),
                   [target](const Vector& x) { return project(target, x); });
}

/// Metric projection onto an arbitrary convex set.
inline Mapping projection(ConvexSet target) {
    const Index d = target.dim();
    OperatorMeta meta;
    meta.lipschitz = 1.0;
    meta.nearly = NearnessSequence::zero();
    meta.closed_form_power = [target](std::size_t, const Vector& x) { return project(target, x); };
    return Mapping("projection", ConvexSet::whole_space(d), Codomain::Domain, std::move(meta),
                   [target](const Vector& x) { return project(target, x); });
}

inline Eigen::Matrix2d rotation_matrix(double theta) {
    Eigen::Matrix2d R;
    R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return R;
}

/// Planar rotation by theta on the ball of radius `radius` about the origin.
/// An isometry with Fix = {0}; its powers do not settle, so it is the
/// negative control for power regularity.
inline Mapping rotation(double theta, double radius = kRotationDomainRadius) {
    OperatorMeta meta;
    meta.lipschitz = 1.0;
    meta.nearly = NearnessSequence::zero();
    meta.linear = true;
    meta.closed_form_power = [theta](std::size_t n, const Vector& x) -> Vector {
        return rotation_matrix(static_cast<double>(n) * theta) * x;
    };
    const Eigen::Matrix2d R = rotation_matrix(theta);
    std::ostringstream name;
    name << "rotation(" << theta << ")";
    return Mapping(name.str(), ConvexSet::ball(Vector::Zero(2), radius), Codomain::Domain,
                   std::move(meta), [R](const Vector& x) -> Vector { return R * x; });
}

/// M^n by repeated squaring.
inline Eigen::Matrix2d matrix_power(const Eigen::Matrix2d& M, std::size_t n) {
    Eigen::Matrix2d result = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d base = M;
    while (n > 0) {
        if (n & 1U) result = result * base;
        n >>= 1U;
        if (n > 0) base = base * base;
    }
    return result;
}

/// T = (1 - lambda) I + lambda R_theta on the ball about the origin.
/// Nonexpansive with Fix = {0} for theta not a multiple of 2 pi, and
/// ||T^n x - T^(n-1) x|| decays geometrically.
inline Mapping averaged_rotation(double lambda, double theta, double radius = kRotationDomainRadius) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw ProblemError("averaged_rotation: lambda must lie in (0, 1)");
    const Eigen::Matrix2d M =
        (1.0 - lambda) * Eigen::Matrix2d::Identity() + lambda * rotation_matrix(theta);
    OperatorMeta meta;
    meta.lipschitz = 1.0;
    meta.nearly = NearnessSequence::zero();
    meta.linear = true;
    meta.closed_form_power = [M](std::size_t n, const Vector& x) -> Vector {
        return matrix_power(M, n) * x;
    };
    std::ostringstream name;
    name << "averaged_rotation(" << lambda << ", " << theta << ")";
    return Mapping(name.str(), ConvexSet::ball(Vector::Zero(2), radius), Codomain::Domain,
                   std::move(meta), [M](const Vector& x) -> Vector { return M * x; });
}

/// Step map on [0, 1]: T x = 0.5 on [0, 0.5], T x = 0 on (0.5, 1].
///
/// Discontinuous (so not demicontinuous), nearly nonexpansive with
/// a = (0.5, 0, 0, ...), Fix(T) = {0.5}, and T^n = 0.5 for n >= 2. Kept as
/// an experimental fixture: it sits outside the convergence guarantee's
/// continuity hypothesis but has a checkable limit.
inline Mapping sahu_step() {
    auto apply = [](const Vector& x) -> Vector {
        Vector y(1);
        y[0] = x[0] <= 0.5 ? 0.5 : 0.0;
        return y;
    };
    OperatorMeta meta;
    meta.nearly = NearnessSequence::leading({0.5});
    meta.closed_form_power = [apply](std::size_t n, const Vector& x) -> Vector {
        if (n == 1) return apply(x);
        return Vector::Constant(1, 0.5);
    };
    return Mapping("sahu_step", ConvexSet::box(Vector::Zero(1), Vector::Ones(1)), Codomain::Domain,
                   std::move(meta), apply);
}

} // namespace hfp::fixtures
