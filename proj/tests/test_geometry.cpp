#include "hfp/geometry.hpp"
#include "random_sets.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using hfp::ConvexSet;
using hfp::make_vector;
using hfp::Vector;

TEST(Inner, Examples) {
    EXPECT_EQ(hfp::inner(make_vector({1, 0}), make_vector({0, 1})), 0.0);
    EXPECT_EQ(hfp::inner(make_vector({1, 2}), make_vector({1, 2})), 5.0);
    EXPECT_EQ(hfp::inner(make_vector({2, 3}), make_vector({4, -1})), 5.0);
}

TEST(Inner, DimensionMismatchIsUsageError) {
    EXPECT_THROW(hfp::inner(make_vector({1, 2}), make_vector({1, 2, 3})), hfp::UsageError);
}

TEST(Project, ClosedFormExamples) {
    const auto ball = ConvexSet::ball(Vector::Zero(2), 1.0);
    EXPECT_EQ(hfp::project(ball, make_vector({2, 0})), make_vector({1, 0}));

    const auto box = ConvexSet::box(make_vector({0, 0}), make_vector({1, 1}));
    EXPECT_EQ(hfp::project(box, make_vector({2, -1})), make_vector({1, 0}));

    const auto line = ConvexSet::hyperplane(make_vector({1, 1}), 2.0);
    EXPECT_EQ(hfp::project(line, make_vector({0, 0})), make_vector({1, 1}));

    const auto half = ConvexSet::halfspace(make_vector({0, 1}), 1.0);
    EXPECT_EQ(hfp::project(half, make_vector({3, 5})), make_vector({3, 1}));
    EXPECT_EQ(hfp::project(half, make_vector({3, -5})), make_vector({3, -5}));

    EXPECT_EQ(hfp::project(ConvexSet::whole_space(2), make_vector({7, -8})), make_vector({7, -8}));
}

TEST(Project, PointInSetIsFixed) {
    const Vector inside = make_vector({0.25, 0.5});
    for (const auto& set : {ConvexSet::ball(Vector::Zero(2), 1.0),
                            ConvexSet::box(make_vector({0, 0}), make_vector({1, 1})),
                            ConvexSet::halfspace(make_vector({1, 1}), 1.0),
                            ConvexSet::hyperplane(make_vector({2, 1}), 1.0),
                            ConvexSet::whole_space(2)}) {
        EXPECT_EQ(hfp::project(set, inside), inside) << set.kind();
    }
}

TEST(Project, DimensionMismatchIsUsageError) {
    const auto ball = ConvexSet::ball(Vector::Zero(2), 1.0);
    EXPECT_THROW(hfp::project(ball, make_vector({1, 2, 3})), hfp::UsageError);
}

TEST(Distance, Examples) {
    EXPECT_DOUBLE_EQ(hfp::distance(ConvexSet::ball(Vector::Zero(2), 1.0), make_vector({2, 0})), 1.0);
    EXPECT_EQ(hfp::distance(ConvexSet::box(make_vector({0, 0}), make_vector({1, 1})), make_vector({0.5, 0.5})), 0.0);
    EXPECT_NEAR(hfp::distance(ConvexSet::hyperplane(make_vector({1, 1}), 2.0), make_vector({0, 0})), std::sqrt(2.0),
                1e-15);
}

TEST(ConvexSetFactories, RejectInvalidDescriptions) {
    EXPECT_THROW(ConvexSet::ball(Vector::Zero(2), 0.0), hfp::ProblemError);
    EXPECT_THROW(ConvexSet::ball(Vector::Zero(2), -1.0), hfp::ProblemError);
    EXPECT_THROW(ConvexSet::box(make_vector({0, 2}), make_vector({1, 1})), hfp::ProblemError);
    EXPECT_THROW(ConvexSet::halfspace(Vector::Zero(2), 1.0), hfp::ProblemError);
    EXPECT_THROW(ConvexSet::hyperplane(Vector::Zero(3), 0.0), hfp::ProblemError);
    EXPECT_THROW(ConvexSet::whole_space(0), hfp::ProblemError);
    EXPECT_THROW(ConvexSet::intersection({}), hfp::ProblemError);
}

TEST(Intersection, EmptyIntersectionFailsFeasibilityProbe) {
    std::vector<ConvexSet> parts = {ConvexSet::ball(make_vector({0, 0}), 1.0),
                                    ConvexSet::ball(make_vector({5, 0}), 1.0)};
    EXPECT_THROW(ConvexSet::intersection(parts), hfp::ProblemError);
}

TEST(Intersection, CycleCapIsNumericError) {
    // Two lines through the origin at a shallow angle: alternating projections
    // converge slowly. The constructor probe starts at the (feasible) origin.
    const std::vector<ConvexSet> parts = {ConvexSet::hyperplane(make_vector({0, 1}), 0.0),
                                          ConvexSet::hyperplane(make_vector({0.2, 1}), 0.0)};
    const auto capped = ConvexSet::intersection(parts, {1e-10, 1});
    EXPECT_THROW(hfp::project(capped, make_vector({5, 5})), hfp::NumericError);
    const auto generous = ConvexSet::intersection(parts);
    EXPECT_LE(hfp::project(generous, make_vector({5, 5})).norm(), 1e-8);
}

TEST(Intersection, AgreesWithSingleSetClosedFormWhenRedundant) {
    // The ball contains the halfspace projection of every probe point used,
    // so the intersection projection equals the halfspace projection.
    hfp::Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const Vector normal = make_vector({hfp::uniform(rng, -1, 1), hfp::uniform(rng, -1, 1)}) + make_vector({0, 2});
        const double offset = hfp::uniform(rng, -1, 1);
        const auto half = ConvexSet::halfspace(normal, offset);
        const auto ball = ConvexSet::ball(Vector::Zero(2), 100.0);
        const auto inter = ConvexSet::intersection({half, ball});
        const Vector x = hfp::uniform_in_ball(rng, Vector::Zero(2), 5.0);
        const Vector expected = hfp::project(half, x);
        ASSERT_TRUE(hfp::contains(ball, expected));
        EXPECT_LE((hfp::project(inter, x) - expected).norm(), 1e-10);
    }
}

TEST(Intersection, BallAndHalfspaceCorner) {
    // Unit ball cut by x <= 0.5: the point (2, 2) projects onto the corner
    // (0.5, sqrt(0.75)).
    const auto set = ConvexSet::intersection(
        {ConvexSet::ball(Vector::Zero(2), 1.0), ConvexSet::halfspace(make_vector({1, 0}), 0.5)});
    const Vector p = hfp::project(set, make_vector({2, 2}));
    EXPECT_NEAR(p[0], 0.5, 1e-9);
    EXPECT_NEAR(p[1], std::sqrt(0.75), 1e-9);
}

class ProjectionProperties : public ::testing::TestWithParam<int> {};

TEST_P(ProjectionProperties, CharacterizationNonexpansivenessIdempotence) {
    hfp::Rng rng(static_cast<std::uint64_t>(GetParam()));
    for (int trial = 0; trial < 100; ++trial) {
        const auto set = hfp::testing::random_set(rng, 1 + trial % 4);
        const double idem_tol = set.get_if<hfp::Intersection>() ? 10 * 1e-10 : 1e-12;
        const Vector x = hfp::testing::random_point(rng, set.dim());
        const Vector y0 = hfp::testing::random_point(rng, set.dim());
        const Vector px = hfp::project(set, x);
        const Vector py = hfp::project(set, y0);
        const Vector y_in = hfp::sample_point(set, rng);

        EXPECT_LE(hfp::inner(x - px, y_in - px), 1e-9) << set.kind();
        EXPECT_LE((px - py).norm(), (x - y0).norm() + 1e-12) << set.kind();
        EXPECT_LE((hfp::project(set, px) - px).norm(), idem_tol) << set.kind();
        EXPECT_TRUE(hfp::contains(set, px)) << set.kind();
    }
}

INSTANTIATE_TEST_SUITE_P(Seeds, ProjectionProperties, ::testing::Range(0, 10));

TEST(SamplePoint, LiesInSet) {
    hfp::Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const auto set = hfp::testing::random_set(rng, 2);
        EXPECT_TRUE(hfp::contains(set, hfp::sample_point(set, rng))) << set.kind();
    }
}

TEST(BoxVertices, EnumeratesCorners) {
    const auto box = ConvexSet::box(make_vector({0, 0, 0}), make_vector({1, 2, 3}));
    const auto v = hfp::box_vertices(box);
    ASSERT_EQ(v.size(), 8U);
    EXPECT_EQ(v.front(), make_vector({0, 0, 0}));
    EXPECT_EQ(v.back(), make_vector({1, 2, 3}));
}

} // namespace
