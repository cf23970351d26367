#include "hfp/fixtures.hpp"
#include "hfp/operators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace {

using hfp::ConvexSet;
using hfp::make_vector;
using hfp::Mapping;
using hfp::NearnessSequence;
using hfp::Vector;
namespace fx = hfp::fixtures;

constexpr double kPi = std::numbers::pi;

TEST(Power, ProjectionIsIdempotent) {
    const auto T = fx::proj_affine(make_vector({1, 1}), 2.0);
    const Vector x = make_vector({4, -7});
    for (std::size_t n : {1U, 2U, 5U, 17U}) EXPECT_EQ(hfp::power(T, n, x), T(x));
}

TEST(Power, QuarterTurnFourTimesIsIdentity) {
    const auto T = fx::rotation(kPi / 2);
    const Vector y = hfp::power(T, 4, make_vector({1, 0}));
    EXPECT_NEAR(y[0], 1.0, 1e-15);
    EXPECT_NEAR(y[1], 0.0, 1e-15);
}

TEST(Power, SahuStepHandTrace) {
    const auto T = fx::sahu_step();
    EXPECT_EQ(hfp::power(T, 1, make_vector({0.8}))[0], 0.0);
    EXPECT_EQ(hfp::power(T, 2, make_vector({0.8}))[0], 0.5);
    EXPECT_EQ(hfp::power(T, 3, make_vector({0.8}))[0], 0.5);
}

TEST(Power, LeavingDomainNamesTheStep) {
    // x -> x + 1 on [0, 1] declared as mapping into its domain.
    const Mapping shift("shift", ConvexSet::box(Vector::Zero(1), Vector::Ones(1)), hfp::Codomain::Domain, {},
                        [](const Vector& x) -> Vector { return x.array() + 1.0; });
    try {
        hfp::power(shift, 3, make_vector({0.5}));
        FAIL() << "expected NumericError";
    } catch (const hfp::NumericError& e) {
        EXPECT_NE(std::string(e.what()).find("step 1"), std::string::npos) << e.what();
    }
}

TEST(Power, ZeroExponentAndAmbientCodomainAreUsageErrors) {
    EXPECT_THROW(hfp::power(fx::identity(2), 0, Vector::Zero(2)), hfp::UsageError);
    EXPECT_THROW(hfp::power(fx::zero(2), 1, Vector::Zero(2)), hfp::UsageError);
}

TEST(Mapping, MetadataInvariants) {
    hfp::OperatorMeta eta_only;
    eta_only.strong_monotone = 1.0;
    auto id = [](const Vector& x) { return x; };
    EXPECT_THROW(Mapping("m", ConvexSet::whole_space(1), hfp::Codomain::Ambient, eta_only, id), hfp::ProblemError);
    hfp::OperatorMeta eta_above_l;
    eta_above_l.lipschitz = 1.0;
    eta_above_l.strong_monotone = 2.0;
    EXPECT_THROW(Mapping("m", ConvexSet::whole_space(1), hfp::Codomain::Ambient, eta_above_l, id),
                 hfp::ProblemError);
}

TEST(CertifyLipschitz, Examples) {
    EXPECT_TRUE(hfp::certify_lipschitz(fx::identity(2), 1.0, 200, 0).passed);

    const auto twice = hfp::certify_lipschitz(fx::scaled(2.0, 2), 1.0, 200, 0);
    EXPECT_FALSE(twice.passed);
    EXPECT_TRUE(twice.witness.has_value());

    const auto rot = hfp::certify_lipschitz(fx::rotation(0.3), 1.0, 200, 0);
    EXPECT_TRUE(rot.passed);
    EXPECT_LE(rot.worst_margin, 1e-12);
}

TEST(CertifyLipschitz, DegenerateDomainIsUsageError) {
    const Mapping point("point", ConvexSet::box(Vector::Ones(2), Vector::Ones(2)), hfp::Codomain::Domain, {},
                        [](const Vector& x) { return x; });
    EXPECT_THROW(hfp::certify_lipschitz(point, 1.0, 10, 0), hfp::UsageError);
    EXPECT_THROW(hfp::certify_lipschitz(fx::identity(2), 1.0, 1, 0), hfp::UsageError);
}

TEST(CertifyStrongMonotone, Examples) {
    const auto id = hfp::certify_strong_monotone(fx::identity(2), 1.0, 200, 0);
    EXPECT_TRUE(id.passed);
    EXPECT_NEAR(id.worst_margin, 0.0, 1e-12);

    EXPECT_TRUE(hfp::certify_strong_monotone(fx::scaled(2.0, 2), 2.0, 200, 0).passed);
    EXPECT_FALSE(hfp::certify_strong_monotone(fx::rotation(kPi / 2), 0.1, 200, 0).passed);
}

TEST(CertifyNearlyNonexpansive, Examples) {
    EXPECT_TRUE(hfp::certify_nearly_nonexpansive(fx::proj_affine(make_vector({1, 2}), 1.0), NearnessSequence::zero(),
                                                 5, 200, 0)
                    .passed);
    const auto T = fx::sahu_step();
    EXPECT_TRUE(hfp::certify_nearly_nonexpansive(T, NearnessSequence::leading({0.5}), 4, 2000, 0).passed);

    const auto fail = hfp::certify_nearly_nonexpansive(T, NearnessSequence::leading({0.2}), 1, 2000, 0);
    ASSERT_FALSE(fail.passed);
    ASSERT_TRUE(fail.witness.has_value());
    const double a = fail.witness->first[0];
    const double b = fail.witness->second[0];
    EXPECT_TRUE((a <= 0.5) != (b <= 0.5)) << a << " " << b;
    EXPECT_EQ(fail.witness_power, 1U);
}

TEST(CertifyNearlyNonexpansive, GridSearchOverUnitSquare) {
    // Exhaustive check of the sahu_step inequality on a grid of pairs.
    const auto T = fx::sahu_step();
    const auto seq = NearnessSequence::leading({0.5});
    double worst = -1.0;
    for (int i = 0; i <= 200; ++i) {
        for (int j = 0; j <= 200; ++j) {
            const Vector x = make_vector({i / 200.0});
            const Vector y = make_vector({j / 200.0});
            for (std::size_t n = 1; n <= 4; ++n) worst = std::max(worst, hfp::nearly_margin(T, seq, n, x, y));
        }
    }
    EXPECT_LE(worst, 1e-12);
}

TEST(CertifyCombinedMonotone, Examples) {
    const auto eq = hfp::certify_combined_monotone(fx::identity(2), fx::zero(2), 0.0, 1.0, 200, 0);
    EXPECT_TRUE(eq.passed);
    EXPECT_NEAR(eq.worst_margin, 0.0, 1e-12);

    const auto half = hfp::certify_combined_monotone(fx::identity(2), fx::identity(2), 0.5, 1.0, 200, 0);
    EXPECT_TRUE(half.passed);
    EXPECT_NEAR(half.worst_margin, 0.0, 1e-12);

    EXPECT_THROW(hfp::certify_combined_monotone(fx::identity(2), fx::identity(2), 1.0, 1.0, 200, 0),
                 hfp::UsageError);
    EXPECT_THROW(hfp::certify_combined_monotone(fx::zero(2), fx::zero(2), 0.0, 1.0, 200, 0), hfp::UsageError);
}

TEST(NuConstant, Examples) {
    EXPECT_EQ(hfp::nu_constant(1.0, 1.0, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(hfp::nu_constant(0.5, 1.0, 1.0), 0.5);
    EXPECT_NEAR(hfp::nu_constant(0.4, 2.0, 2.0), 0.8, 1e-15);
    const double tiny = hfp::nu_constant(1e-8, 1.0, 1.0);
    EXPECT_GT(tiny, 0.0);
    EXPECT_LT(tiny, 1e-7);
    EXPECT_THROW(hfp::nu_constant(2.0, 1.0, 1.0), hfp::UsageError);
    EXPECT_THROW(hfp::nu_constant(0.0, 1.0, 1.0), hfp::UsageError);
}

TEST(CertifyYamadaContraction, Examples) {
    const auto id = hfp::certify_yamada_contraction(fx::identity(2), 0.5, 1.0, 200, 0);
    EXPECT_TRUE(id.passed);
    EXPECT_NEAR(id.worst_margin, 0.0, 1e-12);
    EXPECT_THROW(hfp::certify_yamada_contraction(fx::identity(2), 1.0, 1.0, 200, 0), hfp::UsageError);
    EXPECT_TRUE(hfp::certify_yamada_contraction(fx::scaled(2.0, 2), 0.5, 0.4, 200, 0).passed);
    EXPECT_THROW(hfp::certify_yamada_contraction(fx::identity(2), 0.5, 2.5, 200, 0), hfp::UsageError);
}

struct NamedMapping {
    std::string label;
    Mapping map;
};

std::vector<NamedMapping> catalog() {
    Eigen::Matrix2d A;
    A << 2, 1, 1, 3;
    return {
        {"identity", fx::identity(3)},
        {"zero", fx::zero(2)},
        {"constant", fx::constant(make_vector({1, -2}))},
        {"scaled", fx::scaled(1.5, 2)},
        {"contraction", fx::contraction(0.7, 2)},
        {"linear", fx::linear(A)},
        {"linear_diag", fx::linear(Eigen::Vector2d(1, 2).asDiagonal().toDenseMatrix())},
        {"proj_affine", fx::proj_affine(make_vector({1, 1}), 2.0)},
        {"projection", fx::projection(ConvexSet::box(make_vector({-1, 0}), make_vector({1, 2})))},
        {"rotation", fx::rotation(kPi / 4)},
        {"averaged_rotation", fx::averaged_rotation(0.5, kPi / 4)},
        {"sahu_step", fx::sahu_step()},
    };
}

TEST(Fixtures, DeclaredMetadataPassesOwnCertifier) {
    constexpr std::size_t kSamples = 10000;
    for (const auto& [label, M] : catalog()) {
        const auto& meta = M.meta();
        if (meta.lipschitz) {
            const auto c = hfp::certify_lipschitz(M, *meta.lipschitz, kSamples, 0);
            EXPECT_TRUE(c.passed) << label << " L margin " << c.worst_margin;
        }
        if (meta.strong_monotone) {
            const auto c = hfp::certify_strong_monotone(M, *meta.strong_monotone, kSamples, 0);
            EXPECT_TRUE(c.passed) << label << " eta margin " << c.worst_margin;
        }
        if (meta.nearly) {
            const auto c = hfp::certify_nearly_nonexpansive(M, *meta.nearly, 8, kSamples, 0);
            EXPECT_TRUE(c.passed) << label << " nearly margin " << c.worst_margin;
            EXPECT_TRUE(hfp::nearness_sequence_plausible(*meta.nearly)) << label;
        }
    }
}

TEST(Fixtures, LinearEigenvalueConstants) {
    const auto F = fx::linear(Eigen::Vector2d(1, 2).asDiagonal().toDenseMatrix());
    EXPECT_DOUBLE_EQ(*F.meta().strong_monotone, 1.0);
    EXPECT_DOUBLE_EQ(*F.meta().lipschitz, 2.0);
    Eigen::Matrix2d asym;
    asym << 1, 1, 0, 1;
    EXPECT_THROW(fx::linear(asym), hfp::ProblemError);
    EXPECT_THROW(fx::linear(Eigen::Matrix2d(-Eigen::Matrix2d::Identity())), hfp::ProblemError);
}

TEST(Fixtures, ClosedFormPowerMatchesRepeatedEvaluation) {
    for (const auto& [label, M] : catalog()) {
        const auto& closed = M.meta().closed_form_power;
        if (!closed) continue;
        hfp::Rng rng(0);
        for (int i = 0; i < 100; ++i) {
            const Vector x = hfp::sample_point(M.domain(), rng);
            EXPECT_LE((closed(1, x) - M(x)).norm(), 1e-12) << label;
            Vector y = x;
            for (std::size_t n = 1; n <= 64; ++n) {
                y = M(y);
                ASSERT_LE((closed(n, x) - y).norm(), 1e-9) << label << " n = " << n;
            }
        }
    }
}

bool same_certificate(const hfp::Certificate& a, const hfp::Certificate& b) {
    return a.passed == b.passed && a.worst_margin == b.worst_margin && a.witness == b.witness &&
           a.witness_power == b.witness_power && a.samples_used == b.samples_used && a.seed == b.seed;
}

TEST(Certificates, BitIdenticalAcrossRuns) {
    const auto T = fx::sahu_step();
    const auto seq = NearnessSequence::leading({0.2});
    EXPECT_TRUE(same_certificate(hfp::certify_nearly_nonexpansive(T, seq, 3, 500, 11),
                                 hfp::certify_nearly_nonexpansive(T, seq, 3, 500, 11)));
    const auto F = fx::scaled(2.0, 3);
    EXPECT_TRUE(same_certificate(hfp::certify_lipschitz(F, 1.0, 500, 5), hfp::certify_lipschitz(F, 1.0, 500, 5)));
    EXPECT_TRUE(same_certificate(hfp::certify_yamada_contraction(F, 0.3, 0.4, 500, 5),
                                 hfp::certify_yamada_contraction(F, 0.3, 0.4, 500, 5)));
}

TEST(Certificates, FailedWitnessReviolates) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto lip = hfp::certify_lipschitz(fx::scaled(1.2, 2), 1.0, 100, seed);
        ASSERT_FALSE(lip.passed);
        EXPECT_GT(hfp::lipschitz_margin(fx::scaled(1.2, 2), 1.0, lip.witness->first, lip.witness->second),
                  hfp::kCertifyTol);

        const auto F = fx::rotation(kPi / 2);
        const auto mono = hfp::certify_strong_monotone(F, 0.1, 100, seed);
        ASSERT_FALSE(mono.passed);
        EXPECT_GT(hfp::strong_monotone_margin(F, 0.1, mono.witness->first, mono.witness->second), hfp::kCertifyTol);

        const auto T = fx::sahu_step();
        const auto seq = NearnessSequence::leading({0.2});
        const auto nearly = hfp::certify_nearly_nonexpansive(T, seq, 2, 1000, seed);
        ASSERT_FALSE(nearly.passed);
        EXPECT_GT(hfp::nearly_margin(T, seq, nearly.witness_power, nearly.witness->first, nearly.witness->second),
                  hfp::kCertifyTol);
    }
}

TEST(NearnessSequence, Plausibility) {
    EXPECT_TRUE(hfp::nearness_sequence_plausible(NearnessSequence::zero()));
    EXPECT_TRUE(hfp::nearness_sequence_plausible(NearnessSequence::power(1.0, 2.0)));
    EXPECT_FALSE(hfp::nearness_sequence_plausible(NearnessSequence::power(1.0, 0.1)));
    EXPECT_FALSE(hfp::nearness_sequence_plausible({[](std::size_t) { return 0.1; }, 1}));
}

} // namespace
