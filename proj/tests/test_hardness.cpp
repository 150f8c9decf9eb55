#include "cryptosplit/builtins.hpp"
#include "cryptosplit/hardness.hpp"
#include "cryptosplit/lp.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cryptosplit;

namespace {

Exact E(Rational a, Rational b, Rational c, Rational d) { return Exact{{a, b, c, d}}; }

Rational R(long n, long d = 1)
{
    Rational r(n, d);
    r.canonicalize();
    return r;
}

} // namespace

TEST(UpperBound, ClosedFormValues)
{
    auto const q = R(1, 4);
    EXPECT_EQ(s_upper(E(q, q, q, q)), R(47, 128));
    EXPECT_EQ(s_upper(E(q, q, q, q), UpperVariant::brody), R(3, 8));
    EXPECT_EQ(s_upper(E(1, 0, 0, 0)), 0);
    EXPECT_EQ(s_upper(E(R(1, 2), 0, R(1, 2), 0)), R(1, 2));
    EXPECT_EQ(s_upper(E(0, R(1, 2), 0, R(1, 2))), R(1, 2));
}

TEST(UpperBound, VariantsDifferByProductTerm)
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i) {
        auto const d = detail::random_distribution(rng, 97);
        Rational const diff = s_upper(d, UpperVariant::brody) - s_upper(d, UpperVariant::adapted);
        ASSERT_EQ(diff, 2 * d[0] * d[1] * d[2] * d[3]);
    }
}

TEST(UpperBound, SymmetricUnderOrbit)
{
    std::mt19937_64 rng(4);
    for (int i = 0; i < 2000; ++i) {
        auto const d = detail::random_distribution(rng, 64);
        for (auto g : all_symmetries)
            ASSERT_EQ(s_upper(apply(g, d)), s_upper(d));
    }
}

TEST(UpperBound, HomogeneousExtension)
{
    EXPECT_EQ(s_upper_homogeneous(Lattice{{0, 0, 0, 0}}), 0);
    EXPECT_EQ(s_upper_homogeneous(Lattice{{3, 3, 3, 3}}), R(141, 32));
    EXPECT_EQ(s_upper_homogeneous(Lattice{{6, 6, 6, 6}}), 2 * s_upper_homogeneous(Lattice{{3, 3, 3, 3}}));
}

TEST(UpperBound, ConsistentWithCertifiedLowerBounds)
{
    for (auto const& cs : {twobit_constraints(), thm29_constraints()}) {
        auto const v = verify_certificate(cs, std::nullopt);
        ASSERT_TRUE(v.verified);
        EXPECT_GE(s_upper_homogeneous(cs.root), v.bound);
        EXPECT_GE(s_ub(cs.root), v.bound);
    }
    EXPECT_LE(R(449, 1344), R(47, 128));
}

TEST(ZeroBitCondition, BothVariantsPass)
{
    for (auto v : {UpperVariant::adapted, UpperVariant::brody}) {
        auto const r = check_c2prime(v);
        EXPECT_TRUE(r.pass);
        EXPECT_EQ(r.checked, 6u);
    }
}

TEST(ZeroBitCondition, CorruptedBoundFails)
{
    UpperFn const shifted = [](Exact const& d) {
        return Rational((1 - (upper_f<Rational>(d[0], d[1], d[2], d[3], UpperVariant::adapted) + 1)) / 4);
    };
    auto const r = check_c2prime(shifted);
    EXPECT_FALSE(r.pass);
    bool vertex = false;
    for (auto const& v : r.violations)
        vertex = vertex || v.point.front() == "1,0,0,0";
    EXPECT_TRUE(vertex);
}

TEST(ZeroBitCondition, DominatesZeroBitValue)
{
    for (auto v : {UpperVariant::adapted, UpperVariant::brody}) {
        auto const r = check_dominates_succ0(2000, 5, v);
        EXPECT_TRUE(r.pass) << to_json(r).dump();
        EXPECT_EQ(r.checked, 35u + 2000u);
    }
}

TEST(Concavity, AllowedSplitsSampled)
{
    for (auto v : {UpperVariant::adapted, UpperVariant::brody}) {
        auto const r = check_c1_sampling(3000, 6, v);
        EXPECT_TRUE(r.pass) << to_json(r).dump();
        EXPECT_EQ(r.checked, 3000u);
    }
}

TEST(Concavity, TwoBitSplit)
{
    Lattice const d{{3, 3, 3, 3}}, l{{2, 2, 1, 1}}, r{{1, 1, 2, 2}};
    ASSERT_TRUE(is_allowed_split(d, l, r, 2));
    EXPECT_GE(s_upper_homogeneous(d), s_upper_homogeneous(l) + s_upper_homogeneous(r));
}

TEST(UbBound, SuperadditiveAndExamples)
{
    EXPECT_TRUE(ub_superadditive_check(20000, 7).pass);
    EXPECT_EQ(s_ub(Lattice{{3, 3, 3, 3}}), 6);
    EXPECT_EQ(s_ub(Lattice{{7, 7, 6, 4}}), 10);
    EXPECT_EQ(s_ub(Lattice{{5, 0, 0, 5}}), 0);
}

TEST(Hessian, OriginAndClosedForms)
{
    auto const h = hessian_fq(Rational(0), Rational(0), Rational(0));
    EXPECT_EQ(h[0][0], 16);
    EXPECT_EQ(h[1][1], 4);
    EXPECT_EQ(h[0][1], 8);
    EXPECT_EQ(determinant(h), 0);
    auto const hb = hessian_fq(Rational(0), Rational(0), Rational(1), UpperVariant::brody);
    EXPECT_EQ(determinant(hb), determinant_factored(Rational(0), Rational(0), Rational(1), UpperVariant::brody));
    EXPECT_EQ(determinant(hb), 32);
}

TEST(Hessian, MatchesFiniteDifferences)
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.01, 0.98);
    for (auto v : {UpperVariant::adapted, UpperVariant::brody})
        for (int i = 0; i < 500; ++i) {
            double const a = u(rng), b = (1 - a) * u(rng);
            double const q = std::ldexp(1.0, int(rng() % 13) - 6);
            auto const exact = hessian_fq<double>(a, b, q, v);
            auto const fd = hessian_fd(a, b, q, v);
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c)
                    ASSERT_NEAR(fd[r][c], exact[r][c], 1e-4 * std::max(1.0, std::abs(exact[r][c])))
                        << a << " " << b << " " << q;
        }
}

TEST(Hessian, FactoredDeterminantAndSymmetry)
{
    std::mt19937_64 rng(9);
    for (int i = 0; i < 500; ++i) {
        auto const d = detail::random_distribution(rng, 50);
        Rational const a = d[0], b = d[1];
        Rational const q = R(long(rng() % 40), long(rng() % 7 + 1));
        for (auto v : {UpperVariant::adapted, UpperVariant::brody})
            ASSERT_EQ(determinant(hessian_fq(a, b, q, v)), determinant_factored(a, b, q, v));
        if (q > 0) {
            ASSERT_EQ(hessian_fq(b, a, Rational(1 / q))[0][0], hessian_fq(a, b, q)[1][1]);
        }
    }
}

TEST(Hessian, PolynomialChain)
{
    EXPECT_EQ(p3(Rational(0), Rational(0)), 0);
    EXPECT_EQ(t_bound(Rational(0)), 0);
    EXPECT_EQ(t_bound(Rational(1)), 0);
    EXPECT_EQ(p3(Rational(1), Rational(0)), 4);
    EXPECT_EQ(p3(Rational(0), Rational(1)), 4);
    for (int i = 0; i <= 40; ++i)
        for (int j = 0; i + j <= 40; ++j) {
            Rational const a = R(i, 40), b = R(j, 40);
            ASSERT_GE(p3(a, b), t_bound(Rational(a + b)));
            ASSERT_GE(t_bound(Rational(a + b)), 0);
            ASSERT_GE(p2(a, b), 0);
            ASSERT_GE(p4(a, b), 0);
            if (i + j == 40) {
                ASSERT_GE(p3(a, b), 4);
            }
        }
}

TEST(Hessian, GridValues)
{
    auto const qs = q_values(21);
    EXPECT_EQ(qs.size(), 22u);
    EXPECT_EQ(qs.front(), 0);
    EXPECT_EQ(qs.back(), 1024);
    EXPECT_EQ(qs[1], R(1, 1024));
    EXPECT_EQ(q_values(1).size(), 3u);
}

TEST(Hessian, SmallGridPassesBothVariants)
{
    for (auto v : {UpperVariant::adapted, UpperVariant::brody}) {
        auto const rep = check_psd(HessianGrid{41, 9, v, 7});
        EXPECT_TRUE(rep.pass) << to_json(rep).dump();
        EXPECT_EQ(rep.points, 41u * 42u / 2u);
        EXPECT_EQ(rep.factorization_mismatches, 0u);
        EXPECT_EQ(rep.symmetry_mismatches, 0u);
        EXPECT_GE(rep.min_h11.value, 0);
        EXPECT_GE(rep.min_det.value, 0);
        EXPECT_LT(rep.max_fd_relative, 1e-5);
        if (v == UpperVariant::adapted) {
            EXPECT_EQ(rep.min_p3.value, 0);
            EXPECT_EQ(rep.min_p3_on_edge.value, 4);
            EXPECT_EQ(rep.chain_failures, 0u);
        }
    }
}

TEST(Hessian, RejectsBadGrid)
{
    EXPECT_THROW(check_psd(HessianGrid{1}), UsageError);
    EXPECT_THROW(check_psd(HessianGrid{11, 0}), UsageError);
    EXPECT_THROW(parse_variant("other"), UsageError);
    EXPECT_EQ(parse_variant("brody"), UpperVariant::brody);
}
