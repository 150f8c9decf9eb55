#include "cryptosplit/position.hpp"
#include "cryptosplit/relaxed_split.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cryptosplit;

namespace {

Lattice L(int a, int b, int c, int d) { return Lattice{{a, b, c, d}}; }

oracle::Tuple tup(Lattice const& p) { return {p[0], p[1], p[2], p[3]}; }

Lattice random_lattice(std::mt19937_64& rng, int T)
{
    std::uniform_int_distribution<int> u(0, T);
    return L(u(rng), u(rng), u(rng), u(rng));
}

} // namespace

TEST(SuccZero, Examples)
{
    EXPECT_EQ(succ_zero(L(3, 3, 3, 3)), 3);
    EXPECT_EQ(succ_zero(L(0, 1, 1, 1)), 1);
    EXPECT_EQ(succ_zero(L(7, 7, 6, 4)), 6);
}

TEST(SuccZero, MatchesBlameOracle)
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20000; ++i) {
        auto const d = random_lattice(rng, 30);
        ASSERT_EQ(succ_zero(d), oracle::succ_zero<int>(tup(d))) << format_position(d);
    }
}

TEST(SuccZero, KEqualsTwoClosedForm)
{
    std::mt19937_64 rng(12);
    for (int i = 0; i < 20000; ++i) {
        auto const d = random_lattice(rng, 30);
        ASSERT_EQ(succ_zero(d), std::max(std::min(d[0], d[2]), std::min(d[1], d[3])));
    }
}

TEST(UbMin, Examples)
{
    EXPECT_EQ(ub_min(L(2, 2, 1, 1)), 2);
    EXPECT_EQ(ub_min(L(0, 0, 5, 7)), 0);
    EXPECT_EQ(ub_min(L(7, 7, 6, 4)), 10);
}

TEST(Canonicalize, Examples)
{
    EXPECT_EQ(canonicalize(L(1, 2, 3, 4)).position, L(4, 3, 2, 1));
    EXPECT_EQ(canonicalize(L(3, 3, 3, 3)).position, L(3, 3, 3, 3));
    EXPECT_EQ(canonicalize(L(0, 1, 1, 1)).position, L(1, 1, 1, 0));
}

TEST(Canonicalize, MatchesOrbitOracleAndStandardForm)
{
    std::mt19937_64 rng(13);
    for (int i = 0; i < 20000; ++i) {
        auto const d = random_lattice(rng, 12);
        auto const c = canonicalize(d);
        ASSERT_EQ(tup(c.position), oracle::representative(tup(d)));
        ASSERT_EQ(apply(c.applied, d), c.position);
        auto const& p = c.position;
        ASSERT_GE(p[0], p[1]);
        ASSERT_GE(p[0], p[2]);
        ASSERT_GE(p[0], p[3]);
    }
}

TEST(Canonicalize, OrbitCounts)
{
    EXPECT_EQ(oracle::count_orbits(1), 7u);
    for (int T : {1, 2, 3, 5, 8})
        EXPECT_EQ(oracle::count_orbits(T), [&] {
            std::size_t n = 0;
            for (int a = 0; a <= T; ++a)
                for (int b = 0; b <= T; ++b)
                    for (int c = 0; c <= T; ++c)
                        for (int d = 0; d <= T; ++d)
                            n += is_canonical(L(a, b, c, d));
            return n;
        }());
}

TEST(Symmetry, GroupStructure)
{
    for (auto g : all_symmetries)
        for (auto h : all_symmetries) {
            auto const p = L(1, 2, 3, 4);
            EXPECT_EQ(apply(g, apply(h, p)), apply(compose(g, h), p));
        }
    EXPECT_EQ(apply(Symmetry::flip, L(1, 2, 3, 4)), L(2, 1, 4, 3));
    EXPECT_EQ(apply(Symmetry::swap, L(1, 2, 3, 4)), L(3, 4, 1, 2));
}

TEST(Invariance, ValueFunctionsUnderSymmetry)
{
    std::mt19937_64 rng(14);
    for (int i = 0; i < 100000; ++i) {
        auto const d = random_lattice(rng, 40);
        auto const c = canonicalize(d).position;
        ASSERT_EQ(succ_zero(c), succ_zero(d));
        ASSERT_EQ(ub_min(c), ub_min(d));
        ASSERT_LE(succ_zero(d), ub_min(d));
    }
}

TEST(Invariance, Homogeneity)
{
    std::mt19937_64 rng(15);
    for (int i = 0; i < 10000; ++i) {
        auto const d = random_lattice(rng, 20);
        for (int lambda : {0, 1, 2, 3, 7}) {
            ASSERT_EQ(succ_zero(lambda * d), lambda * succ_zero(d));
            ASSERT_EQ(ub_min(lambda * d), lambda * ub_min(d));
        }
    }
}

TEST(AllowedSplit, Examples)
{
    EXPECT_TRUE(is_allowed_split(L(3, 3, 3, 3), L(2, 2, 1, 1), L(1, 1, 2, 2), 2));
    EXPECT_TRUE(is_allowed_split(L(2, 2, 1, 1), L(1, 0, 1, 1), L(1, 2, 0, 0), 1));
    EXPECT_FALSE(is_allowed_split(L(2, 2, 1, 1), L(1, 0, 1, 1), L(1, 2, 0, 0), 2));
    auto const d = L(5, 9, 3, 0);
    for (int j : {1, 2})
        EXPECT_TRUE(is_allowed_split(d, d, L(0, 0, 0, 0), j));
}

TEST(AllowedSplit, MatchesDefinitionOracle)
{
    std::mt19937_64 rng(16);
    std::uniform_int_distribution<int> u(0, 6);
    for (int i = 0; i < 50000; ++i) {
        auto const d = L(u(rng), u(rng), u(rng), u(rng));
        Lattice d0;
        for (std::size_t k = 0; k < 4; ++k)
            d0[k] = std::uniform_int_distribution<int>(0, d[k])(rng);
        auto const d1 = d - d0;
        std::array<Rational, 4> rd, r0, r1;
        for (std::size_t k = 0; k < 4; ++k) {
            rd[k] = d[k];
            r0[k] = d0[k];
            r1[k] = d1[k];
        }
        for (int j : {1, 2})
            ASSERT_EQ(is_allowed_split(d, d0, d1, j), oracle::allowed(rd, r0, r1, j))
                << format_position(d) << " " << format_position(d0) << " j=" << j;
    }
}

TEST(AllowedSplit, InvariantUnderJointSymmetry)
{
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> u(0, 5);
    for (int i = 0; i < 20000; ++i) {
        auto const d = L(u(rng), u(rng), u(rng), u(rng));
        Lattice d0;
        for (std::size_t k = 0; k < 4; ++k)
            d0[k] = std::uniform_int_distribution<int>(0, d[k])(rng);
        auto const d1 = d - d0;
        for (auto g : all_symmetries)
            for (int j : {1, 2})
                ASSERT_EQ(is_allowed_split(d, d0, d1, j),
                          is_allowed_split(apply(g, d), apply(g, d0), apply(g, d1), apply_player(g, j)));
    }
}

TEST(RelaxedSplit, Examples)
{
    auto [l, r] = relaxed_children(L(7, 7, 6, 4), SplitChoice{Symmetry::identity, 4, 5, 3});
    EXPECT_EQ(l, L(4, 5, 3, 2));
    EXPECT_EQ(r, L(3, 2, 3, 2));
    std::tie(l, r) = relaxed_children(L(2, 2, 3, 2), SplitChoice{Symmetry::identity, 1, 1, 2});
    EXPECT_EQ(l, L(1, 1, 2, 1));
    EXPECT_EQ(r, L(1, 1, 1, 0));
    std::tie(l, r) = relaxed_children(L(5, 4, 0, 0), SplitChoice{Symmetry::identity, 2, 3, 0});
    EXPECT_EQ(l, L(2, 3, 0, 0));
    EXPECT_EQ(r, L(3, 1, 0, 0));
}

TEST(RelaxedSplit, ZeroPartnerSwapsRoles)
{
    auto [l, r] = relaxed_children(L(3, 2, 0, 4), SplitChoice{Symmetry::identity, 1, 1, 3});
    EXPECT_EQ(l, L(1, 1, 0, 3));
    EXPECT_EQ(r, L(2, 1, 0, 1));
    EXPECT_EQ(l + r, L(3, 2, 0, 4));
}

TEST(RelaxedSplit, EveryEnumeratedSplitLiftsToAllowed)
{
    std::mt19937_64 rng(18);
    std::size_t checked = 0;
    while (checked < 100000) {
        auto const d = random_lattice(rng, 6);
        enumerate_relaxed_splits(d, [&](Split<int> const& s) {
            ++checked;
            ASSERT_TRUE((s.left + s.right).dominated_by(d));
            ASSERT_TRUE(s.left.nonnegative() && s.right.nonnegative());
            auto const lifted = lift_relaxed(s);
            ASSERT_TRUE(is_allowed_split(lifted.parent, lifted.left, lifted.right, lifted.player))
                << format_position(d) << " -> " << format_position(s.left) << " + " << format_position(s.right);
            ASSERT_TRUE(s.left.cast<Rational>().dominated_by(lifted.left));
            ASSERT_TRUE(s.right.cast<Rational>().dominated_by(lifted.right));
            ASSERT_EQ(s.kind == SplitKind::exact, s.left + s.right == d);
        });
    }
}

TEST(RelaxedSplit, RandomChoicesLift)
{
    std::mt19937_64 rng(19);
    for (int i = 0; i < 100000; ++i) {
        auto const d = random_lattice(rng, 20);
        auto const g = all_symmetries[std::uniform_int_distribution<int>(0, 3)(rng)];
        auto const img = apply(g, d);
        SplitChoice ch{g, std::uint8_t(std::uniform_int_distribution<int>(0, img[0])(rng)),
                       std::uint8_t(std::uniform_int_distribution<int>(0, img[1])(rng)),
                       std::uint8_t(std::uniform_int_distribution<int>(0, partner_extent(img))(rng))};
        auto const s = make_relaxed_split(d, ch);
        auto const lifted = lift_relaxed(s);
        ASSERT_TRUE(is_allowed_split(lifted.parent, lifted.left, lifted.right, lifted.player));
        ASSERT_TRUE(classify_split(d, s.left, s.right, s.player).has_value());
    }
}

TEST(ClosedForm, Examples)
{
    EXPECT_EQ(closed_form_value(L(5, 9, 3, 0)), 3);
    EXPECT_EQ(closed_form_value(L(1, 2, 4, 4)), 3);
    EXPECT_FALSE(closed_form_value(L(3, 3, 3, 3)).has_value());
}

TEST(ClosedForm, SymmetricAndWithinBounds)
{
    std::mt19937_64 rng(20);
    for (int i = 0; i < 20000; ++i) {
        auto const d = random_lattice(rng, 15);
        auto const v = closed_form_value(d);
        for (auto g : all_symmetries)
            ASSERT_EQ(closed_form_value(apply(g, d)), v);
        if (v) {
            ASSERT_GE(*v, succ_zero(d));
            ASSERT_LE(*v, ub_min(d));
        }
    }
}

TEST(Text, PositionRoundTrip)
{
    EXPECT_EQ(parse_position<int>("7,7,6,4"), L(7, 7, 6, 4));
    EXPECT_EQ(format_position(L(7, 7, 6, 4)), "7,7,6,4");
    auto const e = parse_position<Rational>("1/2, 0.25,0,3");
    EXPECT_EQ(e[0], Rational(1, 2));
    EXPECT_EQ(e[1], Rational(1, 4));
    EXPECT_THROW(parse_position<int>("1,2,3"), std::invalid_argument);
    EXPECT_THROW(parse_position<int>("1,-2,3,4"), std::invalid_argument);
}

TEST(Text, Rationals)
{
    EXPECT_EQ(parse_rational("449/1344"), Rational(449, 1344));
    EXPECT_EQ(parse_rational("6/4"), Rational(3, 2));
    EXPECT_EQ(to_string(parse_rational("6/4")), "3/2");
    EXPECT_EQ(to_fraction_string(Rational(3)), "3/1");
    EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
    EXPECT_THROW(parse_rational("x"), std::invalid_argument);
}
