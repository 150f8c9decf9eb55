#pragma once

#include "position.hpp"

#include <cstdint>
#include <utility>

namespace cryptosplit {

/// Compact description of a relaxed split of a lattice position D.
///
/// The split is taken in the image E = apply(variant, D): the first three
/// coordinates of E are partitioned freely and the fourth is floored in
/// proportion to the third, d0 = floor(d * c0 / c). When E has c = 0 and
/// d > 0 the roles of the pair swap: `partner0` is d0 and c stays zero on
/// both sides. When c = d = 0 only (a, b) is partitioned.
struct SplitChoice {
    Symmetry variant = Symmetry::identity;
    std::uint8_t a0 = 0;
    std::uint8_t b0 = 0;
    std::uint8_t partner0 = 0;

    friend bool operator==(SplitChoice const&, SplitChoice const&) = default;
};

/// Floor of (num * k) / den for non-negative integers.
constexpr int floor_ratio(int num, int k, int den) { return int((long long)num * k / den); }

/// Children of the relaxed split `choice` of d, expressed in d's frame.
inline std::pair<Lattice, Lattice> relaxed_children(Lattice const& d, SplitChoice const& choice)
{
    Lattice const img = apply(choice.variant, d);
    int const a = img[0], b = img[1], c = img[2], dd = img[3];
    Lattice l, r;
    l[0] = choice.a0;
    l[1] = choice.b0;
    r[0] = a - choice.a0;
    r[1] = b - choice.b0;
    if (c > 0) {
        l[2] = choice.partner0;
        r[2] = c - choice.partner0;
        l[3] = floor_ratio(dd, l[2], c);
        r[3] = floor_ratio(dd, r[2], c);
    } else if (dd > 0) {
        l[2] = r[2] = 0;
        l[3] = choice.partner0;
        r[3] = dd - choice.partner0;
    } else {
        l[2] = l[3] = r[2] = r[3] = 0;
    }
    return {apply(choice.variant, l), apply(choice.variant, r)};
}

/// Full Split record for `choice`, including sender and floored coordinate.
inline Split<int> make_relaxed_split(Lattice const& d, SplitChoice const& choice)
{
    auto [l, r] = relaxed_children(d, choice);
    Split<int> s;
    s.parent = d;
    s.left = l;
    s.right = r;
    // In the image frame the proportional pair belongs to player 2, so player 1 sends.
    s.player = apply_player(choice.variant, 1);
    bool const exact = (l + r == d);
    s.kind = exact ? SplitKind::exact : SplitKind::relaxed;
    if (!exact)
        s.relaxed_coordinate = source_index(choice.variant, 3);
    return s;
}

/// Upper limit (inclusive) of the free partner coordinate for this variant.
inline int partner_extent(Lattice const& img)
{
    if (img[2] > 0)
        return img[2];
    if (img[3] > 0)
        return img[3];
    return 0;
}

/// Calls f(SplitChoice) for every relaxed split of d in all four symmetric
/// variants. Variants whose image coincides with an earlier variant's image
/// are skipped, as are choices that only swap left and right.
template <class F>
void for_each_split_choice(Lattice const& d, F&& f)
{
    Lattice seen[4];
    int nseen = 0;
    for (auto g : all_symmetries) {
        Lattice const img = apply(g, d);
        bool dup = false;
        for (int i = 0; i < nseen; ++i)
            dup = dup || seen[i] == img;
        if (dup)
            continue;
        seen[nseen++] = img;
        int const na = img[0] + 1, nb = img[1] + 1, nc = partner_extent(img) + 1;
        long const total = long(na) * nb * nc;
        long k = 0;
        for (int a0 = 0; a0 < na; ++a0)
            for (int b0 = 0; b0 < nb; ++b0)
                for (int c0 = 0; c0 < nc; ++c0, ++k) {
                    if (k > total - 1 - k)
                        continue;
                    f(SplitChoice{g, std::uint8_t(a0), std::uint8_t(b0), std::uint8_t(c0)});
                }
    }
}

/// Every relaxed split of d (both orientations of each pair, all variants).
template <class F>
void enumerate_relaxed_splits(Lattice const& d, F&& f)
{
    Lattice seen[4];
    int nseen = 0;
    for (auto g : all_symmetries) {
        Lattice const img = apply(g, d);
        bool dup = false;
        for (int i = 0; i < nseen; ++i)
            dup = dup || seen[i] == img;
        if (dup)
            continue;
        seen[nseen++] = img;
        int const nc = partner_extent(img);
        for (int a0 = 0; a0 <= img[0]; ++a0)
            for (int b0 = 0; b0 <= img[1]; ++b0)
                for (int c0 = 0; c0 <= nc; ++c0)
                    f(make_relaxed_split(d, SplitChoice{g, std::uint8_t(a0), std::uint8_t(b0), std::uint8_t(c0)}));
    }
}

/// Replaces the floored coordinate of each child by its exact proportional
/// value, producing an allowed split of the parent whose children dominate
/// the relaxed ones.
inline Split<Rational> lift_relaxed(Split<int> const& s)
{
    Split<Rational> out;
    out.parent = s.parent.cast<Rational>();
    out.left = s.left.cast<Rational>();
    out.right = s.right.cast<Rational>();
    out.player = s.player;
    out.kind = SplitKind::exact;
    if (!s.relaxed_coordinate)
        return out;
    std::size_t const fc = *s.relaxed_coordinate;
    // The floored coordinate's partner is the other bit of the same player.
    std::size_t const pc = fc ^ 1;
    Rational const ratio = Rational(s.parent[fc]) / s.parent[pc];
    out.left[fc] = ratio * s.left[pc];
    out.right[fc] = ratio * s.right[pc];
    return out;
}

} // namespace cryptosplit
