#pragma once

// Independent reference implementations. They share only the Position
// container and Rational with the library and are written for clarity, not
// speed: full lattices instead of canonical storage, explicit permutations
// instead of the symmetry helpers.

#include "cryptosplit/position.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <vector>

namespace oracle {

using cryptosplit::Lattice;
using cryptosplit::Rational;
using Tuple = std::array<int, 4>;

/// Player-optimal output bit against the adversary-optimal blame.
template <class T>
T succ_zero(std::array<T, 4> const& d)
{
    // d = (d01, d11, d02, d12): entry for (bit x, player j) is d[2 (j - 1) + x].
    T best = 0;
    for (int x = 0; x < 2; ++x) {
        T worst = -1;
        for (int blame = 1; blame <= 2; ++blame) {
            T caught_not = 0;
            for (int j = 1; j <= 2; ++j)
                if (j != blame)
                    caught_not += d[std::size_t(2 * (j - 1) + x)];
            if (worst < 0 || caught_not < worst)
                worst = caught_not;
        }
        best = std::max(best, worst);
    }
    return best;
}

inline Tuple flip(Tuple const& t) { return {t[1], t[0], t[3], t[2]}; }
inline Tuple swap_players(Tuple const& t) { return {t[2], t[3], t[0], t[1]}; }

inline std::vector<Tuple> orbit(Tuple const& t)
{
    std::set<Tuple> s{t, flip(t), swap_players(t), flip(swap_players(t))};
    return {s.begin(), s.end()};
}

inline Tuple representative(Tuple const& t)
{
    auto o = orbit(t);
    return *std::max_element(o.begin(), o.end());
}

inline std::size_t count_orbits(int T)
{
    std::set<Tuple> reps;
    for (int a = 0; a <= T; ++a)
        for (int b = 0; b <= T; ++b)
            for (int c = 0; c <= T; ++c)
                for (int d = 0; d <= T; ++d)
                    reps.insert(representative({a, b, c, d}));
    return reps.size();
}

/// Allowed-split test straight from the definition, with an explicit lambda.
inline bool allowed(std::array<Rational, 4> const& d, std::array<Rational, 4> const& d0,
                    std::array<Rational, 4> const& d1, int player)
{
    for (int i = 0; i < 4; ++i)
        if (d0[i] < 0 || d1[i] < 0 || d0[i] + d1[i] != d[i])
            return false;
    int const o0 = 2 * (2 - player), o1 = o0 + 1; // the other player's coordinates
    Rational const mass = d[o0] + d[o1];
    if (mass == 0)
        return true;
    Rational const lambda = (d0[o0] + d0[o1]) / mass;
    return d0[o0] == lambda * d[o0] && d0[o1] == lambda * d[o1];
}

/// Value iteration of the search over the full lattice {0..T}^4 (no symmetry
/// reduction), relaxed splits with the floored coordinate at each of the
/// four positions, and downward scaling, to a floating fixpoint.
class FullLatticeSearch {
public:
    explicit FullLatticeSearch(int T) : T_(T), side_(T + 1), s_(std::size_t(side_ * side_ * side_ * side_))
    {
        for (int a = 0; a <= T; ++a)
            for (int b = 0; b <= T; ++b)
                for (int c = 0; c <= T; ++c)
                    for (int d = 0; d <= T; ++d)
                        s_[idx({a, b, c, d})] = succ_zero<double>({double(a), double(b), double(c), double(d)});
    }

    double value(Tuple const& t) const { return s_[idx(t)]; }

    void run(double eps = 1e-13, int max_rounds = 10000)
    {
        for (int r = 0; r < max_rounds; ++r) {
            double delta = 0;
            for (int a = 0; a <= T_; ++a)
                for (int b = 0; b <= T_; ++b)
                    for (int c = 0; c <= T_; ++c)
                        for (int d = 0; d <= T_; ++d)
                            delta = std::max(delta, improve({a, b, c, d}));
            if (delta < eps)
                return;
        }
    }

private:
    std::size_t idx(Tuple const& t) const
    {
        return std::size_t(((t[0] * side_ + t[1]) * side_ + t[2]) * side_ + t[3]);
    }

    // Relaxed splits floor the partner coordinate `fc` of coordinate `pc`.
    double improve(Tuple const& t)
    {
        double& cur = s_[idx(t)];
        double const old = cur;
        static constexpr std::array<std::array<int, 2>, 4> pairs{{{2, 3}, {3, 2}, {0, 1}, {1, 0}}};
        for (auto const& [pc, fc] : pairs) {
            int const o0 = pc < 2 ? 2 : 0; // the free player's coordinates
            int const f0 = o0, f1 = o0 + 1;
            int const P = t[std::size_t(pc)], F = t[std::size_t(fc)];
            int const Pext = P > 0 ? P : F;
            for (int x = 0; x <= t[std::size_t(f0)]; ++x)
                for (int y = 0; y <= t[std::size_t(f1)]; ++y)
                    for (int p = 0; p <= Pext; ++p) {
                        Tuple l{}, r{};
                        l[std::size_t(f0)] = x;
                        l[std::size_t(f1)] = y;
                        r[std::size_t(f0)] = t[std::size_t(f0)] - x;
                        r[std::size_t(f1)] = t[std::size_t(f1)] - y;
                        if (P > 0) {
                            l[std::size_t(pc)] = p;
                            r[std::size_t(pc)] = P - p;
                            l[std::size_t(fc)] = int((long long)F * p / P);
                            r[std::size_t(fc)] = int((long long)F * (P - p) / P);
                        } else {
                            l[std::size_t(pc)] = r[std::size_t(pc)] = 0;
                            l[std::size_t(fc)] = p;
                            r[std::size_t(fc)] = F - p;
                        }
                        cur = std::max(cur, s_[idx(l)] + s_[idx(r)]);
                    }
        }
        int const mx = std::max({t[0], t[1], t[2], t[3]});
        for (int lambda = 2; mx > 0 && lambda * mx <= T_; ++lambda)
            cur = std::max(cur, s_[idx({lambda * t[0], lambda * t[1], lambda * t[2], lambda * t[3]})] / lambda);
        return cur - old;
    }

    int T_, side_;
    std::vector<double> s_;
};

/// Hand evaluation of the scale-12 certificate: every value is a closed
/// expression except s(7,7,6,4), which satisfies s = 75/12 + (2/9) s.
struct Thm29Values {
    Rational s5568, s6_12, s4532, s7764, root;

    Thm29Values()
    {
        // Leaves take their zero-bit values: (2,2,0,2) 2, (3,0,3,3) 3, (0,3,3,3) 3,
        // (4,5,4,0) 4, (1,1,1,0) 1, (1,0,1,1) 1, (0,2,2,2) 2, (0,6,2,6) 6,
        // (3,3,0,3) 3, (3,0,3,2) 3, (0,1,1,1) 1.
        s5568 = 2 + (3 + 3);
        Rational const s5413 = 1 + 3;
        Rational const s1233 = 1 + 2;
        s6_12 = (6 + s5413) + s1233;
        Rational const s1212 = s6_12 / 6;
        Rational const s4524 = s1212 + (1 + 2);
        s4532 = (s4524 + 4) / 2;
        Rational const s2232 = 1 + (1 + 1);
        // s(3,2,3,2) = (s(3,0,3,2) + 2 s(3,3,3,2)) / 3, s(3,3,3,2) = (s(7,7,6,4) + s(2,2,3,2)) / 3,
        // so s(7,7,6,4) = c + k s(7,7,6,4).
        Rational const c = s4532 + Rational(3) / 3 + 2 * s2232 / 9;
        Rational const k = Rational(2, 9);
        s7764 = c / (1 - k);
        root = s7764 + s5568;
    }
};

/// Least fixpoint of a monotone constraint system by Kleene iteration in
/// double precision: zero-bit rows raise, split rows add, scale rows tie.
struct Row {
    enum Kind { split, scale, zerobit } kind;
    std::size_t a = 0, b = 0, c = 0; // split: parent, left, right; scale: base, scaled
    double k = 0;                    // scale factor or zero-bit constant
};

inline std::vector<double> kleene(std::size_t n, std::vector<Row> const& rows, int max_iter = 1000000)
{
    std::vector<double> x(n, 0.0);
    for (int it = 0; it < max_iter; ++it) {
        double delta = 0;
        auto raise = [&](std::size_t v, double val) {
            if (val > x[v]) {
                delta = std::max(delta, val - x[v]);
                x[v] = val;
            }
        };
        for (auto const& r : rows) {
            switch (r.kind) {
            case Row::zerobit:
                raise(r.a, r.k);
                break;
            case Row::split:
                raise(r.a, x[r.b] + x[r.c]);
                break;
            case Row::scale:
                raise(r.b, r.k * x[r.a]);
                raise(r.a, x[r.b] / r.k);
                break;
            }
        }
        if (delta < 1e-14)
            break;
    }
    return x;
}

} // namespace oracle
