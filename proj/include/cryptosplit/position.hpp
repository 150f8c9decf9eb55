#pragma once

#include "rational.hpp"

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cryptosplit {

/// A game position: non-negative masses indexed by (secret bit x, player j).
///
/// Entries are stored player-major, so for two players the layout is
/// (d01, d11, d02, d12), conventionally written (a, b, c, d). Players are
/// numbered 1..K as in the literature on the problem.
template <class T, std::size_t K = 2>
struct Position {
    static constexpr std::size_t players = K;
    static constexpr std::size_t size = 2 * K;

    std::array<T, 2 * K> e{};

    static constexpr std::size_t index(int bit, int player) { return std::size_t(player - 1) * 2 + std::size_t(bit); }

    T& operator()(int bit, int player) { return e[index(bit, player)]; }
    T const& operator()(int bit, int player) const { return e[index(bit, player)]; }
    T& operator[](std::size_t i) { return e[i]; }
    T const& operator[](std::size_t i) const { return e[i]; }

    friend bool operator==(Position const&, Position const&) = default;
    friend std::weak_ordering operator<=>(Position const& l, Position const& r)
    {
        for (std::size_t i = 0; i < size; ++i) {
            if (l.e[i] < r.e[i])
                return std::weak_ordering::less;
            if (r.e[i] < l.e[i])
                return std::weak_ordering::greater;
        }
        return std::weak_ordering::equivalent;
    }

    Position& operator+=(Position const& o)
    {
        for (std::size_t i = 0; i < size; ++i)
            e[i] += o.e[i];
        return *this;
    }
    friend Position operator+(Position l, Position const& r) { return l += r; }
    friend Position operator-(Position l, Position const& r)
    {
        for (std::size_t i = 0; i < size; ++i)
            l.e[i] -= r.e[i];
        return l;
    }
    template <class S>
    friend Position operator*(S const& s, Position p)
    {
        for (auto& x : p.e)
            x *= s;
        return p;
    }

    T norm1() const
    {
        T sum = 0;
        for (auto const& x : e)
            sum += x;
        return sum;
    }

    bool nonnegative() const
    {
        return std::all_of(e.begin(), e.end(), [](T const& x) { return x >= 0; });
    }

    bool is_zero() const
    {
        return std::all_of(e.begin(), e.end(), [](T const& x) { return x == 0; });
    }

    /// Componentwise `*this <= o`.
    bool dominated_by(Position const& o) const
    {
        for (std::size_t i = 0; i < size; ++i)
            if (e[i] > o.e[i])
                return false;
        return true;
    }

    template <class U>
    Position<U, K> cast() const
    {
        Position<U, K> out;
        for (std::size_t i = 0; i < size; ++i)
            out.e[i] = U(e[i]);
        return out;
    }
};

using Lattice = Position<int>;
using Exact = Position<Rational>;

// ---------------------------------------------------------------------------
// Baseline value functions

/// Value of the zero-bit strategy: max over x of (row sum - row max).
template <class T, std::size_t K>
T succ_zero(Position<T, K> const& d)
{
    T best = 0;
    for (int x = 0; x < 2; ++x) {
        T sum = 0;
        T mx = d(x, 1);
        for (int j = 1; j <= int(K); ++j) {
            sum += d(x, j);
            mx = std::max<T>(mx, d(x, j));
        }
        T const v = sum - mx;
        if (x == 0 || v > best)
            best = v;
    }
    return best;
}

/// Superadditive upper bound min(a,c) + min(b,d).
template <class T>
T ub_min(Position<T, 2> const& d)
{
    return T(std::min<T>(d[0], d[2]) + std::min<T>(d[1], d[3]));
}

/// Exact value when a closed form is known: a zero entry gives the zero-bit
/// value, and a+b <= min(c,d) (or the player-swapped c+d <= min(a,b)) gives
/// the smaller player's total mass.
template <class T>
std::optional<T> closed_form_value(Position<T, 2> const& d)
{
    T const a = d[0], b = d[1], c = d[2], dd = d[3];
    if (b == 0 || dd == 0)
        return std::min<T>(a, c);
    if (a == 0 || c == 0)
        return std::min<T>(b, dd);
    if (a + b <= std::min<T>(c, dd))
        return T(a + b);
    if (c + dd <= std::min<T>(a, b))
        return T(c + dd);
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Symmetry group (k = 2): generated by secret-flip and player-swap.

enum class Symmetry : std::uint8_t {
    identity = 0,
    flip = 1,      // (a,b,c,d) -> (b,a,d,c)
    swap = 2,      // (a,b,c,d) -> (c,d,a,b)
    flip_swap = 3, // (a,b,c,d) -> (d,c,b,a)
};

inline constexpr std::array<Symmetry, 4> all_symmetries{Symmetry::identity, Symmetry::flip, Symmetry::swap,
                                                        Symmetry::flip_swap};

/// Group composition; the group is Z2 x Z2, so every element is its own inverse.
constexpr Symmetry compose(Symmetry g, Symmetry h) { return Symmetry(std::uint8_t(g) ^ std::uint8_t(h)); }

constexpr bool flips_secret(Symmetry g) { return (std::uint8_t(g) & 1) != 0; }
constexpr bool swaps_players(Symmetry g) { return (std::uint8_t(g) & 2) != 0; }

/// Coordinate of the image that lands at coordinate `i`: image[i] = d[source_index(g, i)].
constexpr std::size_t source_index(Symmetry g, std::size_t i)
{
    return i ^ std::size_t(std::uint8_t(g) & 1) ^ (std::size_t(std::uint8_t(g) & 2));
}

template <class T>
Position<T, 2> apply(Symmetry g, Position<T, 2> const& d)
{
    Position<T, 2> out;
    for (std::size_t i = 0; i < 4; ++i)
        out[i] = d[source_index(g, i)];
    return out;
}

/// Player label after applying g.
constexpr int apply_player(Symmetry g, int player) { return swaps_players(g) ? 3 - player : player; }
constexpr int apply_bit(Symmetry g, int bit) { return flips_secret(g) ? 1 - bit : bit; }

template <class T>
struct Canonical {
    Position<T, 2> position;
    Symmetry applied; // position == apply(applied, original)
};

/// Lexicographically greatest element of the symmetry orbit; its first entry
/// is the maximum entry.
template <class T>
Canonical<T> canonicalize(Position<T, 2> const& d)
{
    Canonical<T> best{d, Symmetry::identity};
    for (auto g : {Symmetry::flip, Symmetry::swap, Symmetry::flip_swap}) {
        auto img = apply(g, d);
        if (img > best.position)
            best = {std::move(img), g};
    }
    return best;
}

template <class T>
bool is_canonical(Position<T, 2> const& d)
{
    return canonicalize(d).position == d;
}

// ---------------------------------------------------------------------------
// Splits

enum class SplitKind : std::uint8_t { exact, relaxed };

template <class T, std::size_t K = 2>
struct Split {
    Position<T, K> parent;
    Position<T, K> left;
    Position<T, K> right;
    int player = 1; // the sender; coordinates of other players stay proportional
    SplitKind kind = SplitKind::exact;
    std::optional<std::size_t> relaxed_coordinate; // floored coordinate, parent frame
};

/// Whether (d0, d1) is a `player`-allowed split of d: d0 + d1 = d and d0 is
/// proportional to d on the coordinates of every other player.
template <class T, std::size_t K>
bool is_allowed_split(Position<T, K> const& d, Position<T, K> const& d0, Position<T, K> const& d1, int player)
{
    if (player < 1 || player > int(K))
        throw std::invalid_argument("player out of range");
    if (!d.nonnegative() || !d0.nonnegative() || !d1.nonnegative())
        return false;
    if (d0 + d1 != d)
        return false;
    // Proportionality: all ratios d0[i]/d[i] over non-player coordinates with
    // d[i] > 0 agree (cross-multiplied); d[i] == 0 already forces d0[i] == 0.
    std::optional<std::size_t> ref;
    for (int j = 1; j <= int(K); ++j) {
        if (j == player)
            continue;
        for (int x = 0; x < 2; ++x) {
            auto const i = Position<T, K>::index(x, j);
            if (d[i] == 0)
                continue;
            if (!ref) {
                ref = i;
                continue;
            }
            if (d0[i] * d[*ref] != d0[*ref] * d[i])
                return false;
        }
    }
    return true;
}

/// Classify (l, r) as a split of d by `player`, allowing the children to be
/// dominated by an allowed split (e0, e1) with e0 >= l and e1 >= r. Returns
/// nullopt when no such allowed split exists.
template <class T, std::size_t K>
std::optional<SplitKind> classify_split(Position<T, K> const& d, Position<T, K> const& l, Position<T, K> const& r,
                                        int player)
{
    if (is_allowed_split(d, l, r, player))
        return SplitKind::exact;
    if (!d.nonnegative() || !l.nonnegative() || !r.nonnegative())
        return std::nullopt;
    // Other players: need lambda with lambda*d >= l and (1-lambda)*d >= r.
    Rational need_l = 0, need_r = 0;
    for (int j = 1; j <= int(K); ++j) {
        for (int x = 0; x < 2; ++x) {
            auto const i = Position<T, K>::index(x, j);
            if (j == player) {
                if (l[i] + r[i] > d[i])
                    return std::nullopt;
                continue;
            }
            if (d[i] == 0) {
                if (l[i] != 0 || r[i] != 0)
                    return std::nullopt;
                continue;
            }
            Rational const den(d[i]);
            need_l = std::max(need_l, Rational(Rational(l[i]) / den));
            need_r = std::max(need_r, Rational(Rational(r[i]) / den));
        }
    }
    if (need_l + need_r > 1)
        return std::nullopt;
    return SplitKind::relaxed;
}

// ---------------------------------------------------------------------------
// Text form: "a,b,c,d" with integers, decimals, or p/q fractions.

template <class T, std::size_t K = 2>
Position<T, K> parse_position(std::string_view text)
{
    Position<T, K> out;
    std::size_t i = 0;
    std::size_t start = 0;
    for (std::size_t pos = 0; pos <= text.size(); ++pos) {
        if (pos != text.size() && text[pos] != ',')
            continue;
        if (i >= Position<T, K>::size)
            throw std::invalid_argument("too many entries in position: " + std::string(text));
        Rational const v = parse_rational(text.substr(start, pos - start));
        if (v < 0)
            throw std::invalid_argument("negative entry in position: " + std::string(text));
        if constexpr (std::is_integral_v<T>) {
            if (!is_integer(v))
                throw std::invalid_argument("non-integer entry in lattice position: " + std::string(text));
            out[i] = T(v.get_num().get_si());
        } else if constexpr (std::is_floating_point_v<T>) {
            out[i] = T(v.get_d());
        } else {
            out[i] = T(v);
        }
        ++i;
        start = pos + 1;
    }
    if (i != Position<T, K>::size)
        throw std::invalid_argument("dimension mismatch in position: " + std::string(text));
    return out;
}

template <class T, std::size_t K>
std::string format_position(Position<T, K> const& p, char sep = ',')
{
    std::ostringstream os;
    for (std::size_t i = 0; i < Position<T, K>::size; ++i) {
        if (i)
            os << sep;
        if constexpr (std::is_same_v<T, Rational>)
            os << p[i].get_str();
        else
            os << p[i];
    }
    return os.str();
}

} // namespace cryptosplit
