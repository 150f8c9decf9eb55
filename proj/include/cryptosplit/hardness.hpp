#pragma once

#include "errors.hpp"
#include "position.hpp"

#include <json.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace cryptosplit {

/// adapted: f = a^2+b^2+c^2+d^2 - 6(ac+bd) + 8abcd; brody: without the 8abcd term.
enum class UpperVariant { adapted, brody };

inline std::string to_string(UpperVariant v) { return v == UpperVariant::adapted ? "adapted" : "brody"; }

inline UpperVariant parse_variant(std::string const& s)
{
    if (s == "adapted")
        return UpperVariant::adapted;
    if (s == "brody")
        return UpperVariant::brody;
    throw UsageError("unknown variant '" + s + "' (expected adapted or brody)");
}

template <class T>
T upper_f(T const& a, T const& b, T const& c, T const& d, UpperVariant v)
{
    T f = a * a + b * b + c * c + d * d - 6 * (a * c + b * d);
    if (v == UpperVariant::adapted)
        f += 8 * a * b * c * d;
    return f;
}

/// s(D) = (1 - f(D)) / 4 on distributions (|D|_1 = 1).
template <class T>
T s_upper(Position<T, 2> const& d, UpperVariant v = UpperVariant::adapted)
{
    return (1 - upper_f<T>(d[0], d[1], d[2], d[3], v)) / 4;
}

/// Homogeneous extension |D|_1 * s(D / |D|_1); zero at the origin.
inline Rational s_upper_homogeneous(Exact const& d, UpperVariant v = UpperVariant::adapted)
{
    Rational const n = d.norm1();
    if (n == 0)
        return 0;
    Exact u;
    for (std::size_t i = 0; i < 4; ++i)
        u[i] = d[i] / n;
    return n * s_upper(u, v);
}

inline Rational s_upper_homogeneous(Lattice const& d, UpperVariant v = UpperVariant::adapted)
{
    return s_upper_homogeneous(d.cast<Rational>(), v);
}

/// Superadditive bound min(a,c) + min(b,d) on arbitrary splits.
template <class T>
T s_ub(Position<T, 2> const& d)
{
    return ub_min(d);
}

// ---------------------------------------------------------------------------
// Restriction to allowed planes: f_q(a,b) = f(a, b, (1-a-b)/(1+q), q(1-a-b)/(1+q))

template <class T>
T f_q(T const& a, T const& b, T const& q, UpperVariant v = UpperVariant::adapted)
{
    T const rest = 1 - a - b;
    return upper_f<T>(a, b, rest / (1 + q), q * rest / (1 + q), v);
}

template <class T>
using Matrix2 = std::array<std::array<T, 2>, 2>;

/// Closed-form Hessian of f_q in (a, b).
template <class T>
Matrix2<T> hessian_fq(T const& a, T const& b, T const& q, UpperVariant v = UpperVariant::adapted)
{
    T const den = (q + 1) * (q + 1);
    Matrix2<T> h;
    if (v == UpperVariant::adapted) {
        h[0][0] = 4 * (q * q + 4 * (2 * b * b + (3 * a - 2) * b + 1) * q + 4) / den;
        h[0][1] = 4 * (2 * q * q + (6 * a * a + 8 * (2 * b - 1) * a + 6 * b * b - 8 * b + 5) * q + 2) / den;
        h[1][1] = 4 * (4 * q * q + 4 * (2 * a * a + (3 * b - 2) * a + 1) * q + 1) / den;
    } else {
        h[0][0] = 4 * (q + 2) * (q + 2) / den;
        h[0][1] = 2 * (q * q + 3 * (q + 1) * (q + 1) + 1) / den;
        h[1][1] = 4 * (2 * q + 1) * (2 * q + 1) / den;
    }
    h[1][0] = h[0][1];
    return h;
}

template <class T>
T determinant(Matrix2<T> const& h)
{
    return h[0][0] * h[1][1] - h[0][1] * h[1][0];
}

template <class T>
T p1(T const& a, T const& b)
{
    return 1 + (3 * a - 2) * b + 2 * b * b;
}
template <class T>
T p2(T const& a, T const& b)
{
    return 2 * a * a + 6 * b - a * b - 4 * b * b;
}
template <class T>
T p3(T const& a, T const& b)
{
    T const a2 = a * a, b2 = b * b;
    return 12 * (a + b) - 23 * (a2 + b2) - 32 * a * b + 24 * (a2 * a * (1 - b) + b2 * b * (1 - a)) +
           48 * (a * b2 + a2 * b) - 30 * a2 * b2 - 9 * (a2 * a2 + b2 * b2);
}
template <class T>
T p4(T const& a, T const& b)
{
    return 6 * a - 4 * a * a - a * b + 2 * b * b;
}
/// Lower bound for p3 along a + b = s.
template <class T>
T t_bound(T const& s)
{
    return 12 * s - 23 * s * s + 11 * s * s * s;
}

/// det H written as 64q/(1+q)^4 (p2 + p3 q + p4 q^2) (adapted) or 128q/(1+q)^2 (brody).
template <class T>
T determinant_factored(T const& a, T const& b, T const& q, UpperVariant v = UpperVariant::adapted)
{
    T const s = (1 + q) * (1 + q);
    if (v == UpperVariant::brody)
        return 128 * q / s;
    return 64 * q / (s * s) * (p2(a, b) + p3(a, b) * q + p4(a, b) * q * q);
}

/// Central finite-difference Hessian of f_q.
inline Matrix2<double> hessian_fd(double a, double b, double q, UpperVariant v = UpperVariant::adapted, double h = 1e-4)
{
    auto f = [&](double x, double y) { return f_q<double>(x, y, q, v); };
    Matrix2<double> out;
    out[0][0] = (f(a + h, b) - 2 * f(a, b) + f(a - h, b)) / (h * h);
    out[1][1] = (f(a, b + h) - 2 * f(a, b) + f(a, b - h)) / (h * h);
    out[0][1] = out[1][0] = (f(a + h, b + h) - f(a + h, b - h) - f(a - h, b + h) + f(a - h, b - h)) / (4 * h * h);
    return out;
}

// ---------------------------------------------------------------------------
// Checks

struct Violation {
    std::string what;
    std::vector<std::string> point;
};

struct Verdict {
    bool pass = true;
    std::size_t checked = 0;
    std::vector<Violation> violations; // first few only

    void fail(std::string what, std::vector<std::string> point)
    {
        pass = false;
        if (violations.size() < 16)
            violations.push_back({std::move(what), std::move(point)});
    }
};

inline nlohmann::json to_json(Verdict const& v)
{
    nlohmann::json viol = nlohmann::json::array();
    for (auto const& x : v.violations)
        viol.push_back({{"what", x.what}, {"point", x.point}});
    return {{"pass", v.pass}, {"checked", v.checked}, {"violations", std::move(viol)}};
}

using UpperFn = std::function<Rational(Exact const&)>;

inline UpperFn upper_fn(UpperVariant v)
{
    return [v](Exact const& d) { return s_upper(d, v); };
}

/// The six distributions of the relaxed zero-bit condition.
inline Verdict check_c2prime(UpperFn const& s)
{
    Verdict out;
    Rational const h(1, 2);
    std::vector<std::pair<Exact, Rational>> const points{
        {Exact{{h, 0, h, 0}}, h},  {Exact{{0, h, 0, h}}, h},  {Exact{{1, 0, 0, 0}}, 0},
        {Exact{{0, 1, 0, 0}}, 0},  {Exact{{0, 0, 1, 0}}, 0},  {Exact{{0, 0, 0, 1}}, 0},
    };
    for (auto const& [d, need] : points) {
        ++out.checked;
        Rational const v = s(d);
        if (v < need)
            out.fail("s = " + to_string(v) + " < " + to_string(need), {format_position(d)});
    }
    return out;
}

inline Verdict check_c2prime(UpperVariant v) { return check_c2prime(upper_fn(v)); }

namespace detail {

/// Random distribution with rational entries of denominator `den`.
template <class Rng>
Exact random_distribution(Rng& rng, int den)
{
    std::uniform_int_distribution<int> cut(0, den);
    std::array<int, 3> c{cut(rng), cut(rng), cut(rng)};
    std::sort(c.begin(), c.end());
    Exact d{{Rational(c[0], den), Rational(c[1] - c[0], den), Rational(c[2] - c[1], den), Rational(den - c[2], den)}};
    for (auto& x : d.e)
        x.canonicalize();
    return d;
}

} // namespace detail

/// s_upper >= succ_zero on vertices, edge midpoints, and random distributions.
inline Verdict check_dominates_succ0(std::size_t samples, std::uint64_t seed, UpperVariant v = UpperVariant::adapted)
{
    Verdict out;
    auto test = [&](Exact const& d) {
        ++out.checked;
        Rational const s = s_upper(d, v);
        Rational const z = succ_zero(d);
        if (s < z)
            out.fail("s_upper " + to_string(s) + " < succ_zero " + to_string(z), {format_position(d)});
    };
    // Grid with denominator 4 covers the vertices, midpoints, and the uniform point.
    for (int a = 0; a <= 4; ++a)
        for (int b = 0; a + b <= 4; ++b)
            for (int c = 0; a + b + c <= 4; ++c)
                test(Exact{{Rational(a, 4), Rational(b, 4), Rational(c, 4), Rational(4 - a - b - c, 4)}});
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < samples; ++i)
        test(detail::random_distribution(rng, 1 << 12));
    return out;
}

/// Concavity on allowed planes: s'(D) >= s'(D0) + s'(D1) for random allowed splits.
inline Verdict check_c1_sampling(std::size_t samples, std::uint64_t seed, UpperVariant v = UpperVariant::adapted)
{
    Verdict out;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> coin(1, 2);
    std::uniform_int_distribution<int> frac(0, 1024);
    for (std::size_t i = 0; i < samples; ++i) {
        Exact const d = detail::random_distribution(rng, 1 << 10);
        int const j = coin(rng);
        Rational lambda(frac(rng), 1024);
        lambda.canonicalize();
        Exact d0, d1;
        for (int x = 0; x < 2; ++x) {
            auto const own = Exact::index(x, j);
            auto const other = Exact::index(x, 3 - j);
            Rational t(frac(rng), 1024);
            t.canonicalize();
            d0[own] = t * d[own];
            d1[own] = d[own] - d0[own];
            d0[other] = lambda * d[other];
            d1[other] = d[other] - d0[other];
        }
        ++out.checked;
        if (!is_allowed_split(d, d0, d1, j)) {
            out.fail("generated split is not allowed", {format_position(d), format_position(d0)});
            continue;
        }
        Rational const lhs = s_upper_homogeneous(d, v);
        Rational const rhs = s_upper_homogeneous(d0, v) + s_upper_homogeneous(d1, v);
        if (lhs < rhs)
            out.fail("s'(D) " + to_string(lhs) + " < " + to_string(rhs),
                     {format_position(d), format_position(d0), format_position(d1)});
    }
    return out;
}

/// s_UB(D) >= s_UB(D0) + s_UB(D1) for arbitrary integer splits D = D0 + D1.
inline Verdict ub_superadditive_check(std::size_t samples, std::uint64_t seed)
{
    Verdict out;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> ent(0, 100);
    for (std::size_t i = 0; i < samples; ++i) {
        Lattice d0, d1;
        for (std::size_t k = 0; k < 4; ++k) {
            d0[k] = ent(rng);
            d1[k] = ent(rng);
        }
        ++out.checked;
        if (s_ub(d0 + d1) < s_ub(d0) + s_ub(d1))
            out.fail("not superadditive", {format_position(d0), format_position(d1)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Principal-minor grid check

struct HessianGrid {
    int n = 201;      // a, b in {0, 1/(n-1), ..., 1}, a + b <= 1
    int q_levels = 21; // q = 2^e for e in a symmetric range of this many exponents, plus 0 and 2
    UpperVariant variant = UpperVariant::adapted;
    int fd_stride = 10; // finite-difference cross-check on every stride-th grid point
};

inline std::vector<Rational> q_values(int levels)
{
    std::vector<Rational> qs{Rational(0)};
    int const lo = -(levels / 2);
    for (int e = lo; e < lo + levels; ++e) {
        Rational q = 1;
        mpz_class p;
        mpz_ui_pow_ui(p.get_mpz_t(), 2, unsigned(std::abs(e)));
        if (e >= 0)
            q = Rational(p);
        else
            q = Rational(mpz_class(1), p);
        qs.push_back(q);
    }
    qs.push_back(Rational(2));
    std::sort(qs.begin(), qs.end());
    qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
    return qs;
}

struct Extremum {
    Rational value;
    Rational a, b, q;
    bool set = false;

    void offer(Rational const& v, Rational const& a_, Rational const& b_, Rational const& q_)
    {
        if (!set || v < value) {
            value = v;
            a = a_;
            b = b_;
            q = q_;
            set = true;
        }
    }
};

inline nlohmann::json to_json(Extremum const& e)
{
    return {{"exact", to_string(e.value)},
            {"decimal", to_decimal(e.value, 12)},
            {"at", {{"a", to_string(e.a)}, {"b", to_string(e.b)}, {"q", to_string(e.q)}}}};
}

struct HessianReport {
    HessianGrid grid;
    std::size_t points = 0;     // (a, b) points in S
    std::size_t q_count = 0;
    Extremum min_h11, min_det, min_p2, min_p3, min_p4;
    Extremum min_p3_on_edge; // a + b = 1
    std::size_t factorization_mismatches = 0;
    std::size_t chain_failures = 0;    // p3 < t(a + b)
    std::size_t h11_chain_failures = 0; // q^2 + 4 p1 q + 4 < (q - 2)^2
    bool p3_zero_at_origin = false;
    bool t_zero_at_ends = false;
    std::size_t symmetry_mismatches = 0; // H11(b, a, 1/q) != H22(a, b, q), q > 0
    double max_fd_relative = 0;
    bool pass = false;
};

inline HessianReport check_psd(HessianGrid const& grid = {})
{
    if (grid.n < 2)
        throw UsageError("grid needs at least 2 points per axis");
    if (grid.q_levels < 1)
        throw UsageError("need at least one q level");
    HessianReport rep;
    rep.grid = grid;
    auto const qs = q_values(grid.q_levels);
    rep.q_count = qs.size();
    bool const adapted = grid.variant == UpperVariant::adapted;
    int const m = grid.n - 1;
    std::size_t idx = 0;
    for (int i = 0; i <= m; ++i) {
        Rational a(i, m);
        a.canonicalize();
        for (int j = 0; i + j <= m; ++j, ++idx) {
            Rational b(j, m);
            b.canonicalize();
            ++rep.points;
            if (adapted) {
                Rational const v2 = p2(a, b), v3 = p3(a, b), v4 = p4(a, b);
                rep.min_p2.offer(v2, a, b, 0);
                rep.min_p3.offer(v3, a, b, 0);
                rep.min_p4.offer(v4, a, b, 0);
                if (i + j == m)
                    rep.min_p3_on_edge.offer(v3, a, b, 0);
                if (v3 < t_bound(Rational(a + b)))
                    ++rep.chain_failures;
            }
            bool const fd_here = grid.fd_stride > 0 && idx % std::size_t(grid.fd_stride) == 0;
            for (auto const& q : qs) {
                auto const h = hessian_fq(a, b, q, grid.variant);
                Rational const det = determinant(h);
                rep.min_h11.offer(h[0][0], a, b, q);
                rep.min_det.offer(det, a, b, q);
                if (det != determinant_factored(a, b, q, grid.variant))
                    ++rep.factorization_mismatches;
                if (adapted && q * q + 4 * p1(a, b) * q + 4 < (q - 2) * (q - 2))
                    ++rep.h11_chain_failures;
                if (q > 0) {
                    Rational const qi = 1 / q;
                    if (hessian_fq(b, a, qi, grid.variant)[0][0] != h[1][1])
                        ++rep.symmetry_mismatches;
                }
                if (fd_here && q <= 64 && i > 0 && j > 0 && i + j < m) {
                    auto const fd = hessian_fd(a.get_d(), b.get_d(), q.get_d(), grid.variant);
                    for (int r = 0; r < 2; ++r)
                        for (int c = 0; c < 2; ++c) {
                            double const exact = h[r][c].get_d();
                            double const rel = std::abs(fd[r][c] - exact) / std::max(1.0, std::abs(exact));
                            rep.max_fd_relative = std::max(rep.max_fd_relative, rel);
                        }
                }
            }
        }
    }
    rep.p3_zero_at_origin = p3(Rational(0), Rational(0)) == 0;
    rep.t_zero_at_ends = t_bound(Rational(0)) == 0 && t_bound(Rational(1)) == 0;
    rep.pass = rep.min_h11.value >= 0 && rep.min_det.value >= 0 && rep.factorization_mismatches == 0 &&
               rep.symmetry_mismatches == 0 && rep.max_fd_relative <= 1e-5;
    if (adapted)
        rep.pass = rep.pass && rep.min_p2.value >= 0 && rep.min_p3.value >= 0 && rep.min_p4.value >= 0 &&
                   rep.chain_failures == 0 && rep.h11_chain_failures == 0 && rep.p3_zero_at_origin &&
                   rep.t_zero_at_ends;
    return rep;
}

inline nlohmann::json to_json(HessianReport const& r)
{
    nlohmann::json j{{"variant", to_string(r.grid.variant)},
                     {"grid", r.grid.n},
                     {"q_levels", r.grid.q_levels},
                     {"q_values", r.q_count},
                     {"points", r.points},
                     {"min_h11", to_json(r.min_h11)},
                     {"min_det", to_json(r.min_det)},
                     {"factorization_mismatches", r.factorization_mismatches},
                     {"symmetry_mismatches", r.symmetry_mismatches},
                     {"max_fd_relative", r.max_fd_relative},
                     {"pass", r.pass}};
    if (r.grid.variant == UpperVariant::adapted) {
        j["min_p2"] = to_json(r.min_p2);
        j["min_p3"] = to_json(r.min_p3);
        j["min_p4"] = to_json(r.min_p4);
        j["min_p3_on_a_plus_b_1"] = to_json(r.min_p3_on_edge);
        j["p3_chain_failures"] = r.chain_failures;
        j["h11_chain_failures"] = r.h11_chain_failures;
        j["p3_zero_at_origin"] = r.p3_zero_at_origin;
        j["t_zero_at_0_and_1"] = r.t_zero_at_ends;
    }
    return j;
}

} // namespace cryptosplit
