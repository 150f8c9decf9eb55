#pragma once

#include "rational.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace cryptosplit {

/// x_i = constant_i + sum_j a_ij x_j with a_ij >= 0.
struct AffineSystem {
    std::vector<Rational> constant;
    std::vector<std::vector<std::pair<std::size_t, Rational>>> terms;

    std::size_t size() const { return constant.size(); }

    void resize(std::size_t n)
    {
        constant.assign(n, Rational(0));
        terms.assign(n, {});
    }

    AffineSystem transposed(std::vector<Rational> constant_t) const
    {
        AffineSystem t;
        t.constant = std::move(constant_t);
        t.terms.assign(size(), {});
        for (std::size_t i = 0; i < size(); ++i)
            for (auto const& [j, a] : terms[i])
                t.terms[j].emplace_back(i, a);
        return t;
    }
};

/// Strongly connected components of the dependency graph i -> j (a_ij != 0),
/// dependencies first.
inline std::vector<std::vector<std::size_t>> dependency_components(AffineSystem const& sys)
{
    std::size_t const n = sys.size();
    constexpr std::size_t none = std::size_t(-1);
    std::vector<std::size_t> index(n, none), low(n, 0), stack;
    std::vector<bool> on_stack(n, false);
    std::vector<std::vector<std::size_t>> out;
    std::size_t counter = 0;
    // Iterative Tarjan: frames hold (node, next edge position).
    std::vector<std::pair<std::size_t, std::size_t>> frames;
    for (std::size_t s = 0; s < n; ++s) {
        if (index[s] != none)
            continue;
        frames.push_back({s, 0});
        index[s] = low[s] = counter++;
        stack.push_back(s);
        on_stack[s] = true;
        while (!frames.empty()) {
            auto& [v, e] = frames.back();
            if (e < sys.terms[v].size()) {
                std::size_t const w = sys.terms[v][e++].first;
                if (index[w] == none) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            std::size_t const done = v;
            frames.pop_back();
            if (!frames.empty())
                low[frames.back().first] = std::min(low[frames.back().first], low[done]);
            if (low[done] == index[done]) {
                std::vector<std::size_t> comp;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp.push_back(w);
                } while (w != done);
                std::sort(comp.begin(), comp.end());
                out.push_back(std::move(comp));
            }
        }
    }
    return out;
}

namespace detail {

/// Gauss-Jordan elimination on an augmented matrix whose first n columns
/// form the square system; false when that block is singular.
inline bool gauss_solve(std::vector<std::vector<Rational>>& m, std::size_t n)
{
    std::size_t const width = m.empty() ? 0 : m[0].size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && m[piv][col] == 0)
            ++piv;
        if (piv == n)
            return false;
        std::swap(m[piv], m[col]);
        Rational const inv = 1 / m[col][col];
        for (std::size_t k = col; k < width; ++k)
            m[col][k] *= inv;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || m[r][col] == 0)
                continue;
            Rational const f = m[r][col];
            for (std::size_t k = col; k < width; ++k)
                if (m[col][k] != 0)
                    m[r][k] -= f * m[col][k];
        }
    }
    return true;
}

} // namespace detail

enum class AffineFailure { singular, not_contracting };

struct AffineResult {
    std::vector<Rational> x;
    std::optional<AffineFailure> failure;
    std::vector<std::size_t> witness; // component that failed
};

/// Unique solution of x = b + A x, requiring every cyclic component to be
/// contracting (spectral radius of its block below one, checked exactly by
/// solving (I - A_S) z = 1 and asking for z > 0).
inline AffineResult solve_affine(AffineSystem const& sys)
{
    AffineResult res;
    res.x.assign(sys.size(), Rational(0));
    std::vector<std::size_t> local(sys.size(), std::size_t(-1));
    for (auto const& comp : dependency_components(sys)) {
        if (comp.size() == 1) {
            std::size_t const i = comp[0];
            Rational self = 0;
            Rational acc = sys.constant[i];
            for (auto const& [j, a] : sys.terms[i]) {
                if (j == i)
                    self += a;
                else
                    acc += a * res.x[j];
            }
            if (self >= 1) {
                res.failure = self == 1 ? AffineFailure::singular : AffineFailure::not_contracting;
                res.witness = comp;
                return res;
            }
            res.x[i] = acc / (1 - self);
            continue;
        }
        std::size_t const s = comp.size();
        for (std::size_t k = 0; k < s; ++k)
            local[comp[k]] = k;
        // Columns: the block I - A_S, then b (with outside terms folded in), then 1.
        std::vector<std::vector<Rational>> m(s, std::vector<Rational>(s + 2, Rational(0)));
        for (std::size_t k = 0; k < s; ++k) {
            std::size_t const i = comp[k];
            m[k][k] = 1;
            m[k][s] = sys.constant[i];
            m[k][s + 1] = 1;
            for (auto const& [j, a] : sys.terms[i]) {
                if (local[j] != std::size_t(-1))
                    m[k][local[j]] -= a;
                else
                    m[k][s] += a * res.x[j];
            }
        }
        if (!detail::gauss_solve(m, s)) {
            res.failure = AffineFailure::singular;
            res.witness = comp;
            return res;
        }
        if (std::any_of(m.begin(), m.end(), [&](auto const& row) { return row[s + 1] <= 0; })) {
            res.failure = AffineFailure::not_contracting;
            res.witness = comp;
            return res;
        }
        for (std::size_t k = 0; k < s; ++k) {
            res.x[comp[k]] = m[k][s];
            local[comp[k]] = std::size_t(-1);
        }
    }
    return res;
}

} // namespace cryptosplit
