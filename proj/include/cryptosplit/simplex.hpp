#pragma once

#include "errors.hpp"
#include "rational.hpp"

#include <cstddef>
#include <vector>

namespace cryptosplit {

/// maximize p^T y  subject to  M y <= q,  y >= 0,  with q >= 0.
///
/// Dense exact tableau, primal simplex from the slack basis with Bland's
/// smallest-index rule for entering and leaving variables.
struct SimplexProblem {
    std::vector<std::vector<Rational>> M; // rows x cols
    std::vector<Rational> q;              // per row, >= 0
    std::vector<Rational> p;              // per column
};

struct SimplexResult {
    enum class Status { optimal, unbounded } status = Status::optimal;
    Rational value;
    std::vector<Rational> y;      // per column
    std::vector<Rational> prices; // per row: dual values of M y <= q, >= 0
    std::vector<std::size_t> basis; // basic variable per row; cols + i is slack i
    std::size_t pivots = 0;
    std::size_t unbounded_column = 0;
};

inline SimplexResult simplex_maximize(SimplexProblem const& pb, std::size_t max_pivots = 1000000)
{
    std::size_t const rows = pb.q.size();
    std::size_t const cols = pb.p.size();
    std::size_t const width = cols + rows;
    for (auto const& v : pb.q)
        if (v < 0)
            throw UsageError("simplex: right-hand side must be non-negative");

    // t[i] = [M | I | q], objective row z = [-p | 0 | 0].
    std::vector<std::vector<Rational>> t(rows, std::vector<Rational>(width + 1, Rational(0)));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j)
            t[i][j] = pb.M[i][j];
        t[i][cols + i] = 1;
        t[i][width] = pb.q[i];
    }
    std::vector<Rational> z(width + 1, Rational(0));
    for (std::size_t j = 0; j < cols; ++j)
        z[j] = -pb.p[j];
    SimplexResult res;
    res.basis.resize(rows);
    for (std::size_t i = 0; i < rows; ++i)
        res.basis[i] = cols + i;

    while (true) {
        std::size_t enter = width;
        for (std::size_t j = 0; j < width; ++j)
            if (z[j] < 0) {
                enter = j;
                break;
            }
        if (enter == width)
            break;
        std::size_t leave = rows;
        Rational best;
        for (std::size_t i = 0; i < rows; ++i) {
            if (t[i][enter] <= 0)
                continue;
            Rational ratio = t[i][width] / t[i][enter];
            if (leave == rows || ratio < best || (ratio == best && res.basis[i] < res.basis[leave])) {
                leave = i;
                best = std::move(ratio);
            }
        }
        if (leave == rows) {
            res.status = SimplexResult::Status::unbounded;
            res.unbounded_column = enter;
            return res;
        }
        if (++res.pivots > max_pivots)
            throw ResourceError("simplex: pivot limit exceeded");
        auto& pr = t[leave];
        Rational const inv = 1 / pr[enter];
        for (auto& v : pr)
            v *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == leave || t[i][enter] == 0)
                continue;
            Rational const f = t[i][enter];
            for (std::size_t k = 0; k <= width; ++k)
                if (pr[k] != 0)
                    t[i][k] -= f * pr[k];
        }
        if (z[enter] != 0) {
            Rational const f = z[enter];
            for (std::size_t k = 0; k <= width; ++k)
                if (pr[k] != 0)
                    z[k] -= f * pr[k];
        }
        res.basis[leave] = enter;
    }
    res.value = z[width];
    res.y.assign(cols, Rational(0));
    for (std::size_t i = 0; i < rows; ++i)
        if (res.basis[i] < cols)
            res.y[res.basis[i]] = t[i][width];
    res.prices.resize(rows);
    for (std::size_t i = 0; i < rows; ++i)
        res.prices[i] = z[cols + i];
    return res;
}

} // namespace cryptosplit
