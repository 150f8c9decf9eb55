#pragma once

#include "value_table.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <thread>
#include <vector>

namespace cryptosplit {

struct PassReport {
    std::uint32_t step = 0;
    bool splitting = true;
    std::size_t improved = 0;
    double max_improvement = 0;
};

struct SearchOptions {
    enum class Termination { converge, fixed_rounds };

    Termination termination = Termination::converge;
    double epsilon = 1e-12;        // converge: stop once a round improves no value by epsilon or more
    std::uint32_t rounds = 0;      // fixed_rounds: exactly this many rounds
    std::uint32_t max_rounds = 5000;
    bool prune = true;             // skip candidates whose ub_min bound cannot beat s(D)
    bool upward_scaling = false;   // also apply s(lambda D) >= lambda s(D)
    bool reverse_order = false;    // visit positions in descending norm (fixpoint is order-independent)
    unsigned threads = 1;
    std::uint64_t memory_budget = default_memory_budget;
    std::function<void(PassReport const&)> progress;
};

template <class V>
struct SearchResult {
    ValueTable<V> table;
    bool converged = false;
    std::vector<PassReport> passes;
};

/// Table over {0..T}^4 initialised to the zero-bit values.
template <class V>
ValueTable<V> init_table(int resolution, std::uint64_t memory_budget = default_memory_budget)
{
    return ValueTable<V>(resolution, memory_budget);
}

namespace detail {

template <class V>
double improvement(V const& newer, V const& older)
{
    return value_to_double<V>(V(newer - older));
}

/// Best relaxed split of the slot strictly better than `floor`, if any.
template <class V>
std::optional<std::pair<V, SplitChoice>> best_split(ValueTable<V> const& table, std::size_t slot, V const& floor,
                                                    bool prune)
{
    Lattice const d = table.position(slot);
    std::size_t const side = std::size_t(table.resolution()) + 1;
    auto const& values = table.values();
    V best = floor;
    std::optional<SplitChoice> choice;

    Lattice seen[4];
    int nseen = 0;
    std::vector<int> dl, dr;
    for (auto g : all_symmetries) {
        Lattice const img = apply(g, d);
        bool dup = false;
        for (int i = 0; i < nseen; ++i)
            dup = dup || seen[i] == img;
        if (dup)
            continue;
        seen[nseen++] = img;

        int const A = img[0], B = img[1], C = img[2], Dd = img[3];
        int const P = partner_extent(img);
        // Per partner value: third and fourth coordinates of each child.
        dl.assign(std::size_t(P) + 1, 0);
        dr.assign(std::size_t(P) + 1, 0);
        std::vector<int> cl(std::size_t(P) + 1), cr(std::size_t(P) + 1);
        for (int p = 0; p <= P; ++p) {
            if (C > 0) {
                cl[p] = p;
                cr[p] = C - p;
                dl[p] = floor_ratio(Dd, p, C);
                dr[p] = floor_ratio(Dd, C - p, C);
            } else {
                cl[p] = cr[p] = 0;
                dl[p] = p;
                dr[p] = Dd - p;
            }
        }
        long const total = long(A + 1) * (B + 1) * (P + 1);
        long k = 0;
        for (int a0 = 0; a0 <= A; ++a0) {
            int const a1 = A - a0;
            for (int b0 = 0; b0 <= B; ++b0, k += P + 1) {
                if (k > total - 1 - k)
                    break;
                int const b1 = B - b0;
                std::size_t const lbase = (std::size_t(a0) * side + b0) * side;
                std::size_t const rbase = (std::size_t(a1) * side + b1) * side;
                for (int p = 0; p <= P; ++p) {
                    long const kk = k + p;
                    if (kk > total - 1 - kk)
                        break;
                    if (prune) {
                        int const ub = std::min(a0, cl[p]) + std::min(b0, dl[p]) + std::min(a1, cr[p]) +
                                       std::min(b1, dr[p]);
                        if (!(value_from_int<V>(ub) > best))
                            continue;
                    }
                    std::size_t const li = (lbase + std::size_t(cl[p])) * side + std::size_t(dl[p]);
                    std::size_t const ri = (rbase + std::size_t(cr[p])) * side + std::size_t(dr[p]);
                    V cand = values[std::size_t(table.slot_at_dense(li))] + values[std::size_t(table.slot_at_dense(ri))];
                    if (cand > best) {
                        best = std::move(cand);
                        choice = SplitChoice{g, std::uint8_t(a0), std::uint8_t(b0), std::uint8_t(p)};
                    }
                }
            }
        }
    }
    if (!choice)
        return std::nullopt;
    return std::make_pair(std::move(best), *choice);
}

} // namespace detail

/// One splitting step: every position, in ascending L1 norm, takes the best
/// of its current value and s(left) + s(right) over all relaxed splits.
/// Improvements made earlier in the pass are visible to later positions.
template <class V>
PassReport splitting_pass(ValueTable<V>& table, SearchOptions const& opt = {})
{
    table.begin_step();
    PassReport rep{table.steps(), true, 0, 0};
    auto const n = table.size();

    auto apply_update = [&](std::size_t slot, V value, SplitChoice choice) {
        rep.max_improvement = std::max(rep.max_improvement, detail::improvement(value, table.value(slot)));
        ++rep.improved;
        UpdateRecord<V> rec;
        rec.kind = UpdateKind::split;
        rec.choice = choice;
        rec.value = std::move(value);
        table.update(slot, std::move(rec));
    };
    auto consider = [&](std::size_t slot) -> std::optional<std::pair<V, SplitChoice>> {
        auto const& d = table.position(slot);
        if (opt.prune && !(value_from_int<V>(ub_min(d)) > table.value(slot)))
            return std::nullopt;
        return detail::best_split(table, slot, table.value(slot), opt.prune);
    };

    if (opt.reverse_order) {
        for (std::size_t s = n; s-- > 0;)
            if (auto r = consider(s))
                apply_update(s, std::move(r->first), r->second);
        return rep;
    }
    if (opt.threads <= 1) {
        for (std::size_t s = 0; s < n; ++s)
            if (auto r = consider(s))
                apply_update(s, std::move(r->first), r->second);
        return rep;
    }

    // Positions of equal norm never read each other (children have strictly
    // smaller norm), so each norm level is evaluated in parallel and applied
    // in slot order. The result is identical to the sequential pass.
    std::size_t lo = 0;
    std::vector<std::optional<std::pair<V, SplitChoice>>> found;
    while (lo < n) {
        int const norm = table.position(lo).norm1();
        std::size_t hi = lo;
        while (hi < n && table.position(hi).norm1() == norm)
            ++hi;
        found.assign(hi - lo, std::nullopt);
        unsigned const workers = unsigned(std::min<std::size_t>(opt.threads, hi - lo));
        if (workers <= 1) {
            for (std::size_t s = lo; s < hi; ++s)
                found[s - lo] = consider(s);
        } else {
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w)
                pool.emplace_back([&, w] {
                    for (std::size_t s = lo + w; s < hi; s += workers)
                        found[s - lo] = consider(s);
                });
            for (auto& t : pool)
                t.join();
        }
        for (std::size_t s = lo; s < hi; ++s)
            if (found[s - lo])
                apply_update(s, std::move(found[s - lo]->first), found[s - lo]->second);
        lo = hi;
    }
    return rep;
}

/// One scaling step: s(D) <- max(s(D), s(lambda D) / lambda) for every
/// integer lambda >= 2 with lambda D in range. Candidates read the values
/// from before the step.
template <class V>
PassReport scaling_pass(ValueTable<V>& table, SearchOptions const& opt = {})
{
    table.begin_step();
    PassReport rep{table.steps(), false, 0, 0};
    int const T = table.resolution();
    std::vector<V> const snapshot = table.values();
    auto const n = table.size();

    for (std::size_t step = 0; step < n; ++step) {
        std::size_t const s = opt.reverse_order ? n - 1 - step : step;
        Lattice const d = table.position(s);
        if (d.is_zero())
            continue;
        V best = snapshot[s];
        std::optional<std::pair<UpdateKind, int>> how;
        int const mx = d[0]; // canonical: first entry is the maximum
        for (int lambda = 2; lambda * mx <= T; ++lambda) {
            V cand = snapshot[table.slot(lambda * d)] / value_from_int<V>(lambda);
            if (cand > best) {
                best = std::move(cand);
                how = {UpdateKind::scale, lambda};
            }
        }
        if (opt.upward_scaling) {
            for (int lambda = 2; lambda <= mx; ++lambda) {
                if (d[0] % lambda || d[1] % lambda || d[2] % lambda || d[3] % lambda)
                    continue;
                Lattice base{{d[0] / lambda, d[1] / lambda, d[2] / lambda, d[3] / lambda}};
                V cand = value_from_int<V>(lambda) * snapshot[table.slot(base)];
                if (cand > best) {
                    best = std::move(cand);
                    how = {UpdateKind::scale_up, lambda};
                }
            }
        }
        if (!how)
            continue;
        rep.max_improvement = std::max(rep.max_improvement, detail::improvement(best, table.value(s)));
        ++rep.improved;
        UpdateRecord<V> rec;
        rec.kind = how->first;
        rec.factor = std::uint8_t(how->second);
        rec.value = std::move(best);
        table.update(s, std::move(rec));
    }
    return rep;
}

/// Alternates splitting and scaling passes until the termination criterion
/// holds. Non-convergence within max_rounds is reported through `converged`.
template <class V>
SearchResult<V> run_search(int resolution, SearchOptions const& opt = {})
{
    SearchResult<V> res{init_table<V>(resolution, opt.memory_budget), false, {}};
    auto& table = res.table;
    auto report = [&](PassReport const& r) {
        res.passes.push_back(r);
        if (opt.progress)
            opt.progress(r);
    };
    bool const fixed = opt.termination == SearchOptions::Termination::fixed_rounds;
    std::uint32_t const limit = fixed ? opt.rounds : opt.max_rounds;
    for (std::uint32_t round = 0; round < limit; ++round) {
        auto const sp = splitting_pass(table, opt);
        report(sp);
        auto const sc = scaling_pass(table, opt);
        report(sc);
        if (!fixed && std::max(sp.max_improvement, sc.max_improvement) < opt.epsilon) {
            res.converged = true;
            break;
        }
    }
    if (fixed)
        res.converged = true;
    return res;
}

/// s(T,T,T,T) / (4T), the success probability bound at the uniform distribution.
template <class V>
V normalized_bound(ValueTable<V> const& table)
{
    int const T = table.resolution();
    if (T == 0)
        return value_from_int<V>(0);
    return table.value(Lattice{{T, T, T, T}}) / value_from_int<V>(4 * T);
}

/// Value of a slot at the end of step `step - 1`.
template <class V>
V value_before_step(ValueTable<V> const& table, std::size_t slot, std::uint32_t step)
{
    auto const* rec = table.record_at(slot, step - 1);
    return rec ? rec->value : value_from_int<V>(succ_zero(table.position(slot)));
}

/// Recomputes the value stored in `rec` for `slot` from its operands'
/// values at the time of the update.
template <class V>
V replay_record(ValueTable<V> const& table, std::size_t slot, UpdateRecord<V> const& rec)
{
    Lattice const d = table.position(slot);
    switch (rec.kind) {
    case UpdateKind::split: {
        auto [l, r] = relaxed_children(d, rec.choice);
        return table.value_before(table.slot(l), rec.seq) + table.value_before(table.slot(r), rec.seq);
    }
    case UpdateKind::scale: {
        // Scaling reads values from before its step.
        Lattice const big = int(rec.factor) * d;
        return value_before_step(table, table.slot(big), rec.step) / value_from_int<V>(rec.factor);
    }
    case UpdateKind::scale_up: {
        Lattice base;
        for (std::size_t i = 0; i < 4; ++i)
            base[i] = d[i] / rec.factor;
        return value_from_int<V>(rec.factor) * value_before_step(table, table.slot(base), rec.step);
    }
    }
    throw FormatError("unknown update kind");
}

} // namespace cryptosplit
