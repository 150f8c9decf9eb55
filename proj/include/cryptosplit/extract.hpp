#pragma once

#include "constraint.hpp"
#include "search.hpp"

#include <map>
#include <set>
#include <utility>
#include <vector>

namespace cryptosplit {

/// The constraints that support s(d) after update step `step`.
///
/// A position last improved at step L contributes the constraint recorded
/// then; split children are followed at step L and the scaled position of a
/// scaling at step L - 1. A position never improved contributes its zero-bit
/// bound. Shared subproofs are visited once per (position, L).
template <class V>
ConstraintSet extract(ValueTable<V> const& table, Lattice const& d, std::uint32_t step)
{
    ConstraintSet cs;
    cs.root = canonicalize(d).position;
    cs.metadata.resolution = table.resolution();
    cs.metadata.iterations = step / 2;
    cs.metadata.mode = to_string(numeric_mode_of<V>());
    cs.metadata.source = "search";

    std::set<std::pair<std::size_t, std::uint32_t>> visited;
    std::set<Constraint> emitted;
    std::vector<std::pair<std::size_t, std::uint32_t>> work{{table.slot(d), step}};
    auto emit = [&](Constraint c) {
        if (emitted.insert(c).second)
            cs.constraints.push_back(std::move(c));
    };
    while (!work.empty()) {
        auto const [slot, at] = work.back();
        work.pop_back();
        auto const* rec = table.record_at(slot, at);
        std::uint32_t const last = rec ? rec->step : 0;
        if (!visited.insert({slot, last}).second)
            continue;
        Lattice const p = table.position(slot);
        if (!rec) {
            emit(make_zerobit_constraint(p));
            continue;
        }
        switch (rec->kind) {
        case UpdateKind::split: {
            auto const s = make_relaxed_split(p, rec->choice);
            emit(make_split_constraint(s.parent, s.left, s.right, s.player));
            work.push_back({table.slot(s.right), last});
            work.push_back({table.slot(s.left), last});
            break;
        }
        case UpdateKind::scale: {
            Lattice const big = int(rec->factor) * p;
            emit(ScaleConstraint{p, int(rec->factor), big});
            work.push_back({table.slot(big), last - 1});
            break;
        }
        case UpdateKind::scale_up: {
            Lattice base;
            for (std::size_t i = 0; i < 4; ++i)
                base[i] = p[i] / rec->factor;
            emit(ScaleConstraint{base, int(rec->factor), p});
            work.push_back({table.slot(base), last - 1});
            break;
        }
        }
    }
    return cs;
}

/// Extraction at the table's final step.
template <class V>
ConstraintSet extract(ValueTable<V> const& table, Lattice const& d)
{
    return extract(table, d, table.steps());
}

} // namespace cryptosplit
