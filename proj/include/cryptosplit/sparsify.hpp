#pragma once

#include "lp.hpp"

#include <map>
#include <set>
#include <vector>

namespace cryptosplit {

struct SparsifyResult {
    ConstraintSet constraints;
    std::size_t duplicates = 0;
    std::size_t slack_removed = 0;
    std::size_t unreachable_removed = 0;
    std::size_t grounding_restored = 0;
    Rational objective;
};

namespace detail {

/// Constraints reachable from the root through split children and scale ties.
inline std::vector<Constraint> reachable_constraints(ConstraintSet const& cs)
{
    std::map<Lattice, std::vector<std::size_t>> touching;
    for (std::size_t i = 0; i < cs.constraints.size(); ++i) {
        auto const& c = cs.constraints[i];
        if (auto const* s = std::get_if<SplitConstraint>(&c))
            touching[s->parent].push_back(i);
        else
            for (auto const& p : referenced_positions(c))
                touching[p].push_back(i);
    }
    std::set<Lattice> seen{cs.root};
    std::vector<Lattice> work{cs.root};
    std::vector<bool> keep(cs.constraints.size(), false);
    while (!work.empty()) {
        Lattice const p = work.back();
        work.pop_back();
        auto it = touching.find(p);
        if (it == touching.end())
            continue;
        for (std::size_t i : it->second) {
            if (keep[i])
                continue;
            keep[i] = true;
            for (auto const& q : referenced_positions(cs.constraints[i]))
                if (seen.insert(q).second)
                    work.push_back(q);
        }
    }
    std::vector<Constraint> out;
    for (std::size_t i = 0; i < cs.constraints.size(); ++i)
        if (keep[i])
            out.push_back(cs.constraints[i]);
    return out;
}

} // namespace detail

/// Keeps only what is tight at `values`, restoring zero-bit grounding where
/// a removal leaves a position ungrounded. The result must solve to the
/// same objective.
inline SparsifyResult sparsify(ConstraintSet const& cs, std::map<Lattice, Rational> const& values)
{
    SparsifyResult res;
    ConstraintSet work = cs;
    std::size_t const before = work.constraints.size();
    work.deduplicate();
    res.duplicates = before - work.constraints.size();

    LpModel const m = build_lp(work);
    LpSolution claimed;
    claimed.values.assign(m.variables.size(), Rational(0));
    for (std::size_t v = 0; v < m.variables.size(); ++v) {
        auto it = values.find(m.variables[v]);
        if (it == values.end())
            throw VerificationError("solution has no value for " + variable_name(m.variables[v]));
        claimed.values[v] = it->second;
    }
    for (std::size_t v = 0; v < m.variables.size(); ++v)
        if (claimed.values[v] < 0)
            throw VerificationError("solution is infeasible: " + variable_name(m.variables[v]) + " is negative");

    std::vector<Constraint> tight;
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        auto const& row = m.rows[i];
        Rational const lhs = row_activity(row, claimed.values);
        bool const ok = row.sense == RowSense::eq ? lhs == row.rhs : lhs >= row.rhs;
        if (!ok)
            throw VerificationError("solution is infeasible at row r" + std::to_string(i + 1));
        if (row.sense == RowSense::eq || lhs == row.rhs)
            tight.push_back(work.constraints[row.constraint]);
        else
            ++res.slack_removed;
    }
    work.constraints = std::move(tight);

    while (true) {
        auto const open = ungrounded_positions(work);
        if (open.empty())
            break;
        work.constraints.push_back(make_zerobit_constraint(open.front()));
        ++res.grounding_restored;
    }

    std::size_t const kept = work.constraints.size();
    work.constraints = detail::reachable_constraints(work);
    res.unreachable_removed = kept - work.constraints.size();

    Rational const target = claimed.values[m.objective];
    LpSolution const again = solve_exact(build_lp(work));
    if (again.objective != target)
        throw VerificationError("sparsified set solves to " + to_string(again.objective) + ", expected " +
                                to_string(target));
    res.objective = again.objective;
    res.constraints = std::move(work);
    return res;
}

inline SparsifyResult sparsify(ConstraintSet const& cs, LpSolution const& sol)
{
    LpModel const m = build_lp(cs);
    if (sol.values.size() != m.variables.size())
        throw VerificationError("solution does not match the constraint set");
    std::map<Lattice, Rational> values;
    for (std::size_t v = 0; v < m.variables.size(); ++v)
        values.emplace(m.variables[v], sol.values[v]);
    return sparsify(cs, values);
}

} // namespace cryptosplit
