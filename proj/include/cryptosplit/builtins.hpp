#pragma once

#include "constraint.hpp"

#include <string>

namespace cryptosplit {

/// The TwoBit certificate at scale 3: s(3,3,3,3) >= 4.
inline ConstraintSet twobit_constraints()
{
    ConstraintSet cs;
    cs.root = Lattice{{3, 3, 3, 3}};
    cs.metadata = {3, 0, "rational", "builtin:twobit"};
    cs.constraints = {
        make_split_constraint(Lattice{{3, 3, 3, 3}}, Lattice{{2, 2, 1, 1}}, Lattice{{1, 1, 2, 2}}, 2),
        make_split_constraint(Lattice{{2, 2, 1, 1}}, Lattice{{1, 1, 1, 0}}, Lattice{{1, 1, 0, 1}}, 2),
        make_zerobit_constraint(Lattice{{1, 1, 1, 0}}),
    };
    cs.deduplicate();
    return cs;
}

/// The scale-12 certificate with value 449/28 at (12,12,12,12).
inline ConstraintSet thm29_constraints()
{
    ConstraintSet cs;
    cs.root = Lattice{{12, 12, 12, 12}};
    cs.metadata = {12, 0, "rational", "builtin:thm29"};
    auto split = [&](Lattice p, Lattice l, Lattice r, int j) {
        cs.constraints.push_back(make_split_constraint(p, l, r, j));
    };
    split({{12, 12, 12, 12}}, {{7, 7, 6, 4}}, {{5, 5, 6, 8}}, 2);
    split({{5, 5, 6, 8}}, {{2, 2, 0, 2}}, {{3, 3, 6, 6}}, 2);
    split({{3, 3, 6, 6}}, {{3, 0, 3, 3}}, {{0, 3, 3, 3}}, 1);
    split({{7, 7, 6, 4}}, {{4, 5, 3, 2}}, {{3, 2, 3, 2}}, 1);
    split({{8, 10, 6, 4}}, {{4, 5, 2, 4}}, {{4, 5, 4, 0}}, 2);
    split({{4, 5, 2, 4}}, {{1, 2, 1, 2}}, {{3, 3, 1, 2}}, 1);
    split({{3, 3, 1, 2}}, {{1, 1, 1, 0}}, {{2, 2, 0, 2}}, 2);
    split({{6, 12, 6, 12}}, {{5, 10, 3, 9}}, {{1, 2, 3, 3}}, 2);
    split({{1, 2, 3, 3}}, {{1, 0, 1, 1}}, {{0, 2, 2, 2}}, 1);
    split({{5, 10, 3, 9}}, {{0, 6, 2, 6}}, {{5, 4, 1, 3}}, 1);
    split({{5, 4, 1, 3}}, {{1, 1, 1, 0}}, {{3, 3, 0, 3}}, 2);
    split({{9, 6, 9, 6}}, {{6, 3, 6, 4}}, {{3, 3, 3, 2}}, 1);
    split({{6, 3, 6, 4}}, {{3, 0, 3, 2}}, {{3, 3, 3, 2}}, 1);
    split({{9, 9, 9, 6}}, {{7, 7, 6, 4}}, {{2, 2, 3, 2}}, 2);
    split({{2, 2, 3, 2}}, {{1, 1, 1, 0}}, {{1, 1, 2, 2}}, 2);
    split({{1, 1, 2, 2}}, {{1, 0, 1, 1}}, {{0, 1, 1, 1}}, 1);
    cs.constraints.push_back(make_scale_constraint({{4, 5, 3, 2}}, 2));
    cs.constraints.push_back(make_scale_constraint({{1, 2, 1, 2}}, 6));
    cs.constraints.push_back(make_scale_constraint({{3, 2, 3, 2}}, 3));
    cs.constraints.push_back(make_scale_constraint({{3, 3, 3, 2}}, 3));
    for (Lattice leaf : {Lattice{{2, 2, 0, 2}}, Lattice{{3, 0, 3, 3}}, Lattice{{0, 3, 3, 3}}, Lattice{{4, 5, 4, 0}},
                         Lattice{{1, 1, 1, 0}}, Lattice{{1, 0, 1, 1}}, Lattice{{0, 2, 2, 2}}, Lattice{{0, 6, 2, 6}},
                         Lattice{{3, 3, 0, 3}}, Lattice{{3, 0, 3, 2}}, Lattice{{0, 1, 1, 1}}})
        cs.constraints.push_back(make_zerobit_constraint(leaf));
    cs.deduplicate();
    return cs;
}

inline ConstraintSet builtin_constraints(std::string const& name)
{
    if (name == "twobit")
        return twobit_constraints();
    if (name == "thm29")
        return thm29_constraints();
    throw UsageError("unknown built-in constraint set '" + name + "' (expected twobit or thm29)");
}

} // namespace cryptosplit
