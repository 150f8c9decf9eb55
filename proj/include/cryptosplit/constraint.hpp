#pragma once

#include "errors.hpp"
#include "position.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace cryptosplit {

/// value(parent) >= value(left) + value(right). Children are stored in
/// canonical form; `player` is the sender in the parent's frame.
struct SplitConstraint {
    Lattice parent, left, right;
    int player = 1;

    friend bool operator==(SplitConstraint const&, SplitConstraint const&) = default;
    friend auto operator<=>(SplitConstraint const&, SplitConstraint const&) = default;
};

/// factor * value(base) = value(scaled), scaled = factor * base.
struct ScaleConstraint {
    Lattice base;
    int factor = 2;
    Lattice scaled;

    friend bool operator==(ScaleConstraint const&, ScaleConstraint const&) = default;
    friend auto operator<=>(ScaleConstraint const&, ScaleConstraint const&) = default;
};

/// value(position) >= constant, the zero-bit value of the position.
struct ZeroBitConstraint {
    Lattice position;
    Rational constant;

    friend bool operator==(ZeroBitConstraint const& l, ZeroBitConstraint const& r)
    {
        return l.position == r.position && l.constant == r.constant;
    }
    friend std::weak_ordering operator<=>(ZeroBitConstraint const& l, ZeroBitConstraint const& r)
    {
        if (auto c = l.position <=> r.position; c != 0)
            return c;
        int const s = cmp(l.constant, r.constant);
        return s < 0 ? std::weak_ordering::less : s > 0 ? std::weak_ordering::greater : std::weak_ordering::equivalent;
    }
};

using Constraint = std::variant<SplitConstraint, ScaleConstraint, ZeroBitConstraint>;

inline char const* kind_name(Constraint const& c)
{
    static char const* const names[] = {"split", "scale", "zerobit"};
    return names[c.index()];
}

/// Canonical split constraint; the larger child comes first.
inline SplitConstraint make_split_constraint(Lattice const& parent, Lattice const& left, Lattice const& right,
                                             int player)
{
    auto const p = canonicalize(parent);
    SplitConstraint s{p.position, canonicalize(left).position, canonicalize(right).position,
                      apply_player(p.applied, player)};
    if (s.left < s.right)
        std::swap(s.left, s.right);
    return s;
}

inline ZeroBitConstraint make_zerobit_constraint(Lattice const& p)
{
    auto const c = canonicalize(p).position;
    return {c, Rational(succ_zero(c))};
}

/// factor * value(base) = value(factor * base), on the canonical base.
inline ScaleConstraint make_scale_constraint(Lattice const& base, int factor)
{
    auto const b = canonicalize(base).position;
    return {b, factor, factor * b};
}

/// Positions a constraint mentions, in a fixed order.
inline std::vector<Lattice> referenced_positions(Constraint const& c)
{
    return std::visit(
        [](auto const& x) -> std::vector<Lattice> {
            using X = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<X, SplitConstraint>)
                return {x.parent, x.left, x.right};
            else if constexpr (std::is_same_v<X, ScaleConstraint>)
                return {x.base, x.scaled};
            else
                return {x.position};
        },
        c);
}

struct ConstraintMetadata {
    int resolution = 0;
    std::uint32_t iterations = 0;
    std::string mode = "float";
    std::string source;
};

struct ConstraintSet {
    std::vector<Constraint> constraints;
    Lattice root{};
    ConstraintMetadata metadata;

    /// Every position that occurs in a constraint, plus the root, sorted.
    std::vector<Lattice> positions() const
    {
        std::set<Lattice> all{root};
        for (auto const& c : constraints)
            for (auto const& p : referenced_positions(c))
                all.insert(p);
        return {all.begin(), all.end()};
    }

    /// Removes repeated constraints, keeping the first occurrence.
    void deduplicate()
    {
        std::set<Constraint> seen;
        std::vector<Constraint> out;
        for (auto& c : constraints)
            if (seen.insert(c).second)
                out.push_back(std::move(c));
        constraints = std::move(out);
    }
};

/// Positions referenced by `cs` that nothing grounds.
///
/// A position is grounded when it carries a zero-bit constraint, is the
/// parent of a split, or is tied by scale equalities to a grounded position.
inline std::vector<Lattice> ungrounded_positions(ConstraintSet const& cs)
{
    auto const all = cs.positions();
    std::map<Lattice, std::size_t> id;
    for (std::size_t i = 0; i < all.size(); ++i)
        id.emplace(all[i], i);
    std::vector<std::size_t> parent(all.size());
    for (std::size_t i = 0; i < parent.size(); ++i)
        parent[i] = i;
    auto find = [&](std::size_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<bool> grounded(all.size(), false);
    for (auto const& c : cs.constraints) {
        if (auto const* s = std::get_if<ScaleConstraint>(&c))
            parent[find(id.at(s->base))] = find(id.at(s->scaled));
    }
    for (auto const& c : cs.constraints) {
        if (auto const* s = std::get_if<SplitConstraint>(&c))
            grounded[find(id.at(s->parent))] = true;
        else if (auto const* z = std::get_if<ZeroBitConstraint>(&c))
            grounded[find(id.at(z->position))] = true;
    }
    std::vector<Lattice> out;
    for (std::size_t i = 0; i < all.size(); ++i)
        if (!grounded[find(i)])
            out.push_back(all[i]);
    return out;
}

inline bool is_closed(ConstraintSet const& cs) { return ungrounded_positions(cs).empty(); }

// ---------------------------------------------------------------------------
// JSON interchange

inline nlohmann::json to_json(Constraint const& c)
{
    return std::visit(
        [](auto const& x) -> nlohmann::json {
            using X = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<X, SplitConstraint>)
                return {{"kind", "split"},
                        {"parent", format_position(x.parent)},
                        {"left", format_position(x.left)},
                        {"right", format_position(x.right)},
                        {"player", x.player}};
            else if constexpr (std::is_same_v<X, ScaleConstraint>)
                return {{"kind", "scale"},
                        {"base", format_position(x.base)},
                        {"factor", x.factor},
                        {"scaled", format_position(x.scaled)}};
            else
                return {{"kind", "zerobit"},
                        {"position", format_position(x.position)},
                        {"constant", to_fraction_string(x.constant)}};
        },
        c);
}

inline nlohmann::json to_json(ConstraintSet const& cs)
{
    nlohmann::json arr = nlohmann::json::array();
    for (auto const& c : cs.constraints)
        arr.push_back(to_json(c));
    return {{"format", "cryptosplit-constraints/1"},
            {"root", format_position(cs.root)},
            {"metadata",
             {{"T", cs.metadata.resolution},
              {"iterations", cs.metadata.iterations},
              {"mode", cs.metadata.mode},
              {"source", cs.metadata.source}}},
            {"constraints", std::move(arr)}};
}

namespace detail {

inline Lattice json_position(nlohmann::json const& j, char const* key, std::size_t row)
{
    if (!j.contains(key) || !j[key].is_string())
        throw FormatError("constraint " + std::to_string(row) + ": missing position field '" + key + "'");
    try {
        return parse_position<int>(j[key].get<std::string>());
    } catch (std::invalid_argument const& e) {
        throw FormatError("constraint " + std::to_string(row) + ": " + e.what());
    }
}

inline int json_int(nlohmann::json const& j, char const* key, std::size_t row)
{
    if (!j.contains(key) || !j[key].is_number_integer())
        throw FormatError("constraint " + std::to_string(row) + ": missing integer field '" + key + "'");
    return j[key].get<int>();
}

} // namespace detail

inline Constraint constraint_from_json(nlohmann::json const& j, std::size_t row = 0)
{
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw FormatError("constraint " + std::to_string(row) + ": missing kind");
    auto const kind = j["kind"].get<std::string>();
    if (kind == "split")
        return SplitConstraint{detail::json_position(j, "parent", row), detail::json_position(j, "left", row),
                               detail::json_position(j, "right", row), detail::json_int(j, "player", row)};
    if (kind == "scale")
        return ScaleConstraint{detail::json_position(j, "base", row), detail::json_int(j, "factor", row),
                               detail::json_position(j, "scaled", row)};
    if (kind == "zerobit") {
        if (!j.contains("constant") || !j["constant"].is_string())
            throw FormatError("constraint " + std::to_string(row) + ": missing constant");
        Rational c;
        try {
            c = parse_rational(j["constant"].get<std::string>());
        } catch (std::invalid_argument const& e) {
            throw FormatError("constraint " + std::to_string(row) + ": " + e.what());
        }
        return ZeroBitConstraint{detail::json_position(j, "position", row), c};
    }
    throw FormatError("constraint " + std::to_string(row) + ": unknown kind '" + kind + "'");
}

inline ConstraintSet constraint_set_from_json(nlohmann::json const& j)
{
    if (!j.is_object() || !j.contains("constraints") || !j["constraints"].is_array())
        throw FormatError("constraint set: missing constraints array");
    ConstraintSet cs;
    if (!j.contains("root") || !j["root"].is_string())
        throw FormatError("constraint set: missing root");
    try {
        cs.root = parse_position<int>(j["root"].get<std::string>());
    } catch (std::invalid_argument const& e) {
        throw FormatError(std::string("constraint set root: ") + e.what());
    }
    if (j.contains("metadata")) {
        auto const& m = j["metadata"];
        cs.metadata.resolution = m.value("T", 0);
        cs.metadata.iterations = m.value("iterations", 0u);
        cs.metadata.mode = m.value("mode", std::string("float"));
        cs.metadata.source = m.value("source", std::string());
    }
    std::size_t row = 0;
    for (auto const& c : j["constraints"])
        cs.constraints.push_back(constraint_from_json(c, row++));
    return cs;
}

} // namespace cryptosplit
