#pragma once

#include "affine_system.hpp"
#include "errors.hpp"
#include "position.hpp"
#include "relaxed_split.hpp"
#include "value_table.hpp"

#include <json.hpp>

#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace cryptosplit {

enum class NodeKind : std::uint8_t { leaf, split, scale };

inline std::string to_string(NodeKind k)
{
    static char const* const names[] = {"leaf", "split", "scale"};
    return names[std::size_t(k)];
}

/// Reference to a canonical node. The child as seen from the parent, mapped
/// by `map`, is the node's position: node.position == apply(map, child).
struct Edge {
    std::size_t node = 0;
    Symmetry map = Symmetry::identity;

    friend bool operator==(Edge const&, Edge const&) = default;
};

struct ProtocolNode {
    Exact position; // canonical
    NodeKind kind = NodeKind::leaf;
    // split
    int player = 1;
    Exact left, right; // children in this node's frame
    Edge left_edge, right_edge;
    bool relaxed = false;
    // scale: value(position) = value(factor * position) / factor
    Rational factor = 1;
    Edge target;
};

struct ProtocolGraph {
    std::string name;
    std::vector<ProtocolNode> nodes;
    std::size_t root = 0;

    std::size_t size() const { return nodes.size(); }

    std::optional<std::size_t> find(Exact const& p) const
    {
        auto const c = canonicalize(p).position;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].position == c)
                return i;
        return std::nullopt;
    }

    bool has_relaxed() const
    {
        return std::any_of(nodes.begin(), nodes.end(), [](auto const& n) { return n.kind == NodeKind::split && n.relaxed; });
    }
};

/// Builds a graph with one node per canonical position.
class GraphBuilder {
public:
    explicit GraphBuilder(std::string name) { g_.name = std::move(name); }

    Edge edge_to(Exact const& p)
    {
        auto const c = canonicalize(p);
        auto [it, fresh] = ids_.emplace(c.position, g_.nodes.size());
        if (fresh) {
            ProtocolNode n;
            n.position = c.position;
            g_.nodes.push_back(std::move(n));
        }
        return {it->second, c.applied};
    }

    std::size_t node(Exact const& p) { return edge_to(p).node; }

    /// Split of the node holding p; children given in p's own frame.
    void split(Exact const& p, Exact const& left, Exact const& right, int player, bool relaxed = false)
    {
        auto const c = canonicalize(p);
        std::size_t const id = node(p);
        Exact const l = apply(c.applied, left), r = apply(c.applied, right);
        int const j = apply_player(c.applied, player);
        if (!relaxed && !is_allowed_split(c.position, l, r, j))
            throw VerificationError("split of " + format_position(p) + " by player " + std::to_string(player) +
                                    " is not allowed");
        Edge const le = edge_to(l), re = edge_to(r);
        auto& n = g_.nodes[id];
        n.kind = NodeKind::split;
        n.player = j;
        n.left = l;
        n.right = r;
        n.left_edge = le;
        n.right_edge = re;
        n.relaxed = relaxed;
    }

    void scale(Exact const& p, Rational const& factor)
    {
        if (factor <= 0)
            throw UsageError("scale factor must be positive");
        std::size_t const id = node(p);
        Exact const target = factor * g_.nodes[id].position;
        Edge const e = edge_to(target);
        auto& n = g_.nodes[id];
        n.kind = NodeKind::scale;
        n.factor = factor;
        n.target = e;
    }

    ProtocolGraph finish(Exact const& root)
    {
        g_.root = node(root);
        return std::move(g_);
    }

private:
    ProtocolGraph g_;
    std::map<Exact, std::size_t> ids_;
};

inline Exact exact(int a, int b, int c, int d) { return Exact{{a, b, c, d}}; }

inline ProtocolGraph twobit_graph()
{
    GraphBuilder b("twobit");
    b.split(exact(3, 3, 3, 3), exact(2, 2, 1, 1), exact(1, 1, 2, 2), 2);
    b.split(exact(2, 2, 1, 1), exact(1, 1, 1, 0), exact(1, 1, 0, 1), 2);
    return b.finish(exact(3, 3, 3, 3));
}

/// The scale-12 protocol, all splits exact; its value is 449/28.
inline ProtocolGraph thm29_graph()
{
    GraphBuilder b("thm29");
    b.split(exact(12, 12, 12, 12), exact(7, 7, 6, 4), exact(5, 5, 6, 8), 2);
    b.split(exact(5, 5, 6, 8), exact(2, 2, 0, 2), exact(3, 3, 6, 6), 2);
    b.split(exact(3, 3, 6, 6), exact(3, 0, 3, 3), exact(0, 3, 3, 3), 1);
    b.split(exact(7, 7, 6, 4), exact(4, 5, 3, 2), exact(3, 2, 3, 2), 1);
    b.scale(exact(4, 5, 3, 2), 2);
    b.split(exact(8, 10, 6, 4), exact(4, 5, 2, 4), exact(4, 5, 4, 0), 2);
    b.split(exact(4, 5, 2, 4), exact(1, 2, 1, 2), exact(3, 3, 1, 2), 1);
    b.split(exact(3, 3, 1, 2), exact(1, 1, 1, 0), exact(2, 2, 0, 2), 2);
    b.scale(exact(1, 2, 1, 2), 6);
    b.split(exact(6, 12, 6, 12), exact(5, 10, 3, 9), exact(1, 2, 3, 3), 2);
    b.split(exact(1, 2, 3, 3), exact(1, 0, 1, 1), exact(0, 2, 2, 2), 1);
    b.split(exact(5, 10, 3, 9), exact(0, 6, 2, 6), exact(5, 4, 1, 3), 1);
    b.split(exact(5, 4, 1, 3), Exact{{Rational(5, 4), 1, 1, 0}}, Exact{{Rational(15, 4), 3, 0, 3}}, 2);
    b.scale(exact(3, 2, 3, 2), 3);
    b.split(exact(9, 6, 9, 6), exact(6, 3, 6, 4), exact(3, 3, 3, 2), 1);
    b.split(exact(6, 3, 6, 4), exact(3, 0, 3, 2), exact(3, 3, 3, 2), 1);
    b.scale(exact(3, 3, 3, 2), 3);
    b.split(exact(9, 9, 9, 6), exact(7, 7, 6, 4), exact(2, 2, 3, 2), 2);
    b.split(exact(2, 2, 3, 2), exact(1, 1, 1, 0), exact(1, 1, 2, 2), 2);
    b.split(exact(1, 1, 2, 2), exact(1, 0, 1, 1), exact(0, 1, 1, 1), 1);
    return b.finish(exact(12, 12, 12, 12));
}

inline ProtocolGraph leaf_graph(Exact const& p)
{
    GraphBuilder b("leaf");
    return b.finish(p);
}

inline ProtocolGraph builtin_graph(std::string const& name)
{
    if (name == "twobit")
        return twobit_graph();
    if (name == "thm29")
        return thm29_graph();
    throw UsageError("unknown built-in protocol '" + name + "' (expected twobit or thm29)");
}

/// The strategy recorded in a search table, one node per canonical position.
template <class V>
ProtocolGraph graph_from_provenance(ValueTable<V> const& table, Lattice const& root)
{
    GraphBuilder b("search:T=" + std::to_string(table.resolution()));
    std::vector<Lattice> work{canonicalize(root).position};
    std::set<Lattice> done;
    while (!work.empty()) {
        Lattice const p = work.back();
        work.pop_back();
        if (!done.insert(p).second)
            continue;
        std::size_t const slot = table.slot(p);
        auto const* rec = table.record_at(slot, table.steps());
        b.node(p.cast<Rational>());
        if (!rec)
            continue;
        switch (rec->kind) {
        case UpdateKind::split: {
            auto const s = make_relaxed_split(p, rec->choice);
            b.split(p.template cast<Rational>(), s.left.template cast<Rational>(), s.right.template cast<Rational>(), s.player,
                    s.kind == SplitKind::relaxed);
            work.push_back(canonicalize(s.right).position);
            work.push_back(canonicalize(s.left).position);
            break;
        }
        case UpdateKind::scale:
            b.scale(p.cast<Rational>(), Rational(int(rec->factor)));
            work.push_back(int(rec->factor) * p);
            break;
        case UpdateKind::scale_up: {
            Lattice base;
            for (std::size_t i = 0; i < 4; ++i)
                base[i] = p[i] / int(rec->factor);
            b.scale(p.cast<Rational>(), Rational(1, int(rec->factor)));
            work.push_back(base);
            break;
        }
        }
    }
    return b.finish(canonicalize(root).position.cast<Rational>());
}

// ---------------------------------------------------------------------------
// Values

/// Exact node values: leaves take the zero-bit value, splits the sum of
/// their children, scale nodes value(target) / factor.
inline std::vector<Rational> graph_values(ProtocolGraph const& g)
{
    AffineSystem sys;
    sys.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto const& n = g.nodes[i];
        switch (n.kind) {
        case NodeKind::leaf:
            sys.constant[i] = succ_zero(n.position);
            break;
        case NodeKind::split:
            sys.terms[i] = {{n.left_edge.node, Rational(1)}, {n.right_edge.node, Rational(1)}};
            break;
        case NodeKind::scale:
            sys.terms[i] = {{n.target.node, Rational(1 / n.factor)}};
            break;
        }
    }
    auto res = solve_affine(sys);
    if (res.failure) {
        std::string where;
        for (auto i : res.witness)
            where += (where.empty() ? "" : " ") + format_position(g.nodes[i].position);
        throw VerificationError(std::string("protocol graph has a ") +
                                (*res.failure == AffineFailure::singular ? "singular" : "non-contracting") +
                                " cycle through " + where);
    }
    return res.x;
}

inline Rational graph_value(ProtocolGraph const& g) { return graph_values(g)[g.root]; }

inline Rational normalized_value(ProtocolGraph const& g)
{
    Rational const n = g.nodes[g.root].position.norm1();
    return n == 0 ? Rational(0) : Rational(graph_value(g) / n);
}

/// Targets of back edges in a depth-first walk from the root.
inline std::vector<std::size_t> cycle_heads(ProtocolGraph const& g)
{
    enum : std::uint8_t { fresh, open, closed };
    std::vector<std::uint8_t> state(g.size(), fresh);
    std::set<std::size_t> heads;
    auto children = [&](std::size_t v) {
        std::vector<std::size_t> c;
        auto const& n = g.nodes[v];
        if (n.kind == NodeKind::split)
            c = {n.left_edge.node, n.right_edge.node};
        else if (n.kind == NodeKind::scale)
            c = {n.target.node};
        return c;
    };
    std::vector<std::pair<std::size_t, std::size_t>> stack{{g.root, 0}};
    state[g.root] = open;
    while (!stack.empty()) {
        auto& [v, k] = stack.back();
        auto const c = children(v);
        if (k == c.size()) {
            state[v] = closed;
            stack.pop_back();
            continue;
        }
        std::size_t const w = c[k++];
        if (state[w] == open)
            heads.insert(w);
        else if (state[w] == fresh) {
            state[w] = open;
            stack.push_back({w, 0});
        }
    }
    return {heads.begin(), heads.end()};
}

/// Value of the tree that expands each cycle head at most `unrollings`
/// times along any path; further visits play the zero-bit strategy.
inline Rational truncated_value(ProtocolGraph const& g, int unrollings)
{
    auto const heads = cycle_heads(g);
    std::map<std::size_t, std::size_t> head_index;
    for (std::size_t i = 0; i < heads.size(); ++i)
        head_index[heads[i]] = i;
    std::map<std::pair<std::size_t, std::vector<int>>, Rational> memo;
    auto eval = [&](auto&& self, std::size_t v, std::vector<int> counts) -> Rational {
        auto const& n = g.nodes[v];
        if (auto it = head_index.find(v); it != head_index.end()) {
            if (counts[it->second] >= unrollings)
                return succ_zero(n.position);
            ++counts[it->second];
        }
        auto key = std::make_pair(v, counts);
        if (auto it = memo.find(key); it != memo.end())
            return it->second;
        Rational out;
        switch (n.kind) {
        case NodeKind::leaf:
            out = succ_zero(n.position);
            break;
        case NodeKind::split:
            out = self(self, n.left_edge.node, counts) + self(self, n.right_edge.node, counts);
            break;
        case NodeKind::scale:
            out = self(self, n.target.node, counts) / n.factor;
            break;
        }
        memo.emplace(std::move(key), out);
        return out;
    };
    return eval(eval, g.root, std::vector<int>(heads.size(), 0));
}

// ---------------------------------------------------------------------------
// Analytic checks

/// At every split node: the split is allowed, the senders' bit-0
/// probabilities mix to |left| / |parent|, and the Bayes update of the
/// node's distribution on either bit is the child's distribution. Scale
/// edges must preserve the normalized distribution. Returns the first failure.
inline std::optional<std::string> check_protocol(ProtocolGraph const& g)
{
    auto normalized = [](Exact const& p) {
        Rational const n = p.norm1();
        Exact out = p;
        if (n != 0)
            for (auto& x : out.e)
                x /= n;
        return out;
    };
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto const& n = g.nodes[i];
        std::string const at = " at node " + format_position(n.position);
        if (!is_canonical(n.position) || !n.position.nonnegative())
            return "non-canonical position" + at;
        if (n.kind == NodeKind::scale) {
            if (normalized(apply(n.target.map, n.factor * n.position)) != normalized(g.nodes[n.target.node].position))
                return "scale edge changes the distribution" + at;
            continue;
        }
        if (n.kind != NodeKind::split || n.relaxed)
            continue;
        if (!is_allowed_split(n.position, n.left, n.right, n.player))
            return "split is not allowed" + at;
        Rational const total = n.position.norm1();
        if (total == 0)
            continue;
        Rational mix = 0;
        for (std::size_t k = 0; k < 4; ++k)
            if (n.position[k] != 0)
                mix += (n.position[k] / total) * (n.left[k] / n.position[k]);
        if (mix != n.left.norm1() / total)
            return "branch probability mismatch" + at;
        for (auto [child, e] : {std::pair{n.left, n.left_edge}, std::pair{n.right, n.right_edge}}) {
            Rational const mass = child.norm1();
            if (mass == 0)
                continue;
            Exact post;
            for (std::size_t k = 0; k < 4; ++k)
                post[k] = n.position[k] == 0 ? Rational(0) : Rational((n.position[k] / total) * (child[k] / n.position[k]) / (mass / total));
            if (apply(e.map, post) != normalized(g.nodes[e.node].position))
                return "posterior mismatch" + at;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Monte Carlo

struct SimulationOptions {
    std::uint64_t samples = 1000000;
    std::uint64_t seed = 1;
    int depth_limit = 100; // split nodes per run; the run then plays the zero-bit strategy
    unsigned threads = 1;
};

struct SimulationReport {
    std::string protocol;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
    int depth_limit = 0;
    std::uint64_t successes = 0;
    std::uint64_t truncated = 0;
    std::map<std::size_t, std::uint64_t> leaf_hits; // node -> runs ending there
    Rational expected;                               // normalized graph value
    Rational expected_truncated_floor;               // normalized value with the zero-bit fallback at the limit

    double success_rate() const { return samples ? double(successes) / double(samples) : 0; }
    double standard_error() const
    {
        double const p = success_rate();
        return samples ? std::sqrt(p * (1 - p) / double(samples)) : 0;
    }
};

namespace detail {

struct NodePlan {
    std::array<double, 4> p0{};          // split: probability of the left branch per coordinate
    std::array<std::size_t, 2> next{};   // split children / scale target
    std::array<Symmetry, 2> map{};
    int output = 0;                      // zero-bit output
    std::array<int, 2> blame{};          // players the observer may blame
    int nblame = 0;
    NodeKind kind = NodeKind::leaf;
};

inline std::vector<NodePlan> plan(ProtocolGraph const& g)
{
    std::vector<NodePlan> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto const& n = g.nodes[i];
        auto& p = out[i];
        p.kind = n.kind;
        auto row = [&](int x) { return std::min(n.position(x, 1), n.position(x, 2)); };
        p.output = row(1) > row(0) ? 1 : 0;
        Rational const best = std::max(n.position(p.output, 1), n.position(p.output, 2));
        for (int j = 1; j <= 2; ++j)
            if (n.position(p.output, j) == best)
                p.blame[std::size_t(p.nblame++)] = j;
        if (n.kind == NodeKind::split) {
            if (n.relaxed)
                throw VerificationError("relaxed split at " + format_position(n.position) +
                                        " cannot be simulated");
            for (std::size_t k = 0; k < 4; ++k)
                p.p0[k] = n.position[k] == 0 ? 0.0 : Rational(n.left[k] / n.position[k]).get_d();
            p.next = {n.left_edge.node, n.right_edge.node};
            p.map = {n.left_edge.map, n.right_edge.map};
        } else if (n.kind == NodeKind::scale) {
            p.next = {n.target.node, n.target.node};
            p.map = {n.target.map, n.target.map};
        }
    }
    return out;
}

struct ShardResult {
    std::uint64_t successes = 0, truncated = 0;
    std::map<std::size_t, std::uint64_t> leaf_hits;
};

inline ShardResult run_shard(ProtocolGraph const& g, std::vector<NodePlan> const& plans, std::uint64_t samples,
                             std::uint64_t seed, int depth_limit)
{
    ShardResult r;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto const& root = g.nodes[g.root].position;
    std::discrete_distribution<std::size_t> start{root[0].get_d(), root[1].get_d(), root[2].get_d(), root[3].get_d()};
    std::uint64_t const step_cap = std::uint64_t(depth_limit + 1) * 64 + 1024;
    for (std::uint64_t s = 0; s < samples; ++s) {
        std::size_t idx = start(rng);
        std::size_t v = g.root;
        int splits = 0;
        std::uint64_t steps = 0;
        bool cut = false;
        while (plans[v].kind != NodeKind::leaf) {
            if (++steps > step_cap || (plans[v].kind == NodeKind::split && splits >= depth_limit)) {
                cut = true;
                break;
            }
            auto const& p = plans[v];
            int branch = 0;
            if (p.kind == NodeKind::split) {
                ++splits;
                branch = unit(rng) < p.p0[idx] ? 0 : 1;
            }
            idx = source_index(p.map[std::size_t(branch)], idx);
            v = p.next[std::size_t(branch)];
        }
        if (cut)
            ++r.truncated;
        else
            ++r.leaf_hits[v];
        auto const& p = plans[v];
        int const x = int(idx % 2), owner = int(idx / 2) + 1;
        int blamed = p.blame[0];
        if (p.nblame > 1)
            blamed = p.blame[std::uniform_int_distribution<int>(0, p.nblame - 1)(rng)];
        if (x == p.output && blamed != owner)
            ++r.successes;
    }
    return r;
}

} // namespace detail

inline constexpr unsigned simulation_shards = 16;

/// Plays the protocol against the optimal observer. Results depend only on
/// the seed and sample count, not on the thread count.
inline SimulationReport simulate(ProtocolGraph const& g, SimulationOptions const& opt)
{
    if (g.nodes[g.root].position.norm1() == 0)
        throw UsageError("root position is zero");
    if (opt.depth_limit < 0)
        throw UsageError("depth limit must be non-negative");
    auto const plans = detail::plan(g);
    SimulationReport rep;
    rep.protocol = g.name;
    rep.samples = opt.samples;
    rep.seed = opt.seed;
    rep.depth_limit = opt.depth_limit;
    rep.expected = normalized_value(g);

    std::vector<detail::ShardResult> shards(simulation_shards);
    auto work = [&](unsigned k) {
        std::uint64_t const n = opt.samples / simulation_shards + (k < opt.samples % simulation_shards ? 1 : 0);
        std::seed_seq seq{std::uint32_t(opt.seed), std::uint32_t(opt.seed >> 32), std::uint32_t(k)};
        std::array<std::uint32_t, 2> s{};
        seq.generate(s.begin(), s.end());
        shards[k] = detail::run_shard(g, plans, n, (std::uint64_t(s[0]) << 32) | s[1], opt.depth_limit);
    };
    unsigned const threads = std::max(1u, std::min(opt.threads, simulation_shards));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (unsigned k = t; k < simulation_shards; k += threads)
                work(k);
        });
    for (unsigned k = 0; k < simulation_shards; k += threads)
        work(k);
    for (auto& t : pool)
        t.join();
    for (auto const& s : shards) {
        rep.successes += s.successes;
        rep.truncated += s.truncated;
        for (auto const& [k, c] : s.leaf_hits)
            rep.leaf_hits[k] += c;
    }
    return rep;
}

inline nlohmann::json to_json(SimulationReport const& r, ProtocolGraph const& g)
{
    nlohmann::json leaves = nlohmann::json::array();
    for (auto const& [k, c] : r.leaf_hits)
        leaves.push_back({{"position", format_position(g.nodes[k].position)}, {"hits", c}});
    return {{"protocol", r.protocol},
            {"samples", r.samples},
            {"seed", r.seed},
            {"depth_limit", r.depth_limit},
            {"successes", r.successes},
            {"success_rate", r.success_rate()},
            {"standard_error", r.standard_error()},
            {"expected", {{"exact", to_string(r.expected)}, {"decimal", to_decimal(r.expected, 12)}}},
            {"sigma_distance",
             r.standard_error() > 0 ? std::abs(r.success_rate() - r.expected.get_d()) / r.standard_error() : 0.0},
            {"truncated", r.truncated},
            {"truncated_mass", r.samples ? double(r.truncated) / double(r.samples) : 0.0},
            {"leaf_hits", std::move(leaves)}};
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(Edge const& e) { return {{"node", e.node}, {"map", int(e.map)}}; }

inline nlohmann::json to_json(ProtocolGraph const& g)
{
    nlohmann::json nodes = nlohmann::json::array();
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto const& n = g.nodes[i];
        nlohmann::json j{{"id", i}, {"position", format_position(n.position)}, {"kind", to_string(n.kind)}};
        if (n.kind == NodeKind::split) {
            j["player"] = n.player;
            j["left"] = format_position(n.left);
            j["right"] = format_position(n.right);
            j["left_edge"] = to_json(n.left_edge);
            j["right_edge"] = to_json(n.right_edge);
            j["relaxed"] = n.relaxed;
        } else if (n.kind == NodeKind::scale) {
            j["factor"] = to_string(n.factor);
            j["target"] = to_json(n.target);
        }
        nodes.push_back(std::move(j));
    }
    return {{"format", "cryptosplit-protocol/1"}, {"name", g.name}, {"root", g.root}, {"nodes", std::move(nodes)}};
}

/// Rebuilds a graph from its positions and links; edge maps are recomputed
/// and every node is checked against its stored children.
inline ProtocolGraph graph_from_json(nlohmann::json const& j)
{
    try {
        if (j.value("format", "") != "cryptosplit-protocol/1")
            throw FormatError("not a cryptosplit-protocol/1 document");
        auto const& nodes = j.at("nodes");
        std::vector<Exact> pos;
        for (auto const& n : nodes)
            pos.push_back(parse_position<Rational>(n.at("position").get<std::string>()));
        GraphBuilder b(j.value("name", "file"));
        for (auto const& p : pos)
            b.node(p);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            auto const& n = nodes[i];
            std::string const kind = n.at("kind").get<std::string>();
            if (!is_canonical(pos[i]))
                throw FormatError("node " + std::to_string(i) + ": position is not canonical");
            if (kind == "leaf")
                b.node(pos[i]);
            else if (kind == "split")
                b.split(pos[i], parse_position<Rational>(n.at("left").get<std::string>()),
                        parse_position<Rational>(n.at("right").get<std::string>()), n.at("player").get<int>(),
                        n.value("relaxed", false));
            else if (kind == "scale")
                b.scale(pos[i], parse_rational(n.at("factor").get<std::string>()));
            else
                throw FormatError("node " + std::to_string(i) + ": unknown kind '" + kind + "'");
        }
        std::size_t const root = j.at("root").get<std::size_t>();
        if (root >= pos.size())
            throw FormatError("root index out of range");
        return b.finish(pos[root]);
    } catch (nlohmann::json::exception const& e) {
        throw FormatError(std::string("protocol JSON: ") + e.what());
    } catch (std::invalid_argument const& e) {
        throw FormatError(std::string("protocol JSON: ") + e.what());
    }
}

} // namespace cryptosplit
