#pragma once

#include "affine_system.hpp"
#include "constraint.hpp"
#include "simplex.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace cryptosplit {

enum class RowSense : std::uint8_t { ge, eq };

struct LpTerm {
    std::size_t var = 0;
    Rational coef;

    friend bool operator==(LpTerm const& l, LpTerm const& r) { return l.var == r.var && l.coef == r.coef; }
};

struct LpRow {
    std::vector<LpTerm> terms; // sorted by variable, no zero coefficients
    RowSense sense = RowSense::ge;
    Rational rhs;
    std::size_t constraint = 0; // originating constraint

    friend bool operator==(LpRow const& l, LpRow const& r)
    {
        return l.terms == r.terms && l.sense == r.sense && l.rhs == r.rhs;
    }
};

/// minimize s_root subject to the rows, all variables >= 0.
struct LpModel {
    std::vector<Lattice> variables; // lexicographic
    std::size_t objective = 0;
    std::vector<LpRow> rows;

    std::optional<std::size_t> find(Lattice const& p) const
    {
        auto it = std::lower_bound(variables.begin(), variables.end(), p);
        if (it == variables.end() || *it != p)
            return std::nullopt;
        return std::size_t(it - variables.begin());
    }
    std::size_t index_of(Lattice const& p) const
    {
        if (auto i = find(p))
            return *i;
        throw UsageError("no LP variable for position " + format_position(p));
    }

    friend bool operator==(LpModel const& l, LpModel const& r)
    {
        return l.variables == r.variables && l.objective == r.objective && l.rows == r.rows;
    }
};

inline std::string variable_name(Lattice const& p) { return "s_" + format_position(p, '_'); }

namespace detail {

inline LpRow make_row(std::map<std::size_t, Rational> const& acc, RowSense sense, Rational rhs, std::size_t src)
{
    LpRow row;
    for (auto const& [v, c] : acc)
        if (c != 0)
            row.terms.push_back({v, c});
    row.sense = sense;
    row.rhs = std::move(rhs);
    row.constraint = src;
    return row;
}

} // namespace detail

inline LpRow constraint_row(LpModel const& m, Constraint const& c, std::size_t src)
{
    std::map<std::size_t, Rational> acc;
    if (auto const* s = std::get_if<SplitConstraint>(&c)) {
        acc[m.index_of(s->parent)] += 1;
        acc[m.index_of(s->left)] -= 1;
        acc[m.index_of(s->right)] -= 1;
        return detail::make_row(acc, RowSense::ge, Rational(0), src);
    }
    if (auto const* s = std::get_if<ScaleConstraint>(&c)) {
        acc[m.index_of(s->base)] += s->factor;
        acc[m.index_of(s->scaled)] -= 1;
        return detail::make_row(acc, RowSense::eq, Rational(0), src);
    }
    auto const& z = std::get<ZeroBitConstraint>(c);
    acc[m.index_of(z.position)] += 1;
    return detail::make_row(acc, RowSense::ge, z.constant, src);
}

/// One variable per position of the (closed) set, one row per constraint.
inline LpModel build_lp(ConstraintSet const& cs)
{
    if (auto open = ungrounded_positions(cs); !open.empty())
        throw VerificationError("constraint set is not closed: position " + format_position(open.front()) +
                                " is not grounded");
    LpModel m;
    m.variables = cs.positions();
    m.objective = m.index_of(cs.root);
    for (std::size_t i = 0; i < cs.constraints.size(); ++i)
        m.rows.push_back(constraint_row(m, cs.constraints[i], i));
    return m;
}

// ---------------------------------------------------------------------------
// lp_solve text format

namespace detail {

inline std::string lp_number(Rational const& r)
{
    if (is_integer(r))
        return r.get_num().get_str();
    return to_decimal(r, 12);
}

inline std::string lp_expression(LpModel const& m, LpRow const& row, bool exact)
{
    std::ostringstream os;
    bool first = true;
    for (auto const& t : row.terms) {
        Rational mag = abs(t.coef);
        os << (t.coef < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
        if (mag != 1)
            os << (exact ? to_string(mag) : lp_number(mag)) << ' ';
        os << variable_name(m.variables[t.var]);
        first = false;
    }
    if (first)
        os << '0';
    os << (row.sense == RowSense::ge ? " >= " : " = ") << (exact ? to_string(row.rhs) : lp_number(row.rhs));
    return os.str();
}

inline bool row_is_integral(LpRow const& row)
{
    return is_integer(row.rhs) &&
           std::all_of(row.terms.begin(), row.terms.end(), [](LpTerm const& t) { return is_integer(t.coef); });
}

} // namespace detail

/// Serializes in the lp_solve LP dialect. Rows are labelled r1, r2, ...;
/// rows with non-integer data carry an exact restatement in a comment.
inline std::string emit_lp(LpModel const& m)
{
    std::ostringstream os;
    os << "min: " << variable_name(m.variables[m.objective]) << ";\n";
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        auto const& row = m.rows[i];
        os << 'r' << (i + 1) << ": " << detail::lp_expression(m, row, false) << ';';
        if (!detail::row_is_integral(row))
            os << " /* exact: " << detail::lp_expression(m, row, true) << " */";
        os << '\n';
    }
    return os.str();
}

namespace detail {

inline Lattice parse_variable_name(std::string const& name)
{
    if (name.size() < 3 || name.compare(0, 2, "s_") != 0)
        throw FormatError("LP: unexpected variable name '" + name + "'");
    std::string body = name.substr(2);
    std::replace(body.begin(), body.end(), '_', ',');
    try {
        return parse_position<int>(body);
    } catch (std::invalid_argument const& e) {
        throw FormatError("LP: bad variable name '" + name + "': " + e.what());
    }
}

struct ParsedRow {
    std::vector<std::pair<std::string, Rational>> terms;
    RowSense sense;
    Rational rhs;
};

inline ParsedRow parse_lp_relation(std::string const& text)
{
    std::size_t rel = text.find(">=");
    std::size_t rel_len = 2;
    RowSense sense = RowSense::ge;
    if (rel == std::string::npos) {
        rel = text.find('=');
        rel_len = 1;
        sense = RowSense::eq;
    }
    if (rel == std::string::npos)
        throw FormatError("LP: missing relation in '" + text + "'");
    ParsedRow row;
    row.sense = sense;
    try {
        row.rhs = parse_rational(text.substr(rel + rel_len));
    } catch (std::invalid_argument const& e) {
        throw FormatError(std::string("LP: bad right-hand side: ") + e.what());
    }
    std::istringstream is(text.substr(0, rel));
    std::string tok;
    Rational sign = 1;
    std::optional<Rational> coef;
    while (is >> tok) {
        if (tok == "+" || tok == "-") {
            sign = tok == "-" ? -1 : 1;
            continue;
        }
        if (tok[0] == '-' && tok.size() > 1) {
            sign = -1;
            tok = tok.substr(1);
        }
        if (tok == "0" && !coef && row.terms.empty())
            continue;
        if (std::isdigit(static_cast<unsigned char>(tok[0]))) {
            try {
                coef = parse_rational(tok);
            } catch (std::invalid_argument const& e) {
                throw FormatError(std::string("LP: bad coefficient: ") + e.what());
            }
            continue;
        }
        row.terms.emplace_back(tok, sign * coef.value_or(Rational(1)));
        sign = 1;
        coef.reset();
    }
    return row;
}

inline std::string trim(std::string s)
{
    auto const b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    auto const e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace detail

/// Reads the dialect written by emit_lp. Exact comments take precedence
/// over the decimal rendering of a row.
inline LpModel parse_lp(std::string const& text)
{
    std::istringstream in(text);
    std::string line;
    std::optional<std::string> objective;
    std::vector<detail::ParsedRow> rows;
    while (std::getline(in, line)) {
        std::optional<std::string> exact;
        if (auto c = line.find("/*"); c != std::string::npos) {
            auto const e = line.find("*/", c);
            std::string comment = line.substr(c + 2, e == std::string::npos ? std::string::npos : e - c - 2);
            line = line.substr(0, c);
            comment = detail::trim(comment);
            if (comment.rfind("exact:", 0) == 0)
                exact = detail::trim(comment.substr(6));
        }
        if (auto c = line.find("//"); c != std::string::npos)
            line = line.substr(0, c);
        line = detail::trim(line);
        if (line.empty())
            continue;
        if (line.back() != ';')
            throw FormatError("LP: statement without ';': " + line);
        line.pop_back();
        auto const colon = line.find(':');
        std::string const label = colon == std::string::npos ? "" : detail::trim(line.substr(0, colon));
        std::string body = detail::trim(colon == std::string::npos ? line : line.substr(colon + 1));
        if (label == "min") {
            objective = body;
            continue;
        }
        if (label == "max")
            throw FormatError("LP: only minimization models are supported");
        rows.push_back(detail::parse_lp_relation(exact ? *exact : body));
    }
    if (!objective)
        throw FormatError("LP: missing objective");
    std::map<Lattice, int> seen;
    auto const obj = detail::parse_variable_name(*objective);
    seen[obj];
    for (auto const& r : rows)
        for (auto const& t : r.terms)
            seen[detail::parse_variable_name(t.first)];
    LpModel m;
    for (auto const& [p, unused] : seen)
        m.variables.push_back(p);
    m.objective = m.index_of(obj);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::map<std::size_t, Rational> acc;
        for (auto const& t : rows[i].terms)
            acc[m.index_of(detail::parse_variable_name(t.first))] += t.second;
        m.rows.push_back(detail::make_row(acc, rows[i].sense, rows[i].rhs, i));
    }
    return m;
}

// ---------------------------------------------------------------------------
// Solutions

enum class LpStatus : std::uint8_t { optimal, infeasible, unbounded };

inline std::string to_string(LpStatus s)
{
    switch (s) {
    case LpStatus::optimal:
        return "optimal";
    case LpStatus::infeasible:
        return "infeasible";
    case LpStatus::unbounded:
        return "unbounded";
    }
    return "?";
}

/// Primal values (the least feasible point when it exists), the objective,
/// and row duals proving optimality: y >= 0 on inequality rows, free on
/// equalities, A^T y <= e_root and rhs^T y = objective.
struct LpSolution {
    LpStatus status = LpStatus::optimal;
    Rational objective;
    std::vector<Rational> values;
    std::vector<Rational> duals;
    std::vector<std::size_t> basis; // rows held tight by the solver
    std::string method;
    std::string message;
};

inline Rational row_activity(LpRow const& row, std::vector<Rational> const& x)
{
    Rational s = 0;
    for (auto const& t : row.terms)
        s += t.coef * x[t.var];
    return s;
}

/// Exact primal/dual check. Returns a description of the first failure.
inline std::optional<std::string> check_solution(LpModel const& m, LpSolution const& sol)
{
    if (sol.status != LpStatus::optimal)
        return "solution status is " + to_string(sol.status);
    if (sol.values.size() != m.variables.size())
        return std::string("solution has wrong number of values");
    for (std::size_t v = 0; v < sol.values.size(); ++v)
        if (sol.values[v] < 0)
            return "variable " + variable_name(m.variables[v]) + " is negative";
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        auto const lhs = row_activity(m.rows[i], sol.values);
        bool const ok = m.rows[i].sense == RowSense::ge ? lhs >= m.rows[i].rhs : lhs == m.rows[i].rhs;
        if (!ok)
            return "row r" + std::to_string(i + 1) + " is violated";
    }
    if (sol.values[m.objective] != sol.objective)
        return std::string("objective does not match the root value");
    for (auto b : sol.basis) {
        if (b >= m.rows.size())
            return std::string("basis references a missing row");
        if (row_activity(m.rows[b], sol.values) != m.rows[b].rhs)
            return "basis row r" + std::to_string(b + 1) + " is not tight";
    }
    if (sol.duals.size() != m.rows.size())
        return std::string("solution has no dual certificate");
    std::vector<Rational> reduced(m.variables.size(), Rational(0));
    reduced[m.objective] = 1;
    Rational dual_obj = 0;
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        auto const& y = sol.duals[i];
        if (m.rows[i].sense == RowSense::ge && y < 0)
            return "dual of row r" + std::to_string(i + 1) + " is negative";
        for (auto const& t : m.rows[i].terms)
            reduced[t.var] -= y * t.coef;
        dual_obj += y * m.rows[i].rhs;
    }
    for (std::size_t v = 0; v < reduced.size(); ++v)
        if (reduced[v] < 0)
            return "dual constraint of " + variable_name(m.variables[v]) + " is violated";
    if (dual_obj != sol.objective)
        return "duality gap: dual objective " + to_string(dual_obj) + " vs primal " + to_string(sol.objective);
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Dense simplex path

namespace detail {

/// Solves min c^T x over the model through the simplex on its dual.
inline SimplexResult simplex_on_dual(LpModel const& m, std::vector<Rational> const& c,
                                     std::vector<std::size_t>& column_row, std::vector<int>& column_sign)
{
    SimplexProblem pb;
    column_row.clear();
    column_sign.clear();
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        column_row.push_back(i);
        column_sign.push_back(1);
        if (m.rows[i].sense == RowSense::eq) {
            column_row.push_back(i);
            column_sign.push_back(-1);
        }
    }
    std::size_t const cols = column_row.size();
    pb.M.assign(m.variables.size(), std::vector<Rational>(cols, Rational(0)));
    pb.p.resize(cols);
    for (std::size_t k = 0; k < cols; ++k) {
        auto const& row = m.rows[column_row[k]];
        for (auto const& t : row.terms)
            pb.M[t.var][k] = column_sign[k] * t.coef;
        pb.p[k] = column_sign[k] * row.rhs;
    }
    pb.q = c;
    return simplex_maximize(pb);
}

} // namespace detail

inline LpSolution solve_simplex(LpModel const& m)
{
    LpSolution sol;
    sol.method = "simplex";
    std::vector<std::size_t> col_row;
    std::vector<int> col_sign;

    std::vector<Rational> c_root(m.variables.size(), Rational(0));
    c_root[m.objective] = 1;
    auto const r = detail::simplex_on_dual(m, c_root, col_row, col_sign);
    if (r.status == SimplexResult::Status::unbounded) {
        sol.status = LpStatus::infeasible;
        sol.message = "dual ray along row r" + std::to_string(col_row[r.unbounded_column] + 1) +
                      " proves the constraints infeasible";
        return sol;
    }
    sol.objective = r.value;
    sol.duals.assign(m.rows.size(), Rational(0));
    for (std::size_t k = 0; k < col_row.size(); ++k)
        sol.duals[col_row[k]] += col_sign[k] * r.y[k];
    sol.values = r.prices;

    // The least feasible point minimizes every coordinate at once.
    std::vector<Rational> ones(m.variables.size(), Rational(1));
    auto const least = detail::simplex_on_dual(m, ones, col_row, col_sign);
    if (least.status == SimplexResult::Status::optimal && least.prices[m.objective] == sol.objective) {
        bool feasible = true;
        for (auto const& row : m.rows) {
            auto const lhs = row_activity(row, least.prices);
            feasible = feasible && (row.sense == RowSense::ge ? lhs >= row.rhs : lhs == row.rhs);
        }
        if (feasible)
            sol.values = least.prices;
    }
    for (std::size_t i = 0; i < m.rows.size(); ++i)
        if (row_activity(m.rows[i], sol.values) == m.rows[i].rhs && sol.duals[i] != 0)
            sol.basis.push_back(i);
    return sol;
}

// ---------------------------------------------------------------------------
// Strategy iteration for monotone models
//
// Models built from constraint sets have a special shape: each inequality
// bounds one variable from below by a non-negative combination of others
// plus a constant, and equalities tie two variables by a positive factor.
// The feasible set is then closed under componentwise minimum, and its least
// element is the least fixpoint of x = max over rules. Strategy iteration
// fixes one rule per variable, solves the resulting linear system exactly,
// and switches rules while some rule improves.

namespace detail {

struct MonotoneRule {
    std::size_t row = 0;
    std::size_t head = 0;  // class
    Rational scale;        // original row = scale * (x_head - sum g x - b) form
    Rational constant;
    std::vector<std::pair<std::size_t, Rational>> terms; // (class, g >= 0)
};

struct MonotoneForm {
    std::vector<std::size_t> cls;  // class of each variable (dense 0..classes-1)
    std::vector<Rational> mult;    // x_v = mult[v] * x_class(v)
    std::size_t classes = 0;
    std::vector<std::size_t> rep;  // representative variable per class
    std::vector<MonotoneRule> rules;
    struct TreeEdge {
        std::size_t row, u, w;
    };
    std::vector<TreeEdge> tree;
};

inline std::optional<MonotoneForm> monotone_form(LpModel const& m)
{
    std::size_t const n = m.variables.size();
    std::vector<std::size_t> parent(n);
    std::vector<Rational> mult(n, Rational(1)); // relative to parent
    for (std::size_t v = 0; v < n; ++v)
        parent[v] = v;
    auto find = [&](std::size_t v) {
        // Returns root; compresses and keeps mult[v] relative to the root.
        std::vector<std::size_t> path;
        while (parent[v] != v) {
            path.push_back(v);
            v = parent[v];
        }
        for (auto it = path.rbegin(); it != path.rend(); ++it) {
            std::size_t const p = parent[*it];
            if (p != v) {
                mult[*it] *= mult[p];
                parent[*it] = v;
            }
        }
        return v;
    };
    MonotoneForm f;
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        auto const& row = m.rows[i];
        if (row.sense != RowSense::eq)
            continue;
        if (row.terms.size() != 2 || row.rhs != 0 || sgn(row.terms[0].coef) == sgn(row.terms[1].coef))
            return std::nullopt;
        std::size_t const u = row.terms[0].var, w = row.terms[1].var;
        Rational const ratio = -row.terms[0].coef / row.terms[1].coef; // x_w = ratio * x_u
        std::size_t const ru = find(u), rw = find(w);
        Rational const mu = mult[u], mw = mult[w];
        if (ru == rw) {
            if (mw != ratio * mu)
                return std::nullopt;
            continue;
        }
        parent[rw] = ru;
        mult[rw] = ratio * mu / mw;
        f.tree.push_back({i, u, w});
    }
    f.cls.assign(n, 0);
    f.mult.assign(n, Rational(1));
    std::vector<std::size_t> id(n, std::size_t(-1));
    for (std::size_t v = 0; v < n; ++v) {
        std::size_t const r = find(v);
        if (id[r] == std::size_t(-1)) {
            id[r] = f.classes++;
            f.rep.push_back(r);
        }
        f.cls[v] = id[r];
        f.mult[v] = r == v ? Rational(1) : mult[v];
    }
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        auto const& row = m.rows[i];
        if (row.sense != RowSense::ge)
            continue;
        std::map<std::size_t, Rational> acc;
        for (auto const& t : row.terms)
            acc[f.cls[t.var]] += t.coef * f.mult[t.var];
        std::optional<std::size_t> head;
        for (auto const& [c, a] : acc) {
            if (a > 0) {
                if (head)
                    return std::nullopt;
                head = c;
            }
        }
        if (!head) {
            bool const empty = std::all_of(acc.begin(), acc.end(), [](auto const& kv) { return kv.second == 0; });
            if (!empty || row.rhs > 0)
                return std::nullopt; // upper bounds are outside the monotone form
            continue;
        }
        MonotoneRule rule;
        rule.row = i;
        rule.head = *head;
        Rational const h = acc[*head];
        rule.scale = h;
        rule.constant = row.rhs / h;
        for (auto const& [c, a] : acc)
            if (c != *head && a != 0)
                rule.terms.emplace_back(c, -a / h);
        f.rules.push_back(std::move(rule));
    }
    return f;
}

inline Rational rule_value(MonotoneRule const& r, std::vector<Rational> const& x)
{
    Rational v = r.constant;
    for (auto const& [c, g] : r.terms)
        v += g * x[c];
    return v;
}

} // namespace detail

/// Least solution by strategy iteration; nullopt when the model does not have
/// the monotone shape or a strategy system is not contracting.
inline std::optional<LpSolution> solve_strategy(LpModel const& m)
{
    auto form = detail::monotone_form(m);
    if (!form)
        return std::nullopt;
    auto const& f = *form;
    std::size_t const k = f.classes;
    std::vector<std::vector<std::size_t>> rules_of(k);
    for (std::size_t r = 0; r < f.rules.size(); ++r)
        rules_of[f.rules[r].head].push_back(r);

    constexpr std::size_t none = std::size_t(-1);
    std::vector<std::size_t> policy(k, none);
    std::vector<Rational> x(k, Rational(0));
    AffineSystem sys;
    for (std::size_t iter = 0;; ++iter) {
        bool changed = false;
        for (std::size_t c = 0; c < k; ++c) {
            std::size_t best = none;
            Rational best_val = x[c];
            for (auto r : rules_of[c]) {
                Rational v = detail::rule_value(f.rules[r], x);
                if (v > best_val) {
                    best_val = std::move(v);
                    best = r;
                }
            }
            if (best != none) {
                policy[c] = best;
                changed = true;
            }
        }
        if (!changed)
            break;
        sys.resize(k);
        for (std::size_t c = 0; c < k; ++c) {
            if (policy[c] == none)
                continue;
            auto const& r = f.rules[policy[c]];
            sys.constant[c] = r.constant;
            sys.terms[c] = r.terms;
        }
        auto res = solve_affine(sys);
        if (res.failure)
            return std::nullopt;
        for (std::size_t c = 0; c < k; ++c)
            if (res.x[c] < x[c])
                return std::nullopt;
        x = std::move(res.x);
    }

    LpSolution sol;
    sol.method = "strategy-iteration";
    sol.values.resize(m.variables.size());
    for (std::size_t v = 0; v < m.variables.size(); ++v)
        sol.values[v] = f.mult[v] * x[f.cls[v]];
    sol.objective = sol.values[m.objective];

    // Duals: u = c + G^T u over the chosen rules, then spread to the rows.
    std::vector<Rational> cc(k, Rational(0));
    cc[f.cls[m.objective]] = f.mult[m.objective];
    sys.resize(k);
    for (std::size_t c = 0; c < k; ++c)
        if (policy[c] != none)
            sys.terms[c] = f.rules[policy[c]].terms;
    auto ut = solve_affine(sys.transposed(cc));
    if (ut.failure)
        return std::nullopt;
    sol.duals.assign(m.rows.size(), Rational(0));
    for (std::size_t c = 0; c < k; ++c) {
        if (policy[c] == none)
            continue;
        auto const& r = f.rules[policy[c]];
        sol.duals[r.row] = ut.x[c] / r.scale;
        sol.basis.push_back(r.row);
    }

    // Equality duals along the spanning forest of each class: every
    // non-representative variable gets zero reduced cost.
    std::vector<Rational> reduced(m.variables.size(), Rational(0));
    reduced[m.objective] = 1;
    for (std::size_t i = 0; i < m.rows.size(); ++i)
        if (sol.duals[i] != 0)
            for (auto const& t : m.rows[i].terms)
                reduced[t.var] -= sol.duals[i] * t.coef;
    std::vector<std::vector<std::size_t>> adj(m.variables.size());
    for (std::size_t e = 0; e < f.tree.size(); ++e) {
        adj[f.tree[e].u].push_back(e);
        adj[f.tree[e].w].push_back(e);
    }
    auto coef_in = [&](std::size_t row, std::size_t v) {
        for (auto const& t : m.rows[row].terms)
            if (t.var == v)
                return t.coef;
        return Rational(0);
    };
    std::vector<bool> seen(m.variables.size(), false);
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t const root = f.rep[c];
        std::vector<std::size_t> order{root};
        std::vector<std::size_t> up_edge(1, none);
        seen[root] = true;
        for (std::size_t q = 0; q < order.size(); ++q)
            for (auto e : adj[order[q]]) {
                std::size_t const other = f.tree[e].u == order[q] ? f.tree[e].w : f.tree[e].u;
                if (seen[other])
                    continue;
                seen[other] = true;
                order.push_back(other);
                up_edge.push_back(e);
            }
        for (std::size_t q = order.size(); q-- > 1;) {
            std::size_t const v = order[q];
            std::size_t const row = f.tree[up_edge[q]].row;
            Rational const z = reduced[v] / coef_in(row, v);
            sol.duals[row] = z;
            for (auto const& t : m.rows[row].terms)
                reduced[t.var] -= z * t.coef;
            sol.basis.push_back(row);
        }
    }
    std::sort(sol.basis.begin(), sol.basis.end());
    return sol;
}

enum class SolveMethod { automatic, simplex, strategy };

/// Tableau size up to which the automatic method uses the dense simplex.
inline constexpr std::size_t simplex_cell_limit = 200000;

inline LpSolution solve_exact(LpModel const& m, SolveMethod method = SolveMethod::automatic)
{
    std::size_t cols = 0;
    for (auto const& r : m.rows)
        cols += r.sense == RowSense::eq ? 2 : 1;
    bool const small = m.variables.size() * (cols + m.variables.size()) <= simplex_cell_limit;
    if (method == SolveMethod::simplex || (method == SolveMethod::automatic && small))
        return solve_simplex(m);
    if (auto s = solve_strategy(m))
        return *s;
    if (method == SolveMethod::strategy)
        throw VerificationError("model is not a contracting monotone system; use the simplex method");
    return solve_simplex(m);
}

// ---------------------------------------------------------------------------
// Certificate checking

/// Validity of one constraint, or the reason it is invalid.
inline std::optional<std::string> verify_constraint(Constraint const& c)
{
    auto canonical = [](Lattice const& p) { return p.nonnegative() && is_canonical(p); };
    if (auto const* s = std::get_if<SplitConstraint>(&c)) {
        if (!canonical(s->parent) || !canonical(s->left) || !canonical(s->right))
            return std::string("split references a non-canonical or negative position");
        if (s->player < 1 || s->player > 2)
            return std::string("split sender must be player 1 or 2");
        for (auto gl : all_symmetries)
            for (auto gr : all_symmetries)
                if (classify_split(s->parent, apply(gl, s->left), apply(gr, s->right), s->player))
                    return std::nullopt;
        return "no symmetric image of the children is a dominated split of " + format_position(s->parent) +
               " by player " + std::to_string(s->player);
    }
    if (auto const* s = std::get_if<ScaleConstraint>(&c)) {
        if (!canonical(s->base) || s->base.is_zero())
            return std::string("scale base must be a non-zero canonical position");
        if (s->factor < 2)
            return std::string("scale factor must be at least 2");
        if (s->scaled != s->factor * s->base)
            return "scaled position is not " + std::to_string(s->factor) + " x " + format_position(s->base);
        return std::nullopt;
    }
    auto const& z = std::get<ZeroBitConstraint>(c);
    if (!canonical(z.position))
        return std::string("zero-bit constraint on a non-canonical or negative position");
    if (z.constant != succ_zero(z.position))
        return "zero-bit constant " + to_string(z.constant) + " differs from " + std::to_string(succ_zero(z.position));
    return std::nullopt;
}

struct CertificateVerdict {
    bool verified = false;
    Rational bound;      // certified lower bound on the root value
    Rational normalized; // bound / |root|_1
    std::string message;
    std::optional<std::size_t> constraint; // first offending constraint
};

inline nlohmann::json to_json(CertificateVerdict const& v)
{
    nlohmann::json j{{"verdict", v.verified ? "verified" : "unverified"}, {"message", v.message}};
    if (v.verified) {
        j["bound"] = {{"exact", to_string(v.bound)}, {"decimal", to_decimal(v.bound, 12)}};
        j["normalized"] = {{"exact", to_string(v.normalized)}, {"decimal", to_decimal(v.normalized, 12)}};
    }
    if (v.constraint)
        j["constraint"] = *v.constraint;
    return j;
}

/// Checks every constraint, closure, and the claimed solution (primal
/// feasibility, dual feasibility, zero duality gap) in exact arithmetic.
/// Without a claimed solution the model is solved here.
inline CertificateVerdict verify_certificate(ConstraintSet const& cs, std::optional<LpSolution> const& claimed)
{
    CertificateVerdict v;
    for (std::size_t i = 0; i < cs.constraints.size(); ++i) {
        if (auto why = verify_constraint(cs.constraints[i])) {
            v.message = "constraint " + std::to_string(i) + " (" + kind_name(cs.constraints[i]) + "): " + *why;
            v.constraint = i;
            return v;
        }
    }
    if (!is_canonical(cs.root)) {
        v.message = "root is not canonical";
        return v;
    }
    LpModel m;
    try {
        m = build_lp(cs);
    } catch (VerificationError const& e) {
        v.message = e.what();
        return v;
    }
    LpSolution sol = claimed ? *claimed : solve_exact(m);
    if (auto why = check_solution(m, sol)) {
        v.message = *why;
        if (auto pos = why->find("row r"); pos != std::string::npos) {
            std::size_t const row = std::stoul(why->substr(pos + 5)) - 1;
            if (row < m.rows.size())
                v.constraint = m.rows[row].constraint;
        }
        return v;
    }
    v.verified = true;
    v.bound = sol.objective;
    Rational const norm = cs.root.norm1();
    v.normalized = norm == 0 ? Rational(0) : Rational(sol.objective / norm);
    v.message = "certified";
    return v;
}

// ---------------------------------------------------------------------------
// Solution JSON

inline nlohmann::json to_json(LpModel const& m, LpSolution const& s)
{
    nlohmann::json values = nlohmann::json::object();
    for (std::size_t v = 0; v < m.variables.size() && v < s.values.size(); ++v)
        values[format_position(m.variables[v])] = to_string(s.values[v]);
    nlohmann::json duals = nlohmann::json::array();
    for (auto const& d : s.duals)
        duals.push_back(to_string(d));
    return {{"format", "cryptosplit-solution/1"},
            {"status", to_string(s.status)},
            {"method", s.method},
            {"root", format_position(m.variables[m.objective])},
            {"objective", {{"exact", to_string(s.objective)}, {"decimal", to_decimal(s.objective, 12)}}},
            {"values", std::move(values)},
            {"duals", std::move(duals)},
            {"basis", s.basis},
            {"message", s.message}};
}

inline LpSolution solution_from_json(LpModel const& m, nlohmann::json const& j)
{
    LpSolution s;
    try {
        auto const status = j.at("status").get<std::string>();
        s.status = status == "optimal" ? LpStatus::optimal
                   : status == "infeasible" ? LpStatus::infeasible
                                            : LpStatus::unbounded;
        s.method = j.value("method", std::string());
        s.objective = parse_rational(j.at("objective").at("exact").get<std::string>());
        s.values.assign(m.variables.size(), Rational(0));
        for (auto const& [key, val] : j.at("values").items()) {
            auto const idx = m.find(parse_position<int>(key));
            if (!idx)
                throw FormatError("solution names unknown position " + key);
            s.values[*idx] = parse_rational(val.get<std::string>());
        }
        if (j.contains("duals"))
            for (auto const& d : j["duals"])
                s.duals.push_back(parse_rational(d.get<std::string>()));
        if (j.contains("basis"))
            s.basis = j["basis"].get<std::vector<std::size_t>>();
    } catch (nlohmann::json::exception const& e) {
        throw FormatError(std::string("solution JSON: ") + e.what());
    } catch (std::invalid_argument const& e) {
        throw FormatError(std::string("solution JSON: ") + e.what());
    }
    return s;
}

} // namespace cryptosplit
