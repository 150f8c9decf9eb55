#include "cryptosplit/builtins.hpp"
#include "cryptosplit/extract.hpp"
#include "cryptosplit/hardness.hpp"
#include "cryptosplit/lp.hpp"
#include "cryptosplit/protocol.hpp"
#include "cryptosplit/search.hpp"
#include "cryptosplit/sparsify.hpp"
#include "cryptosplit/table_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

using namespace cryptosplit;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum class ReportFormat { json, csv, text };

struct Common {
    std::string format = "json";
    std::string report; // optional file for the report
    unsigned threads = 0;
    bool progress = false;
};

unsigned default_threads()
{
    if (char const* env = std::getenv("CRYPTOSPLIT_THREADS")) {
        try {
            int const n = std::stoi(env);
            if (n >= 1)
                return unsigned(n);
        } catch (std::exception const&) {
        }
        throw UsageError(std::string("CRYPTOSPLIT_THREADS must be a positive integer, got '") + env + "'");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

unsigned threads_of(Common const& c) { return c.threads ? c.threads : default_threads(); }

void flatten(json const& j, std::string const& prefix, std::vector<std::pair<std::string, std::string>>& out)
{
    if (j.is_object()) {
        for (auto const& [k, v] : j.items())
            flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
        for (std::size_t i = 0; i < j.size(); ++i)
            flatten(j[i], prefix + "." + std::to_string(i), out);
    } else {
        out.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
    }
}

std::string render(json const& j, std::string const& format)
{
    if (format == "json")
        return j.dump(2) + "\n";
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(j, "", rows);
    std::ostringstream os;
    if (format == "csv") {
        os << "key,value\n";
        for (auto const& [k, v] : rows) {
            bool const quote = v.find_first_of(",\"\n") != std::string::npos;
            std::string esc;
            for (char c : v)
                esc += c == '"' ? std::string("\"\"") : std::string(1, c);
            os << k << ',' << (quote ? "\"" + esc + "\"" : v) << '\n';
        }
    } else {
        for (auto const& [k, v] : rows)
            os << k << ": " << v << '\n';
    }
    return os.str();
}

void write_file(std::string const& path, std::string const& text)
{
    std::ofstream os(path, std::ios::binary);
    if (!os || !(os << text))
        throw UsageError("cannot write " + path);
}

json read_json(std::string const& path)
{
    std::ifstream is(path);
    if (!is)
        throw UsageError("cannot open " + path);
    try {
        return json::parse(is);
    } catch (json::exception const& e) {
        throw FormatError(path + ": " + e.what());
    }
}

void emit(Common const& c, json const& j)
{
    std::string const text = render(j, c.format);
    if (c.report.empty())
        std::cout << text;
    else
        write_file(c.report, text);
}

void check_output_dir(std::string const& path)
{
    fs::path const p = fs::path(path).parent_path();
    if (!p.empty() && !fs::is_directory(p))
        throw UsageError("output directory " + p.string() + " does not exist");
}

json exact_json(Rational const& r) { return {{"exact", to_string(r)}, {"decimal", to_decimal(r, 12)}}; }

// ---------------------------------------------------------------------------
// search

struct SearchArgs {
    int t = 0;
    std::optional<double> epsilon;
    std::optional<unsigned> iters;
    std::string mode = "float";
    std::string out;
    bool no_prune = false;
    bool upward = false;
    unsigned max_rounds = 5000;
};

SearchOptions search_options(SearchArgs const& a, Common const& c)
{
    SearchOptions opt;
    if (a.iters) {
        opt.termination = SearchOptions::Termination::fixed_rounds;
        opt.rounds = *a.iters;
    }
    if (a.epsilon)
        opt.epsilon = *a.epsilon;
    opt.max_rounds = a.max_rounds;
    opt.prune = !a.no_prune;
    opt.upward_scaling = a.upward;
    opt.threads = threads_of(c);
    if (c.progress)
        opt.progress = [](PassReport const& r) {
            std::cerr << "step " << r.step << ' ' << (r.splitting ? "split" : "scale") << " improved=" << r.improved
                      << " max=" << r.max_improvement << std::endl;
        };
    return opt;
}

template <class V>
json search_summary(SearchResult<V> const& res)
{
    auto const& t = res.table;
    int const T = t.resolution();
    std::size_t improved = 0, splits = 0, scales = 0;
    for (std::size_t s = 0; s < t.size(); ++s) {
        auto const& h = t.history(s);
        if (!h.empty())
            ++improved;
        for (auto const& r : h)
            (r.kind == UpdateKind::split ? splits : scales) += 1;
    }
    json passes = json::array();
    for (auto const& p : res.passes)
        passes.push_back(p.improved);
    json j{{"T", T},
           {"mode", to_string(numeric_mode_of<V>())},
           {"converged", res.converged},
           {"rounds", res.passes.size() / 2},
           {"positions", t.size()},
           {"improved_positions", improved},
           {"split_updates", splits},
           {"scale_updates", scales},
           {"improved_per_pass", passes}};
    V const root = T == 0 ? value_from_int<V>(0) : t.value(Lattice{{T, T, T, T}});
    V const norm = normalized_bound(t);
    if constexpr (std::is_same_v<V, Rational>) {
        j["value"] = exact_json(root);
        j["normalized"] = exact_json(norm);
    } else {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.10f", norm);
        j["value"] = {{"decimal", root}};
        j["normalized"] = {{"decimal", std::string(buf)}};
    }
    return j;
}

template <class V>
SearchResult<V> run_and_save(SearchArgs const& a, Common const& c)
{
    if (a.t < 0)
        throw UsageError("--t must be non-negative");
    if (!a.out.empty())
        check_output_dir(a.out);
    auto res = run_search<V>(a.t, search_options(a, c));
    if (!a.out.empty())
        save_table_file(a.out, res.table, res.converged);
    return res;
}

int cmd_search(SearchArgs const& a, Common const& c)
{
    json j;
    bool converged;
    if (a.mode == "rational") {
        auto res = run_and_save<Rational>(a, c);
        j = search_summary(res);
        converged = res.converged;
    } else if (a.mode == "float") {
        auto res = run_and_save<double>(a, c);
        j = search_summary(res);
        converged = res.converged;
    } else {
        throw UsageError("--mode must be float or rational");
    }
    if (!a.out.empty())
        j["table"] = a.out;
    emit(c, j);
    if (!converged)
        throw ResourceError("search did not converge within " + std::to_string(a.max_rounds) + " rounds");
    return 0;
}

// ---------------------------------------------------------------------------
// constraint sources

ConstraintSet load_constraints(std::string const& src)
{
    if (src == "twobit" || src == "thm29")
        return builtin_constraints(src);
    return constraint_set_from_json(read_json(src));
}

template <class V>
ConstraintSet extract_from(std::istream& is, TableHeader const& h, std::optional<Lattice> root, std::optional<unsigned> step)
{
    auto const table = read_table_body<V>(is, h);
    int const T = table.resolution();
    Lattice const r = root ? *root : Lattice{{T, T, T, T}};
    for (auto x : r.e)
        if (x < 0 || x > T)
            throw UsageError("root " + format_position(r) + " lies outside the table");
    return step ? extract(table, r, *step) : extract(table, r);
}

ConstraintSet extract_from_file(std::string const& path, std::optional<Lattice> root, std::optional<unsigned> step)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw UsageError("cannot open " + path);
    auto const h = read_table_header(is);
    if (h.mode == NumericMode::rational)
        return extract_from<Rational>(is, h, root, step);
    return extract_from<double>(is, h, root, step);
}

// ---------------------------------------------------------------------------
// pipeline

struct PipelineArgs {
    SearchArgs search;
    std::string builtin;
    std::string constraints;
    std::string out_dir;
    std::string method = "auto";
};

SolveMethod parse_method(std::string const& m)
{
    if (m == "auto")
        return SolveMethod::automatic;
    if (m == "simplex")
        return SolveMethod::simplex;
    if (m == "strategy")
        return SolveMethod::strategy;
    throw UsageError("--method must be auto, simplex or strategy");
}

int cmd_pipeline(PipelineArgs const& a, Common const& c)
{
    if (!a.out_dir.empty())
        fs::create_directories(a.out_dir);
    auto path = [&](char const* name) { return (fs::path(a.out_dir) / name).string(); };
    json rep;
    ConstraintSet cs;
    std::optional<double> search_value;
    if (!a.builtin.empty()) {
        cs = builtin_constraints(a.builtin);
        rep["source"] = "builtin:" + a.builtin;
    } else if (!a.constraints.empty()) {
        cs = load_constraints(a.constraints);
        rep["source"] = a.constraints;
    } else {
        if (a.search.mode != "float")
            throw UsageError("pipeline searches in float mode");
        auto res = run_search<double>(a.search.t, search_options(a.search, c));
        if (!res.converged)
            throw ResourceError("search did not converge");
        int const T = a.search.t;
        if (T == 0)
            throw UsageError("pipeline needs T >= 1");
        cs = extract(res.table, Lattice{{T, T, T, T}});
        search_value = res.table.value(Lattice{{T, T, T, T}});
        rep["source"] = "search";
        rep["search"] = search_summary(res);
        if (!a.out_dir.empty())
            save_table_file(path("table.cgt"), res.table, res.converged);
    }
    SolveMethod const method = parse_method(a.method);
    rep["constraints"] = cs.constraints.size();
    if (!a.out_dir.empty())
        write_file(path("constraints.full.json"), to_json(cs).dump(1) + "\n");

    CertificateVerdict verdict;
    try {
        LpModel const model = build_lp(cs);
        auto const t0 = std::chrono::steady_clock::now();
        LpSolution const sol = solve_exact(model, method);
        rep["lp"] = {{"variables", model.variables.size()},
                     {"rows", model.rows.size()},
                     {"method", sol.method},
                     {"objective", exact_json(sol.objective)},
                     {"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
        auto const sp = sparsify(cs, sol);
        rep["sparsified"] = {{"constraints", sp.constraints.constraints.size()},
                             {"duplicates", sp.duplicates},
                             {"slack_removed", sp.slack_removed},
                             {"unreachable_removed", sp.unreachable_removed},
                             {"grounding_restored", sp.grounding_restored}};
        LpModel const sparse_model = build_lp(sp.constraints);
        LpSolution const sparse_sol = solve_exact(sparse_model, method);
        verdict = verify_certificate(sp.constraints, sparse_sol);
        if (!a.out_dir.empty()) {
            write_file(path("constraints.json"), to_json(sp.constraints).dump(1) + "\n");
            write_file(path("model.lp"), emit_lp(sparse_model));
            write_file(path("solution.json"), to_json(sparse_model, sparse_sol).dump(1) + "\n");
        }
    } catch (VerificationError const& e) {
        verdict.verified = false;
        verdict.message = e.what();
    }
    if (search_value && verdict.verified)
        rep["improves_search"] = verdict.bound.get_d() >= *search_value - 1e-9;
    rep["verdict"] = to_json(verdict);
    if (!a.out_dir.empty())
        write_file(path("verdict.json"), to_json(verdict).dump(1) + "\n");
    emit(c, rep);
    return verdict.verified ? 0 : 2;
}

// ---------------------------------------------------------------------------
// verify / extract / emit / solve

int cmd_verify(std::string const& constraints, std::string const& solution, Common const& c)
{
    CertificateVerdict v;
    try {
        auto const cs = load_constraints(constraints);
        std::optional<LpSolution> claimed;
        if (!solution.empty()) {
            auto const model = build_lp(cs);
            claimed = solution_from_json(model, read_json(solution));
        }
        v = verify_certificate(cs, claimed);
    } catch (FormatError const& e) {
        v.message = e.what();
    } catch (VerificationError const& e) {
        v.message = e.what();
    }
    emit(c, to_json(v));
    return v.verified ? 0 : 2;
}

int cmd_extract(std::string const& table, std::string const& root, std::optional<unsigned> step, std::string const& out,
                Common const& c)
{
    std::optional<Lattice> r;
    if (!root.empty())
        r = parse_position<int>(root);
    auto const cs = extract_from_file(table, r, step);
    std::string const text = to_json(cs).dump(1) + "\n";
    if (out.empty())
        std::cout << text;
    else
        write_file(out, text);
    json rep{{"root", format_position(cs.root)},
             {"constraints", cs.constraints.size()},
             {"closed", is_closed(cs)},
             {"positions", cs.positions().size()}};
    if (!out.empty())
        emit(c, rep);
    return 0;
}

int cmd_emit(std::string const& constraints, std::string const& out)
{
    auto const text = emit_lp(build_lp(load_constraints(constraints)));
    if (out.empty())
        std::cout << text;
    else
        write_file(out, text);
    return 0;
}

int cmd_solve(std::string const& constraints, std::string const& method, std::string const& out, Common const& c)
{
    auto const cs = load_constraints(constraints);
    auto const model = build_lp(cs);
    auto const sol = solve_exact(model, parse_method(method));
    json const j = to_json(model, sol);
    if (!out.empty())
        write_file(out, j.dump(1) + "\n");
    emit(c, {{"status", to_string(sol.status)},
             {"method", sol.method},
             {"objective", exact_json(sol.objective)},
             {"normalized", exact_json(Rational(sol.objective / cs.root.norm1()))}});
    return sol.status == LpStatus::optimal ? 0 : 2;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    std::string protocol = "twobit";
    std::uint64_t samples = 1000000;
    std::uint64_t seed = 1;
    int depth_limit = 100;
    std::string save_graph;
};

ProtocolGraph load_protocol(std::string const& src)
{
    if (src == "twobit" || src == "thm29")
        return builtin_graph(src);
    if (fs::path(src).extension() == ".cgt") {
        std::ifstream is(src, std::ios::binary);
        if (!is)
            throw UsageError("cannot open " + src);
        auto const h = read_table_header(is);
        Lattice const root{{h.resolution, h.resolution, h.resolution, h.resolution}};
        if (h.mode == NumericMode::rational)
            return graph_from_provenance(read_table_body<Rational>(is, h), root);
        return graph_from_provenance(read_table_body<double>(is, h), root);
    }
    return graph_from_json(read_json(src));
}

int cmd_simulate(SimulateArgs const& a, Common const& c)
{
    auto const g = load_protocol(a.protocol);
    if (!a.save_graph.empty())
        write_file(a.save_graph, to_json(g).dump(1) + "\n");
    if (auto why = check_protocol(g))
        throw VerificationError(*why);
    auto const rep = simulate(g, {a.samples, a.seed, a.depth_limit, threads_of(c)});
    json j = to_json(rep, g);
    j["graph_value"] = exact_json(graph_value(g));
    j["nodes"] = g.size();
    emit(c, j);
    double const dist = rep.standard_error() > 0
                            ? std::abs(rep.success_rate() - rep.expected.get_d()) / rep.standard_error()
                            : 0.0;
    return dist <= 4 ? 0 : 2;
}

// ---------------------------------------------------------------------------
// hardness

struct HardnessArgs {
    std::string variant = "adapted";
    int grid = 201;
    int q_levels = 21;
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
};

int cmd_hardness(HardnessArgs const& a, Common const& c)
{
    UpperVariant const v = parse_variant(a.variant);
    Exact const uniform{{Rational(1, 4), Rational(1, 4), Rational(1, 4), Rational(1, 4)}};
    auto const c2 = check_c2prime(v);
    auto const dom = check_dominates_succ0(a.samples, a.seed, v);
    auto const c1 = check_c1_sampling(a.samples, a.seed, v);
    auto const ub = ub_superadditive_check(a.samples, a.seed);
    HessianGrid grid;
    grid.n = a.grid;
    grid.q_levels = a.q_levels;
    grid.variant = v;
    auto const psd = check_psd(grid);
    bool const pass = c2.pass && dom.pass && c1.pass && ub.pass && psd.pass;
    json j{{"variant", to_string(v)},
           {"seed", a.seed},
           {"samples", a.samples},
           {"s_uniform", exact_json(s_upper(uniform, v))},
           {"c2prime", to_json(c2)},
           {"dominates_succ0", to_json(dom)},
           {"c1_sampling", to_json(c1)},
           {"ub_superadditive", to_json(ub)},
           {"hessian", to_json(psd)},
           {"verdict", pass ? "PASS" : "FAIL"}};
    emit(c, j);
    return pass ? 0 : 2;
}

void add_common(CLI::App* app, Common& c, bool threads = true)
{
    app->add_option("--format", c.format, "Report format")->check(CLI::IsMember({"json", "csv", "text"}));
    app->add_option("--report", c.report, "Write the report to this file instead of stdout");
    if (threads) {
        app->add_option("--threads", c.threads, "Worker threads (default: $CRYPTOSPLIT_THREADS or all cores)")
            ->check(CLI::PositiveNumber);
        app->add_flag("--progress", c.progress, "Print per-pass improvement counts to stderr");
    }
}

void add_search_options(CLI::App* app, SearchArgs& s)
{
    auto* eps = app->add_option("--epsilon", s.epsilon, "Stop once a round improves no value by this much");
    auto* it = app->add_option("--iters", s.iters, "Run exactly this many rounds");
    eps->excludes(it);
    app->add_option("--mode", s.mode, "Numeric mode")->check(CLI::IsMember({"float", "rational"}));
    app->add_option("--max-rounds", s.max_rounds, "Hard cap on rounds in converge mode");
    app->add_flag("--no-prune", s.no_prune, "Disable ub_min pruning of split candidates");
    app->add_flag("--upward-scaling", s.upward, "Also apply s(lambda D) >= lambda s(D) (experimental)");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Vector-splitting game search, certification, simulation and hardness checks"};
    app.require_subcommand(1);
    Common common;

    SearchArgs search;
    auto* s = app.add_subcommand("search", "Run the splitting/scaling search");
    s->add_option("--t", search.t, "Resolution T")->required();
    add_search_options(s, search);
    s->add_option("--out", search.out, "Write the table (CGTABLE/1)");
    add_common(s, common);

    PipelineArgs pipe;
    auto* p = app.add_subcommand("pipeline", "search -> extract -> LP -> sparsify -> verify");
    auto* pt = p->add_option("--t", pipe.search.t, "Resolution T");
    auto* pb = p->add_option("--builtin", pipe.builtin, "Use a built-in constraint set")
                   ->check(CLI::IsMember({"twobit", "thm29"}));
    auto* pc = p->add_option("--constraints", pipe.constraints, "Use a constraint set file");
    pt->excludes(pb)->excludes(pc);
    pb->excludes(pc);
    add_search_options(p, pipe.search);
    p->add_option("--out-dir", pipe.out_dir, "Directory for table, constraints, .lp, solution and verdict");
    p->add_option("--method", pipe.method, "LP method")->check(CLI::IsMember({"auto", "simplex", "strategy"}));
    add_common(p, common);

    std::string v_constraints, v_solution;
    auto* v = app.add_subcommand("verify", "Check a constraint set and a claimed LP solution");
    v->add_option("--constraints", v_constraints, "Constraint set JSON or built-in name")->required();
    v->add_option("--solution", v_solution, "Claimed solution JSON (solved internally when absent)");
    add_common(v, common, false);

    std::string x_table, x_root, x_out;
    std::optional<unsigned> x_step;
    auto* x = app.add_subcommand("extract", "Extract the constraints supporting a table value");
    x->add_option("--table", x_table, "Table file")->required()->check(CLI::ExistingFile);
    x->add_option("--root", x_root, "Root position a,b,c,d (default T,T,T,T)");
    x->add_option("--step", x_step, "Update step (default: last)");
    x->add_option("--out", x_out, "Constraint set JSON (default stdout)");
    add_common(x, common, false);

    std::string e_constraints, e_out;
    auto* e = app.add_subcommand("emit", "Write the LP of a constraint set in lp_solve format");
    e->add_option("--constraints", e_constraints, "Constraint set JSON or built-in name")->required();
    e->add_option("--out", e_out, "Output .lp file (default stdout)");

    std::string so_constraints, so_method = "auto", so_out;
    auto* so = app.add_subcommand("solve", "Solve the LP of a constraint set exactly");
    so->add_option("--constraints", so_constraints, "Constraint set JSON or built-in name")->required();
    so->add_option("--method", so_method, "LP method")->check(CLI::IsMember({"auto", "simplex", "strategy"}));
    so->add_option("--out", so_out, "Solution JSON");
    add_common(so, common, false);

    SimulateArgs sim;
    auto* m = app.add_subcommand("simulate", "Monte Carlo play against the optimal observer");
    m->add_option("--protocol", sim.protocol, "twobit, thm29, a protocol JSON, or a .cgt table");
    m->add_option("--samples", sim.samples, "Number of runs");
    m->add_option("--seed", sim.seed, "RNG seed");
    m->add_option("--depth-limit", sim.depth_limit, "Split nodes per run before the zero-bit fallback");
    m->add_option("--save-graph", sim.save_graph, "Write the protocol graph JSON");
    add_common(m, common);

    HardnessArgs hard;
    auto* h = app.add_subcommand("hardness", "Check the upper-bound function");
    h->add_option("--variant", hard.variant, "adapted or brody")->check(CLI::IsMember({"adapted", "brody"}));
    h->add_option("--grid", hard.grid, "Grid points per axis");
    h->add_option("--q-levels", hard.q_levels, "Number of powers of two for q");
    h->add_option("--samples", hard.samples, "Random samples per property");
    h->add_option("--seed", hard.seed, "RNG seed");
    add_common(h, common, false);

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& err) {
        int const rc = app.exit(err);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*s)
            return cmd_search(search, common);
        if (*p) {
            if (pipe.builtin.empty() && pipe.constraints.empty() && pt->count() == 0)
                throw UsageError("pipeline needs --t, --builtin or --constraints");
            return cmd_pipeline(pipe, common);
        }
        if (*v)
            return cmd_verify(v_constraints, v_solution, common);
        if (*x)
            return cmd_extract(x_table, x_root, x_step, x_out, common);
        if (*e)
            return cmd_emit(e_constraints, e_out);
        if (*so)
            return cmd_solve(so_constraints, so_method, so_out, common);
        if (*m)
            return cmd_simulate(sim, common);
        if (*h)
            return cmd_hardness(hard, common);
    } catch (UsageError const& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    } catch (std::invalid_argument const& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    } catch (VerificationError const& err) {
        std::cerr << "verification failed: " << err.what() << '\n';
        return 2;
    } catch (FormatError const& err) {
        std::cerr << "invalid input: " << err.what() << '\n';
        return 2;
    } catch (ResourceError const& err) {
        std::cerr << "resource limit: " << err.what() << '\n';
        return 3;
    } catch (std::bad_alloc const&) {
        std::cerr << "resource limit: out of memory\n";
        return 3;
    }
    return 1;
}
