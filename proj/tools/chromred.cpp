#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "chromred/box_shrink.hpp"
#include "chromred/error.hpp"
#include "chromred/exact_eval.hpp"
#include "chromred/gadget.hpp"
#include "chromred/reduction.hpp"
#include "chromred/region_scan.hpp"

using namespace chromred;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::uint64_t fnv1a(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex(std::uint64_t v)
{
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << v;
    return os.str();
}

// JSON-lines sink for --trace; a no-op without a path.
class Trace {
public:
    void open(const std::string& path)
    {
        if (path.empty())
            return;
        out_.open(path);
        if (!out_)
            throw PreconditionError("cannot write trace file " + path);
    }
    void write(const json& j)
    {
        if (out_.is_open())
            out_ << j.dump() << '\n';
    }

private:
    std::ofstream out_;
};

struct Common {
    std::string trace_path;
    std::string manifest_path;
};

struct EvalArgs {
    std::string graph, q, y = "0", method = "brute";
};

struct InteractionArgs {
    std::string sp, graph, q, y = "0";
    long s = 0, t = 1;
};

struct GadgetArgs {
    std::string q, y = "0", y0, eps;
    std::uint64_t expr_limit = 100000;
};

struct ShrinkArgs {
    std::string a, b, c, delta, mode = "abs", oracle = "exact";
    std::optional<std::uint64_t> seed;
};

struct ReduceArgs {
    std::string graph, q, y = "0", mode = "abs", oracle = "exact", route = "direct";
    std::optional<std::uint64_t> seed;
    bool check = false;
    unsigned long max_bits = RatioOptions{}.max_denominator_bits;
};

struct ScanArgs {
    std::string rect = "0,-1,2,1", res = "101x101", y = "0", out = "scan";
    int depth = 8;
    double margin = 1e-9;
    unsigned threads = 0;
    bool strict = false;
};

std::uint64_t require_seed(const std::string& oracle, const std::optional<std::uint64_t>& seed)
{
    if (parse_perturbation(oracle) != Perturbation::Exact && !seed)
        throw PreconditionError("--seed is required with a non-exact oracle");
    return seed.value_or(0);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        parts.push_back(cur);
    return parts;
}

json run_eval(const EvalArgs& a, json& params)
{
    params = {{"graph", a.graph}, {"q", a.q}, {"y", a.y}, {"method", a.method}};
    MultiGraph g = load_graph(a.graph);
    GaussianRational q = parse_gaussian(a.q), y = parse_gaussian(a.y);
    GaussianRational z;
    if (a.method == "brute")
        z = z_bruteforce(g, q, y);
    else if (a.method == "delcon")
        z = z_deletion_contraction(g, q, y);
    else
        throw PreconditionError("--method must be brute or delcon");
    return {{"value", to_string(z)}, {"vertices", g.vertex_count()}, {"edges", g.edge_count()}};
}

json run_interaction(const InteractionArgs& a, json& params)
{
    params = {{"sp", a.sp}, {"graph", a.graph}, {"s", a.s}, {"t", a.t}, {"q", a.q}, {"y", a.y}};
    GaussianRational q = parse_gaussian(a.q), y = parse_gaussian(a.y);
    require_nondegenerate(q);
    ExactState st;
    if (!a.sp.empty() == !a.graph.empty())
        throw PreconditionError("give exactly one of --sp and --graph");
    if (!a.sp.empty()) {
        st = sp_state(parse_sp(a.sp), q, y);
    } else {
        TwoTerminalGraph h{load_graph(a.graph), static_cast<VertexId>(a.s), static_cast<VertexId>(a.t)};
        if (a.s < 0 || a.t < 0 || a.s == a.t || static_cast<std::size_t>(std::max(a.s, a.t)) >= h.graph.vertex_count())
            throw PreconditionError("terminals must be distinct vertices of the graph");
        st = state_bruteforce(h, q, y);
    }
    json r = {{"same", to_string(st.same)}, {"dif", to_string(st.dif)}, {"in_hstar", in_hstar(st, q)}};
    if (st.same.is_zero() && st.dif.is_zero()) {
        r["y_eff"] = nullptr;
        r["f_q"] = nullptr;
    } else {
        ExtendedValue ye = y_eff(st, q);
        r["y_eff"] = to_string(ye);
        r["f_q"] = to_string(f_q(ye, q));
    }
    return r;
}

json run_gadget(const GadgetArgs& a, json& params, Trace& trace)
{
    params = {{"q", a.q}, {"y", a.y}, {"y0", a.y0}, {"eps", a.eps}};
    GaussianRational q = parse_gaussian(a.q), y = parse_gaussian(a.y), y0 = parse_gaussian(a.y0);
    mpq_class eps = parse_rational(a.eps);
    if (eps <= 0)
        throw PreconditionError("--eps must be positive");
    IfsSystem sys = precompute_ifs(q, y);
    trace.write({{"event", "ifs"},
                 {"base", to_string(sys.base.expr)},
                 {"maps", sys.cover.size()},
                 {"r", sys.r.get_str()},
                 {"lipschitz", sys.lipschitz}});
    Gadget h = synthesize(sys, y0, eps);
    ExactState st = h.state();
    json r = {{"y_H", to_string(h.y_eff(q))}, {"z_dif", to_string(st.dif)}, {"edges", h.edge_count()}};
    r["sp"] = h.edge_count() <= a.expr_limit ? json(to_string(h.expr)) : json(nullptr);
    return r;
}

json run_shrink(const ShrinkArgs& a, json& params, Trace& trace)
{
    params = {{"A", a.a}, {"B", a.b}, {"C", a.c}, {"delta", a.delta}, {"mode", a.mode}, {"oracle", a.oracle}};
    std::uint64_t seed = require_seed(a.oracle, a.seed);
    if (a.seed)
        params["seed"] = *a.seed;
    GaussianRational A = parse_gaussian(a.a), B = parse_gaussian(a.b);
    mpq_class C = parse_rational(a.c), delta = parse_rational(a.delta);
    if (C <= 0 || delta <= 0)
        throw PreconditionError("--C and --delta must be positive");
    LinearOracle oracle(A, B, parse_oracle_mode(a.mode), parse_perturbation(a.oracle), seed);
    LocalizeOutcome out = localize(oracle, C, delta, [&](std::size_t step, const ShrinkBox& box) {
        trace.write({{"step", step}, {"m", to_string(box.m)}, {"D", box.D.get_str()}});
    });
    if (std::holds_alternative<ZeroA>(out))
        return {{"result", "A=0"}};
    const auto& loc = std::get<Localized>(out);
    return {{"result", "localized"},
            {"estimate", to_string(loc.estimate)},
            {"center", to_string(loc.box.m)},
            {"D", loc.box.D.get_str()},
            {"steps", loc.steps}};
}

json run_reduce(const ReduceArgs& a, json& params, Trace& trace)
{
    params = {{"graph", a.graph}, {"q", a.q}, {"y", a.y}, {"mode", a.mode}, {"oracle", a.oracle}, {"route", a.route}};
    std::uint64_t seed = require_seed(a.oracle, a.seed);
    if (a.seed)
        params["seed"] = *a.seed;
    MultiGraph g = load_graph(a.graph);
    GaussianRational q = parse_gaussian(a.q), y = parse_gaussian(a.y);
    require_nondegenerate(q);
    OracleMode mode = parse_oracle_mode(a.mode);
    Perturbation pert = parse_perturbation(a.oracle);

    std::optional<IfsSystem> sys;
    std::optional<SimulatedZOracle> sim;
    OracleFactory factory;
    if (a.route == "direct") {
        factory = [&](const MultiGraph& h, std::size_t e) {
            return direct_edge_oracle(h, e, q, y, mode, pert, mix_seed(seed, h.edge_count()));
        };
    } else if (a.route == "gadget") {
        sys = precompute_ifs(q, y);
        sim.emplace(q, y, mode, pert, seed);
        factory = [&](const MultiGraph& h, std::size_t e) { return edge_oracle(h, e, *sim, *sys); };
    } else {
        throw PreconditionError("--route must be direct or gadget");
    }

    RatioOptions opts;
    opts.max_denominator_bits = a.max_bits;
    json steps = json::array();
    GaussianRational z = telescope(g, factory, q, y, [&](const TelescopeStep& s) {
        json j = {{"index", s.index},
                  {"edge", s.edge},
                  {"r", to_string(s.report.r)},
                  {"b", s.report.b},
                  {"shrink_steps", s.report.steps},
                  {"unconstrained", s.report.unconstrained}};
        trace.write(j);
        steps.push_back(j);
    }, opts);
    json r = {{"value", to_string(z)}, {"steps", steps}};
    if (a.check) {
        GaussianRational exact = z_bruteforce(g, q, y);
        r["bruteforce"] = to_string(exact);
        r["match"] = exact == z;
    }
    return r;
}

json run_scan(const ScanArgs& a, json& params, Trace& trace, bool& strict_failure)
{
    params = {{"rect", a.rect}, {"res", a.res}, {"depth", a.depth}, {"margin", a.margin}, {"y", a.y}, {"out", a.out}};
    std::vector<std::string> rect = split(a.rect, ',');
    if (rect.size() != 4)
        throw PreconditionError("--rect must be re0,im0,re1,im1");
    std::vector<std::string> res = split(a.res, 'x');
    if (res.size() != 2)
        throw PreconditionError("--res must be WxH");
    ScanConfig cfg;
    cfg.lower_left = GaussianRational(parse_rational(rect[0]), parse_rational(rect[1]));
    cfg.upper_right = GaussianRational(parse_rational(rect[2]), parse_rational(rect[3]));
    try {
        cfg.width = std::stoul(res[0]);
        cfg.height = std::stoul(res[1]);
    } catch (const std::exception&) {
        throw PreconditionError("--res must be WxH with positive integers");
    }
    if (a.depth < 0)
        throw PreconditionError("--depth must be non-negative");
    cfg.depth = a.depth;
    cfg.margin = a.margin;
    cfg.y = parse_gaussian(a.y);
    cfg.threads = a.threads ? a.threads : std::max(1u, std::thread::hardware_concurrency());

    ScanResult r = scan(cfg);
    json summary = scan_summary(r);
    std::string pgm = to_pgm(r);
    std::ofstream(a.out + ".pgm", std::ios::binary) << pgm;
    std::ofstream(a.out + ".json") << summary.dump(2) << '\n';
    trace.write({{"event", "scan"}, {"counts", summary["counts"]}});
    strict_failure = a.strict && summary["counts"]["unknown"].get<std::size_t>() > 0;
    return {{"pgm", a.out + ".pgm"},
            {"json", a.out + ".json"},
            {"pgm_digest", hex(fnv1a(pgm))},
            {"counts", summary["counts"]}};
}

int exit_code(const std::exception_ptr& ep, std::string& message)
{
    try {
        std::rethrow_exception(ep);
    } catch (const PreconditionError& e) {
        message = e.what();
        return 2;
    } catch (const SearchExhausted& e) {
        message = e.what();
        return 3;
    } catch (const BudgetFailure& e) {
        message = e.what();
        return 4;
    } catch (const std::exception& e) {
        message = e.what();
        return 1;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact and approximate evaluation of Z(G; q, y) at complex parameters"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    Common common;
    app.add_option("--trace", common.trace_path, "write JSON-lines step logs here");
    app.add_option("--manifest", common.manifest_path, "write the run manifest here instead of stderr");

    EvalArgs ev;
    auto* eval = app.add_subcommand("eval", "Z(G; q, y) exactly");
    eval->add_option("--graph", ev.graph, "graph JSON file {\"n\":..,\"edges\":[[u,v],..]}")->required();
    eval->add_option("--q", ev.q)->required();
    eval->add_option("--y", ev.y);
    eval->add_option("--method", ev.method, "brute or delcon");

    InteractionArgs ia;
    auto* inter = app.add_subcommand("interaction", "Z^same, Z^dif and y_eff of a two-terminal graph");
    inter->add_option("--sp", ia.sp, "series-parallel expression, e.g. (S e (P e e))");
    inter->add_option("--graph", ia.graph, "graph JSON file, with --s and --t");
    inter->add_option("--s", ia.s);
    inter->add_option("--t", ia.t);
    inter->add_option("--q", ia.q)->required();
    inter->add_option("--y", ia.y);

    GadgetArgs ga;
    auto* gadget = app.add_subcommand("gadget", "series-parallel gadget with |y_H - y0| < eps");
    gadget->add_option("--q", ga.q)->required();
    gadget->add_option("--y", ga.y);
    gadget->add_option("--y0", ga.y0)->required();
    gadget->add_option("--eps", ga.eps)->required();
    gadget->add_option("--expr-limit", ga.expr_limit, "omit expressions with more edges than this");

    ShrinkArgs sa;
    auto* shrink = app.add_subcommand("shrink", "localise the zero of A y + B through an approximation oracle");
    shrink->add_option("--A", sa.a)->required();
    shrink->add_option("--B", sa.b)->required();
    shrink->add_option("--C", sa.c)->required();
    shrink->add_option("--delta", sa.delta)->required();
    shrink->add_option("--mode", sa.mode, "abs or arg");
    shrink->add_option("--oracle", sa.oracle, "exact, seeded or adversarial");
    shrink->add_option("--seed", sa.seed);

    ReduceArgs ra;
    auto* reduce = app.add_subcommand("reduce", "Z(G; q, y) by telescoping through an approximation oracle");
    reduce->add_option("--graph", ra.graph)->required();
    reduce->add_option("--q", ra.q)->required();
    reduce->add_option("--y", ra.y);
    reduce->add_option("--mode", ra.mode, "abs or arg");
    reduce->add_option("--oracle", ra.oracle, "exact, seeded or adversarial");
    reduce->add_option("--seed", ra.seed);
    reduce->add_option("--route", ra.route, "direct or gadget");
    reduce->add_flag("--check", ra.check, "compare with brute force");
    reduce->add_option("--max-denominator-bits", ra.max_bits, "refuse larger height budgets");

    ScanArgs sc;
    auto* scan_cmd = app.add_subcommand("scan", "hardness region bitmap");
    scan_cmd->add_option("--rect", sc.rect, "re0,im0,re1,im1");
    scan_cmd->add_option("--res", sc.res, "WxH");
    scan_cmd->add_option("--depth", sc.depth);
    scan_cmd->add_option("--margin", sc.margin);
    scan_cmd->add_option("--y", sc.y);
    scan_cmd->add_option("--threads", sc.threads, "0 = all cores");
    scan_cmd->add_option("--out", sc.out, "output prefix for .pgm and .json");
    scan_cmd->add_flag("--strict", sc.strict, "exit 3 if any pixel stays Unknown");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    auto start = std::chrono::steady_clock::now();
    json params, result;
    std::string name = app.get_subcommands().front()->get_name();
    bool strict_failure = false;
    int code = 0;
    std::string message;
    try {
        Trace trace;
        trace.open(common.trace_path);
        if (*eval)
            result = run_eval(ev, params);
        else if (*inter)
            result = run_interaction(ia, params);
        else if (*gadget)
            result = run_gadget(ga, params, trace);
        else if (*shrink)
            result = run_shrink(sa, params, trace);
        else if (*reduce)
            result = run_reduce(ra, params, trace);
        else
            result = run_scan(sc, params, trace, strict_failure);
    } catch (...) {
        code = exit_code(std::current_exception(), message);
    }
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (code == 0) {
        std::cout << result.dump() << '\n';
        if (strict_failure) {
            code = 3;
            message = "scan left pixels Unknown";
        }
    }
    if (!message.empty())
        std::cerr << "error: " << message << '\n';

    json manifest = {{"subcommand", name},
                     {"parameters", params},
                     {"tool_version", kVersion},
                     {"exit_code", code},
                     {"wall_time_s", wall},
                     {"result_digest", code == 0 ? json(hex(fnv1a(result.dump()))) : json(nullptr)}};
    if (params.contains("seed"))
        manifest["seed"] = params["seed"];
    if (common.manifest_path.empty()) {
        std::cerr << manifest.dump() << '\n';
    } else {
        std::ofstream out(common.manifest_path);
        out << manifest.dump() << '\n';
    }
    return code;
}
