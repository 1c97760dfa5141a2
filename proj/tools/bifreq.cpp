// bifreq: command-line front end.
//
// Exit codes: 0 clean, 1 property violation, 2 input or plugin fault,
// 3 resource refusal.

#include "bifreq/bifreq.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>

using namespace bifreq;

namespace {

enum Exit { kClean = 0, kViolation = 1, kInputFault = 2, kRefusal = 3 };

struct SystemArgs {
    std::string system = "golden";
    std::string r;
    std::optional<std::int64_t> lambda;
};

void add_system_options(CLI::App* cmd, SystemArgs& a)
{
    cmd->add_option("--system", a.system, "trivial | half | golden | plugin:<command>")->capture_default_str();
    cmd->add_option("--r", a.r, "claimed ratio, exact (e.g. 3/2, 1.42, R0, (18-sqrt5)/11); default: the system's");
    cmd->add_option("--lambda", a.lambda, "claimed additive constant; default: the system's");
}

/// Built-in systems carry their own claims; plugin systems default to (2, 0).
FSystemSpec make_system(const SystemArgs& a)
{
    FSystemSpec sys;
    if (a.system.rfind("plugin:", 0) == 0) {
        const std::string command = a.system.substr(7);
        if (command.empty()) throw std::invalid_argument("plugin: needs a command");
        sys = plugin_system(command);
    } else {
        sys = builtin_system(a.system);
    }
    if (!a.r.empty()) sys.claimed_ratio = parse_golden(a.r);
    if (a.lambda) sys.claimed_lambda = *a.lambda;
    return sys;
}

std::ifstream open_in(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return in;
}

/// Prints the first few violations to stderr.
void summarize(const std::vector<Violation>& v, const std::string& prefix = "")
{
    constexpr std::size_t shown = 10;
    for (std::size_t i = 0; i < v.size() && i < shown; ++i) std::cerr << prefix << v[i].describe() << '\n';
    if (v.size() > shown) std::cerr << "... and " << v.size() - shown << " more in the report\n";
}

/// Writes to path, or to stdout when path is empty or "-".
template <class Fn>
void emit(const std::string& path, Fn&& write)
{
    if (path.empty() || path == "-") {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    write(out);
}

void emit_json(const std::string& path, const nlohmann::json& j)
{
    emit(path, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
    SystemArgs sys;
    std::int64_t t_max = 1000;
    std::int64_t f2_t_max = 100;
    std::int64_t comp_t_max = 0;
    std::int64_t lemma_t_max = 0;
    bool unreduced = false;
    unsigned jobs = default_jobs();
    std::string out;
};

int cmd_verify(const VerifyArgs& a)
{
    const FSystemSpec sys = make_system(a.sys);
    const std::int64_t comp = a.comp_t_max > 0 ? a.comp_t_max : a.t_max;
    CheckReport report{sys.name, a.t_max, a.f2_t_max, a.lemma_t_max, sys.claimed_ratio, sys.claimed_lambda, {}, {}};
    auto append = [&](std::vector<Violation> v) { report.violations.insert(report.violations.end(), v.begin(), v.end()); };
    append(check_f1(sys, a.t_max, a.jobs));
    if (a.f2_t_max > 0) append(check_f2(sys, a.f2_t_max, a.jobs));
    if (a.unreduced && a.f2_t_max > 0) append(check_f2_unreduced(sys, std::max<std::int64_t>(1, a.f2_t_max / 10)));
    append(check_competitiveness(sys, sys.claimed_ratio, sys.claimed_lambda, comp));
    if (a.lemma_t_max > 0) append(lemma_chain_check(sys, sys.claimed_ratio, sys.claimed_lambda, a.lemma_t_max));
    emit_json(a.out, to_json(report));
    summarize(report.violations);
    return report.violations.empty() ? kClean : kViolation;
}

struct FalsifyArgs {
    SystemArgs sys;
    std::int64_t t_max = 1000;
    std::int64_t f2_t_max = 60;
    unsigned jobs = default_jobs();
    std::string out;
};

int cmd_falsify(const FalsifyArgs& a)
{
    const FSystemSpec sys = make_system(a.sys);
    CheckReport report{sys.name, a.t_max, a.f2_t_max, 0, sys.claimed_ratio, sys.claimed_lambda, {}, {}};
    report.falsify = falsify(sys, sys.claimed_ratio, sys.claimed_lambda, a.t_max, a.f2_t_max, a.jobs);
    report.violations = report.falsify->violations;
    emit_json(a.out, to_json(report));
    const auto& v = *report.falsify;
    if (v.outcome == FalsifyVerdict::Outcome::Refuted) {
        summarize(v.violations, "refuted: ");
        for (const auto& x : v.trace_breaches) std::cerr << "refuted: " << x << '\n';
        return kViolation;
    }
    std::cerr << "no direct violation within the horizon; the recurrence forces gamma_" << v.contradiction_index
              << " >= " << detail::rational_to_string(v.forced_gamma) << " >= 3\n";
    return kClean;
}

// ---------------------------------------------------------------------------

struct RunArgs {
    SystemArgs sys;
    std::string graph, requests, assignment, report;
};

int cmd_run(const RunArgs& a)
{
    auto gin = open_in(a.graph);
    const BipartiteGraph g = BipartiteGraph::build(read_graph(gin));
    auto rin = open_in(a.requests);
    std::vector<VertexId> stream;
    for (const auto& id : read_requests(rin)) {
        auto v = g.find(id);
        if (!v) throw InputError("request names unknown vertex \"" + id + "\"");
        stream.push_back(*v);
    }
    const FSystemSpec sys = make_system(a.sys);
    Allocator<BipartiteGraph> alloc(g, sys);
    nlohmann::json steps = nlohmann::json::array();
    int code = kClean;
    std::string failure;
    for (VertexId v : stream) {
        try {
            const Frequency f = alloc.allocate(v);
            steps.push_back({{"vertex", g.id(v)},
                             {"frequency", encode_global(f)},
                             {"t", alloc.current_t()},
                             {"used", alloc.distinct_used()}});
        } catch (const CollisionError& e) {
            failure = "collision: " + g.id(e.vertex) + " and " + g.id(e.neighbor) + " both hold " + to_string(e.frequency);
            code = kViolation;
            break;
        } catch (const F1Breach& e) {
            failure = e.what();
            code = kViolation;
            break;
        }
    }
    if (code == kClean) {
        if (auto clash = find_conflict(g, std::span<const FrequencySet>(alloc.assignment()))) {
            failure = "collision: " + g.id(clash->first) + " and " + g.id(clash->second);
            code = kViolation;
        }
    }
    nlohmann::json report = {{"system", sys.name},
                             {"requests", stream.size()},
                             {"processed", steps.size()},
                             {"t", alloc.current_t()},
                             {"distinct_used", alloc.distinct_used()},
                             {"steps", steps},
                             {"valid", code == kClean}};
    if (!failure.empty()) report["failure"] = failure;
    if (!a.assignment.empty()) emit_json(a.assignment, assignment_json(g, alloc.assignment()));
    emit_json(a.report, report);
    if (!failure.empty()) std::cerr << failure << '\n';
    return code;
}

// ---------------------------------------------------------------------------

struct UniversalArgs {
    std::int64_t t_max = 10;
    std::string graph, requests;
    std::int64_t max_edges = kMaxExportEdges;
    std::optional<std::string> system;
    std::string r;
    std::optional<std::int64_t> lambda;
    std::string report, csv;
};

int cmd_adversary_universal(const UniversalArgs& a)
{
    if (a.t_max > kMaxUniversalHorizon) {
        throw ScaleRefusal("universal horizon " + std::to_string(a.t_max) + " exceeds the limit " +
                               std::to_string(kMaxUniversalHorizon),
                           a.t_max, kMaxUniversalHorizon);
    }
    const UniversalGraph g(a.t_max);
    if (!a.graph.empty()) {
        const GraphSpec spec = universal_graph_spec(g, a.max_edges);
        emit(a.graph, [&](std::ostream& os) { write_graph(os, spec); });
    }
    if (!a.requests.empty()) {
        std::vector<std::string> ids;
        for (VertexId v : universal_requests(g)) ids.push_back(g.id(v));
        emit(a.requests, [&](std::ostream& os) { write_requests(os, ids); });
    }
    if (!a.system) return kClean;
    SystemArgs sa;
    sa.system = *a.system;
    sa.r = a.r;
    sa.lambda = a.lambda;
    const FSystemSpec sys = make_system(sa);
    RunReport report;
    try {
        report = run_universal(sys, a.t_max);
    } catch (const CollisionError& e) {
        std::cerr << "collision: " << g.id(e.vertex) << " and " << g.id(e.neighbor) << " both hold "
                  << to_string(e.frequency) << '\n';
        return kViolation;
    } catch (const F1Breach& e) {
        std::cerr << e.what() << '\n';
        return kViolation;
    }
    if (!a.report.empty()) emit_json(a.report, to_json(report));
    if (!a.csv.empty()) emit(a.csv, [&](std::ostream& os) { write_csv(os, report); });
    if (a.report.empty() && a.csv.empty()) emit_json("-", to_json(report));
    return report.all_within() && report.opt_matches() ? kClean : kViolation;
}

struct LowerBoundArgs {
    std::int64_t theta = 1;
    std::int64_t lambda = 1;
    std::int64_t scale_cap = 1'000'000;
    std::string graph, requests;
};

int cmd_adversary_lower_bound(const LowerBoundArgs& a)
{
    const auto inst = lower_bound_instance(a.theta, a.lambda, a.scale_cap);
    emit(a.graph, [&](std::ostream& os) { write_graph(os, inst.graph); });
    if (!a.requests.empty()) emit(a.requests, [&](std::ostream& os) { write_requests(os, inst.requests); });
    return kClean;
}

// ---------------------------------------------------------------------------

struct OptArgs {
    std::string graph, loads, out;
    std::int64_t budget = 10;
};

BipartiteInstance read_instance(const OptArgs& a)
{
    auto gin = open_in(a.graph);
    BipartiteInstance inst{BipartiteGraph::build(read_graph(gin)), {}};
    inst.loads.assign(inst.graph.vertex_count(), 0);
    auto lin = open_in(a.loads);
    const auto j = detail::parse_json(lin, "loads file");
    if (!j.is_object()) throw InputError("loads file must map vertex ids to loads");
    for (const auto& [id, l] : j.items()) {
        if (!l.is_number_integer() || l.get<std::int64_t>() < 0) {
            throw InputError("load of \"" + id + "\" must be a non-negative integer");
        }
        inst.loads[inst.graph.require(id)] = l.get<std::int64_t>();
    }
    return inst;
}

int cmd_opt_static(const OptArgs& a)
{
    const auto inst = read_instance(a);
    const auto sets = static_allocate(inst);
    emit_json(a.out, {{"opt", static_opt(inst)}, {"assignment", assignment_json(inst.graph, sets)}});
    return kClean;
}

int cmd_opt_brute(const OptArgs& a)
{
    const auto inst = read_instance(a);
    const auto opt = brute_force_opt(inst, a.budget);
    if (!opt) {
        std::cerr << "total load exceeds the search budget " << a.budget << '\n';
        return kRefusal;
    }
    emit_json(a.out, {{"opt", *opt}, {"static_opt", static_opt(inst)}});
    return *opt == static_opt(inst) ? kClean : kViolation;
}

// ---------------------------------------------------------------------------

struct PlotArgs {
    SystemArgs sys;
    std::int64_t t = 10;
    std::optional<std::int64_t> k;
    std::string side = "A";
    std::string out;
};

/// One row per band of F^c_{t,k}: indices in (lo, hi] of the named pool.
int cmd_plot_sets(const PlotArgs& a)
{
    if (a.t < 1) throw std::invalid_argument("--t must be at least 1");
    const FSystemSpec sys = make_system(a.sys);
    const Side c = parse_side(a.side);
    const std::int64_t k_lo = a.k ? *a.k : 1;
    const std::int64_t k_hi = a.k ? *a.k : a.t;
    if (k_lo < 1 || k_hi > a.t) throw std::invalid_argument("--k must lie in 1..t");
    emit(a.out, [&](std::ostream& os) {
        os << "k,pool,lo,hi\n";
        for (std::int64_t k = k_lo; k <= k_hi; ++k) {
            const FrequencySet s = sys(c, a.t, k);
            for (const Band& b : s.bands()) {
                os << k << ',' << to_string(b.pool) << ',' << b.first - 1 << ',' << b.last << '\n';
            }
        }
    });
    return kClean;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Incremental frequency allocation on bipartite graphs: F-system checks, allocator replays and "
                 "adversarial instances"};
    app.require_subcommand(1);
    int code = kClean;

    VerifyArgs verify;
    auto* v = app.add_subcommand("verify", "check F1, F2, competitiveness and optionally the lemma chain");
    add_system_options(v, verify.sys);
    v->add_option("--t-max", verify.t_max, "F1 horizon (and competitiveness unless --comp-t-max)")->capture_default_str();
    v->add_option("--f2-t-max", verify.f2_t_max, "F2 horizon, 0 to skip")->capture_default_str();
    v->add_option("--comp-t-max", verify.comp_t_max, "competitiveness horizon");
    v->add_option("--lemma-t-max", verify.lemma_t_max, "lemma-chain horizon (even t), 0 to skip")->capture_default_str();
    v->add_flag("--unreduced", verify.unreduced, "also run the unreduced F2 check at a tenth of the horizon");
    v->add_option("--jobs", verify.jobs, "worker threads")->check(CLI::PositiveNumber);
    v->add_option("-o,--out", verify.out, "report path (default stdout)");
    v->callback([&] { code = cmd_verify(verify); });

    FalsifyArgs fals;
    auto* f = app.add_subcommand("falsify", "refute a claimed ratio below 10/7");
    add_system_options(f, fals.sys);
    f->add_option("--t-max", fals.t_max, "horizon for F1 and competitiveness")->capture_default_str();
    f->add_option("--f2-t-max", fals.f2_t_max, "F2 horizon")->capture_default_str();
    f->add_option("--jobs", fals.jobs, "worker threads")->check(CLI::PositiveNumber);
    f->add_option("-o,--out", fals.out, "report path (default stdout)");
    f->callback([&] { code = cmd_falsify(fals); });

    RunArgs run;
    auto* r = app.add_subcommand("run", "replay a request stream through the allocator");
    add_system_options(r, run.sys);
    r->add_option("--graph", run.graph, "graph JSON")->required();
    r->add_option("--requests", run.requests, "requests JSON lines")->required();
    r->add_option("--assignment", run.assignment, "assignment output path");
    r->add_option("-o,--report", run.report, "report path (default stdout)");
    r->callback([&] { code = cmd_run(run); });

    auto* adv = app.add_subcommand("adversary", "generate adversarial instances");
    adv->require_subcommand(1);
    UniversalArgs uni;
    auto* u = adv->add_subcommand("universal", "the universal graph truncated at --t-max, with its phase script");
    u->add_option("--t-max", uni.t_max, "horizon T")->capture_default_str();
    u->add_option("--graph", uni.graph, "graph output path");
    u->add_option("--requests", uni.requests, "requests output path");
    u->add_option("--max-edges", uni.max_edges, "refuse graph exports above this many edges")->capture_default_str();
    u->add_option("--system", uni.system, "also replay the phases with this system and report per phase");
    u->add_option("--r", uni.r, "claimed ratio for the report");
    u->add_option("--lambda", uni.lambda, "claimed additive constant for the report");
    u->add_option("--report", uni.report, "run report JSON path");
    u->add_option("--csv", uni.csv, "run report CSV path (t,opt,used,bound)");
    u->callback([&] { code = cmd_adversary_universal(uni); });
    LowerBoundArgs lb;
    auto* l = adv->add_subcommand("lower-bound", "finite lower-bound instance for given theta and lambda");
    l->add_option("--theta", lb.theta, "theta")->capture_default_str();
    l->add_option("--lambda", lb.lambda, "lambda")->capture_default_str();
    l->add_option("--scale-cap", lb.scale_cap, "largest admissible t_theta")->capture_default_str();
    l->add_option("--graph", lb.graph, "graph output path (default stdout)");
    l->add_option("--requests", lb.requests, "requests output path");
    l->callback([&] { code = cmd_adversary_lower_bound(lb); });

    auto* opt = app.add_subcommand("opt", "static optimum of a loaded graph");
    opt->require_subcommand(1);
    OptArgs oa;
    auto* os = opt->add_subcommand("static", "max edge load sum and the matching allocation");
    auto* ob = opt->add_subcommand("brute", "exhaustive optimum for small instances");
    for (auto* sub : {os, ob}) {
        sub->add_option("--graph", oa.graph, "graph JSON")->required();
        sub->add_option("--loads", oa.loads, "JSON object of vertex loads")->required();
        sub->add_option("-o,--out", oa.out, "output path (default stdout)");
    }
    ob->add_option("--budget", oa.budget, "largest total load searched")->capture_default_str();
    os->callback([&] { code = cmd_opt_static(oa); });
    ob->callback([&] { code = cmd_opt_brute(oa); });

    PlotArgs pa;
    auto* p = app.add_subcommand("plot-sets", "band structure of F^c_{t,k} as CSV (k,pool,lo,hi), indices in (lo,hi]");
    add_system_options(p, pa.sys);
    p->add_option("--t", pa.t, "t")->capture_default_str();
    p->add_option("--k", pa.k, "single k (default: all 1..t)");
    p->add_option("--side", pa.side, "A or B")->capture_default_str();
    p->add_option("-o,--out", pa.out, "output path (default stdout)");
    p->callback([&] { code = cmd_plot_sets(pa); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kClean : kInputFault;
    } catch (const ScaleRefusal& e) {
        std::cerr << "refused: " << e.what() << " (required " << e.required << ")\n";
        return kRefusal;
    } catch (const PluginFault& e) {
        std::cerr << "plugin fault: " << e.what() << '\n';
        return kInputFault;
    } catch (const NotBipartite& e) {
        std::cerr << e.what() << '\n';
        return kInputFault;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kInputFault;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kInputFault;
    } catch (const std::runtime_error& e) {
        // InputError, ParseError and friends
        std::cerr << "error: " << e.what() << '\n';
        return kInputFault;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kViolation;
    }
    return code;
}
