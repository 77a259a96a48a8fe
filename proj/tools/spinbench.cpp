// spinbench command-line front end.
//
// Exit codes: 0 success, 1 usage, 2 input error, 3 solver precondition,
// 4 budget exhaustion, 5 internal error.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "artifacts.hpp"
#include "json.hpp"
#include "spinbench/bench.hpp"
#include "spinbench/bruteforce.hpp"
#include "spinbench/errors.hpp"
#include "spinbench/fcl.hpp"
#include "spinbench/heuristics.hpp"
#include "spinbench/matching.hpp"
#include "spinbench/planar.hpp"
#include "spinbench/random.hpp"
#include "spinbench/topology.hpp"

namespace {

using namespace spinbench;
using namespace spinbench::cli;
using nlohmann::json;

enum Exit { kOk = 0, kUsage = 1, kInput = 2, kPrecondition = 3, kBudget = 4, kInternal = 5 };

std::string spins_text(const SpinConfiguration& c) {
    std::string s;
    s.reserve(static_cast<std::size_t>(c.size()));
    for (int i = 0; i < c.size(); ++i) s += c[i] > 0 ? '+' : '-';
    return s;
}

SpinConfiguration parse_spins(const std::string& s) {
    std::vector<std::int8_t> v;
    for (char ch : s) {
        if (ch != '+' && ch != '-') throw InputError("spin string may only hold '+' and '-'");
        v.push_back(ch == '+' ? 1 : -1);
    }
    return SpinConfiguration(std::move(v));
}

/// Runs body(k) for k in [0, count) on `workers` threads; rethrows the first failure.
template <class F>
void parallel_indices(int count, int workers, F body) {
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex guard;
    auto work = [&] {
        for (int k = next++; k < count; k = next++) {
            try {
                body(k);
            } catch (...) {
                std::lock_guard lock(guard);
                if (!failure) failure = std::current_exception();
                next = count;
            }
        }
    };
    const int n = std::max(1, std::min(workers, count));
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

// Sidecar: "<stem>.meta.json" next to the instance file.
fs::path sidecar_path(const fs::path& instance) {
    fs::path p = instance;
    p.replace_extension(".meta.json");
    return p;
}

struct LoadedInstance {
    IsingInstance instance;
    std::string text;
    std::optional<json> sidecar;
    std::string sidecar_text;
};

LoadedInstance load_instance(const fs::path& path, const std::string& explicit_sidecar) {
    LoadedInstance r;
    r.text = read_file(path);
    r.instance = parse_instance(std::string_view(r.text));
    const fs::path meta = explicit_sidecar.empty() ? sidecar_path(path) : fs::path(explicit_sidecar);
    if (!explicit_sidecar.empty() || fs::exists(meta)) {
        r.sidecar_text = read_file(meta);
        try {
            r.sidecar = json::parse(r.sidecar_text);
        } catch (const json::exception& e) {
            throw InputError(meta.string() + ": " + e.what());
        }
        if (r.sidecar->contains("topology")) r.instance.topology = TopologyTag::parse(r.sidecar->at("topology").get<std::string>());
        if (r.sidecar->contains("planted")) {
            r.instance.planted = parse_spins(r.sidecar->at("planted").get<std::string>());
            if (r.instance.planted->size() != r.instance.n) throw InputError(meta.string() + ": planted length differs from n");
        }
    }
    return r;
}

std::optional<Decimal> sidecar_energy(const LoadedInstance& li) {
    if (!li.sidecar || !li.sidecar->contains("planted_energy")) return std::nullopt;
    return Decimal::parse(li.sidecar->at("planted_energy").get<std::string>());
}

void record_input(Manifest& m, const fs::path& path, const LoadedInstance& li, const std::string& explicit_sidecar) {
    m.add_input(path, li.text);
    if (li.sidecar) m.add_input(explicit_sidecar.empty() ? sidecar_path(path) : fs::path(explicit_sidecar), li.sidecar_text);
}

std::string solution_text(const std::string& solver, const IsingInstance& inst, const SpinConfiguration& config,
                          const Decimal& e) {
    std::string out = "solver " + solver + "\n";
    out += "n " + std::to_string(inst.n) + "\n";
    out += "energy " + e.to_string() + "\n";
    out += "spins " + spins_text(config) + "\n";
    return out;
}

// key = value text; '#' comments.
std::map<std::string, std::string> parse_key_values(const std::string& text, const std::string& where) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError(where + ":" + std::to_string(lineno) + ": expected key = value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

double as_double(const std::map<std::string, std::string>& kv, const std::string& key, double fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
        std::size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw InputError("parameter " + key + ": not a number: '" + it->second + "'");
    }
}

long as_long(const std::map<std::string, std::string>& kv, const std::string& key, long fallback) {
    const double v = as_double(kv, key, static_cast<double>(fallback));
    if (v != static_cast<double>(static_cast<long>(v))) throw InputError("parameter " + key + " must be an integer");
    return static_cast<long>(v);
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
    std::string topology;
    int size = 0;
    double alpha = 0;
    int rho = 0;
    int ruggedness = 0;
    int count = 1;
    std::uint64_t seed = 0;
    long max_loop_rejections = 10000;
    int max_instance_rejections = 1000;
    std::string out;
};

int cmd_generate(const GenerateArgs& a) {
    const topology::TopologyGraph graph =
        a.topology == "anticluster" ? topology::build_anticluster(a.size).graph : topology::build_logical_square(a.size);
    fcl::FclParams base;
    base.alpha = a.alpha;
    base.rho = a.rho;
    base.ruggedness = a.ruggedness ? a.ruggedness : a.rho;
    base.max_loop_rejections = a.max_loop_rejections;
    base.max_instance_rejections = a.max_instance_rejections;
    base.validate();

    const fs::path dir(a.out);
    fs::create_directories(dir);
    Manifest m("generate");
    m.parameters() = {{"topology", a.topology}, {"size", a.size}, {"alpha", a.alpha}, {"rho", a.rho},
                      {"ruggedness", base.ruggedness}, {"count", a.count}, {"seed", a.seed},
                      {"max_loop_rejections", a.max_loop_rejections},
                      {"max_instance_rejections", a.max_instance_rejections},
                      {"instance_seed", "derive_seed(seed, index)"}};

    std::vector<std::string> texts(static_cast<std::size_t>(a.count)), metas(static_cast<std::size_t>(a.count));
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(a.count));
    parallel_indices(a.count, worker_count(), [&](int k) {
        fcl::FclParams p = base;
        p.seed = derive_seed(a.seed, static_cast<std::uint64_t>(k));
        const IsingInstance inst = fcl::generate_fcl(graph, p);
        json meta;
        meta["generator"] = inst.metadata.generator;
        meta["rng"] = inst.metadata.rng;
        meta["topology"] = inst.topology.to_string();
        meta["n"] = inst.n;
        meta["couplings"] = inst.couplings.size();
        meta["index"] = k;
        meta["base_seed"] = a.seed;
        meta["params"] = inst.metadata.params;
        meta["planted"] = spins_text(*inst.planted);
        meta["planted_energy"] = fcl::planted_energy(inst).to_string();
        const auto i = static_cast<std::size_t>(k);
        texts[i] = serialize_instance(inst);
        metas[i] = meta.dump(2) + "\n";
        seeds[i] = p.seed;
    });
    for (int k = 0; k < a.count; ++k) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "instance_%03d", k);
        const auto i = static_cast<std::size_t>(k);
        m.write_output(dir / (std::string(stem) + ".txt"), texts[i]);
        m.write_output(dir / (std::string(stem) + ".meta.json"), metas[i]);
        m.add_seed(seeds[i]);
    }
    m.finish(manifest_for_dir(dir));
    std::cout << "wrote " << a.count << " instance(s) to " << dir.string() << "\n";
    return kOk;
}

// ------------------------------------------------------------- solve-exact

struct SolveArgs {
    std::string in;
    std::string out;
    std::string sidecar;
    int timing_reps = 0;
    int nearest = 10;
};

int cmd_solve_exact(const SolveArgs& a) {
    const LoadedInstance li = load_instance(a.in, a.sidecar);
    planar::GroundStateOptions opt;
    opt.nearest = a.nearest;
    const int reps = std::max(1, a.timing_reps);
    const planar::TimedGroundState t = planar::solve_timed(li.instance, reps, opt);
    const planar::GroundState& gs = t.result;

    Manifest m("solve-exact");
    m.parameters() = {{"in", a.in}, {"timing_reps", a.timing_reps}, {"nearest", a.nearest}};
    record_input(m, a.in, li, a.sidecar);
    std::string text = solution_text("mwpm", li.instance, gs.config, gs.energy);
    text += "frustrated_faces " + std::to_string(gs.frustrated_faces) + "\n";
    text += "matching_weight " + li.instance.value(gs.matching_weight).to_string() + "\n";
    m.write_output(a.out, text);
    m.timing()["solve_median_us"] = t.median_us;
    m.timing()["solve_times_us"] = t.times_us;

    int status = kOk;
    std::cout << "energy " << gs.energy.to_string() << "\n";
    if (const auto planted = sidecar_energy(li)) {
        const bool match = *planted == gs.energy;
        m.parameters()["planted_energy"] = planted->to_string();
        std::cout << "planted energy " << planted->to_string() << (match ? " (match)" : " (MISMATCH)") << "\n";
        if (!match) {
            std::cerr << "error: exact energy differs from the planted energy\n";
            status = kInternal;
        }
    }
    std::cout << "median solve time " << t.median_us << " us over " << reps << " run(s)\n";
    m.finish(manifest_for_file(a.out));
    return status;
}

// -------------------------------------------------------------- bruteforce

int cmd_bruteforce(const SolveArgs& a) {
    const LoadedInstance li = load_instance(a.in, a.sidecar);
    const auto start = std::chrono::steady_clock::now();
    const ExhaustiveResult r = exhaustive_ground_state(li.instance);
    const double us = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count();
    Manifest m("bruteforce");
    m.parameters() = {{"in", a.in}};
    record_input(m, a.in, li, a.sidecar);
    std::string text = solution_text("bruteforce", li.instance, r.config, r.energy);
    text += "states " + std::to_string(r.states) + "\n";
    m.write_output(a.out, text);
    m.timing()["solve_us"] = us;
    m.finish(manifest_for_file(a.out));
    std::cout << "energy " << r.energy.to_string() << "\n";
    return kOk;
}

// --------------------------------------------------------- solve-heuristic

struct HeuristicArgs {
    std::string algo;
    std::string in;
    std::string out;
    std::string sidecar;
    std::string params;
    std::string target;
    int reps = 1;
    std::uint64_t seed = 0;
};

int cmd_solve_heuristic(const HeuristicArgs& a) {
    const LoadedInstance li = load_instance(a.in, a.sidecar);
    const IsingInstance& inst = li.instance;
    std::string params_text;
    std::map<std::string, std::string> kv;
    if (!a.params.empty()) {
        params_text = read_file(a.params);
        kv = parse_key_values(params_text, a.params);
    }
    const std::vector<std::string> known = a.algo == "sa"
        ? std::vector<std::string>{"beta_min", "beta_max", "steps", "sweeps_per_step"}
        : std::vector<std::string>{"beta_min", "beta_max", "temperatures", "sweeps", "icm_period", "swap_period"};
    for (const auto& [k, v] : kv) {
        if (std::find(known.begin(), known.end(), k) == known.end()) throw InputError("unknown " + a.algo + " parameter: " + k);
    }
    const double beta_min = as_double(kv, "beta_min", 0.1);
    const double beta_max = as_double(kv, "beta_max", 5.0);

    // Target: explicit flag, else the sidecar's planted energy, else the best any rep found.
    std::optional<std::int64_t> target;
    std::string target_source = "best_found";
    const auto scaled_of = [&](const Decimal& d) {
        if (d.denominator > inst.denominator) throw InputError("target has more decimals than the instance");
        return rescale(d.scaled, d.denominator, inst.denominator);
    };
    if (!a.target.empty()) {
        target = scaled_of(Decimal::parse(a.target));
        target_source = "given";
    } else if (const auto planted = sidecar_energy(li)) {
        target = scaled_of(*planted);
        target_source = "planted";
    }

    heuristics::AnnealSchedule schedule;
    heuristics::PtIcmParams pt;
    json resolved;
    if (a.algo == "sa") {
        const long steps = as_long(kv, "steps", 100);
        const long per = as_long(kv, "sweeps_per_step", 10);
        if (steps < 1 || per < 1) throw InputError("steps and sweeps_per_step must be positive");
        schedule = heuristics::AnnealSchedule::geometric(beta_min, beta_max, static_cast<int>(steps), static_cast<int>(per));
        schedule.validate();
        resolved = {{"beta_min", beta_min}, {"beta_max", beta_max}, {"steps", steps}, {"sweeps_per_step", per}};
    } else {
        const long temps = as_long(kv, "temperatures", 30);
        if (temps < 2) throw InputError("temperatures must be at least 2");
        pt.betas = heuristics::geometric_betas(beta_min, beta_max, static_cast<int>(temps));
        pt.sweeps = as_long(kv, "sweeps", 1000);
        pt.icm_period = static_cast<int>(as_long(kv, "icm_period", 10));
        pt.swap_period = static_cast<int>(as_long(kv, "swap_period", 1));
        pt.target = target;
        pt.validate();
        resolved = {{"beta_min", beta_min}, {"beta_max", beta_max}, {"temperatures", temps}, {"sweeps", pt.sweeps},
                    {"icm_period", pt.icm_period}, {"swap_period", pt.swap_period}};
    }
    if (a.reps < 1) throw InputError("--reps must be at least 1");

    struct RepResult {
        heuristics::SearchResult best;
        double us = 0;
        long sweeps = 0;
    };
    std::vector<RepResult> runs(static_cast<std::size_t>(a.reps));
    parallel_indices(a.reps, worker_count(), [&](int r) {
        const std::uint64_t s = derive_seed(a.seed, static_cast<std::uint64_t>(r));
        const auto start = std::chrono::steady_clock::now();
        RepResult rr;
        if (a.algo == "sa") {
            Rng rng(s);
            rr.best = heuristics::simulated_annealing(inst, schedule, rng);
            rr.sweeps = schedule.total_sweeps();
        } else {
            heuristics::PtIcmParams p = pt;
            p.seed = s;
            const heuristics::PtIcmResult res = heuristics::pt_icm(inst, p);
            rr.best = res.result;
            rr.sweeps = res.sweeps_done;
        }
        rr.us = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count();
        runs[static_cast<std::size_t>(r)] = std::move(rr);
    });

    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        if (runs[r].best.best_scaled < runs[best].best.best_scaled) best = r;
    }
    const std::int64_t goal = target.value_or(runs[best].best.best_scaled);
    const heuristics::SuccessEstimate est = heuristics::estimate_success_probability(
        [&](int r) { return runs[static_cast<std::size_t>(r)].best.best_scaled; }, goal, a.reps);

    std::string text = solution_text(a.algo, inst, runs[best].best.best, runs[best].best.energy);
    text += "best_rep " + std::to_string(best) + "\n";
    text += "reps " + std::to_string(a.reps) + "\n";
    text += "target " + inst.value(goal).to_string() + " " + target_source + "\n";
    text += "successes " + std::to_string(est.successes) + "\n";
    char buf[128];
    std::snprintf(buf, sizeof buf, "p %.6g\np_ci95 %.6g %.6g\n", est.p, est.interval.lo, est.interval.hi);
    text += buf;

    Manifest m("solve-heuristic");
    m.parameters() = {{"algo", a.algo}, {"in", a.in}, {"reps", a.reps}, {"seed", a.seed}, {"resolved", resolved},
                      {"rep_seed", "derive_seed(seed, rep)"}};
    if (target) m.parameters()["target"] = inst.value(*target).to_string();
    record_input(m, a.in, li, a.sidecar);
    if (!a.params.empty()) m.add_input(a.params, params_text);
    for (int r = 0; r < a.reps; ++r) m.add_seed(derive_seed(a.seed, static_cast<std::uint64_t>(r)));
    m.write_output(a.out, text);

    std::vector<double> times;
    for (const auto& r : runs) times.push_back(r.us);
    const double T = bench::quantile(times, 0.5);
    m.timing()["run_us"] = times;
    m.timing()["median_run_us"] = T;
    m.timing()["tts2_us"] = bench::tts2(T, est.p);
    m.finish(manifest_for_file(a.out));

    std::cout << "best energy " << runs[best].best.energy.to_string() << "\n"
              << "success " << est.successes << "/" << a.reps << " against " << target_source << " target "
              << inst.value(goal).to_string() << "\n"
              << "median run " << T << " us, tts2 " << bench::format_us(bench::tts2(T, est.p)) << " us\n";
    return kOk;
}

// -------------------------------------------------------------------- mwpm

int cmd_mwpm(const std::string& graph_path, const std::string& out) {
    const std::string text = read_file(graph_path);
    const matching::WeightedGraph g = matching::parse_weighted_graph(text);
    const matching::Matching mm = matching::min_weight_perfect_matching(g);
    if (!matching::verify_matching(g, mm)) throw std::logic_error("matching failed verification");
    std::string result = "weight " + std::to_string(mm.total_weight) + "\n";
    for (const auto& [u, v] : mm.pairs) result += std::to_string(u) + " " + std::to_string(v) + "\n";
    if (out.empty()) {
        std::cout << result;
        return kOk;
    }
    Manifest m("mwpm");
    m.parameters() = {{"graph", graph_path}};
    m.add_input(graph_path, text);
    m.write_output(out, result);
    m.finish(manifest_for_file(out));
    return kOk;
}

// ------------------------------------------------------- benchmark, report

int cmd_benchmark(const std::string& plan_path, const std::string& out) {
    const std::string text = read_file(plan_path);
    bench::ScalingPlan plan = bench::parse_plan(text);
    if (std::getenv("SPINBENCH_WORKERS")) plan.workers = worker_count();
    const fs::path dir(out);
    fs::create_directories(dir);
    Manifest m("benchmark");
    m.add_input(plan_path, text);
    m.parameters() = {{"plan", plan_path}, {"workers", plan.workers},
                      {"instance_seed", "derive_seed(derive_seed(seed, c), index)"}};
    m.add_seed(plan.seed);

    const auto tables = bench::scaling_run(plan);
    for (const auto& t : tables) {
        m.write_output(dir / ("scaling_" + t.solver + ".csv"), bench::scaling_csv(t));
        m.write_output(dir / ("fits_" + t.solver + ".txt"), bench::fit_summary(t));
        m.write_output(dir / ("instances_" + t.solver + ".csv"), bench::instances_csv(t));
        std::cout << t.solver << ":\n" << bench::scaling_csv(t) << bench::fit_summary(t);
    }
    m.finish(manifest_for_dir(dir));
    return kOk;
}

int cmd_report(const std::string& in, const std::string& external, const std::string& out) {
    const auto ours = bench::read_scaling_dir(in);
    std::vector<bench::TtsRecord> ext;
    std::string ext_text;
    if (!external.empty()) {
        ext_text = read_file(external);
        const bench::ImportResult imported = bench::import_external_timings(ext_text);
        for (const auto& d : imported.diagnostics) std::cerr << "warning: " << external << ": " << d << "\n";
        ext = imported.records;
    }
    const std::string report = bench::comparison_report(ours, ext);
    const std::string note =
        "# external rows are supplied by the user and are not produced or verified by this tool\n";
    const fs::path target = out.empty() ? fs::path(in) / "report.csv" : fs::path(out);
    Manifest m("report");
    m.parameters() = {{"in", in}, {"external", external}};
    for (const auto& t : ours) {
        const fs::path p = fs::path(in) / ("scaling_" + t.solver + ".csv");
        m.add_input(p, read_file(p));
    }
    if (!external.empty()) m.add_input(external, ext_text);
    m.write_output(target, report);
    m.finish(manifest_for_file(target));
    std::cout << (ext.empty() ? "" : note) << report;
    return kOk;
}

int cmd_topology(const std::string& kind, int size, const std::string& out) {
    topology::TopologyGraph g;
    if (kind == "chimera") g = topology::build_chimera(size);
    else if (kind == "logical-square") g = topology::build_logical_square(size);
    else g = topology::build_anticluster(size).graph;
    const std::string text = topology::serialize_topology(g);
    if (out.empty()) {
        std::cout << text;
        return kOk;
    }
    Manifest m("topology");
    m.parameters() = {{"kind", kind}, {"size", size}};
    m.write_output(out, text);
    m.finish(manifest_for_file(out));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Planar Ising ground states, FCL benchmark generation and TTS scaling"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Generate planted frustrated-loop instances");
    g->add_option("--topology", gen.topology, "logical-square or anticluster")
        ->required()
        ->check(CLI::IsMember({"logical-square", "anticluster"}));
    g->add_option("--size", gen.size, "cells per side")->required()->check(CLI::Range(1, 4096));
    g->add_option("--alpha", gen.alpha, "loops per variable")->required();
    g->add_option("--rho", gen.rho, "maximum |J|")->required();
    g->add_option("--ruggedness", gen.ruggedness, "R, defaults to rho");
    g->add_option("--count", gen.count, "instances")->check(CLI::Range(1, 1000000));
    g->add_option("--seed", gen.seed);
    g->add_option("--max-loop-rejections", gen.max_loop_rejections);
    g->add_option("--max-instance-rejections", gen.max_instance_rejections);
    g->add_option("--out", gen.out, "output directory")->required();

    SolveArgs exact;
    auto* se = app.add_subcommand("solve-exact", "Exact ground state of a planar bias-free instance");
    se->add_option("--in", exact.in)->required();
    se->add_option("--out", exact.out)->required();
    se->add_option("--sidecar", exact.sidecar, "metadata JSON, default <stem>.meta.json when present");
    se->add_option("--timing-reps", exact.timing_reps, "repeat the solve and report the median time")->check(CLI::Range(0, 100000));
    se->add_option("--nearest", exact.nearest, "initial matching neighbours per frustrated face, 0 = complete")->check(CLI::Range(0, 1 << 20));

    SolveArgs brute;
    auto* bf = app.add_subcommand("bruteforce", "Exhaustive minimum, n <= 24");
    bf->add_option("--in", brute.in)->required();
    bf->add_option("--out", brute.out)->required();
    bf->add_option("--sidecar", brute.sidecar);

    HeuristicArgs heur;
    auto* sh = app.add_subcommand("solve-heuristic", "Simulated annealing or PT with Houdayer cluster moves");
    sh->add_option("--algo", heur.algo)->required()->check(CLI::IsMember({"sa", "pticm"}));
    sh->add_option("--in", heur.in)->required();
    sh->add_option("--out", heur.out)->required();
    sh->add_option("--params", heur.params, "key = value parameter file");
    sh->add_option("--reps", heur.reps)->check(CLI::Range(1, 10000000));
    sh->add_option("--seed", heur.seed);
    sh->add_option("--target", heur.target, "success threshold energy, default the planted energy");
    sh->add_option("--sidecar", heur.sidecar);

    std::string graph_path, graph_out;
    auto* mw = app.add_subcommand("mwpm", "Minimum-weight perfect matching of an edge list (debugging)");
    mw->group("");
    mw->add_option("--graph", graph_path)->required();
    mw->add_option("--out", graph_out);

    std::string plan_path, bench_out;
    auto* bm = app.add_subcommand("benchmark", "Run a scaling plan");
    bm->add_option("--plan", plan_path)->required();
    bm->add_option("--out", bench_out)->required();

    std::string report_in, report_ext, report_out;
    auto* rp = app.add_subcommand("report", "Comparison table from scaling CSVs and optional external timings");
    rp->add_option("--in", report_in)->required();
    rp->add_option("--external", report_ext, "CSV: solver,n,T_us,p or solver,n,tts1_us,p");
    rp->add_option("--out", report_out, "default <in>/report.csv");

    std::string topo_kind;
    int topo_size = 0;
    std::string topo_out;
    auto* tp = app.add_subcommand("topology", "Export a hardware or logical graph as an edge list");
    tp->add_option("--kind", topo_kind)->required()->check(CLI::IsMember({"chimera", "logical-square", "anticluster"}));
    tp->add_option("--size", topo_size)->required()->check(CLI::Range(1, 4096));
    tp->add_option("--out", topo_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*g) return cmd_generate(gen);
        if (*se) return cmd_solve_exact(exact);
        if (*bf) return cmd_bruteforce(brute);
        if (*sh) return cmd_solve_heuristic(heur);
        if (*mw) return cmd_mwpm(graph_path, graph_out);
        if (*bm) return cmd_benchmark(plan_path, bench_out);
        if (*rp) return cmd_report(report_in, report_ext, report_out);
        if (*tp) return cmd_topology(topo_kind, topo_size, topo_out);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInput;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition violated: " << e.what() << "\n";
        return kPrecondition;
    } catch (const BudgetExhausted& e) {
        std::cerr << "budget exhausted: " << e.what() << "\n";
        return kBudget;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kUsage;
}
