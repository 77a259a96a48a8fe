#include "spinbench/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "spinbench/errors.hpp"
#include "spinbench/fcl.hpp"
#include "spinbench/heuristics.hpp"
#include "spinbench/planar.hpp"
#include "spinbench/random.hpp"
#include "spinbench/topology.hpp"

namespace spinbench::bench {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(s);
    while (std::getline(in, field, sep)) out.push_back(trim(field));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw InputError("cannot parse " + what + " '" + s + "'");
    }
    if (used != s.size()) throw InputError("cannot parse " + what + " '" + s + "'");
    return v;
}

long parse_long(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(s, &used);
    } catch (const std::exception&) {
        throw InputError("cannot parse " + what + " '" + s + "'");
    }
    if (used != s.size()) throw InputError("cannot parse " + what + " '" + s + "'");
    return v;
}

double elapsed_us(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - since).count();
}

/// Runs body(i) for i in [0, count) on `workers` threads.
template <typename Body>
void parallel_for(int count, int workers, Body&& body) {
    if (workers <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < std::min(workers, count); ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

InstanceTts measure_mwpm(const IsingInstance& inst, const ScalingPlan& plan) {
    const planar::TimedGroundState timed = planar::solve_timed(inst, plan.timing_reps);
    if (timed.result.energy != fcl::planted_energy(inst)) {
        throw std::logic_error("exact solver missed the planted optimum");
    }
    InstanceTts r;
    r.T_us = timed.median_us;
    r.p = 1;
    r.tts2_us = tts2(r.T_us, 1);
    return r;
}

InstanceTts measure_pticm(const IsingInstance& inst, const ScalingPlan& plan, std::uint64_t seed) {
    const std::int64_t target = fcl::planted_energy(inst).scaled;
    std::vector<long> hits;
    long sweeps = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int rep = 0; rep < plan.reps; ++rep) {
        heuristics::PtIcmParams p;
        p.sweeps = plan.sweeps;
        p.seed = derive_seed(seed, static_cast<std::uint64_t>(rep));
        p.target = target;
        const auto r = heuristics::pt_icm(inst, p);
        hits.push_back(r.trace.first_hit_sweep);
        sweeps += r.sweeps_done;
    }
    const double us_per_sweep = elapsed_us(t0) / static_cast<double>(sweeps);
    const OptimalTts best = optimal_tts2(hits, plan.sweeps, us_per_sweep);
    InstanceTts r;
    r.T_us = static_cast<double>(best.budget_sweeps) * us_per_sweep;
    r.p = best.p;
    r.tts2_us = best.tts2_us;
    return r;
}

InstanceTts measure_sa(const IsingInstance& inst, const ScalingPlan& plan, std::uint64_t seed) {
    const std::int64_t target = fcl::planted_energy(inst).scaled;
    const int steps = std::min(100, plan.sa_sweeps);
    const auto schedule = heuristics::AnnealSchedule::geometric(0.1, 5.0, steps, std::max(1, plan.sa_sweeps / steps));
    int hits = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int rep = 0; rep < plan.reps; ++rep) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(rep)));
        hits += heuristics::simulated_annealing(inst, schedule, rng).best_scaled == target;
    }
    InstanceTts r;
    r.T_us = elapsed_us(t0) / plan.reps;
    r.p = static_cast<double>(hits) / plan.reps;
    r.tts2_us = tts2(r.T_us, r.p);
    return r;
}

}  // namespace

double tts1(double T, double p) {
    if (!(T > 0) || !std::isfinite(T)) throw InputError("tts1: T must be positive and finite");
    if (!(p >= 0 && p <= 1)) throw InputError("tts1: p must lie in [0, 1]");
    if (p == 0) return kInfinity;
    return T / p;
}

double tts2(double T, double p, double s) {
    if (!(T > 0) || !std::isfinite(T)) throw InputError("tts2: T must be positive and finite");
    if (!(p >= 0 && p <= 1)) throw InputError("tts2: p must lie in [0, 1]");
    if (!(s > 0 && s < 1)) throw InputError("tts2: target probability s must lie in (0, 1)");
    if (p == 0) return kInfinity;
    if (p == 1 || p == s) return T;  // at least one attempt; log ratio is 1 at p = s
    return T * std::log1p(-s) / std::log1p(-p);
}

TtsRecord convert_tts1_to_tts2(TtsRecord record) {
    if (!record.p) throw InputError("tts conversion requires the success probability p");
    const double p = *record.p;
    if (!record.T_us) {
        if (!record.tts1_us) throw InputError("tts conversion requires T or tts1");
        if (std::isinf(*record.tts1_us)) throw InputError("cannot recover T from an infinite tts1");
        record.T_us = *record.tts1_us * p;
    }
    record.tts1_us = tts1(*record.T_us, p);
    record.tts2_us = tts2(*record.T_us, p);
    return record;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw InputError("quantile of an empty sample");
    if (!(q >= 0 && q <= 1)) throw InputError("quantile level must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    if (frac == 0 || lo + 1 >= values.size()) return values[lo];
    if (std::isinf(values[lo + 1])) return values[lo + 1];
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

Quantiles tts_distribution(const std::vector<double>& values) {
    return {quantile(values, 0.05), quantile(values, 0.5), quantile(values, 0.95)};
}

const char* to_string(Model m) { return m == Model::power ? "power" : "exponential"; }

FitResult fit_scaling(const std::vector<double>& n, const std::vector<double>& tts, Model model, double gamma) {
    if (n.size() != tts.size()) throw InputError("fit: size mismatch");
    if (n.size() < 3) throw InputError("fit needs at least 3 rows, got " + std::to_string(n.size()));
    if (model == Model::exponential && !(gamma > 0)) throw InputError("fit: gamma must be positive");
    std::vector<double> x, y;
    for (std::size_t k = 0; k < n.size(); ++k) {
        if (!(n[k] > 0) || !(tts[k] > 0) || !std::isfinite(tts[k])) {
            throw InputError("fit needs positive finite n and TTS values");
        }
        x.push_back(model == Model::power ? std::log(n[k]) : std::pow(n[k], gamma));
        y.push_back(std::log(tts[k]));
    }
    const double m = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= m;
    my /= m;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    if (sxx == 0) throw InputError("fit needs at least two distinct n");
    FitResult f;
    f.model = model;
    f.gamma = model == Model::exponential ? gamma : 0;
    f.b = sxy / sxx;
    f.a = my - f.b * mx;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double r = y[k] - (f.a + f.b * x[k]);
        f.sse += r * r;
    }
    f.r2 = syy > 0 ? 1 - f.sse / syy : 1.0;
    return f;
}

FitResult fit_scaling(const std::vector<ScalingRow>& rows, Model model, double gamma) {
    std::vector<double> n, t;
    for (const auto& r : rows) {
        n.push_back(r.n);
        t.push_back(r.tts.median);
    }
    return fit_scaling(n, t, model, gamma);
}

Model preferred_model(const FitResult& power, const FitResult& exponential) {
    return exponential.sse < power.sse ? Model::exponential : Model::power;
}

ImportResult import_external_timings(const std::string& csv_text) {
    ImportResult out;
    std::istringstream in(csv_text);
    std::string line;
    std::vector<std::string> header;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty() || trim(line)[0] == '#') continue;
        const auto fields = split(line, ',');
        if (header.empty()) {
            header = fields;
            const bool ok = header.size() == 4 && header[0] == "solver" && header[1] == "n" &&
                            (header[2] == "T_us" || header[2] == "tts1_us") && header[3] == "p";
            if (!ok) throw InputError("external timings: header must be solver,n,T_us,p or solver,n,tts1_us,p");
            continue;
        }
        const std::string where = "line " + std::to_string(line_no);
        if (fields.size() != 4) throw InputError("external timings " + where + ": expected 4 fields");
        TtsRecord r;
        r.solver = fields[0];
        if (r.solver.empty()) throw InputError("external timings " + where + ": empty solver name");
        const long n = parse_long(fields[1], "n on " + where);
        const double t = parse_double(fields[2], header[2] + " on " + where);
        const double p = parse_double(fields[3], "p on " + where);
        if (n < 1) {
            out.diagnostics.push_back(where + ": n must be positive");
            continue;
        }
        if (!(p >= 0 && p <= 1)) {
            out.diagnostics.push_back(where + ": p = " + fields[3] + " outside [0, 1]");
            continue;
        }
        if (!(t > 0) || (header[2] == "T_us" && !std::isfinite(t))) {
            out.diagnostics.push_back(where + ": " + header[2] + " must be positive");
            continue;
        }
        r.n = static_cast<int>(n);
        r.p = p;
        if (header[2] == "T_us") r.T_us = t;
        else r.tts1_us = t;
        try {
            out.records.push_back(convert_tts1_to_tts2(r));
        } catch (const InputError& e) {
            out.diagnostics.push_back(where + ": " + e.what());
        }
    }
    return out;
}

OptimalTts optimal_tts2(const std::vector<long>& first_hit_sweeps, long max_sweeps, double us_per_sweep, double s) {
    if (first_hit_sweeps.empty()) throw InputError("optimal tts needs at least one run");
    if (!(us_per_sweep > 0)) throw InputError("optimal tts needs a positive time per sweep");
    std::vector<long> hits;
    for (long h : first_hit_sweeps) {
        if (h > max_sweeps) throw InputError("first-hit sweep beyond the run budget");
        if (h >= 1) hits.push_back(h);
    }
    OptimalTts best{kInfinity, max_sweeps, 0};
    if (hits.empty()) return best;
    std::sort(hits.begin(), hits.end());
    const double runs = static_cast<double>(first_hit_sweeps.size());
    for (std::size_t k = 0; k < hits.size(); ++k) {
        if (k + 1 < hits.size() && hits[k + 1] == hits[k]) continue;
        const double p = static_cast<double>(k + 1) / runs;
        const double value = tts2(static_cast<double>(hits[k]) * us_per_sweep, p, s);
        if (value < best.tts2_us) best = {value, hits[k], p};
    }
    return best;
}

void ScalingPlan::validate() const {
    if (topology != "logical_square") throw InputError("scaling plans support topology logical_square only");
    if (sizes.empty()) throw InputError("plan has no sizes");
    for (int c : sizes) {
        if (c < 2) throw InputError("plan sizes must be at least 2");
    }
    if (!std::is_sorted(sizes.begin(), sizes.end()) || std::adjacent_find(sizes.begin(), sizes.end()) != sizes.end()) {
        throw InputError("plan sizes must increase strictly");
    }
    if (solvers.empty()) throw InputError("plan has no solvers");
    for (const auto& s : solvers) {
        if (s != "mwpm" && s != "pticm" && s != "sa") throw InputError("unknown solver '" + s + "'");
    }
    if (instances < 1 || timing_reps < 1 || reps < 1 || sweeps < 1 || sa_sweeps < 1 || workers < 1) {
        throw InputError("plan counts must be positive");
    }
    fcl::FclParams p;
    p.alpha = alpha;
    p.rho = rho;
    p.ruggedness = rho;
    p.validate();
}

ScalingPlan parse_plan(const std::string& text) {
    ScalingPlan plan;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool any = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InputError("plan line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        any = true;
        if (key == "topology") {
            plan.topology = value;
        } else if (key == "sizes") {
            plan.sizes.clear();
            for (const auto& s : split(value, ',')) plan.sizes.push_back(static_cast<int>(parse_long(s, "size")));
        } else if (key == "alpha") {
            plan.alpha = parse_double(value, "alpha");
        } else if (key == "rho") {
            plan.rho = static_cast<int>(parse_long(value, "rho"));
        } else if (key == "instances") {
            plan.instances = static_cast<int>(parse_long(value, "instances"));
        } else if (key == "solvers") {
            plan.solvers = split(value, ',');
        } else if (key == "seed") {
            plan.seed = static_cast<std::uint64_t>(parse_long(value, "seed"));
        } else if (key == "timing_reps") {
            plan.timing_reps = static_cast<int>(parse_long(value, "timing_reps"));
        } else if (key == "reps") {
            plan.reps = static_cast<int>(parse_long(value, "reps"));
        } else if (key == "sweeps") {
            plan.sweeps = parse_long(value, "sweeps");
        } else if (key == "sa_sweeps") {
            plan.sa_sweeps = static_cast<int>(parse_long(value, "sa_sweeps"));
        } else if (key == "workers") {
            plan.workers = static_cast<int>(parse_long(value, "workers"));
        } else if (key == "fits") {
            if (value != "true" && value != "false") throw InputError("plan: fits must be true or false");
            plan.fits = value == "true";
        } else {
            throw InputError("plan line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    if (!any) throw InputError("plan is empty");
    plan.validate();
    return plan;
}

std::vector<ScalingTable> scaling_run(const ScalingPlan& plan) {
    plan.validate();
    std::vector<ScalingTable> tables;
    for (const auto& solver : plan.solvers) {
        ScalingTable t;
        t.solver = solver;
        tables.push_back(t);
    }
    for (int c : plan.sizes) {
        const auto graph = topology::build_logical_square(c);
        std::vector<IsingInstance> instances(static_cast<std::size_t>(plan.instances));
        std::vector<std::uint64_t> seeds(static_cast<std::size_t>(plan.instances));
        parallel_for(plan.instances, plan.workers, [&](int i) {
            fcl::FclParams p;
            p.alpha = plan.alpha;
            p.rho = plan.rho;
            p.ruggedness = plan.rho;
            p.seed = derive_seed(derive_seed(plan.seed, static_cast<std::uint64_t>(c)), static_cast<std::uint64_t>(i));
            seeds[static_cast<std::size_t>(i)] = p.seed;
            instances[static_cast<std::size_t>(i)] = fcl::generate_fcl(graph, p);
        });
        for (auto& table : tables) {
            std::vector<InstanceTts> results(instances.size());
            parallel_for(plan.instances, plan.workers, [&](int i) {
                const auto& inst = instances[static_cast<std::size_t>(i)];
                const std::uint64_t seed = seeds[static_cast<std::size_t>(i)];
                InstanceTts r = table.solver == "mwpm"    ? measure_mwpm(inst, plan)
                                : table.solver == "pticm" ? measure_pticm(inst, plan, seed)
                                                          : measure_sa(inst, plan, seed);
                r.solver = table.solver;
                r.n = graph.nodes;
                r.instance_seed = seed;
                r.target = fcl::planted_energy(inst).scaled;
                results[static_cast<std::size_t>(i)] = r;
            });
            std::vector<double> values;
            for (const auto& r : results) values.push_back(r.tts2_us);
            table.rows.push_back({graph.nodes, tts_distribution(values), plan.instances});
            table.instances.insert(table.instances.end(), results.begin(), results.end());
        }
    }
    if (plan.fits && plan.sizes.size() >= 3) {
        for (auto& table : tables) {
            const bool finite = std::all_of(table.rows.begin(), table.rows.end(),
                                            [](const ScalingRow& r) { return std::isfinite(r.tts.median); });
            if (!finite) continue;
            table.power = fit_scaling(table.rows, Model::power);
            table.exponential = fit_scaling(table.rows, Model::exponential);
        }
    }
    return tables;
}

std::string format_us(double v) {
    if (std::isinf(v)) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string scaling_csv(const ScalingTable& table) {
    std::string out = "n,q05_us,median_us,q95_us\n";
    for (const auto& r : table.rows) {
        out += std::to_string(r.n) + "," + format_us(r.tts.q05) + "," + format_us(r.tts.median) + "," +
               format_us(r.tts.q95) + "\n";
    }
    return out;
}

std::string fit_summary(const ScalingTable& table) {
    std::ostringstream out;
    out.precision(8);
    out << "solver = " << table.solver << "\n";
    for (const auto* f : {&table.power, &table.exponential}) {
        if (!*f) continue;
        const std::string m = to_string((*f)->model);
        out << m << ".a = " << (*f)->a << "\n";
        out << m << ".b = " << (*f)->b << "\n";
        if ((*f)->model == Model::exponential) out << m << ".gamma = " << (*f)->gamma << "\n";
        out << m << ".r2 = " << (*f)->r2 << "\n";
        out << m << ".sse = " << (*f)->sse << "\n";
    }
    if (table.power && table.exponential) {
        out << "preferred = " << to_string(preferred_model(*table.power, *table.exponential)) << "\n";
    }
    return out.str();
}

std::string instances_csv(const ScalingTable& table) {
    std::string out = "solver,n,instance_seed,T_us,p,tts2_us,target\n";
    for (const auto& r : table.instances) {
        char buf[96];
        std::snprintf(buf, sizeof buf, ",%.6g,", r.p);
        out += r.solver + "," + std::to_string(r.n) + "," + std::to_string(r.instance_seed) + "," + format_us(r.T_us) + buf +
               format_us(r.tts2_us) + "," + std::to_string(r.target) + "\n";
    }
    return out;
}

std::vector<ScalingTable> read_scaling_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw InputError("not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("scaling_", 0) == 0 && entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<ScalingTable> tables;
    for (const auto& path : files) {
        std::ifstream in(path);
        ScalingTable t;
        const std::string stem = path.stem().string();
        t.solver = stem.substr(std::string("scaling_").size());
        std::string line;
        if (!std::getline(in, line) || trim(line) != "n,q05_us,median_us,q95_us") {
            throw InputError(path.string() + ": unexpected header");
        }
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            const auto f = split(line, ',');
            if (f.size() != 4) throw InputError(path.string() + ": expected 4 columns");
            const auto num = [&](const std::string& s) { return s == "inf" ? kInfinity : parse_double(s, "time"); };
            t.rows.push_back({static_cast<int>(parse_long(f[0], "n")), {num(f[1]), num(f[2]), num(f[3])}, 0});
        }
        // Instance counts live in the per-instance file, when it was kept.
        std::ifstream per(dir / ("instances_" + t.solver + ".csv"));
        if (per && std::getline(per, line)) {
            std::map<int, int> count;
            while (std::getline(per, line)) {
                const auto f = split(line, ',');
                if (f.size() >= 2) ++count[static_cast<int>(parse_long(f[1], "n"))];
            }
            for (auto& r : t.rows) r.instances = count[r.n];
        }
        tables.push_back(std::move(t));
    }
    return tables;
}

std::string comparison_report(const std::vector<ScalingTable>& ours, const std::vector<TtsRecord>& external) {
    std::string out = "source,solver,n,q05_us,median_us,q95_us,count\n";
    for (const auto& t : ours) {
        for (const auto& r : t.rows) {
            out += "measured," + t.solver + "," + std::to_string(r.n) + "," + format_us(r.tts.q05) + "," +
                   format_us(r.tts.median) + "," + format_us(r.tts.q95) + "," + std::to_string(r.instances) + "\n";
        }
    }
    std::map<std::pair<std::string, int>, std::vector<double>> cells;
    for (const auto& r : external) {
        if (r.tts2_us) cells[{r.solver, r.n}].push_back(*r.tts2_us);
    }
    for (const auto& [key, values] : cells) {
        const Quantiles q = tts_distribution(values);
        out += "external," + key.first + "," + std::to_string(key.second) + "," + format_us(q.q05) + "," +
               format_us(q.median) + "," + format_us(q.q95) + "," + std::to_string(values.size()) + "\n";
    }
    return out;
}

}  // namespace spinbench::bench
