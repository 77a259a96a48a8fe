#include "spinbench/heuristics.hpp"

#include <cmath>
#include <stdexcept>

namespace spinbench::heuristics {

namespace {

using State = std::vector<std::int8_t>;

using Model = MetropolisModel;

State random_state(int n, Rng& rng) {
    State s(static_cast<std::size_t>(n));
    for (auto& x : s) x = (rng.next() >> 63) ? 1 : -1;
    return s;
}

/// One Metropolis sweep in index order; energy updated in place.  `on_drop`
/// fires after every accepted move that lowers the energy.
template <typename OnDrop>
void sweep(const Model& model, State& s, std::int64_t& energy, double beta, Rng& rng, OnDrop&& on_drop) {
    const int n = static_cast<int>(s.size());
    const double scaled_beta = beta * model.unit;
    for (int i = 0; i < n; ++i) {
        const std::int64_t delta = -2 * s[static_cast<std::size_t>(i)] * model.field(s, i);
        if (delta > 0 && !(rng.uniform() < std::exp(-scaled_beta * static_cast<double>(delta)))) continue;
        s[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(-s[static_cast<std::size_t>(i)]);
        energy += delta;
        if (delta < 0) on_drop();
    }
}

/// Sites of the negative-overlap cluster containing `seed_site`.
void grow_cluster(const Adjacency& adj, const State& a, const State& b, int seed_site, std::vector<int>& cluster,
                  std::vector<char>& in_cluster) {
    cluster.clear();
    if (a[static_cast<std::size_t>(seed_site)] == b[static_cast<std::size_t>(seed_site)]) return;
    cluster.push_back(seed_site);
    in_cluster[static_cast<std::size_t>(seed_site)] = 1;
    for (std::size_t k = 0; k < cluster.size(); ++k) {
        for (const auto& e : adj.sites[static_cast<std::size_t>(cluster[k])]) {
            const auto j = static_cast<std::size_t>(e.neighbor);
            if (!in_cluster[j] && a[j] != b[j]) {
                in_cluster[j] = 1;
                cluster.push_back(e.neighbor);
            }
        }
    }
}

/// Energy change of flipping `cluster` in `s`, evaluated before the flip.
std::int64_t cluster_delta(const Model& model, const State& s, const std::vector<int>& cluster,
                           const std::vector<char>& in_cluster) {
    std::int64_t delta = 0;
    for (int i : cluster) {
        std::int64_t f = model.h[static_cast<std::size_t>(i)];
        for (const auto& e : model.adj.sites[static_cast<std::size_t>(i)]) {
            if (!in_cluster[static_cast<std::size_t>(e.neighbor)]) f += e.coupling * s[static_cast<std::size_t>(e.neighbor)];
        }
        delta += -2 * s[static_cast<std::size_t>(i)] * f;
    }
    return delta;
}

}  // namespace

MetropolisModel::MetropolisModel(const IsingInstance& inst)
    : adj(inst), h(static_cast<std::size_t>(inst.n), 0), unit(1.0 / static_cast<double>(inst.denominator)) {
    for (const auto& b : inst.biases) h[static_cast<std::size_t>(b.i)] += b.value;
}

std::int64_t MetropolisModel::field(const std::vector<std::int8_t>& s, int i) const {
    std::int64_t f = h[static_cast<std::size_t>(i)];
    for (const auto& e : adj.sites[static_cast<std::size_t>(i)]) f += e.coupling * s[static_cast<std::size_t>(e.neighbor)];
    return f;
}

MetropolisChain::MetropolisChain(const IsingInstance& instance, std::vector<std::int8_t> start)
    : model_(instance), state_(std::move(start)) {
    if (static_cast<int>(state_.size()) != instance.n) throw InputError("start configuration has the wrong length");
    energy_ = energy_scaled(instance, state_);
}

void MetropolisChain::sweep(double beta, Rng& rng) {
    spinbench::heuristics::sweep(model_, state_, energy_, beta, rng, [] {});
}

AnnealSchedule AnnealSchedule::geometric(double beta_min, double beta_max, int count, int sweeps_per_step) {
    AnnealSchedule s;
    for (double b : geometric_betas(beta_min, beta_max, count)) s.steps.emplace_back(b, sweeps_per_step);
    s.validate();
    return s;
}

void AnnealSchedule::validate() const {
    if (steps.empty()) throw InputError("anneal schedule is empty");
    for (std::size_t k = 0; k < steps.size(); ++k) {
        if (!(steps[k].first > 0) || !std::isfinite(steps[k].first)) throw InputError("anneal schedule: beta must be positive");
        if (steps[k].second < 1) throw InputError("anneal schedule: sweeps must be at least 1");
        if (k > 0 && !(steps[k].first > steps[k - 1].first)) throw InputError("anneal schedule: betas must increase strictly");
    }
}

long AnnealSchedule::total_sweeps() const {
    long total = 0;
    for (const auto& [beta, sweeps] : steps) total += sweeps;
    return total;
}

std::vector<double> geometric_betas(double lo, double hi, int count) {
    if (count < 1 || !(lo > 0) || !(hi >= lo)) throw InputError("geometric ladder needs count >= 1 and 0 < lo <= hi");
    std::vector<double> betas(static_cast<std::size_t>(count));
    if (count == 1) {
        betas[0] = lo;
        return betas;
    }
    const double ratio = std::pow(hi / lo, 1.0 / (count - 1));
    for (int k = 0; k < count; ++k) betas[static_cast<std::size_t>(k)] = lo * std::pow(ratio, k);
    betas.back() = hi;
    return betas;
}

SearchResult simulated_annealing(const IsingInstance& instance, const AnnealSchedule& schedule, Rng& rng,
                                 const SpinConfiguration* start) {
    schedule.validate();
    const Model model(instance);
    State s;
    if (start) {
        if (start->size() != instance.n) throw InputError("start configuration has the wrong length");
        s = start->spins();
    } else {
        s = random_state(instance.n, rng);
    }
    std::int64_t e = energy_scaled(instance, s);
    State best = s;
    std::int64_t best_e = e;
    const auto on_drop = [&] {
        if (e < best_e) {
            best_e = e;
            best = s;
        }
    };
    for (const auto& [beta, sweeps] : schedule.steps) {
        for (int k = 0; k < sweeps; ++k) sweep(model, s, e, beta, rng, on_drop);
    }
    return {SpinConfiguration(std::move(best)), best_e, Decimal{best_e, instance.denominator}};
}

void PtIcmParams::validate() const {
    if (betas.empty()) throw InputError("pt_icm: empty temperature ladder");
    for (std::size_t k = 0; k < betas.size(); ++k) {
        if (!(betas[k] > 0) || !std::isfinite(betas[k])) throw InputError("pt_icm: betas must be positive");
        if (k > 0 && !(betas[k] > betas[k - 1])) throw InputError("pt_icm: ladder must increase strictly");
    }
    if (sweeps < 1) throw InputError("pt_icm: sweeps must be at least 1");
    if (icm_period < 1 || swap_period < 1) throw InputError("pt_icm: periods must be at least 1");
}

int cluster_move(const Adjacency& adj, std::vector<std::int8_t>& a, std::vector<std::int8_t>& b, int seed_site) {
    std::vector<int> cluster;
    std::vector<char> in_cluster(a.size(), 0);
    grow_cluster(adj, a, b, seed_site, cluster, in_cluster);
    for (int i : cluster) {
        a[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(-a[static_cast<std::size_t>(i)]);
        b[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(-b[static_cast<std::size_t>(i)]);
    }
    return static_cast<int>(cluster.size());
}

PtIcmResult pt_icm(const IsingInstance& instance, const PtIcmParams& params,
                   const std::function<void(const ClusterMove&)>& observer) {
    params.validate();
    const Model model(instance);
    const int K = static_cast<int>(params.betas.size());
    const int n = instance.n;

    // Replica (k, r) lives at slot 2k + r and keeps its own stream.
    std::vector<Rng> streams;
    std::vector<State> state;
    std::vector<std::int64_t> e;
    for (int slot = 0; slot < 2 * K; ++slot) {
        streams.emplace_back(derive_seed(params.seed, static_cast<std::uint64_t>(slot)));
        state.push_back(random_state(n, streams.back()));
        e.push_back(energy_scaled(instance, state.back()));
    }
    Rng master(derive_seed(params.seed, static_cast<std::uint64_t>(2 * K)));

    PtIcmResult out;
    std::size_t best_slot = 0;
    for (std::size_t s = 1; s < e.size(); ++s) {
        if (e[s] < e[best_slot]) best_slot = s;
    }
    State best = state[best_slot];
    std::int64_t best_e = e[best_slot];

    std::vector<int> cluster;
    std::vector<char> in_cluster(static_cast<std::size_t>(n), 0);
    std::vector<int> negative;

    for (long t = 1; t <= params.sweeps; ++t) {
        for (int slot = 0; slot < 2 * K; ++slot) {
            auto& s = state[static_cast<std::size_t>(slot)];
            auto& energy = e[static_cast<std::size_t>(slot)];
            sweep(model, s, energy, params.betas[static_cast<std::size_t>(slot / 2)], streams[static_cast<std::size_t>(slot)],
                  [&] {
                      if (energy < best_e) {
                          best_e = energy;
                          best = s;
                      }
                  });
        }

        if (t % params.swap_period == 0) {
            for (int r = 0; r < 2; ++r) {
                for (int k = 0; k + 1 < K; ++k) {
                    const auto lo = static_cast<std::size_t>(2 * k + r);
                    const auto hi = static_cast<std::size_t>(2 * (k + 1) + r);
                    const double arg = (params.betas[static_cast<std::size_t>(k + 1)] - params.betas[static_cast<std::size_t>(k)]) *
                                       static_cast<double>(e[hi] - e[lo]) * model.unit;
                    ++out.trace.swaps_attempted;
                    if (arg >= 0 || master.uniform() < std::exp(arg)) {
                        std::swap(state[lo], state[hi]);
                        std::swap(e[lo], e[hi]);
                        ++out.trace.swaps_accepted;
                    }
                }
            }
        }

        if (t % params.icm_period == 0) {
            for (int k = 0; k < K; ++k) {
                auto& a = state[static_cast<std::size_t>(2 * k)];
                auto& b = state[static_cast<std::size_t>(2 * k + 1)];
                auto& ea = e[static_cast<std::size_t>(2 * k)];
                auto& eb = e[static_cast<std::size_t>(2 * k + 1)];
                negative.clear();
                for (int i = 0; i < n; ++i) {
                    if (a[static_cast<std::size_t>(i)] != b[static_cast<std::size_t>(i)]) negative.push_back(i);
                }
                if (negative.empty()) {
                    ++out.trace.empty_overlaps;
                    continue;
                }
                const int site = negative[static_cast<std::size_t>(master.index(static_cast<int>(negative.size())))];
                grow_cluster(model.adj, a, b, site, cluster, in_cluster);
                const std::int64_t da = cluster_delta(model, a, cluster, in_cluster);
                const std::int64_t db = cluster_delta(model, b, cluster, in_cluster);
                ClusterMove move{t, k, static_cast<int>(cluster.size()), ea + eb, 0};
                if (params.verify_isoenergetic) move.before_sum = energy_scaled(instance, a) + energy_scaled(instance, b);
                for (int i : cluster) {
                    a[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(-a[static_cast<std::size_t>(i)]);
                    b[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(-b[static_cast<std::size_t>(i)]);
                    in_cluster[static_cast<std::size_t>(i)] = 0;
                }
                ea += da;
                eb += db;
                move.after_sum = ea + eb;
                if (params.verify_isoenergetic) {
                    const std::int64_t fa = energy_scaled(instance, a);
                    const std::int64_t fb = energy_scaled(instance, b);
                    if (fa != ea || fb != eb) throw std::logic_error("pt_icm: incremental replica energy drifted");
                    move.after_sum = fa + fb;
                    if (move.after_sum != move.before_sum) throw std::logic_error("pt_icm: cluster move changed E1 + E2");
                }
                ++out.trace.cluster_moves;
                if (observer) observer(move);
                for (auto* side : {&a, &b}) {
                    const std::int64_t v = side == &a ? ea : eb;
                    if (v < best_e) {
                        best_e = v;
                        best = *side;
                    }
                }
            }
        }

        out.trace.best_per_sweep.push_back(best_e);
        out.sweeps_done = t;
        if (params.target && best_e <= *params.target) {
            out.trace.first_hit_sweep = t;
            break;
        }
    }
    out.result = {SpinConfiguration(std::move(best)), best_e, Decimal{best_e, instance.denominator}};
    return out;
}

Interval wilson_interval(int successes, int trials, double z) {
    if (trials < 1) throw InputError("wilson interval needs at least one trial");
    if (successes < 0 || successes > trials) throw InputError("successes out of range");
    const double nn = trials;
    const double p = successes / nn;
    const double z2 = z * z;
    const double denom = 1 + z2 / nn;
    const double center = (p + z2 / (2 * nn)) / denom;
    const double half = z / denom * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn));
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

SuccessEstimate estimate_success_probability(const std::function<std::int64_t(int)>& run, std::int64_t target,
                                             int repetitions) {
    if (repetitions < 1) throw InputError("success estimate needs at least one repetition");
    SuccessEstimate est;
    est.repetitions = repetitions;
    for (int r = 0; r < repetitions; ++r) {
        const std::int64_t got = run(r);
        if (got < target) throw std::logic_error("heuristic energy below the exact optimum");
        if (got == target) ++est.successes;
    }
    est.p = static_cast<double>(est.successes) / repetitions;
    est.interval = wilson_interval(est.successes, repetitions);
    return est;
}

}  // namespace spinbench::heuristics
