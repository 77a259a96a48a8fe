#pragma once

// Stochastic baselines: simulated annealing and parallel tempering with
// isoenergetic cluster moves (two replicas per temperature, Houdayer-style
// clusters on the negative-overlap sites).

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "spinbench/ising.hpp"
#include "spinbench/random.hpp"

namespace spinbench::heuristics {

struct AnnealSchedule {
    std::vector<std::pair<double, int>> steps;  // (beta, sweeps), betas strictly increasing

    static AnnealSchedule geometric(double beta_min, double beta_max, int count, int sweeps_per_step);
    /// Throws InputError on empty, non-increasing or non-positive entries.
    void validate() const;
    long total_sweeps() const;
};

/// Local fields and energy scale shared by the Metropolis samplers.
struct MetropolisModel {
    Adjacency adj;
    std::vector<std::int64_t> h;
    double unit;  // real energy per scaled unit

    explicit MetropolisModel(const IsingInstance& instance);
    std::int64_t field(const std::vector<std::int8_t>& s, int i) const;
};

/// A single Metropolis chain; one sweep visits sites 0..n-1 in order.
class MetropolisChain {
public:
    MetropolisChain(const IsingInstance& instance, std::vector<std::int8_t> start);

    void sweep(double beta, Rng& rng);
    const std::vector<std::int8_t>& state() const { return state_; }
    std::int64_t energy() const { return energy_; }

private:
    MetropolisModel model_;
    std::vector<std::int8_t> state_;
    std::int64_t energy_;
};

struct SearchResult {
    SpinConfiguration best;
    std::int64_t best_scaled = 0;  // in units of 1/denominator
    Decimal energy;
};

/// Single-spin Metropolis sweeps in index order.  When `start` is given the
/// chain begins there instead of a random state.  The best configuration
/// seen is returned; ties keep the earlier one.
SearchResult simulated_annealing(const IsingInstance& instance, const AnnealSchedule& schedule, Rng& rng,
                                 const SpinConfiguration* start = nullptr);

/// Geometric ladder of `count` inverse temperatures between lo and hi.
std::vector<double> geometric_betas(double lo, double hi, int count);

struct PtIcmParams {
    std::vector<double> betas = geometric_betas(0.1, 5.0, 30);
    long sweeps = 1000;
    int icm_period = 10;
    int swap_period = 1;
    std::uint64_t seed = 0;
    /// Stop as soon as the best energy reaches this value (scaled units).
    std::optional<std::int64_t> target;
    /// Recompute both replica energies around every cluster move and throw
    /// if their sum changes.
    bool verify_isoenergetic = false;

    void validate() const;
};

struct ClusterMove {
    long sweep = 0;
    int temperature = 0;
    int cluster_size = 0;
    std::int64_t before_sum = 0;  // E1 + E2, scaled
    std::int64_t after_sum = 0;
};

struct PtIcmTrace {
    std::vector<std::int64_t> best_per_sweep;  // scaled
    long cluster_moves = 0;
    long empty_overlaps = 0;  // attempts skipped because the replicas agreed
    long swaps_accepted = 0;
    long swaps_attempted = 0;
    long first_hit_sweep = -1;  // first sweep whose best reached the target
};

struct PtIcmResult {
    SearchResult result;
    PtIcmTrace trace;
    long sweeps_done = 0;
};

PtIcmResult pt_icm(const IsingInstance& instance, const PtIcmParams& params,
                   const std::function<void(const ClusterMove&)>& observer = {});

/// One isoenergetic cluster move between two replicas: flips the connected
/// negative-overlap cluster containing `seed_site` in both.  Returns the
/// cluster size (0 when the overlap at seed_site is positive).
int cluster_move(const Adjacency& adj, std::vector<std::int8_t>& a, std::vector<std::int8_t>& b, int seed_site);

struct Interval {
    double lo = 0;
    double hi = 0;
};

/// Wilson score interval; z = 1.96 gives 95% coverage.
Interval wilson_interval(int successes, int trials, double z = 1.959963984540054);

struct SuccessEstimate {
    int successes = 0;
    int repetitions = 0;
    double p = 0;
    Interval interval;
};

/// Runs `run(rep)` r times; a run succeeds when the returned best energy
/// equals `target`.  Throws InputError when r < 1.
SuccessEstimate estimate_success_probability(const std::function<std::int64_t(int)>& run, std::int64_t target,
                                             int repetitions);

}  // namespace spinbench::heuristics
