#pragma once

// Time-to-solution arithmetic, quantiles, scaling fits and scaling runs.
// All times are microseconds.  An infinite TTS (p = 0) is represented by
// +infinity and printed as "inf".

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace spinbench::bench {

inline constexpr double kTarget = 0.99;

/// T / p.  Throws InputError unless T > 0 and 0 <= p <= 1.
double tts1(double T, double p);
/// T log(1 - s) / log(1 - p); T at p = s and at p = 1; +inf at p = 0.
double tts2(double T, double p, double s = kTarget);

struct TtsRecord {
    std::string solver;
    std::string topology;
    int n = 0;
    std::optional<double> alpha;
    std::optional<int> rho;
    std::optional<double> T_us;
    std::optional<double> p;
    std::optional<double> tts1_us;
    std::optional<double> tts2_us;
};

/// Fills T (from tts1 * p when absent), tts1 and tts2.  Throws InputError
/// when p is missing or neither T nor tts1 is present.
TtsRecord convert_tts1_to_tts2(TtsRecord record);

struct Quantiles {
    double q05 = 0;
    double median = 0;
    double q95 = 0;
};

/// Linear interpolation between order statistics at (N - 1) q.
double quantile(std::vector<double> values, double q);
Quantiles tts_distribution(const std::vector<double>& values);

struct ScalingRow {
    int n = 0;
    Quantiles tts;
    int instances = 0;
};

enum class Model { power, exponential };
const char* to_string(Model m);

struct FitResult {
    Model model = Model::power;
    double a = 0;      // log intercept
    double b = 0;      // slope: exponent (power) or rate on n^gamma (exponential)
    double gamma = 0.5;
    double r2 = 0;
    double sse = 0;    // residual sum of squares of log TTS
};

/// Least squares of log TTS on log n (power) or on n^gamma (exponential).
/// Throws InputError with fewer than 3 points or non-finite values.
FitResult fit_scaling(const std::vector<double>& n, const std::vector<double>& tts, Model model, double gamma = 0.5);
FitResult fit_scaling(const std::vector<ScalingRow>& rows, Model model, double gamma = 0.5);

/// The model with the smaller residual sum of squares.
Model preferred_model(const FitResult& power, const FitResult& exponential);

struct ImportResult {
    std::vector<TtsRecord> records;
    std::vector<std::string> diagnostics;  // rejected rows
};

/// CSV with header solver,n,T_us,p or solver,n,tts1_us,p.  Rows with p
/// outside [0, 1] or non-positive times are rejected with a diagnostic;
/// structural problems throw InputError.
ImportResult import_external_timings(const std::string& csv_text);

/// Best TTS2 over run budgets from first-hit sweeps (-1 = never hit within
/// `max_sweeps`).  Budget s costs s * us_per_sweep with success rate equal to
/// the fraction of runs that hit by sweep s.
struct OptimalTts {
    double tts2_us = 0;
    long budget_sweeps = 0;
    double p = 0;
};
OptimalTts optimal_tts2(const std::vector<long>& first_hit_sweeps, long max_sweeps, double us_per_sweep,
                        double s = kTarget);

struct ScalingPlan {
    std::string topology = "logical_square";
    std::vector<int> sizes;  // lattice side c
    double alpha = 1.0;
    int rho = 3;
    int instances = 5;
    std::vector<std::string> solvers{"mwpm"};  // mwpm, pticm, sa
    std::uint64_t seed = 1;
    int timing_reps = 3;      // mwpm
    int reps = 20;            // heuristic runs per instance
    long sweeps = 100000;     // pt_icm cap per run
    int sa_sweeps = 1000;     // total sweeps of the anneal
    int workers = 1;
    bool fits = true;

    void validate() const;
};

/// key = value lines; lists are comma separated; '#' comments.
ScalingPlan parse_plan(const std::string& text);

struct InstanceTts {
    std::string solver;
    int n = 0;
    std::uint64_t instance_seed = 0;
    double T_us = 0;
    double p = 0;
    double tts2_us = 0;
    std::int64_t target = 0;  // scaled planted energy
};

struct ScalingTable {
    std::string solver;
    std::vector<ScalingRow> rows;
    std::vector<InstanceTts> instances;
    std::optional<FitResult> power;
    std::optional<FitResult> exponential;
};

std::vector<ScalingTable> scaling_run(const ScalingPlan& plan);

/// CSV with columns n,q05_us,median_us,q95_us.
std::string scaling_csv(const ScalingTable& table);
/// key = value summary of the fits.
std::string fit_summary(const ScalingTable& table);

/// Per-instance records: solver,n,instance_seed,T_us,p,tts2_us,target.
std::string instances_csv(const ScalingTable& table);

/// Reads scaling_<solver>.csv files back into tables; row instance counts
/// come from instances_<solver>.csv when that file is present.
std::vector<ScalingTable> read_scaling_dir(const std::filesystem::path& dir);

/// Comparison table: one row per (source, n) with median and quantiles,
/// our tables followed by external records aggregated per (solver, n).
std::string comparison_report(const std::vector<ScalingTable>& ours, const std::vector<TtsRecord>& external);

std::string format_us(double v);

}  // namespace spinbench::bench
