#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "sbmal/init_cluster.hpp"
#include "sbmal/sbm.hpp"

namespace sbmal {

struct ExperimentRecord {
    double D = 0.0;
    double a = 0.0;
    double b = 0.0;
    int64_t n = 0;
    int64_t trial = 0;
    uint64_t seed = 0;
    int64_t n_m = 0;         // nodes with d*_sigma <= 0
    int64_t n_m_strict = 0;  // nodes with d*_sigma < 0
    int64_t n_s = 0;         // nodes with d*_tau' at or below the worst-error level
    int64_t init_errors = 0;
    int64_t comm_size_pos = 0;
    int64_t comm_size_neg = 0;
    double runtime_s = 0.0;
};

struct SampleThreshold {
    int64_t n_s = 0;
    int64_t init_errors = 0;
    int64_t threshold = 0;  // max d*_tau' among erroneous nodes (when any)
};

// Sampling requirement bookkeeping: align tau' to the truth by best global
// sign; if it has errors, count nodes whose d*_tau' does not exceed the
// largest d*_tau' among the erroneous ones.
SampleThreshold compute_sample_threshold(const Graph& graph, const Labeling& tau_prime,
                                         const Labeling& truth);

// One generation + initial clustering measurement.
ExperimentRecord measure_trial(const SbmParams& params, const InitConfig& config, uint64_t seed);

// Genie-aided single-node ML classifier: label v by the sign of its true
// differential degree (tie -> +1). Returns (misclassified, strict
// minorities); the latter is always contained in the former.
std::pair<std::vector<int32_t>, std::vector<int32_t>> genie_ml_check(const Graph& graph,
                                                                     const Labeling& truth);

enum class TrialQuantity { n_m, n_s };

struct FitResult {
    TrialQuantity quantity = TrialQuantity::n_m;
    std::vector<double> d_values;      // ascending
    std::vector<double> exponents;     // per-D slope, clamped at 1
    std::vector<bool> clamped;
    double intercept = 0.0;            // shared natural-log intercept
    std::vector<double> residual_norms;
    int64_t excluded_zeros = 0;
};

// Joint least squares of log q = c + alpha_j * log n with one intercept
// shared across all D; zero-valued records are excluded (counted).
FitResult fit_exponents(const std::vector<ExperimentRecord>& records, TrialQuantity quantity);

struct SweepPoint {
    double fraction = 0.0;
    double mean_error = 0.0;
    double stderr_error = 0.0;
};

// For each fraction f: budget = round(f * 2n), full pipeline per trial
// (generate, initial labeling, ranked sampling), averaged over trials.
std::vector<SweepPoint> error_vs_fraction_sweep(const SbmParams& params,
                                                const std::vector<double>& fractions, int trials,
                                                uint64_t master_seed, int threads);

struct Fig1Config {
    std::vector<double> m_values = {3.0, 5.0, 10.0, 20.0};
    double x_min = 0.40;
    double x_max = 1.00;
    double x_step = 0.01;
    std::filesystem::path out_dir;
};

struct Fig2Config {
    double b = 2.0;
    double d_min = 0.30;
    double d_max = 0.60;
    double d_step = 0.05;
    std::vector<int64_t> n_list = {1000, 1200, 1400, 1600, 1800, 2000};
    int trials = 30;
    uint64_t seed = 0;
    int threads = 0;  // 0: hardware concurrency
    InitConfig init;
    std::filesystem::path out_dir;
};

struct Fig3Config {
    double b = 2.0;
    double D = 0.5;
    std::vector<int64_t> n_list = {1000, 2000, 4000};
    int grid_points = 21;
    double cap_multiplier = 1.2;  // fraction grid tops out at this times n^(-delta)
    int trials = 30;
    uint64_t seed = 0;
    int threads = 0;
    InitConfig init;
    std::filesystem::path out_dir;
};

struct Fig2Output {
    std::vector<ExperimentRecord> records;
    FitResult fit_n_m;
    FitResult fit_n_s;
    std::filesystem::path records_csv;
    std::filesystem::path fit_csv;
};

struct Fig3Row {
    int64_t n = 0;
    double fraction = 0.0;
    double mean_error = 0.0;
    double stderr_error = 0.0;
    double theory_bound_fraction = 0.0;
};

struct Fig3Output {
    std::vector<Fig3Row> rows;
    std::filesystem::path csv;
};

std::filesystem::path run_fig1(const Fig1Config& config);
Fig2Output run_fig2(const Fig2Config& config);
Fig3Output run_fig3(const Fig3Config& config);

// Shortest round-trip decimal form; used for all CSV numbers so output
// is byte-stable across runs and thread counts.
std::string format_double(double value);

// The D grid is built in integer micro-units to keep grid values exact.
std::vector<double> divergence_grid(double d_min, double d_max, double d_step);

}  // namespace sbmal
