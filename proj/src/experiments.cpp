#include "sbmal/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "sbmal/rng.hpp"
#include "sbmal/sampling.hpp"
#include "sbmal/theory.hpp"

namespace sbmal {

namespace {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(0..count-1) on a pool; results must be written to disjoint
// slots so the output is independent of scheduling.
void parallel_for(int64_t count, int threads, const std::function<void(int64_t)>& fn) {
    threads = std::min<int64_t>(resolve_threads(threads), count);
    if (threads <= 1) {
        for (int64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int64_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const int64_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << contents;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

double stderr_of(const std::vector<double>& values) {
    const size_t n = values.size();
    if (n < 2) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

}  // namespace

std::string format_double(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

std::vector<double> divergence_grid(double d_min, double d_max, double d_step) {
    if (!(d_step > 0.0) || d_max < d_min)
        throw std::invalid_argument("divergence_grid: bad range");
    const int64_t lo = std::llround(d_min * 1e6);
    const int64_t hi = std::llround(d_max * 1e6);
    const int64_t step = std::llround(d_step * 1e6);
    if (step <= 0) throw std::invalid_argument("divergence_grid: step too small");
    std::vector<double> out;
    for (int64_t v = lo; v <= hi; v += step) out.push_back(static_cast<double>(v) / 1e6);
    return out;
}

SampleThreshold compute_sample_threshold(const Graph& graph, const Labeling& tau_prime,
                                         const Labeling& truth) {
    if (tau_prime.size() != graph.num_nodes() || truth.size() != graph.num_nodes())
        throw std::invalid_argument("compute_sample_threshold: length mismatch");
    const int64_t total = graph.num_nodes();

    int64_t mismatches = 0;
    for (int64_t v = 0; v < total; ++v)
        if (tau_prime[v] != truth[v]) ++mismatches;
    const int8_t sign = (2 * mismatches > total) ? int8_t{-1} : int8_t{1};

    SampleThreshold out;
    const auto dstar = differential_degrees(graph, tau_prime);
    int64_t max_err_dstar = 0;
    for (int64_t v = 0; v < total; ++v) {
        if (static_cast<int8_t>(sign * tau_prime[v]) != truth[v]) {
            if (out.init_errors == 0 || dstar[v] > max_err_dstar) max_err_dstar = dstar[v];
            ++out.init_errors;
        }
    }
    if (out.init_errors == 0) return out;
    out.threshold = max_err_dstar;
    for (int64_t v = 0; v < total; ++v)
        if (dstar[v] <= max_err_dstar) ++out.n_s;
    return out;
}

ExperimentRecord measure_trial(const SbmParams& params, const InitConfig& config, uint64_t seed) {
    const auto start = std::chrono::steady_clock::now();
    const auto [graph, truth] = generate_sbm(params, derive_seed(seed, {0}));
    const InitReport init = initial_labeling(graph, config, derive_seed(seed, {1}));

    ExperimentRecord record;
    record.D = params.D;
    record.a = params.a;
    record.b = params.b;
    record.n = params.n;
    record.seed = seed;
    record.n_m = minority_count(graph, truth);
    record.n_m_strict = strict_minority_count(graph, truth);
    const SampleThreshold st = compute_sample_threshold(graph, init.labeling, truth);
    record.n_s = st.n_s;
    record.init_errors = st.init_errors;
    for (int64_t v = 0; v < graph.num_nodes(); ++v)
        (truth[v] > 0 ? record.comm_size_pos : record.comm_size_neg) += 1;
    record.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return record;
}

std::pair<std::vector<int32_t>, std::vector<int32_t>> genie_ml_check(const Graph& graph,
                                                                     const Labeling& truth) {
    std::vector<int32_t> misclassified;
    std::vector<int32_t> strict_minorities;
    for (int64_t v = 0; v < graph.num_nodes(); ++v) {
        int64_t plus_neighbors = 0;
        for (int32_t u : graph.neighbors(v)) plus_neighbors += truth[u];
        const int8_t genie = plus_neighbors >= 0 ? int8_t{1} : int8_t{-1};
        if (genie != truth[v]) misclassified.push_back(static_cast<int32_t>(v));
        if (differential_degree(graph, truth, v) < 0)
            strict_minorities.push_back(static_cast<int32_t>(v));
    }
    return {std::move(misclassified), std::move(strict_minorities)};
}

FitResult fit_exponents(const std::vector<ExperimentRecord>& records, TrialQuantity quantity) {
    FitResult fit;
    fit.quantity = quantity;

    // The fitted points are per-(D, n) trial averages, mirroring how the
    // measured quantities are defined; zero-valued records are excluded
    // from their cell's average and counted.
    std::map<std::pair<double, int64_t>, std::pair<double, int64_t>> cells;  // sum, count
    for (const auto& record : records) {
        const int64_t q = quantity == TrialQuantity::n_m ? record.n_m : record.n_s;
        auto& cell = cells[{record.D, record.n}];
        if (q == 0) {
            ++fit.excluded_zeros;
            continue;
        }
        cell.first += static_cast<double>(q);
        cell.second += 1;
    }
    if (cells.empty()) throw std::invalid_argument("fit_exponents: no records");

    std::map<double, std::vector<std::pair<double, double>>> by_d;
    for (const auto& [key, cell] : cells) {
        by_d[key.first];
        if (cell.second == 0) continue;  // every record in the cell was zero
        by_d[key.first].emplace_back(std::log(static_cast<double>(key.second)),
                                     std::log(cell.first / static_cast<double>(cell.second)));
    }
    for (const auto& [d, points] : by_d) {
        if (points.size() < 2)
            throw std::invalid_argument("fit_exponents: need records at >= 2 graph sizes with a "
                                        "nonzero quantity for D=" +
                                        format_double(d));
    }

    // Normal equations for theta = (c, alpha_1..alpha_J); the slope block
    // is diagonal because each point touches exactly one slope.
    const size_t j_count = by_d.size();
    const size_t dim = j_count + 1;
    std::vector<std::vector<double>> A(dim, std::vector<double>(dim, 0.0));
    std::vector<double> rhs(dim, 0.0);
    size_t j = 0;
    for (const auto& [d, points] : by_d) {
        fit.d_values.push_back(d);
        for (const auto& [x, y] : points) {
            A[0][0] += 1.0;
            A[0][j + 1] += x;
            A[j + 1][0] += x;
            A[j + 1][j + 1] += x * x;
            rhs[0] += y;
            rhs[j + 1] += x * y;
        }
        ++j;
    }

    // Gaussian elimination with partial pivoting (tiny system).
    for (size_t col = 0; col < dim; ++col) {
        size_t pivot = col;
        for (size_t row = col + 1; row < dim; ++row)
            if (std::abs(A[row][col]) > std::abs(A[pivot][col])) pivot = row;
        std::swap(A[col], A[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        if (std::abs(A[col][col]) < 1e-12)
            throw std::invalid_argument("fit_exponents: singular design (insufficient data)");
        for (size_t row = col + 1; row < dim; ++row) {
            const double factor = A[row][col] / A[col][col];
            for (size_t c2 = col; c2 < dim; ++c2) A[row][c2] -= factor * A[col][c2];
            rhs[row] -= factor * rhs[col];
        }
    }
    std::vector<double> theta(dim, 0.0);
    for (size_t row = dim; row-- > 0;) {
        double sum = rhs[row];
        for (size_t c2 = row + 1; c2 < dim; ++c2) sum -= A[row][c2] * theta[c2];
        theta[row] = sum / A[row][row];
    }

    fit.intercept = theta[0];
    j = 0;
    for (const auto& [d, points] : by_d) {
        const double slope = theta[j + 1];
        double rss = 0.0;
        for (const auto& [x, y] : points) {
            const double r = y - fit.intercept - slope * x;
            rss += r * r;
        }
        fit.residual_norms.push_back(std::sqrt(rss));
        const bool clamp = slope > 1.0;  // slope above 1 means sampling everything
        fit.clamped.push_back(clamp);
        fit.exponents.push_back(clamp ? 1.0 : slope);
        ++j;
    }
    return fit;
}

std::vector<SweepPoint> error_vs_fraction_sweep(const SbmParams& params,
                                                const std::vector<double>& fractions, int trials,
                                                uint64_t master_seed, int threads) {
    for (double f : fractions)
        if (!(f >= 0.0) || !(f <= 1.0))
            throw std::invalid_argument("error_vs_fraction_sweep: fractions must lie in [0,1]");
    if (trials < 1) throw std::invalid_argument("error_vs_fraction_sweep: trials must be >= 1");

    const InitConfig init_config;
    std::vector<std::vector<double>> errors(fractions.size(),
                                            std::vector<double>(static_cast<size_t>(trials)));
    parallel_for(trials, threads, [&](int64_t trial) {
        const uint64_t seed = derive_seed(master_seed, {static_cast<uint64_t>(trial)});
        const auto [graph, truth] = generate_sbm(params, derive_seed(seed, {0}));
        const InitReport init = initial_labeling(graph, init_config, derive_seed(seed, {1}));
        for (size_t fi = 0; fi < fractions.size(); ++fi) {
            const int64_t budget =
                std::min<int64_t>(graph.num_nodes(),
                                  std::llround(fractions[fi] * static_cast<double>(graph.num_nodes())));
            Oracle oracle(truth);
            const SampleReport report = run_ranked_sampling(graph, init.labeling, budget, oracle);
            errors[fi][static_cast<size_t>(trial)] = error_rate(report.tau, truth);
        }
    });

    std::vector<SweepPoint> out;
    out.reserve(fractions.size());
    for (size_t fi = 0; fi < fractions.size(); ++fi) {
        SweepPoint point;
        point.fraction = fractions[fi];
        double mean = 0.0;
        for (double e : errors[fi]) mean += e;
        point.mean_error = mean / static_cast<double>(trials);
        point.stderr_error = stderr_of(errors[fi]);
        out.push_back(point);
    }
    return out;
}

std::filesystem::path run_fig1(const Fig1Config& config) {
    std::filesystem::create_directories(config.out_dir);
    std::string csv = "M,x,one_minus_delta\n";
    for (double m : config.m_values) {
        std::vector<double> grid;
        const int64_t lo = std::llround(config.x_min * 1e6);
        const int64_t hi = std::llround(config.x_max * 1e6);
        const int64_t step = std::llround(config.x_step * 1e6);
        for (int64_t x = lo; x <= hi; x += step) grid.push_back(static_cast<double>(x) / 1e6);
        for (const auto& [x, y] : fig1_curve(m, grid)) {
            csv += format_double(m);
            csv += ',';
            csv += format_double(x);
            csv += ',';
            csv += format_double(y);
            csv += '\n';
        }
    }
    const auto path = config.out_dir / "fig1.csv";
    write_file(path, csv);
    return path;
}

Fig2Output run_fig2(const Fig2Config& config) {
    std::filesystem::create_directories(config.out_dir);
    const auto d_grid = divergence_grid(config.d_min, config.d_max, config.d_step);
    if (d_grid.empty() || config.n_list.empty() || config.trials < 1)
        throw std::invalid_argument("run_fig2: empty grid");

    const int64_t cells = static_cast<int64_t>(d_grid.size()) *
                          static_cast<int64_t>(config.n_list.size()) * config.trials;
    Fig2Output output;
    output.records.resize(static_cast<size_t>(cells));
    parallel_for(cells, config.threads, [&](int64_t index) {
        const int64_t trial = index % config.trials;
        const int64_t n_idx = (index / config.trials) % static_cast<int64_t>(config.n_list.size());
        const int64_t d_idx = index / (config.trials * static_cast<int64_t>(config.n_list.size()));
        const double d_value = d_grid[static_cast<size_t>(d_idx)];
        const SbmParams params =
            SbmParams::from_divergence(config.n_list[static_cast<size_t>(n_idx)], d_value, config.b);
        const uint64_t seed =
            derive_seed(config.seed, {static_cast<uint64_t>(d_idx), static_cast<uint64_t>(n_idx),
                                      static_cast<uint64_t>(trial)});
        ExperimentRecord record = measure_trial(params, config.init, seed);
        record.D = d_value;  // canonical grid value, not the re-derived one
        record.trial = trial;
        output.records[static_cast<size_t>(index)] = record;
    });

    std::string csv =
        "D,a,b,n,trial,seed,n_m,n_m_strict,n_s,init_errors,comm_size_pos,comm_size_neg,runtime_s\n";
    for (const auto& r : output.records) {
        csv += format_double(r.D);
        csv += ',';
        csv += format_double(r.a);
        csv += ',';
        csv += format_double(r.b);
        csv += ',';
        csv += std::to_string(r.n);
        csv += ',';
        csv += std::to_string(r.trial);
        csv += ',';
        csv += std::to_string(r.seed);
        csv += ',';
        csv += std::to_string(r.n_m);
        csv += ',';
        csv += std::to_string(r.n_m_strict);
        csv += ',';
        csv += std::to_string(r.n_s);
        csv += ',';
        csv += std::to_string(r.init_errors);
        csv += ',';
        csv += std::to_string(r.comm_size_pos);
        csv += ',';
        csv += std::to_string(r.comm_size_neg);
        csv += ',';
        csv += format_double(r.runtime_s);
        csv += '\n';
    }
    output.records_csv = config.out_dir / "records.csv";
    write_file(output.records_csv, csv);

    output.fit_n_m = fit_exponents(output.records, TrialQuantity::n_m);
    output.fit_n_s = fit_exponents(output.records, TrialQuantity::n_s);

    std::string fit_csv = "quantity,D,exponent,clamped,shared_intercept,residual\n";
    const auto append_fit = [&fit_csv](const FitResult& fit, const char* name) {
        for (size_t i = 0; i < fit.d_values.size(); ++i) {
            fit_csv += name;
            fit_csv += ',';
            fit_csv += format_double(fit.d_values[i]);
            fit_csv += ',';
            fit_csv += format_double(fit.exponents[i]);
            fit_csv += ',';
            fit_csv += fit.clamped[i] ? '1' : '0';
            fit_csv += ',';
            fit_csv += format_double(fit.intercept);
            fit_csv += ',';
            fit_csv += format_double(fit.residual_norms[i]);
            fit_csv += '\n';
        }
    };
    append_fit(output.fit_n_m, "n_m");
    append_fit(output.fit_n_s, "n_s");
    output.fit_csv = config.out_dir / "fit.csv";
    write_file(output.fit_csv, fit_csv);
    return output;
}

Fig3Output run_fig3(const Fig3Config& config) {
    std::filesystem::create_directories(config.out_dir);
    if (config.grid_points < 2) throw std::invalid_argument("run_fig3: need >= 2 grid points");

    Fig3Output output;
    for (size_t n_idx = 0; n_idx < config.n_list.size(); ++n_idx) {
        const SbmParams params =
            SbmParams::from_divergence(config.n_list[n_idx], config.D, config.b);
        const auto delta = delta_exponent(params.M, params.Delta);
        const double bound =
            delta ? std::pow(static_cast<double>(params.n), -*delta) : 1.0;
        const double cap = std::min(1.0, config.cap_multiplier * bound);

        std::vector<double> fractions;
        for (int i = 0; i < config.grid_points; ++i)
            fractions.push_back(static_cast<double>(i) * cap /
                                static_cast<double>(config.grid_points - 1));

        const uint64_t n_seed = derive_seed(config.seed, {static_cast<uint64_t>(n_idx)});
        const auto sweep =
            error_vs_fraction_sweep(params, fractions, config.trials, n_seed, config.threads);
        for (const auto& point : sweep) {
            Fig3Row row;
            row.n = params.n;
            row.fraction = point.fraction;
            row.mean_error = point.mean_error;
            row.stderr_error = point.stderr_error;
            row.theory_bound_fraction = bound;
            output.rows.push_back(row);
        }
    }

    std::string csv = "n,fraction,mean_error,stderr,theory_bound_fraction\n";
    for (const auto& row : output.rows) {
        csv += std::to_string(row.n);
        csv += ',';
        csv += format_double(row.fraction);
        csv += ',';
        csv += format_double(row.mean_error);
        csv += ',';
        csv += format_double(row.stderr_error);
        csv += ',';
        csv += format_double(row.theory_bound_fraction);
        csv += '\n';
    }
    output.csv = config.out_dir / "fig3.csv";
    write_file(output.csv, csv);
    return output;
}

}  // namespace sbmal
