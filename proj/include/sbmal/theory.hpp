#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sbmal/sbm.hpp"

namespace sbmal {

// Chernoff-Hellinger divergence (sqrt(a) - sqrt(b))^2. Exact recovery
// from the graph alone is possible iff this is >= 1.
double ch_divergence(double a, double b);

// Sample-complexity exponent saving delta(M, Delta):
//   (4*Delta - 1/3 - sqrt(4M + 1/9))^2
//   -----------------------------------------------
//   2 * (2M + 4*Delta - 1/3 - sqrt(4M + 1/9))
// Defined only when 4*Delta > 1/3 + sqrt(4M + 1/9); nullopt otherwise
// (callers then treat the sample bound as all nodes, 1 - delta == 1).
std::optional<double> delta_exponent(double M, double Delta);

// Critical differential degree: (sqrt(2(a+b) + 1/9) + 1/3 - (a-b)) * ln n.
// May be negative when a - b is large.
double ell_critical(const SbmParams& params);

// ceil(n^(1-delta)) when delta is defined; nullopt means "all" (2n).
std::optional<int64_t> sample_budget(const SbmParams& params);

// Exponent below which recovery fails: 1 - D(a, b).
double necessary_exponent(double a, double b);

// Three-point law of Z = X - Y with X ~ Bernoulli(p), Y ~ Bernoulli(q).
struct ZDistribution {
    double p;
    double q;

    ZDistribution(double p, double q);

    double prob_plus() const { return p * (1.0 - q); }
    double prob_zero() const { return p * q + (1.0 - p) * (1.0 - q); }
    double prob_minus() const { return (1.0 - p) * q; }
    double mean() const { return p - q; }
    double variance() const;
};

// Bernstein upper bound on Pr(sum of n i.i.d. Z <= -ell), clipped to 1:
// exp(-t^2 / (2*(sigma^2 + c*t/3))) with t = ell + (a-b)*ln n,
// sigma^2 = n*Var(Z) and c = 1 + (p - q). Requires t > 0.
double bernstein_tail_bound(const SbmParams& params, double ell);

// Exact Pr(sum of m i.i.d. Z <= -ell) by convolution over [-m, m].
double exact_tail(const SbmParams& params, double ell, int64_t m);
inline double exact_tail(const SbmParams& params, double ell) {
    return exact_tail(params, ell, params.n);
}

// Curve of 1 - delta against x = Delta / sqrt(M - 1/4); clipped to 1
// where delta is undefined. Grid values must lie in (0, 1].
std::vector<std::pair<double, double>> fig1_curve(double M, const std::vector<double>& ratio_grid);

struct ThresholdReport {
    double D;
    double M;
    double Delta;
    std::optional<double> delta;     // nullopt: validity condition fails
    double ell_critical;
    std::optional<int64_t> budget;   // nullopt: sample everything (2n)
    bool valid;
};

ThresholdReport make_threshold_report(const SbmParams& params);
nlohmann::json threshold_report_to_json(const ThresholdReport& report);

}  // namespace sbmal
