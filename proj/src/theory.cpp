#include "sbmal/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbmal {

double ch_divergence(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("ch_divergence: inputs must be positive");
    const double d = std::sqrt(a) - std::sqrt(b);
    return d * d;
}

std::optional<double> delta_exponent(double M, double Delta) {
    if (!(M > Delta) || !(Delta > 0.0))
        throw std::invalid_argument("delta_exponent: need M > Delta > 0");
    const double root = std::sqrt(4.0 * M + 1.0 / 9.0);
    const double margin = 4.0 * Delta - 1.0 / 3.0 - root;
    if (!(margin > 0.0)) return std::nullopt;  // strict inequality required
    return margin * margin / (2.0 * (2.0 * M + margin));
}

double ell_critical(const SbmParams& params) {
    const double logn = std::log(static_cast<double>(params.n));
    return (std::sqrt(2.0 * (params.a + params.b) + 1.0 / 9.0) + 1.0 / 3.0 -
            (params.a - params.b)) *
           logn;
}

std::optional<int64_t> sample_budget(const SbmParams& params) {
    const auto delta = delta_exponent(params.M, params.Delta);
    if (!delta) return std::nullopt;
    const double value = std::pow(static_cast<double>(params.n), 1.0 - *delta);
    // exponent <= 0 still yields a positive value, so ceil is at least 1
    return static_cast<int64_t>(std::ceil(value));
}

double necessary_exponent(double a, double b) { return 1.0 - ch_divergence(a, b); }

ZDistribution::ZDistribution(double p_, double q_) : p(p_), q(q_) {
    if (!(p > 0.0) || !(p < 1.0) || !(q > 0.0) || !(q < 1.0))
        throw std::invalid_argument("ZDistribution: p, q must lie in (0,1)");
}

double ZDistribution::variance() const {
    const double m = mean();
    return prob_plus() + prob_minus() - m * m;
}

double bernstein_tail_bound(const SbmParams& params, double ell) {
    const ZDistribution z(params.p, params.q);
    const double t = ell + (params.a - params.b) * std::log(static_cast<double>(params.n));
    if (!(t > 0.0)) throw std::invalid_argument("bernstein_tail_bound: requires t > 0");
    const double sigma_sq = static_cast<double>(params.n) * z.variance();
    const double c = 1.0 + z.mean();  // almost-sure bound on the centered summand
    const double exponent = -t * t / (2.0 * (sigma_sq + c * t / 3.0));
    return std::min(1.0, std::exp(exponent));
}

double exact_tail(const SbmParams& params, double ell, int64_t m) {
    if (m < 1) throw std::invalid_argument("exact_tail: m must be >= 1");
    const ZDistribution z(params.p, params.q);
    const double pp = z.prob_plus();
    const double pz = z.prob_zero();
    const double pm = z.prob_minus();

    // dist[k + offset] = Pr(S_i = k); support grows from [-i, i]
    std::vector<double> dist(static_cast<size_t>(2 * m + 1), 0.0);
    const int64_t offset = m;
    dist[static_cast<size_t>(offset)] = 1.0;
    for (int64_t i = 1; i <= m; ++i) {
        std::vector<double> next(dist.size(), 0.0);
        for (int64_t k = -(i - 1); k <= i - 1; ++k) {
            const double mass = dist[static_cast<size_t>(k + offset)];
            if (mass == 0.0) continue;
            next[static_cast<size_t>(k + 1 + offset)] += mass * pp;
            next[static_cast<size_t>(k + offset)] += mass * pz;
            next[static_cast<size_t>(k - 1 + offset)] += mass * pm;
        }
        dist.swap(next);
    }

    const double cut = std::floor(-ell);
    if (cut < static_cast<double>(-m)) return 0.0;
    if (cut >= static_cast<double>(m)) return 1.0;
    const int64_t top = std::min<int64_t>(static_cast<int64_t>(cut), m);
    double tail = 0.0;
    for (int64_t k = -m; k <= top; ++k) tail += dist[static_cast<size_t>(k + offset)];
    return std::min(1.0, tail);
}

std::vector<std::pair<double, double>> fig1_curve(double M, const std::vector<double>& ratio_grid) {
    if (!(M > 0.25)) throw std::invalid_argument("fig1_curve: M must exceed 1/4");
    const double scale = std::sqrt(M - 0.25);
    std::vector<std::pair<double, double>> out;
    out.reserve(ratio_grid.size());
    for (double x : ratio_grid) {
        if (!(x > 0.0) || !(x <= 1.0))
            throw std::invalid_argument("fig1_curve: grid values must lie in (0, 1]");
        const auto delta = delta_exponent(M, x * scale);
        out.emplace_back(x, delta ? 1.0 - *delta : 1.0);
    }
    return out;
}

ThresholdReport make_threshold_report(const SbmParams& params) {
    ThresholdReport report{};
    report.D = params.D;
    report.M = params.M;
    report.Delta = params.Delta;
    report.delta = delta_exponent(params.M, params.Delta);
    report.ell_critical = ell_critical(params);
    report.budget = sample_budget(params);
    report.valid = report.delta.has_value();
    return report;
}

nlohmann::json threshold_report_to_json(const ThresholdReport& report) {
    nlohmann::json j;
    j["D"] = report.D;
    j["M"] = report.M;
    j["Delta"] = report.Delta;
    if (report.delta)
        j["delta"] = *report.delta;
    else
        j["delta"] = nullptr;
    j["ell_critical"] = report.ell_critical;
    if (report.budget)
        j["budget"] = *report.budget;
    else
        j["budget"] = "all";
    j["valid"] = report.valid;
    return j;
}

}  // namespace sbmal
