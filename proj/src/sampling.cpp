#include "sbmal/sampling.hpp"

#include <algorithm>
#include <stdexcept>

#include "sbmal/theory.hpp"

namespace sbmal {

Oracle::Oracle(Labeling truth)
    : truth_(std::move(truth)), seen_(static_cast<size_t>(truth_.size()), 0) {}

int8_t Oracle::query(int64_t v) {
    if (v < 0 || v >= truth_.size()) throw std::invalid_argument("Oracle: node out of range");
    if (!seen_[static_cast<size_t>(v)]) {
        seen_[static_cast<size_t>(v)] = 1;
        ++distinct_queries_;
    }
    return truth_[v];
}

std::vector<int32_t> rank_by_differential_degree(const Graph& graph, const Labeling& tau_prime) {
    const auto dstar = differential_degrees(graph, tau_prime);
    std::vector<int32_t> order(static_cast<size_t>(graph.num_nodes()));
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int32_t>(i);
    std::sort(order.begin(), order.end(), [&dstar](int32_t lhs, int32_t rhs) {
        if (dstar[lhs] != dstar[rhs]) return dstar[lhs] < dstar[rhs];
        return lhs < rhs;
    });
    return order;
}

SampleReport run_ranked_sampling(const Graph& graph, const Labeling& tau_prime, int64_t budget,
                                 Oracle& oracle) {
    const int64_t total = graph.num_nodes();
    if (tau_prime.size() != total)
        throw std::invalid_argument("run_ranked_sampling: label length mismatch");
    if (budget < 0 || budget > total)
        throw std::invalid_argument("run_ranked_sampling: budget must lie in [0, 2n]");

    SampleReport report;
    report.budget_requested = budget;
    report.budget_used = std::min(budget, total);

    const auto ranked = rank_by_differential_degree(graph, tau_prime);
    report.sampled.assign(ranked.begin(), ranked.begin() + report.budget_used);

    std::vector<int8_t> answers(report.sampled.size());
    for (size_t i = 0; i < report.sampled.size(); ++i)
        answers[i] = oracle.query(report.sampled[i]);

    // tau' is defined only up to a global sign; orient it to the oracle
    // before applying corrections, else a flipped tau' would be destroyed
    // by a partial update. Sampling targets exactly the nodes where tau'
    // is least trustworthy and its mistakes concentrate at the front of
    // the ranking, so each answer votes with its rank position as weight:
    // agreement late in the sample is strong evidence for the current
    // orientation even when most of the sample disagrees.
    int64_t weighted_agreement = 0;
    for (size_t i = 0; i < report.sampled.size(); ++i) {
        const int64_t weight = static_cast<int64_t>(i) + 1;
        weighted_agreement +=
            answers[i] == tau_prime[report.sampled[i]] ? weight : -weight;
    }
    report.aligned_sign = weighted_agreement < 0 ? -1 : 1;  // tie keeps orientation

    std::vector<int8_t> tau(static_cast<size_t>(total));
    for (int64_t v = 0; v < total; ++v)
        tau[static_cast<size_t>(v)] = static_cast<int8_t>(report.aligned_sign * tau_prime[v]);
    for (size_t i = 0; i < report.sampled.size(); ++i) tau[report.sampled[i]] = answers[i];
    report.tau = Labeling(std::move(tau));

    if (!report.sampled.empty()) {
        // the sample is the ascending-d* prefix, so the last node carries the max
        report.max_sampled_dstar = differential_degree(graph, tau_prime, report.sampled.back());
    }
    return report;
}

int64_t auto_budget(const SbmParams& params) {
    const auto budget = sample_budget(params);
    return budget ? *budget : params.num_nodes();
}

}  // namespace sbmal
