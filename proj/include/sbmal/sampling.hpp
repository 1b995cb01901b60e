#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sbmal/sbm.hpp"

namespace sbmal {

// Answers label queries against a hidden truth and counts the distinct
// nodes asked about. Answers are consistent across repeated queries.
class Oracle {
  public:
    explicit Oracle(Labeling truth);

    int8_t query(int64_t v);
    int64_t queries() const { return distinct_queries_; }
    int64_t num_nodes() const { return truth_.size(); }

  private:
    Labeling truth_;
    std::vector<uint8_t> seen_;
    int64_t distinct_queries_ = 0;
};

// All node ids ordered by (d*_tau'(v) ascending, id ascending).
std::vector<int32_t> rank_by_differential_degree(const Graph& graph, const Labeling& tau_prime);

struct SampleReport {
    std::vector<int32_t> sampled;  // rank order
    int64_t budget_requested = 0;
    int64_t budget_used = 0;
    Labeling tau;
    std::optional<int64_t> max_sampled_dstar;  // max d*_tau' among sampled nodes
    int aligned_sign = 1;                      // orientation applied to unsampled nodes
};

// Queries the budget lowest-ranked nodes, orients tau' to the oracle by
// a rank-weighted agreement vote over the answers (later, more
// trustworthy queries count more), then sets sampled nodes to their true
// labels. One shot: no propagation after the update.
SampleReport run_ranked_sampling(const Graph& graph, const Labeling& tau_prime, int64_t budget,
                                 Oracle& oracle);

// ceil(n^(1-delta)) when delta is defined, otherwise all 2n nodes.
int64_t auto_budget(const SbmParams& params);

}  // namespace sbmal
