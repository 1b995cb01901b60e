#pragma once

#include <cstdint>
#include <vector>

#include "sbmal/sbm.hpp"

namespace sbmal {

struct InitConfig {
    int replicas = 5;           // held-out partitions in the replica step
    int power_max_steps = 300;  // orthogonal-iteration step cap
    double power_tol = 1e-8;    // relative subspace residual target
    double trim_multiplier = 20.0;  // trim degree > multiplier * mean_degree / 2
    bool refine = false;        // one synchronous majority pass at the end
};

struct SpectralSplit {
    std::vector<int8_t> labels;  // one entry per subset node, +-1
    bool converged = false;
    double ritz_gap = 0.0;       // |theta_1 - theta_2| of the converged pair
    int steps = 0;
};

// Bisects the subgraph induced by `nodes` (sorted ascending) using the
// dominant two-dimensional eigenspace of its adjacency. The split
// direction is the component of the eigenspace orthogonal to the
// projected all-ones vector, which stays well defined when the top two
// eigenvalues coincide (e.g. two disconnected clusters of equal size).
// Entries equal to zero map to +1. Deterministic given seed;
// negate_start flips the random start basis (testing hook).
SpectralSplit spectral_bisection(const Graph& graph, const std::vector<int32_t>& nodes,
                                 int max_steps, double tol, uint64_t seed,
                                 bool negate_start = false);

struct InitReport {
    Labeling labeling;                    // full +-1 assignment, trimmed nodes included
    std::vector<int32_t> trimmed;
    std::vector<double> replica_overlap;  // agreement of each replica split with the full one
    bool converged = false;
    double trim_threshold = 0.0;
};

// Weakly consistent initial labeling: degree trim, spectral bisection,
// replica cross-labeling of held-out parts, neighborhood vote for
// trimmed nodes, optional majority refinement.
InitReport initial_labeling(const Graph& graph, const InitConfig& config, uint64_t seed);

// One synchronous pass assigning every node the sign of its neighborhood
// majority under the input labeling; ties keep the current label.
Labeling majority_refine(const Graph& graph, const Labeling& labeling);

}  // namespace sbmal
