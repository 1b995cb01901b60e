#include "sbmal/init_cluster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sbmal/rng.hpp"

namespace sbmal {

namespace {

struct SubGraph {
    // local adjacency of the induced subgraph, CSR
    std::vector<int64_t> offsets;
    std::vector<int32_t> neighbors;

    explicit SubGraph(const Graph& graph, const std::vector<int32_t>& nodes) {
        std::vector<int32_t> local(static_cast<size_t>(graph.num_nodes()), -1);
        for (size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = static_cast<int32_t>(i);
        offsets.assign(nodes.size() + 1, 0);
        for (size_t i = 0; i < nodes.size(); ++i) {
            int64_t deg = 0;
            for (int32_t u : graph.neighbors(nodes[i]))
                if (local[u] >= 0) ++deg;
            offsets[i + 1] = offsets[i] + deg;
        }
        neighbors.resize(static_cast<size_t>(offsets.back()));
        for (size_t i = 0; i < nodes.size(); ++i) {
            int64_t cursor = offsets[i];
            for (int32_t u : graph.neighbors(nodes[i]))
                if (local[u] >= 0) neighbors[static_cast<size_t>(cursor++)] = local[u];
        }
    }

    size_t size() const { return offsets.size() - 1; }

    void multiply(const std::vector<double>& x, std::vector<double>& y) const {
        const size_t n = size();
        for (size_t v = 0; v < n; ++v) {
            double sum = 0.0;
            for (int64_t e = offsets[v]; e < offsets[v + 1]; ++e)
                sum += x[static_cast<size_t>(neighbors[static_cast<size_t>(e)])];
            y[v] = sum;
        }
    }
};

double dot(const std::vector<double>& x, const std::vector<double>& y) {
    double sum = 0.0;
    for (size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
    return sum;
}

double norm(const std::vector<double>& x) { return std::sqrt(dot(x, x)); }

void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
    for (size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(std::vector<double>& x, double alpha) {
    for (auto& v : x) v *= alpha;
}

// Gram-Schmidt on two columns; returns false when a column degenerates.
bool orthonormalize(std::vector<double>& q1, std::vector<double>& q2) {
    const double n1 = norm(q1);
    if (n1 < 1e-300) return false;
    scale(q1, 1.0 / n1);
    axpy(-dot(q1, q2), q1, q2);
    const double n2 = norm(q2);
    if (n2 < 1e-300) return false;
    scale(q2, 1.0 / n2);
    return true;
}

}  // namespace

SpectralSplit spectral_bisection(const Graph& graph, const std::vector<int32_t>& nodes,
                                 int max_steps, double tol, uint64_t seed, bool negate_start) {
    SpectralSplit out;
    const size_t n = nodes.size();
    out.labels.assign(n, 1);
    if (n == 0) return out;
    if (n == 1) {
        out.converged = true;
        return out;
    }

    const SubGraph sub(graph, nodes);

    Rng rng(derive_seed(seed, {0x5bec7}));
    std::vector<double> q1(n), q2(n);
    for (size_t i = 0; i < n; ++i) q1[i] = 2.0 * rng.next_double() - 1.0;
    for (size_t i = 0; i < n; ++i) q2[i] = 2.0 * rng.next_double() - 1.0;
    if (negate_start) {
        scale(q1, -1.0);
        scale(q2, -1.0);
    }
    if (!orthonormalize(q1, q2)) {
        q1.assign(n, 0.0);
        q2.assign(n, 0.0);
        q1[0] = 1.0;
        q2[n - 1] = 1.0;
    }

    const bool has_edges = !sub.neighbors.empty();
    std::vector<double> z1(n), z2(n);
    double t11 = 0.0, t12 = 0.0, t22 = 0.0;

    if (has_edges) {
        for (int step = 0; step < max_steps; ++step) {
            out.steps = step + 1;
            sub.multiply(q1, z1);
            sub.multiply(q2, z2);
            // projected 2x2 matrix and subspace residual ||AQ - Q(Q^T A Q)||
            t11 = dot(q1, z1);
            t12 = dot(q1, z2);
            const double t21 = dot(q2, z1);
            t22 = dot(q2, z2);
            double resid_sq = 0.0;
            for (size_t i = 0; i < n; ++i) {
                const double r1 = z1[i] - q1[i] * t11 - q2[i] * t21;
                const double r2 = z2[i] - q1[i] * t12 - q2[i] * t22;
                resid_sq += r1 * r1 + r2 * r2;
            }
            const double bnorm = std::sqrt(t11 * t11 + t12 * t12 + t21 * t21 + t22 * t22);
            if (std::sqrt(resid_sq) <= tol * std::max(1.0, bnorm)) {
                out.converged = true;
                break;
            }
            q1.swap(z1);
            q2.swap(z2);
            if (!orthonormalize(q1, q2)) {
                out.converged = false;
                q1.swap(z1);  // keep the previous orthonormal pair
                q2.swap(z2);
                break;
            }
        }
        sub.multiply(q1, z1);
        sub.multiply(q2, z2);
        t11 = dot(q1, z1);
        t12 = 0.5 * (dot(q1, z2) + dot(q2, z1));
        t22 = dot(q2, z2);
    }

    // Ritz values of the projected matrix [[t11,t12],[t12,t22]].
    const double mean = 0.5 * (t11 + t22);
    const double half = std::sqrt(0.25 * (t11 - t22) * (t11 - t22) + t12 * t12);
    out.ritz_gap = 2.0 * half;

    // Split direction: the vector in span{q1,q2} orthogonal to the
    // projection of the all-ones vector. Falls back to the second Ritz
    // vector when ones has no component in this subspace.
    double g1 = std::accumulate(q1.begin(), q1.end(), 0.0);
    double g2 = std::accumulate(q2.begin(), q2.end(), 0.0);
    const double gnorm = std::sqrt(g1 * g1 + g2 * g2);
    std::vector<double> w(n);
    if (gnorm > 1e-9 * std::sqrt(static_cast<double>(n))) {
        const double c1 = -g2 / gnorm;
        const double c2 = g1 / gnorm;
        for (size_t i = 0; i < n; ++i) w[i] = c1 * q1[i] + c2 * q2[i];
    } else {
        // eigenvector of the smaller Ritz value
        const double lambda2 = mean - half;
        double e1 = t12, e2 = lambda2 - t11;
        if (std::abs(e1) + std::abs(e2) < 1e-300) {
            e1 = 0.0;
            e2 = 1.0;
        }
        for (size_t i = 0; i < n; ++i) w[i] = e1 * q1[i] + e2 * q2[i];
    }
    for (size_t i = 0; i < n; ++i) out.labels[i] = w[i] < 0.0 ? int8_t{-1} : int8_t{1};
    if (!has_edges) out.converged = false;
    return out;
}

InitReport initial_labeling(const Graph& graph, const InitConfig& config, uint64_t seed) {
    const int64_t total = graph.num_nodes();
    if (total == 0) throw std::invalid_argument("initial_labeling: empty graph");
    if (config.replicas < 1 || config.replicas > total)
        throw std::invalid_argument("initial_labeling: replicas must be in [1, 2n]");
    if (!(config.power_tol > 0.0))
        throw std::invalid_argument("initial_labeling: tolerance must be positive");

    InitReport report;
    const double mean_degree = total > 0
        ? 2.0 * static_cast<double>(graph.num_edges()) / static_cast<double>(total)
        : 0.0;
    report.trim_threshold = config.trim_multiplier * mean_degree / 2.0;

    std::vector<int32_t> untrimmed;
    untrimmed.reserve(static_cast<size_t>(total));
    for (int64_t v = 0; v < total; ++v) {
        if (static_cast<double>(graph.degree(v)) > report.trim_threshold)
            report.trimmed.push_back(static_cast<int32_t>(v));
        else
            untrimmed.push_back(static_cast<int32_t>(v));
    }

    std::vector<int8_t> tau(static_cast<size_t>(total), 1);
    bool converged = true;

    // Full-graph bisection used for replica sign alignment and tie votes.
    const SpectralSplit full = spectral_bisection(graph, untrimmed, config.power_max_steps,
                                                  config.power_tol, derive_seed(seed, {1}));
    converged = converged && full.converged;
    std::vector<int8_t> tau_full(static_cast<size_t>(total), 1);
    for (size_t i = 0; i < untrimmed.size(); ++i) tau_full[untrimmed[i]] = full.labels[i];

    // Replica step: hold out each part, cluster the rest, then label the
    // held-out nodes by their differential degree against that clustering.
    std::vector<int32_t> shuffled = untrimmed;
    Rng part_rng(derive_seed(seed, {2}));
    for (size_t i = shuffled.size(); i > 1; --i) {
        const size_t j = static_cast<size_t>(part_rng.next_below(i));
        std::swap(shuffled[i - 1], shuffled[j]);
    }
    const size_t k = static_cast<size_t>(config.replicas);
    const size_t m = shuffled.size();
    for (size_t part = 0; part < k; ++part) {
        const size_t begin = part * m / k;
        const size_t end = (part + 1) * m / k;
        if (begin == end) {
            report.replica_overlap.push_back(1.0);
            continue;
        }
        std::vector<int32_t> held(shuffled.begin() + static_cast<int64_t>(begin),
                                  shuffled.begin() + static_cast<int64_t>(end));
        std::sort(held.begin(), held.end());
        std::vector<int32_t> rest;
        rest.reserve(m - held.size());
        std::set_difference(untrimmed.begin(), untrimmed.end(), held.begin(), held.end(),
                            std::back_inserter(rest));

        std::vector<int8_t> tau_rest(static_cast<size_t>(total), 0);
        if (rest.empty()) {
            report.replica_overlap.push_back(1.0);
        } else {
            const SpectralSplit split =
                spectral_bisection(graph, rest, config.power_max_steps, config.power_tol,
                                   derive_seed(seed, {3, static_cast<uint64_t>(part)}));
            converged = converged && split.converged;
            int64_t agree = 0;
            for (size_t i = 0; i < rest.size(); ++i)
                if (split.labels[i] == tau_full[rest[i]]) ++agree;
            const int64_t rest_size = static_cast<int64_t>(rest.size());
            const int8_t sign = (2 * agree < rest_size) ? int8_t{-1} : int8_t{1};
            for (size_t i = 0; i < rest.size(); ++i)
                tau_rest[rest[i]] = static_cast<int8_t>(sign * split.labels[i]);
            report.replica_overlap.push_back(
                static_cast<double>(std::max(agree, rest_size - agree)) /
                static_cast<double>(rest_size));
        }

        for (int32_t v : held) {
            int64_t vote = 0;
            for (int32_t u : graph.neighbors(v)) vote += tau_rest[u];
            tau[v] = vote > 0 ? int8_t{1} : (vote < 0 ? int8_t{-1} : tau_full[v]);
        }
    }

    // Trimmed nodes vote over their untrimmed neighbors.
    std::vector<int8_t> is_trimmed(static_cast<size_t>(total), 0);
    for (int32_t v : report.trimmed) is_trimmed[v] = 1;
    for (int32_t v : report.trimmed) {
        int64_t vote = 0;
        for (int32_t u : graph.neighbors(v))
            if (!is_trimmed[u]) vote += tau[u];
        tau[v] = vote > 0 ? int8_t{1} : (vote < 0 ? int8_t{-1} : int8_t{1});
    }

    report.labeling = Labeling(std::move(tau));
    if (config.refine) report.labeling = majority_refine(graph, report.labeling);
    report.converged = converged;
    return report;
}

Labeling majority_refine(const Graph& graph, const Labeling& labeling) {
    if (labeling.size() != graph.num_nodes())
        throw std::invalid_argument("majority_refine: label length mismatch");
    std::vector<int8_t> next(static_cast<size_t>(graph.num_nodes()));
    for (int64_t v = 0; v < graph.num_nodes(); ++v) {
        int64_t vote = 0;
        for (int32_t u : graph.neighbors(v)) vote += labeling[u];
        next[static_cast<size_t>(v)] =
            vote > 0 ? int8_t{1} : (vote < 0 ? int8_t{-1} : labeling[v]);
    }
    return Labeling(std::move(next));
}

}  // namespace sbmal
