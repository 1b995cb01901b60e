#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

namespace sbmal {

// Model constants for the symmetric two-community SBM on 2n nodes.
// Within-community edge probability p = a ln(n)/n, between-community
// probability q = b ln(n)/n. Requires a > b > 1 and p < 1.
struct SbmParams {
    int64_t n;
    double a;
    double b;

    // derived
    double p;
    double q;
    double M;        // (a+b)/2
    double Delta;    // (a-b)/2
    double D;        // (sqrt(a)-sqrt(b))^2

    SbmParams(int64_t n, double a, double b);

    // Parameterization by (D, b): a = (sqrt(D) + sqrt(b))^2.
    static SbmParams from_divergence(int64_t n, double D, double b);

    int64_t num_nodes() const { return 2 * n; }
};

struct Provenance {
    SbmParams params;
    uint64_t seed;
};

// Undirected simple graph with sorted adjacency (CSR). Immutable after
// construction; all accessors are pure reads and thread-safe.
class Graph {
  public:
    Graph(int64_t num_nodes, const std::vector<std::pair<int32_t, int32_t>>& edges,
          std::optional<Provenance> provenance = std::nullopt);

    int64_t num_nodes() const { return num_nodes_; }
    int64_t num_edges() const { return static_cast<int64_t>(neighbors_.size()) / 2; }

    std::span<const int32_t> neighbors(int64_t v) const {
        return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
    }

    int64_t degree(int64_t v) const { return offsets_[v + 1] - offsets_[v]; }

    // Edge list with u < v, sorted lexicographically.
    std::vector<std::pair<int32_t, int32_t>> edges() const;

    const std::optional<Provenance>& provenance() const { return provenance_; }

  private:
    int64_t num_nodes_;
    std::vector<int64_t> offsets_;
    std::vector<int32_t> neighbors_;
    std::optional<Provenance> provenance_;
};

// Per-node +-1 assignment. Comparisons that matter downstream are up to
// a global sign flip (see error_rate).
struct Labeling {
    std::vector<int8_t> values;

    Labeling() = default;
    explicit Labeling(std::vector<int8_t> v);

    int64_t size() const { return static_cast<int64_t>(values.size()); }
    int8_t operator[](int64_t v) const { return values[v]; }

    Labeling flipped() const;
};

// Draws labels i.i.d. uniform over {+1,-1} and connects each same-label
// pair with probability p, each cross-label pair with probability q.
// Deterministic given (params, seed).
std::pair<Graph, Labeling> generate_sbm(const SbmParams& params, uint64_t seed);

// d*_tau(v): same-label neighbors minus different-label neighbors.
int64_t differential_degree(const Graph& graph, const Labeling& labeling, int64_t v);
std::vector<int64_t> differential_degrees(const Graph& graph, const Labeling& labeling);

// Nodes without a neighborhood majority (d* <= 0).
int64_t minority_count(const Graph& graph, const Labeling& labeling);
// Strict variant (d* < 0), exposed as a diagnostic.
int64_t strict_minority_count(const Graph& graph, const Labeling& labeling);

// Fraction of disagreeing nodes minimized over a global sign flip.
double error_rate(const Labeling& predicted, const Labeling& truth);

// JSON serialization: {"n","a","b","seed","labels","edges"} with edges
// u < v sorted lexicographically. Requires generation provenance.
nlohmann::json graph_to_json(const Graph& graph, const Labeling& labels);
std::pair<Graph, Labeling> graph_from_json(const nlohmann::json& j);

namespace detail {
// Index of the L-th pair (i < j) in the lexicographic enumeration of all
// pairs over m items.
std::pair<int64_t, int64_t> unrank_pair(int64_t m, int64_t index);
}  // namespace detail

}  // namespace sbmal
