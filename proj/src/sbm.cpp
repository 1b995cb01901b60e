#include "sbmal/sbm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sbmal/rng.hpp"

namespace sbmal {

SbmParams::SbmParams(int64_t n_, double a_, double b_) : n(n_), a(a_), b(b_) {
    if (n < 1) throw std::invalid_argument("SbmParams: n must be positive");
    if (!(b > 1.0)) throw std::invalid_argument("SbmParams: b must be > 1");
    if (!(a > b)) throw std::invalid_argument("SbmParams: a must be > b");
    const double logn = std::log(static_cast<double>(n));
    p = a * logn / static_cast<double>(n);
    q = b * logn / static_cast<double>(n);
    if (!(q > 0.0) || !(p < 1.0)) {
        throw std::invalid_argument("SbmParams: need 0 < q < p < 1 (n too small for a=" +
                                    std::to_string(a) + ")");
    }
    M = 0.5 * (a + b);
    Delta = 0.5 * (a - b);
    const double sd = std::sqrt(a) - std::sqrt(b);
    D = sd * sd;
}

SbmParams SbmParams::from_divergence(int64_t n, double D, double b) {
    if (!(D > 0.0)) throw std::invalid_argument("SbmParams: D must be > 0");
    // (sqrt(D) + sqrt(b))^2 expanded; exact for round cases like D*b = 1
    return SbmParams(n, D + b + 2.0 * std::sqrt(D * b), b);
}

Graph::Graph(int64_t num_nodes, const std::vector<std::pair<int32_t, int32_t>>& edges,
             std::optional<Provenance> provenance)
    : num_nodes_(num_nodes), provenance_(std::move(provenance)) {
    if (num_nodes < 0) throw std::invalid_argument("Graph: negative node count");
    std::vector<int64_t> deg(num_nodes + 1, 0);
    for (const auto& [u, v] : edges) {
        if (u < 0 || v < 0 || u >= num_nodes || v >= num_nodes)
            throw std::invalid_argument("Graph: edge endpoint out of range");
        if (u == v) throw std::invalid_argument("Graph: self-loop");
        ++deg[u + 1];
        ++deg[v + 1];
    }
    offsets_.assign(num_nodes + 1, 0);
    for (int64_t v = 0; v < num_nodes; ++v) offsets_[v + 1] = offsets_[v] + deg[v + 1];
    neighbors_.resize(static_cast<size_t>(offsets_[num_nodes]));
    std::vector<int64_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [u, v] : edges) {
        neighbors_[cursor[u]++] = v;
        neighbors_[cursor[v]++] = u;
    }
    for (int64_t v = 0; v < num_nodes; ++v) {
        auto begin = neighbors_.begin() + offsets_[v];
        auto end = neighbors_.begin() + offsets_[v + 1];
        std::sort(begin, end);
        if (std::adjacent_find(begin, end) != end)
            throw std::invalid_argument("Graph: duplicate edge");
    }
}

std::vector<std::pair<int32_t, int32_t>> Graph::edges() const {
    std::vector<std::pair<int32_t, int32_t>> out;
    out.reserve(static_cast<size_t>(num_edges()));
    for (int64_t v = 0; v < num_nodes_; ++v) {
        for (int32_t u : neighbors(v)) {
            if (u > v) out.emplace_back(static_cast<int32_t>(v), u);
        }
    }
    return out;  // lexicographic by construction (v ascending, lists sorted)
}

Labeling::Labeling(std::vector<int8_t> v) : values(std::move(v)) {
    for (int8_t x : values) {
        if (x != 1 && x != -1) throw std::invalid_argument("Labeling: entries must be +-1");
    }
}

Labeling Labeling::flipped() const {
    Labeling out = *this;
    for (auto& x : out.values) x = static_cast<int8_t>(-x);
    return out;
}

namespace detail {

std::pair<int64_t, int64_t> unrank_pair(int64_t m, int64_t index) {
    // offset(i) = i*(m-1) - i*(i-1)/2 is the stream position of pair (i, i+1)
    auto offset = [m](int64_t i) { return i * (m - 1) - i * (i - 1) / 2; };
    const double dm = static_cast<double>(m);
    double disc = (2.0 * dm - 1.0) * (2.0 * dm - 1.0) - 8.0 * static_cast<double>(index);
    if (disc < 0.0) disc = 0.0;
    int64_t i = static_cast<int64_t>((2.0 * dm - 1.0 - std::sqrt(disc)) / 2.0);
    if (i < 0) i = 0;
    if (i > m - 2) i = m - 2;
    while (i > 0 && offset(i) > index) --i;
    while (i < m - 2 && offset(i + 1) <= index) ++i;
    const int64_t j = i + 1 + (index - offset(i));
    return {i, j};
}

}  // namespace detail

namespace {

// Visits the positions of an implicit Bernoulli(prob) sequence of the
// given length via geometric skips; O(hits) expected time. Identical in
// distribution to testing every position independently.
template <typename Emit>
void skip_sample(Rng& rng, int64_t length, double prob, Emit&& emit) {
    if (length <= 0 || prob <= 0.0) return;
    if (prob >= 1.0) {
        for (int64_t pos = 0; pos < length; ++pos) emit(pos);
        return;
    }
    const double log1mp = std::log1p(-prob);
    int64_t pos = -1;
    while (true) {
        const double u = rng.next_double();  // in [0,1); log1p(-u) finite
        const double skip = std::floor(std::log1p(-u) / log1mp);
        if (skip >= static_cast<double>(length - pos)) return;
        pos += 1 + static_cast<int64_t>(skip);
        if (pos >= length) return;
        emit(pos);
    }
}

}  // namespace

std::pair<Graph, Labeling> generate_sbm(const SbmParams& params, uint64_t seed) {
    const int64_t total = params.num_nodes();

    Rng label_rng(derive_seed(seed, {0}));
    std::vector<int8_t> labels(static_cast<size_t>(total));
    std::vector<int32_t> pos_nodes, neg_nodes;
    for (int64_t v = 0; v < total; ++v) {
        const bool plus = label_rng.next_bool();
        labels[v] = plus ? int8_t{1} : int8_t{-1};
        (plus ? pos_nodes : neg_nodes).push_back(static_cast<int32_t>(v));
    }

    Rng edge_rng(derive_seed(seed, {1}));
    std::vector<std::pair<int32_t, int32_t>> edges;
    edges.reserve(static_cast<size_t>(params.p * static_cast<double>(total) *
                                      static_cast<double>(total) / 4.0) +
                  64);

    auto within_block = [&](const std::vector<int32_t>& nodes) {
        const int64_t m = static_cast<int64_t>(nodes.size());
        skip_sample(edge_rng, m * (m - 1) / 2, params.p, [&](int64_t idx) {
            const auto [i, j] = detail::unrank_pair(m, idx);
            edges.emplace_back(nodes[i], nodes[j]);
        });
    };
    within_block(pos_nodes);
    within_block(neg_nodes);

    const int64_t mpos = static_cast<int64_t>(pos_nodes.size());
    const int64_t mneg = static_cast<int64_t>(neg_nodes.size());
    skip_sample(edge_rng, mpos * mneg, params.q, [&](int64_t idx) {
        const int32_t u = pos_nodes[idx / mneg];
        const int32_t v = neg_nodes[idx % mneg];
        edges.emplace_back(std::min(u, v), std::max(u, v));
    });

    return {Graph(total, edges, Provenance{params, seed}), Labeling(std::move(labels))};
}

int64_t differential_degree(const Graph& graph, const Labeling& labeling, int64_t v) {
    if (v < 0 || v >= graph.num_nodes())
        throw std::invalid_argument("differential_degree: node index out of range");
    int64_t sum = 0;
    for (int32_t u : graph.neighbors(v)) sum += labeling[u];
    return static_cast<int64_t>(labeling[v]) * sum;
}

std::vector<int64_t> differential_degrees(const Graph& graph, const Labeling& labeling) {
    std::vector<int64_t> out(static_cast<size_t>(graph.num_nodes()));
    for (int64_t v = 0; v < graph.num_nodes(); ++v)
        out[v] = differential_degree(graph, labeling, v);
    return out;
}

int64_t minority_count(const Graph& graph, const Labeling& labeling) {
    int64_t count = 0;
    for (int64_t v = 0; v < graph.num_nodes(); ++v)
        if (differential_degree(graph, labeling, v) <= 0) ++count;
    return count;
}

int64_t strict_minority_count(const Graph& graph, const Labeling& labeling) {
    int64_t count = 0;
    for (int64_t v = 0; v < graph.num_nodes(); ++v)
        if (differential_degree(graph, labeling, v) < 0) ++count;
    return count;
}

double error_rate(const Labeling& predicted, const Labeling& truth) {
    if (predicted.size() != truth.size())
        throw std::invalid_argument("error_rate: length mismatch");
    const int64_t total = truth.size();
    if (total == 0) return 0.0;
    int64_t mismatches = 0;
    for (int64_t v = 0; v < total; ++v)
        if (predicted[v] != truth[v]) ++mismatches;
    return static_cast<double>(std::min(mismatches, total - mismatches)) /
           static_cast<double>(total);
}

nlohmann::json graph_to_json(const Graph& graph, const Labeling& labels) {
    if (!graph.provenance())
        throw std::invalid_argument("graph_to_json: graph has no generation provenance");
    if (labels.size() != graph.num_nodes())
        throw std::invalid_argument("graph_to_json: label length mismatch");
    const auto& prov = *graph.provenance();
    nlohmann::json j;
    j["n"] = prov.params.n;
    j["a"] = prov.params.a;
    j["b"] = prov.params.b;
    j["seed"] = prov.seed;
    j["labels"] = labels.values;
    auto edge_list = nlohmann::json::array();
    for (const auto& [u, v] : graph.edges()) edge_list.push_back({u, v});
    j["edges"] = std::move(edge_list);
    return j;
}

std::pair<Graph, Labeling> graph_from_json(const nlohmann::json& j) {
    const SbmParams params(j.at("n").get<int64_t>(), j.at("a").get<double>(),
                           j.at("b").get<double>());
    const uint64_t seed = j.at("seed").get<uint64_t>();
    std::vector<int8_t> labels;
    for (const auto& x : j.at("labels")) labels.push_back(static_cast<int8_t>(x.get<int>()));
    std::vector<std::pair<int32_t, int32_t>> edges;
    for (const auto& e : j.at("edges"))
        edges.emplace_back(e.at(0).get<int32_t>(), e.at(1).get<int32_t>());
    Graph graph(params.num_nodes(), edges, Provenance{params, seed});
    return {std::move(graph), Labeling(std::move(labels))};
}

}  // namespace sbmal
