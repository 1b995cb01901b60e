#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "sbmal/rng.hpp"
#include "sbmal/sbm.hpp"

using namespace sbmal;

namespace {

Labeling labels_of(std::vector<int8_t> v) { return Labeling(std::move(v)); }

// star: center 0 with leaves 1..3
Graph star_graph() { return Graph(4, {{0, 1}, {0, 2}, {0, 3}}); }

// arbitrary Bernoulli graph for property tests
Graph random_graph(int64_t nodes, double prob, uint64_t seed) {
    Rng rng(seed);
    std::vector<std::pair<int32_t, int32_t>> edges;
    for (int32_t u = 0; u < nodes; ++u)
        for (int32_t v = u + 1; v < nodes; ++v)
            if (rng.next_double() < prob) edges.push_back({u, v});
    return Graph(nodes, edges);
}

Labeling random_labels(int64_t nodes, uint64_t seed) {
    Rng rng(seed);
    std::vector<int8_t> values(static_cast<size_t>(nodes));
    for (auto& x : values) x = rng.next_bool() ? int8_t{1} : int8_t{-1};
    return Labeling(std::move(values));
}

}  // namespace

TEST_CASE("SbmParams derives rates and rejects bad inputs") {
    const SbmParams params(100, 4.5, 2.0);
    CHECK(params.p == doctest::Approx(0.20723265836946408).epsilon(1e-12));
    CHECK(params.q == doctest::Approx(0.09210340371976181).epsilon(1e-12));
    CHECK(params.M == doctest::Approx(3.25));
    CHECK(params.Delta == doctest::Approx(1.25));
    CHECK(params.D == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(params.num_nodes() == 200);

    CHECK_THROWS_AS(SbmParams(100, 2.0, 2.0), std::invalid_argument);   // a == b
    CHECK_THROWS_AS(SbmParams(100, 1.5, 2.0), std::invalid_argument);   // a < b
    CHECK_THROWS_AS(SbmParams(100, 4.5, 0.9), std::invalid_argument);   // b <= 1
    CHECK_THROWS_AS(SbmParams(2, 40.0, 2.0), std::invalid_argument);    // p >= 1
    CHECK_THROWS_AS(SbmParams(1, 4.5, 2.0), std::invalid_argument);     // q == 0
}

TEST_CASE("SbmParams divergence parameterization inverts D") {
    const SbmParams params = SbmParams::from_divergence(2000, 0.5, 2.0);
    CHECK(params.a == doctest::Approx(4.5).epsilon(1e-12));
    CHECK(params.D == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("derived quantities stay consistent: D = 2M - 2*sqrt(M^2 - Delta^2)") {
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const double b = 1.0 + 4.0 * rng.next_double() + 1e-6;
        const double a = b + 6.0 * rng.next_double() + 1e-6;
        const SbmParams params(5000, a, b);
        const double alt = 2.0 * params.M -
                           2.0 * std::sqrt(params.M * params.M - params.Delta * params.Delta);
        CHECK(params.D == doctest::Approx(alt).epsilon(1e-9));
    }
}

TEST_CASE("unrank_pair enumerates pairs lexicographically") {
    for (int64_t m = 2; m <= 40; ++m) {
        int64_t index = 0;
        for (int64_t i = 0; i < m; ++i) {
            for (int64_t j = i + 1; j < m; ++j) {
                const auto [ri, rj] = detail::unrank_pair(m, index);
                REQUIRE(ri == i);
                REQUIRE(rj == j);
                ++index;
            }
        }
    }
}

TEST_CASE("generate_sbm is deterministic and structurally valid") {
    const SbmParams params(100, 4.5, 2.0);
    const auto [g1, l1] = generate_sbm(params, 7);
    const auto [g2, l2] = generate_sbm(params, 7);
    CHECK(l1.values == l2.values);
    CHECK(g1.edges() == g2.edges());

    const auto [g3, l3] = generate_sbm(params, 8);
    CHECK(g1.edges() != g3.edges());

    CHECK(g1.num_nodes() == 200);
    const auto edges = g1.edges();
    CHECK(std::is_sorted(edges.begin(), edges.end()));
    for (const auto& [u, v] : edges) CHECK(u < v);
    for (int64_t v = 0; v < g1.num_nodes(); ++v) {
        const auto nbrs = g1.neighbors(v);
        CHECK(std::is_sorted(nbrs.begin(), nbrs.end()));
        CHECK(std::adjacent_find(nbrs.begin(), nbrs.end()) == nbrs.end());
        for (int32_t u : nbrs) {
            const auto back = g1.neighbors(u);
            CHECK(std::binary_search(back.begin(), back.end(), static_cast<int32_t>(v)));
        }
    }
    CHECK(g1.provenance().has_value());
    CHECK(g1.provenance()->seed == 7);
}

TEST_CASE("generate_sbm edge count matches the label-conditional expectation") {
    // oracle: conditional on realized community sizes, the edge count is a
    // sum of independent Bernoulli blocks with known mean and variance
    const SbmParams params(100, 4.5, 2.0);
    double total_dev = 0.0;
    double total_var = 0.0;
    for (uint64_t seed = 0; seed < 200; ++seed) {
        const auto [graph, labels] = generate_sbm(params, seed);
        int64_t pos = 0;
        for (int64_t v = 0; v < labels.size(); ++v)
            if (labels[v] > 0) ++pos;
        const int64_t neg = labels.size() - pos;
        const double within_pairs =
            0.5 * (static_cast<double>(pos) * (pos - 1) + static_cast<double>(neg) * (neg - 1));
        const double cross_pairs = static_cast<double>(pos) * static_cast<double>(neg);
        const double mean = within_pairs * params.p + cross_pairs * params.q;
        const double var = within_pairs * params.p * (1 - params.p) +
                           cross_pairs * params.q * (1 - params.q);
        total_dev += static_cast<double>(graph.num_edges()) - mean;
        total_var += var;
    }
    CHECK(std::abs(total_dev) <= 3.0 * std::sqrt(total_var));
}

TEST_CASE("differential_degree on hand fixtures") {
    SUBCASE("isolated node") {
        const Graph g(1, {});
        CHECK(differential_degree(g, labels_of({1}), 0) == 0);
    }
    SUBCASE("triangle (+1,+1,-1)") {
        const Graph g(3, {{0, 1}, {0, 2}, {1, 2}});
        const auto l = labels_of({1, 1, -1});
        CHECK(differential_degree(g, l, 0) == 0);
        CHECK(differential_degree(g, l, 2) == -2);
    }
    SUBCASE("star with center +1 and leaves (-1,-1,+1)") {
        const Graph g = star_graph();
        const auto l = labels_of({1, -1, -1, 1});
        CHECK(differential_degree(g, l, 0) == -1);
        CHECK(differential_degree(g, l, 3) == 1);
        CHECK(differential_degree(g, l, 1) == -1);
        CHECK(differential_degree(g, l, 2) == -1);
    }
    SUBCASE("out-of-range index") {
        const Graph g = star_graph();
        CHECK_THROWS_AS(differential_degree(g, labels_of({1, 1, 1, 1}), 4),
                        std::invalid_argument);
    }
}

TEST_CASE("differential degree identities") {
    for (uint64_t seed = 0; seed < 10; ++seed) {
        const Graph g = random_graph(40, 0.15, seed);
        const Labeling l = random_labels(40, seed + 100);

        int64_t within = 0, cross = 0;
        for (const auto& [u, v] : g.edges()) (l[u] == l[v] ? within : cross) += 1;
        int64_t sum = 0;
        for (int64_t v = 0; v < g.num_nodes(); ++v) sum += differential_degree(g, l, v);
        CHECK(sum == 2 * (within - cross));

        const Labeling flipped = l.flipped();
        for (int64_t v = 0; v < g.num_nodes(); ++v)
            CHECK(differential_degree(g, l, v) == differential_degree(g, flipped, v));
    }
}

TEST_CASE("minority counts") {
    SUBCASE("clique with uniform labels has none") {
        std::vector<std::pair<int32_t, int32_t>> edges;
        for (int32_t u = 0; u < 6; ++u)
            for (int32_t v = u + 1; v < 6; ++v) edges.push_back({u, v});
        const Graph g(6, edges);
        CHECK(minority_count(g, labels_of(std::vector<int8_t>(6, 1))) == 0);
    }
    SUBCASE("star fixture has three") {
        CHECK(minority_count(star_graph(), labels_of({1, -1, -1, 1})) == 3);
        CHECK(strict_minority_count(star_graph(), labels_of({1, -1, -1, 1})) == 3);
    }
    SUBCASE("empty graph: d* = 0 counts as minority, strictly it does not") {
        const Graph g(4, {});
        CHECK(minority_count(g, labels_of({1, 1, -1, -1})) == 4);
        CHECK(strict_minority_count(g, labels_of({1, 1, -1, -1})) == 0);
    }
    SUBCASE("strict count never exceeds the loose one") {
        for (uint64_t seed = 0; seed < 10; ++seed) {
            const Graph g = random_graph(30, 0.2, seed);
            const Labeling l = random_labels(30, seed + 1);
            CHECK(strict_minority_count(g, l) <= minority_count(g, l));
        }
    }
}

TEST_CASE("error_rate examples and properties") {
    const auto truth = labels_of({1, 1, -1, -1});
    CHECK(error_rate(truth, truth) == 0.0);
    CHECK(error_rate(truth.flipped(), truth) == 0.0);
    CHECK(error_rate(labels_of({1, -1, -1, -1}), truth) == doctest::Approx(0.25));
    CHECK_THROWS_AS(error_rate(labels_of({1, 1}), truth), std::invalid_argument);

    for (uint64_t seed = 0; seed < 20; ++seed) {
        const Labeling x = random_labels(25, seed);
        const Labeling y = random_labels(25, seed + 50);
        const Labeling z = random_labels(25, seed + 90);
        CHECK(error_rate(x, y) == error_rate(y, x));
        CHECK(error_rate(x, y) == error_rate(x.flipped(), y));
        CHECK(error_rate(x, y) == error_rate(x, y.flipped()));
        CHECK(error_rate(x, y) <= error_rate(x, z) + error_rate(z, y) + 1e-12);
    }
}

TEST_CASE("graph JSON round trip") {
    const SbmParams params(50, 4.5, 2.0);
    const auto [graph, labels] = generate_sbm(params, 11);
    const auto j = graph_to_json(graph, labels);
    CHECK(j.at("n") == 50);
    CHECK(j.at("seed") == 11);
    const auto& edges = j.at("edges");
    for (size_t i = 0; i < edges.size(); ++i) {
        CHECK(edges[i][0].get<int>() < edges[i][1].get<int>());
        if (i > 0) {
            const auto prev = std::pair{edges[i - 1][0].get<int>(), edges[i - 1][1].get<int>()};
            const auto cur = std::pair{edges[i][0].get<int>(), edges[i][1].get<int>()};
            CHECK(prev < cur);
        }
    }

    const auto [back, back_labels] = graph_from_json(j);
    CHECK(back.num_nodes() == graph.num_nodes());
    CHECK(back.edges() == graph.edges());
    CHECK(back_labels.values == labels.values);
    CHECK(back.provenance()->params.a == doctest::Approx(4.5));
}

TEST_CASE("graph construction rejects malformed edges") {
    CHECK_THROWS_AS(Graph(3, {{0, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(Graph(3, {{0, 3}}), std::invalid_argument);
    CHECK_THROWS_AS(Graph(3, {{0, 1}, {1, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(Labeling({1, 0, -1}), std::invalid_argument);
}
