#include "mstab/optimizer.hpp"

#include "mstab/linalg.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>

using namespace mstab;

namespace {

Graph two_triangles() { return parse_edge_list("0,1\n1,2\n2,0\n3,4\n4,5\n5,3\n"); }

/// Random synthetic instance: sparse possibly-asymmetric F plus a rank-m null.
QualityInstance random_instance(int n, int rank, std::uint64_t seed, bool symmetric = false) {
    rng::Engine state = seed;
    std::vector<Triplet> triplets;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (rng::canonical(state) < 0.3) {
                const Scalar w = rng::canonical(state) - 0.3;
                triplets.emplace_back(i, j, w);
                if (symmetric && i != j) triplets.emplace_back(j, i, w);
            }
    SpMatrix f(n, n);
    f.setFromTriplets(triplets.begin(), triplets.end());
    Matrix pairs(n, 2 * rank);
    for (int c = 0; c < 2 * rank; ++c)
        for (int i = 0; i < n; ++i) pairs(i, c) = rng::canonical(state) / n;
    return QualityInstance{1.0, SimilarityMatrix(std::move(f)),
                           NullModel{std::move(pairs), 0.25}};
}

}  // namespace

TEST_CASE("partition canonicalization relabels by first appearance") {
    const Partition p({5, 5, 2, 2, 7});
    CHECK(p.labels() == std::vector<int>{0, 0, 1, 1, 2});
    CHECK(p.num_communities() == 3);
    CHECK_THROWS_AS(Partition({0, -1}), InputError);
}

TEST_CASE("quality is invariant under similarity symmetrization") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const QualityInstance instance = random_instance(20, 2, seed);
        SpMatrix sym = 0.5 * (instance.similarity.sparse() +
                              SpMatrix(instance.similarity.sparse().transpose()));
        const QualityInstance symmetrized{instance.scale, SimilarityMatrix(std::move(sym)),
                                          instance.null_model};
        for (std::uint64_t p = 0; p < 5; ++p) {
            const Partition part = oracles::random_partition(20, 5, 13 * seed + p);
            CHECK(evaluate_quality(instance, part) ==
                  doctest::Approx(evaluate_quality(symmetrized, part)).epsilon(1e-12));
        }
    }
}

TEST_CASE("factored evaluation equals the dense materialization") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const int n = 50;
        const QualityInstance instance = random_instance(n, 2, seed);
        const GeneralizedQualityMatrix matrix(instance);

        // dense B = (F + F^T)/2 - sum_k sym(v_{2k-1} v_{2k}^T)
        Matrix dense_f = Matrix(instance.similarity.sparse());
        Matrix b = 0.5 * (dense_f + dense_f.transpose());
        const auto& pairs = instance.null_model.vector_pairs;
        for (int k = 0; k < pairs.cols() / 2; ++k) {
            const Matrix outer = pairs.col(2 * k) * pairs.col(2 * k + 1).transpose();
            b -= 0.5 * (outer + outer.transpose());
        }

        for (std::uint64_t p = 0; p < 6; ++p) {
            const Partition part = oracles::random_partition(n, 6, 17 * seed + p);
            Scalar brute = instance.null_model.global_shift;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (part[i] == part[j]) brute += b(i, j);
            CHECK(matrix.evaluate(part) == doctest::Approx(brute).epsilon(1e-10));
            CHECK(evaluate_quality(instance, part) == doctest::Approx(brute).epsilon(1e-10));
        }
    }
}

TEST_CASE("evaluate_quality validates dimensions") {
    const QualityInstance instance = random_instance(8, 1, 0);
    CHECK_THROWS_AS(evaluate_quality(instance, Partition::singletons(9)), InputError);
}

TEST_CASE("exhaustive argmax") {
    SUBCASE("single node has the single partition") {
        const Graph g = Graph::from_edges(1, {{0, 0, 1.0}}, false);
        const QualityInstance instance = build(ConstructorKind::linearized, g, 1.0);
        const OptimizeResult best = exhaustive_argmax(instance);
        CHECK(best.partition.num_communities() == 1);
        CHECK(best.quality == doctest::Approx(evaluate_quality(instance, best.partition)));
    }
    SUBCASE("two disconnected triangles split at t=1") {
        const QualityInstance instance = build(ConstructorKind::linearized, two_triangles(), 1.0);
        const OptimizeResult best = exhaustive_argmax(instance);
        CHECK(best.quality == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(best.partition == Partition({0, 0, 0, 1, 1, 1}));
    }
    SUBCASE("agrees with an independent enumeration on a random instance") {
        const QualityInstance instance = random_instance(7, 2, 3);
        Scalar oracle_best = -1e300;
        long count = 0;
        oracles::for_each_partition(7, [&](const std::vector<int>& labels) {
            ++count;
            oracle_best = std::max(oracle_best, evaluate_quality(instance, Partition(labels)));
        });
        CHECK(count == 877);  // Bell(7)
        CHECK(exhaustive_argmax(instance).quality == doctest::Approx(oracle_best).epsilon(1e-14));
    }
    SUBCASE("guards the partition count") {
        const QualityInstance instance = random_instance(13, 1, 0);
        CHECK_THROWS_AS(exhaustive_argmax(instance), ConfigError);
    }
}

TEST_CASE("louvain splits disconnected triangles") {
    const QualityInstance instance = build(ConstructorKind::linearized, two_triangles(), 1.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const OptimizeResult result = louvain(instance, seed);
        CHECK(result.quality == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(result.partition == Partition({0, 0, 0, 1, 1, 1}));
    }
}

TEST_CASE("louvain matches the exhaustive argmax on a single edge") {
    const Graph g = Graph::from_edges(2, {{0, 1, 1.0}}, false);
    const QualityInstance instance = build(ConstructorKind::linearized, g, 1.0);
    const OptimizeResult oracle = exhaustive_argmax(instance);
    const OptimizeResult result = louvain(instance, 4);
    CHECK(result.quality == doctest::Approx(oracle.quality).epsilon(1e-14));
    CHECK(result.partition == oracle.partition);
}

TEST_CASE("louvain never beats the exhaustive oracle") {
    const Graph cycle = parse_edge_list("0,1\n1,2\n2,3\n3,0\n");
    const QualityInstance instance = build(ConstructorKind::linearized, cycle, 0.3);
    const Scalar oracle = exhaustive_argmax(instance).quality;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
        CHECK(louvain(instance, seed).quality <= oracle + 1e-12);
}

TEST_CASE("louvain attains the optimum on disconnected cliques") {
    auto clique_pair = [](int k) {
        std::vector<Edge> edges;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) {
                edges.push_back({i, j, 1.0});
                edges.push_back({k + i, k + j, 1.0});
            }
        return Graph::from_edges(2 * k, edges, false);
    };
    for (const int k : {3, 4}) {
        const QualityInstance instance = build(ConstructorKind::linearized, clique_pair(k), 1.0);
        const Scalar oracle = exhaustive_argmax(instance).quality;
        int attained = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const Scalar q = louvain(instance, seed).quality;
            CHECK(q <= oracle + 1e-12);
            if (q >= oracle - 1e-12) ++attained;
        }
        CHECK(attained >= 95);
    }
}

TEST_CASE("every accepted move strictly improves the quality") {
    const QualityInstance instance = random_instance(30, 2, 5, /*symmetric=*/true);
    std::vector<Scalar> trace;
    LouvainOptions options;
    options.on_quality = [&](Scalar q) { trace.push_back(q); };
    louvain(instance, 9, options);
    REQUIRE(!trace.empty());
    for (std::size_t k = 1; k < trace.size(); ++k) CHECK(trace[k] > trace[k - 1] + 1e-10 / 2);
}

TEST_CASE("quality distribution is invariant under node relabeling") {
    auto quality_multiset = [](const Graph& g) {
        const QualityInstance instance = build(ConstructorKind::linearized, g, 1.0);
        std::vector<Scalar> qualities;
        for (std::uint64_t seed = 0; seed < 100; ++seed)
            qualities.push_back(louvain(instance, seed).quality);
        std::sort(qualities.begin(), qualities.end());
        return qualities;
    };

    const Graph original = two_triangles();
    // relabel nodes with the permutation 0->3, 1->5, 2->1, 3->0, 4->2, 5->4
    const std::vector<int> perm = {3, 5, 1, 0, 2, 4};
    std::vector<Edge> permuted;
    for (const auto& a : original.arcs())
        if (a.source < a.target)
            permuted.push_back({perm[static_cast<std::size_t>(a.source)],
                                perm[static_cast<std::size_t>(a.target)], a.weight});
    const Graph relabeled = Graph::from_edges(6, permuted, false);

    const auto q1 = quality_multiset(original);
    const auto q2 = quality_multiset(relabeled);
    REQUIRE(q1.size() == q2.size());
    for (std::size_t i = 0; i < q1.size(); ++i)
        CHECK(q1[i] == doctest::Approx(q2[i]).epsilon(1e-12));
}

TEST_CASE("tiny scales keep singletons optimal") {
    const Graph tri = parse_edge_list("0,1\n1,2\n2,0\n");
    const QualityInstance instance = build(ConstructorKind::continuous_normalized, tri, 1e-6);
    const OptimizeResult result = louvain(instance, 1);
    CHECK(result.partition.num_communities() == 3);
}

TEST_CASE("leiden is declared but not supported") {
    const QualityInstance instance = build(ConstructorKind::linearized, two_triangles(), 1.0);
    CHECK_NOTHROW(optimize(instance, 0, OptimizerKind::louvain));
    CHECK_THROWS_AS(optimize(instance, 0, OptimizerKind::leiden), NotSupportedError);
}

TEST_CASE("louvain handles the factored teleportation completion") {
    const Graph g = Graph::from_edges(
        6, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 0, 1.0}, {3, 4, 1.0}, {4, 5, 1.0}, {5, 3, 1.0},
            {2, 3, 0.2}},
        true);
    const QualityInstance instance = build(ConstructorKind::linearized_directed, g, 1.0);
    REQUIRE(instance.similarity.has_completion());
    const Scalar oracle = exhaustive_argmax(instance).quality;
    int attained = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Scalar q = louvain(instance, seed).quality;
        CHECK(q <= oracle + 1e-12);
        attained += q >= oracle - 1e-12;
    }
    CHECK(attained >= 18);
}
