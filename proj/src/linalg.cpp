#include "mstab/linalg.hpp"

#include <cmath>
#include <vector>

namespace mstab {

SpMatrix laplacian(const Graph& graph, LaplacianKind kind) {
    const int n = graph.num_nodes();
    const Degrees d = degrees(graph);
    std::vector<Triplet> triplets;
    triplets.reserve(graph.arcs().size() + static_cast<std::size_t>(n));

    switch (kind) {
        case LaplacianKind::combinatorial:
            for (int i = 0; i < n; ++i) triplets.emplace_back(i, i, d.out_strength[i]);
            for (const auto& a : graph.arcs()) triplets.emplace_back(a.source, a.target, -a.weight);
            break;
        case LaplacianKind::random_walk: {
            for (int i = 0; i < n; ++i)
                if (d.out_strength[i] <= 0.0)
                    throw InputError("laplacian(random_walk): node " + std::to_string(i) +
                                     " has non-positive strength");
            if (connected_components(graph).size() > 1)
                throw InputError("laplacian(random_walk): graph is disconnected");
            for (int i = 0; i < n; ++i) triplets.emplace_back(i, i, 1.0);
            for (const auto& a : graph.arcs())
                triplets.emplace_back(a.source, a.target, -a.weight / d.out_strength[a.source]);
            break;
        }
        case LaplacianKind::signed_normalized: {
            for (int i = 0; i < n; ++i)
                if (d.abs_strength[i] <= 0.0)
                    throw InputError("laplacian(signed): node " + std::to_string(i) + " is isolated");
            for (int i = 0; i < n; ++i) triplets.emplace_back(i, i, 1.0);
            for (const auto& a : graph.arcs())
                triplets.emplace_back(a.source, a.target, -a.weight / d.abs_strength[a.source]);
            break;
        }
    }

    SpMatrix L(n, n);
    L.setFromTriplets(triplets.begin(), triplets.end());
    L.makeCompressed();
    return L;
}

Vector teleport_step(const Graph& graph, const Vector& pi, Scalar lambda) {
    const int n = graph.num_nodes();
    const Degrees d = degrees(graph);

    // lambda-weighted walk mass from non-dangling nodes...
    Vector scaled = Vector::Zero(n);
    Scalar dangling_mass = 0.0;
    for (int i = 0; i < n; ++i) {
        if (d.out_strength[i] > 0.0)
            scaled[i] = lambda * pi[i] / d.out_strength[i];
        else
            dangling_mass += pi[i];
    }
    Vector next = graph.adjacency().transpose() * scaled;
    // ...plus the uniform share: teleportation and full dangling rows.
    const Scalar uniform = (lambda * dangling_mass + (1.0 - lambda) * pi.sum()) / n;
    next.array() += uniform;
    return next;
}

StationaryDistribution stationary_distribution(const Graph& graph, StationaryProcess process,
                                               const TeleportOptions& teleport) {
    const int n = graph.num_nodes();
    if (n == 0) throw InputError("stationary_distribution: empty graph");
    const Degrees d = degrees(graph);

    switch (process) {
        case StationaryProcess::undirected_walk: {
            if (graph.directed())
                throw InputError("stationary_distribution(undirected_walk): graph is directed");
            if (graph.is_signed())
                throw InputError("stationary_distribution(undirected_walk): graph is signed");
            if (connected_components(graph).size() > 1)
                throw InputError("stationary_distribution(undirected_walk): graph is disconnected");
            Vector pi = d.out_strength / d.out_strength.sum();
            return {pi};
        }
        case StationaryProcess::combinatorial:
            return {Vector::Constant(n, 1.0 / n)};
        case StationaryProcess::teleporting_walk: {
            if (graph.is_signed())
                throw InputError("stationary_distribution(teleporting_walk): graph is signed");
            if (!(teleport.lambda > 0.0 && teleport.lambda < 1.0))
                throw ConfigError("teleportation lambda must lie in (0,1)");
            Vector pi = Vector::Constant(n, 1.0 / n);
            for (int iter = 0; iter < teleport.max_iterations; ++iter) {
                Vector next = teleport_step(graph, pi, teleport.lambda);
                const Scalar residual = (next - pi).lpNorm<1>();
                pi = next / next.sum();
                if (residual <= teleport.tolerance) return {pi};
            }
            throw NumericError("stationary_distribution: power iteration did not converge within " +
                               std::to_string(teleport.max_iterations) + " iterations");
        }
    }
    throw ConfigError("stationary_distribution: unknown process");
}

}  // namespace mstab
