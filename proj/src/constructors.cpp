#include "mstab/constructors.hpp"

#include "mstab/linalg.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <mutex>

namespace mstab {

std::string to_string(ConstructorKind kind) {
    switch (kind) {
        case ConstructorKind::continuous_normalized: return "continuous_normalized";
        case ConstructorKind::continuous_combinatorial: return "continuous_combinatorial";
        case ConstructorKind::linearized: return "linearized";
        case ConstructorKind::directed: return "directed";
        case ConstructorKind::linearized_directed: return "linearized_directed";
        case ConstructorKind::signed_constructor: return "signed";
        case ConstructorKind::signed_modularity: return "signed_modularity";
    }
    return "?";
}

std::optional<ConstructorKind> parse_constructor_kind(const std::string& name) {
    static const std::map<std::string, ConstructorKind> kinds = {
        {"continuous_normalized", ConstructorKind::continuous_normalized},
        {"continuous_combinatorial", ConstructorKind::continuous_combinatorial},
        {"linearized", ConstructorKind::linearized},
        {"directed", ConstructorKind::directed},
        {"linearized_directed", ConstructorKind::linearized_directed},
        {"signed", ConstructorKind::signed_constructor},
        {"signed_modularity", ConstructorKind::signed_modularity},
    };
    const auto it = kinds.find(name);
    if (it == kinds.end()) return std::nullopt;
    return it->second;
}

namespace {

void require(bool condition, const std::string& message) {
    if (!condition) throw InputError(message);
}

void check_exp_threshold(const Graph& graph, const ConstructorOptions& options,
                         ConstructorKind kind) {
    if (graph.num_nodes() > options.exp_dense_threshold)
        throw InputError(to_string(kind) + ": " + std::to_string(graph.num_nodes()) +
                         " nodes exceed the dense-exponential threshold of " +
                         std::to_string(options.exp_dense_threshold) +
                         "; use a linearized constructor");
}

void check_mass(const SimilarityMatrix& similarity, ConstructorKind kind) {
    const Scalar mass = similarity.sum();
    if (std::abs(mass - 1.0) > 1e-9)
        throw NumericError(to_string(kind) + ": similarity mass " + std::to_string(mass) +
                           " deviates from 1");
}

Matrix timed_exponential(const SpMatrix& generator, Scalar t, BuildStats* stats) {
    const auto start = std::chrono::steady_clock::now();
    Matrix result = matrix_exponential(generator, t);
    if (stats)
        stats->exp_seconds +=
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

NullModel rank_one_null(const Vector& pi, Scalar shift) {
    Matrix pairs(pi.size(), 2);
    pairs.col(0) = pi;
    pairs.col(1) = pi;
    return {std::move(pairs), shift};
}

/// Rank-2 null model of signed modularity: the subtracted term is
/// (s+ s+^T / 2w+  -  s- s-^T / 2w-) / (2w+ + 2w-), with the scaling split
/// evenly between the two vectors of each pair.
NullModel signed_null(const Graph& graph, Scalar shift) {
    const int n = graph.num_nodes();
    Vector pos = Vector::Zero(n), neg = Vector::Zero(n);
    for (const auto& a : graph.arcs()) {
        if (a.weight >= 0.0)
            pos[a.source] += a.weight;
        else
            neg[a.source] -= a.weight;
    }
    const Scalar two_w_pos = pos.sum();
    const Scalar two_w_neg = neg.sum();
    const Scalar total = two_w_pos + two_w_neg;
    require(total > 0.0, "signed null model: graph has no edges");

    Matrix pairs = Matrix::Zero(n, 4);
    if (two_w_pos > 0.0) {
        const Scalar alpha = 1.0 / std::sqrt(two_w_pos * total);
        pairs.col(0) = pos * alpha;
        pairs.col(1) = pos * alpha;
    }
    if (two_w_neg > 0.0) {
        const Scalar alpha = 1.0 / std::sqrt(two_w_neg * total);
        pairs.col(2) = -neg * alpha;
        pairs.col(3) = neg * alpha;
    }
    return {std::move(pairs), shift};
}

QualityInstance build_continuous_normalized(const Graph& graph, Scalar t,
                                            const ConstructorOptions& options, BuildStats* stats) {
    require(!graph.directed(), "continuous_normalized: graph must be undirected");
    require(!graph.is_signed(), "continuous_normalized: graph must be unsigned");
    check_exp_threshold(graph, options, ConstructorKind::continuous_normalized);
    const Vector pi = stationary_distribution(graph, StationaryProcess::undirected_walk).pi;
    const SpMatrix L = laplacian(graph, LaplacianKind::random_walk);
    Matrix f = timed_exponential(L, t, stats);
    f.array().colwise() *= pi.array();
    QualityInstance instance{t, SimilarityMatrix(std::move(f)), rank_one_null(pi, 0.0)};
    check_mass(instance.similarity, ConstructorKind::continuous_normalized);
    return instance;
}

QualityInstance build_continuous_combinatorial(const Graph& graph, Scalar t,
                                               const ConstructorOptions& options,
                                               BuildStats* stats) {
    require(!graph.directed(), "continuous_combinatorial: graph must be undirected");
    require(!graph.is_signed(), "continuous_combinatorial: graph must be unsigned");
    check_exp_threshold(graph, options, ConstructorKind::continuous_combinatorial);
    const int n = graph.num_nodes();
    if (connected_components(graph).size() > 1)
        warn("continuous_combinatorial: graph is disconnected; scales act per component");
    const Scalar mean_strength = degrees(graph).out_strength.sum() / n;
    require(mean_strength > 0.0, "continuous_combinatorial: graph has no positive strength");
    // Rescaling by N/<d> puts the combinatorial generator on the same scale
    // grid as the normalized one.
    const Scalar tau = options.combinatorial_rescale ? t * n / mean_strength : t;
    const SpMatrix L = laplacian(graph, LaplacianKind::combinatorial);
    Matrix f = timed_exponential(L, tau, stats) / n;
    QualityInstance instance{t, SimilarityMatrix(std::move(f)),
                             rank_one_null(Vector::Constant(n, 1.0 / n), 0.0)};
    check_mass(instance.similarity, ConstructorKind::continuous_combinatorial);
    return instance;
}

QualityInstance build_linearized(const Graph& graph, Scalar t, const ConstructorOptions&,
                                 BuildStats*) {
    require(!graph.directed(), "linearized: graph must be undirected");
    require(!graph.is_signed(), "linearized: graph must be unsigned");
    const Vector strength = degrees(graph).out_strength;
    const Scalar two_w = strength.sum();
    require(two_w > 0.0, "linearized: graph has no edges");
    SpMatrix f = graph.adjacency() * (t / two_w);
    return {t, SimilarityMatrix(std::move(f)), rank_one_null(strength / two_w, 1.0 - t)};
}

QualityInstance build_directed(const Graph& graph, Scalar t, const ConstructorOptions& options,
                               BuildStats* stats) {
    require(!graph.is_signed(), "directed: graph must be unsigned");
    check_exp_threshold(graph, options, ConstructorKind::directed);
    const int n = graph.num_nodes();
    TeleportOptions teleport;
    teleport.lambda = options.teleportation_lambda;
    const Vector pi = stationary_distribution(graph, StationaryProcess::teleporting_walk, teleport).pi;

    const Degrees d = degrees(graph);
    const Scalar lambda = options.teleportation_lambda;
    Matrix m = Matrix::Zero(n, n);
    for (const auto& a : graph.arcs())
        if (d.out_strength[a.source] > 0.0)
            m(a.source, a.target) += lambda * a.weight / d.out_strength[a.source];
    for (int i = 0; i < n; ++i) {
        const Scalar uniform = d.out_strength[i] > 0.0 ? (1.0 - lambda) / n : 1.0 / n;
        m.row(i).array() += uniform;
    }

    // exp(-t (I - M)), via the dense path of the same Pade routine
    Matrix generator = Matrix::Identity(n, n) - m;
    const auto start = std::chrono::steady_clock::now();
    Matrix f = (generator * -t).exp();
    if (stats)
        stats->exp_seconds +=
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    f.array().colwise() *= pi.array();
    QualityInstance instance{t, SimilarityMatrix(std::move(f)), rank_one_null(pi, 0.0)};
    check_mass(instance.similarity, ConstructorKind::directed);
    return instance;
}

QualityInstance build_linearized_directed(const Graph& graph, Scalar t,
                                          const ConstructorOptions& options, BuildStats*) {
    require(!graph.is_signed(), "linearized_directed: graph must be unsigned");
    const int n = graph.num_nodes();
    TeleportOptions teleport;
    teleport.lambda = options.teleportation_lambda;
    const Vector pi = stationary_distribution(graph, StationaryProcess::teleporting_walk, teleport).pi;

    // t Pi M splits into a sparse walk part and a rank-one teleport part,
    // kept factored so the matrix stays sparse.
    const Degrees d = degrees(graph);
    const Scalar lambda = options.teleportation_lambda;
    std::vector<Triplet> triplets;
    triplets.reserve(graph.arcs().size());
    for (const auto& a : graph.arcs())
        if (d.out_strength[a.source] > 0.0)
            triplets.emplace_back(a.source, a.target,
                                  t * lambda * pi[a.source] * a.weight / d.out_strength[a.source]);
    SpMatrix walk(n, n);
    walk.setFromTriplets(triplets.begin(), triplets.end());
    walk.makeCompressed();

    Vector left(n);
    for (int i = 0; i < n; ++i) {
        const Scalar teleport_share = d.out_strength[i] > 0.0 ? (1.0 - lambda) : 1.0;
        left[i] = t * pi[i] * teleport_share / n;
    }
    return {t, SimilarityMatrix(std::move(walk), std::move(left), Vector::Ones(n)),
            rank_one_null(pi, 1.0 - t)};
}

QualityInstance build_signed(const Graph& graph, Scalar t, const ConstructorOptions& options,
                             BuildStats* stats) {
    require(!graph.directed(), "signed: graph must be undirected");
    check_exp_threshold(graph, options, ConstructorKind::signed_constructor);
    const SpMatrix L = laplacian(graph, LaplacianKind::signed_normalized);
    const Vector abs_strength = degrees(graph).abs_strength;
    const Vector pi_abs = abs_strength / abs_strength.sum();
    Matrix f = timed_exponential(L, t, stats);
    f.array().colwise() *= pi_abs.array();
    QualityInstance instance{t, SimilarityMatrix(std::move(f)), signed_null(graph, 0.0)};
    if (!graph.is_signed()) check_mass(instance.similarity, ConstructorKind::signed_constructor);
    return instance;
}

QualityInstance build_signed_modularity(const Graph& graph, Scalar t, const ConstructorOptions&,
                                        BuildStats*) {
    require(!graph.directed(), "signed_modularity: graph must be undirected");
    const Scalar total_abs = degrees(graph).abs_strength.sum();
    require(total_abs > 0.0, "signed_modularity: graph has no edges");
    SpMatrix f = graph.adjacency() * (t / total_abs);
    return {t, SimilarityMatrix(std::move(f)), signed_null(graph, 1.0 - t)};
}

std::mutex g_registry_mutex;
std::map<std::string, ConstructorFactory>& registry() {
    static std::map<std::string, ConstructorFactory> instance;
    return instance;
}

}  // namespace

QualityInstance build(ConstructorKind kind, const Graph& graph, Scalar t,
                      const ConstructorOptions& options, BuildStats* stats) {
    if (!(t > 0.0)) throw ConfigError("constructor scale t must be positive");
    if (graph.num_nodes() == 0) throw InputError("constructor: empty graph");
    switch (kind) {
        case ConstructorKind::continuous_normalized:
            return build_continuous_normalized(graph, t, options, stats);
        case ConstructorKind::continuous_combinatorial:
            return build_continuous_combinatorial(graph, t, options, stats);
        case ConstructorKind::linearized: return build_linearized(graph, t, options, stats);
        case ConstructorKind::directed: return build_directed(graph, t, options, stats);
        case ConstructorKind::linearized_directed:
            return build_linearized_directed(graph, t, options, stats);
        case ConstructorKind::signed_constructor: return build_signed(graph, t, options, stats);
        case ConstructorKind::signed_modularity:
            return build_signed_modularity(graph, t, options, stats);
    }
    throw ConfigError("unknown constructor kind");
}

QualityInstance build(const std::string& kind_name, const Graph& graph, Scalar t,
                      const ConstructorOptions& options, BuildStats* stats) {
    if (const auto kind = parse_constructor_kind(kind_name))
        return build(*kind, graph, t, options, stats);

    ConstructorFactory factory;
    {
        std::lock_guard lock(g_registry_mutex);
        const auto it = registry().find(kind_name);
        if (it == registry().end())
            throw ConfigError("unknown constructor '" + kind_name + "'");
        factory = it->second;
    }
    QualityInstance instance = factory(graph, t, options);
    validate_instance(instance, graph.num_nodes());
    return instance;
}

Registration register_constructor(const std::string& name, ConstructorFactory factory) {
    if (parse_constructor_kind(name))
        throw ConfigError("constructor name '" + name + "' is reserved");
    std::lock_guard lock(g_registry_mutex);
    if (!registry().emplace(name, std::move(factory)).second)
        throw ConfigError("constructor '" + name + "' is already registered");
    return {name};
}

bool is_registered_constructor(const std::string& name) {
    std::lock_guard lock(g_registry_mutex);
    return registry().count(name) > 0;
}

void validate_instance(const QualityInstance& instance, int n_nodes) {
    const auto& similarity = instance.similarity;
    const int rows = similarity.is_dense() ? static_cast<int>(similarity.dense().rows())
                                           : static_cast<int>(similarity.sparse().rows());
    const int cols = similarity.is_dense() ? static_cast<int>(similarity.dense().cols())
                                           : static_cast<int>(similarity.sparse().cols());
    if (rows != n_nodes || cols != n_nodes)
        throw InputError("quality instance: similarity matrix is " + std::to_string(rows) + "x" +
                         std::to_string(cols) + ", expected " + std::to_string(n_nodes) + "x" +
                         std::to_string(n_nodes));
    bool finite = similarity.is_dense() ? similarity.dense().allFinite()
                                        : Vector(similarity.sparse().coeffs()).allFinite();
    if (similarity.has_completion())
        finite = finite && similarity.completion_left().allFinite() &&
                 similarity.completion_right().allFinite();
    if (!finite) throw NumericError("quality instance: non-finite similarity entries");

    const auto& pairs = instance.null_model.vector_pairs;
    if (pairs.cols() < 2 || pairs.cols() % 2 != 0)
        throw InputError("quality instance: null model needs a positive number of vector pairs");
    if (pairs.rows() != n_nodes)
        throw InputError("quality instance: null vectors have length " +
                         std::to_string(pairs.rows()) + ", expected " + std::to_string(n_nodes));
    if (!pairs.allFinite() || !std::isfinite(instance.null_model.global_shift))
        throw NumericError("quality instance: non-finite null model");
}

}  // namespace mstab
