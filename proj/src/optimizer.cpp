#include "mstab/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace mstab {

namespace {

/// sum_c sum_p sign_p S_x(c) S_y(c) for column pairs (2p, 2p+1).
Scalar low_rank_mass(const Matrix& pairs, const Vector& signs, const std::vector<int>& labels,
                     int n_communities) {
    Scalar total = 0.0;
    for (int p = 0; p < signs.size(); ++p) {
        Vector sum_x = Vector::Zero(n_communities);
        Vector sum_y = Vector::Zero(n_communities);
        for (std::size_t i = 0; i < labels.size(); ++i) {
            sum_x[labels[i]] += pairs(static_cast<Eigen::Index>(i), 2 * p);
            sum_y[labels[i]] += pairs(static_cast<Eigen::Index>(i), 2 * p + 1);
        }
        total += signs[p] * sum_x.dot(sum_y);
    }
    return total;
}

}  // namespace

Scalar evaluate_quality(const QualityInstance& instance, const Partition& partition) {
    const int n = instance.num_nodes();
    if (partition.num_nodes() != n)
        throw InputError("evaluate_quality: partition has " + std::to_string(partition.num_nodes()) +
                         " nodes, instance has " + std::to_string(n));
    const auto& labels = partition.labels();
    const int c = partition.num_communities();

    Scalar mass = 0.0;
    const auto& similarity = instance.similarity;
    if (similarity.is_dense()) {
        const Matrix& f = similarity.dense();
        for (int j = 0; j < n; ++j) {
            const int lj = labels[static_cast<std::size_t>(j)];
            const Scalar* col = f.col(j).data();
            for (int i = 0; i < n; ++i)
                if (labels[static_cast<std::size_t>(i)] == lj) mass += col[i];
        }
    } else {
        const SpMatrix& f = similarity.sparse();
        for (int k = 0; k < f.outerSize(); ++k)
            for (SpMatrix::InnerIterator it(f, k); it; ++it)
                if (labels[static_cast<std::size_t>(it.row())] ==
                    labels[static_cast<std::size_t>(it.col())])
                    mass += it.value();
        if (similarity.has_completion()) {
            Vector sum_left = Vector::Zero(c);
            Vector sum_right = Vector::Zero(c);
            for (int i = 0; i < n; ++i) {
                sum_left[labels[static_cast<std::size_t>(i)]] += similarity.completion_left()[i];
                sum_right[labels[static_cast<std::size_t>(i)]] += similarity.completion_right()[i];
            }
            mass += sum_left.dot(sum_right);
        }
    }

    const auto& null_pairs = instance.null_model.vector_pairs;
    const Vector minus_ones = Vector::Constant(null_pairs.cols() / 2, -1.0);
    return instance.null_model.global_shift + mass +
           low_rank_mass(null_pairs, minus_ones, labels, c);
}

GeneralizedQualityMatrix::GeneralizedQualityMatrix(const QualityInstance& instance) {
    n_ = instance.num_nodes();
    shift_ = instance.null_model.global_shift;

    const auto& similarity = instance.similarity;
    if (similarity.is_dense()) {
        dense_ = 0.5 * (similarity.dense() + similarity.dense().transpose());
    } else {
        SpMatrix transposed = SpMatrix(similarity.sparse().transpose());
        sparse_ = 0.5 * (similarity.sparse() + transposed);
        sparse_.makeCompressed();
    }

    const auto& null_pairs = instance.null_model.vector_pairs;
    const int n_null = static_cast<int>(null_pairs.cols()) / 2;
    const bool completed = !similarity.is_dense() && similarity.has_completion();
    pairs_.resize(n_, 2 * (n_null + (completed ? 1 : 0)));
    signs_.resize(n_null + (completed ? 1 : 0));
    pairs_.leftCols(null_pairs.cols()) = null_pairs;
    signs_.head(n_null).setConstant(-1.0);
    if (completed) {
        pairs_.col(2 * n_null) = similarity.completion_left();
        pairs_.col(2 * n_null + 1) = similarity.completion_right();
        signs_[n_null] = 1.0;
    }
}

Scalar GeneralizedQualityMatrix::evaluate(const Partition& partition) const {
    if (partition.num_nodes() != n_)
        throw InputError("GeneralizedQualityMatrix: partition size mismatch");
    const auto& labels = partition.labels();

    Scalar mass = 0.0;
    if (is_dense()) {
        for (int j = 0; j < n_; ++j) {
            const int lj = labels[static_cast<std::size_t>(j)];
            const Scalar* col = dense_.col(j).data();
            for (int i = 0; i < n_; ++i)
                if (labels[static_cast<std::size_t>(i)] == lj) mass += col[i];
        }
    } else {
        for (int k = 0; k < sparse_.outerSize(); ++k)
            for (SpMatrix::InnerIterator it(sparse_, k); it; ++it)
                if (labels[static_cast<std::size_t>(it.row())] ==
                    labels[static_cast<std::size_t>(it.col())])
                    mass += it.value();
    }
    return shift_ + mass + low_rank_mass(pairs_, signs_, labels, partition.num_communities());
}

// ---------------------------------------------------------------------------
// Louvain
// ---------------------------------------------------------------------------

namespace {

/// State of one aggregation level. The symmetric weight matrix is dense or
/// sparse (CSR) depending on the originating similarity; low-rank vectors
/// stay factored and are summed per community when aggregating.
struct Level {
    Matrix dense;  // n x n when dense, empty otherwise
    std::vector<int> offsets;
    std::vector<int> targets;
    std::vector<Scalar> weights;
    Matrix pair_vectors;  // n x 2p
    Vector pair_signs;    // p

    int size() const { return static_cast<int>(pair_vectors.rows()); }
    bool is_dense() const { return dense.size() > 0; }
};

void fill_csr(Level& level, const SpMatrix& s) {
    const int n = static_cast<int>(s.rows());
    level.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
    level.targets.reserve(static_cast<std::size_t>(s.nonZeros()));
    level.weights.reserve(static_cast<std::size_t>(s.nonZeros()));
    // the matrix is symmetric, so column k doubles as row k
    for (int k = 0; k < s.outerSize(); ++k) {
        for (SpMatrix::InnerIterator it(s, k); it; ++it) {
            level.targets.push_back(static_cast<int>(it.row()));
            level.weights.push_back(it.value());
        }
        level.offsets[static_cast<std::size_t>(k) + 1] = static_cast<int>(level.targets.size());
    }
}

Level level_from_matrix(const GeneralizedQualityMatrix& matrix) {
    Level level;
    level.pair_vectors = matrix.pair_vectors();
    level.pair_signs = matrix.pair_signs();
    if (matrix.is_dense())
        level.dense = matrix.dense_part();
    else
        fill_csr(level, matrix.sparse_part());
    return level;
}

/// Greedy local moves until a full pass over all supernodes is quiet.
/// Returns the number of accepted moves.
long phase_one(const Level& level, std::vector<int>& comm, Matrix& comm_pair_sums,
               Scalar& quality, rng::Engine& engine, const LouvainOptions& options) {
    const int n = level.size();
    const int n_pairs = static_cast<int>(level.pair_signs.size());
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    std::vector<Scalar> acc(static_cast<std::size_t>(n), 0.0);
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<int> touched;
    touched.reserve(static_cast<std::size_t>(n));
    long total_moves = 0;

    for (;;) {
        rng::shuffle(order.begin(), order.end(), engine);
        long moves_this_pass = 0;
        for (const int u : order) {
            const int from = comm[static_cast<std::size_t>(u)];

            // link weights from u to each neighboring community, u excluded
            touched.clear();
            auto touch = [&](int c, Scalar w) {
                if (!seen[static_cast<std::size_t>(c)]) {
                    seen[static_cast<std::size_t>(c)] = 1;
                    touched.push_back(c);
                }
                acc[static_cast<std::size_t>(c)] += w;
            };
            if (level.is_dense()) {
                const Scalar* col = level.dense.col(u).data();
                for (int v = 0; v < n; ++v)
                    if (v != u) touch(comm[static_cast<std::size_t>(v)], col[v]);
            } else {
                for (int k = level.offsets[static_cast<std::size_t>(u)];
                     k < level.offsets[static_cast<std::size_t>(u) + 1]; ++k) {
                    const int v = level.targets[static_cast<std::size_t>(k)];
                    if (v != u)
                        touch(comm[static_cast<std::size_t>(v)],
                              level.weights[static_cast<std::size_t>(k)]);
                }
            }
            if (!seen[static_cast<std::size_t>(from)]) {
                seen[static_cast<std::size_t>(from)] = 1;
                touched.push_back(from);
            }

            // gain of moving u from community a to d:
            //   2 (acc[d] - acc[a])
            //   + sum_p sign_p [ x_u (Sy(d) - Sy(a) + y_u) + y_u (Sx(d) - Sx(a) + x_u) ]
            const Scalar acc_from = acc[static_cast<std::size_t>(from)];
            int best_comm = from;
            Scalar best_gain = 0.0;
            for (const int d : touched) {
                if (d == from) continue;
                Scalar gain = 2.0 * (acc[static_cast<std::size_t>(d)] - acc_from);
                for (int p = 0; p < n_pairs; ++p) {
                    const Scalar xu = level.pair_vectors(u, 2 * p);
                    const Scalar yu = level.pair_vectors(u, 2 * p + 1);
                    gain += level.pair_signs[p] *
                            (xu * (comm_pair_sums(d, 2 * p + 1) -
                                   comm_pair_sums(from, 2 * p + 1) + yu) +
                             yu * (comm_pair_sums(d, 2 * p) - comm_pair_sums(from, 2 * p) + xu));
                }
                if (gain > best_gain) {  // ties keep the current community
                    best_gain = gain;
                    best_comm = d;
                }
            }

            for (const int c : touched) {
                acc[static_cast<std::size_t>(c)] = 0.0;
                seen[static_cast<std::size_t>(c)] = 0;
            }

            if (best_comm != from && best_gain > options.gain_tolerance) {
                comm[static_cast<std::size_t>(u)] = best_comm;
                comm_pair_sums.row(from) -= level.pair_vectors.row(u);
                comm_pair_sums.row(best_comm) += level.pair_vectors.row(u);
                quality += best_gain;
                if (options.on_quality) options.on_quality(quality);
                ++moves_this_pass;
            }
        }
        total_moves += moves_this_pass;
        if (moves_this_pass == 0) break;
    }
    return total_moves;
}

/// Collapse communities into supernodes: weights summed blockwise, low-rank
/// vectors summed per community.
Level aggregate(const Level& level, const std::vector<int>& comm, int n_communities) {
    Level next;
    next.pair_signs = level.pair_signs;
    next.pair_vectors = Matrix::Zero(n_communities, level.pair_vectors.cols());
    for (int u = 0; u < level.size(); ++u)
        next.pair_vectors.row(comm[static_cast<std::size_t>(u)]) += level.pair_vectors.row(u);

    if (level.is_dense()) {
        next.dense = Matrix::Zero(n_communities, n_communities);
        for (int v = 0; v < level.size(); ++v) {
            const int cv = comm[static_cast<std::size_t>(v)];
            const Scalar* col = level.dense.col(v).data();
            for (int u = 0; u < level.size(); ++u)
                next.dense(comm[static_cast<std::size_t>(u)], cv) += col[u];
        }
    } else {
        std::vector<Triplet> triplets;
        triplets.reserve(level.targets.size());
        for (int u = 0; u < level.size(); ++u)
            for (int k = level.offsets[static_cast<std::size_t>(u)];
                 k < level.offsets[static_cast<std::size_t>(u) + 1]; ++k)
                triplets.emplace_back(
                    comm[static_cast<std::size_t>(u)],
                    comm[static_cast<std::size_t>(level.targets[static_cast<std::size_t>(k)])],
                    level.weights[static_cast<std::size_t>(k)]);
        SpMatrix merged(n_communities, n_communities);
        merged.setFromTriplets(triplets.begin(), triplets.end());
        merged.makeCompressed();
        fill_csr(next, merged);
    }
    return next;
}

/// Relabel communities to 0..c-1 in order of first appearance by node index.
int compact_labels(std::vector<int>& comm) {
    std::vector<int> remap(comm.size(), -1);
    int next = 0;
    for (auto& c : comm) {
        if (remap[static_cast<std::size_t>(c)] < 0) remap[static_cast<std::size_t>(c)] = next++;
        c = remap[static_cast<std::size_t>(c)];
    }
    return next;
}

}  // namespace

OptimizeResult louvain(const GeneralizedQualityMatrix& matrix, std::uint64_t seed,
                       const LouvainOptions& options) {
    const int n = matrix.num_nodes();
    std::vector<int> node_to_comm(static_cast<std::size_t>(n));
    std::iota(node_to_comm.begin(), node_to_comm.end(), 0);
    if (n == 0) return {Partition(node_to_comm), matrix.shift()};

    Level level = level_from_matrix(matrix);
    Scalar quality = matrix.evaluate(Partition::singletons(n));
    rng::Engine engine = seed;

    for (;;) {
        const int size = level.size();
        std::vector<int> comm(static_cast<std::size_t>(size));
        std::iota(comm.begin(), comm.end(), 0);
        Matrix comm_pair_sums = level.pair_vectors;

        const long moves = phase_one(level, comm, comm_pair_sums, quality, engine, options);
        if (moves == 0) break;

        const int n_communities = compact_labels(comm);
        for (auto& c : node_to_comm) c = comm[static_cast<std::size_t>(c)];
        if (n_communities == size) break;
        level = aggregate(level, comm, n_communities);
    }

    Partition partition(std::move(node_to_comm));
    const Scalar exact = matrix.evaluate(partition);
    return {std::move(partition), exact};
}

OptimizeResult louvain(const QualityInstance& instance, std::uint64_t seed,
                       const LouvainOptions& options) {
    const GeneralizedQualityMatrix matrix(instance);
    OptimizeResult result = louvain(matrix, seed, options);
    // report the quality of the original (unsymmetrized) instance
    result.quality = evaluate_quality(instance, result.partition);
    return result;
}

OptimizeResult optimize(const QualityInstance& instance, std::uint64_t seed, OptimizerKind kind,
                        const LouvainOptions& options) {
    switch (kind) {
        case OptimizerKind::louvain: return louvain(instance, seed, options);
        case OptimizerKind::leiden:
            throw NotSupportedError("the Leiden optimizer is not implemented");
    }
    throw ConfigError("unknown optimizer kind");
}

OptimizeResult exhaustive_argmax(const QualityInstance& instance) {
    const int n = instance.num_nodes();
    if (n > 12) throw ConfigError("exhaustive_argmax: N > 12 (Bell number too large)");
    if (n == 0) throw InputError("exhaustive_argmax: empty instance");

    // restricted-growth strings: labels[0] = 0, labels[i] <= 1 + max(labels[0..i-1])
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    std::vector<int> prefix_max(static_cast<std::size_t>(n), 0);  // max of labels before i
    OptimizeResult best{Partition(labels), evaluate_quality(instance, Partition(labels))};

    for (;;) {
        int i = n - 1;
        while (i > 0 && labels[static_cast<std::size_t>(i)] ==
                            prefix_max[static_cast<std::size_t>(i)] + 1)
            --i;
        if (i == 0) break;
        ++labels[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) {
            prefix_max[static_cast<std::size_t>(j)] =
                std::max(prefix_max[static_cast<std::size_t>(j - 1)],
                         labels[static_cast<std::size_t>(j - 1)]);
            labels[static_cast<std::size_t>(j)] = 0;
        }

        Partition candidate(labels);
        const Scalar quality = evaluate_quality(instance, candidate);
        if (quality > best.quality) best = {std::move(candidate), quality};
    }
    return best;
}

}  // namespace mstab
