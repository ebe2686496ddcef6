#pragma once

#include "mstab/graph.hpp"
#include "mstab/types.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace mstab {

enum class LaplacianKind {
    combinatorial,      // L = D - A
    random_walk,        // L = I - D^-1 A
    signed_normalized,  // L = D_abs^-1 (D_abs - A)
};

SpMatrix laplacian(const Graph& graph, LaplacianKind kind);

/// exp(-G t) for a sparse generator G, dense scaling-and-squaring result.
/// Works for any scalar with full Eigen support.
template <typename ScalarT>
Eigen::Matrix<ScalarT, Eigen::Dynamic, Eigen::Dynamic> matrix_exponential(
    const Eigen::SparseMatrix<ScalarT>& generator, ScalarT t) {
    if (generator.rows() != generator.cols())
        throw InputError("matrix_exponential: matrix is not square");
    if (t < ScalarT(0)) throw InputError("matrix_exponential: negative scale");
    using Dense = Eigen::Matrix<ScalarT, Eigen::Dynamic, Eigen::Dynamic>;
    Dense scaled = Dense(generator) * (-t);
    if (!scaled.allFinite()) throw InputError("matrix_exponential: non-finite entries");
    return scaled.exp();
}

inline Matrix matrix_exponential(const SpMatrix& generator, Scalar t) {
    return matrix_exponential<Scalar>(generator, t);
}

struct StationaryDistribution {
    Vector pi;  // entries >= 0, sums to 1 within 1e-12
};

enum class StationaryProcess {
    undirected_walk,  // pi_i = strength_i / total strength
    combinatorial,    // uniform 1/N
    teleporting_walk, // left unit eigenvector of the teleportation chain
};

struct TeleportOptions {
    Scalar lambda = 0.85;       // in (0,1)
    Scalar tolerance = 1e-12;   // 1-norm residual of pi M - pi
    int max_iterations = 10000;
};

StationaryDistribution stationary_distribution(const Graph& graph, StationaryProcess process,
                                               const TeleportOptions& teleport = {});

/// One application of the teleportation-adjusted transition matrix
/// M = lambda D_out^-1 A + (1 - lambda)/N, dangling rows fully uniform.
/// Exposed for tests and the directed constructors.
Vector teleport_step(const Graph& graph, const Vector& pi, Scalar lambda);

}  // namespace mstab
