#pragma once

#include "mstab/constructors.hpp"
#include "mstab/partition.hpp"
#include "mstab/types.hpp"

#include <cstdint>
#include <functional>

namespace mstab {

/// Generalized quality of a hard partition:
///   shift + sum_c [ F-mass within c - sum_k S_{2k-1}(c) S_{2k}(c) ]
/// where S_v(c) is the sum of v over the community. The indicator matrix is
/// never materialized.
Scalar evaluate_quality(const QualityInstance& instance, const Partition& partition);

/// Symmetrized similarity plus factored low-rank terms; the form the Louvain
/// sweep consumes. Quality is invariant under the symmetrization.
class GeneralizedQualityMatrix {
public:
    explicit GeneralizedQualityMatrix(const QualityInstance& instance);

    int num_nodes() const { return n_; }
    Scalar shift() const { return shift_; }

    bool is_dense() const { return dense_.size() > 0; }
    const Matrix& dense_part() const { return dense_; }
    const SpMatrix& sparse_part() const { return sparse_; }

    /// Low-rank pairs: columns 2p, 2p+1 of `pair_vectors` with `pair_signs[p]`.
    /// Null-model pairs carry sign -1; a similarity completion carries +1.
    const Matrix& pair_vectors() const { return pairs_; }
    const Vector& pair_signs() const { return signs_; }

    /// Same value as evaluate_quality on the originating instance.
    Scalar evaluate(const Partition& partition) const;

private:
    int n_ = 0;
    Scalar shift_ = 0.0;
    Matrix dense_;
    SpMatrix sparse_;
    Matrix pairs_;
    Vector signs_;
};

struct LouvainOptions {
    Scalar gain_tolerance = 1e-10;
    /// Called with the running quality after every accepted move.
    std::function<void(Scalar)> on_quality;
};

struct OptimizeResult {
    Partition partition;
    Scalar quality = 0.0;
};

/// Greedy two-phase Louvain generalized to the factored quality matrix.
/// Deterministic for a fixed seed; the seed drives the per-pass sweep order.
OptimizeResult louvain(const QualityInstance& instance, std::uint64_t seed,
                       const LouvainOptions& options = {});
OptimizeResult louvain(const GeneralizedQualityMatrix& matrix, std::uint64_t seed,
                       const LouvainOptions& options = {});

enum class OptimizerKind { louvain, leiden };

/// Dispatch by optimizer kind. Leiden is declared but not implemented.
OptimizeResult optimize(const QualityInstance& instance, std::uint64_t seed,
                        OptimizerKind kind = OptimizerKind::louvain,
                        const LouvainOptions& options = {});

/// Global maximizer over all set partitions (restricted-growth enumeration).
/// Guarded to N <= 12; ties keep the first partition enumerated.
OptimizeResult exhaustive_argmax(const QualityInstance& instance);

}  // namespace mstab
