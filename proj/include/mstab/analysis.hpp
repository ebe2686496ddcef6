#pragma once

#include "mstab/constructors.hpp"
#include "mstab/optimizer.hpp"
#include "mstab/partition.hpp"
#include "mstab/types.hpp"

#include <cstdint>
#include <vector>

namespace mstab {

/// Normalized variation of information between two partitions of the same
/// node set. Entropies use natural logarithms and the result is normalized by
/// the joint entropy, so it is a metric with values in [0,1]. Two trivial
/// single-cluster partitions have distance 0.
Scalar nvi(const Partition& p, const Partition& q);

/// Mean pairwise NVI over a seeded random subset of min(n_nvi, size)
/// ensemble members; 0 when the subset has a single member.
Scalar ensemble_nvi(const std::vector<Partition>& ensemble, int n_nvi, std::uint64_t seed);

/// k distinct indices drawn uniformly from [0, n). Deterministic per seed.
std::vector<int> sample_without_replacement(int n, int k, std::uint64_t seed);

/// Per-scale optimization outcome.
struct ScaleResult {
    Scalar scale = 0.0;
    Scalar log_scale = 0.0;  // log10(scale)
    std::vector<OptimizeResult> ensemble;
    Partition best_partition;
    Scalar best_quality = 0.0;
    Scalar nvi = 0.0;  // ensemble robustness NVI(t)
};

/// Symmetric NVI(t, t') between the best partitions of every scale pair.
Matrix cross_scale_nvi(const std::vector<ScaleResult>& scales);

struct PostprocessReport {
    int passes = 0;
    bool converged = false;
};

/// Cross-scale improvement sweep: each scale adopts any other scale's best
/// partition that scores strictly higher under its own quality instance.
/// Passes use a snapshot of the candidates, so the result is
/// order-independent; iterates to a fixed point, capped at one pass per scale.
PostprocessReport postprocess(std::vector<ScaleResult>& scales,
                              const std::vector<QualityInstance>& instances);

enum class PoolingMode {
    two_dimensional,  // pool the full NVI(t,t') matrix, then take the diagonal
    one_dimensional,  // pool along the diagonal only
};

struct ScaleSelectionParams {
    int kernel_size = 1;
    int window_size = 1;
    int basin_radius = 1;
    PoolingMode pooling = PoolingMode::two_dimensional;
};

/// Block NVI(t): average pooling of the cross-scale matrix (edges truncated
/// to the valid overlap) followed by a triangular moving mean of the diagonal.
Vector block_nvi_curve(const Matrix& cross_nvi, int kernel_size, int window_size,
                       PoolingMode pooling = PoolingMode::two_dimensional);

struct ScaleSelection {
    std::vector<int> selected;  // scale indices, ascending, deduplicated
    std::vector<int> minima;    // local minima of Block NVI (leftmost plateau index)
    Vector block_nvi;
    bool fallback = false;  // no local minimum existed; selected = global argmin of NVI(t)
};

/// Robust-scale selection: local minima of Block NVI define basins of
/// +-basin_radius indices; each basin emits the scale with minimal NVI(t).
/// A flat curve has no strict local minima; the global NVI(t) argmin is then
/// returned and flagged as a fallback.
ScaleSelection select_scales(const Matrix& cross_nvi, const Vector& nvi_per_scale,
                             const ScaleSelectionParams& params);

}  // namespace mstab
