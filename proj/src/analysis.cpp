#include "mstab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace mstab {

Scalar nvi(const Partition& p, const Partition& q) {
    const int n = p.num_nodes();
    if (q.num_nodes() != n) throw InputError("nvi: partitions have different node counts");
    if (n == 0) return 0.0;

    std::vector<std::int64_t> p_counts(static_cast<std::size_t>(p.num_communities()), 0);
    std::vector<std::int64_t> q_counts(static_cast<std::size_t>(q.num_communities()), 0);
    std::unordered_map<std::int64_t, std::int64_t> joint;
    joint.reserve(static_cast<std::size_t>(std::max(p.num_communities(), q.num_communities())));
    for (int i = 0; i < n; ++i) {
        const int a = p[i];
        const int b = q[i];
        ++p_counts[static_cast<std::size_t>(a)];
        ++q_counts[static_cast<std::size_t>(b)];
        ++joint[static_cast<std::int64_t>(a) * q.num_communities() + b];
    }

    const Scalar scale = 1.0 / n;
    auto entropy_term = [scale](std::int64_t count) {
        const Scalar f = count * scale;
        return -f * std::log(f);
    };
    Scalar h_p = 0.0, h_q = 0.0, h_joint = 0.0;
    for (const auto c : p_counts) h_p += entropy_term(c);
    for (const auto c : q_counts) h_q += entropy_term(c);
    for (const auto& [key, c] : joint) h_joint += entropy_term(c);

    if (h_joint <= 0.0) return 0.0;  // both partitions trivial
    const Scalar value = (2.0 * h_joint - h_p - h_q) / h_joint;
    return std::clamp(value, 0.0, 1.0);
}

std::vector<int> sample_without_replacement(int n, int k, std::uint64_t seed) {
    if (k > n) throw ConfigError("sample_without_replacement: k > n");
    std::vector<int> indices(static_cast<std::size_t>(n));
    std::iota(indices.begin(), indices.end(), 0);
    rng::Engine engine = seed;
    for (int i = 0; i < k; ++i) {
        const auto j = i + static_cast<int>(rng::bounded(engine, static_cast<std::uint64_t>(n - i)));
        std::swap(indices[static_cast<std::size_t>(i)], indices[static_cast<std::size_t>(j)]);
    }
    indices.resize(static_cast<std::size_t>(k));
    return indices;
}

Scalar ensemble_nvi(const std::vector<Partition>& ensemble, int n_nvi, std::uint64_t seed) {
    if (ensemble.empty()) throw InputError("ensemble_nvi: empty ensemble");
    if (n_nvi < 1) throw ConfigError("ensemble_nvi: n_nvi must be positive");
    const int k = std::min<int>(n_nvi, static_cast<int>(ensemble.size()));
    if (k < 2) return 0.0;

    const auto subset = sample_without_replacement(static_cast<int>(ensemble.size()), k, seed);
    Scalar total = 0.0;
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b)
            total += nvi(ensemble[static_cast<std::size_t>(subset[static_cast<std::size_t>(a)])],
                         ensemble[static_cast<std::size_t>(subset[static_cast<std::size_t>(b)])]);
    return total / (static_cast<Scalar>(k) * (k - 1) / 2.0);
}

Matrix cross_scale_nvi(const std::vector<ScaleResult>& scales) {
    const int s = static_cast<int>(scales.size());
    Matrix cross = Matrix::Zero(s, s);
    for (int i = 0; i < s; ++i)
        for (int j = i + 1; j < s; ++j) {
            const Scalar d = nvi(scales[static_cast<std::size_t>(i)].best_partition,
                                 scales[static_cast<std::size_t>(j)].best_partition);
            cross(i, j) = d;
            cross(j, i) = d;
        }
    return cross;
}

PostprocessReport postprocess(std::vector<ScaleResult>& scales,
                              const std::vector<QualityInstance>& instances) {
    const int s = static_cast<int>(scales.size());
    if (instances.size() != scales.size())
        throw InputError("postprocess: need one quality instance per scale");

    PostprocessReport report;
    for (int pass = 0; pass < s; ++pass) {
        // snapshot so each pass is order-independent
        std::vector<Partition> candidates;
        candidates.reserve(scales.size());
        for (const auto& scale : scales) candidates.push_back(scale.best_partition);

        bool changed = false;
        for (int i = 0; i < s; ++i) {
            auto& scale = scales[static_cast<std::size_t>(i)];
            int best = -1;
            Scalar best_quality = scale.best_quality;
            for (int j = 0; j < s; ++j) {
                if (candidates[static_cast<std::size_t>(j)] == scale.best_partition) continue;
                const Scalar q = evaluate_quality(instances[static_cast<std::size_t>(i)],
                                                  candidates[static_cast<std::size_t>(j)]);
                if (q > best_quality) {
                    best_quality = q;
                    best = j;
                }
            }
            if (best >= 0) {
                scale.best_partition = candidates[static_cast<std::size_t>(best)];
                scale.best_quality = best_quality;
                changed = true;
            }
        }
        ++report.passes;
        if (!changed) {
            report.converged = true;
            break;
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Scale selection
// ---------------------------------------------------------------------------

namespace {

/// Centered window [i - (k-1)/2, i + k/2] clipped to [0, size).
std::pair<int, int> pooling_window(int i, int kernel, int size) {
    const int lo = std::max(0, i - (kernel - 1) / 2);
    const int hi = std::min(size - 1, i + kernel / 2);
    return {lo, hi};
}

}  // namespace

Vector block_nvi_curve(const Matrix& cross_nvi, int kernel_size, int window_size,
                       PoolingMode pooling) {
    const int s = static_cast<int>(cross_nvi.rows());
    if (cross_nvi.cols() != s) throw InputError("block_nvi_curve: matrix is not square");
    if (kernel_size < 1 || window_size < 1)
        throw ConfigError("block_nvi_curve: kernel and window sizes must be >= 1");

    Vector diagonal(s);
    for (int i = 0; i < s; ++i) {
        const auto [lo, hi] = pooling_window(i, kernel_size, s);
        if (pooling == PoolingMode::two_dimensional) {
            diagonal[i] = cross_nvi.block(lo, lo, hi - lo + 1, hi - lo + 1).mean();
        } else {
            Scalar sum = 0.0;
            for (int j = lo; j <= hi; ++j) sum += cross_nvi(j, j);
            diagonal[i] = sum / (hi - lo + 1);
        }
    }

    // triangular moving mean, truncated at the edges
    Vector block(s);
    for (int i = 0; i < s; ++i) {
        Scalar weighted = 0.0, weight = 0.0;
        for (int d = -window_size; d <= window_size; ++d) {
            const int j = i + d;
            if (j < 0 || j >= s) continue;
            const Scalar w = static_cast<Scalar>(window_size + 1 - std::abs(d));
            weighted += w * diagonal[j];
            weight += w;
        }
        block[i] = weighted / weight;
    }
    return block;
}

ScaleSelection select_scales(const Matrix& cross_nvi, const Vector& nvi_per_scale,
                             const ScaleSelectionParams& params) {
    const int s = static_cast<int>(cross_nvi.rows());
    if (nvi_per_scale.size() != s)
        throw InputError("select_scales: NVI(t) length does not match the matrix side");
    if (params.basin_radius < 1) throw ConfigError("select_scales: basin_radius must be >= 1");

    ScaleSelection selection;
    if (s < 3) {
        warn("select_scales: fewer than 3 scales, nothing to select");
        return selection;
    }
    selection.block_nvi =
        block_nvi_curve(cross_nvi, params.kernel_size, params.window_size, params.pooling);
    const Vector& block = selection.block_nvi;

    // strict local minima; plateaus count once at their leftmost index, and
    // an all-flat curve has none
    for (int i = 0; i < s;) {
        int j = i;
        while (j + 1 < s && block[j + 1] == block[i]) ++j;
        const bool left_ok = i == 0 || block[i - 1] > block[i];
        const bool right_ok = j == s - 1 || block[j + 1] > block[j];
        if (left_ok && right_ok && !(i == 0 && j == s - 1)) selection.minima.push_back(i);
        i = j + 1;
    }

    auto argmin_nvi = [&](int lo, int hi) {
        int arg = lo;
        for (int i = lo + 1; i <= hi; ++i)
            if (nvi_per_scale[i] < nvi_per_scale[arg]) arg = i;
        return arg;
    };

    if (selection.minima.empty()) {
        selection.fallback = true;
        selection.selected.push_back(argmin_nvi(0, s - 1));
        warn("select_scales: Block NVI has no local minimum; falling back to the global NVI(t) argmin");
        return selection;
    }

    for (const int minimum : selection.minima) {
        const int lo = std::max(0, minimum - params.basin_radius);
        const int hi = std::min(s - 1, minimum + params.basin_radius);
        selection.selected.push_back(argmin_nvi(lo, hi));
    }
    std::sort(selection.selected.begin(), selection.selected.end());
    selection.selected.erase(std::unique(selection.selected.begin(), selection.selected.end()),
                             selection.selected.end());
    return selection;
}

}  // namespace mstab
