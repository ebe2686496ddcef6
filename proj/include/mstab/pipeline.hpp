#pragma once

#include "mstab/analysis.hpp"
#include "mstab/constructors.hpp"
#include "mstab/graph.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mstab {

/// Full scan configuration. Selection parameters left at 0 are derived from
/// n_scale (0.1, 0.1 and 0.01 of it, rounded half-up with a floor of 1).
struct ScanConfig {
    std::string constructor = "linearized";
    Scalar min_scale = -2.0;  // log10 of the smallest scale
    Scalar max_scale = 0.5;   // log10 of the largest scale
    int n_scale = 20;
    int n_tries = 100;
    int n_nvi = 20;
    int kernel_size = 0;
    int window_size = 0;
    int basin_radius = 0;
    std::uint64_t seed = 42;
    bool with_postprocessing = true;
    bool with_scale_selection = true;
    PoolingMode pooling = PoolingMode::two_dimensional;
    int n_workers = 0;  // 0 = available parallelism
    ConstructorOptions constructor_options;

    ScaleSelectionParams resolved_selection_params() const;
};

void validate(const ScanConfig& config);

/// Log-equidistant grid t_i = 10^(min_scale + i * step), both ends inclusive.
std::vector<Scalar> scale_grid(const ScanConfig& config);

struct ScanResult {
    ScanConfig config;
    std::vector<ScaleResult> scales;
    Matrix cross_nvi;
    ScaleSelection selection;
    PostprocessReport postprocess_report;
};

/// End-to-end scan: per-scale quality instances, a seeded Louvain ensemble of
/// n_tries runs each, ensemble NVI(t), cross-scale NVI, post-processing and
/// scale selection. Louvain run (s, r) uses seed + s * n_tries + r, so the
/// result is fully deterministic for a fixed config.
ScanResult run_scan(const Graph& graph, const ScanConfig& config);

// ---------------------------------------------------------------------------
// Persistence: versioned JSON, lossless for every float field.
// Ensembles are not persisted, only per-scale best partitions.
// ---------------------------------------------------------------------------

std::string results_to_json(const ScanResult& result);
ScanResult results_from_json(const std::string& text);
void save_results(const ScanResult& result, const std::string& path);
ScanResult load_results(const std::string& path);

// ---------------------------------------------------------------------------
// Benchmark harness
// ---------------------------------------------------------------------------

struct BenchmarkConfig {
    std::string constructor = "linearized";
    std::vector<int> sizes;  // node counts, ascending, divisible by 90
    int runs_per_scale = 50;
    int n_scales = 10;
    Scalar min_scale = -2.0;
    Scalar max_scale = 0.5;
    std::uint64_t seed = 42;
    ConstructorOptions constructor_options;
};

struct BenchmarkEntry {
    int n_nodes = 0;
    std::int64_t n_edges = 0;
    double constructor_seconds = 0.0;
    double exp_seconds = 0.0;
    double louvain_seconds = 0.0;
    double nvi_seconds = 0.0;
    double postprocess_seconds = 0.0;
};

struct BenchmarkReport {
    BenchmarkConfig config;
    std::vector<BenchmarkEntry> entries;
};

/// Times each pipeline stage on nested SBM graphs of growing size at constant
/// expected degree. Single worker throughout.
BenchmarkReport run_benchmark(const BenchmarkConfig& config);

/// Least-squares slope of log(louvain time) against log(edge count).
/// Requires at least two entries.
Scalar louvain_scaling_slope(const BenchmarkReport& report);

std::string benchmark_to_json(const BenchmarkReport& report);
void save_benchmark(const BenchmarkReport& report, const std::string& path);

}  // namespace mstab
