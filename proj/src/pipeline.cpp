#include "mstab/pipeline.hpp"

#include "mstab/parallel.hpp"

#include <chrono>
#include <cmath>

namespace mstab {

namespace {

int derived_size(Scalar fraction, int n_scale) {
    return std::max(1, static_cast<int>(std::llround(fraction * n_scale)));
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

ScaleSelectionParams ScanConfig::resolved_selection_params() const {
    ScaleSelectionParams params;
    params.kernel_size = kernel_size > 0 ? kernel_size : derived_size(0.1, n_scale);
    params.window_size = window_size > 0 ? window_size : derived_size(0.1, n_scale);
    params.basin_radius = basin_radius > 0 ? basin_radius : derived_size(0.01, n_scale);
    params.pooling = pooling;
    return params;
}

void validate(const ScanConfig& config) {
    if (!(config.min_scale < config.max_scale))
        throw ConfigError("scan config: min_scale must be below max_scale");
    if (config.n_scale < 3) throw ConfigError("scan config: n_scale must be at least 3");
    if (config.n_tries < 1) throw ConfigError("scan config: n_tries must be at least 1");
    if (config.n_nvi < 1 || config.n_nvi > config.n_tries)
        throw ConfigError("scan config: need 1 <= n_NVI <= n_tries");
    if (config.kernel_size < 0 || config.window_size < 0 || config.basin_radius < 0)
        throw ConfigError("scan config: selection parameters must be positive (0 = derive)");
    if (config.n_workers < 0) throw ConfigError("scan config: negative worker count");
    if (!(config.constructor_options.teleportation_lambda > 0.0 &&
          config.constructor_options.teleportation_lambda < 1.0))
        throw ConfigError("scan config: teleportation lambda must lie in (0,1)");
}

std::vector<Scalar> scale_grid(const ScanConfig& config) {
    std::vector<Scalar> grid(static_cast<std::size_t>(config.n_scale));
    const Scalar step = (config.max_scale - config.min_scale) / (config.n_scale - 1);
    for (int i = 0; i < config.n_scale; ++i)
        grid[static_cast<std::size_t>(i)] = std::pow(10.0, config.min_scale + i * step);
    return grid;
}

ScanResult run_scan(const Graph& graph, const ScanConfig& config) {
    validate(config);
    const std::vector<Scalar> grid = scale_grid(config);
    const int n_scales = config.n_scale;
    const int n_tries = config.n_tries;

    ScanResult result;
    result.config = config;
    result.config.kernel_size = config.resolved_selection_params().kernel_size;
    result.config.window_size = config.resolved_selection_params().window_size;
    result.config.basin_radius = config.resolved_selection_params().basin_radius;

    // per-scale quality instances; kept alive for post-processing
    std::vector<QualityInstance> instances;
    instances.reserve(static_cast<std::size_t>(n_scales));
    for (const Scalar t : grid)
        instances.push_back(build(config.constructor, graph, t, config.constructor_options));

    std::vector<GeneralizedQualityMatrix> matrices;
    matrices.reserve(instances.size());
    for (const auto& instance : instances) matrices.emplace_back(instance);

    // the Louvain ensemble is one flat job set over (scale, try)
    std::vector<OptimizeResult> runs(static_cast<std::size_t>(n_scales) * n_tries);
    parallel_for(0, n_scales * n_tries, config.n_workers, [&](int job) {
        const int scale_index = job / n_tries;
        const int try_index = job % n_tries;
        const std::uint64_t seed =
            config.seed + static_cast<std::uint64_t>(scale_index) * n_tries + try_index;
        runs[static_cast<std::size_t>(job)] =
            louvain(matrices[static_cast<std::size_t>(scale_index)], seed);
    });

    result.scales.resize(static_cast<std::size_t>(n_scales));
    for (int s = 0; s < n_scales; ++s) {
        auto& scale = result.scales[static_cast<std::size_t>(s)];
        scale.scale = grid[static_cast<std::size_t>(s)];
        scale.log_scale = std::log10(scale.scale);
        scale.ensemble.assign(runs.begin() + static_cast<std::ptrdiff_t>(s) * n_tries,
                              runs.begin() + static_cast<std::ptrdiff_t>(s + 1) * n_tries);

        int best = 0;
        for (int r = 1; r < n_tries; ++r)
            if (scale.ensemble[static_cast<std::size_t>(r)].quality >
                scale.ensemble[static_cast<std::size_t>(best)].quality)
                best = r;
        scale.best_partition = scale.ensemble[static_cast<std::size_t>(best)].partition;
        scale.best_quality =
            evaluate_quality(instances[static_cast<std::size_t>(s)], scale.best_partition);

        std::vector<Partition> partitions;
        partitions.reserve(scale.ensemble.size());
        for (const auto& run : scale.ensemble) partitions.push_back(run.partition);
        const std::uint64_t nvi_seed =
            config.seed + static_cast<std::uint64_t>(n_scales) * n_tries + s;
        scale.nvi = ensemble_nvi(partitions, config.n_nvi, nvi_seed);
    }

    result.cross_nvi = cross_scale_nvi(result.scales);
    if (config.with_postprocessing) {
        result.postprocess_report = postprocess(result.scales, instances);
        result.cross_nvi = cross_scale_nvi(result.scales);
    }

    if (n_scales >= 3) {
        const ScaleSelectionParams params = config.resolved_selection_params();
        if (config.with_scale_selection) {
            Vector nvi_per_scale(n_scales);
            for (int s = 0; s < n_scales; ++s)
                nvi_per_scale[s] = result.scales[static_cast<std::size_t>(s)].nvi;
            result.selection = select_scales(result.cross_nvi, nvi_per_scale, params);
        } else {
            result.selection.block_nvi =
                block_nvi_curve(result.cross_nvi, params.kernel_size, params.window_size,
                                params.pooling);
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Benchmark harness
// ---------------------------------------------------------------------------

BenchmarkReport run_benchmark(const BenchmarkConfig& config) {
    if (config.sizes.empty()) throw ConfigError("benchmark: no sizes given");
    for (std::size_t i = 0; i < config.sizes.size(); ++i) {
        if (config.sizes[i] % 90 != 0)
            throw ConfigError("benchmark: sizes must be divisible by 90 (nested 10/30/90 blocks)");
        if (i > 0 && config.sizes[i] <= config.sizes[i - 1])
            throw ConfigError("benchmark: sizes must be strictly ascending");
    }
    if (config.runs_per_scale < 1 || config.n_scales < 1)
        throw ConfigError("benchmark: runs_per_scale and n_scales must be positive");

    ScanConfig grid_config;
    grid_config.min_scale = config.min_scale;
    grid_config.max_scale = config.max_scale;
    grid_config.n_scale = config.n_scales;
    const std::vector<Scalar> grid = scale_grid(grid_config);

    BenchmarkReport report;
    report.config = config;
    for (const int size : config.sizes) {
        // constant block sizes 10/30/90 and constant expected degree
        const std::vector<int> blocks = {size / 10, size / 30, size / 90};
        const SbmProbabilities probs = default_sbm_probabilities(size, blocks);
        const auto [graph, truth] =
            multiscale_sbm(size, blocks, probs.p_levels, probs.p_out,
                           config.seed + static_cast<std::uint64_t>(size));

        BenchmarkEntry entry;
        entry.n_nodes = size;
        entry.n_edges = graph.num_edges();

        std::vector<QualityInstance> instances;
        instances.reserve(grid.size());
        BuildStats stats;
        auto start = std::chrono::steady_clock::now();
        for (const Scalar t : grid)
            instances.push_back(build(config.constructor, graph, t, config.constructor_options,
                                      &stats));
        entry.constructor_seconds = seconds_since(start) - stats.exp_seconds;
        entry.exp_seconds = stats.exp_seconds;

        std::vector<std::vector<Partition>> partitions(grid.size());
        start = std::chrono::steady_clock::now();
        for (std::size_t s = 0; s < grid.size(); ++s) {
            const GeneralizedQualityMatrix matrix(instances[s]);
            auto& scale_runs = partitions[s];
            scale_runs.reserve(static_cast<std::size_t>(config.runs_per_scale));
            for (int r = 0; r < config.runs_per_scale; ++r) {
                const std::uint64_t seed =
                    config.seed + s * static_cast<std::uint64_t>(config.runs_per_scale) + r;
                scale_runs.push_back(louvain(matrix, seed).partition);
            }
        }
        entry.louvain_seconds = seconds_since(start);

        start = std::chrono::steady_clock::now();
        for (std::size_t s = 0; s < grid.size(); ++s)
            ensemble_nvi(partitions[s], 20, config.seed + s);
        entry.nvi_seconds = seconds_since(start);

        std::vector<ScaleResult> scales(grid.size());
        for (std::size_t s = 0; s < grid.size(); ++s) {
            scales[s].scale = grid[s];
            scales[s].best_partition = partitions[s].front();
            scales[s].best_quality = evaluate_quality(instances[s], partitions[s].front());
        }
        start = std::chrono::steady_clock::now();
        postprocess(scales, instances);
        entry.postprocess_seconds = seconds_since(start);

        report.entries.push_back(entry);
    }
    return report;
}

Scalar louvain_scaling_slope(const BenchmarkReport& report) {
    const int n = static_cast<int>(report.entries.size());
    if (n < 2) throw ConfigError("louvain_scaling_slope: need at least two sizes");
    Scalar sum_x = 0, sum_y = 0, sum_xx = 0, sum_xy = 0;
    for (const auto& entry : report.entries) {
        const Scalar x = std::log(static_cast<Scalar>(entry.n_edges));
        const Scalar y = std::log(entry.louvain_seconds);
        sum_x += x;
        sum_y += y;
        sum_xx += x * x;
        sum_xy += x * y;
    }
    return (n * sum_xy - sum_x * sum_y) / (n * sum_xx - sum_x * sum_x);
}

}  // namespace mstab
