#include "mstab/pipeline.hpp"
#include "mstab/plot.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

using namespace mstab;

// exit codes: 0 success, 2 config error, 3 input error, 4 numeric failure

struct RunArgs {
    std::string graph_path;
    std::string out_path = "results.json";
    std::string plot_path;
    std::string pooling = "2d";
    bool no_postprocessing = false;
    bool no_scale_selection = false;
    bool no_combinatorial_rescale = false;
    ScanConfig config;
};

int do_run(const RunArgs& args) {
    RunArgs resolved = args;
    resolved.config.with_postprocessing = !args.no_postprocessing;
    resolved.config.with_scale_selection = !args.no_scale_selection;
    resolved.config.constructor_options.combinatorial_rescale = !args.no_combinatorial_rescale;
    if (args.pooling == "1d")
        resolved.config.pooling = PoolingMode::one_dimensional;
    else if (args.pooling != "2d")
        throw ConfigError("--pooling must be 2d or 1d");

    const Graph graph = load_graph(args.graph_path);
    std::printf("graph: %d nodes, %lld edges, %s%s\n", graph.num_nodes(),
                static_cast<long long>(graph.num_edges()),
                graph.directed() ? "directed" : "undirected", graph.is_signed() ? ", signed" : "");

    const ScanResult result = run_scan(graph, resolved.config);

    std::printf("scanned %d scales x %d tries\n", resolved.config.n_scale,
                resolved.config.n_tries);
    if (result.selection.selected.empty()) {
        std::printf("no scales selected\n");
    } else {
        std::printf("selected scales%s:\n",
                    result.selection.fallback ? " (fallback: global NVI(t) argmin)" : "");
        for (const int index : result.selection.selected) {
            const auto& scale = result.scales[static_cast<std::size_t>(index)];
            std::printf("  #%-3d t=%-10.5g communities=%-5d quality=%-10.5g NVI(t)=%.4f\n", index,
                        scale.scale, scale.best_partition.num_communities(), scale.best_quality,
                        scale.nvi);
        }
    }

    save_results(result, args.out_path);
    std::printf("results written to %s\n", args.out_path.c_str());
    if (!args.plot_path.empty()) {
        plot_summary(result, args.plot_path);
        std::printf("summary plot written to %s\n", args.plot_path.c_str());
    }
    return 0;
}

struct BenchmarkArgs {
    std::string out_path = "benchmark.json";
    std::string plot_path;
    BenchmarkConfig config;
};

int do_benchmark(const BenchmarkArgs& args) {
    const BenchmarkReport report = run_benchmark(args.config);
    std::printf("%8s %10s %12s %12s %12s %12s %12s\n", "nodes", "edges", "constructor",
                "matrix-exp", "louvain", "nvi", "postprocess");
    for (const auto& e : report.entries)
        std::printf("%8d %10lld %12.4f %12.4f %12.4f %12.4f %12.4f\n", e.n_nodes,
                    static_cast<long long>(e.n_edges), e.constructor_seconds, e.exp_seconds,
                    e.louvain_seconds, e.nvi_seconds, e.postprocess_seconds);
    if (report.entries.size() >= 2)
        std::printf("louvain log-log slope vs E: %.3f\n", louvain_scaling_slope(report));
    save_benchmark(report, args.out_path);
    std::printf("report written to %s\n", args.out_path.c_str());
    if (!args.plot_path.empty()) {
        plot_benchmark(report, args.plot_path);
        std::printf("benchmark plot written to %s\n", args.plot_path.c_str());
    }
    return 0;
}

struct SbmArgs {
    int nodes = 270;
    std::vector<int> blocks = {27, 9, 3};
    std::vector<double> p_levels;
    double p_out = -1.0;
    std::uint64_t seed = 42;
    std::string out_path = "graph.csv";
    std::string truth_path;
};

int do_sbm(const SbmArgs& args) {
    SbmProbabilities probs = default_sbm_probabilities(args.nodes, args.blocks);
    if (!args.p_levels.empty()) probs.p_levels = args.p_levels;
    if (args.p_out >= 0.0) probs.p_out = args.p_out;

    const auto [graph, truth] =
        multiscale_sbm(args.nodes, args.blocks, probs.p_levels, probs.p_out, args.seed);
    save_graph(graph, args.out_path);
    std::printf("graph with %d nodes, %lld edges written to %s\n", graph.num_nodes(),
                static_cast<long long>(graph.num_edges()), args.out_path.c_str());
    if (!args.truth_path.empty()) {
        save_ground_truth(truth, args.truth_path);
        std::printf("ground truth (%zu levels) written to %s\n", truth.levels.size(),
                    args.truth_path.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multiscale community detection by generalized Markov Stability"};
    app.require_subcommand(1);

    RunArgs run_args;
    app.set_config("--config")->description(
        "INI file with key=value lines under a [run]/[benchmark]/[sbm] section; "
        "command-line flags take precedence");

    auto* run = app.add_subcommand("run", "scan a graph across scales");
    run->add_option("--graph", run_args.graph_path, "edge-list CSV")->required();
    run->add_option("--constructor", run_args.config.constructor,
                    "continuous_normalized | continuous_combinatorial | linearized | directed | "
                    "linearized_directed | signed | signed_modularity | registered name")
        ->required();
    run->add_option("--min-scale", run_args.config.min_scale, "log10 of the smallest scale");
    run->add_option("--max-scale", run_args.config.max_scale, "log10 of the largest scale");
    run->add_option("--n-scale", run_args.config.n_scale, "number of scales");
    run->add_option("--n-tries", run_args.config.n_tries, "Louvain runs per scale");
    run->add_option("--n-nvi", run_args.config.n_nvi, "ensemble subset for NVI(t)");
    run->add_option("--seed", run_args.config.seed, "base seed");
    run->add_option("--kernel-size", run_args.config.kernel_size, "NVI pooling kernel (0 = auto)");
    run->add_option("--window-size", run_args.config.window_size,
                    "triangular smoothing half-width (0 = auto)");
    run->add_option("--basin-radius", run_args.config.basin_radius, "basin radius (0 = auto)");
    run->add_option("--pooling", run_args.pooling, "2d (pool the matrix) or 1d (diagonal only)");
    run->add_flag("--no-postprocessing", run_args.no_postprocessing,
                  "skip the cross-scale improvement step");
    run->add_flag("--no-scale-selection", run_args.no_scale_selection,
                  "skip automated scale selection");
    run->add_option("--workers", run_args.config.n_workers, "worker pool size (0 = all cores)")
        ->envname("MSTAB_WORKERS");
    run->add_option("--teleportation-lambda",
                    run_args.config.constructor_options.teleportation_lambda,
                    "damping for the directed constructors");
    run->add_option("--exp-dense-threshold",
                    run_args.config.constructor_options.exp_dense_threshold,
                    "largest N the exponential constructors accept");
    run->add_flag("--no-combinatorial-rescale", run_args.no_combinatorial_rescale,
                  "use raw t for the combinatorial constructor");
    run->add_option("--out", run_args.out_path, "results JSON path");
    run->add_option("--plot", run_args.plot_path, "summary SVG path");

    BenchmarkArgs bench_args;
    auto* bench = app.add_subcommand("benchmark", "time pipeline stages on growing SBM graphs");
    bench->add_option("--constructor", bench_args.config.constructor)->required();
    bench->add_option("--sizes", bench_args.config.sizes, "node counts, ascending, multiples of 90")
        ->required()
        ->delimiter(',');
    bench->add_option("--runs-per-scale", bench_args.config.runs_per_scale);
    bench->add_option("--n-scales", bench_args.config.n_scales);
    bench->add_option("--seed", bench_args.config.seed);
    bench->add_option("--out", bench_args.out_path, "report JSON path");
    bench->add_option("--plot", bench_args.plot_path, "log-log timing SVG path");

    SbmArgs sbm_args;
    auto* sbm = app.add_subcommand("sbm", "generate a nested stochastic block model graph");
    sbm->add_option("--nodes", sbm_args.nodes)->required();
    sbm->add_option("--blocks", sbm_args.blocks, "block counts, finest to coarsest")
        ->required()
        ->delimiter(',');
    sbm->add_option("--p-levels", sbm_args.p_levels, "per-level edge probabilities")
        ->delimiter(',');
    sbm->add_option("--p-out", sbm_args.p_out, "background edge probability");
    sbm->add_option("--seed", sbm_args.seed);
    sbm->add_option("--out", sbm_args.out_path, "edge-list CSV path");
    sbm->add_option("--truth", sbm_args.truth_path, "ground-truth CSV path");

    try {
        app.parse(argc, argv);
        if (run->parsed()) return do_run(run_args);
        if (bench->parsed()) return do_benchmark(bench_args);
        if (sbm->parsed()) return do_sbm(sbm_args);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const mstab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const mstab::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 3;
    } catch (const mstab::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
