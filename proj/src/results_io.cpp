#include "mstab/pipeline.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace mstab {

namespace {

using nlohmann::json;

constexpr const char* kScanFormat = "mstab-scan";
constexpr const char* kBenchmarkFormat = "mstab-benchmark";
constexpr int kSchemaVersion = 1;

std::string pooling_name(PoolingMode mode) {
    return mode == PoolingMode::two_dimensional ? "2d" : "1d";
}

PoolingMode parse_pooling(const std::string& name) {
    if (name == "2d") return PoolingMode::two_dimensional;
    if (name == "1d") return PoolingMode::one_dimensional;
    throw InputError("results file: unknown pooling mode '" + name + "'");
}

json config_to_json(const ScanConfig& config) {
    json j;
    j["constructor"] = config.constructor;
    j["min_scale"] = config.min_scale;
    j["max_scale"] = config.max_scale;
    j["n_scale"] = config.n_scale;
    j["n_tries"] = config.n_tries;
    j["n_nvi"] = config.n_nvi;
    j["kernel_size"] = config.kernel_size;
    j["window_size"] = config.window_size;
    j["basin_radius"] = config.basin_radius;
    j["seed"] = config.seed;
    j["with_postprocessing"] = config.with_postprocessing;
    j["with_scale_selection"] = config.with_scale_selection;
    j["pooling"] = pooling_name(config.pooling);
    j["teleportation_lambda"] = config.constructor_options.teleportation_lambda;
    j["exp_dense_threshold"] = config.constructor_options.exp_dense_threshold;
    j["combinatorial_rescale"] = config.constructor_options.combinatorial_rescale;
    return j;
}

ScanConfig config_from_json(const json& j) {
    ScanConfig config;
    config.constructor = j.at("constructor").get<std::string>();
    config.min_scale = j.at("min_scale").get<Scalar>();
    config.max_scale = j.at("max_scale").get<Scalar>();
    config.n_scale = j.at("n_scale").get<int>();
    config.n_tries = j.at("n_tries").get<int>();
    config.n_nvi = j.at("n_nvi").get<int>();
    config.kernel_size = j.at("kernel_size").get<int>();
    config.window_size = j.at("window_size").get<int>();
    config.basin_radius = j.at("basin_radius").get<int>();
    config.seed = j.at("seed").get<std::uint64_t>();
    config.with_postprocessing = j.at("with_postprocessing").get<bool>();
    config.with_scale_selection = j.at("with_scale_selection").get<bool>();
    config.pooling = parse_pooling(j.at("pooling").get<std::string>());
    config.constructor_options.teleportation_lambda = j.at("teleportation_lambda").get<Scalar>();
    config.constructor_options.exp_dense_threshold = j.at("exp_dense_threshold").get<int>();
    config.constructor_options.combinatorial_rescale = j.at("combinatorial_rescale").get<bool>();
    return config;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& rows) {
    const auto n_rows = static_cast<Eigen::Index>(rows.size());
    if (n_rows == 0) return Matrix();
    const auto n_cols = static_cast<Eigen::Index>(rows.at(0).size());
    Matrix m(n_rows, n_cols);
    for (Eigen::Index i = 0; i < n_rows; ++i)
        for (Eigen::Index j = 0; j < n_cols; ++j)
            m(i, j) = rows.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(j)).get<Scalar>();
    return m;
}

json vector_to_json(const Vector& v) {
    json array = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) array.push_back(v[i]);
    return array;
}

Vector vector_from_json(const json& array) {
    Vector v(static_cast<Eigen::Index>(array.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = array.at(static_cast<std::size_t>(i)).get<Scalar>();
    return v;
}

void check_envelope(const json& root, const char* format) {
    if (!root.is_object() || !root.contains("format") || !root.contains("version"))
        throw InputError("results file: missing format/version envelope");
    if (!root.at("format").is_string() || root.at("format").get<std::string>() != format)
        throw InputError("results file: format is " + root.at("format").dump() + ", expected '" +
                         format + "'");
    if (!root.at("version").is_number_integer() ||
        root.at("version").get<int>() != kSchemaVersion)
        throw InputError("results file: schema version " + root.at("version").dump() +
                         " is not supported (expected " + std::to_string(kSchemaVersion) + ")");
}

}  // namespace

std::string results_to_json(const ScanResult& result) {
    json root;
    root["format"] = kScanFormat;
    root["version"] = kSchemaVersion;
    root["config"] = config_to_json(result.config);

    json scales = json::array();
    for (const auto& scale : result.scales) {
        json s;
        s["t"] = scale.scale;
        s["log10_t"] = scale.log_scale;
        s["nvi"] = scale.nvi;
        s["best_quality"] = scale.best_quality;
        s["n_communities"] = scale.best_partition.num_communities();
        s["best_partition"] = scale.best_partition.labels();
        scales.push_back(std::move(s));
    }
    root["scales"] = std::move(scales);
    root["cross_nvi"] = matrix_to_json(result.cross_nvi);
    root["block_nvi"] = vector_to_json(result.selection.block_nvi);
    root["selected_scales"] = result.selection.selected;
    root["selection_minima"] = result.selection.minima;
    root["selection_fallback"] = result.selection.fallback;
    root["postprocess_passes"] = result.postprocess_report.passes;
    root["postprocess_converged"] = result.postprocess_report.converged;
    return root.dump(2) + "\n";
}

ScanResult results_from_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const std::exception& e) {
        throw InputError(std::string("results file: corrupt JSON: ") + e.what());
    }
    check_envelope(root, kScanFormat);

    try {
        ScanResult result;
        result.config = config_from_json(root.at("config"));
        for (const auto& s : root.at("scales")) {
            ScaleResult scale;
            scale.scale = s.at("t").get<Scalar>();
            scale.log_scale = s.at("log10_t").get<Scalar>();
            scale.nvi = s.at("nvi").get<Scalar>();
            scale.best_quality = s.at("best_quality").get<Scalar>();
            scale.best_partition = Partition(s.at("best_partition").get<std::vector<int>>());
            result.scales.push_back(std::move(scale));
        }
        result.cross_nvi = matrix_from_json(root.at("cross_nvi"));
        result.selection.block_nvi = vector_from_json(root.at("block_nvi"));
        result.selection.selected = root.at("selected_scales").get<std::vector<int>>();
        result.selection.minima = root.at("selection_minima").get<std::vector<int>>();
        result.selection.fallback = root.at("selection_fallback").get<bool>();
        result.postprocess_report.passes = root.at("postprocess_passes").get<int>();
        result.postprocess_report.converged = root.at("postprocess_converged").get<bool>();
        return result;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw InputError(std::string("results file: corrupt content: ") + e.what());
    }
}

void save_results(const ScanResult& result, const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw InputError("cannot open '" + path + "' for writing");
    file << results_to_json(result);
}

ScanResult load_results(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw InputError("cannot open results file '" + path + "'");
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return results_from_json(buffer.str());
}

std::string benchmark_to_json(const BenchmarkReport& report) {
    json root;
    root["format"] = kBenchmarkFormat;
    root["version"] = kSchemaVersion;
    root["constructor"] = report.config.constructor;
    root["runs_per_scale"] = report.config.runs_per_scale;
    root["n_scales"] = report.config.n_scales;
    root["seed"] = report.config.seed;
    json entries = json::array();
    for (const auto& entry : report.entries) {
        json e;
        e["n_nodes"] = entry.n_nodes;
        e["n_edges"] = entry.n_edges;
        e["constructor_seconds"] = entry.constructor_seconds;
        e["exp_seconds"] = entry.exp_seconds;
        e["louvain_seconds"] = entry.louvain_seconds;
        e["nvi_seconds"] = entry.nvi_seconds;
        e["postprocess_seconds"] = entry.postprocess_seconds;
        entries.push_back(std::move(e));
    }
    root["entries"] = std::move(entries);
    if (report.entries.size() >= 2) root["louvain_slope"] = louvain_scaling_slope(report);
    return root.dump(2) + "\n";
}

void save_benchmark(const BenchmarkReport& report, const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw InputError("cannot open '" + path + "' for writing");
    file << benchmark_to_json(report);
}

}  // namespace mstab
