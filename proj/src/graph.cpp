#include "mstab/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace mstab {

namespace {

std::string format_double(Scalar v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

Graph Graph::from_edges(int n_nodes, const std::vector<Edge>& edges, bool directed) {
    if (n_nodes < 0) throw InputError("Graph: negative node count");

    // Duplicate (source, target) pairs are summed. For undirected graphs the
    // key is the unordered pair.
    std::map<std::pair<int, int>, Scalar> merged;
    for (const auto& e : edges) {
        if (e.source < 0 || e.target < 0 || e.source >= n_nodes || e.target >= n_nodes)
            throw InputError("Graph: node index out of range [0, " + std::to_string(n_nodes) + ")");
        if (!std::isfinite(e.weight)) throw InputError("Graph: non-finite edge weight");
        auto key = (!directed && e.source > e.target) ? std::make_pair(e.target, e.source)
                                                      : std::make_pair(e.source, e.target);
        merged[key] += e.weight;
    }

    Graph g;
    g.n_nodes_ = n_nodes;
    g.directed_ = directed;
    for (const auto& [key, w] : merged) {
        if (w == 0.0) continue;  // cancelled out
        if (w < 0.0) g.signed_ = true;
        g.arcs_.push_back({key.first, key.second, w});
        ++g.n_edges_;
        if (!directed && key.first != key.second)
            g.arcs_.push_back({key.second, key.first, w});
    }
    std::sort(g.arcs_.begin(), g.arcs_.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.source, a.target) < std::tie(b.source, b.target);
    });

    std::vector<Triplet> triplets;
    triplets.reserve(g.arcs_.size());
    for (const auto& a : g.arcs_) triplets.emplace_back(a.source, a.target, a.weight);
    g.adjacency_.resize(n_nodes, n_nodes);
    g.adjacency_.setFromTriplets(triplets.begin(), triplets.end());
    g.adjacency_.makeCompressed();
    return g;
}

Degrees degrees(const Graph& graph) {
    const int n = graph.num_nodes();
    Degrees d{Vector::Zero(n), Vector::Zero(n), Vector::Zero(n)};
    for (const auto& a : graph.arcs()) {
        d.out_strength[a.source] += a.weight;
        d.in_strength[a.target] += a.weight;
        d.abs_strength[a.source] += std::abs(a.weight);
    }
    return d;
}

std::vector<std::vector<int>> connected_components(const Graph& graph) {
    const int n = graph.num_nodes();
    std::vector<std::vector<int>> neighbors(static_cast<std::size_t>(n));
    for (const auto& a : graph.arcs()) {
        neighbors[static_cast<std::size_t>(a.source)].push_back(a.target);
        neighbors[static_cast<std::size_t>(a.target)].push_back(a.source);
    }

    std::vector<std::vector<int>> components;
    std::vector<char> visited(static_cast<std::size_t>(n), 0);
    std::vector<int> stack;
    for (int start = 0; start < n; ++start) {
        if (visited[static_cast<std::size_t>(start)]) continue;
        std::vector<int> comp;
        stack.push_back(start);
        visited[static_cast<std::size_t>(start)] = 1;
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            comp.push_back(u);
            for (int v : neighbors[static_cast<std::size_t>(u)]) {
                if (!visited[static_cast<std::size_t>(v)]) {
                    visited[static_cast<std::size_t>(v)] = 1;
                    stack.push_back(v);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
    }
    return components;
}

// ---------------------------------------------------------------------------
// Edge-list CSV
// ---------------------------------------------------------------------------

namespace {

struct RawEdge {
    int source;
    int target;
    Scalar weight;
};

[[noreturn]] void parse_fail(int line_no, const std::string& what) {
    throw InputError("edge list, line " + std::to_string(line_no) + ": " + what);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

int parse_index(std::string_view field, int line_no) {
    field = trim(field);
    int value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        parse_fail(line_no, "cannot parse node index '" + std::string(field) + "'");
    if (value < 0) parse_fail(line_no, "negative node index");
    return value;
}

Scalar parse_weight(std::string_view field, int line_no) {
    field = trim(field);
    Scalar value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        parse_fail(line_no, "cannot parse weight '" + std::string(field) + "'");
    if (!std::isfinite(value)) parse_fail(line_no, "non-finite weight");
    return value;
}

/// `nodes=<N> [directed=<bool>]`, whitespace separated.
bool try_parse_header(std::string_view line, int line_no, int& n_nodes, std::optional<bool>& directed) {
    if (line.find("nodes=") == std::string_view::npos) return false;
    std::istringstream stream{std::string(line)};
    std::string token;
    while (stream >> token) {
        if (token.rfind("nodes=", 0) == 0) {
            n_nodes = parse_index(std::string_view(token).substr(6), line_no);
        } else if (token.rfind("directed=", 0) == 0) {
            const std::string v = token.substr(9);
            if (v == "true" || v == "1")
                directed = true;
            else if (v == "false" || v == "0")
                directed = false;
            else
                parse_fail(line_no, "directed flag must be true or false");
        } else {
            parse_fail(line_no, "unknown header token '" + token + "'");
        }
    }
    return true;
}

}  // namespace

Graph parse_edge_list(const std::string& text) {
    std::vector<RawEdge> raw;
    int header_nodes = -1;
    std::optional<bool> header_directed;
    bool saw_header = false;
    bool saw_edge = false;

    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const std::string_view sv = trim(line);
        if (sv.empty() || sv.front() == '#') continue;
        if (!saw_header && !saw_edge && try_parse_header(sv, line_no, header_nodes, header_directed)) {
            saw_header = true;
            continue;
        }
        saw_edge = true;

        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = sv.find(',', start);
            fields.push_back(sv.substr(start, comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (fields.size() < 2 || fields.size() > 3)
            parse_fail(line_no, "expected 'source,target[,weight]'");
        RawEdge e;
        e.source = parse_index(fields[0], line_no);
        e.target = parse_index(fields[1], line_no);
        e.weight = fields.size() == 3 ? parse_weight(fields[2], line_no) : 1.0;
        raw.push_back(e);
    }

    int n_nodes = header_nodes;
    if (n_nodes < 0) {
        int max_index = -1;
        for (const auto& e : raw) max_index = std::max({max_index, e.source, e.target});
        n_nodes = max_index + 1;
    }

    // Sum duplicates on ordered pairs first, then resolve orientation.
    std::map<std::pair<int, int>, Scalar> ordered;
    for (const auto& e : raw) ordered[{e.source, e.target}] += e.weight;

    bool directed;
    std::vector<Edge> edges;
    if (header_directed.has_value() && *header_directed) {
        directed = true;
        for (const auto& [key, w] : ordered) edges.push_back({key.first, key.second, w});
    } else {
        // Undirected reading: a pair listed in both orientations with equal
        // weight is one edge of that weight; a pair listed once is mirrored.
        // Conflicting orientations fall back to a directed graph unless the
        // header pinned directed=false, in which case they are an error.
        bool conflict = false;
        std::map<std::pair<int, int>, Scalar> unordered;
        for (const auto& [key, w] : ordered) {
            auto [lo, hi] = std::minmax(key.first, key.second);
            auto it = unordered.find({lo, hi});
            if (it == unordered.end())
                unordered[{lo, hi}] = w;
            else if (it->second != w)
                conflict = true;
        }
        if (!conflict) {
            directed = false;
            for (const auto& [key, w] : unordered) edges.push_back({key.first, key.second, w});
        } else if (header_directed.has_value()) {
            throw InputError("edge list: directed=false but orientations carry different weights");
        } else {
            directed = true;
            for (const auto& [key, w] : ordered) edges.push_back({key.first, key.second, w});
        }
    }

    return Graph::from_edges(n_nodes, edges, directed);
}

std::string format_edge_list(const Graph& graph) {
    std::string out = "nodes=" + std::to_string(graph.num_nodes()) +
                      " directed=" + (graph.directed() ? "true" : "false") + "\n";
    for (const auto& a : graph.arcs()) {
        if (!graph.directed() && a.source > a.target) continue;
        out += std::to_string(a.source) + "," + std::to_string(a.target) + "," + format_double(a.weight) + "\n";
    }
    return out;
}

Graph load_graph(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw InputError("cannot open graph file '" + path + "'");
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return parse_edge_list(buffer.str());
}

void save_graph(const Graph& graph, const std::string& path) {
    std::ofstream file(path);
    if (!file) throw InputError("cannot open '" + path + "' for writing");
    file << format_edge_list(graph);
}

// ---------------------------------------------------------------------------
// Multiscale SBM
// ---------------------------------------------------------------------------

SbmProbabilities default_sbm_probabilities(int n_nodes, const std::vector<int>& block_counts) {
    // The expected number of neighbors gained at each level decays
    // geometrically from 8 with ratio 1.6; the expected external degree is
    // 0.5 so the coarsest level stays well separated from the background.
    SbmProbabilities probs;
    Scalar level_degree = 8.0;
    int prev_size = 1;
    for (int count : block_counts) {
        const int size = n_nodes / count;
        const int gained = size - prev_size;
        probs.p_levels.push_back(std::min(1.0, level_degree / std::max(1, gained)));
        level_degree /= 1.6;
        prev_size = size;
    }
    const int outside = n_nodes - prev_size;
    probs.p_out = outside > 0 ? 0.5 / outside : 0.0;
    return probs;
}

std::pair<Graph, GroundTruth> multiscale_sbm(int n_nodes, const std::vector<int>& block_counts,
                                             const std::vector<Scalar>& p_levels, Scalar p_out,
                                             std::uint64_t seed) {
    if (n_nodes <= 0) throw ConfigError("multiscale_sbm: n_nodes must be positive");
    if (block_counts.empty()) throw ConfigError("multiscale_sbm: no levels given");
    if (p_levels.size() != block_counts.size())
        throw ConfigError("multiscale_sbm: need one probability per level");
    for (std::size_t i = 0; i < block_counts.size(); ++i) {
        const int count = block_counts[i];
        if (count <= 0 || n_nodes % count != 0)
            throw ConfigError("multiscale_sbm: block count " + std::to_string(count) +
                              " does not divide n_nodes");
        if (i > 0) {
            if (count >= block_counts[i - 1])
                throw ConfigError("multiscale_sbm: block counts must be strictly decreasing");
            if (block_counts[i - 1] % count != 0)
                throw ConfigError("multiscale_sbm: block counts must nest (consecutive counts divide)");
        }
    }
    auto check_prob = [](Scalar p) {
        if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("multiscale_sbm: probability outside [0,1]");
    };
    for (Scalar p : p_levels) check_prob(p);
    check_prob(p_out);

    const int n_levels = static_cast<int>(block_counts.size());
    std::vector<int> block_size(static_cast<std::size_t>(n_levels));
    for (int l = 0; l < n_levels; ++l)
        block_size[static_cast<std::size_t>(l)] = n_nodes / block_counts[static_cast<std::size_t>(l)];

    rng::Engine state = seed;
    std::vector<Edge> edges;
    for (int i = 0; i < n_nodes; ++i) {
        for (int j = i + 1; j < n_nodes; ++j) {
            Scalar p = p_out;
            for (int l = 0; l < n_levels; ++l) {
                const int size = block_size[static_cast<std::size_t>(l)];
                if (i / size == j / size) {
                    p = p_levels[static_cast<std::size_t>(l)];
                    break;
                }
            }
            if (rng::canonical(state) < p) edges.push_back({i, j, 1.0});
        }
    }

    GroundTruth truth;
    for (int l = 0; l < n_levels; ++l) {
        std::vector<int> labels(static_cast<std::size_t>(n_nodes));
        for (int i = 0; i < n_nodes; ++i)
            labels[static_cast<std::size_t>(i)] = i / block_size[static_cast<std::size_t>(l)];
        truth.levels.emplace_back(std::move(labels));
    }

    return {Graph::from_edges(n_nodes, edges, /*directed=*/false), std::move(truth)};
}

void save_ground_truth(const GroundTruth& truth, const std::string& path) {
    std::ofstream file(path);
    if (!file) throw InputError("cannot open '" + path + "' for writing");
    if (truth.levels.empty()) return;
    file << "# node";
    for (std::size_t l = 0; l < truth.levels.size(); ++l) file << ",level" << l;
    file << "\n";
    const int n = truth.levels.front().num_nodes();
    for (int i = 0; i < n; ++i) {
        file << i;
        for (const auto& level : truth.levels) file << "," << level[i];
        file << "\n";
    }
}

}  // namespace mstab
