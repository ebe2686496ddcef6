#pragma once

#include "mstab/partition.hpp"
#include "mstab/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mstab {

struct Edge {
    int source = 0;
    int target = 0;
    Scalar weight = 1.0;
};

/// Weighted graph, possibly directed and/or signed. Immutable after
/// construction and safe to share across concurrent readers.
///
/// Internally the arc list is canonical: duplicate (source, target) pairs are
/// summed, arcs are sorted, and undirected graphs store both orientations of
/// every non-loop edge with equal weights. Self-loops are stored once and
/// contribute to strengths once.
class Graph {
public:
    Graph() = default;

    /// Build a graph from raw edges. For undirected graphs each input edge is
    /// one undirected edge; listing both orientations counts as a duplicate of
    /// the same unordered pair and is summed.
    static Graph from_edges(int n_nodes, const std::vector<Edge>& edges, bool directed);

    int num_nodes() const { return n_nodes_; }
    bool directed() const { return directed_; }
    bool is_signed() const { return signed_; }

    /// Canonical arc list (both orientations present when undirected).
    const std::vector<Edge>& arcs() const { return arcs_; }
    std::int64_t num_arcs() const { return static_cast<std::int64_t>(arcs_.size()); }

    /// Edge count: unordered pairs plus self-loops for undirected graphs,
    /// arcs for directed ones.
    std::int64_t num_edges() const { return n_edges_; }

    /// Sparse adjacency A, row = source. Built at construction.
    const SpMatrix& adjacency() const { return adjacency_; }

private:
    int n_nodes_ = 0;
    bool directed_ = false;
    bool signed_ = false;
    std::int64_t n_edges_ = 0;
    std::vector<Edge> arcs_;
    SpMatrix adjacency_;
};

struct Degrees {
    Vector out_strength;  // signed sums of outgoing weights
    Vector in_strength;   // signed sums of incoming weights
    Vector abs_strength;  // sums of |weight| over incident arcs
};

Degrees degrees(const Graph& graph);

/// Weakly connected components on the undirected, unsigned skeleton.
/// Components are sorted by smallest member; members ascend.
std::vector<std::vector<int>> connected_components(const Graph& graph);

// ---------------------------------------------------------------------------
// Edge-list CSV: one `source,target[,weight]` per line, `#` comments ignored,
// optional leading header `nodes=<N> directed=<bool>`.
// ---------------------------------------------------------------------------

Graph load_graph(const std::string& path);
void save_graph(const Graph& graph, const std::string& path);

// in-memory variants used by the file API and handy in tests
Graph parse_edge_list(const std::string& text);
std::string format_edge_list(const Graph& graph);

// ---------------------------------------------------------------------------
// Multiscale stochastic block model
// ---------------------------------------------------------------------------

/// Planted partitions, ordered finest to coarsest.
struct GroundTruth {
    std::vector<Partition> levels;
};

/// Default edge probabilities for multiscale_sbm: the expected number of
/// neighbors a node gains at each level halves from 8 at the finest level,
/// and the expected external degree is half of the coarsest level's.
struct SbmProbabilities {
    std::vector<Scalar> p_levels;
    Scalar p_out = 0.0;
};
SbmProbabilities default_sbm_probabilities(int n_nodes, const std::vector<int>& block_counts);

/// Undirected, unweighted graph whose pairwise edge probability is set by the
/// finest level at which the two nodes share a block (p_out if none).
/// block_counts are strictly decreasing, consecutive counts divide, and each
/// divides n_nodes, so the planted levels nest. Deterministic per seed.
std::pair<Graph, GroundTruth> multiscale_sbm(int n_nodes, const std::vector<int>& block_counts,
                                             const std::vector<Scalar>& p_levels, Scalar p_out,
                                             std::uint64_t seed);

/// CSV with one row per node: `node,block_level0,block_level1,...`.
void save_ground_truth(const GroundTruth& truth, const std::string& path);

}  // namespace mstab
