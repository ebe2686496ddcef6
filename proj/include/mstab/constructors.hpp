#pragma once

#include "mstab/graph.hpp"
#include "mstab/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <variant>

namespace mstab {

/// Low-rank reference term subtracted from the similarity matrix. The columns
/// of `vector_pairs` hold v_1 .. v_2m; the subtracted matrix is
/// sum_k v_{2k-1} v_{2k}^T. `global_shift` is a partition-independent additive
/// constant carried so reported quality values stay comparable across kinds.
struct NullModel {
    Matrix vector_pairs;  // N x 2m
    Scalar global_shift = 0.0;

    int rank() const { return static_cast<int>(vector_pairs.cols()) / 2; }
};

/// Node similarity matrix. Exponential kinds store a dense matrix; linearized
/// kinds stay sparse. The sparse form may carry a rank-one completion
/// left * right^T (used to keep the teleportation term of the directed
/// linearized kind out of the sparse pattern), so the represented matrix is
/// always `stored + completion`.
class SimilarityMatrix {
public:
    explicit SimilarityMatrix(Matrix dense) : storage_(std::move(dense)) {}
    explicit SimilarityMatrix(SpMatrix sparse) : storage_(std::move(sparse)) {}
    SimilarityMatrix(SpMatrix sparse, Vector left, Vector right)
        : storage_(std::move(sparse)), left_(std::move(left)), right_(std::move(right)) {}

    bool is_dense() const { return std::holds_alternative<Matrix>(storage_); }
    const Matrix& dense() const { return std::get<Matrix>(storage_); }
    const SpMatrix& sparse() const { return std::get<SpMatrix>(storage_); }

    bool has_completion() const { return left_.size() > 0; }
    const Vector& completion_left() const { return left_; }
    const Vector& completion_right() const { return right_; }

    int size() const {
        return is_dense() ? static_cast<int>(dense().rows()) : static_cast<int>(sparse().rows());
    }

    /// Total mass including the completion.
    Scalar sum() const {
        Scalar total = is_dense() ? dense().sum() : sparse().sum();
        if (has_completion()) total += left_.sum() * right_.sum();
        return total;
    }

private:
    std::variant<Matrix, SpMatrix> storage_;
    Vector left_, right_;
};

/// One scale's optimization problem: similarity matrix F(t) plus null model.
struct QualityInstance {
    Scalar scale = 0.0;
    SimilarityMatrix similarity;
    NullModel null_model;

    int num_nodes() const { return similarity.size(); }
};

enum class ConstructorKind {
    continuous_normalized,    // heat kernel of the random-walk Laplacian
    continuous_combinatorial, // heat kernel of the combinatorial Laplacian
    linearized,               // modularity with resolution parameter
    directed,                 // teleporting walk, full exponential
    linearized_directed,      // teleporting walk, first order in t
    signed_constructor,       // signed normalized Laplacian exponential
    signed_modularity,        // signed modularity with resolution
};

std::string to_string(ConstructorKind kind);
std::optional<ConstructorKind> parse_constructor_kind(const std::string& name);

struct ConstructorOptions {
    Scalar teleportation_lambda = 0.85;
    int exp_dense_threshold = 2048;  // exponential kinds refuse larger graphs
    bool combinatorial_rescale = true;
};

/// Wall-time spent in the matrix exponential, for the benchmark harness.
struct BuildStats {
    double exp_seconds = 0.0;
};

QualityInstance build(ConstructorKind kind, const Graph& graph, Scalar t,
                      const ConstructorOptions& options = {}, BuildStats* stats = nullptr);

/// Builds by name: the seven built-in kinds or a registered custom
/// constructor. Custom results are validated against the instance invariants.
QualityInstance build(const std::string& kind_name, const Graph& graph, Scalar t,
                      const ConstructorOptions& options = {}, BuildStats* stats = nullptr);

using ConstructorFactory =
    std::function<QualityInstance(const Graph&, Scalar, const ConstructorOptions&)>;

struct Registration {
    std::string name;
};

/// Registers a custom constructor under an unused, non-builtin name.
/// Registration happens before scans start; lookups are lock-free afterwards.
Registration register_constructor(const std::string& name, ConstructorFactory factory);

bool is_registered_constructor(const std::string& name);

/// Checks the structural invariants of an instance (square N x N similarity,
/// finite entries, paired null vectors of matching length).
void validate_instance(const QualityInstance& instance, int n_nodes);

}  // namespace mstab
