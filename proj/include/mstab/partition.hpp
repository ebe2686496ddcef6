#pragma once

#include "mstab/types.hpp"

#include <vector>

namespace mstab {

/// Hard assignment of N nodes to c communities. Labels are canonicalized to
/// 0..c-1 in order of first appearance, and every label is used.
class Partition {
public:
    Partition() = default;

    explicit Partition(std::vector<int> labels) : labels_(std::move(labels)) {
        canonicalize();
    }

    static Partition singletons(int n_nodes) {
        std::vector<int> labels(static_cast<std::size_t>(n_nodes));
        for (int i = 0; i < n_nodes; ++i) labels[static_cast<std::size_t>(i)] = i;
        return Partition(std::move(labels));
    }

    static Partition all_in_one(int n_nodes) {
        return Partition(std::vector<int>(static_cast<std::size_t>(n_nodes), 0));
    }

    int num_nodes() const { return static_cast<int>(labels_.size()); }
    int num_communities() const { return n_communities_; }
    const std::vector<int>& labels() const { return labels_; }
    int operator[](int node) const { return labels_[static_cast<std::size_t>(node)]; }

    /// Nodes grouped by community, communities in label order.
    std::vector<std::vector<int>> communities() const {
        std::vector<std::vector<int>> groups(static_cast<std::size_t>(n_communities_));
        for (int i = 0; i < num_nodes(); ++i)
            groups[static_cast<std::size_t>(labels_[static_cast<std::size_t>(i)])].push_back(i);
        return groups;
    }

    bool operator==(const Partition& other) const { return labels_ == other.labels_; }
    bool operator!=(const Partition& other) const { return !(*this == other); }

private:
    void canonicalize() {
        std::vector<int> remap;
        std::vector<int> seen;  // seen[old_label] = new label + 1, 0 = unseen
        int next = 0;
        for (auto& l : labels_) {
            if (l < 0) throw InputError("Partition: negative community label");
            if (static_cast<std::size_t>(l) >= seen.size()) seen.resize(static_cast<std::size_t>(l) + 1, 0);
            if (seen[static_cast<std::size_t>(l)] == 0) seen[static_cast<std::size_t>(l)] = ++next;
            l = seen[static_cast<std::size_t>(l)] - 1;
        }
        n_communities_ = next;
    }

    std::vector<int> labels_;
    int n_communities_ = 0;
};

}  // namespace mstab
