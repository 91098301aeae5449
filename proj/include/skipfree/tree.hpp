#ifndef SKIPFREE_TREE_HPP
#define SKIPFREE_TREE_HPP

#include <vector>

namespace skipfree {

/*
 * Rooted tree over dense node ids 0..N with node 0 as the root.
 * Construction precomputes levels, children lists and a depth-first
 * numbering, so subtree membership is a constant-time interval test.
 */
class Tree {
public:
    Tree() = default;

    /// parent_of[k] is the parent of node k+1 (the root has no entry).
    /// Throws DanglingParent or CycleDetected on malformed input.
    explicit Tree(const std::vector<int>& parent_of);

    int node_count() const { return static_cast<int>(parent_.size()); }
    int depth() const { return static_cast<int>(levels_.size()) - 1; }

    int parent(int node) const { return parent_[node]; }  // -1 for the root
    int level(int node) const { return level_[node]; }
    const std::vector<int>& children(int node) const { return children_[node]; }
    const std::vector<int>& level_nodes(int l) const { return levels_[l]; }
    bool is_terminal(int node) const { return children_[node].empty(); }

    /// j in D(i): proper-descendant test.
    bool is_descendant(int i, int j) const {
        return dfs_in_[i] < dfs_in_[j] && dfs_in_[j] < dfs_out_[i];
    }

    /// j in T(k) = {k} plus D(k).
    bool in_subtree(int k, int j) const {
        return dfs_in_[k] <= dfs_in_[j] && dfs_in_[j] < dfs_out_[k];
    }

    /// Path from i to a descendant j, excluding i and including j, ordered
    /// from the child of i down to j. Throws NotDescendant if j is not in D(i).
    std::vector<int> path(int i, int j) const;

    /// Nodes in depth-first order, root first, children visited in id order.
    const std::vector<int>& dfs_order() const { return dfs_order_; }

    /// Serialized parent list (entry k = parent of node k+1), as fed to the constructor.
    std::vector<int> parent_list() const;

    /// True when every non-root node's parent is its predecessor, i.e. a path 0-1-...-N.
    bool is_chain() const;

    bool operator==(const Tree& other) const { return parent_ == other.parent_; }

private:
    std::vector<int> parent_;
    std::vector<std::vector<int>> children_;
    std::vector<int> level_;
    std::vector<std::vector<int>> levels_;
    std::vector<int> dfs_in_;
    std::vector<int> dfs_out_;
    std::vector<int> dfs_order_;
};

}  // namespace skipfree

#endif
