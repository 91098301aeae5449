#include "skipfree/tree.hpp"

#include <algorithm>

#include "skipfree/errors.hpp"

namespace skipfree {

Tree::Tree(const std::vector<int>& parent_of) {
    const int n = static_cast<int>(parent_of.size()) + 1;
    parent_.assign(n, -1);
    children_.assign(n, {});
    for (int node = 1; node < n; ++node) {
        const int p = parent_of[node - 1];
        if (p < 0 || p >= n) throw DanglingParent(node, p);
        if (p == node) throw CycleDetected(node);
        parent_[node] = p;
        children_[p].push_back(node);
    }
    for (auto& kids : children_) std::sort(kids.begin(), kids.end());

    // Levels by breadth-first pass from the root; nodes never reached sit on a cycle.
    level_.assign(n, -1);
    level_[0] = 0;
    levels_.assign(1, {0});
    std::vector<int> frontier{0};
    int reached = 1;
    while (!frontier.empty()) {
        std::vector<int> next;
        for (int node : frontier) {
            for (int child : children_[node]) {
                level_[child] = level_[node] + 1;
                next.push_back(child);
                ++reached;
            }
        }
        if (!next.empty()) levels_.push_back(next);
        frontier = std::move(next);
    }
    if (reached != n) {
        for (int node = 1; node < n; ++node)
            if (level_[node] < 0) throw CycleDetected(node);
    }

    // Depth-first numbering; subtree of k is the id interval [dfs_in_[k], dfs_out_[k]).
    dfs_in_.assign(n, 0);
    dfs_out_.assign(n, 0);
    dfs_order_.reserve(n);
    int clock = 0;
    std::vector<std::pair<int, bool>> stack{{0, false}};
    while (!stack.empty()) {
        auto [node, done] = stack.back();
        stack.pop_back();
        if (done) {
            dfs_out_[node] = clock;
            continue;
        }
        dfs_in_[node] = clock++;
        dfs_order_.push_back(node);
        stack.emplace_back(node, true);
        const auto& kids = children_[node];
        for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.emplace_back(*it, false);
    }
}

std::vector<int> Tree::path(int i, int j) const {
    if (!is_descendant(i, j)) throw NotDescendant(j, i);
    std::vector<int> nodes;
    for (int node = j; node != i; node = parent_[node]) nodes.push_back(node);
    std::reverse(nodes.begin(), nodes.end());
    return nodes;
}

std::vector<int> Tree::parent_list() const {
    return {parent_.begin() + 1, parent_.end()};
}

bool Tree::is_chain() const {
    for (int node = 1; node < node_count(); ++node)
        if (parent_[node] != node - 1) return false;
    return true;
}

}  // namespace skipfree
