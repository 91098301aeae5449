#include <algorithm>
#include <vector>

#include "doctest.h"
#include "skipfree/errors.hpp"
#include "skipfree/tree.hpp"

using skipfree::Tree;

TEST_CASE("single node tree") {
    Tree t{std::vector<int>{}};
    CHECK(t.node_count() == 1);
    CHECK(t.depth() == 0);
    CHECK(t.parent(0) == -1);
    CHECK(t.is_terminal(0));
    CHECK(t.is_chain());
    CHECK(t.dfs_order() == std::vector<int>{0});
}

TEST_CASE("chain layout") {
    Tree t({0, 1, 2});
    CHECK(t.node_count() == 4);
    CHECK(t.depth() == 3);
    CHECK(t.is_chain());
    CHECK(t.parent(3) == 2);
    CHECK(t.level(0) == 0);
    CHECK(t.level(3) == 3);
    CHECK(t.children(1) == std::vector<int>{2});
    CHECK(t.is_terminal(3));
    CHECK_FALSE(t.is_terminal(2));
}

TEST_CASE("branching layout") {
    // 0 -> {1, 2}, 1 -> {3, 4}, 2 -> {5}
    Tree t({0, 0, 1, 1, 2});
    CHECK(t.node_count() == 6);
    CHECK(t.depth() == 2);
    CHECK_FALSE(t.is_chain());
    CHECK(t.children(0) == std::vector<int>{1, 2});
    CHECK(t.children(1) == std::vector<int>{3, 4});
    CHECK(t.level_nodes(2) == std::vector<int>{3, 4, 5});

    SUBCASE("descendant tests") {
        CHECK(t.is_descendant(0, 5));
        CHECK(t.is_descendant(1, 4));
        CHECK_FALSE(t.is_descendant(1, 1));
        CHECK_FALSE(t.is_descendant(1, 5));
        CHECK_FALSE(t.is_descendant(3, 1));
        CHECK(t.in_subtree(1, 1));
        CHECK(t.in_subtree(1, 3));
        CHECK_FALSE(t.in_subtree(2, 3));
    }

    SUBCASE("dfs order visits parents before children") {
        const auto& order = t.dfs_order();
        REQUIRE(static_cast<int>(order.size()) == t.node_count());
        std::vector<int> pos(order.size());
        for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = static_cast<int>(k);
        for (int v = 1; v < t.node_count(); ++v) CHECK(pos[t.parent(v)] < pos[v]);
        CHECK(order[0] == 0);
    }

    SUBCASE("paths run from below the anchor down to the target") {
        CHECK(t.path(0, 4) == std::vector<int>{1, 4});
        CHECK(t.path(1, 3) == std::vector<int>{3});
        CHECK(t.path(0, 5) == std::vector<int>{2, 5});
        CHECK_THROWS_AS((void)t.path(1, 5), skipfree::NotDescendant);
        CHECK_THROWS_AS((void)t.path(3, 3), skipfree::NotDescendant);
    }
}

TEST_CASE("parent list round trips") {
    std::vector<int> parents{0, 0, 2, 2, 4};
    Tree t(parents);
    CHECK(t.parent_list() == parents);
    CHECK(Tree(t.parent_list()) == t);
}

TEST_CASE("malformed parent lists are rejected") {
    CHECK_THROWS_AS(Tree({1}), skipfree::CycleDetected);          // node 1 is its own parent
    CHECK_THROWS_AS(Tree({0, 2}), skipfree::CycleDetected);       // 2 -> 2
    CHECK_THROWS_AS(Tree({2, 1}), skipfree::CycleDetected);       // 1 <-> 2, unreachable from the root
    CHECK_THROWS_AS(Tree({5}), skipfree::DanglingParent);         // parent id out of range
    CHECK_THROWS_AS(Tree({0, -1}), skipfree::DanglingParent);
}

TEST_CASE("levels partition the nodes") {
    Tree t({0, 0, 1, 2, 2, 3});
    int total = 0;
    for (int l = 0; l <= t.depth(); ++l) {
        for (int v : t.level_nodes(l)) CHECK(t.level(v) == l);
        total += static_cast<int>(t.level_nodes(l).size());
    }
    CHECK(total == t.node_count());
}
