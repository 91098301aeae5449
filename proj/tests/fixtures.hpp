#ifndef SKIPFREE_TESTS_FIXTURES_HPP
#define SKIPFREE_TESTS_FIXTURES_HPP

#include <string>
#include <vector>

#include "skipfree/model.hpp"

namespace fixtures {

using skipfree::SkipFreeMdp;
using skipfree::Transition;
using skipfree::Tree;

/// Chain 0-1. State 1: action a returns to the root half the time, action b
/// always. Optimal policy plays b: g* = 0.8, h*_1 = 1.6, two improvement steps.
inline SkipFreeMdp two_policy_model() {
    SkipFreeMdp m;
    m.tree = Tree({0});
    m.action_labels = {{"a"}, {"a", "b"}};
    m.transitions = {
        {{{0, 0.5}, {1, 0.5}}},
        {{{0, 0.5}, {1, 0.5}}, {{0, 1.0}}},
    };
    m.costs = {{0.0}, {2.0, 2.4}};
    skipfree::validate_skip_free(m);
    return m;
}

/// Chain 0-1-2, communicating but not recurrent: state 1 can cut the root off
/// and cycle with state 2. Best unichain policy: d(1) = b, class {1,2}, g = 0.5.
inline SkipFreeMdp communicating_model() {
    SkipFreeMdp m;
    m.tree = Tree({0, 1});
    m.action_labels = {{"a"}, {"a", "b"}, {"a"}};
    m.transitions = {
        {{{1, 1.0}}},
        {{{0, 1.0}}, {{2, 1.0}}},
        {{{1, 1.0}}},
    };
    m.costs = {{5.0}, {0.0, 0.0}, {1.0}};
    skipfree::validate_skip_free(m);
    return m;
}

/// Star 0-{1,2} where both leaves can either return or absorb. Policies that
/// absorb both leaves are multichain.
inline SkipFreeMdp absorbable_star() {
    SkipFreeMdp m;
    m.tree = Tree({0, 0});
    m.action_labels = {{"a"}, {"back", "stay"}, {"back", "stay"}};
    m.transitions = {
        {{{1, 0.5}, {2, 0.5}}},
        {{{0, 1.0}}, {{1, 1.0}}},
        {{{0, 1.0}}, {{2, 1.0}}},
    };
    m.costs = {{1.0}, {2.0, 3.0}, {2.0, 0.5}};
    skipfree::validate_skip_free(m);
    return m;
}

}  // namespace fixtures

#endif
