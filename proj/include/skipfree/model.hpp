#ifndef SKIPFREE_MODEL_HPP
#define SKIPFREE_MODEL_HPP

#include <string>
#include <vector>

#include "skipfree/tree.hpp"

namespace skipfree {

struct Transition {
    int dest = 0;
    double prob = 0.0;  // probability for discrete models, rate for continuous ones

    bool operator==(const Transition& o) const { return dest == o.dest && prob == o.prob; }
};

/*
 * Finite MDP whose transitions are skip-free in the negative direction on a
 * rooted tree: from state i only the parent, i itself, or a descendant of i
 * can receive positive probability.
 *
 * Indexing: transitions[i][a] and costs[i][a] follow action_labels[i].
 */
struct SkipFreeMdp {
    Tree tree;
    std::vector<std::vector<std::string>> action_labels;
    std::vector<std::vector<std::vector<Transition>>> transitions;
    std::vector<std::vector<double>> costs;
    std::vector<std::string> state_labels;  // optional display names, empty when unused

    int state_count() const { return tree.node_count(); }
    int action_count(int state) const { return static_cast<int>(action_labels[state].size()); }

    /// Probability of the (state, action) transition to dest; 0 when unsupported.
    double prob(int state, int action, int dest) const;

    bool operator==(const SkipFreeMdp& o) const {
        return tree == o.tree && action_labels == o.action_labels &&
               transitions == o.transitions && costs == o.costs;
    }
};

/// Continuous-time counterpart: entries of transitions are rates, costs accrue per unit time.
struct CtMdp {
    Tree tree;
    std::vector<std::vector<std::string>> action_labels;
    std::vector<std::vector<std::vector<Transition>>> transitions;
    std::vector<std::vector<double>> costs;
    std::vector<std::string> state_labels;

    int state_count() const { return tree.node_count(); }
    int action_count(int state) const { return static_cast<int>(action_labels[state].size()); }

    bool operator==(const CtMdp& o) const {
        return tree == o.tree && action_labels == o.action_labels &&
               transitions == o.transitions && costs == o.costs;
    }
};

enum class ChainKind { Recurrent, CommunicatingOnly, NotCommunicating };

std::string to_string(ChainKind kind);

struct ChainClass {
    ChainKind kind = ChainKind::Recurrent;
    int witness = 0;              // largest state reached from 0 when NotCommunicating
    std::vector<int> reachable;   // fixed point of the reachability sequence
};

/*
 * Checks every SkipFreeMdp invariant and canonicalizes rows in place:
 * rows whose sum strays from 1 by more than 1e-9 are rejected, closer rows
 * are renormalized; zero-probability entries are dropped and the rest sorted
 * by destination. Throws SkipFreeViolation, RowSumError, DegenerateRoot or
 * UnreachableParent.
 */
void validate_skip_free(SkipFreeMdp& mdp);

/// Rate-model variant: checks support and nonnegativity, drops zero rates.
void validate_ct(CtMdp& ct);

/// Upper-tail probability: total mass from (i, a) landing in the subtree T(k).
/// Requires k in D(i).
double upper_tail(const SkipFreeMdp& mdp, int i, int a, int k);

/*
 * Chain classification. Recurrent requires every action of every non-root
 * state to move to the parent with positive probability and no absorbing
 * (state, action) pair. Otherwise the policy-choosable reachability closure
 * from the root decides between CommunicatingOnly and NotCommunicating.
 */
ChainClass classify(const SkipFreeMdp& mdp);

}  // namespace skipfree

#endif
