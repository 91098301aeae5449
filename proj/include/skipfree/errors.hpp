#ifndef SKIPFREE_ERRORS_HPP
#define SKIPFREE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace skipfree {

/// Base class for everything this library throws on bad models or failed runs.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// -- tree construction --

struct CycleDetected : Error {
    int node;
    explicit CycleDetected(int node_)
        : Error("parent chain from node " + std::to_string(node_) + " never reaches the root"),
          node(node_) {}
};

struct DanglingParent : Error {
    int node;
    int parent;
    DanglingParent(int node_, int parent_)
        : Error("node " + std::to_string(node_) + " names parent " + std::to_string(parent_) +
                " outside the node range"),
          node(node_), parent(parent_) {}
};

// -- model validation --

struct SkipFreeViolation : Error {
    int state;
    int action;
    int dest;
    SkipFreeViolation(int state_, int action_, int dest_)
        : Error("transition (" + std::to_string(state_) + ", action " + std::to_string(action_) +
                ") -> " + std::to_string(dest_) +
                " leaves the skip-free support {parent, self, descendants}"),
          state(state_), action(action_), dest(dest_) {}
};

struct RowSumError : Error {
    int state;
    int action;
    double sum;
    RowSumError(int state_, int action_, double sum_)
        : Error("probabilities for (" + std::to_string(state_) + ", action " +
                std::to_string(action_) + ") sum to " + std::to_string(sum_) + ", not 1"),
          state(state_), action(action_), sum(sum_) {}
};

struct DegenerateRoot : Error {
    int action;
    explicit DegenerateRoot(int action_)
        : Error("root action " + std::to_string(action_) + " is absorbing (p_00 = 1)"),
          action(action_) {}
};

struct UnreachableParent : Error {
    int state;
    explicit UnreachableParent(int state_)
        : Error("state " + std::to_string(state_) + " has no action with positive parent probability"),
          state(state_) {}
};

struct NotDescendant : Error {
    int k;
    int i;
    NotDescendant(int k_, int i_)
        : Error("state " + std::to_string(k_) + " is not a descendant of " + std::to_string(i_)),
          k(k_), i(i_) {}
};

struct NegativeRate : Error {
    int state;
    int action;
    NegativeRate(int state_, int action_)
        : Error("negative rate in (" + std::to_string(state_) + ", action " +
                std::to_string(action_) + ")"),
          state(state_), action(action_) {}
};

// -- solver preconditions and run failures --

struct NotRecurrent : Error {
    NotRecurrent() : Error("model is not recurrent: some action breaks the parent-positive rule") {}
};

struct NotCommunicating : Error {
    int witness;
    explicit NotCommunicating(int witness_)
        : Error("model is not communicating: reachability from the root stops at state " +
                std::to_string(witness_)),
          witness(witness_) {}
};

struct DivisionByZeroTransition : Error {
    int state;
    int action;
    DivisionByZeroTransition(int state_, int action_)
        : Error("action " + std::to_string(action_) + " at state " + std::to_string(state_) +
                " has zero parent probability; the restricted sweep cannot divide by it"),
          state(state_), action(action_) {}
};

// -- oracles --

struct Multichain : Error {
    Multichain() : Error("policy induces more than one recurrent class") {}
};

struct TooManyPolicies : Error {
    double count;
    explicit TooManyPolicies(double count_)
        : Error("policy space has about " + std::to_string(count_) +
                " members; enumeration guard is 1e6"),
          count(count_) {}
};

struct SingularEvaluation : Error {
    SingularEvaluation() : Error("policy evaluation system is singular; input is not unichain") {}
};

struct NoConvergence : Error {
    double tol;
    long max_iter;
    NoConvergence(double tol_, long max_iter_)
        : Error("iteration did not reach tolerance " + std::to_string(tol_) + " within " +
                std::to_string(max_iter_) + " sweeps"),
          tol(tol_), max_iter(max_iter_) {}
};

// -- transforms --

struct BadDiscount : Error {
    double beta;
    explicit BadDiscount(double beta_)
        : Error("discount factor " + std::to_string(beta_) + " is outside (0,1)"), beta(beta_) {}
};

struct ZeroRates : Error {
    ZeroRates() : Error("all transition rates are zero; nothing to uniformize") {}
};

struct NotChain : Error {
    NotChain() : Error("value recovery needs an augmentation built from a linear chain") {}
};

// -- model library --

struct CapacityOverflow : Error {
    long long states;
    long long bound;
    CapacityOverflow(long long states_, long long bound_)
        : Error("construction would create " + std::to_string(states_) +
                " states; bound is " + std::to_string(bound_)),
          states(states_), bound(bound_) {}
};

struct GenerationFailed : Error {
    explicit GenerationFailed(const std::string& why)
        : Error("random instance generation failed: " + why) {}
};

struct ParseError : Error {
    int line;
    ParseError(int line_, const std::string& why)
        : Error("model text line " + std::to_string(line_) + ": " + why), line(line_) {}
};

}  // namespace skipfree

#endif
