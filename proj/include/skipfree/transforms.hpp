#ifndef SKIPFREE_TRANSFORMS_HPP
#define SKIPFREE_TRANSFORMS_HPP

#include <utility>
#include <vector>

#include "skipfree/model.hpp"
#include "skipfree/solver.hpp"

namespace skipfree {

/*
 * Discounted problem rewritten as an average-cost one: original transitions
 * are scaled by beta and the leftover 1-beta mass flows to fresh terminal
 * states (one per original terminal) that bounce back up with probability
 * beta. Solving the result with the average-cost machinery recovers the
 * discounted optimum.
 */
struct AugmentedModel {
    SkipFreeMdp mdp;
    std::vector<int> origin;           // per new state: original id, -1 for added terminals
    std::vector<int> added_terminals;  // new state ids, ascending
    double beta = 0.0;
    bool from_chain = false;           // original tree was a path; enables value recovery
};

AugmentedModel discount_to_average(const SkipFreeMdp& mdp, double beta);

/// Discounted values of the original states from an average-cost solve of the
/// augmentation. Only derivable when the original model was a linear chain;
/// throws NotChain otherwise.
std::vector<double> recover_discounted_values(const AugmentedModel& aug, const SolveReport& report);

/// Discrete embedding of a rate model at the uniform event rate Lambda
/// (the maximum total outflow). Costs are scaled to per-step; relative costs
/// of the continuous problem are the discrete ones divided by Lambda.
std::pair<SkipFreeMdp, double> uniformize(const CtMdp& ct);

struct CtSolution {
    SolveReport report;  // h already divided by lambda; g_star is unchanged
    double lambda = 0.0;
};

/// Uniformize-then-solve convenience wrapper for recurrent rate models.
CtSolution solve_ct_average(const CtMdp& ct, RootVariant variant = RootVariant::MeanImprovement,
                            double tol = kDefaultTol, long max_iter = kDefaultMaxIter);

/*
 * Policy improvement for communicating models that need not be recurrent.
 * Each iteration runs one backward sweep restricted to parent-positive
 * actions, then ranks a candidate record for every state whose action set
 * can cut the parent link (the recurrent class of the new policy lives in
 * that state's subtree). After convergence the states outside the winning
 * subtree are transient; their h values and actions are repaired by value
 * iteration against the fixed subtree values. h is shifted so h(0) = 0.
 */
SolveReport solve_communicating(const SkipFreeMdp& mdp,
                                RootVariant variant = RootVariant::MeanImprovement,
                                double tol = kDefaultTol, long max_iter = kDefaultMaxIter);

}  // namespace skipfree

#endif
