#ifndef SKIPFREE_REFERENCE_HPP
#define SKIPFREE_REFERENCE_HPP

#include <string>
#include <vector>

#include "skipfree/model.hpp"
#include "skipfree/solver.hpp"

namespace skipfree {

/*
 * Classical solvers used as correctness oracles for the sweep-based solver.
 * They deliberately share no arithmetic with it: everything here works on
 * dense per-policy chains and textbook iteration schemes.
 */

struct OracleReport {
    double g_star = 0.0;
    std::vector<double> values;  // h for average-cost methods, v for discounted
    Policy policy;
    std::string method;
    long iterations = 0;  // sweeps, policy evaluations, or policies examined
};

/// Stationary distribution of the chain induced by d. Transient states get 0.
/// Throws Multichain when the chain has more than one recurrent class.
std::vector<double> stationary_distribution(const SkipFreeMdp& mdp, const Policy& d);

/// Average cost of a fixed policy from its stationary distribution.
double policy_average_cost(const SkipFreeMdp& mdp, const Policy& d);

/*
 * Brute force over every stationary deterministic policy. With unichain_only,
 * multichain policies are skipped; otherwise Multichain propagates. Guarded by
 * TooManyPolicies above 1e6 policies.
 */
OracleReport enumerate_policies(const SkipFreeMdp& mdp, bool unichain_only = false);

/// Howard policy iteration: exact evaluation by a dense linear solve, greedy
/// improvement keeping the incumbent action on ties.
OracleReport policy_iteration_average(const SkipFreeMdp& mdp);

/// Relative value iteration with span-seminorm stopping; g within tol.
OracleReport relative_value_iteration(const SkipFreeMdp& mdp, double tol = 1e-9,
                                      long max_iter = 5000000);

/// Discounted value iteration; sup-norm error of v below tol.
OracleReport discounted_value_iteration(const SkipFreeMdp& mdp, double beta, double tol = 1e-9,
                                        long max_iter = 50000000);

/// Exact discounted value of a fixed policy, by dense linear solve.
std::vector<double> discounted_policy_value(const SkipFreeMdp& mdp, const Policy& d, double beta);

/// Number of stationary deterministic policies, saturating at 2e6.
double policy_space_size(const SkipFreeMdp& mdp);

}  // namespace skipfree

#endif
