#ifndef SKIPFREE_SOLVER_HPP
#define SKIPFREE_SOLVER_HPP

#include <optional>
#include <string>
#include <vector>

#include "skipfree/errors.hpp"
#include "skipfree/model.hpp"

namespace skipfree {

using Policy = std::vector<int>;

/// How the root action is selected each iteration. All three converge to the
/// same optimum; they differ in which objective ranks the root actions.
enum class RootVariant {
    FirstReturn,      // expected revised cost until first return, over 1 - p_00(a)
    OptimalityEq,     // bare optimality-equation numerator
    MeanImprovement,  // revised cost per unit of expected cycle time (default)
};

std::string to_string(RootVariant variant);
RootVariant variant_from_string(const std::string& name);

/// Root quantities produced by root_update.
struct RootUpdate {
    int action = 0;
    double u0 = 0.0;  // mean-improvement value at the chosen action; g step
    double t0 = 0.0;  // expected first-return time to the root
};

/*
 * One backward pass at a fixed cost offset x. For every non-root state i the
 * sweep picks a_i minimizing the expected x-revised first-passage cost to the
 * parent, and records that cost y_i and the passage time t_i.
 */
struct SweepState {
    double x = 0.0;
    Policy action;          // action[0] is meaningful only after root_update
    std::vector<double> y;  // y[0] unused
    std::vector<double> t;  // t[0] unused
    std::optional<RootUpdate> root;
};

/// First-return statistics of a fixed policy, from a restricted sweep at x = 0.
struct PolicyStats {
    double g = 0.0;    // average cost
    double tau = 0.0;  // expected first-return time to the root
    double C = 0.0;    // expected first-return cost

    double H_at(double x) const { return C - x * tau; }
};

struct TraceEntry {
    int iter = 0;
    double g = 0.0;
    double u0 = 0.0;
};

struct SolveReport {
    double g_star = 0.0;
    std::vector<double> h;  // relative costs, h[0] = 0
    Policy policy;
    std::vector<TraceEntry> trace;
    int iterations = 0;
    RootVariant variant = RootVariant::MeanImprovement;
    int distinguished = 0;             // root of the subtree carrying the recurrent class
    std::vector<int> recurrent_class;  // states recurrent under the returned policy
};

struct MaxIterExceeded : Error {
    SolveReport partial;
    explicit MaxIterExceeded(SolveReport partial_)
        : Error("no convergence after " + std::to_string(partial_.trace.size() - 1) +
                " iterations; partial trace attached"),
          partial(std::move(partial_)) {}
};

/// Levels are processed deepest first; within a level states are independent.
/// With `restrict` the per-state argmin collapses to the given policy's action.
/// Throws DivisionByZeroTransition when a needed parent probability is zero.
SweepState backward_sweep(const SkipFreeMdp& mdp, double x, const Policy* restrict = nullptr);

/// Fills sweep.root (and sweep.action[0]): a_0 by the variant's objective, u_0
/// always by the mean-improvement form so that x + u_0 is the new policy's
/// true average cost, t_0 the expected first-return time.
void root_update(const SkipFreeMdp& mdp, SweepState& sweep, RootVariant variant);

/// g, tau and C of a fixed policy. Requires p_{i,parent}(d(i)) > 0 for all
/// i != 0 (the policy must be able to reach the root).
PolicyStats evaluate_policy(const SkipFreeMdp& mdp, const Policy& d);

inline constexpr double kDefaultTol = 1e-10;
inline constexpr long kDefaultMaxIter = 100000;

/*
 * Policy improvement for recurrent models. Starts from d0 (default: lowest
 * action index everywhere), iterates sweep + root update, stops when
 * u_0 >= -tol or the policy repeats exactly. The trace holds g_0 and one
 * entry per improvement iteration.
 */
SolveReport solve_average(const SkipFreeMdp& mdp,
                          RootVariant variant = RootVariant::MeanImprovement,
                          double tol = kDefaultTol, long max_iter = kDefaultMaxIter,
                          const std::optional<Policy>& d0 = std::nullopt);

/// Max deviation of (g, h) from the average-cost optimality equations.
double residual(const SkipFreeMdp& mdp, double g, const std::vector<double>& h);

/// States reachable from `start` under the fixed policy d; when start lies in
/// the recurrent class of d this is exactly that class.
std::vector<int> recurrent_class_under(const SkipFreeMdp& mdp, const Policy& d, int start);

}  // namespace skipfree

#endif
