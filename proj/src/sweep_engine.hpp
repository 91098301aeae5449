#ifndef SKIPFREE_SWEEP_ENGINE_HPP
#define SKIPFREE_SWEEP_ENGINE_HPP

#include <vector>

#include "skipfree/model.hpp"
#include "skipfree/solver.hpp"

namespace skipfree::detail {

/*
 * Preprocessed sweep kernel shared by the recurrent and communicating solvers.
 * Flattens transition rows into parent/self/descendant parts once, then runs
 * backward passes against them. Descendant terms are path sums of y (or t)
 * memoized per anchor state, so a pass costs O(sum over (i,a) of support size
 * times path length) instead of touching whole subtrees.
 *
 * Not thread-safe: the memo buffers are reused across calls. Confine one
 * engine to one solve call.
 */
class SweepEngine {
public:
    /// parent_positive_only restricts every per-state argmin to actions that
    /// move to the parent with positive probability (the B_i sets).
    SweepEngine(const SkipFreeMdp& mdp, bool parent_positive_only);

    /// One backward pass over all non-root states.
    void run(double x, const Policy* restrict, SweepState& out) const;

    struct ActionSums {
        double p_parent = 0.0;
        double p_self = 0.0;
        double desc_y = 0.0;  // sum over supported descendants of p * (path sum of y)
        double desc_t = 0.0;
    };

    /// Root-style objective ingredients for every action of candidate state r,
    /// with descendant path sums anchored at r. Needs a completed sweep.
    std::vector<ActionSums> action_sums(const SweepState& sweep, int r) const;

    const SkipFreeMdp& model() const { return mdp_; }

private:
    struct ActEntry {
        double p_parent = 0.0;
        double p_self = 0.0;
        double cost = 0.0;
        int desc_lo = 0;
        int desc_hi = 0;
    };

    void walk(int anchor, int node, double& sum_y, double& sum_t) const;

    const SkipFreeMdp& mdp_;
    bool parent_positive_only_ = false;
    std::vector<ActEntry> acts_;
    std::vector<int> act_offset_;   // per state, into acts_
    std::vector<int> desc_dest_;
    std::vector<double> desc_prob_;
    std::vector<unsigned char> desc_direct_;  // dest is a direct child: path sum is y[dest]
    std::vector<int> order_;        // non-root states, deepest level first

    // per-anchor path-sum memo
    mutable std::vector<long> stamp_;
    mutable std::vector<double> cum_y_;
    mutable std::vector<double> cum_t_;
    mutable std::vector<int> climb_;
    mutable long current_stamp_ = 0;
    mutable const double* y_ = nullptr;
    mutable const double* t_ = nullptr;
};

}  // namespace skipfree::detail

#endif
