#include "sweep_engine.hpp"

#include <limits>

#include "skipfree/errors.hpp"

namespace skipfree::detail {

SweepEngine::SweepEngine(const SkipFreeMdp& mdp, bool parent_positive_only)
    : mdp_(mdp), parent_positive_only_(parent_positive_only) {
    const int n = mdp.state_count();
    act_offset_.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) act_offset_[i + 1] = act_offset_[i] + mdp.action_count(i);
    acts_.resize(act_offset_[n]);

    for (int i = 0; i < n; ++i) {
        const int parent = mdp.tree.parent(i);
        for (int a = 0; a < mdp.action_count(i); ++a) {
            ActEntry& entry = acts_[act_offset_[i] + a];
            entry.cost = mdp.costs[i][a];
            entry.desc_lo = static_cast<int>(desc_dest_.size());
            for (const auto& tr : mdp.transitions[i][a]) {
                if (tr.dest == i) {
                    entry.p_self = tr.prob;
                } else if (tr.dest == parent) {
                    entry.p_parent = tr.prob;
                } else {
                    desc_dest_.push_back(tr.dest);
                    desc_prob_.push_back(tr.prob);
                    desc_direct_.push_back(mdp.tree.parent(tr.dest) == i ? 1 : 0);
                }
            }
            entry.desc_hi = static_cast<int>(desc_dest_.size());
        }
    }

    order_.reserve(n - 1);
    for (int l = mdp.tree.depth(); l >= 1; --l)
        for (int node : mdp.tree.level_nodes(l)) order_.push_back(node);

    stamp_.assign(n, 0);
    cum_y_.assign(n, 0.0);
    cum_t_.assign(n, 0.0);
}

// Path sums of y and t over the nodes strictly below `anchor` down to `node`,
// inclusive. Caches per (anchor, node); valid while current_stamp_ is fixed.
void SweepEngine::walk(int anchor, int node, double& sum_y, double& sum_t) const {
    climb_.clear();
    int at = node;
    while (stamp_[at] != current_stamp_) {
        const int parent = mdp_.tree.parent(at);
        if (parent == anchor) {
            cum_y_[at] = y_[at];
            cum_t_[at] = t_[at];
            stamp_[at] = current_stamp_;
            break;
        }
        climb_.push_back(at);
        at = parent;
    }
    for (auto it = climb_.rbegin(); it != climb_.rend(); ++it) {
        const int parent = mdp_.tree.parent(*it);
        cum_y_[*it] = cum_y_[parent] + y_[*it];
        cum_t_[*it] = cum_t_[parent] + t_[*it];
        stamp_[*it] = current_stamp_;
    }
    sum_y = cum_y_[node];
    sum_t = cum_t_[node];
}

void SweepEngine::run(double x, const Policy* restrict, SweepState& out) const {
    const int n = mdp_.state_count();
    out.x = x;
    out.action.assign(n, 0);
    out.y.assign(n, 0.0);
    out.t.assign(n, 0.0);
    out.root.reset();
    y_ = out.y.data();
    t_ = out.t.data();

    for (int i : order_) {
        ++current_stamp_;
        const int a_lo = restrict ? (*restrict)[i] : 0;
        const int a_hi = restrict ? (*restrict)[i] + 1 : mdp_.action_count(i);

        double best_val = std::numeric_limits<double>::infinity();
        double best_desc_t = 0.0;
        double best_p_parent = 0.0;
        int best = -1;

        for (int a = a_lo; a < a_hi; ++a) {
            const ActEntry& entry = acts_[act_offset_[i] + a];
            if (entry.p_parent <= 0.0) {
                if (parent_positive_only_ && !restrict) continue;
                throw DivisionByZeroTransition(i, a);
            }
            double desc_y = 0.0;
            double desc_t = 0.0;
            for (int k = entry.desc_lo; k < entry.desc_hi; ++k) {
                const int d = desc_dest_[k];
                double sum_y;
                double sum_t;
                if (desc_direct_[k]) {
                    sum_y = y_[d];
                    sum_t = t_[d];
                } else {
                    walk(i, d, sum_y, sum_t);
                }
                desc_y += desc_prob_[k] * sum_y;
                desc_t += desc_prob_[k] * sum_t;
            }
            const double val = (entry.cost - x + desc_y) / entry.p_parent;
            if (val < best_val) {
                best_val = val;
                best_desc_t = desc_t;
                best_p_parent = entry.p_parent;
                best = a;
            }
        }
        if (best < 0) throw UnreachableParent(i);

        out.action[i] = best;
        out.y[i] = best_val;
        out.t[i] = (1.0 + best_desc_t) / best_p_parent;
    }
}

std::vector<SweepEngine::ActionSums> SweepEngine::action_sums(const SweepState& sweep, int r) const {
    y_ = sweep.y.data();
    t_ = sweep.t.data();
    ++current_stamp_;

    std::vector<ActionSums> sums(mdp_.action_count(r));
    for (int a = 0; a < mdp_.action_count(r); ++a) {
        const ActEntry& entry = acts_[act_offset_[r] + a];
        ActionSums& s = sums[a];
        s.p_parent = entry.p_parent;
        s.p_self = entry.p_self;
        for (int k = entry.desc_lo; k < entry.desc_hi; ++k) {
            const int d = desc_dest_[k];
            double sum_y;
            double sum_t;
            if (desc_direct_[k]) {
                sum_y = sweep.y[d];
                sum_t = sweep.t[d];
            } else {
                walk(r, d, sum_y, sum_t);
            }
            s.desc_y += desc_prob_[k] * sum_y;
            s.desc_t += desc_prob_[k] * sum_t;
        }
    }
    return sums;
}

}  // namespace skipfree::detail
