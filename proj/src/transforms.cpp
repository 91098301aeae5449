#include "skipfree/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skipfree/errors.hpp"
#include "sweep_engine.hpp"

namespace skipfree {

AugmentedModel discount_to_average(const SkipFreeMdp& mdp, double beta) {
    if (!(beta > 0.0) || !(beta < 1.0) || !std::isfinite(beta)) throw BadDiscount(beta);
    const int n = mdp.state_count();

    std::vector<int> terminals;
    for (int i = 0; i < n; ++i)
        if (mdp.tree.is_terminal(i)) terminals.push_back(i);

    AugmentedModel aug;
    aug.beta = beta;
    aug.from_chain = mdp.tree.is_chain();
    std::vector<int> parents = mdp.tree.parent_list();
    std::vector<int> added_of_terminal(n, -1);  // original terminal -> added id
    for (std::size_t k = 0; k < terminals.size(); ++k) {
        const int added = n + static_cast<int>(k);
        parents.push_back(terminals[k]);
        added_of_terminal[terminals[k]] = added;
        aug.added_terminals.push_back(added);
    }
    aug.origin.resize(n + static_cast<int>(terminals.size()), -1);
    for (int i = 0; i < n; ++i) aug.origin[i] = i;

    SkipFreeMdp& out = aug.mdp;
    out.tree = Tree(parents);
    const int m = out.tree.node_count();
    out.action_labels = mdp.action_labels;
    out.costs = mdp.costs;
    out.transitions = mdp.transitions;
    out.state_labels = mdp.state_labels;
    if (!out.state_labels.empty()) out.state_labels.resize(m);
    out.action_labels.resize(m);
    out.costs.resize(m);
    out.transitions.resize(m);

    for (int i = 0; i < n; ++i) {
        // added terminals reachable below i absorb the leaked 1-beta mass
        std::vector<int> sinks;
        for (int e : terminals)
            if (out.tree.in_subtree(i, e)) sinks.push_back(added_of_terminal[e]);
        const double share = (1.0 - beta) / static_cast<double>(sinks.size());
        for (std::size_t a = 0; a < out.transitions[i].size(); ++a) {
            for (Transition& t : out.transitions[i][a]) t.prob *= beta;
            for (int s : sinks) out.transitions[i][a].push_back({s, share});
        }
    }
    for (std::size_t k = 0; k < terminals.size(); ++k) {
        const int added = aug.added_terminals[k];
        out.action_labels[added] = {"return"};
        out.costs[added] = {0.0};
        out.transitions[added] = {{{terminals[k], beta}, {added, 1.0 - beta}}};
    }
    validate_skip_free(out);
    return aug;
}

std::vector<double> recover_discounted_values(const AugmentedModel& aug, const SolveReport& report) {
    if (!aug.from_chain) throw NotChain();
    if (aug.added_terminals.size() != 1) throw NotChain();
    const int sink = aug.added_terminals[0];
    const int n = sink;  // originals are 0..sink-1
    if (static_cast<int>(report.h.size()) != aug.mdp.state_count())
        throw Error("report does not match augmented model");
    std::vector<double> v(n);
    const double base = report.g_star / (1.0 - aug.beta);
    for (int j = 0; j < n; ++j) v[j] = base - (report.h[sink] - report.h[j]);
    return v;
}

std::pair<SkipFreeMdp, double> uniformize(const CtMdp& ct) {
    CtMdp rates = ct;
    validate_ct(rates);
    const int n = rates.state_count();

    double lambda = 0.0;
    for (int i = 0; i < n; ++i)
        for (std::size_t a = 0; a < rates.transitions[i].size(); ++a) {
            double total = 0.0;
            for (const Transition& t : rates.transitions[i][a]) total += t.prob;
            lambda = std::max(lambda, total);
        }
    if (!(lambda > 0.0)) throw ZeroRates();

    SkipFreeMdp out;
    out.tree = rates.tree;
    out.action_labels = rates.action_labels;
    out.state_labels = rates.state_labels;
    out.transitions.resize(n);
    out.costs.resize(n);
    for (int i = 0; i < n; ++i) {
        out.transitions[i].resize(rates.transitions[i].size());
        out.costs[i].resize(rates.costs[i].size());
        for (std::size_t a = 0; a < rates.transitions[i].size(); ++a) {
            double off = 0.0;  // accumulated jump mass, summed exactly as emitted
            std::vector<Transition>& row = out.transitions[i][a];
            for (const Transition& t : rates.transitions[i][a]) {
                if (t.dest == i) continue;  // self-rate collapses into the slack
                const double p = t.prob / lambda;
                if (p > 0.0) row.push_back({t.dest, p});
                off += p;
            }
            const double self = 1.0 - off;
            if (self > 0.0) row.push_back({i, self});
            out.costs[i][a] = lambda * rates.costs[i][a];
        }
    }
    validate_skip_free(out);
    return {std::move(out), lambda};
}

CtSolution solve_ct_average(const CtMdp& ct, RootVariant variant, double tol, long max_iter) {
    auto [discrete, lambda] = uniformize(ct);
    CtSolution sol;
    sol.lambda = lambda;
    sol.report = solve_average(discrete, variant, tol, max_iter);
    for (double& h : sol.report.h) h = h / lambda;
    return sol;
}

namespace {

/// Mean-improvement rate at state r for action a, given subtree sums at r.
double record_rate(const SkipFreeMdp& mdp, int r, int a, double x,
                   const detail::SweepEngine::ActionSums& s) {
    return (mdp.costs[r][a] - x + s.desc_y) / (1.0 + s.desc_t);
}

double root_objective(double numer, double p_self, double desc_t, RootVariant variant) {
    switch (variant) {
        case RootVariant::FirstReturn: return numer / (1.0 - p_self);
        case RootVariant::OptimalityEq: return numer;
        case RootVariant::MeanImprovement: break;
    }
    return numer / (1.0 + desc_t);
}

struct Record {
    int state = -1;
    int action = -1;
    double u = std::numeric_limits<double>::infinity();
};

}  // namespace

SolveReport solve_communicating(const SkipFreeMdp& mdp, RootVariant variant, double tol,
                                long max_iter) {
    if (!(tol > 0.0)) throw Error("tolerance must be positive");
    const ChainClass cls = classify(mdp);
    if (cls.kind == ChainKind::NotCommunicating) throw NotCommunicating(cls.witness);

    const int n = mdp.state_count();
    const Tree& tree = mdp.tree;

    // candidate states: the root, plus every state with an action that cuts
    // the parent link (its subtree can host the recurrent class)
    std::vector<std::vector<int>> cut_actions(n);
    std::vector<int> candidates{0};
    for (std::size_t a = 0; a < mdp.transitions[0].size(); ++a)
        cut_actions[0].push_back(static_cast<int>(a));
    for (int i = 1; i < n; ++i) {
        const int parent = tree.parent(i);
        for (std::size_t a = 0; a < mdp.transitions[i].size(); ++a)
            if (mdp.prob(i, static_cast<int>(a), parent) == 0.0)
                cut_actions[i].push_back(static_cast<int>(a));
        if (!cut_actions[i].empty()) candidates.push_back(i);
    }

    detail::SweepEngine engine(mdp, /*parent_positive_only=*/true);

    Policy d(n, 0);
    for (int i = 1; i < n; ++i) {
        const int parent = tree.parent(i);
        for (std::size_t a = 0; a < mdp.transitions[i].size(); ++a)
            if (mdp.prob(i, static_cast<int>(a), parent) > 0.0) {
                d[i] = static_cast<int>(a);
                break;
            }
    }

    SweepState sweep;
    engine.run(0.0, &d, sweep);
    const double g0 = record_rate(mdp, 0, d[0], 0.0, engine.action_sums(sweep, 0)[d[0]]);
    SolveReport rep;
    rep.variant = variant;
    rep.trace.push_back({0, g0, g0});

    double g = g0;
    Policy prev = d;
    int prev_state = 0;
    for (long it = 1; it <= max_iter; ++it) {
        engine.run(g, nullptr, sweep);

        Record best;
        for (int r : candidates) {
            const auto sums = engine.action_sums(sweep, r);
            int pick = -1;
            double pick_obj = std::numeric_limits<double>::infinity();
            for (int a : cut_actions[r]) {
                double obj;
                if (r == 0) {
                    const double numer = mdp.costs[0][a] - g + sums[a].desc_y;
                    obj = root_objective(numer, sums[a].p_self, sums[a].desc_t, variant);
                } else {
                    obj = record_rate(mdp, r, a, g, sums[a]);
                }
                if (obj < pick_obj) {
                    pick_obj = obj;
                    pick = a;
                }
            }
            const double u = record_rate(mdp, r, pick, g, sums[pick]);
            if (u < best.u) best = {r, pick, u};
        }

        const double g_next = g + best.u;
        rep.trace.push_back({static_cast<int>(it), g_next, best.u});

        Policy d_new = sweep.action;
        d_new[best.state] = best.action;
        const bool done = best.u >= -tol || (best.state == prev_state && d_new == prev);
        g = g_next;
        if (!done) {
            prev = d_new;
            prev_state = best.state;
            continue;
        }

        rep.g_star = g;
        rep.iterations = static_cast<int>(it);
        rep.policy = d_new;
        rep.distinguished = best.state;
        const int K = best.state;

        // h on the winning subtree: path sums of y, anchored at K
        rep.h.assign(n, 0.0);
        for (int node : tree.dfs_order())
            if (node != K && tree.in_subtree(K, node))
                rep.h[node] = rep.h[tree.parent(node)] + sweep.y[node];

        // outside T(K) every state is transient under the new policy;
        // value-iterate h there against the fixed subtree values,
        // starting above any fixed point so descent is monotone
        std::vector<int> outside;
        for (int i = 0; i < n; ++i)
            if (!tree.in_subtree(K, i)) outside.push_back(i);
        if (!outside.empty()) {
            double h_hi = 0.0;
            for (int i = 0; i < n; ++i)
                if (tree.in_subtree(K, i)) h_hi = std::max(h_hi, rep.h[i]);
            double c_hi = 0.0;
            for (int i = 0; i < n; ++i)
                for (double c : mdp.costs[i]) c_hi = std::max(c_hi, std::abs(c));
            const double start = h_hi + (n + 1) * (c_hi + std::abs(g) + 1.0);
            for (int i : outside) rep.h[i] = start;

            const long cap = std::max(max_iter, 100000L);
            bool settled = false;
            for (long pass = 0; pass < cap && !settled; ++pass) {
                for (int i : outside) {
                    double bi = std::numeric_limits<double>::infinity();
                    int ba = 0;
                    for (std::size_t a = 0; a < mdp.transitions[i].size(); ++a) {
                        double v = mdp.costs[i][a] - g;
                        for (const Transition& t : mdp.transitions[i][a])
                            v += t.prob * rep.h[t.dest];
                        if (v < bi) {
                            bi = v;
                            ba = static_cast<int>(a);
                        }
                    }
                    rep.h[i] = bi;
                    rep.policy[i] = ba;
                }
                double resid = 0.0;
                for (int i : outside) {
                    double bi = std::numeric_limits<double>::infinity();
                    for (std::size_t a = 0; a < mdp.transitions[i].size(); ++a) {
                        double v = mdp.costs[i][a] - g;
                        for (const Transition& t : mdp.transitions[i][a])
                            v += t.prob * rep.h[t.dest];
                        bi = std::min(bi, v);
                    }
                    resid = std::max(resid, std::abs(rep.h[i] - bi));
                }
                settled = resid <= tol;
            }
            if (!settled) throw MaxIterExceeded(rep);
        }

        const double shift = rep.h[0];
        for (double& h : rep.h) h -= shift;
        rep.h[0] = 0.0;
        rep.recurrent_class = recurrent_class_under(mdp, rep.policy, K);
        return rep;
    }
    throw MaxIterExceeded(rep);
}

}  // namespace skipfree
