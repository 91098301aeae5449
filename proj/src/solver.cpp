#include "skipfree/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sweep_engine.hpp"

namespace skipfree {

namespace {

struct RootChoice {
    int action = -1;
    double u0 = 0.0;
    double t0 = 0.0;
};

double root_objective(double numer, const detail::SweepEngine::ActionSums& s, RootVariant variant) {
    switch (variant) {
        case RootVariant::FirstReturn: return numer / (1.0 - s.p_self);
        case RootVariant::OptimalityEq: return numer;
        case RootVariant::MeanImprovement: return numer / (1.0 + s.desc_t);
    }
    return numer;
}

/// Picks a_0 by the variant's objective; u_0 is always the mean-improvement
/// value at that action so x + u_0 equals the chosen policy's average cost.
RootChoice choose_root(const SkipFreeMdp& mdp, const std::vector<detail::SweepEngine::ActionSums>& sums,
                       double x, RootVariant variant) {
    RootChoice best;
    double best_obj = std::numeric_limits<double>::infinity();
    for (int a = 0; a < mdp.action_count(0); ++a) {
        const double numer = mdp.costs[0][a] - x + sums[a].desc_y;
        const double obj = root_objective(numer, sums[a], variant);
        if (obj < best_obj) {
            best_obj = obj;
            best.action = a;
        }
    }
    const auto& s = sums[best.action];
    best.u0 = (mdp.costs[0][best.action] - x + s.desc_y) / (1.0 + s.desc_t);
    best.t0 = (1.0 + s.desc_t) / (1.0 - s.p_self);
    return best;
}

std::vector<double> h_from_y(const Tree& tree, const std::vector<double>& y) {
    std::vector<double> h(tree.node_count(), 0.0);
    for (int node : tree.dfs_order())
        if (node != 0) h[node] = h[tree.parent(node)] + y[node];
    return h;
}

void check_policy(const SkipFreeMdp& mdp, const Policy& d) {
    if (static_cast<int>(d.size()) != mdp.state_count())
        throw Error("policy length does not match the state count");
    for (int i = 0; i < mdp.state_count(); ++i)
        if (d[i] < 0 || d[i] >= mdp.action_count(i))
            throw Error("policy action " + std::to_string(d[i]) + " out of range at state " +
                        std::to_string(i));
}

}  // namespace

std::string to_string(RootVariant variant) {
    switch (variant) {
        case RootVariant::FirstReturn: return "first-return";
        case RootVariant::OptimalityEq: return "optimality";
        case RootVariant::MeanImprovement: return "mean-improvement";
    }
    return "unknown";
}

RootVariant variant_from_string(const std::string& name) {
    if (name == "first-return") return RootVariant::FirstReturn;
    if (name == "optimality") return RootVariant::OptimalityEq;
    if (name == "mean-improvement") return RootVariant::MeanImprovement;
    throw Error("unknown root variant '" + name +
                "'; expected first-return | optimality | mean-improvement");
}

SweepState backward_sweep(const SkipFreeMdp& mdp, double x, const Policy* restrict) {
    if (restrict) check_policy(mdp, *restrict);
    detail::SweepEngine engine(mdp, false);
    SweepState sweep;
    engine.run(x, restrict, sweep);
    return sweep;
}

void root_update(const SkipFreeMdp& mdp, SweepState& sweep, RootVariant variant) {
    detail::SweepEngine engine(mdp, false);
    const auto sums = engine.action_sums(sweep, 0);
    const RootChoice choice = choose_root(mdp, sums, sweep.x, variant);
    sweep.action[0] = choice.action;
    sweep.root = RootUpdate{choice.action, choice.u0, choice.t0};
}

PolicyStats evaluate_policy(const SkipFreeMdp& mdp, const Policy& d) {
    check_policy(mdp, d);
    detail::SweepEngine engine(mdp, false);
    SweepState sweep;
    engine.run(0.0, &d, sweep);
    const auto sums = engine.action_sums(sweep, 0);
    const auto& s = sums[d[0]];
    const double numer = mdp.costs[0][d[0]] + s.desc_y;

    PolicyStats stats;
    stats.g = numer / (1.0 + s.desc_t);
    stats.tau = (1.0 + s.desc_t) / (1.0 - s.p_self);
    stats.C = numer / (1.0 - s.p_self);  // first-return route, checks g * tau independently
    return stats;
}

std::vector<int> recurrent_class_under(const SkipFreeMdp& mdp, const Policy& d, int start) {
    std::vector<char> seen(mdp.state_count(), 0);
    seen[start] = 1;
    std::vector<int> frontier{start};
    while (!frontier.empty()) {
        std::vector<int> next;
        for (int i : frontier)
            for (const auto& tr : mdp.transitions[i][d[i]])
                if (tr.prob > 0.0 && !seen[tr.dest]) {
                    seen[tr.dest] = 1;
                    next.push_back(tr.dest);
                }
        frontier = std::move(next);
    }
    std::vector<int> members;
    for (int i = 0; i < mdp.state_count(); ++i)
        if (seen[i]) members.push_back(i);
    return members;
}

SolveReport solve_average(const SkipFreeMdp& mdp, RootVariant variant, double tol, long max_iter,
                          const std::optional<Policy>& d0) {
    if (!(tol > 0.0)) throw Error("tolerance must be positive");
    if (classify(mdp).kind != ChainKind::Recurrent) throw NotRecurrent();

    Policy d = d0 ? *d0 : Policy(mdp.state_count(), 0);
    check_policy(mdp, d);

    detail::SweepEngine engine(mdp, false);
    SweepState sweep;
    engine.run(0.0, &d, sweep);
    const auto init_sums = engine.action_sums(sweep, 0);
    const auto& s0 = init_sums[d[0]];
    double g = (mdp.costs[0][d[0]] + s0.desc_y) / (1.0 + s0.desc_t);

    SolveReport rep;
    rep.variant = variant;
    rep.trace.push_back({0, g, g});

    Policy prev = d;
    for (long n = 1; n <= max_iter; ++n) {
        engine.run(g, nullptr, sweep);
        const auto sums = engine.action_sums(sweep, 0);
        const RootChoice root = choose_root(mdp, sums, g, variant);
        sweep.action[0] = root.action;
        sweep.root = RootUpdate{root.action, root.u0, root.t0};

        const double g_next = g + root.u0;
        rep.trace.push_back({static_cast<int>(n), g_next, root.u0});
        const bool done = root.u0 >= -tol || sweep.action == prev;
        g = g_next;

        if (done) {
            rep.g_star = g;
            rep.iterations = static_cast<int>(n);
            rep.policy = sweep.action;
            rep.h = h_from_y(mdp.tree, sweep.y);
            rep.distinguished = 0;
            rep.recurrent_class = recurrent_class_under(mdp, rep.policy, 0);
            return rep;
        }
        prev = sweep.action;
    }

    rep.g_star = g;
    rep.iterations = static_cast<int>(max_iter);
    rep.policy = sweep.action;
    rep.h = h_from_y(mdp.tree, sweep.y);
    throw MaxIterExceeded(std::move(rep));
}

double residual(const SkipFreeMdp& mdp, double g, const std::vector<double>& h) {
    double worst = 0.0;
    for (int i = 0; i < mdp.state_count(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (int a = 0; a < mdp.action_count(i); ++a) {
            double q = mdp.costs[i][a] - g;
            for (const auto& tr : mdp.transitions[i][a]) q += tr.prob * h[tr.dest];
            best = std::min(best, q);
        }
        worst = std::max(worst, std::abs(h[i] - best));
    }
    return worst;
}

}  // namespace skipfree
