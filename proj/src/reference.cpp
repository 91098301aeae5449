#include "skipfree/reference.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "skipfree/errors.hpp"

namespace skipfree {

namespace {

Eigen::MatrixXd dense_chain(const SkipFreeMdp& mdp, const Policy& d) {
    const int n = mdp.state_count();
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (const auto& tr : mdp.transitions[i][d[i]]) P(i, tr.dest) += tr.prob;
    return P;
}

/// reach[i][j] = 1 iff j is reachable from i in zero or more steps under d.
std::vector<std::vector<char>> reachability(const SkipFreeMdp& mdp, const Policy& d) {
    const int n = mdp.state_count();
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    for (int start = 0; start < n; ++start) {
        auto& row = reach[start];
        row[start] = 1;
        std::vector<int> frontier{start};
        while (!frontier.empty()) {
            std::vector<int> next;
            for (int i : frontier)
                for (const auto& tr : mdp.transitions[i][d[i]])
                    if (tr.prob > 0.0 && !row[tr.dest]) {
                        row[tr.dest] = 1;
                        next.push_back(tr.dest);
                    }
            frontier = std::move(next);
        }
    }
    return reach;
}

/// The single recurrent class of the chain under d; Multichain if not unique.
std::vector<int> single_recurrent_class(const SkipFreeMdp& mdp, const Policy& d) {
    const int n = mdp.state_count();
    const auto reach = reachability(mdp, d);

    std::vector<int> members;
    int representative = -1;
    for (int i = 0; i < n; ++i) {
        bool recurrent = true;
        for (int j = 0; j < n && recurrent; ++j)
            if (reach[i][j] && !reach[j][i]) recurrent = false;
        if (!recurrent) continue;
        if (representative < 0) representative = i;
        if (reach[representative][i] && reach[i][representative]) {
            members.push_back(i);
        } else {
            throw Multichain();
        }
    }
    return members;
}

}  // namespace

std::vector<double> stationary_distribution(const SkipFreeMdp& mdp, const Policy& d) {
    const int n = mdp.state_count();
    const auto members = single_recurrent_class(mdp, d);
    const int m = static_cast<int>(members.size());
    const Eigen::MatrixXd P = dense_chain(mdp, d);

    // Balance equations restricted to the class, last one replaced by the
    // normalization sum(pi) = 1.
    Eigen::MatrixXd A(m, m);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
            A(r, c) = P(members[c], members[r]) - (r == c ? 1.0 : 0.0);
    for (int c = 0; c < m; ++c) A(m - 1, c) = 1.0;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    b(m - 1) = 1.0;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) throw Multichain();
    Eigen::VectorXd pi = lu.solve(b);

    std::vector<double> out(n, 0.0);
    double total = 0.0;
    for (int k = 0; k < m; ++k) {
        const double p = std::max(pi(k), 0.0);
        out[members[k]] = p;
        total += p;
    }
    for (double& p : out) p /= total;
    return out;
}

double policy_average_cost(const SkipFreeMdp& mdp, const Policy& d) {
    const auto pi = stationary_distribution(mdp, d);
    double g = 0.0;
    for (int i = 0; i < mdp.state_count(); ++i) g += pi[i] * mdp.costs[i][d[i]];
    return g;
}

double policy_space_size(const SkipFreeMdp& mdp) {
    double count = 1.0;
    for (int i = 0; i < mdp.state_count(); ++i) {
        count *= mdp.action_count(i);
        if (count > 2e6) return 2e6;
    }
    return count;
}

OracleReport enumerate_policies(const SkipFreeMdp& mdp, bool unichain_only) {
    const double count = policy_space_size(mdp);
    if (count > 1e6) throw TooManyPolicies(count);

    const int n = mdp.state_count();
    Policy d(n, 0);
    OracleReport best;
    best.method = "enumeration";
    best.g_star = std::numeric_limits<double>::infinity();

    bool more = true;
    while (more) {
        ++best.iterations;
        try {
            const double g = policy_average_cost(mdp, d);
            if (g < best.g_star) {
                best.g_star = g;
                best.policy = d;
            }
        } catch (const Multichain&) {
            if (!unichain_only) throw;
        }

        // odometer step over action indices
        more = false;
        for (int i = 0; i < n; ++i) {
            if (++d[i] < mdp.action_count(i)) {
                more = true;
                break;
            }
            d[i] = 0;
        }
    }
    return best;
}

namespace {

/// Evaluation system for average-cost PI: unknowns (g, h_1..h_{n-1}), h_0 = 0.
void evaluate_exact(const SkipFreeMdp& mdp, const Policy& d, double& g, std::vector<double>& h) {
    const int n = mdp.state_count();
    const Eigen::MatrixXd P = dense_chain(mdp, d);

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) {
        A(i, 0) = 1.0;  // g coefficient
        if (i > 0) A(i, i) += 1.0;
        for (int j = 1; j < n; ++j) A(i, j) -= P(i, j);
        b(i) = mdp.costs[i][d[i]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) throw SingularEvaluation();
    const Eigen::VectorXd sol = lu.solve(b);

    g = sol(0);
    h.assign(n, 0.0);
    for (int j = 1; j < n; ++j) h[j] = sol(j);
}

}  // namespace

OracleReport policy_iteration_average(const SkipFreeMdp& mdp) {
    const int n = mdp.state_count();
    Policy d(n, 0);
    OracleReport rep;
    rep.method = "policy-iteration";

    double g = 0.0;
    std::vector<double> h;
    for (;;) {
        ++rep.iterations;
        evaluate_exact(mdp, d, g, h);

        Policy next(n, 0);
        for (int i = 0; i < n; ++i) {
            double incumbent = 0.0;
            double best = std::numeric_limits<double>::infinity();
            int best_a = 0;
            for (int a = 0; a < mdp.action_count(i); ++a) {
                double q = mdp.costs[i][a];
                for (const auto& tr : mdp.transitions[i][a]) q += tr.prob * h[tr.dest];
                if (a == d[i]) incumbent = q;
                if (q < best) {
                    best = q;
                    best_a = a;
                }
            }
            // keep the incumbent unless strictly improved; avoids tie cycling
            next[i] = incumbent <= best + 1e-12 ? d[i] : best_a;
        }
        if (next == d) break;
        d = next;
        if (rep.iterations > 1000000) throw NoConvergence(0.0, rep.iterations);
    }

    rep.g_star = g;
    rep.values = h;
    rep.policy = d;
    return rep;
}

OracleReport relative_value_iteration(const SkipFreeMdp& mdp, double tol, long max_iter) {
    const int n = mdp.state_count();
    std::vector<double> V(n, 0.0), U(n, 0.0);
    Policy greedy(n, 0);
    OracleReport rep;
    rep.method = "relative-value-iteration";

    // Damped operator (half self-weight) so periodic chains still converge;
    // the average cost is unchanged and h is rescaled at the end.
    for (long it = 1; it <= max_iter; ++it) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int best_a = 0;
            for (int a = 0; a < mdp.action_count(i); ++a) {
                double q = mdp.costs[i][a];
                for (const auto& tr : mdp.transitions[i][a]) q += 0.5 * tr.prob * V[tr.dest];
                if (q < best) {
                    best = q;
                    best_a = a;
                }
            }
            U[i] = best + 0.5 * V[i];
            greedy[i] = best_a;
            const double delta = U[i] - V[i];
            lo = std::min(lo, delta);
            hi = std::max(hi, delta);
        }
        const double base = U[0];
        for (int i = 0; i < n; ++i) V[i] = U[i] - base;  // renormalize against state 0
        rep.iterations = it;

        if (hi - lo <= tol) {
            rep.g_star = 0.5 * (hi + lo);
            rep.values.assign(n, 0.0);
            for (int i = 0; i < n; ++i) rep.values[i] = 0.5 * V[i];  // undo damping scale
            rep.policy = greedy;
            return rep;
        }
    }
    throw NoConvergence(tol, max_iter);
}

OracleReport discounted_value_iteration(const SkipFreeMdp& mdp, double beta, double tol,
                                        long max_iter) {
    if (!(beta > 0.0 && beta < 1.0)) throw BadDiscount(beta);
    const int n = mdp.state_count();
    std::vector<double> V(n, 0.0), U(n, 0.0);
    Policy greedy(n, 0);
    OracleReport rep;
    rep.method = "discounted-value-iteration";

    const double stop = tol * (1.0 - beta) / beta;
    for (long it = 1; it <= max_iter; ++it) {
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int best_a = 0;
            for (int a = 0; a < mdp.action_count(i); ++a) {
                double q = mdp.costs[i][a];
                for (const auto& tr : mdp.transitions[i][a]) q += beta * tr.prob * V[tr.dest];
                if (q < best) {
                    best = q;
                    best_a = a;
                }
            }
            worst = std::max(worst, std::abs(best - V[i]));
            U[i] = best;
            greedy[i] = best_a;
        }
        V.swap(U);
        rep.iterations = it;
        if (worst <= stop) {
            rep.g_star = 0.0;
            rep.values = V;
            rep.policy = greedy;
            return rep;
        }
    }
    throw NoConvergence(tol, max_iter);
}

std::vector<double> discounted_policy_value(const SkipFreeMdp& mdp, const Policy& d, double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw BadDiscount(beta);
    const int n = mdp.state_count();
    const Eigen::MatrixXd P = dense_chain(mdp, d);
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - beta * P;
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) b(i) = mdp.costs[i][d[i]];
    const Eigen::VectorXd v = A.partialPivLu().solve(b);
    return {v.data(), v.data() + n};
}

}  // namespace skipfree
