#include "skipfree/model.hpp"

#include <algorithm>
#include <cmath>

#include "skipfree/errors.hpp"

namespace skipfree {

namespace {
constexpr double kRowSumTolerance = 1e-9;
}

double SkipFreeMdp::prob(int state, int action, int dest) const {
    for (const auto& tr : transitions[state][action])
        if (tr.dest == dest) return tr.prob;
    return 0.0;
}

std::string to_string(ChainKind kind) {
    switch (kind) {
        case ChainKind::Recurrent: return "recurrent";
        case ChainKind::CommunicatingOnly: return "communicating (not recurrent)";
        case ChainKind::NotCommunicating: return "not communicating";
    }
    return "unknown";
}

void validate_skip_free(SkipFreeMdp& mdp) {
    const int n = mdp.state_count();
    if (static_cast<int>(mdp.action_labels.size()) != n ||
        static_cast<int>(mdp.transitions.size()) != n ||
        static_cast<int>(mdp.costs.size()) != n)
        throw Error("model arrays do not cover every state");

    for (int i = 0; i < n; ++i) {
        const int acts = mdp.action_count(i);
        if (acts == 0) throw Error("state " + std::to_string(i) + " has an empty action list");
        if (static_cast<int>(mdp.transitions[i].size()) != acts ||
            static_cast<int>(mdp.costs[i].size()) != acts)
            throw Error("state " + std::to_string(i) + " has ragged action arrays");

        for (int a = 0; a < acts; ++a) {
            auto& row = mdp.transitions[i][a];
            double sum = 0.0;
            for (const auto& tr : row) {
                if (tr.dest < 0 || tr.dest >= n) throw SkipFreeViolation(i, a, tr.dest);
                if (tr.prob < 0.0 || !std::isfinite(tr.prob)) throw RowSumError(i, a, tr.prob);
                if (tr.prob == 0.0) continue;
                const bool allowed = tr.dest == i || tr.dest == mdp.tree.parent(i) ||
                                     mdp.tree.is_descendant(i, tr.dest);
                if (!allowed) throw SkipFreeViolation(i, a, tr.dest);
                sum += tr.prob;
            }
            if (std::abs(sum - 1.0) > kRowSumTolerance) throw RowSumError(i, a, sum);

            // Canonical row: renormalized, zero entries dropped, sorted by destination.
            std::vector<Transition> cleaned;
            cleaned.reserve(row.size());
            for (const auto& tr : row)
                if (tr.prob > 0.0) cleaned.push_back({tr.dest, tr.prob / sum});
            std::sort(cleaned.begin(), cleaned.end(),
                      [](const Transition& x, const Transition& y) { return x.dest < y.dest; });
            for (std::size_t k = 1; k < cleaned.size(); ++k)
                if (cleaned[k].dest == cleaned[k - 1].dest)
                    throw Error("duplicate destination " + std::to_string(cleaned[k].dest) +
                                " in (" + std::to_string(i) + ", action " + std::to_string(a) + ")");

            // The largest entry absorbs the renormalization rounding so the
            // canonical row sums to exactly one; validation is then a fixed
            // point and serialized models read back bit for bit.
            std::size_t top = 0;
            for (std::size_t k = 1; k < cleaned.size(); ++k)
                if (cleaned[k].prob > cleaned[top].prob) top = k;
            for (int rounds = 0; rounds < 32; ++rounds) {
                double total = 0.0;
                for (const auto& tr : cleaned) total += tr.prob;
                if (total == 1.0) break;
                cleaned[top].prob += 1.0 - total;
            }
            row = std::move(cleaned);
        }
    }

    for (int a = 0; a < mdp.action_count(0); ++a)
        if (mdp.prob(0, a, 0) >= 1.0) throw DegenerateRoot(a);

    for (int i = 1; i < n; ++i) {
        bool parent_reachable = false;
        for (int a = 0; a < mdp.action_count(i) && !parent_reachable; ++a)
            parent_reachable = mdp.prob(i, a, mdp.tree.parent(i)) > 0.0;
        if (!parent_reachable) throw UnreachableParent(i);
    }
}

void validate_ct(CtMdp& ct) {
    const int n = ct.state_count();
    if (static_cast<int>(ct.action_labels.size()) != n ||
        static_cast<int>(ct.transitions.size()) != n ||
        static_cast<int>(ct.costs.size()) != n)
        throw Error("model arrays do not cover every state");

    for (int i = 0; i < n; ++i) {
        const int acts = ct.action_count(i);
        if (acts == 0) throw Error("state " + std::to_string(i) + " has an empty action list");
        if (static_cast<int>(ct.transitions[i].size()) != acts ||
            static_cast<int>(ct.costs[i].size()) != acts)
            throw Error("state " + std::to_string(i) + " has ragged action arrays");

        for (int a = 0; a < acts; ++a) {
            auto& row = ct.transitions[i][a];
            for (const auto& tr : row) {
                if (tr.dest < 0 || tr.dest >= n) throw SkipFreeViolation(i, a, tr.dest);
                if (tr.prob < 0.0 || !std::isfinite(tr.prob)) throw NegativeRate(i, a);
                if (tr.prob == 0.0) continue;
                const bool allowed = tr.dest == i || tr.dest == ct.tree.parent(i) ||
                                     ct.tree.is_descendant(i, tr.dest);
                if (!allowed) throw SkipFreeViolation(i, a, tr.dest);
            }
            std::vector<Transition> cleaned;
            for (const auto& tr : row)
                if (tr.prob > 0.0) cleaned.push_back(tr);
            std::sort(cleaned.begin(), cleaned.end(),
                      [](const Transition& x, const Transition& y) { return x.dest < y.dest; });
            row = std::move(cleaned);
        }
    }
}

double upper_tail(const SkipFreeMdp& mdp, int i, int a, int k) {
    if (!mdp.tree.is_descendant(i, k)) throw NotDescendant(k, i);
    double sum = 0.0;
    for (const auto& tr : mdp.transitions[i][a])
        if (mdp.tree.in_subtree(k, tr.dest)) sum += tr.prob;
    return sum;
}

ChainClass classify(const SkipFreeMdp& mdp) {
    const int n = mdp.state_count();

    bool recurrent = true;
    for (int i = 0; i < n && recurrent; ++i) {
        for (int a = 0; a < mdp.action_count(i) && recurrent; ++a) {
            if (i != 0 && mdp.prob(i, a, mdp.tree.parent(i)) <= 0.0) recurrent = false;
            if (mdp.prob(i, a, i) >= 1.0) recurrent = false;
        }
    }
    if (recurrent) {
        ChainClass all;
        all.kind = ChainKind::Recurrent;
        all.witness = n - 1;
        all.reachable.resize(n);
        for (int i = 0; i < n; ++i) all.reachable[i] = i;
        return all;
    }

    // Reachability fixed point: states reachable from 0 when the action may be
    // chosen fresh at every step.
    std::vector<char> seen(n, 0);
    seen[0] = 1;
    std::vector<int> frontier{0};
    while (!frontier.empty()) {
        std::vector<int> next;
        for (int i : frontier) {
            for (int a = 0; a < mdp.action_count(i); ++a) {
                for (const auto& tr : mdp.transitions[i][a]) {
                    if (tr.prob > 0.0 && !seen[tr.dest]) {
                        seen[tr.dest] = 1;
                        next.push_back(tr.dest);
                    }
                }
            }
        }
        frontier = std::move(next);
    }

    ChainClass result;
    result.reachable.clear();
    for (int i = 0; i < n; ++i)
        if (seen[i]) result.reachable.push_back(i);
    result.witness = result.reachable.back();
    result.kind = static_cast<int>(result.reachable.size()) == n ? ChainKind::CommunicatingOnly
                                                                 : ChainKind::NotCommunicating;
    return result;
}

}  // namespace skipfree
