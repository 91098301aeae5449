#include "skipfree/models.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "skipfree/errors.hpp"

namespace skipfree {

namespace {

std::vector<std::string> numbered_actions(std::size_t count) {
    std::vector<std::string> labels(count);
    for (std::size_t a = 0; a < count; ++a) labels[a] = "a" + std::to_string(a);
    return labels;
}

std::string queue_label(const std::vector<int>& jobs, int capacity) {
    std::string s = "(";
    for (int k = 0; k < capacity; ++k) {
        if (k) s += ",";
        s += std::to_string(k < static_cast<int>(jobs.size()) ? jobs[k] : 0);
    }
    s += ")";
    return s;
}

}  // namespace

CtMdp make_multiclass_queue(const QueueSpec& spec) {
    const int K = spec.classes;
    const int M = spec.capacity;
    if (K < 1) throw GenerationFailed("queue needs at least one class");
    if (M < 1) throw GenerationFailed("queue needs positive capacity");

    std::vector<double> arrival = spec.arrival;
    if (arrival.empty()) arrival.assign(K, 1.0);
    if (static_cast<int>(arrival.size()) != K)
        throw GenerationFailed("arrival rates do not match the class count");
    if (static_cast<int>(spec.service.size()) != K)
        throw GenerationFailed("service rates do not match the class count");
    const std::size_t actions = spec.service[0].size();
    if (actions == 0) throw GenerationFailed("queue needs at least one action");
    for (const auto& row : spec.service)
        if (row.size() != actions)
            throw GenerationFailed("service rates must list the same actions for every class");
    std::vector<double> action_cost = spec.action_cost;
    if (action_cost.empty()) action_cost.assign(actions, 0.0);
    if (action_cost.size() != actions)
        throw GenerationFailed("action costs do not match the action count");

    long long count = 1, level = 1;
    for (int m = 1; m <= M; ++m) {
        level *= K;
        count += level;
        if (count > spec.max_states) throw CapacityOverflow(count, spec.max_states);
    }

    const int n = static_cast<int>(count);
    std::vector<int> parents(n > 1 ? n - 1 : 0, 0);
    std::vector<std::vector<int>> jobs_of(n);      // newest job first
    std::vector<std::vector<int>> child_ids(n);    // in class order

    // depth-first enumeration, children ordered by arriving class
    int next_id = 0;
    struct Frame {
        std::vector<int> jobs;
        int parent;
    };
    std::vector<Frame> stack;
    stack.push_back({{}, -1});
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        const int id = next_id++;
        if (f.parent >= 0) {
            parents[id - 1] = f.parent;
            child_ids[f.parent].push_back(id);
        }
        if (static_cast<int>(f.jobs.size()) < M) {
            // push classes in reverse so class 1 pops first (preorder ids ascend by class)
            for (int k = K; k >= 1; --k) {
                std::vector<int> child = {k};
                child.insert(child.end(), f.jobs.begin(), f.jobs.end());
                stack.push_back({std::move(child), id});
            }
        }
        jobs_of[id] = std::move(f.jobs);
    }

    CtMdp out;
    out.tree = Tree(parents);
    out.action_labels.resize(n);
    out.transitions.resize(n);
    out.costs.resize(n);
    out.state_labels.resize(n);
    for (int i = 0; i < n; ++i) {
        const std::vector<int>& jobs = jobs_of[i];
        out.state_labels[i] = queue_label(jobs, M);
        out.action_labels[i] = numbered_actions(actions);
        out.transitions[i].resize(actions);
        out.costs[i].resize(actions);
        std::vector<int> padded(M, 0);
        std::copy(jobs.begin(), jobs.end(), padded.begin());
        for (std::size_t a = 0; a < actions; ++a) {
            std::vector<Transition>& row = out.transitions[i][a];
            if (!jobs.empty()) {
                const double mu = spec.service[jobs[0] - 1][a];
                if (mu > 0.0) row.push_back({out.tree.parent(i), mu});
            }
            if (static_cast<int>(jobs.size()) < M)
                for (int k = 1; k <= K; ++k)
                    if (arrival[k - 1] > 0.0) row.push_back({child_ids[i][k - 1], arrival[k - 1]});
            out.costs[i][a] = spec.cost_rate
                                  ? spec.cost_rate(padded, static_cast<int>(a))
                                  : static_cast<double>(jobs.size()) + action_cost[a];
        }
    }
    validate_ct(out);
    return out;
}

namespace {

template <typename Model>
void fill_birth_death(Model& out, int M, const std::vector<std::vector<BirthDeathRow>>& rows) {
    if (M < 1) throw Error("birth-death chain needs at least one state above the root");
    if (static_cast<int>(rows.size()) != M + 1)
        throw Error("birth-death chain needs one action list per state");
    std::vector<int> parents(M);
    for (int i = 1; i <= M; ++i) parents[i - 1] = i - 1;
    out.tree = Tree(parents);
    const int n = M + 1;
    out.action_labels.resize(n);
    out.transitions.resize(n);
    out.costs.resize(n);
    for (int i = 0; i < n; ++i) {
        if (rows[i].empty()) throw Error("state " + std::to_string(i) + " has no actions");
        out.action_labels[i] = numbered_actions(rows[i].size());
        for (const BirthDeathRow& r : rows[i]) {
            if (i == 0 && r.down != 0.0) throw Error("down mass at the root");
            if (i == M && r.up != 0.0) throw Error("up mass at the top state");
            std::vector<Transition> row;
            if (r.down > 0.0) row.push_back({i - 1, r.down});
            if (r.stay > 0.0) row.push_back({i, r.stay});
            if (r.up > 0.0) row.push_back({i + 1, r.up});
            out.transitions[i].push_back(std::move(row));
            out.costs[i].push_back(r.cost);
        }
    }
}

}  // namespace

SkipFreeMdp make_birth_death(int M, const std::vector<std::vector<BirthDeathRow>>& rows) {
    SkipFreeMdp out;
    fill_birth_death(out, M, rows);
    validate_skip_free(out);
    return out;
}

CtMdp make_birth_death_rates(int M, const std::vector<std::vector<BirthDeathRow>>& rows) {
    CtMdp out;
    fill_birth_death(out, M, rows);
    validate_ct(out);
    return out;
}

namespace {

struct Draw {
    std::mt19937_64 rng;
    explicit Draw(std::uint64_t seed) : rng(seed) {}
    double u01() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
    int below(int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }
    bool coin() { return (rng() & 1u) != 0; }
};

std::vector<int> random_parents(Draw& d, const RandomSpec& spec) {
    const int n = spec.states;
    std::vector<int> parents(n - 1);
    std::vector<int> kids(n, 0);
    for (int i = 1; i < n; ++i) {
        int parent;
        if (spec.chain) {
            parent = i - 1;
        } else {
            std::vector<int> open;
            for (int p = 0; p < i; ++p)
                if (kids[p] < spec.max_branching) open.push_back(p);
            parent = open.empty() ? d.below(i) : open[d.below(static_cast<int>(open.size()))];
        }
        parents[i - 1] = parent;
        ++kids[parent];
    }
    return parents;
}

/// Weighted row over {parent?, self?, descendants}; parent_mass < 0 omits the
/// parent entirely (used for cut actions and the root).
std::vector<Transition> random_row(Draw& d, const Tree& tree, int i, double parent_mass) {
    std::vector<int> desc;
    for (int j = 0; j < tree.node_count(); ++j)
        if (j != i && tree.in_subtree(i, j) && d.u01() < 0.45) desc.push_back(j);
    if (i == 0 && desc.empty() && !tree.children(0).empty()) {
        const auto& ch = tree.children(0);
        desc.push_back(ch[d.below(static_cast<int>(ch.size()))]);
    }

    std::vector<Transition> row;
    double rem = 1.0;
    if (parent_mass >= 0.0) {
        row.push_back({tree.parent(i), parent_mass});
        rem -= parent_mass;
    }
    double raw_self = d.coin() ? 0.1 + d.u01() : 0.0;
    std::vector<double> raw(desc.size());
    double total = raw_self;
    for (std::size_t k = 0; k < desc.size(); ++k) {
        raw[k] = 0.1 + d.u01();
        total += raw[k];
    }
    if (total <= 0.0) {
        if (parent_mass >= 0.0 && rem > 0.0) row[0].prob += rem;  // all mass to the parent
        else row.push_back({i, rem});                             // nothing else: absorb
        return row;
    }
    if (i == 0) {
        // keep at least 5% leaving the root
        const double self_share = raw_self / total;
        if (self_share > 0.95) {
            raw_self = 0.95 / 0.05 * (total - raw_self);
            total = raw_self;
            for (double w : raw) total += w;
        }
    }
    if (raw_self > 0.0) row.push_back({i, rem * raw_self / total});
    for (std::size_t k = 0; k < desc.size(); ++k) row.push_back({desc[k], rem * raw[k] / total});
    return row;
}

SkipFreeMdp build_random(Draw& d, const RandomSpec& spec) {
    SkipFreeMdp m;
    m.tree = Tree(random_parents(d, spec));
    const int n = spec.states;
    m.action_labels.resize(n);
    m.transitions.resize(n);
    m.costs.resize(n);

    const bool communicating = spec.target == ChainKind::CommunicatingOnly;
    // one designated cut guarantees the model is not recurrent
    const int forced_cut = communicating ? 1 + d.below(n - 1) : -1;

    for (int i = 0; i < n; ++i) {
        int count = 1 + d.below(spec.max_actions);
        if (i == forced_cut && count < 2) count = 2;
        m.action_labels[i] = numbered_actions(count);
        for (int a = 0; a < count; ++a) {
            bool cut = false;
            if (communicating && i > 0 && a > 0)
                cut = (i == forced_cut && a == 1) || d.u01() < 0.35;
            const double parent_mass = (i == 0 || cut) ? -1.0 : 0.05 + 0.9 * d.u01();
            m.transitions[i].push_back(random_row(d, m.tree, i, parent_mass));
            m.costs[i].push_back(d.u01() * spec.cost_scale);
        }
    }

    if (communicating) {
        // make every state reachable from the root: give each child mass on
        // some action of its parent
        for (int j = 1; j < n; ++j) {
            const int p = m.tree.parent(j);
            bool reached = false;
            for (std::size_t a = 0; a < m.transitions[p].size() && !reached; ++a)
                for (const Transition& t : m.transitions[p][a])
                    if (t.dest == j && t.prob > 0.0) reached = true;
            if (reached) continue;
            auto& row = m.transitions[p][d.below(static_cast<int>(m.transitions[p].size()))];
            for (Transition& t : row) t.prob *= 0.95;
            row.push_back({j, 0.05});
        }
    }
    validate_skip_free(m);
    return m;
}

}  // namespace

SkipFreeMdp random_skip_free(std::uint64_t seed, const RandomSpec& spec) {
    if (spec.states < 2) throw GenerationFailed("need at least two states");
    if (spec.max_actions < 1) throw GenerationFailed("need at least one action");
    if (spec.target == ChainKind::NotCommunicating)
        throw GenerationFailed("target class must be recurrent or communicating");
    Draw d(seed);
    for (int attempt = 0; attempt < 64; ++attempt) {
        SkipFreeMdp m = build_random(d, spec);
        if (classify(m).kind == spec.target) return m;
    }
    throw GenerationFailed("no instance of the requested class after 64 attempts");
}

CtMdp random_skip_free_rates(std::uint64_t seed, const RandomSpec& spec) {
    if (spec.states < 2) throw GenerationFailed("need at least two states");
    if (spec.max_actions < 1) throw GenerationFailed("need at least one action");
    Draw d(seed);
    CtMdp m;
    m.tree = Tree(random_parents(d, spec));
    const int n = spec.states;
    m.action_labels.resize(n);
    m.transitions.resize(n);
    m.costs.resize(n);
    for (int i = 0; i < n; ++i) {
        const int count = 1 + d.below(spec.max_actions);
        m.action_labels[i] = numbered_actions(count);
        for (int a = 0; a < count; ++a) {
            std::vector<Transition> row;
            if (i > 0) row.push_back({m.tree.parent(i), 0.2 + 2.0 * d.u01()});
            if (d.coin()) row.push_back({i, 1.5 * d.u01()});
            std::vector<int> desc;
            for (int j = 0; j < n; ++j)
                if (j != i && m.tree.in_subtree(i, j) && d.u01() < 0.45) desc.push_back(j);
            if (i == 0 && desc.empty() && !m.tree.children(0).empty()) {
                const auto& ch = m.tree.children(0);
                desc.push_back(ch[d.below(static_cast<int>(ch.size()))]);
            }
            for (int j : desc) row.push_back({j, 0.1 + 1.5 * d.u01()});
            m.transitions[i].push_back(std::move(row));
            m.costs[i].push_back(d.u01() * spec.cost_scale);
        }
    }
    validate_ct(m);
    return m;
}

}  // namespace skipfree
