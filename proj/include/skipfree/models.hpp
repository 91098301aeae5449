#ifndef SKIPFREE_MODELS_HPP
#define SKIPFREE_MODELS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "skipfree/model.hpp"

namespace skipfree {

/*
 * Multiclass single-server queue with at most `capacity` jobs in order of
 * arrival. A state lists the class of each job, newest first; children of a
 * state are the states with one more job, ordered by class. Service works on
 * the newest job, so completions step to the parent and the chain never skips
 * levels downward.
 */
struct QueueSpec {
    int classes = 1;
    int capacity = 1;
    std::vector<double> arrival;                     // per class
    std::vector<std::vector<double>> service;        // per class, per action
    std::vector<double> action_cost;                 // per action, defaults to 0
    std::function<double(const std::vector<int>&, int)> cost_rate;  // overrides the default
    long long max_states = 100000;
};

/// Rate model for the queue; default cost rate is job count plus action cost.
CtMdp make_multiclass_queue(const QueueSpec& spec);

/// One action's probabilities (or rates) at a state of a birth-death chain.
struct BirthDeathRow {
    double up = 0.0;
    double stay = 0.0;
    double down = 0.0;
    double cost = 0.0;
};

/// Chain 0..M; rows[i] lists the actions at state i. Probabilities must obey
/// the boundaries: no down mass at 0, no up mass at M.
SkipFreeMdp make_birth_death(int M, const std::vector<std::vector<BirthDeathRow>>& rows);

/// Same shape with entries read as rates.
CtMdp make_birth_death_rates(int M, const std::vector<std::vector<BirthDeathRow>>& rows);

/*
 * Seeded random instances for testing. All draws come from one mt19937_64
 * stream, so a seed pins the instance bit for bit.
 */
struct RandomSpec {
    int states = 6;
    int max_actions = 2;     // per-state action count drawn from 1..max_actions
    int max_branching = 3;   // soft cap on children per node
    bool chain = false;      // force a linear tree
    ChainKind target = ChainKind::Recurrent;  // Recurrent or CommunicatingOnly
    double cost_scale = 10.0;
};

SkipFreeMdp random_skip_free(std::uint64_t seed, const RandomSpec& spec);

/// Rate model variant; always parent-positive so uniformization is recurrent.
CtMdp random_skip_free_rates(std::uint64_t seed, const RandomSpec& spec);

}  // namespace skipfree

#endif
