#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "skipfree/errors.hpp"
#include "skipfree/models.hpp"
#include "skipfree/reference.hpp"
#include "skipfree/solver.hpp"
#include "skipfree/transforms.hpp"

using namespace skipfree;

namespace {

CtMdp two_state_rates() {
    CtMdp ct;
    ct.tree = Tree({0});
    ct.action_labels = {{"a"}, {"a"}};
    ct.transitions = {{{{1, 1.0}}}, {{{0, 2.0}}}};
    ct.costs = {{3.0}, {1.0}};
    return ct;
}

}  // namespace

TEST_CASE("uniformization embeds rates at the maximum event rate") {
    auto [m, lambda] = uniformize(two_state_rates());
    CHECK(lambda == 2.0);
    CHECK(m.prob(0, 0, 1) == 0.5);
    CHECK(m.prob(0, 0, 0) == 0.5);
    CHECK(m.prob(1, 0, 0) == 1.0);
    CHECK(m.prob(1, 0, 1) == 0.0);
    CHECK(m.costs[0][0] == 6.0);
    CHECK(m.costs[1][0] == 2.0);

    SUBCASE("a state already at the uniform rate keeps only its self-rate") {
        auto ct = two_state_rates();
        ct.transitions[0][0] = {{0, 0.5}, {1, 1.5}};  // total 2, self-rate 0.5
        auto [u, lam] = uniformize(ct);
        CHECK(lam == 2.0);
        CHECK(u.prob(0, 0, 0) == 0.25);
        CHECK(u.prob(0, 0, 1) == 0.75);
    }

    SUBCASE("rows sum to one exactly") {
        QueueSpec q;
        q.classes = 2;
        q.capacity = 3;
        q.arrival = {1.0, 0.7};
        q.service = {{1.5, 3.0}, {1.2, 2.0}};
        q.action_cost = {0.0, 0.8};
        auto [u, lam] = uniformize(make_multiclass_queue(q));
        (void)lam;
        for (int i = 0; i < u.state_count(); ++i)
            for (int a = 0; a < u.action_count(i); ++a) {
                double sum = 0.0;
                for (const auto& tr : u.transitions[i][a]) sum += tr.prob;
                CHECK(std::abs(sum - 1.0) <= 1e-12);
            }
    }

    SUBCASE("zero rates are rejected") {
        CtMdp ct;
        ct.tree = Tree({0});
        ct.action_labels = {{"a"}, {"a"}};
        ct.transitions = {{{}}, {{}}};
        ct.costs = {{1.0}, {1.0}};
        CHECK_THROWS_AS((void)uniformize(ct), ZeroRates);
    }
}

TEST_CASE("continuous-time solve rescales relative costs by lambda") {
    RandomSpec spec;
    spec.states = 6;
    spec.max_actions = 2;
    for (std::uint64_t seed : {1u, 12u, 31u}) {
        auto ct = random_skip_free_rates(seed, spec);
        auto sol = solve_ct_average(ct);

        auto [discrete, lambda] = uniformize(ct);
        auto rep = solve_average(discrete);
        CHECK(sol.lambda == lambda);
        CHECK(sol.report.g_star == rep.g_star);
        for (int j = 0; j < discrete.state_count(); ++j)
            CHECK(sol.report.h[j] == rep.h[j] / lambda);  // exact, not approximate

        auto truth = enumerate_policies(discrete);
        CHECK(sol.report.g_star == doctest::Approx(truth.g_star).epsilon(1e-8));
    }
}

TEST_CASE("discounting becomes an average-cost augmentation") {
    auto m = fixtures::two_policy_model();
    auto aug = discount_to_average(m, 0.9);

    CHECK(aug.mdp.state_count() == 3);
    CHECK(aug.added_terminals == std::vector<int>{2});
    CHECK(aug.origin == std::vector<int>{0, 1, -1});
    CHECK(aug.from_chain);
    CHECK(aug.mdp.tree.is_chain());

    CHECK(aug.mdp.prob(0, 0, 0) == doctest::Approx(0.45).epsilon(1e-12));
    CHECK(aug.mdp.prob(0, 0, 1) == doctest::Approx(0.45).epsilon(1e-12));
    CHECK(aug.mdp.prob(0, 0, 2) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(aug.mdp.prob(1, 1, 0) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(aug.mdp.prob(1, 1, 2) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(aug.mdp.prob(2, 0, 1) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(aug.mdp.prob(2, 0, 2) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(aug.mdp.action_labels[2] == std::vector<std::string>{"return"});
    CHECK(aug.mdp.costs[2][0] == 0.0);

    for (int i = 0; i < aug.mdp.state_count(); ++i)
        for (int a = 0; a < aug.mdp.action_count(i); ++a) {
            double sum = 0.0;
            for (const auto& tr : aug.mdp.transitions[i][a]) sum += tr.prob;
            CHECK(sum == 1.0);
        }

    SUBCASE("discount factor domain is enforced") {
        CHECK_THROWS_AS((void)discount_to_average(m, 0.0), BadDiscount);
        CHECK_THROWS_AS((void)discount_to_average(m, 1.0), BadDiscount);
    }

    SUBCASE("branching trees get one added terminal per leaf") {
        // 0 -> {1, 2}, recurrent, two leaves
        SkipFreeMdp r;
        r.tree = Tree({0, 0});
        r.action_labels = {{"a"}, {"a"}, {"a"}};
        r.transitions = {
            {{{1, 0.5}, {2, 0.5}}},
            {{{0, 0.75}, {1, 0.25}}},
            {{{0, 1.0}}},
        };
        r.costs = {{1.0}, {4.0}, {2.0}};
        validate_skip_free(r);

        auto a2 = discount_to_average(r, 0.5);
        CHECK(a2.added_terminals == std::vector<int>{3, 4});
        CHECK(a2.mdp.tree.parent(3) == 1);
        CHECK(a2.mdp.tree.parent(4) == 2);
        CHECK_FALSE(a2.from_chain);
        CHECK_THROWS_AS((void)recover_discounted_values(a2, solve_average(a2.mdp)), NotChain);
    }
}

TEST_CASE("discounted values recovered from the augmented solve") {
    auto m = fixtures::two_policy_model();
    const double beta = 0.5;
    auto aug = discount_to_average(m, beta);
    auto rep = solve_average(aug.mdp);
    auto v = recover_discounted_values(aug, rep);

    // Exact discounted optimum of the chain: play b, v = (0.96, 2.88).
    REQUIRE(v.size() == 2);
    CHECK(v[0] == doctest::Approx(0.96).epsilon(1e-9));
    CHECK(v[1] == doctest::Approx(2.88).epsilon(1e-9));
    CHECK(rep.policy[1] == 1);

    SUBCASE("matches value iteration on random chains") {
        RandomSpec spec;
        spec.chain = true;
        spec.max_actions = 3;
        for (std::uint64_t seed : {5u, 9u, 26u}) {
            for (double b : {0.5, 0.9}) {
                spec.states = 4 + static_cast<int>(seed % 3);
                auto chain = random_skip_free(seed, spec);
                auto a = discount_to_average(chain, b);
                auto vals = recover_discounted_values(a, solve_average(a.mdp));
                auto dvi = discounted_value_iteration(chain, b);
                for (int j = 0; j < chain.state_count(); ++j)
                    CHECK(vals[j] == doctest::Approx(dvi.values[j]).epsilon(1e-6));
            }
        }
    }

    SUBCASE("constant costs recover the geometric series") {
        SkipFreeMdp flat = m;
        for (auto& per_state : flat.costs)
            for (auto& c : per_state) c = 2.0;
        auto a = discount_to_average(flat, 0.9);
        auto vals = recover_discounted_values(a, solve_average(a.mdp));
        for (double x : vals) CHECK(x == doctest::Approx(20.0).epsilon(1e-8));
    }
}

TEST_CASE("communicating chain with a cut action") {
    auto m = fixtures::communicating_model();
    auto rep = solve_communicating(m);

    CHECK(rep.g_star == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(rep.distinguished == 1);
    CHECK(rep.recurrent_class == std::vector<int>{1, 2});
    CHECK(rep.policy[1] == 1);
    CHECK(rep.h[0] == 0.0);
    CHECK(rep.h[1] == doctest::Approx(-4.5).epsilon(1e-9));
    CHECK(rep.h[2] == doctest::Approx(-4.0).epsilon(1e-9));
    CHECK(rep.iterations == 2);
    REQUIRE(rep.trace.size() == 3);
    CHECK(rep.trace[0].g == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(rep.trace[1].g == doctest::Approx(0.5).epsilon(1e-12));

    SUBCASE("the optimality equations hold on every state") {
        CHECK(residual(m, rep.g_star, rep.h) <= 1e-9);
    }
}

TEST_CASE("recurrent input reduces to the plain solver") {
    auto m = fixtures::two_policy_model();
    auto plain = solve_average(m);
    auto comm = solve_communicating(m);
    CHECK(comm.g_star == doctest::Approx(plain.g_star).epsilon(1e-12));
    CHECK(comm.policy == plain.policy);
    CHECK(comm.distinguished == 0);
    CHECK(comm.recurrent_class == plain.recurrent_class);
    for (std::size_t j = 0; j < plain.h.size(); ++j)
        CHECK(comm.h[j] == doctest::Approx(plain.h[j]).epsilon(1e-12));
}

TEST_CASE("communicating random instances match unichain enumeration") {
    RandomSpec spec;
    spec.states = 6;
    spec.max_actions = 3;
    spec.target = ChainKind::CommunicatingOnly;
    for (std::uint64_t seed : {1u, 4u, 13u, 40u}) {
        auto m = random_skip_free(seed, spec);
        REQUIRE(classify(m).kind == ChainKind::CommunicatingOnly);
        auto rep = solve_communicating(m);
        auto truth = enumerate_policies(m, true);
        CHECK(rep.g_star == doctest::Approx(truth.g_star).epsilon(1e-8));
        CHECK(residual(m, rep.g_star, rep.h) <= 1e-8);
        CHECK(rep.h[0] == 0.0);
    }
}
