#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "skipfree/errors.hpp"
#include "skipfree/models.hpp"
#include "skipfree/reference.hpp"
#include "skipfree/solver.hpp"

using namespace skipfree;

TEST_CASE("two-policy chain solves in two improvement steps") {
    auto m = fixtures::two_policy_model();
    auto rep = solve_average(m);

    CHECK(rep.iterations == 2);
    CHECK(rep.g_star == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(rep.h[0] == 0.0);
    CHECK(rep.h[1] == doctest::Approx(1.6).epsilon(1e-12));
    CHECK(rep.policy == Policy{0, 1});
    CHECK(m.action_labels[1][rep.policy[1]] == "b");
    CHECK(rep.distinguished == 0);
    CHECK(rep.recurrent_class == std::vector<int>{0, 1});

    REQUIRE(rep.trace.size() == 3);
    CHECK(rep.trace[0].iter == 0);
    CHECK(rep.trace[0].g == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.trace[1].g == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(rep.trace[1].u0 == doctest::Approx(-0.2).epsilon(1e-12));
    CHECK(rep.trace[2].g == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(std::abs(rep.trace[2].u0) < 1e-12);
}

TEST_CASE("root variants agree on the optimum") {
    auto m = fixtures::two_policy_model();
    auto mean = solve_average(m, RootVariant::MeanImprovement);
    auto first = solve_average(m, RootVariant::FirstReturn);
    auto opt = solve_average(m, RootVariant::OptimalityEq);
    CHECK(first.g_star == doctest::Approx(mean.g_star).epsilon(1e-10));
    CHECK(opt.g_star == doctest::Approx(mean.g_star).epsilon(1e-10));
    CHECK(first.policy == mean.policy);
    CHECK(opt.policy == mean.policy);
}

TEST_CASE("variant names round trip") {
    for (auto v : {RootVariant::FirstReturn, RootVariant::OptimalityEq,
                   RootVariant::MeanImprovement})
        CHECK(variant_from_string(to_string(v)) == v);
    CHECK(to_string(RootVariant::MeanImprovement) == "mean-improvement");
    CHECK_THROWS_AS((void)variant_from_string("fastest"), Error);
}

TEST_CASE("policy evaluation satisfies the renewal identities") {
    auto m = fixtures::two_policy_model();

    // the cycle is the root sojourn plus the first passage back, so tau
    // includes the 1/(1-p00)=2 steps spent at the root before leaving
    auto always_a = evaluate_policy(m, {0, 0});
    CHECK(always_a.g == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(always_a.tau == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(always_a.C == doctest::Approx(4.0).epsilon(1e-12));

    auto always_b = evaluate_policy(m, {0, 1});
    CHECK(always_b.g == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(always_b.tau == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(always_b.C == doctest::Approx(2.4).epsilon(1e-12));

    for (const auto& stats : {always_a, always_b}) {
        CHECK(std::abs(stats.g * stats.tau - stats.C) <= 1e-12);
        CHECK(std::abs(stats.H_at(stats.g)) <= 1e-12);
    }

    SUBCASE("matches the stationary-distribution oracle") {
        CHECK(always_a.g == doctest::Approx(policy_average_cost(m, {0, 0})).epsilon(1e-12));
        CHECK(always_b.g == doctest::Approx(policy_average_cost(m, {0, 1})).epsilon(1e-12));
    }
}

TEST_CASE("backward sweep computes first-passage costs and times") {
    auto m = fixtures::two_policy_model();

    auto sweep = backward_sweep(m, 1.0);
    CHECK(sweep.action[1] == 1);
    CHECK(sweep.y[1] == doctest::Approx(1.4).epsilon(1e-12));
    CHECK(sweep.t[1] == doctest::Approx(1.0).epsilon(1e-12));

    Policy keep_a{0, 0};
    auto restricted = backward_sweep(m, 1.0, &keep_a);
    CHECK(restricted.action[1] == 0);
    CHECK(restricted.y[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(restricted.t[1] == doctest::Approx(2.0).epsilon(1e-12));

    SUBCASE("root update produces the documented step") {
        root_update(m, sweep, RootVariant::MeanImprovement);
        REQUIRE(sweep.root.has_value());
        CHECK(sweep.root->action == 0);
        CHECK(sweep.root->u0 == doctest::Approx(-0.2).epsilon(1e-12));
        CHECK(sweep.root->t0 == doctest::Approx(3.0).epsilon(1e-12));
    }

    SUBCASE("u0 under mean improvement never exceeds the other variants") {
        auto base = backward_sweep(m, 1.0);
        double u[3];
        int k = 0;
        for (auto v : {RootVariant::MeanImprovement, RootVariant::FirstReturn,
                       RootVariant::OptimalityEq}) {
            auto copy = base;
            root_update(m, copy, v);
            u[k++] = copy.root->u0;
        }
        CHECK(u[0] <= u[1] + 1e-12);
        CHECK(u[0] <= u[2] + 1e-12);
    }
}

TEST_CASE("optimality residual") {
    auto m = fixtures::two_policy_model();
    auto rep = solve_average(m);
    CHECK(residual(m, rep.g_star, rep.h) <= 1e-10);

    SUBCASE("shifting g by one shifts the residual to one") {
        CHECK(residual(m, rep.g_star + 1.0, rep.h) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("a suboptimal pair has positive residual") {
        CHECK(residual(m, 1.0, {0.0, 2.0}) > 1e-3);
    }
}

TEST_CASE("relative costs stack first-passage costs along tree paths") {
    RandomSpec spec;
    spec.states = 7;
    spec.max_actions = 3;
    for (std::uint64_t seed : {11u, 23u, 47u}) {
        auto m = random_skip_free(seed, spec);
        auto rep = solve_average(m);
        auto final_sweep = backward_sweep(m, rep.g_star, &rep.policy);
        for (int j = 1; j < m.state_count(); ++j)
            CHECK(rep.h[j] - rep.h[m.tree.parent(j)] ==
                  doctest::Approx(final_sweep.y[j]).epsilon(1e-9));
        CHECK(rep.h[0] == 0.0);
        CHECK(residual(m, rep.g_star, rep.h) <= 1e-8);
    }
}

TEST_CASE("trace decreases strictly until the terminal iteration") {
    RandomSpec spec;
    spec.states = 8;
    spec.max_actions = 3;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto m = random_skip_free(seed, spec);
        auto rep = solve_average(m);
        for (std::size_t k = 1; k + 1 < rep.trace.size(); ++k)
            CHECK(rep.trace[k].g < rep.trace[k - 1].g);
        CHECK(rep.trace.back().g <= rep.trace[rep.trace.size() - 2].g + 1e-12);
        CHECK(rep.iterations <= static_cast<int>(policy_space_size(m)));
    }
}

TEST_CASE("constant costs are optimal everywhere") {
    RandomSpec spec;
    spec.states = 6;
    auto m = random_skip_free(5, spec);
    for (auto& per_state : m.costs)
        for (auto& c : per_state) c = 3.7;
    auto rep = solve_average(m);
    CHECK(rep.g_star == doctest::Approx(3.7).epsilon(1e-10));
    for (double hj : rep.h) CHECK(std::abs(hj) < 1e-9);
    CHECK(rep.iterations == 1);
}

TEST_CASE("single-policy model reduces to evaluation") {
    RandomSpec spec;
    spec.states = 5;
    spec.max_actions = 1;
    auto m = random_skip_free(9, spec);
    auto rep = solve_average(m);
    CHECK(rep.g_star == doctest::Approx(evaluate_policy(m, rep.policy).g).epsilon(1e-12));
    CHECK(rep.iterations == 1);
}

TEST_CASE("iteration cap raises with the partial trace attached") {
    auto m = fixtures::two_policy_model();
    try {
        (void)solve_average(m, RootVariant::MeanImprovement, kDefaultTol, 1);
        FAIL("expected MaxIterExceeded");
    } catch (const MaxIterExceeded& e) {
        REQUIRE(e.partial.trace.size() == 2);
        CHECK(e.partial.iterations == 1);
        CHECK(e.partial.trace[1].g == doctest::Approx(0.8).epsilon(1e-12));
    }
}

TEST_CASE("starting from the optimum converges immediately") {
    auto m = fixtures::two_policy_model();
    auto rep = solve_average(m, RootVariant::MeanImprovement, kDefaultTol, kDefaultMaxIter,
                             Policy{0, 1});
    CHECK(rep.iterations == 1);
    CHECK(rep.trace[0].g == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(rep.g_star == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("non-recurrent input is rejected") {
    auto m = fixtures::communicating_model();
    CHECK_THROWS_AS((void)solve_average(m), NotRecurrent);

    SUBCASE("a restricted sweep through a cut action divides by zero") {
        Policy cut{0, 1, 0};
        CHECK_THROWS_AS((void)backward_sweep(m, 0.0, &cut), DivisionByZeroTransition);
    }
}

TEST_CASE("reachability under a fixed policy") {
    auto m = fixtures::communicating_model();
    Policy cycle{0, 1, 0};
    CHECK(recurrent_class_under(m, cycle, 1) == std::vector<int>{1, 2});
    CHECK(recurrent_class_under(m, cycle, 0) == std::vector<int>{0, 1, 2});
    Policy home{0, 0, 0};
    CHECK(recurrent_class_under(m, home, 0) == std::vector<int>{0, 1});
}
