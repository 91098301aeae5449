#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skipfree/errors.hpp"
#include "skipfree/model_io.hpp"
#include "skipfree/models.hpp"
#include "skipfree/reference.hpp"
#include "skipfree/solver.hpp"
#include "skipfree/transforms.hpp"

namespace sf = skipfree;

namespace {

sf::ParsedModel load_model(const std::string& path) {
    if (path == "-") return sf::parse_model(std::cin);
    std::ifstream in(path);
    if (!in) throw sf::Error("cannot open '" + path + "'");
    return sf::parse_model(in);
}

void write_out(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw sf::Error("cannot write '" + path + "'");
    out << text;
}

/// Discrete view of the input: ctmdp inputs are uniformized on the way in.
struct Prepared {
    sf::SkipFreeMdp mdp;
    double lambda = 0.0;  // 0 for native dtmdp input
};

Prepared prepare(const sf::ParsedModel& parsed) {
    Prepared p;
    if (parsed.is_discrete()) {
        p.mdp = parsed.dtmdp();
    } else {
        auto [mdp, lambda] = sf::uniformize(parsed.ctmdp());
        p.mdp = std::move(mdp);
        p.lambda = lambda;
    }
    return p;
}

std::string action_name(const sf::SkipFreeMdp& mdp, int state, int action) {
    return mdp.action_labels[state][action];
}

void print_solution(const sf::SkipFreeMdp& mdp, const sf::SolveReport& rep, double lambda,
                    const std::string& format) {
    std::vector<double> h = rep.h;
    if (lambda > 0.0)
        for (double& v : h) v /= lambda;

    if (format == "csv") {
        std::cout << sf::trace_csv(rep);
        return;
    }
    if (format == "structured") {
        std::cout << "states=" << mdp.state_count() << "\n";
        std::cout << "variant=" << sf::to_string(rep.variant) << "\n";
        std::cout << "g_star=" << sf::format_double(rep.g_star) << "\n";
        std::cout << "iterations=" << rep.iterations << "\n";
        std::cout << "distinguished=" << rep.distinguished << "\n";
        if (lambda > 0.0) std::cout << "lambda=" << sf::format_double(lambda) << "\n";
        for (int i = 0; i < mdp.state_count(); ++i)
            std::cout << "policy_" << i << "=" << action_name(mdp, i, rep.policy[i]) << "\n";
        for (int i = 0; i < mdp.state_count(); ++i)
            std::cout << "h_" << i << "=" << sf::format_double(h[i]) << "\n";
        return;
    }
    std::cout << "g* = " << sf::format_double(rep.g_star) << "\n";
    std::cout << "iterations: " << rep.iterations << "\n";
    std::cout << "variant: " << sf::to_string(rep.variant) << "\n";
    if (lambda > 0.0) std::cout << "uniformization rate: " << sf::format_double(lambda) << "\n";
    if (rep.distinguished != 0)
        std::cout << "distinguished state: " << rep.distinguished << "\n";
    std::cout << "recurrent class:";
    for (int i : rep.recurrent_class) std::cout << " " << i;
    std::cout << "\npolicy:";
    for (int i = 0; i < mdp.state_count(); ++i)
        std::cout << " " << i << ":" << action_name(mdp, i, rep.policy[i]);
    std::cout << "\nh:";
    for (double v : h) std::cout << " " << sf::format_double(v);
    std::cout << "\n";
}

int cmd_validate(const std::string& input, const std::string& format) {
    sf::ParsedModel parsed = load_model(input);
    Prepared p = prepare(parsed);
    const sf::ChainClass cls = sf::classify(p.mdp);
    const std::string kind = parsed.is_discrete() ? "dtmdp" : "ctmdp";
    if (format == "structured") {
        std::cout << "kind=" << kind << "\n";
        std::cout << "states=" << p.mdp.state_count() << "\n";
        std::cout << "classification=" << sf::to_string(cls.kind) << "\n";
        if (cls.kind == sf::ChainKind::NotCommunicating)
            std::cout << "witness=" << cls.witness << "\n";
        if (parsed.discount)
            std::cout << "discount=" << sf::format_double(*parsed.discount) << "\n";
    } else {
        std::cout << "valid " << kind << ": " << p.mdp.state_count() << " states\n";
        std::cout << "classification: " << sf::to_string(cls.kind) << "\n";
        if (cls.kind == sf::ChainKind::NotCommunicating)
            std::cout << "unreached frontier witness: state " << cls.witness << "\n";
        if (parsed.discount)
            std::cout << "discount: " << sf::format_double(*parsed.discount) << "\n";
    }
    return 0;
}

int cmd_solve(const std::string& input, const std::string& variant_name, double tol,
              long max_iter, bool communicating, const std::string& format) {
    sf::ParsedModel parsed = load_model(input);
    Prepared p = prepare(parsed);
    const sf::RootVariant variant = sf::variant_from_string(variant_name);

    sf::SolveReport rep;
    if (communicating) {
        rep = sf::solve_communicating(p.mdp, variant, tol, max_iter);
    } else {
        try {
            rep = sf::solve_average(p.mdp, variant, tol, max_iter);
        } catch (const sf::NotRecurrent&) {
            if (sf::classify(p.mdp).kind == sf::ChainKind::CommunicatingOnly)
                std::cerr << "hint: the model is communicating; rerun with --communicating\n";
            throw;
        }
    }
    print_solution(p.mdp, rep, p.lambda, format);
    return 0;
}

struct CompareRow {
    std::string method;
    bool ran = false;
    std::string note;  // reason when skipped
    double g = 0.0;
    long iterations = 0;
    double millis = 0.0;
};

template <typename F>
CompareRow timed_row(const std::string& method, F&& run) {
    CompareRow row;
    row.method = method;
    const auto start = std::chrono::steady_clock::now();
    try {
        const auto [g, iters] = run();
        row.g = g;
        row.iterations = iters;
        row.ran = true;
    } catch (const sf::TooManyPolicies&) {
        row.note = "skipped: policy space too large";
    } catch (const sf::SingularEvaluation&) {
        row.note = "skipped: needs a recurrent model";
    }
    row.millis = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - start)
                     .count();
    return row;
}

int cmd_compare(const std::string& input, double agree_tol, long max_iter,
                const std::string& format, double check_offset) {
    sf::ParsedModel parsed = load_model(input);
    Prepared p = prepare(parsed);
    const sf::SkipFreeMdp& m = p.mdp;
    const sf::ChainClass cls = sf::classify(m);
    if (cls.kind == sf::ChainKind::NotCommunicating) throw sf::NotCommunicating(cls.witness);
    const bool recurrent = cls.kind == sf::ChainKind::Recurrent;

    using Pair = std::pair<double, long>;
    std::vector<CompareRow> rows;
    for (const sf::RootVariant v :
         {sf::RootVariant::FirstReturn, sf::RootVariant::OptimalityEq,
          sf::RootVariant::MeanImprovement}) {
        rows.push_back(timed_row("skipfree/" + sf::to_string(v), [&]() -> Pair {
            const sf::SolveReport rep = recurrent
                                            ? sf::solve_average(m, v, sf::kDefaultTol, max_iter)
                                            : sf::solve_communicating(m, v, sf::kDefaultTol,
                                                                      max_iter);
            return {rep.g_star + check_offset, rep.iterations};
        }));
    }
    if (recurrent) {
        rows.push_back(timed_row("policy-iteration", [&]() -> Pair {
            const sf::OracleReport rep = sf::policy_iteration_average(m);
            return {rep.g_star, rep.iterations};
        }));
    } else {
        CompareRow skip;
        skip.method = "policy-iteration";
        skip.note = "skipped: needs a recurrent model";
        rows.push_back(skip);
    }
    rows.push_back(timed_row("relative-value-iteration", [&]() -> Pair {
        const sf::OracleReport rep = sf::relative_value_iteration(m, 1e-9);
        return {rep.g_star, rep.iterations};
    }));
    rows.push_back(timed_row("enumeration", [&]() -> Pair {
        const sf::OracleReport rep = sf::enumerate_policies(m, /*unichain_only=*/!recurrent);
        return {rep.g_star, rep.iterations};
    }));

    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const CompareRow& r : rows) {
        if (!r.ran) continue;
        lo = first ? r.g : std::min(lo, r.g);
        hi = first ? r.g : std::max(hi, r.g);
        first = false;
    }
    const double spread = hi - lo;
    const bool agree = spread <= agree_tol;

    if (format == "csv") {
        std::cout << "method,g_star,iterations,millis\n";
        for (const CompareRow& r : rows) {
            std::cout << r.method << ",";
            if (r.ran)
                std::cout << sf::format_double(r.g) << "," << r.iterations << ","
                          << sf::format_double(r.millis);
            else
                std::cout << "skipped,,";
            std::cout << "\n";
        }
    } else if (format == "structured") {
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const CompareRow& r = rows[k];
            std::cout << "method_" << k << "=" << r.method << "\n";
            if (r.ran) {
                std::cout << "g_star_" << k << "=" << sf::format_double(r.g) << "\n";
                std::cout << "iterations_" << k << "=" << r.iterations << "\n";
                std::cout << "millis_" << k << "=" << sf::format_double(r.millis) << "\n";
            } else {
                std::cout << "status_" << k << "=skipped\n";
            }
        }
        std::cout << "spread=" << sf::format_double(spread) << "\n";
        std::cout << "agreement=" << (agree ? "ok" : "disagree") << "\n";
    } else {
        std::cout << "method                        g*                      iters     ms\n";
        for (const CompareRow& r : rows) {
            std::ostringstream line;
            line << r.method;
            line << std::string(line.str().size() < 30 ? 30 - line.str().size() : 1, ' ');
            if (r.ran) {
                std::string g = sf::format_double(r.g);
                line << g << std::string(g.size() < 24 ? 24 - g.size() : 1, ' ');
                std::string it = std::to_string(r.iterations);
                line << it << std::string(it.size() < 10 ? 10 - it.size() : 1, ' ');
                line << sf::format_double(r.millis);
            } else {
                line << r.note;
            }
            std::cout << line.str() << "\n";
        }
        std::cout << "agreement: max spread " << sf::format_double(spread)
                  << (agree ? " <= " : " > ") << sf::format_double(agree_tol)
                  << (agree ? ": ok" : ": DISAGREE") << "\n";
    }
    if (!agree) {
        std::cerr << "solvers disagree: g* spread " << sf::format_double(spread)
                  << " exceeds " << sf::format_double(agree_tol) << "\n";
        return 3;
    }
    return 0;
}

int cmd_transform(const std::string& input, std::optional<double> discount, bool do_uniformize,
                  const std::string& output) {
    sf::ParsedModel parsed = load_model(input);
    if (do_uniformize) {
        if (parsed.is_discrete())
            throw sf::Error("--uniformize needs a ctmdp input");
        auto [mdp, lambda] = sf::uniformize(parsed.ctmdp());
        std::cerr << "lambda=" << sf::format_double(lambda) << "\n";
        write_out(output, sf::emit_model(mdp));
        return 0;
    }
    if (!discount && parsed.discount) discount = parsed.discount;
    if (!discount) throw sf::Error("transform needs --discount or --uniformize");
    if (!parsed.is_discrete())
        throw sf::Error("--discount needs a dtmdp input");
    const sf::AugmentedModel aug = sf::discount_to_average(parsed.dtmdp(), *discount);
    std::cerr << "added terminal states:";
    for (int s : aug.added_terminals) std::cerr << " " << s;
    std::cerr << "\n";
    write_out(output, sf::emit_model(aug.mdp));
    return 0;
}

std::vector<double> parse_csv_doubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stod(item));
    return out;
}

int cmd_gen(const std::string& kind, std::uint64_t seed, int classes, int capacity,
            const std::string& arrival, const std::string& service, const std::string& action_cost,
            int states, int actions, int branching, bool chain, const std::string& target,
            bool ct, const std::string& output) {
    if (kind == "queue") {
        sf::QueueSpec spec;
        spec.classes = classes;
        spec.capacity = capacity;
        if (!arrival.empty()) spec.arrival = parse_csv_doubles(arrival);
        if (!service.empty()) {
            std::stringstream ss(service);
            std::string group;
            while (std::getline(ss, group, ';')) spec.service.push_back(parse_csv_doubles(group));
        } else {
            spec.service.assign(classes, {1.5, 3.0});
        }
        if (!action_cost.empty())
            spec.action_cost = parse_csv_doubles(action_cost);
        else if (spec.service[0].size() == 2)
            spec.action_cost = {0.0, 0.8};
        write_out(output, sf::emit_model(sf::make_multiclass_queue(spec)));
        return 0;
    }
    if (kind == "birth-death") {
        std::vector<double> mu = service.empty() ? std::vector<double>{1.5, 3.0}
                                                 : parse_csv_doubles(service);
        std::vector<double> lam = arrival.empty() ? std::vector<double>{1.0}
                                                  : parse_csv_doubles(arrival);
        std::vector<double> ac = action_cost.empty() ? std::vector<double>(mu.size(), 0.0)
                                                     : parse_csv_doubles(action_cost);
        if (ac.size() != mu.size()) throw sf::Error("action costs do not match service rates");
        const int M = capacity;
        std::vector<std::vector<sf::BirthDeathRow>> rows(M + 1);
        for (int i = 0; i <= M; ++i)
            for (std::size_t a = 0; a < mu.size(); ++a) {
                sf::BirthDeathRow r;
                if (i < M) r.up = lam[0];
                if (i > 0) r.down = mu[a];
                r.cost = static_cast<double>(i) + ac[a];
                rows[i].push_back(r);
            }
        write_out(output, sf::emit_model(sf::make_birth_death_rates(M, rows)));
        return 0;
    }
    if (kind == "random") {
        sf::RandomSpec spec;
        spec.states = states;
        spec.max_actions = actions;
        spec.max_branching = branching;
        spec.chain = chain;
        if (target == "recurrent")
            spec.target = sf::ChainKind::Recurrent;
        else if (target == "communicating")
            spec.target = sf::ChainKind::CommunicatingOnly;
        else
            throw sf::Error("--class must be recurrent or communicating");
        if (ct)
            write_out(output, sf::emit_model(sf::random_skip_free_rates(seed, spec)));
        else
            write_out(output, sf::emit_model(sf::random_skip_free(seed, spec)));
        return 0;
    }
    throw sf::Error("--kind must be queue, birth-death or random");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"solver for skip-free Markov decision processes on rooted trees"};
    app.require_subcommand(1);

    std::string input = "-";
    std::string format = "human";
    std::string variant = "mean-improvement";
    std::string output;
    double tol = sf::kDefaultTol;
    long max_iter = sf::kDefaultMaxIter;
    bool communicating = false;

    CLI::App* validate = app.add_subcommand("validate", "check a model file and classify it");
    validate->add_option("input", input, "model file, - for stdin");
    validate->add_option("--format", format, "human | csv | structured");

    CLI::App* solve = app.add_subcommand("solve", "average-cost optimum by policy improvement");
    solve->add_option("input", input, "model file, - for stdin");
    solve->add_option("--variant", variant, "first-return | optimality | mean-improvement");
    solve->add_option("--tol", tol, "improvement threshold");
    solve->add_option("--max-iter", max_iter, "iteration cap");
    solve->add_flag("--communicating", communicating, "allow communicating-only models");
    solve->add_option("--format", format, "human | csv (trace) | structured");

    double agree_tol = 1e-7;
    double check_offset = 0.0;
    CLI::App* compare = app.add_subcommand("compare", "cross-check against reference solvers");
    compare->add_option("input", input, "model file, - for stdin");
    compare->add_option("--tol", agree_tol, "allowed g* spread across methods");
    compare->add_option("--max-iter", max_iter, "iteration cap");
    compare->add_option("--format", format, "human | csv | structured");
    compare->add_option("--check-offset", check_offset)->group("");  // test hook, hidden

    std::optional<double> discount;
    bool do_uniformize = false;
    CLI::App* transform = app.add_subcommand("transform", "rewrite a model");
    transform->add_option("input", input, "model file, - for stdin");
    transform->add_option("--discount", discount, "discounted-to-average augmentation");
    transform->add_flag("--uniformize", do_uniformize, "rates to a discrete embedding");
    transform->add_option("-o,--output", output, "output file, default stdout");

    std::uint64_t seed = 1;
    std::string kind = "queue", arrival, service, action_cost, target = "recurrent";
    int classes = 2, capacity = 3, states = 6, actions = 2, branching = 3;
    bool chain = false, ct = false;
    CLI::App* gen = app.add_subcommand("gen", "write a model from the built-in families");
    gen->add_option("--kind", kind, "queue | birth-death | random");
    gen->add_option("--seed", seed, "random family seed");
    gen->add_option("--classes", classes, "queue: job classes");
    gen->add_option("--capacity", capacity, "queue: max jobs; birth-death: top state");
    gen->add_option("--arrival", arrival, "arrival rates, comma separated");
    gen->add_option("--service", service, "service rates per action; ';' between classes");
    gen->add_option("--action-cost", action_cost, "per-action cost, comma separated");
    gen->add_option("--states", states, "random: state count");
    gen->add_option("--actions", actions, "random: max actions per state");
    gen->add_option("--branching", branching, "random: max children per node");
    gen->add_flag("--chain", chain, "random: force a linear tree");
    gen->add_option("--class", target, "random: recurrent | communicating");
    gen->add_flag("--ct", ct, "random: emit rates instead of probabilities");
    gen->add_option("-o,--output", output, "output file, default stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // keep the documented exit codes: anything malformed on the command
        // line is invalid input, help is a success
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*validate) return cmd_validate(input, format);
        if (*solve) return cmd_solve(input, variant, tol, max_iter, communicating, format);
        if (*compare) return cmd_compare(input, agree_tol, max_iter, format, check_offset);
        if (*transform) return cmd_transform(input, discount, do_uniformize, output);
        if (*gen)
            return cmd_gen(kind, seed, classes, capacity, arrival, service, action_cost, states,
                           actions, branching, chain, target, ct, output);
    } catch (const sf::MaxIterExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const sf::NoConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const sf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
