#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "skipfree/errors.hpp"
#include "skipfree/model_io.hpp"
#include "skipfree/models.hpp"
#include "skipfree/reference.hpp"
#include "skipfree/solver.hpp"
#include "skipfree/transforms.hpp"

namespace py = pybind11;
namespace sf = skipfree;

namespace {

using Rows = std::vector<std::vector<std::vector<std::pair<int, double>>>>;

std::vector<std::vector<std::vector<sf::Transition>>> to_transitions(const Rows& rows) {
    std::vector<std::vector<std::vector<sf::Transition>>> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out[i].resize(rows[i].size());
        for (std::size_t a = 0; a < rows[i].size(); ++a)
            for (const auto& [dest, prob] : rows[i][a]) out[i][a].push_back({dest, prob});
    }
    return out;
}

sf::SkipFreeMdp build_dtmdp(const std::vector<int>& parents,
                            std::vector<std::vector<std::string>> action_labels, const Rows& rows,
                            std::vector<std::vector<double>> costs) {
    sf::SkipFreeMdp m;
    m.tree = sf::Tree(parents);
    m.action_labels = std::move(action_labels);
    m.transitions = to_transitions(rows);
    m.costs = std::move(costs);
    sf::validate_skip_free(m);
    return m;
}

sf::CtMdp build_ctmdp(const std::vector<int>& parents,
                      std::vector<std::vector<std::string>> action_labels, const Rows& rows,
                      std::vector<std::vector<double>> costs) {
    sf::CtMdp m;
    m.tree = sf::Tree(parents);
    m.action_labels = std::move(action_labels);
    m.transitions = to_transitions(rows);
    m.costs = std::move(costs);
    sf::validate_ct(m);
    return m;
}

sf::RootVariant variant_arg(const std::string& name) { return sf::variant_from_string(name); }

}  // namespace

PYBIND11_MODULE(skipfree, m) {
    m.doc() = "average-cost solver for skip-free MDPs on rooted trees";

    auto& base_exc = py::register_exception<sf::Error>(m, "SkipFreeError");
    py::register_exception<sf::NotRecurrent>(m, "NotRecurrentError", base_exc);
    py::register_exception<sf::NotCommunicating>(m, "NotCommunicatingError", base_exc);
    py::register_exception<sf::ParseError>(m, "ModelParseError", base_exc);
    py::register_exception<sf::MaxIterExceeded>(m, "MaxIterError", base_exc);

    py::class_<sf::Tree>(m, "Tree")
        .def(py::init<const std::vector<int>&>(), py::arg("parents"))
        .def_property_readonly("node_count", &sf::Tree::node_count)
        .def_property_readonly("depth", &sf::Tree::depth)
        .def("parent", &sf::Tree::parent)
        .def("level", &sf::Tree::level)
        .def("children", &sf::Tree::children)
        .def("is_chain", &sf::Tree::is_chain)
        .def("parents", &sf::Tree::parent_list);

    py::class_<sf::Transition>(m, "Transition")
        .def(py::init<int, double>(), py::arg("dest"), py::arg("prob"))
        .def_readwrite("dest", &sf::Transition::dest)
        .def_readwrite("prob", &sf::Transition::prob)
        .def("__repr__", [](const sf::Transition& t) {
            return "Transition(" + std::to_string(t.dest) + ", " + sf::format_double(t.prob) + ")";
        });

    py::class_<sf::SkipFreeMdp>(m, "SkipFreeMdp")
        .def_readonly("tree", &sf::SkipFreeMdp::tree)
        .def_readonly("action_labels", &sf::SkipFreeMdp::action_labels)
        .def_readonly("transitions", &sf::SkipFreeMdp::transitions)
        .def_readonly("costs", &sf::SkipFreeMdp::costs)
        .def_readonly("state_labels", &sf::SkipFreeMdp::state_labels)
        .def_property_readonly("state_count", &sf::SkipFreeMdp::state_count)
        .def("prob", &sf::SkipFreeMdp::prob)
        .def("__eq__", [](const sf::SkipFreeMdp& a, const sf::SkipFreeMdp& b) { return a == b; });

    py::class_<sf::CtMdp>(m, "CtMdp")
        .def_readonly("tree", &sf::CtMdp::tree)
        .def_readonly("action_labels", &sf::CtMdp::action_labels)
        .def_readonly("transitions", &sf::CtMdp::transitions)
        .def_readonly("costs", &sf::CtMdp::costs)
        .def_readonly("state_labels", &sf::CtMdp::state_labels)
        .def_property_readonly("state_count", &sf::CtMdp::state_count)
        .def("__eq__", [](const sf::CtMdp& a, const sf::CtMdp& b) { return a == b; });

    m.def("dtmdp", &build_dtmdp, py::arg("parents"), py::arg("action_labels"),
          py::arg("transitions"), py::arg("costs"),
          "build and validate a discrete model; transitions are (dest, prob) pairs");
    m.def("ctmdp", &build_ctmdp, py::arg("parents"), py::arg("action_labels"),
          py::arg("transitions"), py::arg("costs"),
          "build and validate a rate model; transitions are (dest, rate) pairs");

    m.def("classify", [](const sf::SkipFreeMdp& mdp) { return sf::to_string(sf::classify(mdp).kind); });

    py::class_<sf::TraceEntry>(m, "TraceEntry")
        .def_readonly("iter", &sf::TraceEntry::iter)
        .def_readonly("g", &sf::TraceEntry::g)
        .def_readonly("u0", &sf::TraceEntry::u0)
        .def("__repr__", [](const sf::TraceEntry& t) {
            return "TraceEntry(" + std::to_string(t.iter) + ", " + sf::format_double(t.g) + ", " +
                   sf::format_double(t.u0) + ")";
        });

    py::class_<sf::SolveReport>(m, "SolveReport")
        .def_readonly("g_star", &sf::SolveReport::g_star)
        .def_readonly("h", &sf::SolveReport::h)
        .def_readonly("policy", &sf::SolveReport::policy)
        .def_readonly("trace", &sf::SolveReport::trace)
        .def_readonly("iterations", &sf::SolveReport::iterations)
        .def_readonly("distinguished", &sf::SolveReport::distinguished)
        .def_readonly("recurrent_class", &sf::SolveReport::recurrent_class)
        .def_property_readonly("variant",
                               [](const sf::SolveReport& r) { return sf::to_string(r.variant); });

    py::class_<sf::PolicyStats>(m, "PolicyStats")
        .def_readonly("g", &sf::PolicyStats::g)
        .def_readonly("tau", &sf::PolicyStats::tau)
        .def_readonly("C", &sf::PolicyStats::C)
        .def("H_at", &sf::PolicyStats::H_at);

    m.def(
        "solve_average",
        [](const sf::SkipFreeMdp& mdp, const std::string& variant, double tol, long max_iter) {
            return sf::solve_average(mdp, variant_arg(variant), tol, max_iter);
        },
        py::arg("mdp"), py::arg("variant") = "mean-improvement", py::arg("tol") = sf::kDefaultTol,
        py::arg("max_iter") = sf::kDefaultMaxIter);
    m.def(
        "solve_communicating",
        [](const sf::SkipFreeMdp& mdp, const std::string& variant, double tol, long max_iter) {
            return sf::solve_communicating(mdp, variant_arg(variant), tol, max_iter);
        },
        py::arg("mdp"), py::arg("variant") = "mean-improvement", py::arg("tol") = sf::kDefaultTol,
        py::arg("max_iter") = sf::kDefaultMaxIter);
    m.def("evaluate_policy", &sf::evaluate_policy, py::arg("mdp"), py::arg("policy"));
    m.def("residual", &sf::residual, py::arg("mdp"), py::arg("g"), py::arg("h"));

    py::class_<sf::AugmentedModel>(m, "AugmentedModel")
        .def_readonly("mdp", &sf::AugmentedModel::mdp)
        .def_readonly("origin", &sf::AugmentedModel::origin)
        .def_readonly("added_terminals", &sf::AugmentedModel::added_terminals)
        .def_readonly("beta", &sf::AugmentedModel::beta)
        .def_readonly("from_chain", &sf::AugmentedModel::from_chain);

    m.def("discount_to_average", &sf::discount_to_average, py::arg("mdp"), py::arg("beta"));
    m.def("recover_discounted_values", &sf::recover_discounted_values, py::arg("augmented"),
          py::arg("report"));
    m.def("uniformize", &sf::uniformize, py::arg("ctmdp"),
          "returns (discrete model, lambda)");

    py::class_<sf::CtSolution>(m, "CtSolution")
        .def_readonly("report", &sf::CtSolution::report)
        .def_readonly("lambda_", &sf::CtSolution::lambda);

    m.def(
        "solve_ct_average",
        [](const sf::CtMdp& ct, const std::string& variant, double tol, long max_iter) {
            return sf::solve_ct_average(ct, variant_arg(variant), tol, max_iter);
        },
        py::arg("ctmdp"), py::arg("variant") = "mean-improvement", py::arg("tol") = sf::kDefaultTol,
        py::arg("max_iter") = sf::kDefaultMaxIter);

    py::class_<sf::OracleReport>(m, "OracleReport")
        .def_readonly("g_star", &sf::OracleReport::g_star)
        .def_readonly("values", &sf::OracleReport::values)
        .def_readonly("policy", &sf::OracleReport::policy)
        .def_readonly("method", &sf::OracleReport::method)
        .def_readonly("iterations", &sf::OracleReport::iterations);

    m.def("enumerate_policies", &sf::enumerate_policies, py::arg("mdp"),
          py::arg("unichain_only") = false);
    m.def("policy_iteration_average", &sf::policy_iteration_average, py::arg("mdp"));
    m.def("relative_value_iteration", &sf::relative_value_iteration, py::arg("mdp"),
          py::arg("tol") = 1e-9, py::arg("max_iter") = 5000000L);
    m.def("discounted_value_iteration", &sf::discounted_value_iteration, py::arg("mdp"),
          py::arg("beta"), py::arg("tol") = 1e-9, py::arg("max_iter") = 50000000L);

    py::class_<sf::QueueSpec>(m, "QueueSpec")
        .def(py::init<>())
        .def_readwrite("classes", &sf::QueueSpec::classes)
        .def_readwrite("capacity", &sf::QueueSpec::capacity)
        .def_readwrite("arrival", &sf::QueueSpec::arrival)
        .def_readwrite("service", &sf::QueueSpec::service)
        .def_readwrite("action_cost", &sf::QueueSpec::action_cost)
        .def_readwrite("cost_rate", &sf::QueueSpec::cost_rate)
        .def_readwrite("max_states", &sf::QueueSpec::max_states);

    m.def("make_multiclass_queue", &sf::make_multiclass_queue, py::arg("spec"));
    m.def(
        "random_skip_free",
        [](std::uint64_t seed, int states, int max_actions, bool chain, const std::string& target) {
            sf::RandomSpec spec;
            spec.states = states;
            spec.max_actions = max_actions;
            spec.chain = chain;
            spec.target = target == "communicating" ? sf::ChainKind::CommunicatingOnly
                                                    : sf::ChainKind::Recurrent;
            return sf::random_skip_free(seed, spec);
        },
        py::arg("seed"), py::arg("states") = 6, py::arg("max_actions") = 2,
        py::arg("chain") = false, py::arg("target") = "recurrent");

    m.def("parse_model", [](const std::string& text) {
        const sf::ParsedModel parsed = sf::parse_model_string(text);
        py::object model = parsed.is_discrete() ? py::cast(parsed.dtmdp()) : py::cast(parsed.ctmdp());
        py::object discount = parsed.discount ? py::cast(*parsed.discount) : py::none();
        return py::make_tuple(model, discount);
    });
    m.def("emit_model",
          [](const sf::SkipFreeMdp& mdp, std::optional<double> discount) {
              return sf::emit_model(mdp, discount);
          },
          py::arg("mdp"), py::arg("discount") = py::none());
    m.def("emit_ct_model",
          [](const sf::CtMdp& mdp, std::optional<double> discount) {
              return sf::emit_model(mdp, discount);
          },
          py::arg("ctmdp"), py::arg("discount") = py::none());
    m.def("trace_csv", &sf::trace_csv, py::arg("report"));
}
