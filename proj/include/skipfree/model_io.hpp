#ifndef SKIPFREE_MODEL_IO_HPP
#define SKIPFREE_MODEL_IO_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>

#include "skipfree/model.hpp"
#include "skipfree/solver.hpp"

namespace skipfree {

/*
 * Line-oriented model text. Directives:
 *   kind dtmdp|ctmdp
 *   parents P1 P2 ... PN          parent of states 1..N (omit for one state)
 *   actions I LABEL...            action labels of state I
 *   transition I LABEL J VALUE    probability (dtmdp) or rate (ctmdp)
 *   cost I LABEL VALUE            defaults to 0 when absent
 *   discount BETA                 optional
 * '#' starts a comment. Values print in shortest round-trip form, so
 * parse(emit(m)) reproduces m bit for bit.
 */
struct ParsedModel {
    std::variant<SkipFreeMdp, CtMdp> model;
    std::optional<double> discount;

    bool is_discrete() const { return std::holds_alternative<SkipFreeMdp>(model); }
    SkipFreeMdp& dtmdp() { return std::get<SkipFreeMdp>(model); }
    const SkipFreeMdp& dtmdp() const { return std::get<SkipFreeMdp>(model); }
    CtMdp& ctmdp() { return std::get<CtMdp>(model); }
    const CtMdp& ctmdp() const { return std::get<CtMdp>(model); }
};

/// Parses and validates a model; throws ParseError on malformed text and the
/// validation errors on a well-formed but inconsistent model.
ParsedModel parse_model(std::istream& in);
ParsedModel parse_model_string(const std::string& text);

std::string emit_model(const SkipFreeMdp& mdp, std::optional<double> discount = std::nullopt);
std::string emit_model(const CtMdp& mdp, std::optional<double> discount = std::nullopt);
std::string emit_model(const ParsedModel& parsed);

/// Shortest decimal that reads back as exactly the same double.
std::string format_double(double v);

/// Improvement trace as CSV with header iter,g_n,u0.
std::string trace_csv(const SolveReport& report);

}  // namespace skipfree

#endif
