#include "skipfree/model_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <sstream>
#include <system_error>

#include "skipfree/errors.hpp"

namespace skipfree {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& tok, int line) {
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw ParseError(line, "bad number '" + tok + "'");
    return v;
}

int parse_int(const std::string& tok, int line) {
    int v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw ParseError(line, "bad integer '" + tok + "'");
    return v;
}

std::vector<std::string> tokenize(const std::string& raw) {
    std::string line = raw;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::vector<std::string> toks;
    std::istringstream ss(line);
    std::string t;
    while (ss >> t) toks.push_back(t);
    return toks;
}

struct RawRecord {
    int state;
    std::string action;
    int dest;       // -1 for cost records
    double value;
    int line;
};

int action_index(const std::vector<std::vector<std::string>>& labels, int state,
                 const std::string& name, int line) {
    const auto& row = labels[state];
    auto it = std::find(row.begin(), row.end(), name);
    if (it == row.end())
        throw ParseError(line, "state " + std::to_string(state) + " has no action '" + name + "'");
    return static_cast<int>(it - row.begin());
}

template <typename Model>
void fill_model(Model& m, const std::vector<int>& parents,
                std::vector<std::vector<std::string>>&& labels,
                const std::vector<RawRecord>& trans, const std::vector<RawRecord>& costs) {
    m.tree = Tree(parents);
    const int n = m.tree.node_count();
    if (static_cast<int>(labels.size()) < n)
        for (int i = static_cast<int>(labels.size()); i < n; ++i)
            throw ParseError(0, "state " + std::to_string(i) + " has no actions directive");
    m.action_labels = std::move(labels);
    m.transitions.resize(n);
    m.costs.resize(n);
    for (int i = 0; i < n; ++i) {
        m.transitions[i].resize(m.action_labels[i].size());
        m.costs[i].assign(m.action_labels[i].size(), 0.0);
    }
    for (const RawRecord& r : trans) {
        const int a = action_index(m.action_labels, r.state, r.action, r.line);
        if (r.dest < 0 || r.dest >= n)
            throw ParseError(r.line, "destination " + std::to_string(r.dest) + " out of range");
        m.transitions[r.state][a].push_back({r.dest, r.value});
    }
    for (const RawRecord& r : costs) {
        const int a = action_index(m.action_labels, r.state, r.action, r.line);
        m.costs[r.state][a] = r.value;
    }
}

}  // namespace

ParsedModel parse_model(std::istream& in) {
    std::string kind;
    std::optional<std::vector<int>> parents;
    std::vector<std::vector<std::string>> labels;
    std::vector<RawRecord> trans, costs;
    std::optional<double> discount;
    int state_hint = -1;  // highest state mentioned, to size labels

    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::vector<std::string> toks = tokenize(raw);
        if (toks.empty()) continue;
        const std::string& head = toks[0];
        if (head == "kind") {
            if (toks.size() != 2) throw ParseError(line, "kind takes one value");
            if (!kind.empty()) throw ParseError(line, "duplicate kind");
            if (toks[1] != "dtmdp" && toks[1] != "ctmdp")
                throw ParseError(line, "kind must be dtmdp or ctmdp");
            kind = toks[1];
        } else if (head == "parents") {
            if (parents) throw ParseError(line, "duplicate parents");
            std::vector<int> p;
            for (std::size_t k = 1; k < toks.size(); ++k) p.push_back(parse_int(toks[k], line));
            parents = std::move(p);
        } else if (head == "actions") {
            if (toks.size() < 3) throw ParseError(line, "actions needs a state and labels");
            const int s = parse_int(toks[1], line);
            if (s < 0) throw ParseError(line, "negative state");
            if (s >= static_cast<int>(labels.size())) labels.resize(s + 1);
            if (!labels[s].empty())
                throw ParseError(line, "duplicate actions for state " + std::to_string(s));
            for (std::size_t k = 2; k < toks.size(); ++k) {
                if (std::find(labels[s].begin(), labels[s].end(), toks[k]) != labels[s].end())
                    throw ParseError(line, "duplicate action label '" + toks[k] + "'");
                labels[s].push_back(toks[k]);
            }
            state_hint = std::max(state_hint, s);
        } else if (head == "transition") {
            if (toks.size() != 5)
                throw ParseError(line, "transition needs state action dest value");
            trans.push_back({parse_int(toks[1], line), toks[2], parse_int(toks[3], line),
                             parse_double(toks[4], line), line});
        } else if (head == "cost") {
            if (toks.size() != 4) throw ParseError(line, "cost needs state action value");
            costs.push_back({parse_int(toks[1], line), toks[2], -1, parse_double(toks[3], line),
                             line});
        } else if (head == "discount") {
            if (toks.size() != 2) throw ParseError(line, "discount takes one value");
            if (discount) throw ParseError(line, "duplicate discount");
            discount = parse_double(toks[1], line);
        } else {
            throw ParseError(line, "unknown directive '" + head + "'");
        }
    }
    if (kind.empty()) throw ParseError(line, "missing kind directive");
    if (!parents) throw ParseError(line, "missing parents directive");
    const int n = static_cast<int>(parents->size()) + 1;
    if (state_hint >= n)
        throw ParseError(line, "state " + std::to_string(state_hint) + " beyond parents list");
    for (const RawRecord& r : trans)
        if (r.state < 0 || r.state >= n) throw ParseError(r.line, "state out of range");
    for (const RawRecord& r : costs)
        if (r.state < 0 || r.state >= n) throw ParseError(r.line, "state out of range");
    labels.resize(n);
    for (int i = 0; i < n; ++i)
        if (labels[i].empty())
            throw ParseError(line, "state " + std::to_string(i) + " has no actions directive");

    ParsedModel out;
    out.discount = discount;
    if (kind == "dtmdp") {
        SkipFreeMdp m;
        fill_model(m, *parents, std::move(labels), trans, costs);
        validate_skip_free(m);
        out.model = std::move(m);
    } else {
        CtMdp m;
        fill_model(m, *parents, std::move(labels), trans, costs);
        validate_ct(m);
        out.model = std::move(m);
    }
    return out;
}

ParsedModel parse_model_string(const std::string& text) {
    std::istringstream in(text);
    return parse_model(in);
}

namespace {

template <typename Model>
std::string emit(const Model& m, const char* kind, std::optional<double> discount) {
    for (const auto& row : m.action_labels)
        for (const std::string& label : row)
            if (label.empty() || label.find_first_of(" \t#") != std::string::npos)
                throw Error("action label '" + label + "' cannot be serialized");
    std::string out;
    out += "kind ";
    out += kind;
    out += "\nparents";
    for (int p : m.tree.parent_list()) out += " " + std::to_string(p);
    out += "\n";
    const int n = m.tree.node_count();
    for (int i = 0; i < n; ++i) {
        out += "actions " + std::to_string(i);
        for (const std::string& label : m.action_labels[i]) out += " " + label;
        out += "\n";
    }
    for (int i = 0; i < n; ++i)
        for (std::size_t a = 0; a < m.transitions[i].size(); ++a)
            for (const Transition& t : m.transitions[i][a])
                out += "transition " + std::to_string(i) + " " + m.action_labels[i][a] + " " +
                       std::to_string(t.dest) + " " + format_double(t.prob) + "\n";
    for (int i = 0; i < n; ++i)
        for (std::size_t a = 0; a < m.costs[i].size(); ++a)
            out += "cost " + std::to_string(i) + " " + m.action_labels[i][a] + " " +
                   format_double(m.costs[i][a]) + "\n";
    if (discount) out += "discount " + format_double(*discount) + "\n";
    return out;
}

}  // namespace

std::string emit_model(const SkipFreeMdp& mdp, std::optional<double> discount) {
    return emit(mdp, "dtmdp", discount);
}

std::string emit_model(const CtMdp& mdp, std::optional<double> discount) {
    return emit(mdp, "ctmdp", discount);
}

std::string emit_model(const ParsedModel& parsed) {
    return parsed.is_discrete() ? emit_model(parsed.dtmdp(), parsed.discount)
                                : emit_model(parsed.ctmdp(), parsed.discount);
}

std::string trace_csv(const SolveReport& report) {
    std::string out = "iter,g_n,u0\n";
    for (const TraceEntry& t : report.trace)
        out += std::to_string(t.iter) + "," + format_double(t.g) + "," + format_double(t.u0) +
               "\n";
    return out;
}

}  // namespace skipfree
