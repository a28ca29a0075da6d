#include "symcalc/diagrams.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace symcalc {

namespace {

struct KindInfo {
    NodeKind kind;
    const char* name;
    int arity;
    bool ladder;
};

constexpr std::array<KindInfo, 8> kKinds{{
    {NodeKind::source, "source", 0, false},
    {NodeKind::ladder_particle, "ladder_particle", 1, true},
    {NodeKind::ladder_hole, "ladder_hole", 1, true},
    {NodeKind::ladder_particle_hole, "ladder_particle_hole", 1, true},
    {NodeKind::linear_rpa_direct, "linear_rpa_direct", 1, false},
    {NodeKind::linear_rpa_exchange, "linear_rpa_exchange", 1, false},
    {NodeKind::nonlinear_rpa_direct, "nonlinear_rpa_direct", 2, false},
    {NodeKind::nonlinear_rpa_exchange, "nonlinear_rpa_exchange", 2, false},
}};

const KindInfo& info(NodeKind k) { return kKinds[static_cast<int>(k)]; }

}  // namespace

int arity(NodeKind kind) { return info(kind).arity; }
bool is_ladder(NodeKind kind) { return info(kind).ladder; }
const char* kind_name(NodeKind kind) { return info(kind).name; }

GoldstoneDiagram::GoldstoneDiagram(NodeKind k, std::vector<GoldstoneDiagram> ch)
    : kind(k), children(std::move(ch)) {
    if (static_cast<int>(children.size()) != arity(k))
        throw std::invalid_argument(std::string("GoldstoneDiagram: kind ") + kind_name(k) +
                                    " takes " + std::to_string(arity(k)) + " children, got " +
                                    std::to_string(children.size()));
}

int GoldstoneDiagram::node_count() const {
    int n = 1;
    for (const auto& c : children) n += c.node_count();
    return n;
}

std::string GoldstoneDiagram::to_text() const {
    std::string s = "(";
    s += kind_name(kind);
    for (const auto& c : children) {
        s += ' ';
        s += c.to_text();
    }
    s += ')';
    return s;
}

ParseError::ParseError(const std::string& msg, int line_, int column_)
    : std::runtime_error(msg + " at line " + std::to_string(line_) + ", column " +
                         std::to_string(column_)),
      line(line_),
      column(column_) {}

namespace {

struct Parser {
    const std::string& text;
    size_t pos = 0;
    int line = 1, col = 1;

    explicit Parser(const std::string& t) : text(t) {}

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, line, col); }

    void advance() {
        if (text[pos] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) advance();
    }

    bool eof() {
        skip_ws();
        return pos >= text.size();
    }

    GoldstoneDiagram node() {
        skip_ws();
        if (pos >= text.size() || text[pos] != '(') fail("expected '('");
        advance();
        skip_ws();
        size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_' ||
                text[pos] == ':'))
            advance();
        std::string name = text.substr(start, pos - start);
        if (name.empty()) fail("expected node kind");
        const KindInfo* ki = nullptr;
        for (const auto& k : kKinds)
            if (name == k.name) ki = &k;
        if (!ki) fail("unknown node kind '" + name + "'");
        std::vector<GoldstoneDiagram> children;
        while (true) {
            skip_ws();
            if (pos >= text.size()) fail("unterminated diagram");
            if (text[pos] == ')') {
                advance();
                break;
            }
            children.push_back(node());
        }
        if (static_cast<int>(children.size()) != ki->arity)
            fail(std::string("kind '") + ki->name + "' takes " + std::to_string(ki->arity) +
                 " children, got " + std::to_string(children.size()));
        return GoldstoneDiagram(ki->kind, std::move(children));
    }
};

}  // namespace

GoldstoneDiagram parse_diagram(const std::string& text) {
    Parser p(text);
    GoldstoneDiagram d = p.node();
    if (!p.eof()) p.fail("trailing input after diagram");
    return d;
}

std::vector<GoldstoneDiagram> parse_diagram_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open diagram file: " + path);
    std::vector<GoldstoneDiagram> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string trimmed = line;
        auto const first = trimmed.find_first_not_of(" \t\r");
        if (first == std::string::npos || trimmed[first] == '#') continue;
        try {
            out.push_back(parse_diagram(trimmed));
        } catch (const ParseError& e) {
            throw ParseError(std::string(e.what()) + " (file line " + std::to_string(lineno) + ")",
                             e.line, e.column);
        }
    }
    return out;
}

GoldstoneDiagram strip_ladders(const GoldstoneDiagram& d) {
    if (is_ladder(d.kind)) return strip_ladders(d.children[0]);
    GoldstoneDiagram out;
    out.kind = d.kind;
    for (const auto& c : d.children) out.children.push_back(strip_ladders(c));
    return out;
}

namespace {

int count_interactions(const GoldstoneDiagram& d) {
    // on a ladder-free tree: every remaining node carries one interaction line
    int n = 1;
    for (const auto& c : d.children) n += count_interactions(c);
    return n;
}

}  // namespace

DiagramClassification classify(const GoldstoneDiagram& d) {
    DiagramClassification c;
    c.interaction_count = count_interactions(strip_ladders(d));
    c.symbol_order = -4 * c.interaction_count;
    c.log_free = true;
    return c;
}

int classify_by_symbol_propagation(const GoldstoneDiagram& d) {
    switch (arity(d.kind)) {
        case 0:
            return -4;  // source = P V^(2)
        case 1: {
            int p = classify_by_symbol_propagation(d.children[0]);
            // ladders do not alter symbol classes; linear RPA composes with the
            // S^-2 potential and the order -2 parametrix
            return is_ladder(d.kind) ? p : p - 4;
        }
        default: {
            int p1 = classify_by_symbol_propagation(d.children[0]);
            int p2 = classify_by_symbol_propagation(d.children[1]);
            return p1 + p2 - 4;
        }
    }
}

ResourceError::ResourceError(const std::string& msg, std::size_t projected)
    : std::runtime_error(msg), projected_count(projected) {}

IterationState iterate(int steps, const IterationOptions& opts) {
    if (steps < 0) throw std::invalid_argument("iterate: negative step count");
    if (steps > opts.max_steps)
        throw ResourceError("iterate: step bound exceeded (max " + std::to_string(opts.max_steps) +
                                ")",
                            0);
    std::vector<NodeKind> one_child, two_child;
    one_child.push_back(NodeKind::linear_rpa_direct);
    if (opts.include_exchange) one_child.push_back(NodeKind::linear_rpa_exchange);
    if (opts.model == IterationModel::with_ladders) {
        one_child.push_back(NodeKind::ladder_particle);
        one_child.push_back(NodeKind::ladder_hole);
        one_child.push_back(NodeKind::ladder_particle_hole);
    }
    two_child.push_back(NodeKind::nonlinear_rpa_direct);
    if (opts.include_exchange) two_child.push_back(NodeKind::nonlinear_rpa_exchange);

    IterationState state;
    state.step = 0;
    GoldstoneDiagram src(NodeKind::source);
    state.diagrams.emplace(src.to_text(), src);
    state.progression = state.diagrams;  // tau_0 itself

    for (int n = 1; n <= steps; ++n) {
        std::size_t count = state.diagrams.size();
        std::size_t projected =
            1 + one_child.size() * count + two_child.size() * count * count;
        if (projected > opts.max_diagrams)
            throw ResourceError("iterate: projected diagram count " + std::to_string(projected) +
                                    " exceeds limit " + std::to_string(opts.max_diagrams),
                                projected);
        std::map<std::string, GoldstoneDiagram> next;
        next.emplace(src.to_text(), src);
        for (const auto& [key1, d1] : state.diagrams) {
            (void)key1;
            for (NodeKind k : one_child) {
                GoldstoneDiagram d(k, {d1});
                next.emplace(d.to_text(), d);
            }
            for (NodeKind k : two_child) {
                for (const auto& [key2, d2] : state.diagrams) {
                    (void)key2;
                    GoldstoneDiagram d(k, {d1, d2});
                    next.emplace(d.to_text(), d);
                }
            }
        }
        IterationState out;
        out.step = n;
        out.diagrams = std::move(next);
        for (const auto& [key, d] : out.diagrams)
            if (!state.diagrams.count(key)) out.progression.emplace(key, d);
        state = std::move(out);
    }
    return state;
}

FiltrationReport filtration_report(const IterationState& state) {
    FiltrationReport rep;
    rep.step = state.step;
    std::set<int> orders;
    for (const auto& [key, d] : state.progression) {
        (void)key;
        orders.insert(classify(d).symbol_order);
    }
    rep.orders.assign(orders.rbegin(), orders.rend());
    int n = state.step;
    rep.expected_max = -4 * (n + 1);
    rep.expected_min = -4 * ((1 << (n + 1)) - 1);
    rep.pass = !rep.orders.empty() && rep.orders.front() == rep.expected_max &&
               rep.orders.back() == rep.expected_min;
    return rep;
}

std::string classification_csv(const std::vector<GoldstoneDiagram>& diagrams) {
    std::ostringstream out;
    out << "diagram_id,n,order,log_free\n";
    for (size_t i = 0; i < diagrams.size(); ++i) {
        auto c = classify(diagrams[i]);
        out << i << ',' << c.interaction_count << ',' << c.symbol_order << ','
            << (c.log_free ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string classification_jsonl(const std::vector<GoldstoneDiagram>& diagrams) {
    std::ostringstream out;
    for (size_t i = 0; i < diagrams.size(); ++i) {
        auto c = classify(diagrams[i]);
        out << "{\"diagram_id\":" << i << ",\"n\":" << c.interaction_count
            << ",\"order\":" << c.symbol_order << ",\"log_free\":" << (c.log_free ? "true" : "false")
            << "}\n";
    }
    return out.str();
}

namespace {

// streaming enumeration of all trees with exactly `nodes` nodes
void enumerate_sized(int nodes, const std::function<void(GoldstoneDiagram&&)>& emit) {
    if (nodes <= 0) return;
    if (nodes == 1) {
        emit(GoldstoneDiagram(NodeKind::source));
        return;
    }
    for (const auto& ki : kKinds) {
        if (ki.arity == 1) {
            enumerate_sized(nodes - 1, [&](GoldstoneDiagram&& c) {
                emit(GoldstoneDiagram(ki.kind, {std::move(c)}));
            });
        } else if (ki.arity == 2) {
            for (int left = 1; left <= nodes - 2; ++left) {
                enumerate_sized(left, [&](GoldstoneDiagram&& c1) {
                    enumerate_sized(nodes - 1 - left, [&](GoldstoneDiagram&& c2) {
                        emit(GoldstoneDiagram(ki.kind, {c1, std::move(c2)}));
                    });
                });
            }
        }
    }
}

}  // namespace

void for_each_tree(int max_nodes, const std::function<void(const GoldstoneDiagram&)>& fn) {
    for (int n = 1; n <= max_nodes; ++n)
        enumerate_sized(n, [&](GoldstoneDiagram&& d) { fn(d); });
}

}  // namespace symcalc
