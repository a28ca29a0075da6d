#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace symcalc {

enum class NodeKind {
    source,
    ladder_particle,
    ladder_hole,
    ladder_particle_hole,
    linear_rpa_direct,
    linear_rpa_exchange,
    nonlinear_rpa_direct,
    nonlinear_rpa_exchange,
};

int arity(NodeKind kind);  // 0 source, 1 ladder/linear, 2 nonlinear
bool is_ladder(NodeKind kind);
const char* kind_name(NodeKind kind);

/// Expression tree of interaction applications. Arity is enforced on
/// construction; equality is structural.
struct GoldstoneDiagram {
    NodeKind kind = NodeKind::source;
    std::vector<GoldstoneDiagram> children;

    GoldstoneDiagram() = default;
    explicit GoldstoneDiagram(NodeKind k, std::vector<GoldstoneDiagram> ch = {});

    bool operator==(const GoldstoneDiagram&) const = default;
    int node_count() const;
    std::string to_text() const;  // canonical "(kind child*)" rendering
};

struct ParseError : std::runtime_error {
    int line, column;
    ParseError(const std::string& msg, int line, int column);
};

/// Parse the parenthesized diagram format "(kind child*)". Whitespace
/// insensitive; reports line/column on syntax or arity errors.
GoldstoneDiagram parse_diagram(const std::string& text);

/// All diagrams in a file, one per line (blank lines and '#' comments skipped).
std::vector<GoldstoneDiagram> parse_diagram_file(const std::string& path);

/// Splice out every ladder_* node (replace by its child). Idempotent.
GoldstoneDiagram strip_ladders(const GoldstoneDiagram& d);

struct DiagramClassification {
    int interaction_count = 0;
    int symbol_order = 0;  // -4 * interaction_count
    bool log_free = true;
};

/// Ladder-stripping classification: splice out ladders, count interaction lines.
DiagramClassification classify(const GoldstoneDiagram& d);

/// Independent reading: recursive symbol-order propagation
/// (source -4; ladder id; linear p -> p-4; nonlinear p1,p2 -> p1+p2-4).
int classify_by_symbol_propagation(const GoldstoneDiagram& d);

enum class IterationModel { standard_rpa, with_ladders };

struct IterationOptions {
    IterationModel model = IterationModel::standard_rpa;
    bool include_exchange = true;
    int max_steps = 4;
    std::size_t max_diagrams = 2'000'000;
};

struct IterationState {
    int step = 0;
    /// tau_n keyed by canonical text (multiset; generation yields multiplicity 1)
    std::map<std::string, GoldstoneDiagram> diagrams;
    /// progression P_n = tau_n \ tau_{n-1}
    std::map<std::string, GoldstoneDiagram> progression;
};

struct ResourceError : std::runtime_error {
    std::size_t projected_count;
    ResourceError(const std::string& msg, std::size_t projected);
};

/// Run the fixed-point diagram generator for n steps.
IterationState iterate(int steps, const IterationOptions& opts = {});

struct FiltrationReport {
    int step = 0;
    std::vector<int> orders;  // distinct orders of P_n, descending
    int expected_max = 0;     // -4(n+1)
    int expected_min = 0;     // -4(2^{n+1}-1)
    bool pass = false;
};

/// Check the descending-filtration endpoints of the progression orders.
FiltrationReport filtration_report(const IterationState& state);

/// CSV rows "diagram_id,n,order,log_free" for a batch of diagrams.
std::string classification_csv(const std::vector<GoldstoneDiagram>& diagrams);

/// Same content as JSON lines (one object per diagram).
std::string classification_jsonl(const std::vector<GoldstoneDiagram>& diagrams);

/// Enumerate every diagram tree with at most max_nodes nodes (all eight
/// kinds), invoking fn on each. Used by the exhaustive dual-rule check.
void for_each_tree(int max_nodes, const std::function<void(const GoldstoneDiagram&)>& fn);

}  // namespace symcalc
