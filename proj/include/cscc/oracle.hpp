#pragma once

// Explicit-state reference implementation. Graph construction evaluates
// expressions with a private interpreter and never touches the symbolic
// engine; only compare() reads symbolic sets, through witness iteration.

#include "cscc/bn_model.hpp"
#include "cscc/coloured_graph.hpp"
#include "cscc/symbolic_engine.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cscc {

class OracleLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Truth table per function symbol; row r lists arguments left to right,
/// first argument most significant.
using FunctionTables = std::vector<std::vector<std::uint8_t>>;

/// Evaluates e on a state and an input valuation. Apply nodes need tables.
bool evaluate(const Expr& e, std::span<const std::uint8_t> state, std::span<const std::uint8_t> inputs,
              const FunctionTables* tables = nullptr);

struct ExplicitColouredGraph {
  std::size_t state_bits = 0;
  std::size_t input_bits = 0;
  std::vector<std::vector<std::uint8_t>> vertices;  // s_1..s_n per vertex
  std::vector<std::vector<std::uint8_t>> colours;   // c_1..c_m per admissible colour
  std::vector<std::vector<std::vector<std::uint32_t>>> adjacency;  // [colour][vertex] -> successors
};

/// Materialises the asynchronous coloured graph of net. Vertex k is the
/// state whose bits read k in binary (s_1 most significant); colours are the
/// admissible input valuations in increasing binary order.
ExplicitColouredGraph enumerate_graph(const ExpandedNetwork& net, std::uint64_t limit);

/// Same encoding as the symbolic edge-list graph: vertex/colour k is k in binary.
ExplicitColouredGraph explicit_from_edges(const EdgeList& edges);

/// component[c][v] is the SCC id of v in colour c.
struct ExplicitRelation {
  std::vector<std::vector<std::uint32_t>> component;

  bool related(std::size_t colour, std::size_t u, std::size_t v) const {
    return component[colour][u] == component[colour][v];
  }
  std::size_t component_count(std::size_t colour) const;
  /// Triples (u, c, v) in the relation.
  std::uint64_t size() const;
};

/// Iterative Tarjan, one run per colour.
ExplicitRelation tarjan_per_colour(const ExplicitColouredGraph& g);

/// Kosaraju double sweep; used to cross-check tarjan_per_colour.
ExplicitRelation kosaraju_per_colour(const ExplicitColouredGraph& g);

/// Per colour, the number of SCCs with two or more vertices or a self-loop.
std::vector<std::size_t> nontrivial_per_colour(const ExplicitColouredGraph& g, const ExplicitRelation& r);

struct Triple {
  std::vector<std::uint8_t> from;
  std::vector<std::uint8_t> colour;
  std::vector<std::uint8_t> to;
};

struct Verdict {
  bool equal = true;
  std::optional<Triple> difference;
  bool in_symbolic = false;  // which side holds the differing triple
  std::string describe() const;
};

/// Exact membership comparison of a symbolic relation over (s, c, s')
/// against the explicit one.
Verdict compare(const SymSet& relation, const ExplicitColouredGraph& g, const ExplicitRelation& r);

struct GeneratorOptions {
  std::size_t max_variables = 8;
  std::size_t max_inputs = 6;  // after expansion
  std::size_t max_arity = 2;
  double constraint_probability = 0.3;
};

/// Seeded pseudo-random partially specified network within the options' bounds.
PartialBooleanNetwork random_network(std::uint64_t seed, const GeneratorOptions& options = {});

}  // namespace cscc
