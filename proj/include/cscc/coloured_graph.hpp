#pragma once

// Coloured-graph operators over symbolic coloured vertex sets (subsets of
// V x C). A graph is either given by per-variable update functions of a
// Boolean network (asynchronous semantics) or by an explicit edge relation
// E over (s, c, s').

#include "cscc/bn_model.hpp"
#include "cscc/symbolic_engine.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace cscc {

enum class Direction { Forward, Backward };
enum class TrimDirection { NoPredecessor, NoSuccessor };

/// Edge-list description of a coloured graph. Labels are kept sorted; a
/// vertex is encoded by its rank in binary over s_1..s_k (s_1 most
/// significant), likewise colours over c_1..c_j.
struct EdgeList {
  std::vector<std::string> vertices;
  std::vector<std::string> colours;
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> edges;  // (from, colour, to)

  std::size_t vertex_index(std::string_view label) const;
  std::size_t colour_index(std::string_view label) const;
};

/// Builds an EdgeList from labels and (from, colour, to) triples. Duplicate
/// triples collapse; unknown labels are rejected.
EdgeList make_edge_list(std::vector<std::string> vertex_labels, std::vector<std::string> colour_labels,
                        const std::vector<std::tuple<std::string, std::string, std::string>>& triples);

/// Text format: one `from colour to` triple per line, `#` comments. Optional
/// `vertices: <labels...>` / `colours: <labels...>` lines declare isolated
/// labels; once a declaration is present, triples must use declared labels.
EdgeList parse_edge_list(std::string_view text);

std::size_t bits_for(std::size_t count);
std::shared_ptr<const VariableUniverse> make_universe(const EdgeList& edges);

/// Valuation of the state bits encoding vertex `index`.
Valuation vertex_code(const VariableUniverse& u, std::size_t index);
Valuation colour_code(const VariableUniverse& u, std::size_t index);

struct PortableGraph {
  bool update_based = true;
  std::vector<PortableSet> changes;
  std::optional<PortableSet> relation;
  PortableSet vertices;
  PortableSet valid;
};

class ColouredGraph {
 public:
  static ColouredGraph from_network(Engine& engine, const ExpandedNetwork& net);
  static ColouredGraph from_updates(Engine& engine, const std::vector<SymSet>& updates, SymSet valid);
  static ColouredGraph from_relation(Engine& engine, SymSet relation, SymSet vertices, SymSet valid);
  static ColouredGraph from_edges(Engine& engine, const EdgeList& edges);

  Engine& engine() const { return *engine_; }
  bool update_based() const { return !relation_.has_value(); }

  /// V as a set over state variables.
  const SymSet& vertices() const { return vertices_; }
  /// C (the admissible colours) as a set over input variables.
  const SymSet& valid() const { return valid_; }
  /// V x C.
  const SymSet& unit() const { return unit_; }

  /// Number of independently fireable transitions: n for networks, one for
  /// an explicit relation.
  std::size_t transition_count() const;

  SymSet colours(const SymSet& a) const;
  SymSet post(const SymSet& x) const;
  SymSet pre(const SymSet& x) const;
  SymSet image(const SymSet& x, Direction d) const { return d == Direction::Forward ? post(x) : pre(x); }

  /// Update-based graphs only.
  SymSet var_post(std::size_t i, const SymSet& x) const;
  SymSet var_pre(std::size_t i, const SymSet& x) const;

  /// var_post/var_pre for networks; the whole image for relation graphs.
  SymSet transition_image(std::size_t k, const SymSet& x, Direction d) const;

  /// Images in the monochromatisation for one colour; x is a set of vertices.
  SymSet mono_post(const Valuation& colour, const SymSet& x) const;
  SymSet mono_pre(const Valuation& colour, const SymSet& x) const;

  /// {(u, c, v) | (u, c) in a, (v, c) in a}, v on primed variables.
  SymSet join(const SymSet& a) const;
  /// {(v, c, v) | (v, c) in a}.
  SymSet diagonal(const SymSet& a) const;

  /// Exactly one vertex per colour of v, the lexicographically smallest
  /// under the universe order. Uses 3n - 2 symbolic steps for n state bits.
  SymSet pivots(const SymSet& v) const;

  /// Keeps the members of v that have a predecessor (resp. successor) in v.
  SymSet trim_step(const SymSet& v, TrimDirection direction) const;

  PortableGraph export_graph() const;
  static ColouredGraph import_graph(Engine& engine, const PortableGraph& g);

 private:
  ColouredGraph(Engine& engine, SymSet vertices, SymSet valid);

  Engine* engine_;
  std::vector<SymSet> changes_;  // b_i xor s_i
  std::optional<SymSet> relation_;
  SymSet vertices_;
  SymSet valid_;
  SymSet unit_;
  SymSet identity_;  // s_i <=> s'_i for all i
};

}  // namespace cscc
