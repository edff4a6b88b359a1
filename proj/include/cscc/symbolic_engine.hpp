#pragma once

// Reduced ordered binary decision diagrams over a fixed variable universe.
//
// An Engine owns a node arena with hash-consing (no garbage collection) and
// hands out SymSet values that denote sets of assignments. Every SymSet carries
// a declared support: the variables it ranges over. A set is extended
// cylindrically over any variable outside its support, so union/intersection
// of sets with different supports behave like their logical counterparts.
//
// Engines are single threaded. Sets travel between engines through
// PortableSet (export_set / import_set) or the binary dump format.

#include "cscc/errors.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cscc {

using VarId = std::uint32_t;
using NodeId = std::uint32_t;
using BigCount = boost::multiprecision::cpp_int;

inline constexpr NodeId kFalseNode = 0;
inline constexpr NodeId kTrueNode = 1;

/// Narrowing conversion that refuses to lose information.
std::uint64_t to_u64(const BigCount& value);

class VarSet {
 public:
  VarSet() = default;
  VarSet(std::initializer_list<VarId> vars);

  static VarSet from(std::span<const VarId> vars);
  static VarSet range(VarId first, VarId last);  // [first, last)

  void insert(VarId var);
  void erase(VarId var);
  bool contains(VarId var) const;
  bool empty() const { return words_.empty(); }
  std::size_t size() const;
  std::vector<VarId> to_vector() const;

  VarSet operator|(const VarSet& other) const;
  VarSet operator&(const VarSet& other) const;
  VarSet operator-(const VarSet& other) const;
  bool is_subset_of(const VarSet& other) const;
  bool disjoint(const VarSet& other) const;

  bool operator==(const VarSet& other) const = default;

 private:
  void normalize();
  std::vector<std::uint64_t> words_;
};

/// Variable layout: s_1, s'_1, s_2, s'_2, ..., s_n, s'_n, c_1, ..., c_m.
/// Each state variable is immediately followed by its primed twin so that
/// renaming between the two blocks never reorders the diagram.
class VariableUniverse {
 public:
  VariableUniverse(std::vector<std::string> state_names, std::vector<std::string> input_names);

  std::size_t state_count() const { return state_names_.size(); }
  std::size_t input_count() const { return input_names_.size(); }
  std::size_t size() const { return 2 * state_count() + input_count(); }

  VarId state_var(std::size_t i) const { return static_cast<VarId>(2 * i); }
  VarId primed_var(std::size_t i) const { return static_cast<VarId>(2 * i + 1); }
  VarId input_var(std::size_t j) const { return static_cast<VarId>(2 * state_count() + j); }

  bool is_state(VarId v) const { return v < 2 * state_count() && v % 2 == 0; }
  bool is_primed(VarId v) const { return v < 2 * state_count() && v % 2 == 1; }
  bool is_input(VarId v) const { return v >= 2 * state_count() && v < size(); }

  const std::string& name(VarId v) const;
  std::optional<VarId> find(std::string_view name) const;

  const std::vector<std::string>& state_names() const { return state_names_; }
  const std::vector<std::string>& input_names() const { return input_names_; }

  VarSet state_vars() const;
  VarSet primed_vars() const;
  VarSet input_vars() const;
  VarSet all_vars() const;

  /// state -> primed pairs, in order.
  std::vector<std::pair<VarId, VarId>> unprimed_to_primed() const;
  std::vector<std::pair<VarId, VarId>> primed_to_unprimed() const;

  bool operator==(const VariableUniverse& other) const {
    return state_names_ == other.state_names_ && input_names_ == other.input_names_;
  }

 private:
  std::vector<std::string> state_names_;
  std::vector<std::string> input_names_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, VarId> index_;
};

/// Number of elementary symbolic operations performed by an engine.
class StepCounter {
 public:
  std::uint64_t count() const { return count_; }
  void tick() {
    if (depth_ == 0) ++count_;
  }

  /// Everything inside the scope counts as a single step.
  class Collapse {
   public:
    explicit Collapse(StepCounter& counter) : counter_(counter) { ++counter_.depth_; }
    ~Collapse() {
      --counter_.depth_;
      counter_.tick();
    }
    Collapse(const Collapse&) = delete;
    Collapse& operator=(const Collapse&) = delete;

   private:
    StepCounter& counter_;
  };

  /// Nothing inside the scope is counted.
  class Pause {
   public:
    explicit Pause(StepCounter& counter) : counter_(counter) { ++counter_.depth_; }
    ~Pause() { --counter_.depth_; }
    Pause(const Pause&) = delete;
    Pause& operator=(const Pause&) = delete;

   private:
    StepCounter& counter_;
  };

 private:
  std::uint64_t count_ = 0;
  int depth_ = 0;
};

class Engine;

/// A (variable, value) list. Used for sections, cubes and membership tests.
using Valuation = std::vector<std::pair<VarId, bool>>;

class SymSet {
 public:
  SymSet() = default;

  Engine& engine() const;
  NodeId root() const { return root_; }
  const VarSet& support() const { return support_; }
  bool valid() const { return engine_ != nullptr; }

  bool is_empty() const { return root_ == kFalseNode; }
  bool is_full() const { return root_ == kTrueNode; }

  /// Structural identity; by canonicity this is semantic equality.
  bool operator==(const SymSet& other) const {
    return engine_ == other.engine_ && root_ == other.root_ && support_ == other.support_;
  }

 private:
  friend class Engine;
  SymSet(Engine* engine, NodeId root, VarSet support)
      : engine_(engine), root_(root), support_(std::move(support)) {}

  Engine* engine_ = nullptr;
  NodeId root_ = kFalseNode;
  VarSet support_;
};

struct PortableNode {
  std::uint16_t var;
  std::uint32_t low;
  std::uint32_t high;
};

/// Engine-independent copy of a diagram. Node k (k >= 2) is nodes[k - 2];
/// children always precede their parents.
struct PortableSet {
  std::vector<PortableNode> nodes;
  std::uint32_t root = 0;
  VarSet support;
};

class Engine {
 public:
  explicit Engine(std::shared_ptr<const VariableUniverse> universe);
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const VariableUniverse& universe() const { return *universe_; }
  const std::shared_ptr<const VariableUniverse>& universe_ptr() const { return universe_; }
  StepCounter& steps() { return steps_; }
  std::size_t arena_size() const { return nodes_.size(); }

  // Constructors (not counted as symbolic steps).
  SymSet empty(VarSet support = {});
  SymSet full(VarSet support = {});
  SymSet literal(VarId var, bool value);
  SymSet cube(const Valuation& values);

  // Set algebra; one step each.
  SymSet unite(const SymSet& a, const SymSet& b);
  SymSet intersect(const SymSet& a, const SymSet& b);
  SymSet difference(const SymSet& a, const SymSet& b);
  SymSet product(const SymSet& a, const SymSet& b);
  SymSet complement(const SymSet& a);

  // Relational operations; one step each.
  SymSet exists(const SymSet& a, const VarSet& vars);
  SymSet rename(const SymSet& a, std::span<const std::pair<VarId, VarId>> mapping);
  SymSet section(const SymSet& r, const VarSet& block, const Valuation& at);
  SymSet flip_var(const SymSet& a, VarId var);
  SymSet pick_var(const SymSet& a, VarId var);

  // Queries; not counted.
  BigCount count_assignments(const SymSet& a, const VarSet& over) const;
  std::size_t node_count(const SymSet& a) const;
  bool contains(const SymSet& a, const Valuation& point) const;

  /// Visits every assignment over support(a) in lexicographic order
  /// (variables in universe order, 0 before 1). The visitor gets a vector
  /// indexed by VarId; only support entries are meaningful. Returning false
  /// stops the walk.
  void for_each_witness(const SymSet& a,
                        const std::function<bool(std::span<const std::uint8_t>)>& visit) const;

  PortableSet export_set(const SymSet& a) const;
  SymSet import_set(const PortableSet& p);

 private:
  struct Node {
    VarId var;
    NodeId low;
    NodeId high;
  };

  enum class Op : std::uint32_t { And = 1, Or, Diff, Xor };

  struct CacheEntry {
    std::uint32_t op = 0;
    NodeId a = 0;
    NodeId b = 0;
    NodeId result = 0;
  };

  void require_mine(const SymSet& a) const;
  void require_known(const VarSet& vars) const;
  VarId top(NodeId n) const { return nodes_[n].var; }

  NodeId mk(VarId var, NodeId low, NodeId high);
  NodeId apply(Op op, NodeId a, NodeId b);
  NodeId ite_var(VarId var, NodeId high, NodeId low);
  NodeId exists_node(NodeId a, const std::vector<char>& quantified, VarId last,
                     std::unordered_map<NodeId, NodeId>& memo);
  NodeId restrict_node(NodeId a, const std::vector<std::int8_t>& values, VarId last,
                       std::unordered_map<NodeId, NodeId>& memo);
  NodeId flip_node(NodeId a, VarId var, std::unordered_map<NodeId, NodeId>& memo);
  NodeId relabel_node(NodeId a, const std::vector<VarId>& map, std::unordered_map<NodeId, NodeId>& memo);
  void grow_unique_table();
  void maybe_grow_cache();

  SymSet wrap(NodeId root, VarSet support) { return SymSet(this, root, std::move(support)); }

  std::shared_ptr<const VariableUniverse> universe_;
  StepCounter steps_;
  std::vector<Node> nodes_;
  std::vector<NodeId> unique_;  // open addressing, 0 marks an empty slot
  std::vector<CacheEntry> cache_;
};

// Dump format: "CSCCDD01", u16 variable count, 10-byte nodes
// (u16 var, u32 low, u32 high) for indices 2.., then the u32 root index.
// All integers little endian.
std::vector<std::uint8_t> dump(const SymSet& a);
SymSet load(Engine& engine, std::span<const std::uint8_t> bytes, VarSet support);

inline SymSet operator|(const SymSet& a, const SymSet& b) { return a.engine().unite(a, b); }
inline SymSet operator&(const SymSet& a, const SymSet& b) { return a.engine().intersect(a, b); }
inline SymSet operator-(const SymSet& a, const SymSet& b) { return a.engine().difference(a, b); }

}  // namespace cscc
