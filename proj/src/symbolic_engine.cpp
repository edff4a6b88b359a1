#include "cscc/symbolic_engine.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <limits>

namespace cscc {

namespace {

constexpr VarId kTerminalVar = std::numeric_limits<VarId>::max();
constexpr char kDumpMagic[8] = {'C', 'S', 'C', 'C', 'D', 'D', '0', '1'};

std::size_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = a * 0x9E3779B97F4A7C15ull;
  h ^= (b + 0x632BE59BD9B4E019ull + (h << 6) + (h >> 2));
  h *= 0xBF58476D1CE4E5B9ull;
  h ^= (c + 0x94D049BB133111EBull + (h << 6) + (h >> 2));
  h ^= h >> 31;
  return static_cast<std::size_t>(h);
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

std::uint16_t get_u16(std::span<const std::uint8_t> in, std::size_t at) {
  return static_cast<std::uint16_t>(in[at] | (in[at + 1] << 8));
}

std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[at + i]) << (8 * i);
  return v;
}

}  // namespace

std::uint64_t to_u64(const BigCount& value) {
  if (value < 0 || value > BigCount(std::numeric_limits<std::uint64_t>::max())) {
    throw OverflowError("count does not fit into 64 bits: " + value.str());
  }
  return value.convert_to<std::uint64_t>();
}

// ---------------------------------------------------------------------------
// VarSet

VarSet::VarSet(std::initializer_list<VarId> vars) {
  for (VarId v : vars) insert(v);
}

VarSet VarSet::from(std::span<const VarId> vars) {
  VarSet s;
  for (VarId v : vars) s.insert(v);
  return s;
}

VarSet VarSet::range(VarId first, VarId last) {
  VarSet s;
  for (VarId v = first; v < last; ++v) s.insert(v);
  return s;
}

void VarSet::insert(VarId var) {
  std::size_t w = var / 64;
  if (words_.size() <= w) words_.resize(w + 1, 0);
  words_[w] |= std::uint64_t{1} << (var % 64);
}

void VarSet::erase(VarId var) {
  std::size_t w = var / 64;
  if (w >= words_.size()) return;
  words_[w] &= ~(std::uint64_t{1} << (var % 64));
  normalize();
}

bool VarSet::contains(VarId var) const {
  std::size_t w = var / 64;
  return w < words_.size() && ((words_[w] >> (var % 64)) & 1u) != 0;
}

std::size_t VarSet::size() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::vector<VarId> VarSet::to_vector() const {
  std::vector<VarId> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits != 0) {
      int b = std::countr_zero(bits);
      out.push_back(static_cast<VarId>(w * 64 + b));
      bits &= bits - 1;
    }
  }
  return out;
}

VarSet VarSet::operator|(const VarSet& other) const {
  VarSet r = *this;
  if (r.words_.size() < other.words_.size()) r.words_.resize(other.words_.size(), 0);
  for (std::size_t i = 0; i < other.words_.size(); ++i) r.words_[i] |= other.words_[i];
  return r;
}

VarSet VarSet::operator&(const VarSet& other) const {
  VarSet r;
  r.words_.resize(std::min(words_.size(), other.words_.size()));
  for (std::size_t i = 0; i < r.words_.size(); ++i) r.words_[i] = words_[i] & other.words_[i];
  r.normalize();
  return r;
}

VarSet VarSet::operator-(const VarSet& other) const {
  VarSet r = *this;
  for (std::size_t i = 0; i < std::min(r.words_.size(), other.words_.size()); ++i) {
    r.words_[i] &= ~other.words_[i];
  }
  r.normalize();
  return r;
}

bool VarSet::is_subset_of(const VarSet& other) const { return (*this - other).empty(); }

bool VarSet::disjoint(const VarSet& other) const { return (*this & other).empty(); }

void VarSet::normalize() {
  while (!words_.empty() && words_.back() == 0) words_.pop_back();
}

// ---------------------------------------------------------------------------
// VariableUniverse

VariableUniverse::VariableUniverse(std::vector<std::string> state_names,
                                   std::vector<std::string> input_names)
    : state_names_(std::move(state_names)), input_names_(std::move(input_names)) {
  if (size() > std::numeric_limits<std::uint16_t>::max()) {
    throw ContractViolation("variable universe too large");
  }
  names_.reserve(size());
  for (const auto& s : state_names_) {
    names_.push_back(s);
    names_.push_back(s + "'");
  }
  for (const auto& c : input_names_) names_.push_back(c);
  for (VarId v = 0; v < names_.size(); ++v) {
    if (!index_.emplace(names_[v], v).second) {
      throw ContractViolation("duplicate variable name '" + names_[v] + "'");
    }
  }
}

const std::string& VariableUniverse::name(VarId v) const {
  if (v >= names_.size()) throw ContractViolation("unknown variable " + std::to_string(v));
  return names_[v];
}

std::optional<VarId> VariableUniverse::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

VarSet VariableUniverse::state_vars() const {
  VarSet s;
  for (std::size_t i = 0; i < state_count(); ++i) s.insert(state_var(i));
  return s;
}

VarSet VariableUniverse::primed_vars() const {
  VarSet s;
  for (std::size_t i = 0; i < state_count(); ++i) s.insert(primed_var(i));
  return s;
}

VarSet VariableUniverse::input_vars() const {
  return VarSet::range(static_cast<VarId>(2 * state_count()), static_cast<VarId>(size()));
}

VarSet VariableUniverse::all_vars() const { return VarSet::range(0, static_cast<VarId>(size())); }

std::vector<std::pair<VarId, VarId>> VariableUniverse::unprimed_to_primed() const {
  std::vector<std::pair<VarId, VarId>> m;
  for (std::size_t i = 0; i < state_count(); ++i) m.emplace_back(state_var(i), primed_var(i));
  return m;
}

std::vector<std::pair<VarId, VarId>> VariableUniverse::primed_to_unprimed() const {
  std::vector<std::pair<VarId, VarId>> m;
  for (std::size_t i = 0; i < state_count(); ++i) m.emplace_back(primed_var(i), state_var(i));
  return m;
}

// ---------------------------------------------------------------------------
// SymSet

Engine& SymSet::engine() const {
  if (engine_ == nullptr) throw ContractViolation("use of an unbound SymSet");
  return *engine_;
}

// ---------------------------------------------------------------------------
// Engine: node layer

Engine::Engine(std::shared_ptr<const VariableUniverse> universe) : universe_(std::move(universe)) {
  if (!universe_) throw ContractViolation("engine needs a universe");
  nodes_.push_back({kTerminalVar, kFalseNode, kFalseNode});
  nodes_.push_back({kTerminalVar, kTrueNode, kTrueNode});
  unique_.assign(1u << 12, 0);
  cache_.assign(1u << 16, CacheEntry{});
}

void Engine::grow_unique_table() {
  std::vector<NodeId> fresh(unique_.size() * 2, 0);
  const std::size_t mask = fresh.size() - 1;
  for (NodeId id : unique_) {
    if (id == 0) continue;
    const Node& n = nodes_[id];
    std::size_t slot = mix(n.var, n.low, n.high) & mask;
    while (fresh[slot] != 0) slot = (slot + 1) & mask;
    fresh[slot] = id;
  }
  unique_.swap(fresh);
}

void Engine::maybe_grow_cache() {
  constexpr std::size_t kMaxCache = std::size_t{1} << 22;
  if (cache_.size() < kMaxCache && nodes_.size() > cache_.size()) {
    cache_.assign(std::min(kMaxCache, cache_.size() * 4), CacheEntry{});
  }
}

NodeId Engine::mk(VarId var, NodeId low, NodeId high) {
  if (low == high) return low;
  std::size_t mask = unique_.size() - 1;
  std::size_t slot = mix(var, low, high) & mask;
  while (unique_[slot] != 0) {
    const Node& n = nodes_[unique_[slot]];
    if (n.var == var && n.low == low && n.high == high) return unique_[slot];
    slot = (slot + 1) & mask;
  }
  if (nodes_.size() >= std::numeric_limits<NodeId>::max() - 1) {
    throw OverflowError("decision diagram arena exhausted");
  }
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back({var, low, high});
  unique_[slot] = id;
  if (2 * (nodes_.size() - 2) > unique_.size()) grow_unique_table();
  return id;
}

NodeId Engine::apply(Op op, NodeId a, NodeId b) {
  switch (op) {
    case Op::And:
      if (a == kFalseNode || b == kFalseNode) return kFalseNode;
      if (a == kTrueNode) return b;
      if (b == kTrueNode || a == b) return a;
      if (a > b) std::swap(a, b);
      break;
    case Op::Or:
      if (a == kTrueNode || b == kTrueNode) return kTrueNode;
      if (a == kFalseNode) return b;
      if (b == kFalseNode || a == b) return a;
      if (a > b) std::swap(a, b);
      break;
    case Op::Diff:
      if (a == kFalseNode || b == kTrueNode || a == b) return kFalseNode;
      if (b == kFalseNode) return a;
      break;
    case Op::Xor:
      if (a == b) return kFalseNode;
      if (a == kFalseNode) return b;
      if (b == kFalseNode) return a;
      if (a > b) std::swap(a, b);
      break;
  }

  const std::size_t slot = mix(static_cast<std::uint32_t>(op), a, b) & (cache_.size() - 1);
  {
    const CacheEntry& e = cache_[slot];
    if (e.op == static_cast<std::uint32_t>(op) && e.a == a && e.b == b) return e.result;
  }

  const Node na = nodes_[a];
  const Node nb = nodes_[b];
  const VarId v = std::min(na.var, nb.var);
  const NodeId a0 = na.var == v ? na.low : a;
  const NodeId a1 = na.var == v ? na.high : a;
  const NodeId b0 = nb.var == v ? nb.low : b;
  const NodeId b1 = nb.var == v ? nb.high : b;
  const NodeId low = apply(op, a0, b0);
  const NodeId high = apply(op, a1, b1);
  const NodeId result = mk(v, low, high);
  cache_[slot] = CacheEntry{static_cast<std::uint32_t>(op), a, b, result};
  return result;
}

NodeId Engine::ite_var(VarId var, NodeId high, NodeId low) {
  if (high == low) return high;
  if (var < top(high) && var < top(low)) return mk(var, low, high);
  const NodeId lit = mk(var, kFalseNode, kTrueNode);
  return apply(Op::Or, apply(Op::And, lit, high), apply(Op::Diff, low, lit));
}

NodeId Engine::exists_node(NodeId a, const std::vector<char>& quantified, VarId last,
                           std::unordered_map<NodeId, NodeId>& memo) {
  if (a <= kTrueNode || top(a) > last) return a;
  if (auto it = memo.find(a); it != memo.end()) return it->second;
  const Node n = nodes_[a];
  const NodeId low = exists_node(n.low, quantified, last, memo);
  const NodeId high = exists_node(n.high, quantified, last, memo);
  const NodeId r = quantified[n.var] ? apply(Op::Or, low, high) : mk(n.var, low, high);
  memo.emplace(a, r);
  return r;
}

NodeId Engine::restrict_node(NodeId a, const std::vector<std::int8_t>& values, VarId last,
                             std::unordered_map<NodeId, NodeId>& memo) {
  if (a <= kTrueNode || top(a) > last) return a;
  if (auto it = memo.find(a); it != memo.end()) return it->second;
  const Node n = nodes_[a];
  NodeId r;
  if (values[n.var] == 0) {
    r = restrict_node(n.low, values, last, memo);
  } else if (values[n.var] == 1) {
    r = restrict_node(n.high, values, last, memo);
  } else {
    const NodeId low = restrict_node(n.low, values, last, memo);
    const NodeId high = restrict_node(n.high, values, last, memo);
    r = mk(n.var, low, high);
  }
  memo.emplace(a, r);
  return r;
}

NodeId Engine::flip_node(NodeId a, VarId var, std::unordered_map<NodeId, NodeId>& memo) {
  if (a <= kTrueNode || top(a) > var) return a;
  const Node n = nodes_[a];
  if (n.var == var) return mk(var, n.high, n.low);
  if (auto it = memo.find(a); it != memo.end()) return it->second;
  const NodeId low = flip_node(n.low, var, memo);
  const NodeId high = flip_node(n.high, var, memo);
  const NodeId r = mk(n.var, low, high);
  memo.emplace(a, r);
  return r;
}

NodeId Engine::relabel_node(NodeId a, const std::vector<VarId>& map,
                            std::unordered_map<NodeId, NodeId>& memo) {
  if (a <= kTrueNode) return a;
  if (auto it = memo.find(a); it != memo.end()) return it->second;
  const Node n = nodes_[a];
  const NodeId low = relabel_node(n.low, map, memo);
  const NodeId high = relabel_node(n.high, map, memo);
  const NodeId r = ite_var(map[n.var], high, low);
  memo.emplace(a, r);
  return r;
}

// ---------------------------------------------------------------------------
// Engine: set layer

void Engine::require_mine(const SymSet& a) const {
  if (!a.valid()) throw ContractViolation("use of an unbound SymSet");
  if (&a.engine() != this) throw ContractViolation("set belongs to a different engine");
}

void Engine::require_known(const VarSet& vars) const {
  const auto v = vars.to_vector();
  if (!v.empty() && v.back() >= universe_->size()) {
    throw ContractViolation("unknown variable " + std::to_string(v.back()));
  }
}

SymSet Engine::empty(VarSet support) {
  require_known(support);
  return wrap(kFalseNode, std::move(support));
}

SymSet Engine::full(VarSet support) {
  require_known(support);
  return wrap(kTrueNode, std::move(support));
}

SymSet Engine::literal(VarId var, bool value) {
  require_known(VarSet{var});
  return wrap(value ? mk(var, kFalseNode, kTrueNode) : mk(var, kTrueNode, kFalseNode), VarSet{var});
}

SymSet Engine::cube(const Valuation& values) {
  std::vector<std::pair<VarId, bool>> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  VarSet support;
  NodeId r = kTrueNode;
  for (auto it = sorted.rbegin(); it != sorted.rend(); ++it) {
    if (support.contains(it->first)) throw ContractViolation("variable assigned twice in cube");
    support.insert(it->first);
    r = it->second ? mk(it->first, kFalseNode, r) : mk(it->first, r, kFalseNode);
  }
  require_known(support);
  return wrap(r, std::move(support));
}

SymSet Engine::unite(const SymSet& a, const SymSet& b) {
  require_mine(a);
  require_mine(b);
  steps_.tick();
  maybe_grow_cache();
  return wrap(apply(Op::Or, a.root(), b.root()), a.support() | b.support());
}

SymSet Engine::intersect(const SymSet& a, const SymSet& b) {
  require_mine(a);
  require_mine(b);
  steps_.tick();
  maybe_grow_cache();
  return wrap(apply(Op::And, a.root(), b.root()), a.support() | b.support());
}

SymSet Engine::difference(const SymSet& a, const SymSet& b) {
  require_mine(a);
  require_mine(b);
  steps_.tick();
  maybe_grow_cache();
  return wrap(apply(Op::Diff, a.root(), b.root()), a.support() | b.support());
}

SymSet Engine::product(const SymSet& a, const SymSet& b) {
  require_mine(a);
  require_mine(b);
  if (!a.support().disjoint(b.support())) {
    throw ContractViolation("product of sets with overlapping support");
  }
  steps_.tick();
  maybe_grow_cache();
  return wrap(apply(Op::And, a.root(), b.root()), a.support() | b.support());
}

SymSet Engine::complement(const SymSet& a) {
  require_mine(a);
  steps_.tick();
  maybe_grow_cache();
  return wrap(apply(Op::Xor, a.root(), kTrueNode), a.support());
}

SymSet Engine::exists(const SymSet& a, const VarSet& vars) {
  require_mine(a);
  require_known(vars);
  steps_.tick();
  maybe_grow_cache();
  const auto list = vars.to_vector();
  if (list.empty()) return a;
  std::vector<char> quantified(universe_->size(), 0);
  for (VarId v : list) quantified[v] = 1;
  std::unordered_map<NodeId, NodeId> memo;
  return wrap(exists_node(a.root(), quantified, list.back(), memo), a.support() - vars);
}

SymSet Engine::rename(const SymSet& a, std::span<const std::pair<VarId, VarId>> mapping) {
  require_mine(a);
  VarSet sources;
  VarSet targets;
  for (const auto& [from, to] : mapping) {
    if (from >= universe_->size() || to >= universe_->size()) {
      throw ContractViolation("rename mentions an unknown variable");
    }
    if (sources.contains(from) || targets.contains(to)) {
      throw ContractViolation("rename mapping is not a bijection");
    }
    sources.insert(from);
    targets.insert(to);
  }
  const VarSet kept = a.support() - sources;
  if (!kept.disjoint(targets)) {
    throw ContractViolation("rename target collides with a variable that stays in the support");
  }
  steps_.tick();
  maybe_grow_cache();
  std::vector<VarId> map(universe_->size());
  for (VarId v = 0; v < map.size(); ++v) map[v] = v;
  for (const auto& [from, to] : mapping) map[from] = to;
  std::unordered_map<NodeId, NodeId> memo;
  return wrap(relabel_node(a.root(), map, memo), kept | targets);
}

SymSet Engine::section(const SymSet& r, const VarSet& block, const Valuation& at) {
  require_mine(r);
  require_known(block);
  VarSet assigned;
  std::vector<std::int8_t> values(universe_->size(), -1);
  VarId last = 0;
  for (const auto& [var, value] : at) {
    if (!block.contains(var) || assigned.contains(var)) {
      throw ContractViolation("section point does not match the variable block");
    }
    assigned.insert(var);
    values[var] = value ? 1 : 0;
    last = std::max(last, var);
  }
  if (!(assigned == block)) throw ContractViolation("section point is a partial assignment");
  steps_.tick();
  maybe_grow_cache();
  std::unordered_map<NodeId, NodeId> memo;
  return wrap(restrict_node(r.root(), values, last, memo), r.support() - block);
}

SymSet Engine::flip_var(const SymSet& a, VarId var) {
  require_mine(a);
  require_known(VarSet{var});
  steps_.tick();
  maybe_grow_cache();
  std::unordered_map<NodeId, NodeId> memo;
  return wrap(flip_node(a.root(), var, memo), a.support());
}

SymSet Engine::pick_var(const SymSet& a, VarId var) {
  require_mine(a);
  require_known(VarSet{var});
  steps_.tick();
  maybe_grow_cache();
  // a \ (a & !var)[var -> !var]: drop the var=1 twin of every var=0 assignment.
  const NodeId negative = mk(var, kTrueNode, kFalseNode);
  const NodeId low_part = apply(Op::And, a.root(), negative);
  std::unordered_map<NodeId, NodeId> memo;
  const NodeId shifted = flip_node(low_part, var, memo);
  VarSet support = a.support();
  support.insert(var);
  return wrap(apply(Op::Diff, a.root(), shifted), std::move(support));
}

BigCount Engine::count_assignments(const SymSet& a, const VarSet& over) const {
  require_mine(a);
  if (!a.support().is_subset_of(over)) {
    throw ContractViolation("count_assignments: support is not contained in the counting domain");
  }
  const auto vars = over.to_vector();
  const std::size_t k = vars.size();
  std::vector<std::size_t> rank(universe_->size(), k);
  for (std::size_t i = 0; i < k; ++i) {
    if (vars[i] < rank.size()) rank[vars[i]] = i;
  }
  auto level = [&](NodeId n) -> std::size_t {
    if (n <= kTrueNode) return k;
    const VarId v = nodes_[n].var;
    if (rank[v] == k) throw ContractViolation("diagram depends on a variable outside its support");
    return rank[v];
  };
  std::unordered_map<NodeId, BigCount> memo;
  std::function<BigCount(NodeId)> go = [&](NodeId n) -> BigCount {
    if (n == kFalseNode) return 0;
    if (n == kTrueNode) return 1;
    if (auto it = memo.find(n); it != memo.end()) return it->second;
    const Node node = nodes_[n];
    const std::size_t here = level(n);
    BigCount low = go(node.low) << (level(node.low) - here - 1);
    BigCount high = go(node.high) << (level(node.high) - here - 1);
    BigCount total = low + high;
    memo.emplace(n, total);
    return total;
  };
  return go(a.root()) << level(a.root());
}

std::size_t Engine::node_count(const SymSet& a) const {
  require_mine(a);
  std::vector<NodeId> stack{a.root()};
  std::unordered_map<NodeId, bool> seen;
  std::size_t count = 0;
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    if (n <= kTrueNode || !seen.emplace(n, true).second) continue;
    ++count;
    stack.push_back(nodes_[n].low);
    stack.push_back(nodes_[n].high);
  }
  return count;
}

bool Engine::contains(const SymSet& a, const Valuation& point) const {
  require_mine(a);
  std::vector<std::int8_t> values(universe_->size(), -1);
  for (const auto& [var, value] : point) {
    if (var >= values.size()) throw ContractViolation("unknown variable in membership query");
    values[var] = value ? 1 : 0;
  }
  NodeId n = a.root();
  while (n > kTrueNode) {
    const Node& node = nodes_[n];
    if (values[node.var] < 0) {
      throw ContractViolation("membership query leaves '" + universe_->name(node.var) + "' unassigned");
    }
    n = values[node.var] != 0 ? node.high : node.low;
  }
  return n == kTrueNode;
}

void Engine::for_each_witness(const SymSet& a,
                              const std::function<bool(std::span<const std::uint8_t>)>& visit) const {
  require_mine(a);
  const auto vars = a.support().to_vector();
  std::vector<std::uint8_t> point(universe_->size(), 0);
  std::function<bool(NodeId, std::size_t)> walk = [&](NodeId n, std::size_t i) -> bool {
    if (n == kFalseNode) return true;
    if (i == vars.size()) {
      if (n != kTrueNode) throw ContractViolation("diagram depends on a variable outside its support");
      return visit(point);
    }
    const VarId v = vars[i];
    const Node node = nodes_[n];
    if (node.var < v) throw ContractViolation("diagram depends on a variable outside its support");
    const bool tests = node.var == v;
    point[v] = 0;
    if (!walk(tests ? node.low : n, i + 1)) return false;
    point[v] = 1;
    if (!walk(tests ? node.high : n, i + 1)) return false;
    point[v] = 0;
    return true;
  };
  walk(a.root(), 0);
}

PortableSet Engine::export_set(const SymSet& a) const {
  require_mine(a);
  PortableSet out;
  out.support = a.support();
  if (a.root() <= kTrueNode) {
    out.root = a.root();
    return out;
  }
  std::unordered_map<NodeId, std::uint32_t> index{{kFalseNode, 0}, {kTrueNode, 1}};
  // Iterative post-order (low child first) so numbering is canonical.
  std::vector<std::pair<NodeId, bool>> stack{{a.root(), false}};
  while (!stack.empty()) {
    auto [n, expanded] = stack.back();
    stack.pop_back();
    if (index.contains(n)) continue;
    const Node& node = nodes_[n];
    if (!expanded) {
      stack.emplace_back(n, true);
      stack.emplace_back(node.high, false);
      stack.emplace_back(node.low, false);
      continue;
    }
    const auto id = static_cast<std::uint32_t>(out.nodes.size() + 2);
    out.nodes.push_back({static_cast<std::uint16_t>(node.var), index.at(node.low), index.at(node.high)});
    index.emplace(n, id);
  }
  out.root = index.at(a.root());
  return out;
}

SymSet Engine::import_set(const PortableSet& p) {
  require_known(p.support);
  std::vector<NodeId> local{kFalseNode, kTrueNode};
  local.reserve(p.nodes.size() + 2);
  for (std::size_t k = 0; k < p.nodes.size(); ++k) {
    const PortableNode& n = p.nodes[k];
    const std::size_t id = k + 2;
    if (n.low >= id || n.high >= id) throw ContractViolation("portable set is not topologically ordered");
    if (!p.support.contains(n.var)) {
      throw ContractViolation("portable set depends on a variable outside its support");
    }
    local.push_back(mk(n.var, local[n.low], local[n.high]));
  }
  if (p.root >= local.size()) throw ContractViolation("portable set root out of range");
  return wrap(local[p.root], p.support);
}

// ---------------------------------------------------------------------------
// Dump format

std::vector<std::uint8_t> dump(const SymSet& a) {
  const PortableSet p = a.engine().export_set(a);
  std::vector<std::uint8_t> out(std::begin(kDumpMagic), std::end(kDumpMagic));
  put_u16(out, static_cast<std::uint16_t>(a.engine().universe().size()));
  for (const PortableNode& n : p.nodes) {
    put_u16(out, n.var);
    put_u32(out, n.low);
    put_u32(out, n.high);
  }
  put_u32(out, p.root);
  return out;
}

SymSet load(Engine& engine, std::span<const std::uint8_t> bytes, VarSet support) {
  constexpr std::size_t kHeader = 10;
  if (bytes.size() < kHeader + 4 || std::memcmp(bytes.data(), kDumpMagic, 8) != 0) {
    throw ContractViolation("not a diagram dump");
  }
  if ((bytes.size() - kHeader - 4) % 10 != 0) throw ContractViolation("truncated diagram dump");
  if (get_u16(bytes, 8) != engine.universe().size()) {
    throw ContractViolation("diagram dump was written for a different variable count");
  }
  PortableSet p;
  p.support = std::move(support);
  const std::size_t count = (bytes.size() - kHeader - 4) / 10;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t at = kHeader + 10 * k;
    p.nodes.push_back({get_u16(bytes, at), get_u32(bytes, at + 2), get_u32(bytes, at + 6)});
  }
  p.root = get_u32(bytes, bytes.size() - 4);
  if (count > 0 && p.root != count + 1) throw ContractViolation("diagram dump root is not the last node");
  if (count == 0 && p.root > 1) throw ContractViolation("diagram dump root out of range");
  return engine.import_set(p);
}

}  // namespace cscc
