#include "cscc/coloured_graph.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace cscc {

// ---------------------------------------------------------------------------
// Edge lists

std::size_t EdgeList::vertex_index(std::string_view label) const {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), label);
  if (it == vertices.end() || *it != label) throw ContractViolation("unknown vertex '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - vertices.begin());
}

std::size_t EdgeList::colour_index(std::string_view label) const {
  auto it = std::lower_bound(colours.begin(), colours.end(), label);
  if (it == colours.end() || *it != label) throw ContractViolation("unknown colour '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - colours.begin());
}

EdgeList make_edge_list(std::vector<std::string> vertex_labels, std::vector<std::string> colour_labels,
                        const std::vector<std::tuple<std::string, std::string, std::string>>& triples) {
  auto sorted_unique = [](std::vector<std::string>& labels, const char* what) {
    std::sort(labels.begin(), labels.end());
    if (std::adjacent_find(labels.begin(), labels.end()) != labels.end()) {
      throw ContractViolation(std::string("duplicate ") + what + " label");
    }
  };
  EdgeList out;
  out.vertices = std::move(vertex_labels);
  out.colours = std::move(colour_labels);
  sorted_unique(out.vertices, "vertex");
  sorted_unique(out.colours, "colour");
  if (out.vertices.empty()) throw ContractViolation("graph needs at least one vertex");
  std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;
  for (const auto& [from, colour, to] : triples) {
    seen.emplace(out.vertex_index(from), out.colour_index(colour), out.vertex_index(to));
  }
  out.edges.assign(seen.begin(), seen.end());
  return out;
}

EdgeList parse_edge_list(std::string_view text) {
  std::vector<std::string> declared_vertices;
  std::vector<std::string> declared_colours;
  bool vertices_declared = false;
  bool colours_declared = false;
  std::vector<std::tuple<std::string, std::string, std::string>> triples;
  std::set<std::string> seen_vertices;
  std::set<std::string> seen_colours;
  std::vector<std::size_t> triple_lines;

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  auto valid_label = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
      return std::isalnum(c) || c == '_' || c == '.' || c == '-';
    });
  };
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::vector<std::string> words;
    for (std::string w; fields >> w;) words.push_back(w);
    if (words.empty()) continue;
    const bool declares_vertices = words[0] == "vertices:";
    const bool declares_colours = words[0] == "colours:";
    for (std::size_t i = (declares_vertices || declares_colours) ? 1 : 0; i < words.size(); ++i) {
      if (!valid_label(words[i])) {
        throw ParseError("invalid label '" + words[i] + "'", number, line.find(words[i]) + 1);
      }
    }
    if (declares_vertices) {
      vertices_declared = true;
      declared_vertices.insert(declared_vertices.end(), words.begin() + 1, words.end());
    } else if (declares_colours) {
      colours_declared = true;
      declared_colours.insert(declared_colours.end(), words.begin() + 1, words.end());
    } else if (words.size() == 3) {
      triples.emplace_back(words[0], words[1], words[2]);
      triple_lines.push_back(number);
      seen_vertices.insert(words[0]);
      seen_vertices.insert(words[2]);
      seen_colours.insert(words[1]);
    } else {
      throw ParseError("expected '<from> <colour> <to>'", number, 1);
    }
  }
  std::vector<std::string> vertices =
      vertices_declared ? declared_vertices : std::vector<std::string>(seen_vertices.begin(), seen_vertices.end());
  std::vector<std::string> colours =
      colours_declared ? declared_colours : std::vector<std::string>(seen_colours.begin(), seen_colours.end());
  if (colours.empty()) colours.push_back("default");
  const std::set<std::string> vertex_set(vertices.begin(), vertices.end());
  const std::set<std::string> colour_set(colours.begin(), colours.end());
  for (std::size_t k = 0; k < triples.size(); ++k) {
    const auto& [from, colour, to] = triples[k];
    for (const auto* v : {&from, &to}) {
      if (!vertex_set.count(*v)) throw ParseError("undeclared vertex '" + *v + "'", triple_lines[k], 1);
    }
    if (!colour_set.count(colour)) throw ParseError("undeclared colour '" + colour + "'", triple_lines[k], 1);
  }
  return make_edge_list(std::move(vertices), std::move(colours), triples);
}

std::size_t bits_for(std::size_t count) {
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < count) ++bits;
  return bits;
}

std::shared_ptr<const VariableUniverse> make_universe(const EdgeList& edges) {
  std::vector<std::string> state;
  std::vector<std::string> inputs;
  const std::size_t vertex_bits = std::max<std::size_t>(1, bits_for(edges.vertices.size()));
  for (std::size_t i = 0; i < vertex_bits; ++i) state.push_back("v" + std::to_string(i));
  for (std::size_t i = 0; i < bits_for(edges.colours.size()); ++i) inputs.push_back("k" + std::to_string(i));
  return std::make_shared<const VariableUniverse>(std::move(state), std::move(inputs));
}

Valuation vertex_code(const VariableUniverse& u, std::size_t index) {
  Valuation out;
  const std::size_t k = u.state_count();
  for (std::size_t i = 0; i < k; ++i) out.emplace_back(u.state_var(i), ((index >> (k - 1 - i)) & 1u) != 0);
  return out;
}

Valuation colour_code(const VariableUniverse& u, std::size_t index) {
  Valuation out;
  const std::size_t k = u.input_count();
  for (std::size_t i = 0; i < k; ++i) out.emplace_back(u.input_var(i), ((index >> (k - 1 - i)) & 1u) != 0);
  return out;
}

// ---------------------------------------------------------------------------
// Construction

ColouredGraph::ColouredGraph(Engine& engine, SymSet vertices, SymSet valid)
    : engine_(&engine), vertices_(std::move(vertices)), valid_(std::move(valid)) {
  StepCounter::Pause quiet(engine.steps());
  const VariableUniverse& u = engine.universe();
  if (!vertices_.support().is_subset_of(u.state_vars())) {
    throw ContractViolation("vertex set must range over state variables");
  }
  if (!valid_.support().is_subset_of(u.input_vars())) {
    throw ContractViolation("colour set must range over input variables");
  }
  vertices_ = vertices_ | engine.empty(u.state_vars());
  valid_ = valid_ | engine.empty(u.input_vars());
  unit_ = vertices_ & valid_;
  identity_ = engine.full();
  for (std::size_t i = u.state_count(); i-- > 0;) {
    SymSet same = (engine.literal(u.state_var(i), true) & engine.literal(u.primed_var(i), true)) |
                  (engine.literal(u.state_var(i), false) & engine.literal(u.primed_var(i), false));
    identity_ = identity_ & same;
  }
}

ColouredGraph ColouredGraph::from_updates(Engine& engine, const std::vector<SymSet>& updates, SymSet valid) {
  const VariableUniverse& u = engine.universe();
  if (updates.size() != u.state_count()) throw ContractViolation("need one update function per state variable");
  ColouredGraph g(engine, engine.full(u.state_vars()), std::move(valid));
  StepCounter::Pause quiet(engine.steps());
  const VarSet domain = u.state_vars() | u.input_vars();
  for (std::size_t i = 0; i < updates.size(); ++i) {
    if (!updates[i].support().is_subset_of(domain)) {
      throw ContractViolation("update function must range over state and input variables");
    }
    const SymSet s = engine.literal(u.state_var(i), true);
    g.changes_.push_back(((updates[i] - s) | (s - updates[i])) | engine.empty(domain));
  }
  return g;
}

ColouredGraph ColouredGraph::from_network(Engine& engine, const ExpandedNetwork& net) {
  return from_updates(engine, encode(net, engine), valid_colours(net, engine));
}

ColouredGraph ColouredGraph::from_relation(Engine& engine, SymSet relation, SymSet vertices, SymSet valid) {
  ColouredGraph g(engine, std::move(vertices), std::move(valid));
  const VariableUniverse& u = engine.universe();
  StepCounter::Pause quiet(engine.steps());
  SymSet primed_vertices = engine.rename(g.vertices_, u.unprimed_to_primed());
  g.relation_ = relation & g.unit_ & primed_vertices;
  g.relation_ = *g.relation_ | engine.empty(u.all_vars());
  return g;
}

ColouredGraph ColouredGraph::from_edges(Engine& engine, const EdgeList& edges) {
  const VariableUniverse& u = engine.universe();
  if (u.state_count() != std::max<std::size_t>(1, bits_for(edges.vertices.size())) ||
      u.input_count() != bits_for(edges.colours.size())) {
    throw ContractViolation("universe does not match the edge list");
  }
  StepCounter::Pause quiet(engine.steps());
  const auto primed = u.unprimed_to_primed();
  SymSet vertices = engine.empty(u.state_vars());
  for (std::size_t v = 0; v < edges.vertices.size(); ++v) vertices = vertices | engine.cube(vertex_code(u, v));
  SymSet valid = engine.empty(u.input_vars());
  for (std::size_t c = 0; c < edges.colours.size(); ++c) valid = valid | engine.cube(colour_code(u, c));
  SymSet relation = engine.empty(u.all_vars());
  for (const auto& [from, colour, to] : edges.edges) {
    Valuation point = vertex_code(u, from);
    for (const auto& [var, value] : colour_code(u, colour)) point.emplace_back(var, value);
    for (const auto& [var, value] : vertex_code(u, to)) point.emplace_back(var + 1, value);  // primed twin
    relation = relation | engine.cube(point);
  }
  return from_relation(engine, relation, vertices, valid);
}

// ---------------------------------------------------------------------------
// Operators

std::size_t ColouredGraph::transition_count() const {
  return update_based() ? changes_.size() : 1;
}

SymSet ColouredGraph::colours(const SymSet& a) const {
  StepCounter::Collapse one(engine_->steps());
  return engine_->exists(a, engine_->universe().state_vars());
}

SymSet ColouredGraph::var_post(std::size_t i, const SymSet& x) const {
  if (!update_based()) throw ContractViolation("var_post needs an update-based graph");
  if (i >= changes_.size()) throw ContractViolation("variable index out of range");
  StepCounter::Collapse one(engine_->steps());
  return engine_->flip_var(x & changes_[i], engine_->universe().state_var(i));
}

SymSet ColouredGraph::var_pre(std::size_t i, const SymSet& x) const {
  if (!update_based()) throw ContractViolation("var_pre needs an update-based graph");
  if (i >= changes_.size()) throw ContractViolation("variable index out of range");
  StepCounter::Collapse one(engine_->steps());
  return engine_->flip_var(x, engine_->universe().state_var(i)) & changes_[i];
}

SymSet ColouredGraph::post(const SymSet& x) const {
  StepCounter::Collapse one(engine_->steps());
  const VariableUniverse& u = engine_->universe();
  if (!update_based()) {
    SymSet successors = engine_->exists(x & *relation_, u.state_vars());
    return engine_->rename(successors, u.primed_to_unprimed());
  }
  SymSet result = engine_->empty(u.state_vars() | u.input_vars());
  for (std::size_t i = 0; i < changes_.size(); ++i) result = result | var_post(i, x);
  return result;
}

SymSet ColouredGraph::pre(const SymSet& x) const {
  StepCounter::Collapse one(engine_->steps());
  const VariableUniverse& u = engine_->universe();
  if (!update_based()) {
    SymSet shifted = engine_->rename(x, u.unprimed_to_primed());
    return engine_->exists(shifted & *relation_, u.primed_vars());
  }
  SymSet result = engine_->empty(u.state_vars() | u.input_vars());
  for (std::size_t i = 0; i < changes_.size(); ++i) result = result | var_pre(i, x);
  return result;
}

SymSet ColouredGraph::transition_image(std::size_t k, const SymSet& x, Direction d) const {
  if (!update_based()) {
    if (k != 0) throw ContractViolation("relation graphs have a single transition");
    return image(x, d);
  }
  return d == Direction::Forward ? var_post(k, x) : var_pre(k, x);
}

SymSet ColouredGraph::mono_post(const Valuation& colour, const SymSet& x) const {
  StepCounter::Collapse one(engine_->steps());
  const VariableUniverse& u = engine_->universe();
  SymSet coloured = x & engine_->cube(colour);
  return engine_->exists(post(coloured), u.input_vars());
}

SymSet ColouredGraph::mono_pre(const Valuation& colour, const SymSet& x) const {
  StepCounter::Collapse one(engine_->steps());
  const VariableUniverse& u = engine_->universe();
  SymSet coloured = x & engine_->cube(colour);
  return engine_->exists(pre(coloured), u.input_vars());
}

SymSet ColouredGraph::join(const SymSet& a) const {
  StepCounter::Collapse one(engine_->steps());
  const VariableUniverse& u = engine_->universe();
  SymSet result = a & engine_->rename(a, u.unprimed_to_primed());
  return result | engine_->empty(u.all_vars());
}

SymSet ColouredGraph::diagonal(const SymSet& a) const {
  StepCounter::Collapse one(engine_->steps());
  return (a & identity_) | engine_->empty(engine_->universe().all_vars());
}

SymSet ColouredGraph::pivots(const SymSet& v) const {
  if (v.is_empty()) return v;
  const VariableUniverse& u = engine_->universe();
  const std::size_t n = u.state_count();
  // projections[k] = exists s_{k+1} .. s_n . v
  std::vector<SymSet> projections(n);
  projections[n - 1] = v;
  for (std::size_t k = n - 1; k > 0; --k) {
    projections[k - 1] = engine_->exists(projections[k], VarSet{u.state_var(k)});
  }
  SymSet result = engine_->pick_var(projections[0], u.state_var(0));
  for (std::size_t k = 1; k < n; ++k) {
    result = engine_->pick_var(projections[k], u.state_var(k)) & result;
  }
  return result;
}

SymSet ColouredGraph::trim_step(const SymSet& v, TrimDirection direction) const {
  // v & post(v) keeps vertices with a predecessor in v; v & pre(v) those with a successor.
  const SymSet reached = direction == TrimDirection::NoPredecessor ? post(v) : pre(v);
  return reached & v;
}

// ---------------------------------------------------------------------------
// Cloning across engines

PortableGraph ColouredGraph::export_graph() const {
  PortableGraph g;
  g.update_based = update_based();
  for (const SymSet& c : changes_) g.changes.push_back(engine_->export_set(c));
  if (relation_) g.relation = engine_->export_set(*relation_);
  g.vertices = engine_->export_set(vertices_);
  g.valid = engine_->export_set(valid_);
  return g;
}

ColouredGraph ColouredGraph::import_graph(Engine& engine, const PortableGraph& p) {
  ColouredGraph g(engine, engine.import_set(p.vertices), engine.import_set(p.valid));
  for (const PortableSet& c : p.changes) g.changes_.push_back(engine.import_set(c));
  if (p.relation) g.relation_ = engine.import_set(*p.relation);
  if (p.update_based && g.changes_.size() != engine.universe().state_count()) {
    throw ContractViolation("imported graph does not match the engine universe");
  }
  return g;
}

}  // namespace cscc
