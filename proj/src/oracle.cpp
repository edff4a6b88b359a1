#include "cscc/oracle.hpp"

#include "cscc/errors.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <unordered_map>

namespace cscc {

namespace {

constexpr std::uint32_t kUnvisited = std::numeric_limits<std::uint32_t>::max();

std::vector<std::uint8_t> bits_of(std::uint64_t value, std::size_t width) {
  std::vector<std::uint8_t> out(width);
  for (std::size_t i = 0; i < width; ++i) out[i] = (value >> (width - 1 - i)) & 1u;
  return out;
}

std::uint64_t value_of(std::span<const std::uint8_t> bits) {
  std::uint64_t v = 0;
  for (std::uint8_t b : bits) v = (v << 1) | (b ? 1u : 0u);
  return v;
}

std::string bit_string(const std::vector<std::uint8_t>& bits) {
  std::string s;
  for (std::uint8_t b : bits) s += b ? '1' : '0';
  return s;
}

}  // namespace

bool evaluate(const Expr& e, std::span<const std::uint8_t> state, std::span<const std::uint8_t> inputs,
              const FunctionTables* tables) {
  const auto& a = e.args();
  switch (e.kind()) {
    case ExprKind::Constant: return e.value();
    case ExprKind::Variable:
      if (e.index() >= state.size()) throw ContractViolation("variable outside the evaluated state");
      return state[e.index()] != 0;
    case ExprKind::Input:
      if (e.index() >= inputs.size()) throw ContractViolation("input outside the evaluated valuation");
      return inputs[e.index()] != 0;
    case ExprKind::Not: return !evaluate(a[0], state, inputs, tables);
    case ExprKind::And: return evaluate(a[0], state, inputs, tables) && evaluate(a[1], state, inputs, tables);
    case ExprKind::Or: return evaluate(a[0], state, inputs, tables) || evaluate(a[1], state, inputs, tables);
    case ExprKind::Implies: return !evaluate(a[0], state, inputs, tables) || evaluate(a[1], state, inputs, tables);
    case ExprKind::Iff: return evaluate(a[0], state, inputs, tables) == evaluate(a[1], state, inputs, tables);
    case ExprKind::Apply: {
      if (tables == nullptr || e.index() >= tables->size()) {
        throw ContractViolation("function application without an interpretation");
      }
      std::size_t row = 0;
      for (const Expr& arg : a) row = (row << 1) | (evaluate(arg, state, inputs, tables) ? 1u : 0u);
      const auto& table = (*tables)[e.index()];
      if (row >= table.size()) throw ContractViolation("truth table too short");
      return table[row] != 0;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Graph construction

ExplicitColouredGraph enumerate_graph(const ExpandedNetwork& net, std::uint64_t limit) {
  const std::size_t n = net.variables.size();
  const std::size_t m = net.inputs.size();
  if (n >= 32 || m >= 32) throw OracleLimitError("network too large for explicit enumeration");
  const std::uint64_t vertex_count = std::uint64_t{1} << n;
  const std::uint64_t input_space = std::uint64_t{1} << m;
  if (vertex_count > limit || input_space > limit) {
    throw OracleLimitError("explicit enumeration refused: state space exceeds the limit");
  }

  ExplicitColouredGraph g;
  g.state_bits = n;
  g.input_bits = m;
  for (std::uint64_t c = 0; c < input_space; ++c) {
    auto bits = bits_of(c, m);
    if (evaluate(net.valid_colour_constraint, {}, bits)) g.colours.push_back(std::move(bits));
  }
  if (vertex_count * g.colours.size() > limit) {
    throw OracleLimitError("explicit enumeration refused: " + std::to_string(vertex_count * g.colours.size()) +
                           " coloured pairs exceed the limit of " + std::to_string(limit));
  }
  for (std::uint64_t v = 0; v < vertex_count; ++v) g.vertices.push_back(bits_of(v, n));

  g.adjacency.assign(g.colours.size(), std::vector<std::vector<std::uint32_t>>(vertex_count));
  for (std::size_t c = 0; c < g.colours.size(); ++c) {
    for (std::uint64_t u = 0; u < vertex_count; ++u) {
      const auto& state = g.vertices[u];
      for (std::size_t i = 0; i < n; ++i) {
        const bool next = evaluate(net.updates[i], state, g.colours[c]);
        if (next != (state[i] != 0)) {
          g.adjacency[c][u].push_back(static_cast<std::uint32_t>(u ^ (std::uint64_t{1} << (n - 1 - i))));
        }
      }
    }
  }
  return g;
}

ExplicitColouredGraph explicit_from_edges(const EdgeList& edges) {
  ExplicitColouredGraph g;
  g.state_bits = std::max<std::size_t>(1, bits_for(edges.vertices.size()));
  g.input_bits = bits_for(edges.colours.size());
  for (std::size_t v = 0; v < edges.vertices.size(); ++v) g.vertices.push_back(bits_of(v, g.state_bits));
  for (std::size_t c = 0; c < edges.colours.size(); ++c) g.colours.push_back(bits_of(c, g.input_bits));
  g.adjacency.assign(edges.colours.size(), std::vector<std::vector<std::uint32_t>>(edges.vertices.size()));
  for (const auto& [from, colour, to] : edges.edges) {
    auto& succ = g.adjacency[colour][from];
    if (std::find(succ.begin(), succ.end(), to) == succ.end()) succ.push_back(static_cast<std::uint32_t>(to));
  }
  return g;
}

// ---------------------------------------------------------------------------
// SCC algorithms

std::size_t ExplicitRelation::component_count(std::size_t colour) const {
  const auto& ids = component[colour];
  if (ids.empty()) return 0;
  return static_cast<std::size_t>(*std::max_element(ids.begin(), ids.end())) + 1;
}

std::uint64_t ExplicitRelation::size() const {
  std::uint64_t total = 0;
  for (std::size_t c = 0; c < component.size(); ++c) {
    std::vector<std::uint64_t> sizes(component_count(c), 0);
    for (std::uint32_t id : component[c]) ++sizes[id];
    for (std::uint64_t s : sizes) total += s * s;
  }
  return total;
}

ExplicitRelation tarjan_per_colour(const ExplicitColouredGraph& g) {
  ExplicitRelation out;
  const std::size_t n = g.vertices.size();
  for (const auto& adj : g.adjacency) {
    std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0), comp(n, kUnvisited);
    std::vector<std::uint8_t> on_stack(n, 0);
    std::vector<std::uint32_t> stack;
    std::vector<std::pair<std::uint32_t, std::size_t>> frames;  // vertex, next edge
    std::uint32_t counter = 0;
    std::uint32_t next_id = 0;
    auto open = [&](std::uint32_t v) {
      index[v] = low[v] = counter++;
      stack.push_back(v);
      on_stack[v] = 1;
      frames.emplace_back(v, 0);
    };
    for (std::uint32_t root = 0; root < n; ++root) {
      if (index[root] != kUnvisited) continue;
      open(root);
      while (!frames.empty()) {
        auto& [v, edge] = frames.back();
        if (edge < adj[v].size()) {
          const std::uint32_t w = adj[v][edge++];
          if (index[w] == kUnvisited) {
            open(w);
          } else if (on_stack[w]) {
            low[v] = std::min(low[v], index[w]);
          }
          continue;
        }
        const std::uint32_t done = v;
        frames.pop_back();
        if (low[done] == index[done]) {
          std::uint32_t w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp[w] = next_id;
          } while (w != done);
          ++next_id;
        }
        if (!frames.empty()) {
          const std::uint32_t parent = frames.back().first;
          low[parent] = std::min(low[parent], low[done]);
        }
      }
    }
    out.component.push_back(std::move(comp));
  }
  return out;
}

ExplicitRelation kosaraju_per_colour(const ExplicitColouredGraph& g) {
  ExplicitRelation out;
  const std::size_t n = g.vertices.size();
  for (const auto& adj : g.adjacency) {
    std::vector<std::vector<std::uint32_t>> reverse(n);
    for (std::uint32_t u = 0; u < n; ++u) {
      for (std::uint32_t v : adj[u]) reverse[v].push_back(u);
    }
    // First sweep: finishing order on the graph.
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<std::uint32_t> order;
    std::vector<std::pair<std::uint32_t, std::size_t>> frames;
    for (std::uint32_t root = 0; root < n; ++root) {
      if (seen[root]) continue;
      seen[root] = 1;
      frames.emplace_back(root, 0);
      while (!frames.empty()) {
        auto& [v, edge] = frames.back();
        if (edge < adj[v].size()) {
          const std::uint32_t w = adj[v][edge++];
          if (!seen[w]) {
            seen[w] = 1;
            frames.emplace_back(w, 0);
          }
        } else {
          order.push_back(v);
          frames.pop_back();
        }
      }
    }
    // Second sweep on the transpose in reverse finishing order.
    std::vector<std::uint32_t> comp(n, kUnvisited);
    std::uint32_t next_id = 0;
    std::vector<std::uint32_t> todo;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      if (comp[*it] != kUnvisited) continue;
      comp[*it] = next_id;
      todo.push_back(*it);
      while (!todo.empty()) {
        const std::uint32_t v = todo.back();
        todo.pop_back();
        for (std::uint32_t w : reverse[v]) {
          if (comp[w] == kUnvisited) {
            comp[w] = next_id;
            todo.push_back(w);
          }
        }
      }
      ++next_id;
    }
    out.component.push_back(std::move(comp));
  }
  return out;
}

std::vector<std::size_t> nontrivial_per_colour(const ExplicitColouredGraph& g, const ExplicitRelation& r) {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < r.component.size(); ++c) {
    const auto& ids = r.component[c];
    std::vector<std::size_t> sizes(r.component_count(c), 0);
    std::vector<std::uint8_t> looped(sizes.size(), 0);
    for (std::size_t v = 0; v < ids.size(); ++v) {
      ++sizes[ids[v]];
      const auto& succ = g.adjacency[c][v];
      if (std::find(succ.begin(), succ.end(), v) != succ.end()) looped[ids[v]] = 1;
    }
    std::size_t count = 0;
    for (std::size_t k = 0; k < sizes.size(); ++k) count += (sizes[k] > 1 || looped[k]) ? 1 : 0;
    out.push_back(count);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Comparison

std::string Verdict::describe() const {
  if (equal) return "equal";
  std::ostringstream os;
  os << (in_symbolic ? "only in symbolic relation" : "only in explicit relation");
  if (difference) {
    os << ": (" << bit_string(difference->from) << ", " << bit_string(difference->colour) << ", "
       << bit_string(difference->to) << ")";
  }
  return os.str();
}

Verdict compare(const SymSet& relation, const ExplicitColouredGraph& g, const ExplicitRelation& r) {
  const Engine& e = relation.engine();
  const VariableUniverse& u = e.universe();
  if (u.state_count() != g.state_bits || u.input_count() != g.input_bits) {
    throw ContractViolation("explicit graph does not match the relation's universe");
  }
  if (!(relation.support() == u.all_vars())) throw ContractViolation("relation must range over all variables");
  if (r.component.size() != g.colours.size()) throw ContractViolation("relation does not match the graph");

  std::unordered_map<std::uint64_t, std::uint32_t> vertex_at, colour_at;
  for (std::size_t v = 0; v < g.vertices.size(); ++v) vertex_at.emplace(value_of(g.vertices[v]), v);
  for (std::size_t c = 0; c < g.colours.size(); ++c) colour_at.emplace(value_of(g.colours[c]), c);

  const std::size_t n = u.state_count();
  const std::size_t m = u.input_count();
  Verdict out;
  std::uint64_t seen = 0;
  e.for_each_witness(relation, [&](std::span<const std::uint8_t> p) {
    Triple t{std::vector<std::uint8_t>(n), std::vector<std::uint8_t>(m), std::vector<std::uint8_t>(n)};
    for (std::size_t i = 0; i < n; ++i) {
      t.from[i] = p[u.state_var(i)];
      t.to[i] = p[u.primed_var(i)];
    }
    for (std::size_t j = 0; j < m; ++j) t.colour[j] = p[u.input_var(j)];
    auto from = vertex_at.find(value_of(t.from));
    auto to = vertex_at.find(value_of(t.to));
    auto colour = colour_at.find(value_of(t.colour));
    if (from == vertex_at.end() || to == vertex_at.end() || colour == colour_at.end() ||
        !r.related(colour->second, from->second, to->second)) {
      out.equal = false;
      out.in_symbolic = true;
      out.difference = std::move(t);
      return false;
    }
    ++seen;
    return true;
  });
  if (!out.equal || seen == r.size()) return out;

  // Every symbolic triple is explicit, so some explicit triple is missing.
  for (std::size_t c = 0; c < g.colours.size(); ++c) {
    for (std::size_t a = 0; a < g.vertices.size(); ++a) {
      for (std::size_t b = 0; b < g.vertices.size(); ++b) {
        if (!r.related(c, a, b)) continue;
        Valuation point;
        for (std::size_t i = 0; i < n; ++i) {
          point.emplace_back(u.state_var(i), g.vertices[a][i] != 0);
          point.emplace_back(u.primed_var(i), g.vertices[b][i] != 0);
        }
        for (std::size_t j = 0; j < m; ++j) point.emplace_back(u.input_var(j), g.colours[c][j] != 0);
        if (!e.contains(relation, point)) {
          out.equal = false;
          out.in_symbolic = false;
          out.difference = Triple{g.vertices[a], g.colours[c], g.vertices[b]};
          return out;
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Corpus generator

PartialBooleanNetwork random_network(std::uint64_t seed, const GeneratorOptions& options) {
  if (options.max_variables == 0) throw ContractViolation("generator needs at least one variable");
  std::mt19937_64 rng(seed);
  auto below = [&](std::size_t bound) { return std::uniform_int_distribution<std::size_t>(0, bound - 1)(rng); };
  auto chance = [&](double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; };

  PartialBooleanNetwork net;
  const std::size_t n = 1 + below(options.max_variables);
  for (std::size_t i = 0; i < n; ++i) net.variables.push_back("x" + std::to_string(i + 1));

  std::size_t budget = options.max_inputs;
  while (budget > 0 && net.functions.size() < 3 && chance(0.7)) {
    std::size_t arity = below(options.max_arity + 1);
    while ((std::size_t{1} << arity) > budget) --arity;
    budget -= std::size_t{1} << arity;
    net.functions.push_back(FunctionSymbol{"f" + std::to_string(net.functions.size() + 1), arity});
  }

  auto literal = [&] {
    Expr v = Expr::variable(below(n));
    return chance(0.3) ? Expr::negation(v) : v;
  };
  auto application = [&](std::size_t f) {
    std::vector<Expr> args;
    for (std::size_t k = 0; k < net.functions[f].arity; ++k) args.push_back(literal());
    return Expr::apply(f, std::move(args));
  };
  std::function<Expr(std::size_t)> expression = [&](std::size_t depth) -> Expr {
    if (depth == 0 || chance(0.35)) {
      const std::size_t pick = below(10);
      if (pick == 0) return Expr::constant(chance(0.5));
      if (pick <= 2 && !net.functions.empty()) return application(below(net.functions.size()));
      return literal();
    }
    Expr lhs = expression(depth - 1);
    switch (below(5)) {
      case 0: return Expr::negation(lhs);
      case 1: return Expr::conjunction(lhs, expression(depth - 1));
      case 2: return Expr::disjunction(lhs, expression(depth - 1));
      case 3: return Expr::equivalence(lhs, expression(depth - 1));
      default: return Expr::implication(lhs, expression(depth - 1));
    }
  };
  for (std::size_t i = 0; i < n; ++i) net.updates.push_back(expression(3));

  // Every declared function shows up in some update.
  for (std::size_t f = 0; f < net.functions.size(); ++f) {
    const std::size_t i = below(n);
    Expr use = application(f);
    net.updates[i] = chance(0.5) ? Expr::conjunction(net.updates[i], use) : Expr::disjunction(net.updates[i], use);
  }

  if (!net.functions.empty() && chance(options.constraint_probability)) {
    auto row = [&](std::size_t f) {
      std::vector<Expr> args;
      for (std::size_t k = 0; k < net.functions[f].arity; ++k) args.push_back(Expr::constant(chance(0.5)));
      return Expr::apply(f, std::move(args));
    };
    const std::size_t f = below(net.functions.size());
    Expr c = Expr::implication(row(f), row(below(net.functions.size())));
    if (chance(0.4)) c = Expr::disjunction(c, Expr::negation(row(f)));
    net.colour_constraint = c;
  }
  return net;
}

}  // namespace cscc
