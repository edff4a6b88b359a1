#include "cscc/coloured_graph.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace cscc;
using namespace cscc::testing;

namespace {

Pairs random_subset(const Fixture& f, std::mt19937_64& rng, double density) {
  std::bernoulli_distribution keep(density);
  Pairs out;
  for (const auto& p : all_pairs(f)) {
    if (keep(rng)) out.insert(p);
  }
  return out;
}

std::set<std::uint32_t> colours_in(const Pairs& p) {
  std::set<std::uint32_t> out;
  for (const auto& [v, c] : p) out.insert(c);
  return out;
}

}  // namespace

TEST(EdgeList, ParsesSixVertexGraph) {
  const EdgeList el = parse_edge_list(kSixVertexEdges);
  EXPECT_EQ(el.vertices, (std::vector<std::string>{"a", "b", "c", "d", "e", "f"}));
  EXPECT_EQ(el.colours, (std::vector<std::string>{"blue", "red"}));
  EXPECT_EQ(el.edges.size(), 17u);
  auto u = make_universe(el);
  EXPECT_EQ(u->state_count(), 3u);
  EXPECT_EQ(u->input_count(), 1u);
}

TEST(EdgeList, DuplicatesAndUnknownLabels) {
  const EdgeList el = make_edge_list({"u", "v"}, {"k"}, {{"u", "k", "v"}, {"u", "k", "v"}});
  EXPECT_EQ(el.edges.size(), 1u);
  EXPECT_THROW(make_edge_list({"u"}, {"k"}, {{"u", "k", "w"}}), ContractViolation);
  EXPECT_THROW(parse_edge_list("vertices: a b\ncolours: k\na k z\n"), ParseError);
  EXPECT_THROW(parse_edge_list("a k\n"), ParseError);
}

TEST(EdgeList, ImplicitLabels) {
  const EdgeList el = parse_edge_list("# no declarations\nx red y\ny red x\n");
  EXPECT_EQ(el.vertices, (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(el.colours, (std::vector<std::string>{"red"}));
}

TEST(Graph, EmptyEdgeList) {
  Fixture f = edge_fixture("vertices: a b c\ncolours: k\n");
  EXPECT_TRUE(f.g().post(f.g().unit()).is_empty());
  EXPECT_TRUE(f.g().pre(f.g().unit()).is_empty());
}

TEST(Graph, SelfLoop) {
  Fixture f = edge_fixture("vertices: v w\nv k v\n");
  const SymSet x = encode_pairs(f, labelled(f, {{"v", "k"}}));
  EXPECT_EQ(decode(f, f.g().post(x)), labelled(f, {{"v", "k"}}));
}

TEST(Graph, UnitIsVertexTimesValid) {
  Fixture f = edge_fixture(kSixVertexEdges);
  EXPECT_EQ(decode(f, f.g().unit()), all_pairs(f));
  // five vertices: code 5..7 unused
  Fixture g = edge_fixture("vertices: a b c d e\ncolours: k\n");
  EXPECT_EQ(decode(g, g.g().unit()).size(), 5u);
}

TEST(Colours, Examples) {
  Fixture f = edge_fixture(kSixVertexEdges);
  const auto& u = f.e().universe();
  const SymSet two = encode_pairs(f, labelled(f, {{"a", "red"}, {"b", "blue"}}));
  EXPECT_EQ(f.g().colours(two).root(), f.g().valid().root());
  EXPECT_TRUE(f.g().colours(f.e().empty(u.state_vars() | u.input_vars())).is_empty());
  EXPECT_EQ(f.g().colours(f.g().unit()).root(), f.g().valid().root());
  const SymSet one = encode_pairs(f, labelled(f, {{"a", "red"}, {"c", "red"}}));
  EXPECT_EQ(f.e().count_assignments(f.g().colours(one), u.input_vars()), 1);
}

TEST(Images, SixVertexExamples) {
  Fixture f = edge_fixture(kSixVertexEdges);
  const SymSet b_blue = encode_pairs(f, labelled(f, {{"b", "blue"}}));
  EXPECT_EQ(decode(f, f.g().post(b_blue)), labelled(f, {{"c", "blue"}, {"e", "blue"}, {"f", "blue"}}));
  const SymSet b_red = encode_pairs(f, labelled(f, {{"b", "red"}}));
  EXPECT_EQ(decode(f, f.g().pre(b_red)), labelled(f, {{"a", "red"}, {"d", "red"}, {"e", "red"}, {"f", "red"}}));
  const auto& u = f.e().universe();
  EXPECT_TRUE(f.g().post(f.e().empty(u.state_vars() | u.input_vars())).is_empty());
}

TEST(Images, DualityOnRandomGraphs) {
  std::mt19937_64 rng(8);
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    GeneratorOptions opt;
    opt.max_variables = 5;
    opt.max_inputs = 3;
    Fixture f = network_fixture(expand(random_network(seed, opt)));
    for (int k = 0; k < 4; ++k) {
      const Pairs x = random_subset(f, rng, 0.3);
      const SymSet sx = encode_pairs(f, x);
      ASSERT_EQ(decode(f, f.g().post(sx)), explicit_post(f, x));
      ASSERT_EQ(decode(f, f.g().pre(sx)), explicit_pre(f, x));
    }
  }
}

TEST(Images, RelationGraphsMatchExplicit) {
  std::mt19937_64 rng(4);
  Fixture f = edge_fixture(kSixVertexEdges);
  for (int k = 0; k < 30; ++k) {
    const Pairs x = random_subset(f, rng, 0.4);
    const SymSet sx = encode_pairs(f, x);
    ASSERT_EQ(decode(f, f.g().post(sx)), explicit_post(f, x));
    ASSERT_EQ(decode(f, f.g().pre(sx)), explicit_pre(f, x));
  }
}

TEST(Images, MonoImagesMatchColourSlices) {
  Fixture f = network_fixture("fun g/1\nx1, g(x2)\nx2, !x1\nx3, x1 | x3\n");
  const auto& u = f.e().universe();
  std::mt19937_64 rng(2);
  const Pairs x = random_subset(f, rng, 0.5);
  const SymSet sx = encode_pairs(f, x);
  for (std::uint32_t c = 0; c < f.x.colours.size(); ++c) {
    Valuation colour;
    for (std::size_t j = 0; j < u.input_count(); ++j) colour.emplace_back(u.input_var(j), f.x.colours[c][j] != 0);
    std::set<std::uint32_t> expected;
    for (const auto& [v, cc] : explicit_post(f, x)) {
      if (cc == c) expected.insert(v);
    }
    const SymSet mono = f.g().mono_post(colour, f.e().exists(sx & f.e().cube(colour), u.input_vars()));
    std::set<std::uint32_t> got;
    for (const auto& [v, cc] : decode(f, mono & f.e().cube(colour))) got.insert(v);
    EXPECT_EQ(got, expected);
    std::set<std::uint32_t> expected_pre;
    for (const auto& [v, cc] : explicit_pre(f, x)) {
      if (cc == c) expected_pre.insert(v);
    }
    const SymSet mono_pre = f.g().mono_pre(colour, f.e().exists(sx & f.e().cube(colour), u.input_vars()));
    std::set<std::uint32_t> got_pre;
    for (const auto& [v, cc] : decode(f, mono_pre & f.e().cube(colour))) got_pre.insert(v);
    EXPECT_EQ(got_pre, expected_pre);
  }
}

TEST(VarImages, Examples) {
  {
    Fixture f = network_fixture("x1, !x1\n");
    const auto& u = f.e().universe();
    const SymSet zero = f.e().literal(u.state_var(0), false);
    EXPECT_EQ(f.g().var_post(0, zero).root(), f.e().literal(u.state_var(0), true).root());
  }
  {
    Fixture f = network_fixture("x1, x1\n");
    EXPECT_TRUE(f.g().var_post(0, f.g().unit()).is_empty());
    EXPECT_TRUE(f.g().var_pre(0, f.g().unit()).is_empty());
  }
  {
    // toggle network: every state has both single-bit neighbours as successors
    Fixture f = network_fixture("x1, !x1\nx2, !x2\n");
    for (std::uint32_t v = 0; v < 4; ++v) {
      const Pairs x{{v, 0}};
      const SymSet sx = encode_pairs(f, x);
      Pairs via_vars;
      for (std::size_t i = 0; i < 2; ++i) {
        auto part = decode(f, f.g().var_post(i, sx));
        via_vars.insert(part.begin(), part.end());
      }
      EXPECT_EQ(via_vars, explicit_post(f, x));
      EXPECT_EQ(via_vars.size(), 2u);
    }
  }
  {
    Fixture f = edge_fixture(kSixVertexEdges);
    EXPECT_THROW(f.g().var_post(0, f.g().unit()), ContractViolation);
  }
}

TEST(Join, Examples) {
  Fixture f = edge_fixture("vertices: u v\ncolours: c1 c2\n");
  const auto& u = f.e().universe();
  auto triples = [&](const SymSet& r) {
    std::set<std::tuple<int, int, int>> out;
    f.e().for_each_witness(r, [&](std::span<const std::uint8_t> p) {
      out.emplace(p[u.state_var(0)], p[u.input_var(0)], p[u.primed_var(0)]);
      return true;
    });
    return out;
  };
  const SymSet both = encode_pairs(f, labelled(f, {{"u", "c1"}, {"v", "c1"}}));
  EXPECT_EQ(triples(f.g().join(both)),
            (std::set<std::tuple<int, int, int>>{{0, 0, 0}, {0, 0, 1}, {1, 0, 0}, {1, 0, 1}}));
  const SymSet split = encode_pairs(f, labelled(f, {{"u", "c1"}, {"v", "c2"}}));
  EXPECT_EQ(triples(f.g().join(split)), (std::set<std::tuple<int, int, int>>{{0, 0, 0}, {1, 1, 1}}));
  EXPECT_TRUE(f.g().join(f.e().empty(u.state_vars() | u.input_vars())).is_empty());
}

TEST(Join, SymmetricUnderBlockSwap) {
  Fixture f = edge_fixture(kSixVertexEdges);
  const auto& u = f.e().universe();
  std::mt19937_64 rng(6);
  std::vector<std::pair<VarId, VarId>> swap;
  for (std::size_t i = 0; i < u.state_count(); ++i) {
    swap.emplace_back(u.state_var(i), u.primed_var(i));
    swap.emplace_back(u.primed_var(i), u.state_var(i));
  }
  for (int k = 0; k < 20; ++k) {
    const SymSet j = f.g().join(encode_pairs(f, random_subset(f, rng, 0.5)));
    EXPECT_EQ(f.e().rename(j, swap), j);
  }
}

TEST(Pivots, OnePerColourOnSixVertexGraph) {
  Fixture f = edge_fixture(kSixVertexEdges);
  const Pairs p = decode(f, f.g().pivots(f.g().unit()));
  // lexicographically smallest vertex for each colour
  EXPECT_EQ(p, labelled(f, {{"a", "blue"}, {"a", "red"}}));
}

TEST(Pivots, Singleton) {
  Fixture f = edge_fixture(kSixVertexEdges);
  const SymSet one = encode_pairs(f, labelled(f, {{"e", "red"}}));
  EXPECT_EQ(f.g().pivots(one), one);
}

TEST(Pivots, RandomSetsAndStepBound) {
  std::mt19937_64 rng(12);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    GeneratorOptions opt;
    opt.max_variables = 6;
    opt.max_inputs = 4;
    Fixture f = network_fixture(expand(random_network(seed, opt)));
    const Pairs x = random_subset(f, rng, 0.2);
    const SymSet sx = encode_pairs(f, x);
    const std::uint64_t before = f.e().steps().count();
    const SymSet p = f.g().pivots(sx);
    const std::uint64_t spent = f.e().steps().count() - before;
    const std::size_t n = f.e().universe().state_count();
    if (!x.empty()) EXPECT_LE(spent, 3 * n - 2);
    const Pairs got = decode(f, p);
    EXPECT_TRUE(std::includes(x.begin(), x.end(), got.begin(), got.end()));
    EXPECT_EQ(colours_in(got), colours_in(x));
    EXPECT_EQ(got.size(), colours_in(x).size());
    // the naive choice (first vertex of every colour) covers the same colours
    std::map<std::uint32_t, std::uint32_t> naive;
    for (const auto& [v, c] : x) naive.emplace(c, v);
    for (const auto& [v, c] : got) EXPECT_EQ(naive.at(c), v);
  }
}

TEST(Trim, ChainEmpties) {
  Fixture f = edge_fixture("u k v\nv k w\n");
  SymSet cur = f.g().unit();
  for (int k = 0; k < 4; ++k) {
    cur = f.g().trim_step(cur, TrimDirection::NoPredecessor);
    cur = f.g().trim_step(cur, TrimDirection::NoSuccessor);
  }
  EXPECT_TRUE(cur.is_empty());
}

TEST(Trim, SelfLoopSurvives) {
  Fixture f = edge_fixture("vertices: v w\nv k v\n");
  SymSet cur = f.g().unit();
  for (int k = 0; k < 5; ++k) {
    cur = f.g().trim_step(cur, TrimDirection::NoPredecessor);
    cur = f.g().trim_step(cur, TrimDirection::NoSuccessor);
  }
  EXPECT_EQ(decode(f, cur), labelled(f, {{"v", "k"}}));
}

TEST(Trim, SixVertexMatchesExplicitFixpoint) {
  Fixture f = edge_fixture(kSixVertexEdges);
  // explicit fixpoint of both trimming rules
  Pairs cur = all_pairs(f);
  while (true) {
    Pairs next;
    const Pairs has_pred = explicit_post(f, cur);
    const Pairs has_succ = explicit_pre(f, cur);
    for (const auto& p : cur) {
      if (has_pred.count(p) && has_succ.count(p)) next.insert(p);
    }
    if (next == cur) break;
    cur = next;
  }
  // (c, red) has no red predecessor
  EXPECT_EQ(cur.count({2, 1}), 0u);
  EXPECT_EQ(cur.size(), all_pairs(f).size() - 3);  // (c,red), then (a,blue), (d,blue)

  SymSet sym = f.g().unit();
  while (true) {
    SymSet next = f.g().trim_step(f.g().trim_step(sym, TrimDirection::NoPredecessor), TrimDirection::NoSuccessor);
    if (next == sym) break;
    sym = next;
  }
  EXPECT_EQ(decode(f, sym), cur);
}

TEST(Trim, SingleStepRemovesExactlyTheSources) {
  std::mt19937_64 rng(21);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Fixture f = network_fixture(expand(random_network(seed)));
    const Pairs x = random_subset(f, rng, 0.6);
    const SymSet sx = encode_pairs(f, x);
    Pairs keep_pred, keep_succ;
    const Pairs post = explicit_post(f, x), pre = explicit_pre(f, x);
    for (const auto& p : x) {
      if (post.count(p)) keep_pred.insert(p);
      if (pre.count(p)) keep_succ.insert(p);
    }
    EXPECT_EQ(decode(f, f.g().trim_step(sx, TrimDirection::NoPredecessor)), keep_pred);
    EXPECT_EQ(decode(f, f.g().trim_step(sx, TrimDirection::NoSuccessor)), keep_succ);
  }
}

TEST(Graph, CloneIntoAnotherEngine) {
  Fixture f = network_fixture(expand(random_network(5)));
  Engine other(f.e().universe_ptr());
  const ColouredGraph copy = ColouredGraph::import_graph(other, f.g().export_graph());
  const SymSet piv = f.g().pivots(f.g().unit());
  const SymSet there = other.import_set(f.e().export_set(piv));
  EXPECT_EQ(dump(copy.post(there)), dump(f.g().post(piv)));
  EXPECT_EQ(dump(copy.unit()), dump(f.g().unit()));
}
