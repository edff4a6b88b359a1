#include "cscc/decomposition.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>
#include <tuple>

using namespace cscc;
using namespace cscc::testing;

namespace {

using Triples = std::set<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>>;  // (u, colour, v)

Triples relation_triples(const Fixture& f, const SymSet& r) {
  const auto& u = f.e().universe();
  Triples out;
  f.e().for_each_witness(r, [&](std::span<const std::uint8_t> p) {
    std::uint64_t a = 0, b = 0, c = 0;
    for (std::size_t i = 0; i < u.state_count(); ++i) {
      a = (a << 1) | p[u.state_var(i)];
      b = (b << 1) | p[u.primed_var(i)];
    }
    for (std::size_t j = 0; j < u.input_count(); ++j) c = (c << 1) | p[u.input_var(j)];
    out.emplace(static_cast<std::uint32_t>(a), f.colour_at.at(c), static_cast<std::uint32_t>(b));
    return true;
  });
  return out;
}

/// Colour indices of a set over the input variables.
std::set<std::uint32_t> colour_indices(const Fixture& f, const SymSet& colours) {
  const SymSet wide = colours | f.e().empty(f.e().universe().state_vars() | f.e().universe().input_vars());
  std::set<std::uint32_t> out;
  for (const auto& [v, c] : decode(f, wide & f.g().unit())) out.insert(c);
  return out;
}

RunConfig config(bool saturation, bool trimming, unsigned threads) {
  RunConfig cfg;
  cfg.saturation = saturation;
  cfg.trimming = trimming;
  cfg.threads = threads;
  cfg.record_relation = true;
  return cfg;
}

struct SixVertexTrace {
  std::size_t blue_forward_round = 0;
  std::size_t red_backward_round = 0;
  bool f_blue_paused = false;
  bool finished_seen = false;
  bool locks_disjoint = true;
};

}  // namespace

class SixVertexGolden : public ::testing::TestWithParam<bool> {};

TEST_P(SixVertexGolden, PivotBGivesTheDocumentedSplit) {
  Fixture f = edge_fixture(kSixVertexEdges);
  const std::uint32_t blue = 0, red = 1;
  RunConfig cfg;
  cfg.saturation = GetParam();
  SixVertexTrace seen;
  cfg.on_lockstep = [&](const LockstepTrace& t) {
    StepCounter::Pause quiet(f.e().steps());
    const auto fl = colour_indices(f, t.locks.f_lock);
    const auto bl = colour_indices(f, t.locks.b_lock);
    for (auto c : fl) seen.locks_disjoint = seen.locks_disjoint && !bl.count(c);
    if (fl.count(blue) && seen.blue_forward_round == 0) seen.blue_forward_round = t.round;
    if (bl.count(red) && seen.red_backward_round == 0) seen.red_backward_round = t.round;
    if (t.finished) {
      seen.finished_seen = true;
      seen.f_blue_paused = decode(f, t.frontiers.b_paused).count({f.edges->vertex_index("f"), blue}) > 0;
    }
  };
  const SymSet pivots = encode_pairs(f, labelled(f, {{"b", "blue"}, {"b", "red"}}));
  const DecompositionStep step = decomposition_once(f.g(), f.g().unit(), cfg, pivots);

  EXPECT_EQ(seen.blue_forward_round, 2u);
  EXPECT_EQ(seen.red_backward_round, 3u);
  EXPECT_TRUE(seen.finished_seen);
  EXPECT_TRUE(seen.locks_disjoint);
  EXPECT_TRUE(seen.f_blue_paused);
  EXPECT_EQ(colour_indices(f, step.locks.f_lock), (std::set<std::uint32_t>{blue}));
  EXPECT_EQ(colour_indices(f, step.locks.b_lock), (std::set<std::uint32_t>{red}));

  EXPECT_EQ(decode(f, step.converged),
            labelled(f, {{"b", "blue"}, {"c", "blue"}, {"e", "blue"}, {"f", "blue"}, {"a", "red"}, {"b", "red"},
                         {"c", "red"}, {"d", "red"}, {"e", "red"}, {"f", "red"}}));
  EXPECT_EQ(decode(f, step.component),
            labelled(f, {{"b", "blue"}, {"c", "blue"}, {"e", "blue"}, {"f", "blue"}, {"a", "red"}, {"b", "red"},
                         {"d", "red"}, {"e", "red"}, {"f", "red"}}));
  EXPECT_EQ(decode(f, step.outside), labelled(f, {{"a", "blue"}, {"d", "blue"}}));
  EXPECT_EQ(decode(f, step.remainder), labelled(f, {{"c", "red"}}));
}

INSTANTIATE_TEST_SUITE_P(Saturation, SixVertexGolden, ::testing::Bool());

TEST(Lockstep, SelfLoopForwardWinsTie) {
  Fixture f = edge_fixture("vertices: v\nv k v\n");
  for (bool sat : {false, true}) {
    RunConfig cfg;
    cfg.saturation = sat;
    const LockstepResult r = run_lockstep(f.g(), f.g().unit(), f.g().unit(), cfg);
    EXPECT_EQ(r.locks.f_lock.root(), f.g().valid().root());
    EXPECT_TRUE(r.locks.b_lock.is_empty());
    const DecompositionStep s = decomposition_once(f.g(), f.g().unit(), cfg);
    EXPECT_EQ(decode(f, s.component), labelled(f, {{"v", "k"}}));
    EXPECT_TRUE(s.outside.is_empty());
    EXPECT_TRUE(s.remainder.is_empty());
  }
}

TEST(Lockstep, LocksPartitionTheColours) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    GeneratorOptions opt;
    opt.max_variables = 5;
    Fixture f = network_fixture(expand(random_network(seed, opt)));
    if (f.g().unit().is_empty()) continue;
    for (bool sat : {false, true}) {
      RunConfig cfg;
      cfg.saturation = sat;
      bool checked = false;
      cfg.on_lockstep = [&](const LockstepTrace& t) {
        StepCounter::Pause quiet(f.e().steps());
        ASSERT_TRUE((t.locks.f_lock & t.locks.b_lock).is_empty());
        if (t.finished) {
          checked = true;
          ASSERT_EQ((t.locks.f_lock | t.locks.b_lock).root(), f.g().colours(t.task).root());
        }
      };
      const DecompositionStep s = decomposition_once(f.g(), f.g().unit(), cfg);
      EXPECT_TRUE(checked);
      // W, V \ Con and Con \ W partition V
      EXPECT_TRUE((s.component & s.outside).is_empty());
      EXPECT_TRUE((s.component & s.remainder).is_empty());
      EXPECT_EQ((s.component | s.outside | s.remainder).root(), f.g().unit().root());
    }
  }
}

TEST(Lockstep, ComponentColoursMatchTheTask) {
  // W carries exactly one SCC for every colour of the task
  Fixture f = edge_fixture(kSixVertexEdges);
  const DecompositionStep s = decomposition_once(f.g(), f.g().unit(), RunConfig{});
  EXPECT_EQ(f.g().colours(s.component).root(), f.g().valid().root());
}

TEST(NextStep, AdvancesEachColourOnce) {
  // x1 toggles freely; x2 may rise only under g=1 with x1 set
  Fixture f = network_fixture("fun g/0\nx1, !x1\nx2, g & x1\n");
  const Pairs start{{0, 0}, {0, 1}};  // vertex 00 in both colours
  const NextStepResult r = next_step(f.g(), encode_pairs(f, start), f.g().unit(), Direction::Forward);
  // x1 fires first in both colours; x2 is not enabled from 00
  EXPECT_EQ(decode(f, r.reached), (Pairs{{0, 0}, {0, 1}, {2, 0}, {2, 1}}));
  EXPECT_TRUE(r.remaining.is_empty());
  // a closed set cannot advance
  const NextStepResult closed = next_step(f.g(), f.g().unit(), f.g().unit(), Direction::Forward);
  EXPECT_EQ(closed.reached.root(), f.g().unit().root());
  EXPECT_EQ(closed.remaining.root(), f.g().valid().root());
}

TEST(NextStep, DomainRestrictsImages) {
  Fixture f = edge_fixture(kSixVertexEdges);
  const SymSet b = encode_pairs(f, labelled(f, {{"b", "blue"}}));
  const SymSet domain = encode_pairs(f, labelled(f, {{"b", "blue"}, {"c", "blue"}}));
  const NextStepResult r = next_step(f.g(), b, domain, Direction::Forward);
  EXPECT_EQ(decode(f, r.reached), labelled(f, {{"b", "blue"}, {"c", "blue"}}));
  const NextStepResult again = next_step(f.g(), r.reached, domain, Direction::Forward);
  EXPECT_EQ(colour_indices(f, again.remaining), (std::set<std::uint32_t>{0}));
}

TEST(NextStep, FixpointEqualsIteratedImage) {
  std::mt19937_64 rng(3);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Fixture f = network_fixture(expand(random_network(seed)));
    const Pairs all = all_pairs(f);
    if (all.empty()) continue;
    Pairs seed_pairs;
    std::bernoulli_distribution keep(0.05);
    for (const auto& p : all) {
      if (keep(rng)) seed_pairs.insert(p);
    }
    for (Direction d : {Direction::Forward, Direction::Backward}) {
      SymSet sat = encode_pairs(f, seed_pairs);
      while (true) {
        NextStepResult ns = next_step(f.g(), sat, f.g().unit(), d);
        if (ns.reached == sat) break;
        sat = ns.reached;
      }
      Pairs expected = seed_pairs;
      while (true) {
        const Pairs img = d == Direction::Forward ? explicit_post(f, expected) : explicit_pre(f, expected);
        const std::size_t before = expected.size();
        expected.insert(img.begin(), img.end());
        if (expected.size() == before) break;
      }
      ASSERT_EQ(decode(f, sat), expected) << "seed " << seed;
    }
  }
}

TEST(Trimming, Examples) {
  RunConfig cfg;
  {
    Fixture f = edge_fixture("u k v\nv k w\n");
    EXPECT_TRUE(trim(f.g(), f.g().unit(), cfg).is_empty());
  }
  {
    Fixture f = edge_fixture("vertices: v w\nv k v\n");
    EXPECT_EQ(decode(f, trim(f.g(), f.g().unit(), cfg)), labelled(f, {{"v", "k"}}));
  }
  {
    Fixture f = edge_fixture(kSixVertexEdges);
    const Pairs kept = decode(f, trim(f.g(), f.g().unit(), cfg));
    EXPECT_EQ(kept.size(), 9u);
    EXPECT_FALSE(kept.count({f.edges->vertex_index("c"), 1}));
  }
}

TEST(Trimming, KeepsEveryNontrivialComponent) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Fixture f = network_fixture(expand(random_network(seed)));
    for (double factor : {0.01, 2.0}) {
      RunConfig cfg;
      cfg.trim_cutoff_factor = factor;
      const Pairs kept = decode(f, trim(f.g(), f.g().unit(), cfg));
      const ExplicitRelation rel = tarjan_per_colour(f.x);
      for (std::uint32_t c = 0; c < f.x.colours.size(); ++c) {
        for (std::uint32_t v = 0; v < f.x.vertices.size(); ++v) {
          bool nontrivial = false;
          for (std::uint32_t w = 0; w < f.x.vertices.size() && !nontrivial; ++w) {
            nontrivial = w != v && rel.related(c, v, w);
          }
          for (auto w : f.x.adjacency[c][v]) nontrivial = nontrivial || w == v;
          if (nontrivial) ASSERT_TRUE(kept.count({v, c})) << "seed " << seed;
        }
      }
    }
  }
}

TEST(ColouredScc, SixVertexAllConfigurationsMatchOracle) {
  Fixture f = edge_fixture(kSixVertexEdges);
  const ExplicitRelation rel = tarjan_per_colour(f.x);
  for (bool sat : {false, true}) {
    for (bool trimming : {false, true}) {
      for (unsigned threads : {1u, 3u}) {
        const SccRelation r = coloured_scc(f.g(), config(sat, trimming, threads));
        ASSERT_EQ(r.status, RunStatus::Complete);
        ASSERT_TRUE(r.relation);
        const Verdict v = compare(*r.relation, f.x, rel);
        EXPECT_TRUE(v.equal) << v.describe();
      }
    }
  }
}

TEST(ColouredScc, RandomNetworksMatchOracle) {
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    Fixture f = network_fixture(expand(random_network(seed)));
    const ExplicitRelation rel = tarjan_per_colour(f.x);
    for (bool sat : {false, true}) {
      for (bool trimming : {false, true}) {
        const SccRelation r = coloured_scc(f.g(), config(sat, trimming, seed % 2 ? 2 : 1));
        ASSERT_EQ(r.status, RunStatus::Complete);
        const Verdict v = compare(*r.relation, f.x, rel);
        ASSERT_TRUE(v.equal) << "seed " << seed << ": " << v.describe();
      }
    }
  }
}

TEST(ColouredScc, EdgelessGraphGivesIdentity) {
  Fixture f = edge_fixture("vertices: a b c\ncolours: x y\n");
  for (bool trimming : {false, true}) {
    const SccRelation r = coloured_scc(f.g(), config(true, trimming, 1));
    Triples expected;
    for (std::uint32_t c = 0; c < 2; ++c) {
      for (std::uint32_t v = 0; v < 3; ++v) expected.emplace(v, c, v);
    }
    EXPECT_EQ(relation_triples(f, *r.relation), expected);
  }
}

TEST(ColouredScc, ComponentsAreDisjointAndExhaustive) {
  for (std::uint64_t seed = 200; seed < 220; ++seed) {
    Fixture f = network_fixture(expand(random_network(seed)));
    const SccRelation r = coloured_scc(f.g(), config(true, true, 1));
    std::map<Pair, int> owner;
    for (std::size_t k = 0; k < r.components.size(); ++k) {
      for (const Pair& p : decode(f, r.components[k])) ASSERT_TRUE(owner.emplace(p, static_cast<int>(k)).second);
    }
    for (const Pair& p : decode(f, r.trimmed)) ASSERT_TRUE(owner.emplace(p, -1).second);
    ASSERT_EQ(owner.size(), all_pairs(f).size());
  }
}

TEST(ColouredScc, RelationIsAnEquivalencePerColour) {
  for (std::uint64_t seed = 300; seed < 315; ++seed) {
    Fixture f = network_fixture(expand(random_network(seed)));
    const SccRelation r = coloured_scc(f.g(), config(true, true, 1));
    const Triples t = relation_triples(f, *r.relation);
    for (const Pair& p : all_pairs(f)) ASSERT_TRUE(t.count({p.first, p.second, p.first}));
    for (const auto& [a, c, b] : t) {
      ASSERT_TRUE(t.count({b, c, a}));
      for (std::uint32_t x = 0; x < f.x.vertices.size(); ++x) {
        if (t.count({b, c, x})) ASSERT_TRUE(t.count({a, c, x}));
      }
    }
  }
}

TEST(ColouredScc, RelationBytesIndependentOfConfiguration) {
  Fixture f = network_fixture(expand(random_network(77)));
  const auto reference = dump(*coloured_scc(f.g(), config(false, false, 1)).relation);
  for (bool sat : {false, true}) {
    for (unsigned threads : {1u, 4u}) {
      EXPECT_EQ(dump(*coloured_scc(f.g(), config(sat, true, threads)).relation), reference);
    }
  }
}

TEST(ColouredScc, NoAdmissibleColours) {
  Fixture f = network_fixture("fun g/1\nconstraint 0\nx1, g(x1)\n");
  const SccRelation r = coloured_scc(f.g(), config(true, true, 1));
  EXPECT_EQ(r.status, RunStatus::Complete);
  EXPECT_TRUE(r.components.empty());
  EXPECT_TRUE(r.relation->is_empty());
  EXPECT_TRUE(nontrivial_counts(f.g(), r.components).empty());
}

TEST(ColouredScc, StopRequestGivesPartialResult) {
  Fixture f = network_fixture(expand(random_network(9)));
  for (unsigned threads : {1u, 3u}) {
    std::stop_source src;
    src.request_stop();
    RunConfig cfg = config(true, true, threads);
    cfg.stop = src.get_token();
    const SccRelation r = coloured_scc(f.g(), cfg);
    EXPECT_EQ(r.status, RunStatus::Timeout);
    EXPECT_FALSE(r.relation);
  }
}

TEST(ColouredScc, ExpiredDeadline) {
  Fixture f = edge_fixture(kSixVertexEdges);
  RunConfig cfg = config(true, true, 1);
  cfg.deadline = std::chrono::steady_clock::now() - std::chrono::seconds(1);
  EXPECT_EQ(coloured_scc(f.g(), cfg).status, RunStatus::Timeout);
}

TEST(ColouredScc, InvalidConfiguration) {
  Fixture f = edge_fixture(kSixVertexEdges);
  EXPECT_THROW(coloured_scc(f.g(), config(true, true, 0)), ContractViolation);
  RunConfig cfg;
  cfg.trim_cutoff_factor = 0;
  EXPECT_THROW(coloured_scc(f.g(), cfg), ContractViolation);
}

TEST(ColouredScc, ProgressIsReportedPerTask) {
  Fixture f = edge_fixture(kSixVertexEdges);
  RunConfig cfg = config(true, true, 1);
  std::size_t events = 0;
  cfg.progress = [&](const ProgressEvent&) { ++events; };
  const std::uint64_t quiet_steps = coloured_scc(f.g(), config(true, true, 1)).steps;
  const SccRelation r = coloured_scc(f.g(), cfg);
  EXPECT_GE(events, 1u);
  EXPECT_EQ(r.steps, quiet_steps);
}

TEST(NontrivialCounts, MatchOracle) {
  for (std::uint64_t seed = 400; seed < 430; ++seed) {
    Fixture f = network_fixture(expand(random_network(seed)));
    const SccRelation r = coloured_scc(f.g(), config(true, true, 1));
    const auto expected = nontrivial_per_colour(f.x, tarjan_per_colour(f.x));
    std::map<std::uint32_t, std::size_t> got;
    for (const ColourCell& cell : nontrivial_counts(f.g(), r.components)) {
      for (auto c : colour_indices(f, cell.colours)) ASSERT_TRUE(got.emplace(c, cell.count).second);
    }
    ASSERT_EQ(got.size(), f.x.colours.size());
    for (std::uint32_t c = 0; c < f.x.colours.size(); ++c) ASSERT_EQ(got[c], expected[c]) << "seed " << seed;
  }
}

TEST(NontrivialCounts, SixVertexGraph) {
  Fixture f = edge_fixture(kSixVertexEdges);
  const SccRelation r = coloured_scc(f.g(), config(true, true, 1));
  const auto cells = nontrivial_counts(f.g(), r.components);
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0].count, 1u);
  EXPECT_EQ(cells[0].colours.root(), f.g().valid().root());
}
