#pragma once

// Coloured lock-step SCC decomposition.
//
// Every task holds a coloured vertex set V that is SCC-closed for each of its
// colours. A task picks one pivot per colour, grows forward and backward
// reachable sets in lock-step, and splits V into the pivot components W, the
// part outside the converged set (V \ Con) and the rest of the converged set
// (Con \ W). Tasks are independent and run from a FIFO queue, optionally on
// several worker threads, each with its own engine.

#include "cscc/coloured_graph.hpp"
#include "cscc/symbolic_engine.hpp"

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

namespace cscc {

struct LockState {
  SymSet f_lock;  // colours whose forward search is complete
  SymSet b_lock;  // colours whose backward search is complete
};

struct LockstepFrontiers {
  SymSet f;
  SymSet b;
  SymSet f_open;
  SymSet b_open;
  SymSet f_paused;
  SymSet b_paused;
};

struct LockstepResult {
  LockstepFrontiers frontiers;
  LockState locks;
};

/// Passed to RunConfig::on_lockstep after every phase-one round and once
/// more when phase one ends. Runs on the thread owning the engine; wrap any
/// symbolic work in StepCounter::Pause so the run's step count is unaffected.
struct LockstepTrace {
  const ColouredGraph& graph;
  const SymSet& task;
  const SymSet& pivots;
  const LockstepFrontiers& frontiers;
  const LockState& locks;
  std::size_t round;
  bool finished;
  std::uint64_t pivot_steps;  // steps spent choosing the pivots, 0 if they were given
};

struct ProgressEvent {
  BigCount task_size;  // coloured pairs in the task
  std::size_t components;
  std::uint64_t steps;
};

struct RunConfig {
  bool saturation = true;
  unsigned threads = 1;
  bool trimming = true;
  double trim_cutoff_factor = 2.0;
  bool record_relation = false;
  std::optional<std::chrono::milliseconds> timeout;
  /// Absolute deadline; coloured_scc derives it from `timeout` when unset.
  std::optional<std::chrono::steady_clock::time_point> deadline;
  std::stop_token stop;
  std::function<void(const ProgressEvent&)> progress;
  std::function<void(const LockstepTrace&)> on_lockstep;
};

enum class RunStatus { Complete, Timeout, Failed };

struct SccRelation {
  /// One entry per decomposition task: W(., c) is an SCC of G(c) for every colour of W.
  std::vector<SymSet> components;
  /// Coloured vertices removed by trimming; each is a trivial SCC.
  SymSet trimmed;
  /// (u, c, v) over (s, c, s'), present when RunConfig::record_relation is set.
  std::optional<SymSet> relation;
  std::uint64_t steps = 0;
  RunStatus status = RunStatus::Complete;
  std::string error;
};

struct DecompositionStep {
  SymSet component;  // W
  SymSet outside;    // V \ Con
  SymSet remainder;  // Con \ W
  SymSet converged;  // Con
  LockState locks;
};

struct NextStepResult {
  SymSet reached;    // input plus at most one step per colour
  SymSet remaining;  // colours that could not advance
};

/// Thrown from inside a run when the deadline passes or a stop is requested.
class Cancelled : public std::runtime_error {
 public:
  Cancelled() : std::runtime_error("decomposition cancelled") {}
};

/// Phase one: lock-step forward/backward search from the pivots until every
/// colour of v is locked. Forward wins when both converge in the same round.
LockstepResult run_lockstep(const ColouredGraph& g, const SymSet& v, const SymSet& pivots,
                            const RunConfig& cfg);

/// (F & F_lock) | (B & B_lock).
SymSet converged_set(const LockstepFrontiers& fr, const LockState& locks);

/// Phase two: finishes the paused searches inside the converged set.
void complete_within_converged(const ColouredGraph& g, LockstepFrontiers& fr, const SymSet& converged,
                               const RunConfig& cfg);

DecompositionStep decomposition_once(const ColouredGraph& g, const SymSet& v, const RunConfig& cfg,
                                     const std::optional<SymSet>& pivots = std::nullopt);

/// One saturation round: fires transitions in variable order, each colour
/// advancing by at most one transition; images stay inside `domain`.
NextStepResult next_step(const ColouredGraph& g, const SymSet& reached, const SymSet& domain, Direction d);

/// Removes coloured vertices without predecessor or successor until a fixed
/// point, unless the diagram grows past the cutoff (then the current set is
/// returned; it still contains every non-trivial SCC).
SymSet trim(const ColouredGraph& g, const SymSet& v, const RunConfig& cfg);

/// Full decomposition of g.unit(). Dispatches to run_parallel when cfg.threads > 1.
SccRelation coloured_scc(const ColouredGraph& g, const RunConfig& cfg);
SccRelation run_parallel(const ColouredGraph& g, const RunConfig& cfg);

/// Union of join(W) over components plus the identity on trimmed vertices.
SymSet materialise_relation(const ColouredGraph& g, const std::vector<SymSet>& components, const SymSet& trimmed);

/// Colours for which W holds a non-trivial SCC (two or more vertices, or a
/// single vertex with a self-loop).
SymSet nontrivial_colours(const ColouredGraph& g, const SymSet& component);

struct ColourCell {
  SymSet colours;
  std::size_t count;
};

/// Partition of the valid colours into cells with a common number of
/// non-trivial SCCs.
std::vector<ColourCell> nontrivial_counts(const ColouredGraph& g, const std::vector<SymSet>& components);

}  // namespace cscc
