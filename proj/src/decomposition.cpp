#include "cscc/decomposition.hpp"

#include "cscc/errors.hpp"

#include <algorithm>
#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

namespace cscc {

namespace {

using Clock = std::chrono::steady_clock;

// Worker engines are rebuilt between tasks once their arena passes this size.
constexpr std::size_t kWorkerArenaLimit = std::size_t{1} << 23;

void check_cancel(const RunConfig& cfg) {
  if (cfg.stop.stop_requested()) throw Cancelled();
  if (cfg.deadline && Clock::now() >= *cfg.deadline) throw Cancelled();
}

RunConfig with_deadline(const RunConfig& cfg) {
  if (cfg.threads == 0) throw ContractViolation("thread count must be positive");
  if (!(cfg.trim_cutoff_factor > 0)) throw ContractViolation("trim cutoff factor must be positive");
  RunConfig out = cfg;
  if (!out.deadline && out.timeout) out.deadline = Clock::now() + *out.timeout;
  return out;
}

VarSet coloured_space(const Engine& e) {
  return e.universe().state_vars() | e.universe().input_vars();
}

bool same(const SymSet& a, const SymSet& b) { return a.root() == b.root(); }

void notify(const RunConfig& cfg, const ColouredGraph& g, const SymSet& v, const SymSet& pivots,
            const LockstepFrontiers& fr, const LockState& locks, std::size_t round, bool finished,
            std::uint64_t pivot_steps) {
  if (!cfg.on_lockstep) return;
  cfg.on_lockstep(LockstepTrace{g, v, pivots, fr, locks, round, finished, pivot_steps});
}

LockstepResult lockstep_impl(const ColouredGraph& g, const SymSet& v, const SymSet& pivots, const RunConfig& cfg,
                             std::uint64_t pivot_steps) {
  Engine& e = g.engine();
  const VarSet space = coloured_space(e);
  const SymSet nothing = e.empty(space);
  const SymSet no_colours = e.empty(e.universe().input_vars());

  LockstepResult r;
  LockstepFrontiers& fr = r.frontiers;
  LockState& locks = r.locks;
  locks.f_lock = no_colours;
  locks.b_lock = no_colours;
  fr.f = pivots | nothing;
  fr.b = fr.f;
  fr.f_paused = nothing;
  fr.b_paused = nothing;

  const SymSet all = g.colours(v);
  std::size_t round = 0;

  if (cfg.saturation) {
    fr.f_open = nothing;
    fr.b_open = nothing;
    while (true) {
      const SymSet active = all - (locks.f_lock | locks.b_lock);
      if (active.is_empty()) break;
      check_cancel(cfg);
      NextStepResult fs = next_step(g, fr.f & active, v, Direction::Forward);
      NextStepResult bs = next_step(g, fr.b & active, v, Direction::Backward);
      locks.f_lock = locks.f_lock | (fs.remaining - locks.b_lock);
      locks.b_lock = locks.b_lock | (bs.remaining - locks.f_lock);
      fr.f = fr.f | fs.reached;
      fr.b = fr.b | bs.reached;
      ++round;
      notify(cfg, g, v, pivots, fr, locks, round, false, pivot_steps);
    }
    fr.f_paused = fr.f & locks.b_lock;
    fr.b_paused = fr.b & locks.f_lock;
  } else {
    fr.f_open = fr.f;
    fr.b_open = fr.b;
    while (true) {
      const SymSet active = all - (locks.f_lock | locks.b_lock);
      if (active.is_empty()) break;
      check_cancel(cfg);
      fr.f_open = (g.post(fr.f_open) & v) - fr.f;
      fr.b_open = (g.pre(fr.b_open) & v) - fr.b;
      locks.f_lock = locks.f_lock | (active - g.colours(fr.f_open));
      locks.b_lock = locks.b_lock | ((active - g.colours(fr.b_open)) - locks.f_lock);
      fr.f_paused = fr.f_paused | (fr.f_open & locks.b_lock);
      fr.b_paused = fr.b_paused | (fr.b_open & locks.f_lock);
      const SymSet locked = locks.f_lock | locks.b_lock;
      fr.f_open = fr.f_open - locked;
      fr.b_open = fr.b_open - locked;
      fr.f = fr.f | fr.f_open;
      fr.b = fr.b | fr.b_open;
      ++round;
      notify(cfg, g, v, pivots, fr, locks, round, false, pivot_steps);
    }
  }
  notify(cfg, g, v, pivots, fr, locks, round, true, pivot_steps);
  return r;
}

struct TaskOutput {
  std::optional<SymSet> component;
  SymSet trimmed;
  std::vector<SymSet> children;
};

TaskOutput run_task(const ColouredGraph& g, const SymSet& v, const RunConfig& cfg) {
  TaskOutput out;
  SymSet work = v;
  if (cfg.trimming) {
    work = trim(g, v, cfg);
    out.trimmed = v - work;
  }
  if (work.is_empty()) return out;
  DecompositionStep step = decomposition_once(g, work, cfg);
  out.component = std::move(step.component);
  if (!step.outside.is_empty()) out.children.push_back(std::move(step.outside));
  if (!step.remainder.is_empty()) out.children.push_back(std::move(step.remainder));
  return out;
}

void report_progress(const RunConfig& cfg, const ColouredGraph& g, const SymSet& v, std::size_t components,
                     std::uint64_t steps) {
  if (!cfg.progress) return;
  Engine& e = g.engine();
  StepCounter::Pause quiet(e.steps());
  cfg.progress(ProgressEvent{e.count_assignments(v, coloured_space(e)), components, steps});
}

}  // namespace

// ---------------------------------------------------------------------------
// Lock-step

LockstepResult run_lockstep(const ColouredGraph& g, const SymSet& v, const SymSet& pivots, const RunConfig& cfg) {
  return lockstep_impl(g, v, pivots, cfg, 0);
}

SymSet converged_set(const LockstepFrontiers& fr, const LockState& locks) {
  return (fr.f & locks.f_lock) | (fr.b & locks.b_lock);
}

void complete_within_converged(const ColouredGraph& g, LockstepFrontiers& fr, const SymSet& converged,
                               const RunConfig& cfg) {
  // Paused frontiers are not part of F/B yet; they are added back here so the
  // remaining search starts from every pair found during phase one.
  if (cfg.saturation) {
    for (Direction d : {Direction::Forward, Direction::Backward}) {
      const bool fwd = d == Direction::Forward;
      SymSet reached = (fwd ? fr.f_paused : fr.b_paused) & converged;
      while (true) {
        check_cancel(cfg);
        NextStepResult ns = next_step(g, reached, converged, d);
        if (same(ns.reached, reached)) break;
        reached = std::move(ns.reached);
      }
      SymSet& target = fwd ? fr.f : fr.b;
      target = target | reached;
    }
    return;
  }
  fr.f_open = fr.f_paused & converged;
  fr.b_open = fr.b_paused & converged;
  fr.f = fr.f | fr.f_open;
  fr.b = fr.b | fr.b_open;
  while (!fr.f_open.is_empty() || !fr.b_open.is_empty()) {
    check_cancel(cfg);
    if (!fr.f_open.is_empty()) {
      fr.f_open = (g.post(fr.f_open) & converged) - fr.f;
      fr.f = fr.f | fr.f_open;
    }
    if (!fr.b_open.is_empty()) {
      fr.b_open = (g.pre(fr.b_open) & converged) - fr.b;
      fr.b = fr.b | fr.b_open;
    }
  }
}

DecompositionStep decomposition_once(const ColouredGraph& g, const SymSet& v, const RunConfig& cfg,
                                     const std::optional<SymSet>& pivots) {
  Engine& e = g.engine();
  const std::uint64_t before = e.steps().count();
  const SymSet p = pivots ? *pivots : g.pivots(v);
  const std::uint64_t pivot_steps = pivots ? 0 : e.steps().count() - before;

  LockstepResult lr = lockstep_impl(g, v, p, cfg, pivot_steps);
  DecompositionStep out;
  out.converged = converged_set(lr.frontiers, lr.locks);
  complete_within_converged(g, lr.frontiers, out.converged, cfg);
  out.component = lr.frontiers.f & lr.frontiers.b;
  out.outside = v - out.converged;
  out.remainder = out.converged - out.component;
  out.locks = std::move(lr.locks);
  return out;
}

NextStepResult next_step(const ColouredGraph& g, const SymSet& reached, const SymSet& domain, Direction d) {
  NextStepResult out{reached, g.colours(reached)};
  for (std::size_t k = 0; k < g.transition_count() && !out.remaining.is_empty(); ++k) {
    const SymSet fresh = (g.transition_image(k, out.reached & out.remaining, d) & domain) - out.reached;
    out.remaining = out.remaining - g.colours(fresh);
    out.reached = out.reached | fresh;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trimming

SymSet trim(const ColouredGraph& g, const SymSet& v, const RunConfig& cfg) {
  Engine& e = g.engine();
  const VariableUniverse& u = e.universe();
  // A set over all coloured variables is never smaller than a cube over
  // them; the floor keeps the limit meaningful for constant inputs.
  const double floor = static_cast<double>(u.state_count() + u.input_count());
  const double limit = cfg.trim_cutoff_factor * std::max(static_cast<double>(e.node_count(v)), floor);
  SymSet current = v;
  while (true) {
    check_cancel(cfg);
    const SymSet before = current;
    for (TrimDirection d : {TrimDirection::NoPredecessor, TrimDirection::NoSuccessor}) {
      current = g.trim_step(current, d);
      if (static_cast<double>(e.node_count(current)) > limit) return current;
    }
    if (same(current, before)) return current;
  }
}

// ---------------------------------------------------------------------------
// Task queue

SccRelation coloured_scc(const ColouredGraph& g, const RunConfig& cfg_in) {
  const RunConfig cfg = with_deadline(cfg_in);
  if (cfg.threads > 1) return run_parallel(g, cfg);

  Engine& e = g.engine();
  const std::uint64_t start = e.steps().count();
  SccRelation out;
  out.trimmed = e.empty(coloured_space(e));
  std::deque<SymSet> queue;
  if (!g.unit().is_empty()) queue.push_back(g.unit());
  try {
    while (!queue.empty()) {
      check_cancel(cfg);
      SymSet v = std::move(queue.front());
      queue.pop_front();
      report_progress(cfg, g, v, out.components.size(), e.steps().count() - start);
      TaskOutput t = run_task(g, v, cfg);
      if (t.trimmed.valid() && !t.trimmed.is_empty()) out.trimmed = out.trimmed | t.trimmed;
      if (t.component) out.components.push_back(std::move(*t.component));
      for (SymSet& child : t.children) queue.push_back(std::move(child));
    }
  } catch (const Cancelled&) {
    out.status = RunStatus::Timeout;
  } catch (const std::exception& ex) {
    out.status = RunStatus::Failed;
    out.error = ex.what();
  }
  if (out.status == RunStatus::Complete && cfg.record_relation) {
    out.relation = materialise_relation(g, out.components, out.trimmed);
  }
  out.steps = e.steps().count() - start;
  return out;
}

SccRelation run_parallel(const ColouredGraph& g, const RunConfig& cfg_in) {
  const RunConfig cfg = with_deadline(cfg_in);
  Engine& main = g.engine();
  const PortableGraph portable = g.export_graph();

  struct Shared {
    std::mutex mutex;
    std::condition_variable_any wake;
    std::deque<PortableSet> queue;
    std::size_t in_flight = 0;
    std::vector<PortableSet> components;
    std::vector<PortableSet> trimmed;
    std::uint64_t steps = 0;
    RunStatus status = RunStatus::Complete;
    std::string error;
  } shared;

  if (!g.unit().is_empty()) shared.queue.push_back(main.export_set(g.unit()));

  std::stop_source halt;
  std::stop_callback forward_stop(cfg.stop, [&halt] { halt.request_stop(); });
  const std::stop_token token = halt.get_token();

  auto worker = [&] {
    std::unique_ptr<Engine> engine;
    std::optional<ColouredGraph> local;
    std::uint64_t spent = 0;
    std::uint64_t mark = 0;
    RunConfig wcfg = cfg;
    wcfg.stop = token;
    wcfg.threads = 1;
    auto rebuild = [&] {
      if (engine) spent += engine->steps().count() - mark;
      local.reset();
      engine = std::make_unique<Engine>(main.universe_ptr());
      local.emplace(ColouredGraph::import_graph(*engine, portable));
      mark = engine->steps().count();
    };
    try {
      rebuild();
      while (true) {
        PortableSet task;
        {
          std::unique_lock lock(shared.mutex);
          shared.wake.wait(lock, token, [&] { return !shared.queue.empty() || shared.in_flight == 0; });
          if (token.stop_requested() || shared.queue.empty()) break;
          task = std::move(shared.queue.front());
          shared.queue.pop_front();
          ++shared.in_flight;
        }
        if (engine->arena_size() > kWorkerArenaLimit) rebuild();
        const SymSet v = engine->import_set(task);
        if (wcfg.progress) {
          std::size_t done;
          std::uint64_t steps;
          {
            std::lock_guard lock(shared.mutex);
            done = shared.components.size();
            steps = shared.steps + engine->steps().count() - mark + spent;
          }
          report_progress(wcfg, *local, v, done, steps);
        }
        TaskOutput t = run_task(*local, v, wcfg);
        std::optional<PortableSet> component;
        if (t.component) component = engine->export_set(*t.component);
        std::optional<PortableSet> trimmed;
        if (t.trimmed.valid() && !t.trimmed.is_empty()) trimmed = engine->export_set(t.trimmed);
        std::vector<PortableSet> children;
        for (const SymSet& child : t.children) children.push_back(engine->export_set(child));
        {
          std::lock_guard lock(shared.mutex);
          if (component) shared.components.push_back(std::move(*component));
          if (trimmed) shared.trimmed.push_back(std::move(*trimmed));
          for (PortableSet& child : children) shared.queue.push_back(std::move(child));
          --shared.in_flight;
        }
        shared.wake.notify_all();
      }
    } catch (const Cancelled&) {
      std::lock_guard lock(shared.mutex);
      if (shared.status == RunStatus::Complete) shared.status = RunStatus::Timeout;
      halt.request_stop();
    } catch (const std::exception& ex) {
      std::lock_guard lock(shared.mutex);
      shared.status = RunStatus::Failed;
      if (shared.error.empty()) shared.error = ex.what();
      halt.request_stop();
    }
    if (engine) spent += engine->steps().count() - mark;
    std::lock_guard lock(shared.mutex);
    shared.steps += spent;
  };

  {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < cfg.threads; ++i) pool.emplace_back(worker);
  }

  // A deadline may pass while the last task is finishing; the queue tells.
  if (shared.status == RunStatus::Complete && (!shared.queue.empty() || shared.in_flight != 0)) {
    shared.status = RunStatus::Timeout;
  }

  SccRelation out;
  out.status = shared.status;
  out.error = shared.error;
  {
    StepCounter::Pause quiet(main.steps());
    out.trimmed = main.empty(coloured_space(main));
    for (const PortableSet& p : shared.components) out.components.push_back(main.import_set(p));
    for (const PortableSet& p : shared.trimmed) out.trimmed = out.trimmed | main.import_set(p);
  }
  out.steps = shared.steps;
  if (out.status == RunStatus::Complete && cfg.record_relation) {
    const std::uint64_t before = main.steps().count();
    out.relation = materialise_relation(g, out.components, out.trimmed);
    out.steps += main.steps().count() - before;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Results

SymSet materialise_relation(const ColouredGraph& g, const std::vector<SymSet>& components, const SymSet& trimmed) {
  Engine& e = g.engine();
  SymSet relation = e.empty(e.universe().all_vars());
  for (const SymSet& w : components) relation = relation | g.join(w);
  if (trimmed.valid() && !trimmed.is_empty()) relation = relation | g.diagonal(trimmed);
  return relation;
}

SymSet nontrivial_colours(const ColouredGraph& g, const SymSet& component) {
  const SymSet p = g.pivots(component);
  const SymSet several = g.colours(component - p);
  const SymSet looped = g.colours(p & g.post(p));
  return several | looped;
}

std::vector<ColourCell> nontrivial_counts(const ColouredGraph& g, const std::vector<SymSet>& components) {
  Engine& e = g.engine();
  StepCounter::Pause quiet(e.steps());
  std::map<std::size_t, SymSet> cells;
  if (!g.valid().is_empty()) cells.emplace(0, g.valid());
  for (const SymSet& w : components) {
    const SymSet nt = nontrivial_colours(g, w);
    if (nt.is_empty()) continue;
    std::map<std::size_t, SymSet> next;
    auto add = [&](std::size_t count, const SymSet& colours) {
      if (colours.is_empty()) return;
      auto [it, inserted] = next.emplace(count, colours);
      if (!inserted) it->second = it->second | colours;
    };
    for (const auto& [count, colours] : cells) {
      add(count + 1, colours & nt);
      add(count, colours - nt);
    }
    cells = std::move(next);
  }
  std::vector<ColourCell> out;
  for (auto& [count, colours] : cells) out.push_back(ColourCell{std::move(colours), count});
  return out;
}

}  // namespace cscc
