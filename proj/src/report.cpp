#include "cscc/report.hpp"

#include "cscc/errors.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <limits>
#include <sstream>

namespace cscc {

namespace {

nlohmann::ordered_json count_json(const BigCount& value) {
  if (value <= std::numeric_limits<std::uint64_t>::max()) return static_cast<std::uint64_t>(value);
  return value.str();
}

std::string status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Complete: return "complete";
    case RunStatus::Timeout: return "timeout-partial";
    case RunStatus::Failed: return "failed";
  }
  return "failed";
}

}  // namespace

std::optional<ModelFormat> parse_format(std::string_view name) {
  if (name == "bnet-psbn" || name == "bnet") return ModelFormat::BnetPsbn;
  if (name == "edges") return ModelFormat::Edges;
  return std::nullopt;
}

std::string_view format_name(ModelFormat f) { return f == ModelFormat::Edges ? "edges" : "bnet-psbn"; }

ModelFormat guess_format(const std::filesystem::path& path) {
  return path.extension() == ".edges" ? ModelFormat::Edges : ModelFormat::BnetPsbn;
}

LoadedModel load_model_text(std::string_view text, ModelFormat format, std::string name) {
  LoadedModel m;
  m.name = std::move(name);
  m.format = format;
  if (format == ModelFormat::Edges) {
    m.edges = parse_edge_list(text);
    m.universe = make_universe(*m.edges);
  } else {
    m.network = parse_bnet(text);
    m.expanded = expand(*m.network);
    m.universe = make_universe(*m.expanded);
  }
  return m;
}

LoadedModel load_model_file(const std::filesystem::path& path, std::optional<ModelFormat> format) {
  std::ifstream in(path, std::ios::binary);
  if (!in || std::filesystem::is_directory(path)) throw FileError("cannot read model file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return load_model_text(text.str(), format.value_or(guess_format(path)), path.stem().string());
}

ModelGraph build_graph(const LoadedModel& model) {
  ModelGraph mg;
  mg.engine = std::make_unique<Engine>(model.universe);
  if (model.edges) {
    mg.graph = std::make_unique<ColouredGraph>(ColouredGraph::from_edges(*mg.engine, *model.edges));
  } else {
    mg.graph = std::make_unique<ColouredGraph>(ColouredGraph::from_network(*mg.engine, *model.expanded));
  }
  return mg;
}

ExplicitColouredGraph explicit_graph(const LoadedModel& model, std::uint64_t limit) {
  if (model.edges) {
    const std::uint64_t pairs = std::uint64_t{model.edges->vertices.size()} * model.edges->colours.size();
    if (pairs > limit) throw OracleLimitError("explicit enumeration refused: too many coloured pairs");
    return explicit_from_edges(*model.edges);
  }
  return enumerate_graph(*model.expanded, limit);
}

VerifyOutcome verify(const LoadedModel& model, const SccRelation& result, std::uint64_t limit) {
  if (!result.relation) throw ContractViolation("verification needs the materialised relation");
  const ExplicitColouredGraph g = explicit_graph(model, limit);
  const ExplicitRelation r = tarjan_per_colour(g);
  VerifyOutcome out;
  out.verdict = compare(*result.relation, g, r);
  const auto counts = nontrivial_per_colour(g, r);
  if (!counts.empty()) {
    out.oracle_min = *std::min_element(counts.begin(), counts.end());
    out.oracle_max = *std::max_element(counts.begin(), counts.end());
  }
  return out;
}

RunReport summarise(const LoadedModel& model, const ColouredGraph& g, const RunConfig& cfg,
                    const SccRelation& result, double wall_seconds) {
  Engine& e = g.engine();
  StepCounter::Pause quiet(e.steps());
  const VariableUniverse& u = e.universe();
  RunReport r;
  r.model = model.name;
  r.variables = u.state_count();
  r.inputs = u.input_count();
  r.colours = e.count_assignments(g.valid(), u.input_vars());
  r.state_space = e.count_assignments(g.unit(), u.state_vars() | u.input_vars());
  const auto cells = nontrivial_counts(g, result.components);
  if (!cells.empty()) {
    r.nontrivial_min = cells.front().count;
    r.nontrivial_max = cells.front().count;
    for (const ColourCell& c : cells) {
      r.nontrivial_min = std::min(r.nontrivial_min, c.count);
      r.nontrivial_max = std::max(r.nontrivial_max, c.count);
    }
  }
  r.components = result.components.size();
  if (result.trimmed.valid()) r.trivial_trimmed = e.count_assignments(result.trimmed, u.state_vars() | u.input_vars());
  r.symbolic_steps = result.steps;
  r.saturation = cfg.saturation;
  r.threads = cfg.threads;
  r.trimming = cfg.trimming;
  r.trim_cutoff = cfg.trim_cutoff_factor;
  if (cfg.timeout) r.timeout_seconds = std::chrono::duration<double>(*cfg.timeout).count();
  r.status = status_name(result.status);
  r.error = result.error;
  r.wall_time_seconds = wall_seconds;
  return r;
}

RunOutcome run_model(const LoadedModel& model, const ModelGraph& mg, const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  SccRelation result = coloured_scc(*mg.graph, cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  RunReport report = summarise(model, *mg.graph, cfg, result, wall);
  return RunOutcome{std::move(report), std::move(result)};
}

nlohmann::ordered_json to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["model"] = r.model;
  j["variables"] = r.variables;
  j["inputs"] = r.inputs;
  j["colours"] = count_json(r.colours);
  j["state_space"] = count_json(r.state_space);
  j["nontrivial_scc"] = {{"min", r.nontrivial_min}, {"max", r.nontrivial_max}};
  j["components"] = r.components;
  j["trivial_trimmed"] = count_json(r.trivial_trimmed);
  j["symbolic_steps"] = r.symbolic_steps;
  nlohmann::ordered_json config;
  config["saturation"] = r.saturation;
  config["threads"] = r.threads;
  config["trimming"] = r.trimming;
  config["trim_cutoff"] = r.trim_cutoff;
  config["timeout_seconds"] = r.timeout_seconds ? nlohmann::ordered_json(*r.timeout_seconds) : nullptr;
  j["config"] = std::move(config);
  j["status"] = r.status;
  if (!r.error.empty()) j["error"] = r.error;
  j["verification"] = r.verification;
  j["wall_time_seconds"] = r.wall_time_seconds;
  return j;
}

std::vector<BenchConfig> bench_matrix(const std::vector<unsigned>& threads, std::optional<double> timeout_seconds) {
  RunConfig base;
  if (timeout_seconds) {
    base.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(*timeout_seconds * 1000.0));
  }
  std::vector<BenchConfig> out;
  RunConfig plain = base;
  plain.saturation = false;
  out.push_back({"lockstep", plain});
  out.push_back({"saturation", base});
  for (unsigned t : threads) {
    if (t <= 1) continue;
    RunConfig par = base;
    par.threads = t;
    out.push_back({"parallel-saturation-" + std::to_string(t), par});
  }
  return out;
}

std::vector<BenchRow> run_bench(const std::filesystem::path& dir, const std::vector<BenchConfig>& matrix) {
  if (!std::filesystem::is_directory(dir)) throw FileError("cannot read corpus directory '" + dir.string() + "'");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().filename().string().front() != '.') files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<BenchRow> rows;
  for (const auto& path : files) {
    std::optional<LoadedModel> model;
    std::string load_error;
    try {
      model = load_model_file(path);
    } catch (const std::exception& ex) {
      load_error = ex.what();
    }
    for (const BenchConfig& bc : matrix) {
      BenchRow row{path.stem().string(), bc.name, std::nullopt, load_error};
      if (model) {
        try {
          ModelGraph mg = build_graph(*model);
          row.report = run_model(*model, mg, bc.config).report;
        } catch (const std::exception& ex) {
          row.error = ex.what();
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

nlohmann::ordered_json to_json(const BenchRow& row) {
  nlohmann::ordered_json j;
  j["model"] = row.model;
  j["config"] = row.config;
  if (!row.report) {
    j["status"] = "error";
    j["error"] = row.error;
    return j;
  }
  const std::string& s = row.report->status;
  j["status"] = s == "complete" ? "complete" : (s == "timeout-partial" ? "DNF" : "error");
  j["report"] = to_json(*row.report);
  return j;
}

}  // namespace cscc
