#pragma once

// Model loading, run reports and benchmark rows shared by the command-line
// tool and the Python module.

#include "cscc/bn_model.hpp"
#include "cscc/coloured_graph.hpp"
#include "cscc/decomposition.hpp"
#include "cscc/oracle.hpp"
#include "cscc/symbolic_engine.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cscc {

enum class ModelFormat { BnetPsbn, Edges };

std::optional<ModelFormat> parse_format(std::string_view name);
std::string_view format_name(ModelFormat f);
/// `.edges` files are edge lists, everything else bnet-psbn.
ModelFormat guess_format(const std::filesystem::path& path);

struct LoadedModel {
  std::string name;
  ModelFormat format = ModelFormat::BnetPsbn;
  std::optional<PartialBooleanNetwork> network;
  std::optional<ExpandedNetwork> expanded;
  std::optional<EdgeList> edges;
  std::shared_ptr<const VariableUniverse> universe;
};

class FileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

LoadedModel load_model_text(std::string_view text, ModelFormat format, std::string name);
/// Throws FileError when the file cannot be read.
LoadedModel load_model_file(const std::filesystem::path& path, std::optional<ModelFormat> format = std::nullopt);

/// An engine together with the graph built in it.
struct ModelGraph {
  std::unique_ptr<Engine> engine;
  std::unique_ptr<ColouredGraph> graph;
};

ModelGraph build_graph(const LoadedModel& model);

/// Explicit counterpart of the model, for verification.
ExplicitColouredGraph explicit_graph(const LoadedModel& model, std::uint64_t limit);

/// Largest coloured state space --verify accepts.
inline constexpr std::uint64_t kVerifyLimit = std::uint64_t{1} << 16;

struct VerifyOutcome {
  Verdict verdict;
  std::size_t oracle_min = 0;
  std::size_t oracle_max = 0;
};

/// Needs result.relation; throws OracleLimitError for oversized models.
VerifyOutcome verify(const LoadedModel& model, const SccRelation& result, std::uint64_t limit = kVerifyLimit);

struct RunReport {
  std::string model;
  std::size_t variables = 0;
  std::size_t inputs = 0;
  BigCount colours = 0;
  BigCount state_space = 0;
  std::size_t nontrivial_min = 0;
  std::size_t nontrivial_max = 0;
  std::size_t components = 0;
  BigCount trivial_trimmed = 0;
  std::uint64_t symbolic_steps = 0;
  bool saturation = true;
  unsigned threads = 1;
  bool trimming = true;
  double trim_cutoff = 2.0;
  std::optional<double> timeout_seconds;
  std::string status;  // complete | timeout-partial | failed
  std::string error;
  std::string verification = "not-run";  // not-run | equal | mismatch: ...
  double wall_time_seconds = 0;
};

/// Decomposes the model under cfg and summarises the result.
struct RunOutcome {
  RunReport report;
  SccRelation result;
};
RunOutcome run_model(const LoadedModel& model, const ModelGraph& mg, const RunConfig& cfg);

RunReport summarise(const LoadedModel& model, const ColouredGraph& g, const RunConfig& cfg,
                    const SccRelation& result, double wall_seconds);

/// Keys in a fixed order; wall time is the last field.
nlohmann::ordered_json to_json(const RunReport& r);

struct BenchConfig {
  std::string name;
  RunConfig config;
};

/// plain lock-step, saturation, and parallel+saturation once per thread count (> 1).
std::vector<BenchConfig> bench_matrix(const std::vector<unsigned>& threads, std::optional<double> timeout_seconds);

struct BenchRow {
  std::string model;
  std::string config;
  std::optional<RunReport> report;
  std::string error;
};

/// Runs every model file in dir (sorted by name) under every configuration.
/// Per-model failures become rows with an error; the run continues.
std::vector<BenchRow> run_bench(const std::filesystem::path& dir, const std::vector<BenchConfig>& matrix);

nlohmann::ordered_json to_json(const BenchRow& row);

}  // namespace cscc
