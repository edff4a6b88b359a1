// cscc: coloured SCC decomposition of partially specified Boolean networks
// and edge-coloured graphs.
//
// Exit status: 0 success, 1 usage/input error, 2 verification mismatch,
// 3 timeout (partial report still written).

#include "cscc/errors.hpp"
#include "cscc/oracle.hpp"
#include "cscc/report.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kMismatch = 2;
constexpr int kTimeout = 3;

bool write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return true;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "error: cannot write '" << path << "'\n";
    return false;
  }
  return true;
}

struct RunOptions {
  std::string model;
  std::string format;
  bool saturation = true;
  unsigned threads = 1;
  bool no_trim = false;
  double trim_cutoff = 2.0;
  double timeout = 0;
  bool verify = false;
  std::string dump_relation;
  std::string out;
  bool progress = false;
};

int run_single(const RunOptions& o) {
  std::optional<cscc::ModelFormat> format;
  if (!o.format.empty()) format = cscc::parse_format(o.format);

  cscc::LoadedModel model;
  try {
    model = cscc::load_model_file(o.model, format);
  } catch (const cscc::FileError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kUsage;
  } catch (const cscc::ParseError& ex) {
    std::cerr << "parse error in '" << o.model << "': " << ex.what() << "\n";
    return kUsage;
  }

  cscc::ModelGraph mg = cscc::build_graph(model);
  if (o.verify) {
    cscc::StepCounter::Pause quiet(mg.engine->steps());
    const auto& u = mg.engine->universe();
    const cscc::BigCount pairs = mg.engine->count_assignments(mg.graph->unit(), u.state_vars() | u.input_vars());
    if (pairs > cscc::kVerifyLimit || u.state_count() >= 32 || u.input_count() >= 32) {
      std::cerr << "error: --verify refused: " << pairs << " coloured states exceed the explicit limit of "
                << cscc::kVerifyLimit << "\n";
      return kUsage;
    }
  }

  cscc::RunConfig cfg;
  cfg.saturation = o.saturation;
  cfg.threads = o.threads;
  cfg.trimming = !o.no_trim;
  cfg.trim_cutoff_factor = o.trim_cutoff;
  cfg.record_relation = o.verify || !o.dump_relation.empty();
  if (o.timeout > 0) cfg.timeout = std::chrono::milliseconds(static_cast<std::int64_t>(o.timeout * 1000.0));
  std::mutex progress_mutex;
  if (o.progress) {
    cfg.progress = [&progress_mutex](const cscc::ProgressEvent& ev) {
      std::lock_guard lock(progress_mutex);
      std::cerr << "task pairs=" << ev.task_size << " components=" << ev.components << " steps=" << ev.steps
                << "\n";
    };
  }

  cscc::RunOutcome outcome = cscc::run_model(model, mg, cfg);
  int status = kOk;
  if (outcome.result.status == cscc::RunStatus::Timeout) status = kTimeout;
  if (outcome.result.status == cscc::RunStatus::Failed) {
    std::cerr << "error: decomposition failed: " << outcome.result.error << "\n";
    status = kUsage;
  }

  if (o.verify && outcome.result.relation) {
    const cscc::VerifyOutcome v = cscc::verify(model, outcome.result);
    const bool ranges = v.oracle_min == outcome.report.nontrivial_min && v.oracle_max == outcome.report.nontrivial_max;
    if (v.verdict.equal && ranges) {
      outcome.report.verification = "equal";
    } else {
      outcome.report.verification = v.verdict.equal ? "mismatch: non-trivial SCC range differs from the oracle"
                                                     : "mismatch: " + v.verdict.describe();
      std::cerr << "verification failed: " << outcome.report.verification << "\n";
      status = kMismatch;
    }
  } else if (o.verify) {
    outcome.report.verification = "skipped: run incomplete";
  }

  if (!o.dump_relation.empty() && outcome.result.relation) {
    const auto bytes = cscc::dump(*outcome.result.relation);
    std::ofstream out(o.dump_relation, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      std::cerr << "error: cannot write '" << o.dump_relation << "'\n";
      return kUsage;
    }
  }

  if (!write_text(o.out, cscc::to_json(outcome.report).dump(2) + "\n")) return kUsage;
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coloured SCC decomposition of partially specified Boolean networks"};
  app.require_subcommand(0, 1);

  RunOptions run;
  app.add_option("model", run.model, "Model file (.bnet or .edges)");
  app.add_option("--format", run.format, "Input format")->check(CLI::IsMember({"bnet-psbn", "edges"}));
  app.add_flag("--saturation,!--no-saturation", run.saturation, "Saturation-based reachability (default on)");
  app.add_option("--threads", run.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
  app.add_flag("--no-trim", run.no_trim, "Disable trimming of trivial components");
  app.add_option("--trim-cutoff", run.trim_cutoff, "Abort trimming when the diagram grows by this factor")
      ->check(CLI::PositiveNumber);
  app.add_option("--timeout", run.timeout, "Timeout in seconds")->check(CLI::NonNegativeNumber);
  app.add_flag("--verify", run.verify, "Compare with the explicit oracle (small models only)");
  app.add_option("--dump-relation", run.dump_relation, "Write the relation diagram to PATH");
  app.add_option("--out", run.out, "Write the JSON report to PATH");
  app.add_flag("--progress", run.progress, "Print per-task progress to stderr");

  auto* bench = app.add_subcommand("bench", "Run every model in a directory under the benchmark configurations");
  std::string bench_dir;
  std::vector<unsigned> bench_threads{4};
  double bench_timeout = 0;
  std::string bench_out;
  bench->add_option("dir", bench_dir, "Corpus directory")->required();
  bench->add_option("--threads", bench_threads, "Thread counts for the parallel configuration")->delimiter(',');
  bench->add_option("--timeout", bench_timeout, "Per-run timeout in seconds")->check(CLI::NonNegativeNumber);
  bench->add_option("--out", bench_out, "Write the JSON rows to PATH");

  auto* generate = app.add_subcommand("generate", "Write seeded random partially specified networks");
  std::uint64_t seed = 0;
  std::size_t count = 1;
  std::string generate_dir;
  generate->add_option("--seed", seed, "First seed");
  generate->add_option("--count", count, "Number of networks")->check(CLI::PositiveNumber);
  generate->add_option("--dir", generate_dir, "Directory for the generated files (required for --count > 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*bench) {
      const auto rows = cscc::run_bench(
          bench_dir, cscc::bench_matrix(bench_threads, bench_timeout > 0 ? std::optional(bench_timeout) : std::nullopt));
      nlohmann::ordered_json j = nlohmann::ordered_json::array();
      for (const auto& row : rows) j.push_back(cscc::to_json(row));
      return write_text(bench_out, j.dump(2) + "\n") ? kOk : kUsage;
    }
    if (*generate) {
      if (count > 1 && generate_dir.empty()) {
        std::cerr << "usage error: --count > 1 needs --dir\n";
        return kUsage;
      }
      for (std::size_t k = 0; k < count; ++k) {
        const std::string text = cscc::format_bnet(cscc::random_network(seed + k));
        if (generate_dir.empty()) {
          std::cout << text;
          continue;
        }
        std::filesystem::create_directories(generate_dir);
        const auto path = std::filesystem::path(generate_dir) / ("random_" + std::to_string(seed + k) + ".bnet");
        if (!write_text(path.string(), text)) return kUsage;
      }
      return kOk;
    }
    if (run.model.empty()) {
      std::cerr << "usage error: a model file is required\n" << app.help();
      return kUsage;
    }
    return run_single(run);
  } catch (const cscc::FileError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kUsage;
  } catch (const cscc::OracleLimitError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kUsage;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kUsage;
  }
}
