#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "htpg/analysis.hpp"
#include "htpg/config.hpp"
#include "htpg/trainer.hpp"

namespace htpg {

struct RunRecord {
  std::string family;
  std::uint64_t seed = 0;
  RunMetrics metrics;
  std::filesystem::path csv;
};

struct ExperimentResult {
  std::vector<RunRecord> runs;  // family-major, seeds in config order
  std::filesystem::path aggregate_csv;
  std::filesystem::path svg;
};

// Parallelism cap: HTPG_THREADS when set to a positive integer, otherwise
// the hardware concurrency.
unsigned worker_threads();

// Trains every family x seed, writes one CSV per run, the aggregate CSV and
// the comparison chart. A run that diverges is recorded, not fatal.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                unsigned threads = 0);

// Trains family x seed grid without touching the filesystem.
std::vector<RunRecord> train_grid(const ExperimentConfig& cfg,
                                  unsigned threads = 0);

// Per-run CSV: episode,return,avg_return_100,update_count. A diverged run
// ends with a `diverged` marker row.
std::string run_csv(const RunMetrics& m);

struct AggregateRow {
  std::string family;
  std::int64_t episode = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::int64_t runs = 0;
};

// Seed aggregation of moving_avg_100 per family and episode.
std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& runs);
std::string aggregate_csv(const std::vector<AggregateRow>& rows);
std::vector<AggregateRow> parse_aggregate_csv(const std::string& text);

// Line chart of the seed mean per family with a min/max band.
std::string render_svg(const std::vector<AggregateRow>& rows,
                       const std::string& title);

// Regenerates <dir>/<name>.svg from <dir>/aggregate.csv.
std::filesystem::path replot(const std::filesystem::path& dir,
                             const std::string& name);

// Shortest round-trip decimal form.
std::string format_double(double v);

// Trapped car started at the false goal, adaptive Cauchy vs adaptive
// Gaussian, one run per seed and family.
struct FirstExitRequest {
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::int64_t episodes = 1000;
};

ExperimentConfig first_exit_config(const FirstExitRequest& req);

struct FirstExitResult {
  FirstExitSummary summary;
  std::vector<FamilyRuns> families;
};

FirstExitResult run_first_exit(const ExperimentConfig& cfg,
                               unsigned threads = 0);

void write_file(const std::filesystem::path& path, const std::string& data);
std::string read_file(const std::filesystem::path& path);

}  // namespace htpg
