#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lscp/datasets.hpp"
#include "lscp/eval.hpp"
#include "lscp/gg.hpp"
#include "lscp/lscp.hpp"

namespace lscp::bench {

// Column order of every table.
const std::vector<std::string>& algorithm_names();
const std::vector<std::string>& metric_names();  // "roc_auc", "average_precision"

struct DatasetSpec {
  std::string name;
  std::filesystem::path path;
  MinPtsRange min_pts_range{5, 200};
};

struct GgSettings {
  Index subgroups = 5;
  Index group_size = 10;
  double threshold = 0.0;
  Index fb_iterations = 50;
};

struct BenchConfig {
  std::vector<DatasetSpec> datasets;
  Index pool_size = 50;
  Index trials = 30;
  double train_frac = 0.6;
  bool stratified = true;
  bool standardize = false;
  LscpConfig lscp;  // variant and seed are set per run
  GgSettings gg;
  std::uint64_t master_seed = 0;
  std::filesystem::path output_dir = "bench_out";
  Exec exec = Exec::parallel;

  void validate() const;
  std::string to_json() const;
  std::uint64_t hash() const;
};

// JSON config; relative dataset paths resolve against `base_dir`.
BenchConfig parse_config(const std::string& json, const std::filesystem::path& base_dir = {});
BenchConfig load_config(const std::filesystem::path& path);

// Trial seed = derive_seed(derive_seed(master_seed, dataset name), trial).
std::uint64_t trial_seed(std::uint64_t master_seed, const std::string& dataset, Index trial);

struct TrialResult {
  Split split;
  std::uint64_t seed = 0;
  ScoreMatrix train_scores;
  ScoreMatrix test_scores;  // consumed unchanged by every pool-based combiner
  std::map<std::string, std::vector<double>> scores;  // per algorithm, test rows
  std::map<std::string, std::map<std::string, double>> metrics;  // algorithm -> metric
};

TrialResult run_trial(const Dataset& ds, const DatasetSpec& spec, const BenchConfig& cfg,
                      Index trial);

struct Cell {
  std::string dataset;
  std::string algorithm;
  std::string metric;
  double mean = 0.0;
  double stddev = 0.0;  // sample stddev over trials; 0 for a single trial
  Index trials = 0;
};

struct EvalReport {
  std::vector<Cell> cells;
  std::vector<std::string> datasets;    // in config order, successful only
  std::vector<std::string> algorithms;
  std::map<std::string, std::string> errors;  // dataset -> message
  std::uint64_t master_seed = 0;
  std::uint64_t config_hash = 0;

  std::optional<double> mean(const std::string& dataset, const std::string& algorithm,
                             const std::string& metric) const;
  eval::PerfMatrix perf(const std::string& metric) const;
};

EvalReport run_benchmark(const BenchConfig& cfg, std::ostream* log = nullptr);

void write_report_csv(const EvalReport& report, std::ostream& out);
EvalReport read_report_csv(const std::string& text);
std::string report_metadata_json(const EvalReport& report, const BenchConfig& cfg);

// Writes report.csv and report.json to cfg.output_dir; returns the CSV path.
std::filesystem::path write_report(const EvalReport& report, const BenchConfig& cfg);

enum class TableFormat { csv, markdown };

// One table per metric (datasets x algorithms, best per row flagged) with a
// rank-statistics footer.
std::string format_table(const EvalReport& report, const std::string& metric, TableFormat fmt);
std::vector<std::filesystem::path> emit_tables(const EvalReport& report, TableFormat fmt,
                                               const std::filesystem::path& out_dir);

// Friedman statistic, p-value, mean ranks and Nemenyi CD for a table.
std::string format_rank_statistics(const eval::PerfMatrix& perf, double alpha = 0.05);

}  // namespace lscp::bench
