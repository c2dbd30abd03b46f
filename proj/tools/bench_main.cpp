// bench: run the outlier-ensemble benchmark, format its tables and run
// rank statistics on arbitrary performance tables.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lscp/bench.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw lscp::Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Locally selective combination of LOF detectors: benchmark driver"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the benchmark described by a config file");
  std::string config_path;
  std::string only;
  std::uint64_t seed = 0;
  std::string out_dir;
  lscp::Index trials = 0;
  bool serial = false;
  bool quiet = false;
  run->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
  run->add_option("--datasets", only, "Comma-separated subset of dataset names");
  auto* seed_opt = run->add_option("--seed", seed, "Override master_seed");
  run->add_option("--out", out_dir, "Override output_dir");
  run->add_option("--trials", trials, "Override the number of trials");
  run->add_flag("--serial", serial, "Use the serial reference kernels");
  run->add_flag("--quiet", quiet, "No progress output");

  auto* tables = app.add_subcommand("tables", "Format a report as per-metric tables");
  std::string report_path;
  std::string format = "md";
  std::string tables_out;
  tables->add_option("--report", report_path, "report.csv written by 'run'")
      ->required()
      ->check(CLI::ExistingFile);
  tables->add_option("--format", format, "md or csv")->check(CLI::IsMember({"md", "csv"}));
  tables->add_option("--out", tables_out, "Output directory (default: next to the report)");

  auto* fried = app.add_subcommand("friedman", "Friedman test and Nemenyi CD on a table");
  std::string table_path;
  double alpha = 0.05;
  fried->add_option("--table", table_path, "CSV: dataset,alg1,alg2,...")
      ->required()
      ->check(CLI::ExistingFile);
  fried->add_option("--alpha", alpha, "0.05 or 0.10");

  auto* explain = app.add_subcommand("explain", "Per-instance LSCP selection records for one split");
  std::string data_path;
  std::string variant = "AOM";
  lscp::Index pool_size = 50;
  std::vector<lscp::Index> min_pts{5, 200};
  std::uint64_t explain_seed = 0;
  explain->add_option("--data", data_path, "Dataset CSV")->required()->check(CLI::ExistingFile);
  explain->add_option("--variant", variant, "A, M, MOA or AOM");
  explain->add_option("--pool-size", pool_size, "Number of LOF detectors");
  explain->add_option("--min-pts", min_pts, "MinPts range lo hi")->expected(2);
  explain->add_option("--seed", explain_seed, "Seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      lscp::bench::BenchConfig cfg = lscp::bench::load_config(config_path);
      if (*seed_opt) cfg.master_seed = seed;
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (trials > 0) cfg.trials = trials;
      if (serial) cfg.exec = lscp::Exec::serial;
      if (!only.empty()) {
        auto names = split_commas(only);
        std::vector<lscp::bench::DatasetSpec> kept;
        for (const auto& d : cfg.datasets) {
          if (std::find(names.begin(), names.end(), d.name) != names.end()) kept.push_back(d);
        }
        if (kept.empty()) throw lscp::Error("--datasets matched no configured dataset");
        cfg.datasets = std::move(kept);
      }
      const auto start = std::chrono::steady_clock::now();
      auto report = lscp::bench::run_benchmark(cfg, quiet ? nullptr : &std::cerr);
      const auto csv = lscp::bench::write_report(report, cfg);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::cout << "report: " << csv.string() << " (" << secs << " s)\n";
      for (const auto& [name, msg] : report.errors) {
        std::cout << "dataset " << name << " failed: " << msg << "\n";
      }
      return report.errors.empty() ? 0 : 2;
    }
    if (*tables) {
      auto report = lscp::bench::read_report_csv(read_file(report_path));
      const auto fmt =
          format == "csv" ? lscp::bench::TableFormat::csv : lscp::bench::TableFormat::markdown;
      std::filesystem::path dir = tables_out.empty()
                                      ? std::filesystem::path(report_path).parent_path()
                                      : std::filesystem::path(tables_out);
      if (dir.empty()) dir = ".";
      for (const auto& p : lscp::bench::emit_tables(report, fmt, dir)) {
        std::cout << p.string() << "\n";
      }
      return 0;
    }
    if (*fried) {
      const auto perf = lscp::eval::read_perf_csv(read_file(table_path));
      std::cout << "datasets = " << perf.datasets.size()
                << ", algorithms = " << perf.algorithms.size() << "\n"
                << lscp::bench::format_rank_statistics(perf, alpha);
      return 0;
    }
    if (*explain) {
      if (min_pts.size() != 2) throw lscp::Error("--min-pts needs two values");
      lscp::Dataset ds = lscp::load_csv(data_path);
      const auto sp = lscp::split(ds, 0.6, lscp::derive_seed(explain_seed, "split"), true);
      auto train = std::make_shared<const lscp::Matrix>(ds.features.select_rows(sp.train));
      const lscp::Matrix test = ds.features.select_rows(sp.test);
      const auto pool = lscp::DetectorPool::build(train, pool_size, {min_pts[0], min_pts[1]},
                                                  lscp::derive_seed(explain_seed, "pool"));
      lscp::LscpConfig cfg;
      cfg.variant = lscp::parse_variant(variant);
      cfg.seed = lscp::derive_seed(explain_seed, "lscp");
      std::vector<lscp::Explanation> rows;
      lscp::lscp_score(*train, pool.train_score_matrix(), pool.test_score_matrix(test), test,
                       cfg, lscp::Exec::parallel, &rows);
      lscp::write_explanations(std::cout, rows);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
