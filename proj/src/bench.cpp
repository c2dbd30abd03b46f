#include "lscp/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace lscp::bench {

using nlohmann::json;

const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> names = {
      "LSCP_A", "LSCP_MOA", "LSCP_M", "LSCP_AOM", "GG_A",  "GG_MOA",
      "GG_M",   "GG_AOM",   "GG_WA",  "GG_TH",    "GG_FB"};
  return names;
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {"roc_auc", "average_precision"};
  return names;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error("cannot parse " + what + " '" + s + "'");
  }
  return v;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  return out;
}

}  // namespace

void BenchConfig::validate() const {
  if (trials < 1) throw Error("config: trials must be at least 1");
  if (pool_size < 1) throw Error("config: pool_size must be at least 1");
  if (!(train_frac > 0.0 && train_frac < 1.0)) throw Error("config: train_frac must be in (0, 1)");
  if (gg.subgroups * gg.group_size > pool_size) {
    throw Error("config: subgroups x group_size (" +
                std::to_string(gg.subgroups * gg.group_size) + ") exceeds pool_size (" +
                std::to_string(pool_size) + ")");
  }
  if (gg.subgroups < 1 || gg.group_size < 1) throw Error("config: subgroup sizes must be positive");
  if (gg.fb_iterations < 1) throw Error("config: fb_iterations must be at least 1");
  lscp.validate();
  for (const auto& d : datasets) {
    if (d.name.empty()) throw Error("config: dataset without a name");
    if (d.min_pts_range.lo < 2 || d.min_pts_range.hi < d.min_pts_range.lo) {
      throw Error("config: dataset " + d.name + " has an invalid min_pts_range");
    }
  }
}

std::string BenchConfig::to_json() const {
  json j;
  j["pool_size"] = pool_size;
  j["trials"] = trials;
  j["train_frac"] = train_frac;
  j["stratified"] = stratified;
  j["standardize"] = standardize;
  j["lscp"] = {{"k", lscp.k}, {"t", lscp.t}, {"b", lscp.b}};
  j["gg"] = {{"subgroups", gg.subgroups},
             {"group_size", gg.group_size},
             {"threshold", gg.threshold},
             {"fb_iterations", gg.fb_iterations}};
  j["master_seed"] = master_seed;
  auto& ds = j["datasets"] = json::array();
  for (const auto& d : datasets) {
    ds.push_back({{"name", d.name},
                  {"path", d.path.generic_string()},
                  {"min_pts_range", {d.min_pts_range.lo, d.min_pts_range.hi}}});
  }
  return j.dump(2);
}

std::uint64_t BenchConfig::hash() const { return fnv1a(to_json()); }

BenchConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  BenchConfig cfg;
  try {
    const json j = json::parse(text);
    cfg.pool_size = j.value("pool_size", cfg.pool_size);
    cfg.trials = j.value("trials", cfg.trials);
    cfg.train_frac = j.value("train_frac", cfg.train_frac);
    cfg.stratified = j.value("stratified", cfg.stratified);
    cfg.standardize = j.value("standardize", cfg.standardize);
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    if (j.contains("output_dir")) {
      std::filesystem::path out = j.at("output_dir").get<std::string>();
      cfg.output_dir = out.is_relative() && !base_dir.empty() ? base_dir / out : out;
    }
    if (j.contains("lscp")) {
      const auto& l = j.at("lscp");
      cfg.lscp.k = l.value("k", cfg.lscp.k);
      cfg.lscp.t = l.value("t", cfg.lscp.t);
      cfg.lscp.b = l.value("b", cfg.lscp.b);
    }
    if (j.contains("gg")) {
      const auto& g = j.at("gg");
      cfg.gg.subgroups = g.value("subgroups", cfg.gg.subgroups);
      cfg.gg.group_size = g.value("group_size", cfg.gg.group_size);
      cfg.gg.threshold = g.value("threshold", cfg.gg.threshold);
      cfg.gg.fb_iterations = g.value("fb_iterations", cfg.gg.fb_iterations);
    }
    for (const auto& d : j.at("datasets")) {
      DatasetSpec spec;
      spec.name = d.at("name").get<std::string>();
      std::filesystem::path p = d.at("path").get<std::string>();
      spec.path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
      if (d.contains("min_pts_range")) {
        auto r = d.at("min_pts_range").get<std::vector<Index>>();
        if (r.size() != 2) throw Error("config: min_pts_range needs two values");
        spec.min_pts_range = {r[0], r[1]};
      }
      cfg.datasets.push_back(std::move(spec));
    }
  } catch (const json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

BenchConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

std::uint64_t trial_seed(std::uint64_t master_seed, const std::string& dataset, Index trial) {
  return derive_seed(derive_seed(master_seed, dataset), trial);
}

TrialResult run_trial(const Dataset& ds, const DatasetSpec& spec, const BenchConfig& cfg,
                      Index trial) {
  TrialResult res;
  res.seed = trial_seed(cfg.master_seed, spec.name, trial);
  res.split = split(ds, cfg.train_frac, derive_seed(res.seed, "split"), cfg.stratified);

  Matrix features = ds.features;
  if (cfg.standardize) standardize_features(features, res.split.train);
  auto train = std::make_shared<const Matrix>(features.select_rows(res.split.train));
  const Matrix test = features.select_rows(res.split.test);
  std::vector<int> test_labels;
  for (Index i : res.split.test) test_labels.push_back(ds.labels[i]);

  const DetectorPool pool = DetectorPool::build(train, cfg.pool_size, spec.min_pts_range,
                                                derive_seed(res.seed, "pool"), cfg.exec);
  res.train_scores = pool.train_score_matrix();
  res.test_scores = pool.test_score_matrix(test, cfg.exec);
  const Matrix& test_scores = res.test_scores.values;

  LscpConfig lcfg = cfg.lscp;
  lcfg.seed = derive_seed(res.seed, "lscp");
  const std::vector<LocalRegion> regions = local_regions(*train, test, lcfg, cfg.exec);
  for (Variant v : {Variant::A, Variant::MOA, Variant::M, Variant::AOM}) {
    lcfg.variant = v;
    res.scores[to_string(v)] =
        lscp_score(res.train_scores, res.test_scores, regions, lcfg, cfg.exec);
  }

  const gg::SubgroupPlan plan = gg::make_plan(cfg.pool_size, cfg.gg.subgroups,
                                              cfg.gg.group_size, derive_seed(res.seed, "plan"));
  res.scores["GG_A"] = gg::average(test_scores);
  res.scores["GG_MOA"] = gg::maximum_of_average(test_scores, plan);
  res.scores["GG_M"] = gg::maximum(test_scores);
  res.scores["GG_AOM"] = gg::average_of_maximum(test_scores, plan);
  res.scores["GG_WA"] = gg::weighted_average(res.train_scores.values, test_scores);
  res.scores["GG_TH"] = gg::threshold_sum(test_scores, cfg.gg.threshold);
  res.scores["GG_FB"] = gg::feature_bagging(*train, test, cfg.gg.fb_iterations,
                                            spec.min_pts_range,
                                            derive_seed(res.seed, "feature_bagging"), cfg.exec);

  for (const auto& [alg, s] : res.scores) {
    res.metrics[alg]["roc_auc"] = eval::roc_auc(s, test_labels);
    res.metrics[alg]["average_precision"] = eval::average_precision(s, test_labels);
  }
  return res;
}

std::optional<double> EvalReport::mean(const std::string& dataset, const std::string& algorithm,
                                       const std::string& metric) const {
  for (const Cell& c : cells) {
    if (c.dataset == dataset && c.algorithm == algorithm && c.metric == metric) return c.mean;
  }
  return std::nullopt;
}

eval::PerfMatrix EvalReport::perf(const std::string& metric) const {
  eval::PerfMatrix p;
  p.datasets = datasets;
  p.algorithms = algorithms;
  p.values = Matrix(datasets.size(), algorithms.size());
  for (Index i = 0; i < datasets.size(); ++i) {
    for (Index j = 0; j < algorithms.size(); ++j) {
      auto m = mean(datasets[i], algorithms[j], metric);
      if (!m) {
        throw Error("report has no " + metric + " cell for " + datasets[i] + "/" +
                    algorithms[j]);
      }
      p.values(i, j) = *m;
    }
  }
  return p;
}

EvalReport run_benchmark(const BenchConfig& cfg, std::ostream* log) {
  cfg.validate();
  EvalReport report;
  report.algorithms = algorithm_names();
  report.master_seed = cfg.master_seed;
  report.config_hash = cfg.hash();

  for (const DatasetSpec& spec : cfg.datasets) {
    try {
      Dataset ds = load_csv(spec.path);
      ds.name = spec.name;
      ds.validate(true);
      if (log) {
        *log << spec.name << ": n=" << ds.size() << " d=" << ds.dims()
             << " outliers=" << ds.outlier_count() << "\n";
      }
      std::map<std::string, std::map<std::string, std::vector<double>>> values;
      for (Index t = 0; t < cfg.trials; ++t) {
        TrialResult tr = run_trial(ds, spec, cfg, t);
        for (const auto& [alg, ms] : tr.metrics) {
          for (const auto& [metric, v] : ms) values[alg][metric].push_back(v);
        }
        if (log) {
          *log << "  trial " << t + 1 << "/" << cfg.trials << "  LSCP_AOM roc="
               << std::setprecision(4) << tr.metrics["LSCP_AOM"]["roc_auc"]
               << "  GG_A roc=" << tr.metrics["GG_A"]["roc_auc"] << "\n";
        }
      }
      for (const std::string& alg : report.algorithms) {
        for (const std::string& metric : metric_names()) {
          const std::vector<double>& v = values.at(alg).at(metric);
          Cell c{spec.name, alg, metric, 0.0, 0.0, v.size()};
          for (double x : v) c.mean += x;
          c.mean /= static_cast<double>(v.size());
          if (v.size() > 1) {
            double ss = 0.0;
            for (double x : v) ss += (x - c.mean) * (x - c.mean);
            c.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
          }
          report.cells.push_back(c);
        }
      }
      report.datasets.push_back(spec.name);
    } catch (const std::exception& e) {
      report.errors[spec.name] = e.what();
      if (log) *log << spec.name << ": FAILED: " << e.what() << "\n";
    }
  }
  return report;
}

void write_report_csv(const EvalReport& report, std::ostream& out) {
  out << "dataset,algorithm,metric,mean,stddev,trials\n";
  for (const Cell& c : report.cells) {
    out << c.dataset << "," << c.algorithm << "," << c.metric << "," << format_double(c.mean)
        << "," << format_double(c.stddev) << "," << c.trials << "\n";
  }
}

EvalReport read_report_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  EvalReport report;
  bool header = true;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto f = split_line(line);
    if (header) {
      if (f.size() != 6 || f[0] != "dataset") throw Error("report CSV: unexpected header");
      header = false;
      continue;
    }
    if (f.size() != 6) throw Error("report CSV line " + std::to_string(line_no) + ": expected 6 fields");
    Cell c{f[0], f[1], f[2], parse_double(f[3], "mean"), parse_double(f[4], "stddev"),
           static_cast<Index>(parse_double(f[5], "trial count"))};
    if (std::find(report.datasets.begin(), report.datasets.end(), c.dataset) ==
        report.datasets.end()) {
      report.datasets.push_back(c.dataset);
    }
    if (std::find(report.algorithms.begin(), report.algorithms.end(), c.algorithm) ==
        report.algorithms.end()) {
      report.algorithms.push_back(c.algorithm);
    }
    report.cells.push_back(std::move(c));
  }
  if (header) throw Error("report CSV: empty file");
  return report;
}

std::string report_metadata_json(const EvalReport& report, const BenchConfig& cfg) {
  json j;
  j["master_seed"] = report.master_seed;
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(report.config_hash));
  j["config_hash"] = hash;
  j["config"] = json::parse(cfg.to_json());
  j["datasets"] = report.datasets;
  j["algorithms"] = report.algorithms;
  j["errors"] = report.errors;
  auto& seeds = j["trial_seeds"] = json::object();
  for (const auto& spec : cfg.datasets) {
    auto& arr = seeds[spec.name] = json::array();
    for (Index t = 0; t < cfg.trials; ++t) arr.push_back(trial_seed(cfg.master_seed, spec.name, t));
  }
  auto& stats = j["friedman"] = json::object();
  if (report.datasets.size() >= 2) {
    for (const std::string& metric : metric_names()) {
      const eval::FriedmanResult fr = eval::friedman(report.perf(metric));
      stats[metric] = {{"chi2", fr.chi2},
                       {"p", fr.p},
                       {"dof", fr.dof},
                       {"mean_ranks", fr.mean_ranks},
                       {"nemenyi_cd_0.05",
                        eval::nemenyi_cd(report.algorithms.size(), report.datasets.size())}};
    }
  }
  return j.dump(2);
}

std::filesystem::path write_report(const EvalReport& report, const BenchConfig& cfg) {
  std::filesystem::create_directories(cfg.output_dir);
  const auto csv = cfg.output_dir / "report.csv";
  {
    std::ofstream out(csv, std::ios::binary);
    if (!out) throw Error("cannot write " + csv.string());
    write_report_csv(report, out);
  }
  std::ofstream meta(cfg.output_dir / "report.json", std::ios::binary);
  if (!meta) throw Error("cannot write report metadata in " + cfg.output_dir.string());
  meta << report_metadata_json(report, cfg) << "\n";
  return csv;
}

std::string format_rank_statistics(const eval::PerfMatrix& perf, double alpha) {
  std::ostringstream out;
  const eval::FriedmanResult fr = eval::friedman(perf);
  char buf[160];
  std::snprintf(buf, sizeof buf, "Friedman chi2 = %.4f, dof = %zu, p = %.4e\n", fr.chi2,
                static_cast<std::size_t>(fr.dof), fr.p);
  out << buf;
  out << "mean ranks:";
  for (Index j = 0; j < perf.algorithms.size(); ++j) {
    std::snprintf(buf, sizeof buf, " %s=%.3f", perf.algorithms[j].c_str(), fr.mean_ranks[j]);
    out << buf;
  }
  out << "\n";
  if (perf.algorithms.size() <= 20) {
    std::snprintf(buf, sizeof buf, "Nemenyi CD (alpha = %.2f) = %.4f\n", alpha,
                  eval::nemenyi_cd(perf.algorithms.size(), perf.datasets.size(), alpha));
    out << buf;
  }
  return out.str();
}

std::string format_table(const EvalReport& report, const std::string& metric, TableFormat fmt) {
  std::ostringstream out;
  const auto& algs = report.algorithms;
  std::vector<std::vector<double>> rows;
  for (const std::string& d : report.datasets) {
    std::vector<double> r;
    for (const std::string& a : algs) {
      auto m = report.mean(d, a, metric);
      if (!m) throw Error("report has no " + metric + " cell for " + d + "/" + a);
      r.push_back(*m);
    }
    rows.push_back(std::move(r));
  }

  std::string footer;
  if (report.datasets.size() >= 2) {
    footer = format_rank_statistics(report.perf(metric));
  } else {
    footer = "rank statistics need at least 2 datasets\n";
  }

  if (fmt == TableFormat::csv) {
    out << "dataset";
    for (const auto& a : algs) out << "," << a;
    out << ",best\n";
    for (Index i = 0; i < rows.size(); ++i) {
      out << report.datasets[i];
      for (double v : rows[i]) out << "," << format_double(v);
      auto best = std::max_element(rows[i].begin(), rows[i].end()) - rows[i].begin();
      out << "," << algs[static_cast<Index>(best)] << "\n";
    }
    std::istringstream lines(footer);
    for (std::string l; std::getline(lines, l);) out << "# " << l << "\n";
  } else {
    out << "| Dataset |";
    for (const auto& a : algs) out << " " << a << " |";
    out << "\n|---|";
    for (Index j = 0; j < algs.size(); ++j) out << "---|";
    out << "\n";
    char buf[32];
    for (Index i = 0; i < rows.size(); ++i) {
      const double best = *std::max_element(rows[i].begin(), rows[i].end());
      out << "| " << report.datasets[i] << " |";
      for (double v : rows[i]) {
        std::snprintf(buf, sizeof buf, "%.4f", v);
        out << (v == best ? " **" + std::string(buf) + "** |" : " " + std::string(buf) + " |");
      }
      out << "\n";
    }
    out << "\n";
    std::istringstream lines(footer);
    for (std::string l; std::getline(lines, l);) out << l << "  \n";
  }
  return out.str();
}

std::vector<std::filesystem::path> emit_tables(const EvalReport& report, TableFormat fmt,
                                               const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error("cannot create output directory " + out_dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const std::string& metric : metric_names()) {
    const auto path = out_dir / (metric + (fmt == TableFormat::csv ? ".csv" : ".md"));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << format_table(report, metric, fmt);
    if (!out) throw Error("failed writing " + path.string());
    written.push_back(path);
  }
  return written;
}

}  // namespace lscp::bench
