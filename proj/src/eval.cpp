#include "lscp/eval.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

namespace lscp::eval {

namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw Error("scores and labels differ in length");
  for (int l : labels) {
    if (l != 0 && l != 1) throw Error("labels must be 0 or 1");
  }
  for (double s : scores) {
    if (std::isnan(s)) throw Error("NaN score");
  }
}

// 1-based average ranks in ascending order of `values`.
std::vector<double> average_ranks(std::span<const double> values) {
  const Index n = values.size();
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  Index i = 0;
  while (i < n) {
    Index j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (Index t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

// Studentized range quantiles at infinite degrees of freedom divided by
// sqrt(2), K = 2..20.
constexpr std::array<double, 19> kQ05 = {
    1.9600, 2.3437, 2.5690, 2.7278, 2.8497, 2.9483, 3.0309, 3.1017, 3.1637, 3.2187,
    3.2680, 3.3127, 3.3536, 3.3912, 3.4260, 3.4584, 3.4887, 3.5171, 3.5438};
constexpr std::array<double, 19> kQ10 = {
    1.6449, 2.0523, 2.2913, 2.4595, 2.5885, 2.6927, 2.7799, 2.8546, 2.9199, 2.9778,
    3.0297, 3.0767, 3.1197, 3.1592, 3.1957, 3.2297, 3.2615, 3.2912, 3.3192};

}  // namespace

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  const auto pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
  const double neg = static_cast<double>(labels.size()) - pos;
  if (pos == 0 || neg == 0) throw Error("ROC-AUC needs both classes");
  const std::vector<double> ranks = average_ranks(scores);
  double rank_sum = 0.0;
  for (Index i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) rank_sum += ranks[i];
  }
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

double average_precision(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  const auto pos = static_cast<Index>(std::count(labels.begin(), labels.end(), 1));
  if (pos == 0) throw Error("average precision needs at least one positive");
  std::vector<Index> order(scores.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return scores[a] > scores[b]; });
  double sum = 0.0;
  Index hits = 0;
  for (Index r = 0; r < order.size(); ++r) {
    if (labels[order[r]] == 1) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
  }
  return sum / static_cast<double>(pos);
}

void PerfMatrix::validate() const {
  if (values.rows() < 2 || values.cols() < 2) {
    throw Error("performance table needs at least 2 datasets and 2 algorithms");
  }
  if (datasets.size() != values.rows() || algorithms.size() != values.cols()) {
    throw Error("performance table labels do not match its shape");
  }
  for (double v : values.data()) {
    if (!std::isfinite(v)) throw Error("performance table holds a non-finite value");
  }
}

PerfMatrix read_perf_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  PerfMatrix perf;
  std::vector<double> values;
  Index line_no = 0;
  bool drop_last = false;
  auto fields_of = [](const std::string& l) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ls(l);
    while (std::getline(ls, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
      out.push_back(cell);
    }
    return out;
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    auto fields = fields_of(line);
    if (perf.algorithms.empty()) {
      if (!fields.empty() && fields.back() == "best") {
        fields.pop_back();
        drop_last = true;
      }
      if (fields.size() < 3) throw Error("performance table header needs at least 2 algorithms");
      perf.algorithms.assign(fields.begin() + 1, fields.end());
      continue;
    }
    if (drop_last && !fields.empty()) fields.pop_back();
    if (fields.size() != perf.algorithms.size() + 1) {
      throw Error("performance table line " + std::to_string(line_no) + ": expected " +
                  std::to_string(perf.algorithms.size() + 1) + " fields");
    }
    perf.datasets.push_back(fields[0]);
    for (Index c = 1; c < fields.size(); ++c) {
      double v = 0.0;
      const std::string& f = fields[c];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
        throw Error("performance table line " + std::to_string(line_no) + " column " +
                    std::to_string(c + 1) + ": cannot parse '" + f + "'");
      }
      values.push_back(v);
    }
  }
  perf.values = Matrix(perf.datasets.size(), perf.algorithms.size(), std::move(values));
  perf.validate();
  return perf;
}

FriedmanResult friedman(const PerfMatrix& perf) {
  perf.validate();
  const Index n = perf.values.rows();
  const Index k = perf.values.cols();
  FriedmanResult res;
  res.dof = k - 1;
  res.mean_ranks.assign(k, 0.0);

  double tie_sum = 0.0;
  std::vector<double> negated(k);
  for (Index i = 0; i < n; ++i) {
    auto row = perf.values.row(i);
    for (Index j = 0; j < k; ++j) negated[j] = -row[j];
    const std::vector<double> ranks = average_ranks(negated);
    for (Index j = 0; j < k; ++j) res.mean_ranks[j] += ranks[j];

    std::vector<double> sorted(row.begin(), row.end());
    std::sort(sorted.begin(), sorted.end());
    for (Index a = 0; a < k;) {
      Index b = a;
      while (b + 1 < k && sorted[b + 1] == sorted[a]) ++b;
      const double t = static_cast<double>(b - a + 1);
      tie_sum += t * t * t - t;
      a = b + 1;
    }
  }
  const double nd = static_cast<double>(n);
  const double kd = static_cast<double>(k);
  double sq = 0.0;
  for (double& r : res.mean_ranks) {
    r /= nd;
    sq += r * r;
  }
  const double raw = 12.0 * nd / (kd * (kd + 1.0)) * (sq - kd * (kd + 1.0) * (kd + 1.0) / 4.0);
  const double correction = 1.0 - tie_sum / (nd * (kd * kd * kd - kd));
  if (!(correction > 0.0)) {
    res.chi2 = 0.0;
    res.p = 1.0;
    return res;
  }
  res.chi2 = std::max(0.0, raw / correction);
  res.p = chi2_sf(res.chi2, static_cast<double>(res.dof));
  return res;
}

double chi2_sf(double x, double dof) {
  if (!(dof > 0.0)) throw Error("chi-square needs positive degrees of freedom");
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, x / 2.0);
}

double nemenyi_q(Index k, double alpha) {
  if (k < 2 || k > 20) {
    throw Error("Nemenyi table covers 2 to 20 algorithms, got " + std::to_string(k));
  }
  if (std::abs(alpha - 0.05) < 1e-12) return kQ05[k - 2];
  if (std::abs(alpha - 0.10) < 1e-12) return kQ10[k - 2];
  throw Error("Nemenyi table covers alpha 0.05 and 0.10 only");
}

double nemenyi_cd(Index k, Index n, double alpha) {
  if (n == 0) throw Error("Nemenyi critical difference needs at least one dataset");
  const double kd = static_cast<double>(k);
  return nemenyi_q(k, alpha) * std::sqrt(kd * (kd + 1.0) / (6.0 * static_cast<double>(n)));
}

}  // namespace lscp::eval
