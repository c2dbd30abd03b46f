#include "lscp/gg.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "lscp/correlation.hpp"

namespace lscp::gg {

namespace {

void check_plan(const Matrix& scores, const SubgroupPlan& plan) {
  if (plan.groups.empty()) throw Error("subgroup plan has no groups");
  for (const auto& g : plan.groups) {
    if (g.empty()) throw Error("subgroup plan has an empty group");
    for (Index r : g) {
      if (r >= scores.cols()) {
        throw Error("subgroup plan references detector " + std::to_string(r) +
                    " but only " + std::to_string(scores.cols()) + " exist");
      }
    }
  }
}

double row_mean(std::span<const double> row) {
  double s = 0.0;
  for (double v : row) s += v;
  return s / static_cast<double>(row.size());
}

}  // namespace

Index SubgroupPlan::detectors_used() const {
  Index n = 0;
  for (const auto& g : groups) n += g.size();
  return n;
}

SubgroupPlan make_plan(Index detectors, Index groups, Index group_size, std::uint64_t seed) {
  if (groups == 0 || group_size == 0) throw Error("subgroup plan needs positive sizes");
  if (groups * group_size > detectors) {
    throw Error("subgroup plan needs " + std::to_string(groups * group_size) +
                " detectors but the pool has " + std::to_string(detectors));
  }
  std::vector<Index> order(detectors);
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(derive_seed(seed, "subgroups"));
  std::shuffle(order.begin(), order.end(), rng);

  SubgroupPlan plan;
  plan.seed = seed;
  plan.groups.resize(groups);
  for (Index g = 0; g < groups; ++g) {
    auto first = order.begin() + static_cast<std::ptrdiff_t>(g * group_size);
    plan.groups[g].assign(first, first + static_cast<std::ptrdiff_t>(group_size));
    std::sort(plan.groups[g].begin(), plan.groups[g].end());
  }
  return plan;
}

SubgroupPlan single_group(Index detectors) {
  SubgroupPlan plan;
  plan.groups.emplace_back(detectors);
  std::iota(plan.groups[0].begin(), plan.groups[0].end(), Index{0});
  return plan;
}

std::vector<double> average(const Matrix& test_scores) {
  if (test_scores.cols() == 0) throw Error("no detector columns");
  std::vector<double> out(test_scores.rows());
  for (Index i = 0; i < test_scores.rows(); ++i) out[i] = row_mean(test_scores.row(i));
  return out;
}

std::vector<double> maximum(const Matrix& test_scores) {
  if (test_scores.cols() == 0) throw Error("no detector columns");
  std::vector<double> out(test_scores.rows());
  for (Index i = 0; i < test_scores.rows(); ++i) {
    auto row = test_scores.row(i);
    out[i] = *std::max_element(row.begin(), row.end());
  }
  return out;
}

std::vector<double> consensus_weights(const Matrix& train_scores) {
  const Index r = train_scores.cols();
  std::vector<double> weights(r, 0.0);
  if (train_scores.rows() < 2) return weights;
  const std::vector<double> consensus = average(train_scores);
  for (Index c = 0; c < r; ++c) {
    auto rho = pearson(train_scores.column(c), consensus);
    weights[c] = rho ? std::max(*rho, 0.0) : 0.0;
  }
  return weights;
}

std::vector<double> weighted_average(const Matrix& train_scores, const Matrix& test_scores) {
  if (train_scores.cols() != test_scores.cols()) {
    throw Error("weighted average: train and test detector counts differ");
  }
  std::vector<double> w = consensus_weights(train_scores);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0)) return average(test_scores);
  for (double& v : w) v /= total;

  std::vector<double> out(test_scores.rows(), 0.0);
  for (Index i = 0; i < test_scores.rows(); ++i) {
    auto row = test_scores.row(i);
    double s = 0.0;
    for (Index c = 0; c < row.size(); ++c) s += w[c] * row[c];
    out[i] = s;
  }
  return out;
}

std::vector<double> threshold_sum(const Matrix& test_scores, double threshold) {
  std::vector<double> out(test_scores.rows(), 0.0);
  for (Index i = 0; i < test_scores.rows(); ++i) {
    double s = 0.0;
    for (double v : test_scores.row(i)) {
      if (v >= threshold) s += v;
    }
    out[i] = s;
  }
  return out;
}

std::vector<double> average_of_maximum(const Matrix& test_scores, const SubgroupPlan& plan) {
  check_plan(test_scores, plan);
  std::vector<double> out(test_scores.rows());
  for (Index i = 0; i < test_scores.rows(); ++i) {
    double s = 0.0;
    for (const auto& g : plan.groups) {
      double best = -std::numeric_limits<double>::infinity();
      for (Index r : g) best = std::max(best, test_scores(i, r));
      s += best;
    }
    out[i] = s / static_cast<double>(plan.groups.size());
  }
  return out;
}

std::vector<double> maximum_of_average(const Matrix& test_scores, const SubgroupPlan& plan) {
  check_plan(test_scores, plan);
  std::vector<double> out(test_scores.rows());
  for (Index i = 0; i < test_scores.rows(); ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& g : plan.groups) {
      double s = 0.0;
      for (Index r : g) s += test_scores(i, r);
      best = std::max(best, s / static_cast<double>(g.size()));
    }
    out[i] = best;
  }
  return out;
}

BaggingDraw bagging_draw(std::uint64_t seed, Index iteration, Index dims, MinPtsRange range) {
  if (dims == 0) throw Error("feature bagging needs at least one feature");
  if (range.lo < 1 || range.hi < range.lo) throw Error("feature bagging: invalid MinPts range");
  std::mt19937_64 rng(derive_seed(derive_seed(seed, "feature_bagging"), iteration));
  std::uniform_int_distribution<Index> size_pick((dims + 1) / 2, dims);
  const Index size = size_pick(rng);
  std::vector<Index> all(dims);
  std::iota(all.begin(), all.end(), Index{0});
  std::shuffle(all.begin(), all.end(), rng);
  BaggingDraw draw;
  draw.features.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(size));
  std::sort(draw.features.begin(), draw.features.end());
  std::uniform_int_distribution<Index> pts_pick(range.lo, range.hi);
  draw.min_pts = pts_pick(rng);
  return draw;
}

std::vector<double> feature_bagging(const Matrix& train, const Matrix& test, Index iterations,
                                    MinPtsRange range, std::uint64_t seed, Exec exec) {
  if (iterations == 0) throw Error("feature bagging needs at least one iteration");
  if (train.cols() != test.cols()) throw Error("feature bagging: dimension mismatch");
  if (range.hi >= train.rows()) {
    throw Error("feature bagging: MinPts " + std::to_string(range.hi) +
                " must be below the training size " + std::to_string(train.rows()));
  }
  std::vector<double> total(test.rows(), 0.0);
  for (Index it = 0; it < iterations; ++it) {
    BaggingDraw draw = bagging_draw(seed, it, train.cols(), range);
    auto projected = std::make_shared<const Matrix>(train.select_cols(draw.features));
    LofModel model = LofModel::fit(projected, draw.min_pts, exec);
    ZNorm z = ZNorm::fit(model.train_scores());
    std::vector<double> s = model.score(test.select_cols(draw.features), exec);
    for (Index i = 0; i < s.size(); ++i) total[i] += z.apply(s[i]);
  }
  for (double& v : total) v /= static_cast<double>(iterations);
  return total;
}

}  // namespace lscp::gg
