#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lscp/pool.hpp"

// Generic global combiners: every test instance is scored by the same
// static rule over all detectors.
namespace lscp::gg {

// Partition of detector indices into equal-size groups.
struct SubgroupPlan {
  std::vector<std::vector<Index>> groups;
  std::uint64_t seed = 0;

  Index detectors_used() const;
};

// Draws `groups` x `group_size` detectors out of `detectors` without
// replacement and deals them into groups.
SubgroupPlan make_plan(Index detectors, Index groups, Index group_size, std::uint64_t seed);
SubgroupPlan single_group(Index detectors);

std::vector<double> average(const Matrix& test_scores);
std::vector<double> maximum(const Matrix& test_scores);

// Weight of detector r = Pearson(train column r, row-wise mean of the
// training matrix), negative or undefined weights clamped to 0. Falls back
// to the plain mean when every weight is 0.
std::vector<double> consensus_weights(const Matrix& train_scores);
std::vector<double> weighted_average(const Matrix& train_scores, const Matrix& test_scores);

// Sum of the scores >= threshold in each row; 0 when none qualify.
std::vector<double> threshold_sum(const Matrix& test_scores, double threshold = 0.0);

// Average of the per-group maxima.
std::vector<double> average_of_maximum(const Matrix& test_scores, const SubgroupPlan& plan);
// Maximum of the per-group averages.
std::vector<double> maximum_of_average(const Matrix& test_scores, const SubgroupPlan& plan);

struct BaggingDraw {
  std::vector<Index> features;  // ascending
  Index min_pts = 0;
};

// The (feature subset, MinPts) pair of one bagging iteration. Depends only
// on (seed, iteration), so iterations can run in any order.
BaggingDraw bagging_draw(std::uint64_t seed, Index iteration, Index dims, MinPtsRange range);

// Feature bagging: each iteration fits LOF on a random subset of
// [ceil(d/2), d] features, Z-normalizes by its own training scores and
// scores the test rows; the result is the mean over iterations.
std::vector<double> feature_bagging(const Matrix& train, const Matrix& test, Index iterations,
                                    MinPtsRange range, std::uint64_t seed,
                                    Exec exec = Exec::parallel);

}  // namespace lscp::gg
