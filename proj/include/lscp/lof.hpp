#pragma once

#include <memory>
#include <vector>

#include "lscp/neighbors.hpp"

namespace lscp {

using NeighborTable = std::vector<NeighborList>;

// Local reachability density assigned when every reach-distance is zero
// (duplicate clusters). Two capped densities compare as a ratio of 1.
inline constexpr double kLrdCap = 1e12;

// Exact Local Outlier Factor. Higher score = more outlying; ~1 for inliers.
//
// reach_dist(p, o) = max(k_distance(o), d(p, o))
// lrd(p)           = 1 / mean_{o in N(p)} reach_dist(p, o)
// lof(p)           = mean_{o in N(p)} lrd(o) / lrd(p)
//
// N(p) holds every training point within k_distance(p), so it can exceed
// min_pts under ties. Training points are scored against the others with
// themselves excluded; queries are scored against the training points only.
class LofModel {
 public:
  static LofModel fit(std::shared_ptr<const Matrix> train, Index min_pts,
                      Exec exec = Exec::parallel);
  static LofModel fit(const Matrix& train, Index min_pts, Exec exec = Exec::parallel);

  // Fits from a self-excluded neighbor table built with depth >= min_pts.
  // Several models with different min_pts can share one table.
  static LofModel fit(std::shared_ptr<const Matrix> train, Index min_pts,
                      std::shared_ptr<const NeighborTable> deep_table,
                      Exec exec = Exec::parallel);

  Index min_pts() const { return min_pts_; }
  Index train_size() const { return train_->rows(); }
  Index dims() const { return train_->cols(); }

  const std::vector<double>& k_distances() const { return k_distance_; }
  const std::vector<double>& lrd() const { return lrd_; }
  const std::vector<double>& train_scores() const { return train_scores_; }
  NeighborList neighborhood(Index i) const;
  bool degenerate(Index i) const { return lrd_[i] == kLrdCap; }

  std::vector<double> score(const Matrix& queries, Exec exec = Exec::parallel) const;

  // Scores queries from a precomputed query table (depth >= min_pts).
  std::vector<double> score(const NeighborTable& query_table,
                            Exec exec = Exec::parallel) const;

  // Score of one query whose training neighbors (depth >= min_pts) are known.
  double score_neighbors(const NeighborList& deep) const;

 private:
  std::shared_ptr<const Matrix> train_;
  std::shared_ptr<const NeighborTable> table_;
  Index min_pts_ = 0;
  std::vector<Index> neighborhood_size_;
  std::vector<double> k_distance_;
  std::vector<double> lrd_;
  std::vector<double> train_scores_;
};

}  // namespace lscp
