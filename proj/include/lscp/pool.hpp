#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "lscp/lof.hpp"

namespace lscp {

struct MinPtsRange {
  Index lo = 5;
  Index hi = 200;
};

// Z-normalization parameters of one detector, fitted on training scores.
// Population standard deviation (divide by n).
struct ZNorm {
  double mean = 0.0;
  double stddev = 1.0;
  bool constant = false;  // every training score identical -> column of zeros

  static ZNorm fit(std::span<const double> values);
  double apply(double x) const { return constant ? 0.0 : (x - mean) / stddev; }
  void apply(std::span<double> values) const;
};

// n x R matrix of normalized detector scores. Column r belongs to detector r.
struct ScoreMatrix {
  Matrix values;
  std::vector<Index> row_index;  // which points the rows refer to
  std::vector<bool> constant;    // per column

  Index rows() const { return values.rows(); }
  Index detectors() const { return values.cols(); }
};

class DetectorPool {
 public:
  // Fits R LOF models with MinPts drawn uniformly with replacement from
  // [range.lo, range.hi]. Requires range.lo >= 2 and range.hi < n_train.
  static DetectorPool build(std::shared_ptr<const Matrix> train, Index detectors,
                            MinPtsRange range, std::uint64_t seed,
                            Exec exec = Exec::parallel);
  static DetectorPool build(const Matrix& train, Index detectors, MinPtsRange range,
                            std::uint64_t seed, Exec exec = Exec::parallel);

  // Refits a pool from explicit MinPts values (used when restoring metadata).
  static DetectorPool from_min_pts(std::shared_ptr<const Matrix> train,
                                   std::vector<Index> min_pts_values, std::uint64_t seed,
                                   Exec exec = Exec::parallel);

  static std::vector<Index> sample_min_pts(Index detectors, MinPtsRange range,
                                           std::uint64_t seed);

  Index size() const { return models_.size(); }
  const std::vector<LofModel>& models() const { return models_; }
  const std::vector<Index>& min_pts_values() const { return min_pts_; }
  const std::vector<ZNorm>& znorm() const { return znorm_; }
  std::uint64_t seed() const { return seed_; }
  const Matrix& train() const { return *train_; }

  ScoreMatrix train_score_matrix() const;
  ScoreMatrix test_score_matrix(const Matrix& test, Exec exec = Exec::parallel) const;

  // Raw (unnormalized) LOF scores of `test`, one column per detector.
  Matrix raw_test_scores(const Matrix& test, Exec exec = Exec::parallel) const;

  std::string metadata_json() const;
  void save_metadata(const std::filesystem::path& path) const;
  // Rebuilds a pool from saved metadata and checks the refit normalization
  // parameters against the stored ones.
  static DetectorPool restore(std::shared_ptr<const Matrix> train, const std::string& json,
                              Exec exec = Exec::parallel);

 private:
  std::shared_ptr<const Matrix> train_;
  std::vector<LofModel> models_;
  std::vector<Index> min_pts_;
  std::vector<ZNorm> znorm_;
  std::uint64_t seed_ = 0;
};

}  // namespace lscp
