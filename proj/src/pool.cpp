#include "lscp/pool.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <json.hpp>

namespace lscp {

ZNorm ZNorm::fit(std::span<const double> values) {
  if (values.empty()) throw Error("cannot normalize an empty score vector");
  ZNorm z;
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) {
    z.mean = *lo;
    z.stddev = 0.0;
    z.constant = true;
    return z;
  }
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  z.mean = mean;
  z.stddev = std::sqrt(var / n);
  if (!(z.stddev > 0.0)) {
    z.stddev = 0.0;
    z.constant = true;
  }
  return z;
}

void ZNorm::apply(std::span<double> values) const {
  for (double& v : values) v = apply(v);
}

std::vector<Index> DetectorPool::sample_min_pts(Index detectors, MinPtsRange range,
                                                std::uint64_t seed) {
  if (detectors == 0) throw Error("pool size must be at least 1");
  if (range.lo < 2 || range.hi < range.lo) {
    throw Error("MinPts range [" + std::to_string(range.lo) + ", " +
                std::to_string(range.hi) + "] is invalid");
  }
  std::mt19937_64 rng(derive_seed(seed, "min_pts"));
  std::uniform_int_distribution<Index> pick(range.lo, range.hi);
  std::vector<Index> out(detectors);
  for (Index& v : out) v = pick(rng);
  return out;
}

DetectorPool DetectorPool::build(const Matrix& train, Index detectors, MinPtsRange range,
                                 std::uint64_t seed, Exec exec) {
  return build(std::make_shared<const Matrix>(train), detectors, range, seed, exec);
}

DetectorPool DetectorPool::build(std::shared_ptr<const Matrix> train, Index detectors,
                                 MinPtsRange range, std::uint64_t seed, Exec exec) {
  if (!train) throw Error("pool: null training matrix");
  if (range.hi >= train->rows()) {
    throw Error("MinPts range upper bound " + std::to_string(range.hi) +
                " must be below the training size " + std::to_string(train->rows()) +
                "; narrow the range for this dataset");
  }
  return from_min_pts(std::move(train), sample_min_pts(detectors, range, seed), seed, exec);
}

DetectorPool DetectorPool::from_min_pts(std::shared_ptr<const Matrix> train,
                                        std::vector<Index> min_pts_values,
                                        std::uint64_t seed, Exec exec) {
  if (!train) throw Error("pool: null training matrix");
  if (min_pts_values.empty()) throw Error("pool size must be at least 1");
  const Index depth = *std::max_element(min_pts_values.begin(), min_pts_values.end());
  if (depth >= train->rows()) {
    throw Error("MinPts " + std::to_string(depth) + " must be below the training size " +
                std::to_string(train->rows()));
  }

  DetectorPool pool;
  pool.train_ = train;
  pool.min_pts_ = std::move(min_pts_values);
  pool.seed_ = seed;

  // One deep self-excluded table serves every detector.
  auto table = std::make_shared<const NeighborTable>(self_knn_table(*train, depth, exec));
  const Index r = pool.min_pts_.size();
  pool.models_.reserve(r);
  pool.znorm_.reserve(r);
  for (Index i = 0; i < r; ++i) {
    pool.models_.push_back(LofModel::fit(train, pool.min_pts_[i], table, exec));
    pool.znorm_.push_back(ZNorm::fit(pool.models_.back().train_scores()));
  }
  return pool;
}

ScoreMatrix DetectorPool::train_score_matrix() const {
  const Index n = train_->rows();
  ScoreMatrix out;
  out.values = Matrix(n, size());
  out.row_index.resize(n);
  std::iota(out.row_index.begin(), out.row_index.end(), Index{0});
  out.constant.resize(size());
  for (Index r = 0; r < size(); ++r) {
    const auto& raw = models_[r].train_scores();
    for (Index i = 0; i < n; ++i) out.values(i, r) = znorm_[r].apply(raw[i]);
    out.constant[r] = znorm_[r].constant;
  }
  return out;
}

Matrix DetectorPool::raw_test_scores(const Matrix& test, Exec exec) const {
  if (test.cols() != train_->cols()) {
    throw Error("pool: test dimension " + std::to_string(test.cols()) +
                " does not match training dimension " + std::to_string(train_->cols()));
  }
  const Index depth = *std::max_element(min_pts_.begin(), min_pts_.end());
  const Index m = test.rows();
  Matrix raw(m, size());
  parallel_for(exec, m, [&](Index i) {
    NeighborList deep = knn(*train_, test.row(i), depth);
    for (Index r = 0; r < size(); ++r) {
      raw(i, r) = models_[r].score_neighbors(deep);
    }
  });
  return raw;
}

ScoreMatrix DetectorPool::test_score_matrix(const Matrix& test, Exec exec) const {
  ScoreMatrix out;
  out.values = raw_test_scores(test, exec);
  out.row_index.resize(test.rows());
  std::iota(out.row_index.begin(), out.row_index.end(), Index{0});
  out.constant.resize(size());
  for (Index r = 0; r < size(); ++r) {
    out.constant[r] = znorm_[r].constant;
    for (Index i = 0; i < out.values.rows(); ++i) {
      out.values(i, r) = znorm_[r].apply(out.values(i, r));
    }
  }
  return out;
}

std::string DetectorPool::metadata_json() const {
  nlohmann::json j;
  j["seed"] = seed_;
  j["train_rows"] = train_->rows();
  j["dims"] = train_->cols();
  j["min_pts"] = min_pts_;
  auto& zs = j["znorm"] = nlohmann::json::array();
  for (const auto& z : znorm_) {
    zs.push_back({{"mean", z.mean}, {"stddev", z.stddev}, {"constant", z.constant}});
  }
  return j.dump(2);
}

void DetectorPool::save_metadata(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << metadata_json() << "\n";
}

DetectorPool DetectorPool::restore(std::shared_ptr<const Matrix> train,
                                   const std::string& json, Exec exec) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("pool metadata: ") + e.what());
  }
  if (j.at("train_rows").get<Index>() != train->rows() ||
      j.at("dims").get<Index>() != train->cols()) {
    throw Error("pool metadata does not match the training matrix shape");
  }
  auto pool = from_min_pts(std::move(train), j.at("min_pts").get<std::vector<Index>>(),
                           j.at("seed").get<std::uint64_t>(), exec);
  const auto& zs = j.at("znorm");
  if (zs.size() != pool.size()) throw Error("pool metadata: znorm count mismatch");
  for (Index r = 0; r < pool.size(); ++r) {
    if (zs[r].at("constant").get<bool>() != pool.znorm_[r].constant ||
        zs[r].at("mean").get<double>() != pool.znorm_[r].mean ||
        zs[r].at("stddev").get<double>() != pool.znorm_[r].stddev) {
      throw Error("pool metadata: normalization of detector " + std::to_string(r) +
                  " does not reproduce");
    }
  }
  return pool;
}

}  // namespace lscp
