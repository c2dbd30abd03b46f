#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "lscp/datasets.hpp"
#include "lscp/matrix.hpp"
#include "oracles.hpp"

namespace testutil {

inline lscp::Matrix to_matrix(const oracle::Points& p) { return lscp::Matrix::from_rows(p); }

inline oracle::Points to_points(const lscp::Matrix& m) {
  oracle::Points p(m.rows());
  for (lscp::Index i = 0; i < m.rows(); ++i) p[i].assign(m.row(i).begin(), m.row(i).end());
  return p;
}

inline lscp::Matrix random_matrix(lscp::Index rows, lscp::Index cols, std::uint64_t seed) {
  return to_matrix(oracle::random_points(rows, cols, seed));
}

// Gaussian blob of inliers plus uniformly scattered outliers far away.
inline lscp::Dataset blob_dataset(lscp::Index inliers, lscp::Index outliers, lscp::Index dims,
                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (lscp::Index i = 0; i < inliers; ++i) {
    std::vector<double> r(dims);
    for (double& v : r) v = g(rng);
    rows.push_back(r);
    labels.push_back(0);
  }
  for (lscp::Index i = 0; i < outliers; ++i) {
    std::vector<double> r(dims);
    for (double& v : r) {
      v = u(rng);
      v += v < 0 ? -3.0 : 3.0;
    }
    rows.push_back(r);
    labels.push_back(1);
  }
  lscp::Dataset ds;
  ds.name = "blob";
  ds.features = lscp::Matrix::from_rows(rows);
  ds.labels = labels;
  return ds;
}

}  // namespace testutil
