#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lscp/matrix.hpp"

namespace lscp {

// Neighbors of one query ordered by (squared distance, index). Holds at
// least k entries; every point tied with the k-th distance is included.
struct NeighborList {
  std::vector<Index> indices;
  std::vector<double> squared;    // ordering key
  std::vector<double> distances;  // sqrt(squared), for reporting and LOF

  Index size() const { return indices.size(); }
  friend bool operator==(const NeighborList&, const NeighborList&) = default;
};

struct KnnQuery {
  Index k = 1;
  std::optional<std::span<const Index>> features;  // nullopt = all features
  std::optional<Index> exclude;     // point index left out (self-exclusion)
};

// Squared Euclidean distance, optionally over a feature subset. The
// accumulation order is the subset order, so callers that need
// bit-identical results must pass the same ordering.
double squared_distance(std::span<const double> a, std::span<const double> b,
                        std::span<const Index> features = {});

// Exact brute-force kNN with tie inclusion at the k-th distance.
NeighborList knn(const Matrix& points, std::span<const double> query,
                 const KnnQuery& q);

NeighborList knn(const Matrix& points, std::span<const double> query, Index k,
                 std::optional<std::span<const Index>> features = std::nullopt,
                 std::optional<Index> exclude = std::nullopt);

// Number of leading entries of `deep` forming the k-nearest set.
Index tied_prefix(const NeighborList& deep, Index k);

// Shortens a deeper list to the k-nearest set (ties at k included).
// Equal to calling knn with k directly when `deep` was built with depth >= k.
NeighborList truncate(const NeighborList& deep, Index k);

// knn for every row of `points` against the other rows (self excluded).
std::vector<NeighborList> self_knn_table(const Matrix& points, Index k,
                                         Exec exec = Exec::parallel,
                                         std::optional<std::span<const Index>> features = std::nullopt);

// knn for every row of `queries` against `points` (no exclusion).
std::vector<NeighborList> query_knn_table(const Matrix& points, const Matrix& queries,
                                          Index k, Exec exec = Exec::parallel,
                                          std::optional<std::span<const Index>> features = std::nullopt);

}  // namespace lscp
