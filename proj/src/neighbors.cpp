#include "lscp/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace lscp {

namespace {

struct Candidate {
  double d2;
  Index index;
};

bool closer(const Candidate& a, const Candidate& b) {
  return a.d2 < b.d2 || (a.d2 == b.d2 && a.index < b.index);
}

void check_features(std::span<const Index> features, Index dims) {
  for (Index f : features) {
    if (f >= dims) throw Error("feature index " + std::to_string(f) + " out of range");
  }
}

}  // namespace

double squared_distance(std::span<const double> a, std::span<const double> b,
                        std::span<const Index> features) {
  double acc = 0.0;
  if (features.empty()) {
    for (Index i = 0; i < a.size(); ++i) {
      double diff = a[i] - b[i];
      acc += diff * diff;
    }
  } else {
    for (Index f : features) {
      double diff = a[f] - b[f];
      acc += diff * diff;
    }
  }
  return acc;
}

NeighborList knn(const Matrix& points, std::span<const double> query, const KnnQuery& q) {
  if (query.size() != points.cols()) {
    throw Error("query dimension " + std::to_string(query.size()) +
                " does not match points dimension " + std::to_string(points.cols()));
  }
  if (q.k == 0) throw Error("k must be positive");
  std::span<const Index> features;
  if (q.features) {
    if (q.features->empty()) throw Error("feature subset must not be empty");
    features = *q.features;
    check_features(features, points.cols());
  }

  const Index n = points.rows();
  const bool excluding = q.exclude.has_value() && *q.exclude < n;
  const Index eligible = excluding ? n - 1 : n;
  if (q.k > eligible) {
    throw Error("k=" + std::to_string(q.k) + " exceeds the " + std::to_string(eligible) +
                " eligible points");
  }

  std::vector<Candidate> cand;
  cand.reserve(eligible);
  for (Index i = 0; i < n; ++i) {
    if (excluding && i == *q.exclude) continue;
    cand.push_back({squared_distance(points.row(i), query, features), i});
  }

  auto kth = cand.begin() + static_cast<std::ptrdiff_t>(q.k - 1);
  std::nth_element(cand.begin(), kth, cand.end(), closer);
  const double radius = kth->d2;
  auto tail = std::partition(kth + 1, cand.end(),
                             [radius](const Candidate& c) { return c.d2 <= radius; });
  std::sort(cand.begin(), tail, closer);

  NeighborList out;
  const auto m = static_cast<Index>(tail - cand.begin());
  out.indices.reserve(m);
  out.squared.reserve(m);
  out.distances.reserve(m);
  for (auto it = cand.begin(); it != tail; ++it) {
    out.indices.push_back(it->index);
    out.squared.push_back(it->d2);
    out.distances.push_back(std::sqrt(it->d2));
  }
  return out;
}

NeighborList knn(const Matrix& points, std::span<const double> query, Index k,
                 std::optional<std::span<const Index>> features,
                 std::optional<Index> exclude) {
  return knn(points, query, KnnQuery{k, features, exclude});
}

Index tied_prefix(const NeighborList& deep, Index k) {
  if (k == 0 || k > deep.size()) {
    throw Error("cannot truncate a neighbor list of " + std::to_string(deep.size()) +
                " to k=" + std::to_string(k));
  }
  Index m = k;
  const double radius = deep.squared[k - 1];
  while (m < deep.size() && deep.squared[m] == radius) ++m;
  return m;
}

NeighborList truncate(const NeighborList& deep, Index k) {
  const Index m = tied_prefix(deep, k);
  NeighborList out;
  out.indices.assign(deep.indices.begin(), deep.indices.begin() + static_cast<std::ptrdiff_t>(m));
  out.squared.assign(deep.squared.begin(), deep.squared.begin() + static_cast<std::ptrdiff_t>(m));
  out.distances.assign(deep.distances.begin(),
                       deep.distances.begin() + static_cast<std::ptrdiff_t>(m));
  return out;
}

std::vector<NeighborList> self_knn_table(const Matrix& points, Index k, Exec exec,
                                         std::optional<std::span<const Index>> features) {
  std::vector<NeighborList> table(points.rows());
  parallel_for(exec, points.rows(), [&](Index i) {
    table[i] = knn(points, points.row(i), KnnQuery{k, features, i});
  });
  return table;
}

std::vector<NeighborList> query_knn_table(const Matrix& points, const Matrix& queries,
                                          Index k, Exec exec,
                                          std::optional<std::span<const Index>> features) {
  std::vector<NeighborList> table(queries.rows());
  parallel_for(exec, queries.rows(), [&](Index i) {
    table[i] = knn(points, queries.row(i), KnnQuery{k, features, std::nullopt});
  });
  return table;
}

}  // namespace lscp
