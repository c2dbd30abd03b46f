#include "lscp/lof.hpp"

#include <algorithm>
#include <string>

namespace lscp {

LofModel LofModel::fit(const Matrix& train, Index min_pts, Exec exec) {
  return fit(std::make_shared<const Matrix>(train), min_pts, exec);
}

LofModel LofModel::fit(std::shared_ptr<const Matrix> train, Index min_pts, Exec exec) {
  if (!train) throw Error("LOF: null training matrix");
  if (min_pts == 0 || min_pts >= train->rows()) {
    throw Error("LOF: min_pts=" + std::to_string(min_pts) + " must lie in [1, " +
                std::to_string(train->rows()) + ")");
  }
  auto table = std::make_shared<const NeighborTable>(self_knn_table(*train, min_pts, exec));
  return fit(std::move(train), min_pts, std::move(table), exec);
}

LofModel LofModel::fit(std::shared_ptr<const Matrix> train, Index min_pts,
                       std::shared_ptr<const NeighborTable> deep_table, Exec exec) {
  if (!train || !deep_table) throw Error("LOF: null training data");
  const Index n = train->rows();
  if (min_pts == 0 || min_pts >= n) {
    throw Error("LOF: min_pts=" + std::to_string(min_pts) + " must lie in [1, " +
                std::to_string(n) + ")");
  }
  if (deep_table->size() != n) throw Error("LOF: neighbor table size mismatch");

  LofModel m;
  m.train_ = std::move(train);
  m.table_ = std::move(deep_table);
  m.min_pts_ = min_pts;
  m.neighborhood_size_.resize(n);
  m.k_distance_.resize(n);
  m.lrd_.resize(n);
  m.train_scores_.resize(n);

  const NeighborTable& table = *m.table_;
  parallel_for(exec, n, [&](Index i) {
    if (table[i].size() < min_pts) {
      throw Error("LOF: neighbor table too shallow for min_pts=" + std::to_string(min_pts));
    }
    m.neighborhood_size_[i] = tied_prefix(table[i], min_pts);
    m.k_distance_[i] = table[i].distances[min_pts - 1];
  });

  parallel_for(exec, n, [&](Index i) {
    const NeighborList& nb = table[i];
    const Index size = m.neighborhood_size_[i];
    double reach = 0.0;
    for (Index j = 0; j < size; ++j) {
      reach += std::max(m.k_distance_[nb.indices[j]], nb.distances[j]);
    }
    reach /= static_cast<double>(size);
    m.lrd_[i] = reach > 0.0 ? 1.0 / reach : kLrdCap;
  });

  parallel_for(exec, n, [&](Index i) {
    const NeighborList& nb = table[i];
    const Index size = m.neighborhood_size_[i];
    double ratio = 0.0;
    for (Index j = 0; j < size; ++j) ratio += m.lrd_[nb.indices[j]] / m.lrd_[i];
    m.train_scores_[i] = ratio / static_cast<double>(size);
  });
  return m;
}

NeighborList LofModel::neighborhood(Index i) const {
  return truncate((*table_)[i], min_pts_);
}

double LofModel::score_neighbors(const NeighborList& deep) const {
  const Index size = tied_prefix(deep, min_pts_);
  double reach = 0.0;
  for (Index j = 0; j < size; ++j) {
    reach += std::max(k_distance_[deep.indices[j]], deep.distances[j]);
  }
  reach /= static_cast<double>(size);
  const double own = reach > 0.0 ? 1.0 / reach : kLrdCap;
  double ratio = 0.0;
  for (Index j = 0; j < size; ++j) ratio += lrd_[deep.indices[j]] / own;
  return ratio / static_cast<double>(size);
}

std::vector<double> LofModel::score(const Matrix& queries, Exec exec) const {
  if (queries.cols() != dims()) {
    throw Error("LOF: query dimension " + std::to_string(queries.cols()) +
                " does not match model dimension " + std::to_string(dims()));
  }
  std::vector<double> out(queries.rows());
  parallel_for(exec, queries.rows(), [&](Index i) {
    out[i] = score_neighbors(knn(*train_, queries.row(i), min_pts_));
  });
  return out;
}

std::vector<double> LofModel::score(const NeighborTable& query_table, Exec exec) const {
  std::vector<double> out(query_table.size());
  parallel_for(exec, query_table.size(), [&](Index i) {
    if (query_table[i].size() < min_pts_) {
      throw Error("LOF: query neighbor list too shallow for min_pts=" +
                  std::to_string(min_pts_));
    }
    out[i] = score_neighbors(query_table[i]);
  });
  return out;
}

}  // namespace lscp
