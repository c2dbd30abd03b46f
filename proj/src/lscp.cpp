#include "lscp/lscp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include "lscp/gg.hpp"

namespace lscp {

TargetMode target_mode(Variant v) {
  return (v == Variant::A || v == Variant::MOA) ? TargetMode::average : TargetMode::maximum;
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::A: return "LSCP_A";
    case Variant::M: return "LSCP_M";
    case Variant::MOA: return "LSCP_MOA";
    case Variant::AOM: return "LSCP_AOM";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  for (Variant v : {Variant::A, Variant::M, Variant::MOA, Variant::AOM}) {
    if (name == to_string(v) || name == to_string(v).substr(5)) return v;
  }
  throw Error("unknown LSCP variant '" + name + "'");
}

void LscpConfig::validate() const {
  if (t < 1) throw Error("LSCP: t must be at least 1");
  if (b < 2) throw Error("LSCP: b must be at least 2");
}

Index resolve_k(const LscpConfig& cfg, Index n_train) {
  Index k = cfg.k;
  if (k == 0) {
    k = static_cast<Index>(std::floor(0.1 * static_cast<double>(n_train) + 0.5));
    k = std::clamp<Index>(k, 30, 100);
  }
  return std::min(k, n_train);
}

PseudoTarget pseudo_target(const ScoreMatrix& train_scores, TargetMode mode) {
  if (train_scores.detectors() == 0) throw Error("pseudo target needs at least one detector");
  PseudoTarget t;
  t.mode = mode;
  t.values = mode == TargetMode::average ? gg::average(train_scores.values)
                                         : gg::maximum(train_scores.values);
  return t;
}

std::uint64_t region_stream(std::uint64_t seed, Index instance) {
  return derive_seed(derive_seed(seed, "local_region"), instance);
}

std::vector<Index> region_subspace(std::uint64_t stream, Index group, Index dims) {
  if (dims == 0) throw Error("local region needs at least one feature");
  std::mt19937_64 rng(derive_seed(stream, group));
  std::uniform_int_distribution<Index> size_pick((dims + 1) / 2, dims);
  const Index size = size_pick(rng);
  std::vector<Index> all(dims);
  std::iota(all.begin(), all.end(), Index{0});
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(size);
  std::sort(all.begin(), all.end());
  return all;
}

LocalRegion local_region(const Matrix& train, std::span<const double> point, Index k, Index t,
                         std::uint64_t stream) {
  if (k == 0 || k > train.rows()) {
    throw Error("local region: k=" + std::to_string(k) + " must lie in [1, " +
                std::to_string(train.rows()) + "]");
  }
  if (t == 0) throw Error("local region: t must be at least 1");

  const Index n = train.rows();
  std::vector<Index> votes(n, 0);
  std::vector<Index> rank_sum(n, 0);
  for (Index g = 0; g < t; ++g) {
    const std::vector<Index> features = region_subspace(stream, g, train.cols());
    const NeighborList nb = knn(train, point, k, std::span<const Index>(features));
    for (Index pos = 0; pos < nb.size(); ++pos) {
      ++votes[nb.indices[pos]];
      rank_sum[nb.indices[pos]] += pos;
    }
  }

  LocalRegion region;
  for (Index i = 0; i < n; ++i) {
    if (2 * votes[i] > t) {
      region.members.push_back(i);
      region.votes.push_back(votes[i]);
    }
  }
  if (!region.members.empty()) return region;

  // Nobody reached the majority: keep the k most voted points.
  std::vector<Index> voted;
  for (Index i = 0; i < n; ++i) {
    if (votes[i] > 0) voted.push_back(i);
  }
  auto mean_rank = [&](Index i) {
    return static_cast<double>(rank_sum[i]) / static_cast<double>(votes[i]);
  };
  std::sort(voted.begin(), voted.end(), [&](Index a, Index b) {
    if (votes[a] != votes[b]) return votes[a] > votes[b];
    const double ra = mean_rank(a);
    const double rb = mean_rank(b);
    if (ra != rb) return ra < rb;
    return a < b;
  });
  voted.resize(std::min(k, voted.size()));
  std::sort(voted.begin(), voted.end());
  region.fallback = true;
  region.members = voted;
  for (Index i : voted) region.votes.push_back(votes[i]);
  return region;
}

std::vector<LocalRegion> local_regions(const Matrix& train, const Matrix& test,
                                       const LscpConfig& cfg, Exec exec) {
  cfg.validate();
  if (train.cols() != test.cols()) throw Error("local regions: dimension mismatch");
  const Index k = resolve_k(cfg, train.rows());
  std::vector<LocalRegion> out(test.rows());
  parallel_for(exec, test.rows(), [&](Index j) {
    out[j] = local_region(train, test.row(j), k, cfg.t, region_stream(cfg.seed, j));
  });
  return out;
}

std::vector<double> local_competency(const ScoreMatrix& train_scores,
                                     const PseudoTarget& target, const LocalRegion& region) {
  const Index r = train_scores.detectors();
  std::vector<double> out(r, kNoCorrelation);
  if (target.values.size() != train_scores.rows()) {
    throw Error("local competency: target length does not match the score matrix");
  }
  const Index m = region.members.size();
  if (m < 2) return out;

  std::vector<double> local_target(m);
  for (Index i = 0; i < m; ++i) {
    if (region.members[i] >= train_scores.rows()) {
      throw Error("local competency: region member outside the training set");
    }
    local_target[i] = target.values[region.members[i]];
  }
  std::vector<double> local_scores(m);
  for (Index c = 0; c < r; ++c) {
    if (!train_scores.constant.empty() && train_scores.constant[c]) continue;
    for (Index i = 0; i < m; ++i) local_scores[i] = train_scores.values(region.members[i], c);
    if (auto rho = pearson(local_target, local_scores)) out[c] = *rho;
  }
  return out;
}

std::vector<Index> select_detectors(std::span<const double> correlations, Variant variant,
                                    Index bins) {
  std::vector<Index> valid;
  for (Index c = 0; c < correlations.size(); ++c) {
    if (correlations[c] != kNoCorrelation) valid.push_back(c);
  }
  if (valid.empty()) return {};

  if (variant == Variant::A || variant == Variant::M) {
    Index best = valid.front();
    for (Index c : valid) {
      if (correlations[c] > correlations[best]) best = c;
    }
    return {best};
  }

  if (bins < 2) throw Error("histogram selection needs at least 2 bins");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (Index c : valid) {
    lo = std::min(lo, correlations[c]);
    hi = std::max(hi, correlations[c]);
  }
  if (lo == hi) return valid;

  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<Index> bin_of(correlations.size(), 0);
  std::vector<Index> counts(bins, 0);
  for (Index c : valid) {
    auto bin = static_cast<Index>(std::floor((correlations[c] - lo) / width));
    bin = std::min(bin, bins - 1);
    bin_of[c] = bin;
    ++counts[bin];
  }
  Index best = 0;
  for (Index i = 1; i < bins; ++i) {
    if (counts[i] >= counts[best]) best = i;
  }
  std::vector<Index> out;
  for (Index c : valid) {
    if (bin_of[c] == best) out.push_back(c);
  }
  return out;
}

namespace {

double combine(std::span<const double> row, std::span<const Index> selected, Variant v) {
  switch (v) {
    case Variant::A:
    case Variant::M:
      return row[selected.front()];
    case Variant::MOA: {
      double best = -std::numeric_limits<double>::infinity();
      for (Index c : selected) best = std::max(best, row[c]);
      return best;
    }
    case Variant::AOM: {
      double s = 0.0;
      for (Index c : selected) s += row[c];
      return s / static_cast<double>(selected.size());
    }
  }
  return 0.0;
}

double global_fallback(std::span<const double> row, Variant v) {
  if (target_mode(v) == TargetMode::average) {
    double s = 0.0;
    for (double x : row) s += x;
    return s / static_cast<double>(row.size());
  }
  return *std::max_element(row.begin(), row.end());
}

}  // namespace

std::vector<double> lscp_score(const ScoreMatrix& train_scores, const ScoreMatrix& test_scores,
                               std::span<const LocalRegion> regions, const LscpConfig& cfg,
                               Exec exec, std::vector<Explanation>* explain) {
  cfg.validate();
  const Index r = train_scores.detectors();
  if (r == 0 || test_scores.detectors() != r) {
    throw Error("LSCP: train and test score matrices disagree on the detector count");
  }
  if (regions.size() != test_scores.rows()) {
    throw Error("LSCP: one local region per test instance is required");
  }
  const PseudoTarget target = pseudo_target(train_scores, target_mode(cfg.variant));

  std::vector<Index> everyone(r);
  std::iota(everyone.begin(), everyone.end(), Index{0});

  const Index m = test_scores.rows();
  std::vector<double> out(m);
  if (explain) explain->assign(m, Explanation{});
  parallel_for(exec, m, [&](Index j) {
    auto row = test_scores.values.row(j);
    std::vector<double> corr = local_competency(train_scores, target, regions[j]);
    std::vector<Index> selected =
        cfg.select_all ? everyone : select_detectors(corr, cfg.variant, cfg.b);
    const bool fallback = selected.empty();
    out[j] = fallback ? global_fallback(row, cfg.variant) : combine(row, selected, cfg.variant);
    if (explain) {
      Explanation& e = (*explain)[j];
      e.instance = j;
      e.region = regions[j];
      e.correlations = std::move(corr);
      e.selected = std::move(selected);
      e.global_fallback = fallback;
      e.score = out[j];
    }
  });
  return out;
}

std::vector<double> lscp_score(const Matrix& train, const ScoreMatrix& train_scores,
                               const ScoreMatrix& test_scores, const Matrix& test,
                               const LscpConfig& cfg, Exec exec,
                               std::vector<Explanation>* explain) {
  if (train.rows() != train_scores.rows()) {
    throw Error("LSCP: training matrix and training scores differ in row count");
  }
  if (test.rows() != test_scores.rows()) {
    throw Error("LSCP: test matrix and test scores differ in row count");
  }
  const std::vector<LocalRegion> regions = local_regions(train, test, cfg, exec);
  return lscp_score(train_scores, test_scores, regions, cfg, exec, explain);
}

void write_explanations(std::ostream& out, std::span<const Explanation> rows) {
  auto join = [&](const auto& values) {
    for (Index i = 0; i < values.size(); ++i) out << (i ? " " : "") << values[i];
  };
  out << "instance,score,region_fallback,global_fallback,region,selected,selected_correlations\n";
  out << std::setprecision(17);
  for (const Explanation& e : rows) {
    out << e.instance << "," << e.score << "," << e.region.fallback << "," << e.global_fallback
        << ",";
    join(e.region.members);
    out << ",";
    join(e.selected);
    out << ",";
    std::vector<double> picked;
    for (Index c : e.selected) picked.push_back(e.correlations[c]);
    join(picked);
    out << "\n";
  }
}

}  // namespace lscp
