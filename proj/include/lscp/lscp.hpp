#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lscp/correlation.hpp"
#include "lscp/pool.hpp"

namespace lscp {

// A and MOA rate detectors against the averaged pseudo target; M and AOM
// against the maximum. A and M keep the single best detector; MOA and AOM
// keep the most populated correlation-histogram bin and combine it by max
// (MOA) or mean (AOM).
enum class Variant { A, M, MOA, AOM };

enum class TargetMode { average, maximum };

TargetMode target_mode(Variant v);
std::string to_string(Variant v);
Variant parse_variant(const std::string& name);

struct LscpConfig {
  Index k = 0;   // neighbors per subspace group; 0 = 10% of n_train clamped to [30, 100]
  Index t = 20;  // subspace groups in the region vote
  Index b = 10;  // histogram bins for MOA/AOM
  Variant variant = Variant::AOM;
  std::uint64_t seed = 0;
  bool select_all = false;  // diagnostic: skip selection, keep every detector

  void validate() const;
};

// k actually used for a training set of n rows.
Index resolve_k(const LscpConfig& cfg, Index n_train);

// Marks a detector whose local correlation is undefined.
inline constexpr double kNoCorrelation = -2.0;

struct PseudoTarget {
  std::vector<double> values;
  TargetMode mode = TargetMode::average;
};

PseudoTarget pseudo_target(const ScoreMatrix& train_scores, TargetMode mode);

struct LocalRegion {
  std::vector<Index> members;  // ascending training indices
  std::vector<Index> votes;    // parallel to members
  bool fallback = false;       // no point reached the vote majority
};

// Feature subset of vote group `group`: size uniform in [ceil(d/2), d],
// distinct features, ascending.
std::vector<Index> region_subspace(std::uint64_t stream, Index group, Index dims);

// Sub-stream of test instance `instance`; independent of scoring order.
std::uint64_t region_stream(std::uint64_t seed, Index instance);

// Training points among the k nearest neighbors of `point` in more than t/2
// of t random feature subspaces. If none qualifies, the k most voted points
// (ties: smaller mean rank, then index).
LocalRegion local_region(const Matrix& train, std::span<const double> point, Index k, Index t,
                         std::uint64_t stream);

std::vector<LocalRegion> local_regions(const Matrix& train, const Matrix& test,
                                       const LscpConfig& cfg, Exec exec = Exec::parallel);

// Pearson correlation of each detector with the target, both restricted to
// the region. Constant-flagged or locally constant detectors, and regions
// smaller than 2, give kNoCorrelation.
std::vector<double> local_competency(const ScoreMatrix& train_scores,
                                     const PseudoTarget& target, const LocalRegion& region);

// Selected detectors in ascending order; empty when every correlation is
// kNoCorrelation.
std::vector<Index> select_detectors(std::span<const double> correlations, Variant variant,
                                    Index bins);

struct Explanation {
  Index instance = 0;
  LocalRegion region;
  std::vector<double> correlations;
  std::vector<Index> selected;
  bool global_fallback = false;
  double score = 0.0;
};

std::vector<double> lscp_score(const Matrix& train, const ScoreMatrix& train_scores,
                               const ScoreMatrix& test_scores, const Matrix& test,
                               const LscpConfig& cfg, Exec exec = Exec::parallel,
                               std::vector<Explanation>* explain = nullptr);

// Same as lscp_score with the regions computed up front, so the four
// variants can share them.
std::vector<double> lscp_score(const ScoreMatrix& train_scores, const ScoreMatrix& test_scores,
                               std::span<const LocalRegion> regions, const LscpConfig& cfg,
                               Exec exec = Exec::parallel,
                               std::vector<Explanation>* explain = nullptr);

// One CSV row per instance: instance, score, fallback flags, region members,
// selected detectors and the correlations of the selected detectors.
void write_explanations(std::ostream& out, std::span<const Explanation> rows);

}  // namespace lscp
