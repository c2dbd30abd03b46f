#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lscp/matrix.hpp"

namespace lscp {

// Numeric feature matrix with binary outlier labels (1 = outlier).
struct Dataset {
  std::string name;
  Matrix features;
  std::vector<int> labels;

  Index size() const { return features.rows(); }
  Index dims() const { return features.cols(); }
  Index outlier_count() const;

  // Checks shape, finiteness and label domain. With `require_both_classes`
  // a single-class dataset is rejected as well.
  void validate(bool require_both_classes = true) const;
};

struct Split {
  std::vector<Index> train;
  std::vector<Index> test;

  friend bool operator==(const Split&, const Split&) = default;
};

// Reads a CSV with a header row; the last column is the 0/1 label.
// Parse errors report the 1-based line and column.
Dataset load_csv(const std::filesystem::path& path);
Dataset parse_csv(const std::string& text, const std::string& name = "inline");

void write_csv(const Dataset& ds, const std::filesystem::path& path);

// round-half-up of train_frac * n.
Index train_size(Index n, double train_frac);

// Deterministic train/test partition. Stratified mode splits each class
// separately so both halves keep the global outlier proportion.
Split split(const Dataset& ds, double train_frac, std::uint64_t seed,
            bool stratified = true);

// Per-feature z-scaling fitted on `reference` rows only; constant features
// are centered but left unscaled. Applied in place to every row of `x`.
void standardize_features(Matrix& x, std::span<const Index> reference);

}  // namespace lscp
