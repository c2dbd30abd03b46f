#pragma once

#include <span>
#include <string>
#include <vector>

#include "lscp/matrix.hpp"

namespace lscp::eval {

// Mann-Whitney ROC-AUC with average ranks for tied scores.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

// Average precision of the ranking by descending score; equal scores keep
// ascending index order.
double average_precision(std::span<const double> scores, std::span<const int> labels);

// N datasets x K algorithms, higher is better.
struct PerfMatrix {
  std::vector<std::string> datasets;
  std::vector<std::string> algorithms;
  Matrix values;

  void validate() const;
};

// Reads "dataset,alg1,alg2,..." CSV with one row per dataset.
PerfMatrix read_perf_csv(const std::string& text);

struct FriedmanResult {
  double chi2 = 0.0;
  double p = 1.0;
  Index dof = 0;
  std::vector<double> mean_ranks;  // rank 1 = best
};

// Friedman test on per-row average ranks with the tie correction.
FriedmanResult friedman(const PerfMatrix& perf);

// Upper tail of the chi-square distribution.
double chi2_sf(double x, double dof);

// Two-tailed Nemenyi critical value q_alpha for K algorithms (K in [2, 20],
// alpha 0.05 or 0.10).
double nemenyi_q(Index k, double alpha);

// Critical difference q_alpha * sqrt(K (K + 1) / (6 N)).
double nemenyi_cd(Index k, Index n, double alpha = 0.05);

}  // namespace lscp::eval
