#pragma once

#include <optional>
#include <vector>

#include "nnim/types.hpp"

namespace nnim {

struct EvalReport {
  double auc_all = 0.0;       // percent
  double auc_top50 = 0.0;     // percent
  double rmse_macro = 0.0;
  std::optional<double> f1_micro;  // percent, binary predictors only
  double coverage_pct = 0.0;
  double core_pct = 0.0;
  double bipartite_edge_pct = 0.0;
  double runtime_s = 0.0;
};

/// Micro-averaged AUC-ROC in percent over the flattened (user, label) cells,
/// restricted to `label_subset` when given. Ties get half credit. Throws
/// DegenerateMetricError when the selected cells hold a single class.
double auc_micro(const Matrix& truth, const Matrix& scores,
                 const std::vector<int>* label_subset = nullptr);

/// Column-means both matrices over users and returns d^{-1/2} times the L2
/// distance of the two d-vectors.
double rmse_macro(const Matrix& truth, const Matrix& scores);

/// Micro-averaged F1 in percent over all cells of a binary prediction.
/// Returns 0 when there are no true and no predicted positives.
double f1_micro(const Matrix& truth, const Matrix& binary_pred);

/// Indices of the ceil(d/2) most prevalent labels; ties keep the lower
/// index. Sorted ascending.
std::vector<int> top50_label_set(const Matrix& truth);

}  // namespace nnim
