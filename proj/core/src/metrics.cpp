#include "nnim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nnim/errors.hpp"

namespace nnim {

double auc_micro(const Matrix& truth, const Matrix& scores,
                 const std::vector<int>* label_subset) {
  if (truth.rows() != scores.rows() || truth.cols() != scores.cols())
    throw ConfigError("truth/scores shape mismatch");

  std::vector<int> cols;
  if (label_subset) {
    cols = *label_subset;
    for (int i : cols)
      if (i < 0 || i >= truth.cols())
        throw ConfigError("label subset index out of range");
  } else {
    cols.resize(truth.cols());
    std::iota(cols.begin(), cols.end(), 0);
  }

  std::vector<std::pair<double, int>> cells;  // (score, is_positive)
  cells.reserve(truth.rows() * cols.size());
  for (Eigen::Index u = 0; u < truth.rows(); ++u)
    for (int i : cols)
      cells.emplace_back(scores(u, i), truth(u, i) != 0.0 ? 1 : 0);

  std::int64_t pos = 0;
  for (const auto& c : cells) pos += c.second;
  std::int64_t neg = static_cast<std::int64_t>(cells.size()) - pos;
  if (pos == 0 || neg == 0)
    throw DegenerateMetricError(
        "AUC undefined: selected cells contain a single class");

  std::sort(cells.begin(), cells.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  // Rank statistic with average ranks on score ties.
  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < cells.size()) {
    std::size_t j = i;
    while (j < cells.size() && cells[j].first == cells[i].first) ++j;
    double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t m = i; m < j; ++m)
      if (cells[m].second) pos_rank_sum += avg_rank;
    i = j;
  }
  double u_stat =
      pos_rank_sum - static_cast<double>(pos) * (static_cast<double>(pos) + 1) / 2.0;
  return 100.0 * u_stat /
         (static_cast<double>(pos) * static_cast<double>(neg));
}

double rmse_macro(const Matrix& truth, const Matrix& scores) {
  if (truth.rows() != scores.rows() || truth.cols() != scores.cols())
    throw ConfigError("truth/scores shape mismatch");
  Eigen::RowVectorXd a = truth.colwise().mean();
  Eigen::RowVectorXd b = scores.colwise().mean();
  return (a - b).norm() / std::sqrt(static_cast<double>(truth.cols()));
}

double f1_micro(const Matrix& truth, const Matrix& binary_pred) {
  if (truth.rows() != binary_pred.rows() || truth.cols() != binary_pred.cols())
    throw ConfigError("truth/prediction shape mismatch");
  std::int64_t tp = 0, fp = 0, fn = 0;
  for (Eigen::Index u = 0; u < truth.rows(); ++u)
    for (Eigen::Index i = 0; i < truth.cols(); ++i) {
      bool t = truth(u, i) != 0.0;
      bool p = binary_pred(u, i) != 0.0;
      tp += t && p;
      fp += !t && p;
      fn += t && !p;
    }
  if (2 * tp + fp + fn == 0) return 0.0;
  return 100.0 * 2.0 * static_cast<double>(tp) /
         static_cast<double>(2 * tp + fp + fn);
}

std::vector<int> top50_label_set(const Matrix& truth) {
  const int d = static_cast<int>(truth.cols());
  std::vector<std::pair<std::int64_t, int>> counts(d);
  for (int i = 0; i < d; ++i) {
    std::int64_t c = 0;
    for (Eigen::Index u = 0; u < truth.rows(); ++u) c += truth(u, i) != 0.0;
    counts[i] = {c, i};
  }
  std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  int take = (d + 1) / 2;
  std::vector<int> out;
  for (int i = 0; i < take; ++i) out.push_back(counts[i].second);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace nnim
