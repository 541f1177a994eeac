// Copyright 2026 The friendaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FRIENDAUDIT_EVALUATION_HPP
#define FRIENDAUDIT_EVALUATION_HPP

/** @file evaluation.hpp Classification metrics and small-sample statistics.
 *
 * Confusion matrices are stored with rows indexed by the actual class and
 * columns by the predicted class.
 **/

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "friendaudit/error.hpp"

namespace friendaudit {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using Table2x2 = Eigen::Matrix<std::int64_t, 2, 2>;

struct ConfusionMatrix {
  std::vector<std::string> classes;
  CountMatrix counts;  ///< counts(actual, predicted)

  [[nodiscard]] std::int64_t total() const { return counts.sum(); }
  [[nodiscard]] std::size_t index_of(std::string_view label) const;
};

/// Throws UnknownLabel for a label outside `classes`.
ConfusionMatrix confusion_matrix(
    std::span<const std::pair<std::string, std::string>> pairs,
    std::vector<std::string> classes);

/// Builds a matrix directly from a grid of counts.
ConfusionMatrix confusion_matrix(std::vector<std::string> classes,
                                 CountMatrix counts);

struct MetricTriple {
  double precision = 0;
  double recall = 0;
  double f_measure = 0;
};

struct ClassMetrics {
  std::vector<std::string> classes;
  Eigen::VectorXd precision;
  Eigen::VectorXd recall;
  Eigen::VectorXd f_measure;
  Eigen::VectorXd support;  ///< actual count per class (row sums)
  /// Averages weighted by actual support.
  MetricTriple weighted_avg;
  /// Plain mean over classes.
  MetricTriple unweighted_avg;

  [[nodiscard]] MetricTriple of(std::size_t i) const {
    const auto k = static_cast<Eigen::Index>(i);
    return {precision(k), recall(k), f_measure(k)};
  }
};

/// Harmonic mean of precision and recall; 0 when both are 0.
double f_measure(double precision, double recall) noexcept;

/// Per-class precision, recall and F. An empty predicted column gives
/// precision 0 and an empty actual row gives recall 0. Throws EmptyMatrix if
/// every count is zero.
ClassMetrics class_metrics(const ConfusionMatrix& m);

struct ChiSquareResult {
  double statistic = 0;
  int df = 1;
  double p_value = 1;
};

/// Pearson's test of independence on a 2x2 table, without continuity
/// correction. Throws DegenerateMargin if a row or column sums to zero.
ChiSquareResult chi_square_2x2(const Table2x2& table);

/// Upper tail probability of the chi-square distribution with one degree of
/// freedom: erfc(sqrt(x / 2)).
double chi_square_sf_df1(double x) noexcept;

/// Sample Pearson correlation. Throws LengthMismatch, ZeroVariance, or
/// InvalidArgument for fewer than two points.
double pearson_correlation(std::span<const double> xs, std::span<const double> ys);

// Report emitters.
std::string format_confusion_matrix(const ConfusionMatrix& m);
std::string format_class_metrics(const ClassMetrics& metrics);
nlohmann::ordered_json to_json(const ConfusionMatrix& m);
nlohmann::ordered_json to_json(const ClassMetrics& metrics);
nlohmann::ordered_json to_json(const ChiSquareResult& result);

}  // namespace friendaudit

#endif  // FRIENDAUDIT_EVALUATION_HPP
