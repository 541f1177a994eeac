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

#include "friendaudit/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace friendaudit {

std::size_t ConfusionMatrix::index_of(std::string_view label) const {
  const auto it = std::find(classes.begin(), classes.end(), label);
  if (it == classes.end()) {
    throw Error(ErrorCode::UnknownLabel,
                "label '" + std::string(label) + "' is not a declared class");
  }
  return static_cast<std::size_t>(it - classes.begin());
}

ConfusionMatrix confusion_matrix(
    std::span<const std::pair<std::string, std::string>> pairs,
    std::vector<std::string> classes) {
  const auto n = static_cast<Eigen::Index>(classes.size());
  ConfusionMatrix m{std::move(classes), CountMatrix::Zero(n, n)};
  for (const auto& [actual, predicted] : pairs) {
    const auto i = static_cast<Eigen::Index>(m.index_of(actual));
    const auto j = static_cast<Eigen::Index>(m.index_of(predicted));
    ++m.counts(i, j);
  }
  return m;
}

ConfusionMatrix confusion_matrix(std::vector<std::string> classes,
                                 CountMatrix counts) {
  const auto n = static_cast<Eigen::Index>(classes.size());
  if (counts.rows() != n || counts.cols() != n) {
    throw Error(ErrorCode::InvalidArgument,
                "count grid does not match the class list");
  }
  if ((counts.array() < 0).any()) {
    throw Error(ErrorCode::InvalidArgument, "negative count in confusion matrix");
  }
  return ConfusionMatrix{std::move(classes), std::move(counts)};
}

double f_measure(double precision, double recall) noexcept {
  const double s = precision + recall;
  return s > 0 ? 2 * precision * recall / s : 0.0;
}

ClassMetrics class_metrics(const ConfusionMatrix& m) {
  const std::int64_t total = m.total();
  if (total == 0) throw Error(ErrorCode::EmptyMatrix, "confusion matrix is empty");

  const Eigen::VectorXd diag = m.counts.diagonal().cast<double>();
  const Eigen::VectorXd rows = m.counts.rowwise().sum().cast<double>();
  const Eigen::VectorXd cols = m.counts.colwise().sum().transpose().cast<double>();
  const Eigen::Index n = diag.size();

  ClassMetrics out;
  out.classes = m.classes;
  out.support = rows;
  out.precision = (cols.array() > 0).select(diag.array() / cols.array(), 0.0);
  out.recall = (rows.array() > 0).select(diag.array() / rows.array(), 0.0);
  out.f_measure.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.f_measure(i) = f_measure(out.precision(i), out.recall(i));
  }

  const Eigen::VectorXd w = rows / static_cast<double>(total);
  out.weighted_avg = {w.dot(out.precision), w.dot(out.recall),
                      w.dot(out.f_measure)};
  out.unweighted_avg = {out.precision.mean(), out.recall.mean(),
                        out.f_measure.mean()};
  return out;
}

double chi_square_sf_df1(double x) noexcept {
  if (x <= 0) return 1.0;
  return std::erfc(std::sqrt(x / 2.0));
}

ChiSquareResult chi_square_2x2(const Table2x2& table) {
  if ((table.array() < 0).any()) {
    throw Error(ErrorCode::InvalidArgument, "negative count in 2x2 table");
  }
  const Eigen::Matrix2d obs = table.cast<double>();
  const Eigen::Vector2d rows = obs.rowwise().sum();
  const Eigen::RowVector2d cols = obs.colwise().sum();
  if ((rows.array() == 0).any() || (cols.array() == 0).any()) {
    throw Error(ErrorCode::DegenerateMargin, "2x2 table has an empty margin");
  }
  const Eigen::Matrix2d expected = rows * cols / obs.sum();
  const double stat =
      ((obs - expected).array().square() / expected.array()).sum();
  return ChiSquareResult{stat, 1, chi_square_sf_df1(stat)};
}

double pearson_correlation(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    throw Error(ErrorCode::LengthMismatch, "sample lengths differ");
  }
  if (xs.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "need at least two points");
  }
  const auto n = static_cast<Eigen::Index>(xs.size());
  const Eigen::Map<const Eigen::VectorXd> x(xs.data(), n);
  const Eigen::Map<const Eigen::VectorXd> y(ys.data(), n);
  const Eigen::VectorXd dx = x.array() - x.mean();
  const Eigen::VectorXd dy = y.array() - y.mean();
  const double sxx = dx.squaredNorm();
  const double syy = dy.squaredNorm();
  if (sxx == 0 || syy == 0) {
    throw Error(ErrorCode::ZeroVariance, "a sample has zero variance");
  }
  return std::clamp(dx.dot(dy) / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::string format_confusion_matrix(const ConfusionMatrix& m) {
  std::size_t width = 6;
  for (const auto& c : m.classes) width = std::max(width, c.size());
  width += 2;
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(width)) << "actual\\pred";
  for (const auto& c : m.classes) os << std::right << std::setw(static_cast<int>(width)) << c;
  os << '\n';
  for (Eigen::Index i = 0; i < m.counts.rows(); ++i) {
    os << std::left << std::setw(static_cast<int>(width))
       << m.classes[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m.counts.cols(); ++j) {
      os << std::right << std::setw(static_cast<int>(width)) << m.counts(i, j);
    }
    os << '\n';
  }
  return os.str();
}

std::string format_class_metrics(const ClassMetrics& metrics) {
  std::size_t width = 16;
  for (const auto& c : metrics.classes) width = std::max(width, c.size() + 2);
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  os << std::left << std::setw(static_cast<int>(width)) << "class"
     << std::right << std::setw(11) << "precision" << std::setw(9) << "recall"
     << std::setw(11) << "f-measure" << std::setw(9) << "support" << '\n';
  const auto row = [&](const std::string& name, const MetricTriple& t,
                       double support) {
    os << std::left << std::setw(static_cast<int>(width)) << name << std::right
       << std::setw(11) << t.precision << std::setw(9) << t.recall
       << std::setw(11) << t.f_measure << std::setw(9)
       << static_cast<long long>(support) << '\n';
  };
  for (std::size_t i = 0; i < metrics.classes.size(); ++i) {
    row(metrics.classes[i], metrics.of(i),
        metrics.support(static_cast<Eigen::Index>(i)));
  }
  row("Weighted Avg.", metrics.weighted_avg, metrics.support.sum());
  row("Avg.", metrics.unweighted_avg, metrics.support.sum());
  return os.str();
}

nlohmann::ordered_json to_json(const ConfusionMatrix& m) {
  nlohmann::ordered_json j;
  j["classes"] = m.classes;
  auto rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < m.counts.rows(); ++i) {
    auto r = nlohmann::ordered_json::array();
    for (Eigen::Index k = 0; k < m.counts.cols(); ++k) r.push_back(m.counts(i, k));
    rows.push_back(std::move(r));
  }
  j["counts"] = std::move(rows);
  return j;
}

namespace {

nlohmann::ordered_json triple(const MetricTriple& t) {
  nlohmann::ordered_json j;
  j["precision"] = t.precision;
  j["recall"] = t.recall;
  j["f_measure"] = t.f_measure;
  return j;
}

}  // namespace

nlohmann::ordered_json to_json(const ClassMetrics& metrics) {
  nlohmann::ordered_json j;
  auto per_class = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < metrics.classes.size(); ++i) {
    auto c = triple(metrics.of(i));
    c["class"] = metrics.classes[i];
    c["support"] =
        static_cast<std::int64_t>(metrics.support(static_cast<Eigen::Index>(i)));
    per_class.push_back(std::move(c));
  }
  j["per_class"] = std::move(per_class);
  j["weighted_avg"] = triple(metrics.weighted_avg);
  j["unweighted_avg"] = triple(metrics.unweighted_avg);
  return j;
}

nlohmann::ordered_json to_json(const ChiSquareResult& result) {
  nlohmann::ordered_json j;
  j["statistic"] = result.statistic;
  j["df"] = result.df;
  j["p_value"] = result.p_value;
  return j;
}

}  // namespace friendaudit
