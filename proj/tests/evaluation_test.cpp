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

#include <array>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "friendaudit/evaluation.hpp"
#include "friendaudit/generator.hpp"

namespace friendaudit {
namespace {

// Decision confusion matrix published with the original study; rows are the
// participants' decisions, columns the predictions.
constexpr std::array<std::array<std::int64_t, 5>, 5> kDecisionGrid{{
    {882, 13, 10, 13, 3},
    {103, 27, 1, 1, 3},
    {77, 1, 6, 0, 1},
    {79, 3, 0, 6, 0},
    {5, 0, 0, 0, 218},
}};
const std::vector<std::string> kDecisionClasses{"unfriend", "sandbox", "restrict",
                                                "unfollow", "ignore"};

ConfusionMatrix decision_matrix() {
  CountMatrix m(5, 5);
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c) m(r, c) = kDecisionGrid[r][c];
  return confusion_matrix(kDecisionClasses, m);
}

TEST(Confusion, PairsRebuildTheGrid) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c)
      for (std::int64_t n = 0; n < kDecisionGrid[r][c]; ++n)
        pairs.emplace_back(kDecisionClasses[r], kDecisionClasses[c]);
  ASSERT_EQ(pairs.size(), 1452u);
  const ConfusionMatrix m = confusion_matrix(pairs, kDecisionClasses);
  EXPECT_EQ(m.counts, decision_matrix().counts);
  EXPECT_EQ(m.total(), 1452);
}

TEST(Confusion, DiagonalAndEmpty) {
  const std::vector<std::pair<std::string, std::string>> pairs{
      {"a", "a"}, {"b", "b"}, {"b", "b"}};
  const ConfusionMatrix m = confusion_matrix(pairs, {"a", "b"});
  EXPECT_EQ(m.counts(0, 1) + m.counts(1, 0), 0);
  EXPECT_EQ(m.counts(1, 1), 2);
  EXPECT_EQ(confusion_matrix(std::span<const std::pair<std::string, std::string>>{}, {"a", "b"}).total(), 0);
  const std::vector<std::pair<std::string, std::string>> bad{{"a", "zzz"}};
  EXPECT_THROW(confusion_matrix(bad, {"a", "b"}), Error);
}

TEST(ClassMetrics, DecisionMatrixMatchesHandArithmetic) {
  const ClassMetrics m = class_metrics(decision_matrix());
  // Hand arithmetic on the grid, class by class.
  double weighted = 0;
  std::int64_t total = 0;
  for (int k = 0; k < 5; ++k) {
    std::int64_t row = 0, col = 0;
    for (int j = 0; j < 5; ++j) {
      row += kDecisionGrid[k][j];
      col += kDecisionGrid[j][k];
    }
    const double p = static_cast<double>(kDecisionGrid[k][k]) / static_cast<double>(col);
    const double r = static_cast<double>(kDecisionGrid[k][k]) / static_cast<double>(row);
    const double f = p + r > 0 ? 2 * p * r / (p + r) : 0;
    EXPECT_NEAR(m.precision(k), p, 1e-12);
    EXPECT_NEAR(m.recall(k), r, 1e-12);
    EXPECT_NEAR(m.f_measure(k), f, 1e-12);
    weighted += f * static_cast<double>(row);
    total += row;
  }
  EXPECT_NEAR(m.weighted_avg.f_measure, weighted / static_cast<double>(total), 1e-12);
  const MetricTriple ignore = m.of(4);
  EXPECT_NEAR(ignore.precision, 0.969, 0.001);
  EXPECT_NEAR(ignore.recall, 0.978, 0.001);
  EXPECT_NEAR(ignore.f_measure, 0.973, 0.001);
  EXPECT_NEAR(m.weighted_avg.f_measure, 0.732, 0.005);
}

TEST(ClassMetrics, IdentityIsPerfect) {
  const ConfusionMatrix m =
      confusion_matrix({"a", "b", "c"}, CountMatrix::Identity(3, 3) * 7);
  const ClassMetrics cm = class_metrics(m);
  EXPECT_DOUBLE_EQ(cm.weighted_avg.f_measure, 1.0);
  EXPECT_DOUBLE_EQ(cm.unweighted_avg.precision, 1.0);
  EXPECT_DOUBLE_EQ(cm.unweighted_avg.recall, 1.0);
}

TEST(ClassMetrics, EmptyColumnsAndMatrix) {
  CountMatrix c(2, 2);
  c << 3, 0, 2, 0;
  const ClassMetrics cm = class_metrics(confusion_matrix({"a", "b"}, c));
  EXPECT_EQ(cm.precision(1), 0.0);
  EXPECT_EQ(cm.recall(1), 0.0);
  EXPECT_EQ(cm.f_measure(1), 0.0);
  EXPECT_THROW(class_metrics(confusion_matrix({"a", "b"}, CountMatrix::Zero(2, 2))), Error);
}

// Expected-count form, written out without matrix helpers.
double chi_oracle(double a, double b, double c, double d) {
  const double n = a + b + c + d;
  const double obs[4] = {a, b, c, d};
  const double exp[4] = {(a + b) * (a + c) / n, (a + b) * (b + d) / n,
                         (c + d) * (a + c) / n, (c + d) * (b + d) / n};
  double x = 0;
  for (int i = 0; i < 4; ++i) x += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
  return x;
}

TEST(ChiSquare, PublishedTables) {
  Table2x2 t;
  t << 52, 9, 12, 7;
  ChiSquareResult r = chi_square_2x2(t);
  EXPECT_NEAR(r.statistic, chi_oracle(52, 9, 12, 7), 1e-9);
  EXPECT_NEAR(r.statistic, 4.417, 0.01);
  EXPECT_NEAR(r.p_value, 0.036, 0.005);
  EXPECT_EQ(r.df, 1);

  t << 50, 11, 10, 9;
  r = chi_square_2x2(t);
  EXPECT_NEAR(r.statistic, chi_oracle(50, 11, 10, 9), 1e-9);
  EXPECT_NEAR(r.statistic, 6.64, 0.01);
  EXPECT_NEAR(r.p_value, 0.010, 0.003);
}

TEST(ChiSquare, IndependentAndDegenerate) {
  Table2x2 t;
  t << 10, 10, 10, 10;
  const ChiSquareResult r = chi_square_2x2(t);
  EXPECT_DOUBLE_EQ(r.statistic, 0.0);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0);
  t << 0, 0, 4, 5;
  EXPECT_THROW(chi_square_2x2(t), Error);
}

TEST(ChiSquare, TailMatchesKnownQuantiles) {
  EXPECT_NEAR(chi_square_sf_df1(3.841459), 0.05, 1e-6);
  EXPECT_NEAR(chi_square_sf_df1(6.634897), 0.01, 1e-6);
  EXPECT_DOUBLE_EQ(chi_square_sf_df1(0), 1.0);
}

TEST(Pearson, LinearAndErrors) {
  const std::vector<double> xs{1, 2, 3, 4, 7};
  std::vector<double> ys, neg;
  for (double x : xs) {
    ys.push_back(2 * x + 1);
    neg.push_back(-x);
  }
  EXPECT_NEAR(pearson_correlation(xs, ys), 1.0, 1e-12);
  EXPECT_NEAR(pearson_correlation(xs, neg), -1.0, 1e-12);
  EXPECT_THROW(pearson_correlation(xs, std::vector<double>{1, 2}), Error);
  EXPECT_THROW(pearson_correlation(xs, std::vector<double>(5, 3.0)), Error);
  EXPECT_THROW(pearson_correlation(std::vector<double>{1}, std::vector<double>{1}), Error);
}

TEST(Pearson, GeneratedSampleHitsTarget) {
  const auto [xs, ys] = correlated_sample(1452, 0.65, 3);
  EXPECT_NEAR(pearson_correlation(xs, ys), 0.65, 0.05);
}

TEST(PearsonProperty, InvariantUnderPositiveAffineMaps) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> scale(0.1, 10), shift(-50, 50);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> xs(20), ys(20), zs(20);
    for (int j = 0; j < 20; ++j) {
      xs[j] = n01(rng);
      ys[j] = xs[j] + n01(rng);
    }
    const double a = scale(rng), b = shift(rng);
    for (int j = 0; j < 20; ++j) zs[j] = a * ys[j] + b;
    const double r = pearson_correlation(xs, ys);
    EXPECT_NEAR(pearson_correlation(xs, zs), r, 1e-9);
    EXPECT_NEAR(pearson_correlation(ys, xs), r, 1e-12);
    EXPECT_LE(std::abs(r), 1.0 + 1e-12);
  }
}

}  // namespace
}  // namespace friendaudit
