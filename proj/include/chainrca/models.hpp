/*
 * Copyright 2026 The chainrca Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace chainrca {

using FeatureVector = std::vector<double>;
using FeatureMatrix = std::vector<FeatureVector>;

/// Per-feature z-scoring fitted on training data. Constant features keep a
/// unit divisor so transformed values stay finite.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;

  FeatureVector apply(const FeatureVector& v) const;
  static Standardizer fit(const FeatureMatrix& rows);
};

/// One-class separator over normal-only training data: RBF kernel, trained
/// with sequential minimal optimization on the one-class dual. A vector is an
/// outlier when the decision function is negative.
class OneClassSeparator {
 public:
  struct TrainParams {
    double nu = 0.05;      // upper bound on the training outlier fraction
    double gamma = 0.0;    // RBF width; <= 0 selects 1/(dim * mean feature variance)
    double tolerance = 1e-4;
    int max_iterations = 10000;
    std::uint64_t seed = 0;
  };

  static OneClassSeparator train(const FeatureMatrix& normal_cases, const TrainParams& params);

  /// Sum_i alpha_i * K(sv_i, x) - rho on the standardized input.
  double decision(const FeatureVector& features) const;
  bool is_outlier(const FeatureVector& features) const { return decision(features) < 0.0; }

  std::size_t dimension() const { return dimension_; }
  std::size_t support_vector_count() const { return support_vectors_.size(); }
  double gamma() const { return gamma_; }
  double nu() const { return nu_; }
  double rho() const { return rho_; }

  std::string to_json_string() const;
  static OneClassSeparator from_json_string(const std::string& text);

  void save(const std::string& path) const;
  static OneClassSeparator load(const std::string& path);

 private:
  std::size_t dimension_ = 0;
  double gamma_ = 0.0;
  double nu_ = 0.0;
  double rho_ = 0.0;
  FeatureMatrix support_vectors_;  // standardized
  std::vector<double> alphas_;
  Standardizer standardizer_;
};

/// Random forest of axis-aligned binary decision trees (Gini impurity,
/// bootstrap sampling, majority vote; ties predict non-anomalous).
class ForestClassifier {
 public:
  struct TrainParams {
    int n_trees = 50;
    int max_depth = 6;
    std::uint64_t seed = 0;
  };

  static ForestClassifier train(const FeatureMatrix& features, const std::vector<bool>& labels,
                                const TrainParams& params);

  bool predict(const FeatureVector& features) const;
  /// Fraction of trees voting anomalous.
  double vote_fraction(const FeatureVector& features) const;

  std::size_t dimension() const { return dimension_; }
  int tree_count() const { return static_cast<int>(trees_.size()); }

  std::string to_json_string() const;
  static ForestClassifier from_json_string(const std::string& text);

  void save(const std::string& path) const;
  static ForestClassifier load(const std::string& path);

 private:
  // Flat node layout: leaves carry label, internal nodes carry a split.
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    bool leaf = false;
    bool label = false;
  };
  struct Tree {
    std::vector<Node> nodes;
    bool predict(const FeatureVector& features) const;
  };

  friend struct ForestTrainer;

  std::size_t dimension_ = 0;
  int max_depth_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<Tree> trees_;
};

/// Binary-classification quality summary (the columns reported for the
/// trained detectors: recall, precision, F1 and false positive rate).
struct ClassificationMetrics {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  double fpr = 0.0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t true_negatives = 0;
  std::size_t false_negatives = 0;

  static ClassificationMetrics from_counts(std::size_t tp, std::size_t fp, std::size_t tn,
                                           std::size_t fn);
};

}  // namespace chainrca
