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

#include "chainrca/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace chainrca {

using nlohmann::json;

namespace {

constexpr int kModelFormatVersion = 1;

void check_dimension(const FeatureMatrix& rows) {
  if (rows.empty()) {
    throw std::invalid_argument("training data is empty");
  }
  const std::size_t dim = rows.front().size();
  for (const auto& row : rows) {
    if (row.size() != dim) {
      throw std::invalid_argument("inconsistent feature dimensions in training data");
    }
  }
}

json load_model_json(const std::string& path, const std::string& expected_type) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open model file: " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  json j;
  try {
    j = json::parse(buffer.str());
  } catch (const json::parse_error& e) {
    throw std::runtime_error("malformed model file " + path + " at byte " +
                             std::to_string(e.byte) + ": " + e.what());
  }
  if (j.value("type", "") != expected_type) {
    throw std::runtime_error("model file " + path + " is not a " + expected_type);
  }
  if (j.value("version", 0) != kModelFormatVersion) {
    throw std::runtime_error("unsupported model version in " + path);
  }
  return j;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  out << text;
}

}  // namespace

FeatureVector Standardizer::apply(const FeatureVector& v) const {
  if (v.size() != mean.size()) {
    throw std::invalid_argument("feature arity mismatch: expected " +
                                std::to_string(mean.size()) + ", got " + std::to_string(v.size()));
  }
  FeatureVector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = (v[i] - mean[i]) / stddev[i];
  }
  return out;
}

Standardizer Standardizer::fit(const FeatureMatrix& rows) {
  check_dimension(rows);
  const std::size_t dim = rows.front().size();
  const double n = static_cast<double>(rows.size());
  Standardizer s;
  s.mean.assign(dim, 0.0);
  s.stddev.assign(dim, 0.0);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < dim; ++i) s.mean[i] += row[i];
  }
  for (std::size_t i = 0; i < dim; ++i) s.mean[i] /= n;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double d = row[i] - s.mean[i];
      s.stddev[i] += d * d;
    }
  }
  for (std::size_t i = 0; i < dim; ++i) {
    s.stddev[i] = std::sqrt(s.stddev[i] / n);
    if (s.stddev[i] == 0.0) s.stddev[i] = 1.0;  // constant feature: leave centered values at 0
  }
  return s;
}

// ---------------------------------------------------------------------------
// One-class separator
// ---------------------------------------------------------------------------

namespace {

double rbf_kernel(const FeatureVector& a, const FeatureVector& b, double gamma) {
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sq += d * d;
  }
  return std::exp(-gamma * sq);
}

}  // namespace

OneClassSeparator OneClassSeparator::train(const FeatureMatrix& normal_cases,
                                           const TrainParams& params) {
  check_dimension(normal_cases);
  if (normal_cases.size() < 50) {
    throw std::invalid_argument("one-class training needs at least 50 cases");
  }
  if (params.nu <= 0.0 || params.nu > 1.0) {
    throw std::invalid_argument("nu must lie in (0, 1]");
  }

  OneClassSeparator model;
  model.dimension_ = normal_cases.front().size();
  model.nu_ = params.nu;
  model.standardizer_ = Standardizer::fit(normal_cases);

  // Shuffle the training order so the boxed initialization below does not
  // depend on how the caller sorted the corpus.
  std::vector<std::size_t> order(normal_cases.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(params.seed);
  std::shuffle(order.begin(), order.end(), rng);

  FeatureMatrix x;
  x.reserve(normal_cases.size());
  for (std::size_t idx : order) {
    x.push_back(model.standardizer_.apply(normal_cases[idx]));
  }
  const std::size_t n = x.size();
  const std::size_t dim = model.dimension_;

  double gamma = params.gamma;
  if (gamma <= 0.0) {
    // 1 / (dim * mean feature variance), measured after standardization.
    double var_sum = 0.0;
    for (std::size_t f = 0; f < dim; ++f) {
      double m = 0.0;
      for (const auto& row : x) m += row[f];
      m /= static_cast<double>(n);
      double v = 0.0;
      for (const auto& row : x) {
        const double d = row[f] - m;
        v += d * d;
      }
      var_sum += v / static_cast<double>(n);
    }
    const double mean_var = var_sum / static_cast<double>(dim);
    if (mean_var <= 0.0) {
      throw std::invalid_argument(
          "degenerate training data: all feature vectors are identical");
    }
    gamma = 1.0 / (static_cast<double>(dim) * mean_var);
  }
  model.gamma_ = gamma;

  // One-class dual: minimize 1/2 a'Ka subject to 0 <= a_i <= 1/(nu n) and
  // sum a_i = 1. Kernel rows are precomputed for the sizes this engine
  // trains at (a few thousand cases).
  const double upper = 1.0 / (params.nu * static_cast<double>(n));
  std::vector<std::vector<float>> kernel(n, std::vector<float>(n));
  for (std::size_t i = 0; i < n; ++i) {
    kernel[i][i] = 1.0f;
    for (std::size_t j = i + 1; j < n; ++j) {
      const float k = static_cast<float>(rbf_kernel(x[i], x[j], gamma));
      kernel[i][j] = k;
      kernel[j][i] = k;
    }
  }

  std::vector<double> alpha(n, 0.0);
  const auto boxed = static_cast<std::size_t>(params.nu * static_cast<double>(n));
  for (std::size_t i = 0; i < boxed; ++i) alpha[i] = upper;
  if (boxed < n) alpha[boxed] = 1.0 - static_cast<double>(boxed) * upper;

  // Gradient of the objective: g_i = sum_j alpha_j K_ij.
  std::vector<double> grad(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (alpha[j] == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) grad[i] += alpha[j] * kernel[i][j];
  }

  const double eps = 1e-12;
  for (int iter = 0; iter < params.max_iterations; ++iter) {
    // Most-violating pair: move weight from the highest gradient with
    // alpha > 0 onto the lowest gradient with alpha < upper.
    std::size_t hi = n, lo = n;
    double hi_g = -std::numeric_limits<double>::infinity();
    double lo_g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (alpha[i] > eps && grad[i] > hi_g) {
        hi_g = grad[i];
        hi = i;
      }
      if (alpha[i] < upper - eps && grad[i] < lo_g) {
        lo_g = grad[i];
        lo = i;
      }
    }
    if (hi == n || lo == n || hi_g - lo_g <= params.tolerance) {
      break;
    }
    const double quad =
        std::max(1e-12, static_cast<double>(kernel[hi][hi]) + kernel[lo][lo] - 2.0 * kernel[hi][lo]);
    double step = (hi_g - lo_g) / quad;
    step = std::min(step, alpha[hi]);
    step = std::min(step, upper - alpha[lo]);
    alpha[hi] -= step;
    alpha[lo] += step;
    for (std::size_t i = 0; i < n; ++i) {
      grad[i] += step * (static_cast<double>(kernel[i][lo]) - kernel[i][hi]);
    }
  }

  // rho from the KKT conditions: free vectors sit exactly on the boundary.
  double rho_sum = 0.0;
  std::size_t rho_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] > eps && alpha[i] < upper - eps) {
      rho_sum += grad[i];
      ++rho_count;
    }
  }
  if (rho_count > 0) {
    model.rho_ = rho_sum / static_cast<double>(rho_count);
  } else {
    double at_upper = -std::numeric_limits<double>::infinity();
    double at_zero = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (alpha[i] >= upper - eps) at_upper = std::max(at_upper, grad[i]);
      if (alpha[i] <= eps) at_zero = std::min(at_zero, grad[i]);
    }
    if (!std::isfinite(at_upper)) at_upper = at_zero;
    if (!std::isfinite(at_zero)) at_zero = at_upper;
    model.rho_ = 0.5 * (at_upper + at_zero);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] > eps) {
      model.support_vectors_.push_back(x[i]);
      model.alphas_.push_back(alpha[i]);
    }
  }
  return model;
}

double OneClassSeparator::decision(const FeatureVector& features) const {
  if (support_vectors_.empty()) {
    throw std::logic_error("one-class model is untrained");
  }
  const FeatureVector z = standardizer_.apply(features);
  double sum = 0.0;
  for (std::size_t i = 0; i < support_vectors_.size(); ++i) {
    sum += alphas_[i] * rbf_kernel(support_vectors_[i], z, gamma_);
  }
  return sum - rho_;
}

std::string OneClassSeparator::to_json_string() const {
  json j;
  j["version"] = kModelFormatVersion;
  j["type"] = "one_class_separator";
  j["dimension"] = dimension_;
  j["gamma"] = gamma_;
  j["nu"] = nu_;
  j["rho"] = rho_;
  j["alphas"] = alphas_;
  j["support_vectors"] = support_vectors_;
  j["standardizer"] = {{"mean", standardizer_.mean}, {"stddev", standardizer_.stddev}};
  return j.dump(2);
}

OneClassSeparator OneClassSeparator::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("malformed one-class model at byte " + std::to_string(e.byte) +
                             ": " + e.what());
  }
  OneClassSeparator m;
  m.dimension_ = j.at("dimension").get<std::size_t>();
  m.gamma_ = j.at("gamma").get<double>();
  m.nu_ = j.at("nu").get<double>();
  m.rho_ = j.at("rho").get<double>();
  m.alphas_ = j.at("alphas").get<std::vector<double>>();
  m.support_vectors_ = j.at("support_vectors").get<FeatureMatrix>();
  m.standardizer_.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
  m.standardizer_.stddev = j.at("standardizer").at("stddev").get<std::vector<double>>();
  if (m.alphas_.size() != m.support_vectors_.size()) {
    throw std::runtime_error("one-class model: alphas and support vectors disagree");
  }
  return m;
}

void OneClassSeparator::save(const std::string& path) const {
  write_text_file(path, to_json_string());
}

OneClassSeparator OneClassSeparator::load(const std::string& path) {
  const json j = load_model_json(path, "one_class_separator");
  return from_json_string(j.dump());
}

// ---------------------------------------------------------------------------
// Random forest
// ---------------------------------------------------------------------------

bool ForestClassifier::Tree::predict(const FeatureVector& features) const {
  int node = 0;
  while (!nodes[static_cast<std::size_t>(node)].leaf) {
    const Node& n = nodes[static_cast<std::size_t>(node)];
    node = features[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(node)].label;
}

struct ForestTrainer {
  const FeatureMatrix& x;
  const std::vector<bool>& y;
  std::size_t dim;
  int max_depth;

  ForestClassifier::Tree build_tree(std::vector<std::size_t> sample) const {
    ForestClassifier::Tree tree;
    grow(tree, std::move(sample), 0);
    return tree;
  }

  static double gini(std::size_t pos, std::size_t total) {
    if (total == 0) return 0.0;
    const double p = static_cast<double>(pos) / static_cast<double>(total);
    return 2.0 * p * (1.0 - p);
  }

  int grow(ForestClassifier::Tree& tree, std::vector<std::size_t> indices, int depth) const {
    std::size_t pos = 0;
    for (std::size_t i : indices) pos += y[i] ? 1 : 0;
    const std::size_t total = indices.size();

    const auto make_leaf = [&]() {
      ForestClassifier::Node leaf;
      leaf.leaf = true;
      leaf.label = pos * 2 > total;  // ties predict non-anomalous
      tree.nodes.push_back(leaf);
      return static_cast<int>(tree.nodes.size()) - 1;
    };

    if (depth >= max_depth || pos == 0 || pos == total || total < 2) {
      return make_leaf();
    }

    // Best axis-aligned split by Gini impurity; thresholds are midpoints
    // between consecutive distinct values. Ties keep the first (lowest
    // feature index, lowest threshold) for determinism.
    double best_score = std::numeric_limits<double>::infinity();
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::pair<double, bool>> column(total);
    for (std::size_t f = 0; f < dim; ++f) {
      for (std::size_t i = 0; i < total; ++i) {
        column[i] = {x[indices[i]][f], y[indices[i]]};
      }
      std::sort(column.begin(), column.end());
      std::size_t left_pos = 0;
      for (std::size_t i = 0; i + 1 < total; ++i) {
        left_pos += column[i].second ? 1 : 0;
        if (column[i].first == column[i + 1].first) continue;
        const std::size_t left_n = i + 1;
        const std::size_t right_n = total - left_n;
        const double score =
            (static_cast<double>(left_n) * gini(left_pos, left_n) +
             static_cast<double>(right_n) * gini(pos - left_pos, right_n)) /
            static_cast<double>(total);
        if (score + 1e-12 < best_score) {
          best_score = score;
          best_feature = static_cast<int>(f);
          best_threshold = column[i].first + 0.5 * (column[i + 1].first - column[i].first);
        }
      }
    }
    if (best_feature < 0) {
      return make_leaf();  // all rows identical across features
    }

    std::vector<std::size_t> left, right;
    for (std::size_t i : indices) {
      (x[i][static_cast<std::size_t>(best_feature)] <= best_threshold ? left : right)
          .push_back(i);
    }
    if (left.empty() || right.empty()) {
      return make_leaf();
    }

    ForestClassifier::Node node;
    node.feature = best_feature;
    node.threshold = best_threshold;
    tree.nodes.push_back(node);
    const int self = static_cast<int>(tree.nodes.size()) - 1;
    const int left_child = grow(tree, std::move(left), depth + 1);
    const int right_child = grow(tree, std::move(right), depth + 1);
    tree.nodes[static_cast<std::size_t>(self)].left = left_child;
    tree.nodes[static_cast<std::size_t>(self)].right = right_child;
    return self;
  }
};

ForestClassifier ForestClassifier::train(const FeatureMatrix& features,
                                         const std::vector<bool>& labels,
                                         const TrainParams& params) {
  check_dimension(features);
  if (features.size() != labels.size()) {
    throw std::invalid_argument("features and labels differ in length");
  }
  if (features.size() < 50) {
    throw std::invalid_argument("forest training needs at least 50 cases");
  }
  const bool has_pos = std::find(labels.begin(), labels.end(), true) != labels.end();
  const bool has_neg = std::find(labels.begin(), labels.end(), false) != labels.end();
  if (!has_pos || !has_neg) {
    throw std::invalid_argument("forest training needs both classes present");
  }
  if (params.n_trees < 1 || params.max_depth < 1) {
    throw std::invalid_argument("n_trees and max_depth must be positive");
  }

  ForestClassifier model;
  model.dimension_ = features.front().size();
  model.max_depth_ = params.max_depth;
  model.seed_ = params.seed;

  ForestTrainer trainer{features, labels, model.dimension_, params.max_depth};
  const std::size_t n = features.size();
  for (int t = 0; t < params.n_trees; ++t) {
    // Per-tree bootstrap seed derives from the master seed so the result is
    // independent of any training-order scheduling.
    std::mt19937_64 rng(params.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(t + 1));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> sample(n);
    for (std::size_t i = 0; i < n; ++i) sample[i] = pick(rng);
    model.trees_.push_back(trainer.build_tree(std::move(sample)));
  }
  return model;
}

double ForestClassifier::vote_fraction(const FeatureVector& features) const {
  if (trees_.empty()) {
    throw std::logic_error("forest model is untrained");
  }
  if (features.size() != dimension_) {
    throw std::invalid_argument("feature arity mismatch: expected " +
                                std::to_string(dimension_) + ", got " +
                                std::to_string(features.size()));
  }
  std::size_t votes = 0;
  for (const Tree& tree : trees_) {
    votes += tree.predict(features) ? 1 : 0;
  }
  return static_cast<double>(votes) / static_cast<double>(trees_.size());
}

bool ForestClassifier::predict(const FeatureVector& features) const {
  return vote_fraction(features) > 0.5;
}

std::string ForestClassifier::to_json_string() const {
  json trees = json::array();
  for (const Tree& tree : trees_) {
    json nodes = json::array();
    for (const Node& n : tree.nodes) {
      if (n.leaf) {
        nodes.push_back({{"leaf", true}, {"label", n.label}});
      } else {
        nodes.push_back(
            {{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right}});
      }
    }
    trees.push_back({{"nodes", nodes}});
  }
  json j;
  j["version"] = kModelFormatVersion;
  j["type"] = "random_forest";
  j["dimension"] = dimension_;
  j["max_depth"] = max_depth_;
  j["seed"] = seed_;
  j["trees"] = trees;
  return j.dump(2);
}

ForestClassifier ForestClassifier::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("malformed forest model at byte " + std::to_string(e.byte) + ": " +
                             e.what());
  }
  ForestClassifier m;
  m.dimension_ = j.at("dimension").get<std::size_t>();
  m.max_depth_ = j.at("max_depth").get<int>();
  m.seed_ = j.at("seed").get<std::uint64_t>();
  for (const json& jt : j.at("trees")) {
    Tree tree;
    for (const json& jn : jt.at("nodes")) {
      Node n;
      if (jn.value("leaf", false)) {
        n.leaf = true;
        n.label = jn.at("label").get<bool>();
      } else {
        n.feature = jn.at("feature").get<int>();
        n.threshold = jn.at("threshold").get<double>();
        n.left = jn.at("left").get<int>();
        n.right = jn.at("right").get<int>();
      }
      tree.nodes.push_back(n);
    }
    if (tree.nodes.empty()) {
      throw std::runtime_error("forest model contains an empty tree");
    }
    m.trees_.push_back(std::move(tree));
  }
  if (m.trees_.empty()) {
    throw std::runtime_error("forest model contains no trees");
  }
  return m;
}

void ForestClassifier::save(const std::string& path) const {
  write_text_file(path, to_json_string());
}

ForestClassifier ForestClassifier::load(const std::string& path) {
  const json j = load_model_json(path, "random_forest");
  return from_json_string(j.dump());
}

ClassificationMetrics ClassificationMetrics::from_counts(std::size_t tp, std::size_t fp,
                                                         std::size_t tn, std::size_t fn) {
  ClassificationMetrics m;
  m.true_positives = tp;
  m.false_positives = fp;
  m.true_negatives = tn;
  m.false_negatives = fn;
  m.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  m.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  m.f1 = m.recall + m.precision > 0.0 ? 2.0 * m.recall * m.precision / (m.recall + m.precision)
                                      : 0.0;
  m.fpr = fp + tn > 0 ? static_cast<double>(fp) / static_cast<double>(fp + tn) : 0.0;
  return m;
}

}  // namespace chainrca
