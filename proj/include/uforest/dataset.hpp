#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uforest/error.hpp"

namespace uforest {

using ClassLabel = int;

/// Dense row-major n x d matrix of real features.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_) throw InputError("feature matrix: value count does not match shape");
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const noexcept { return {values_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) noexcept { return {values_.data() + r * cols_, cols_}; }

  std::span<const double> values() const noexcept { return values_; }

  FeatureMatrix select_rows(std::span<const std::size_t> rows) const {
    FeatureMatrix out(rows.size(), cols_);
    for (std::size_t i = 0; i < rows.size(); ++i) std::ranges::copy(row(rows[i]), out.row(i).begin());
    return out;
  }

  FeatureMatrix select_cols(std::span<const std::size_t> cols) const {
    FeatureMatrix out(rows_, cols.size());
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t j = 0; j < cols.size(); ++j) out(r, j) = (*this)(r, cols[j]);
    return out;
  }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Features plus optional categorical labels with dense codes 0..K-1.
struct LabeledDataset {
  FeatureMatrix features;
  std::vector<std::string> feature_names;
  std::optional<std::vector<ClassLabel>> labels;
  std::vector<std::string> label_names;
  std::string label_column = "y";

  std::size_t size() const noexcept { return features.rows(); }
  std::size_t dim() const noexcept { return features.cols(); }
  bool labeled() const noexcept { return labels.has_value(); }
  std::size_t num_classes() const noexcept { return label_names.size(); }

  const std::vector<ClassLabel>& require_labels() const {
    if (!labels) throw InputError("dataset is unlabeled");
    return *labels;
  }

  /// Throws InputError when shapes, codes or values violate the dataset invariants.
  void validate() const {
    if (feature_names.size() != dim()) throw InputError("dataset: feature name count does not match dimension");
    for (double v : features.values())
      if (!std::isfinite(v)) throw InputError("dataset: non-finite feature value");
    if (labels) {
      if (labels->size() != size()) throw InputError("dataset: label count does not match row count");
      for (ClassLabel y : *labels)
        if (y < 0 || static_cast<std::size_t>(y) >= num_classes())
          throw InputError("dataset: label code outside [0, K)");
    }
  }

  LabeledDataset select_rows(std::span<const std::size_t> rows) const {
    LabeledDataset out{features.select_rows(rows), feature_names, std::nullopt, label_names, label_column};
    if (labels) {
      std::vector<ClassLabel> ys(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) ys[i] = (*labels)[rows[i]];
      out.labels = std::move(ys);
    }
    return out;
  }

  LabeledDataset select_features(std::span<const std::size_t> cols) const {
    std::vector<std::string> names;
    names.reserve(cols.size());
    for (std::size_t c : cols) names.push_back(feature_names.at(c));
    return {features.select_cols(cols), std::move(names), labels, label_names, label_column};
  }

  /// Index of a named feature column; InputError if absent.
  std::size_t feature_index(const std::string& name) const {
    const auto it = std::ranges::find(feature_names, name);
    if (it == feature_names.end()) throw InputError("unknown feature '" + name + "'");
    return static_cast<std::size_t>(it - feature_names.begin());
  }

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;
};

/// Class counts of a label vector over K classes.
inline std::vector<std::size_t> class_counts(std::span<const ClassLabel> labels, std::size_t num_classes) {
  std::vector<std::size_t> counts(num_classes, 0);
  for (ClassLabel y : labels) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

}  // namespace uforest
