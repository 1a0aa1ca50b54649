#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dirtybench/dataset.hpp"

namespace dirtybench {

/// Dense row-major point matrix.
struct Points {
  std::size_t dim = 0;
  std::vector<double> values;

  Points() = default;
  Points(std::size_t n, std::size_t d) : dim(d), values(n * d, 0.0) {}

  std::size_t size() const { return dim == 0 ? 0 : values.size() / dim; }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * dim, dim}; }
  std::span<double> row(std::size_t i) { return {values.data() + i * dim, dim}; }

  static Points from_rows(const std::vector<std::vector<double>>& rows);
};

double squared_distance(std::span<const double> a, std::span<const double> b);
/// Euclidean distance.
double distance(std::span<const double> a, std::span<const double> b);

/// Maps feature columns to Euclidean coordinates.
///
/// Numeric columns are min-max scaled to [0, 1] with bounds from the fitting
/// data (constant columns map to 0). Categorical columns become a one-hot
/// block scaled by 1/sqrt(2), with one extra slot for values unseen at fit
/// time, so the squared distance between two different categories is
/// exactly 1 and identical categories contribute 0 (overlap distance).
class FeatureEncoder {
 public:
  static FeatureEncoder fit(const Dataset& dataset);

  std::size_t dimension() const { return dimension_; }
  std::size_t arity() const { return arity_; }

  /// Throws a type error for Missing cells; impute first.
  void encode(const Record& record, std::span<double> out) const;
  std::vector<double> encode(const Record& record) const;
  Points encode_all(const Dataset& dataset) const;

 private:
  struct Block {
    std::size_t column = 0;
    bool categorical = false;
    double min = 0.0;
    double range = 0.0;
    std::vector<std::string> categories;
    std::size_t offset = 0;
  };

  std::vector<Block> blocks_;
  std::size_t dimension_ = 0;
  std::size_t arity_ = 0;
};

/// Discrete codes for the Bayes classifiers: numeric features go to
/// `numeric_bins` equal-width bins over the fitting range (values outside
/// are clamped); categorical features get one code per fitted category plus
/// a trailing code for unseen values.
class Discretizer {
 public:
  static Discretizer fit(const Dataset& dataset, std::size_t numeric_bins = 10);

  std::size_t feature_count() const { return blocks_.size(); }
  const std::vector<std::size_t>& cardinalities() const { return cardinalities_; }

  std::vector<int> encode(const Record& record) const;

 private:
  struct Block {
    std::size_t column = 0;
    bool categorical = false;
    double min = 0.0;
    double width = 0.0;
    std::vector<std::string> categories;
  };

  std::vector<Block> blocks_;
  std::vector<std::size_t> cardinalities_;
  std::size_t bins_ = 10;
};

/// Class index of every row's target; throws for Missing or unknown labels.
std::vector<int> class_labels(const Dataset& dataset);
/// Class index of every row's clean ground-truth target.
std::vector<int> clean_class_labels(const Dataset& dataset);
/// Numeric target of every row; throws for Missing.
std::vector<double> numeric_targets(const Dataset& dataset);
std::vector<double> clean_numeric_targets(const Dataset& dataset);

/// Throws unless the schema describes a classification problem.
void require_classification(const Schema& schema);

}  // namespace dirtybench
