#include "dirtybench/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dirtybench/error.hpp"

namespace dirtybench {

namespace {

const double kHalfSqrt2 = std::sqrt(0.5);

[[noreturn]] void missing_cell(const Schema& schema, std::size_t column) {
  throw Error(ErrorCode::type, "missing value in column '" + schema.column(column).name + "'; impute first");
}

int label_of(const Schema& schema, const Cell& cell, std::size_t column) {
  if (is_missing(cell)) throw Error(ErrorCode::type, "missing class label in '" + schema.column(column).name + "'");
  auto idx = schema.label_index(format_cell(cell));
  if (!idx) throw Error(ErrorCode::schema, "unknown class label '" + format_cell(cell) + "'");
  return *idx;
}

}  // namespace

Points Points::from_rows(const std::vector<std::vector<double>>& rows) {
  Points p;
  if (rows.empty()) return p;
  p.dim = rows.front().size();
  p.values.reserve(rows.size() * p.dim);
  for (const auto& r : rows) {
    if (r.size() != p.dim) throw Error(ErrorCode::schema, "ragged point rows");
    p.values.insert(p.values.end(), r.begin(), r.end());
  }
  return p;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double distance(std::span<const double> a, std::span<const double> b) { return std::sqrt(squared_distance(a, b)); }

FeatureEncoder FeatureEncoder::fit(const Dataset& dataset) {
  const Schema& schema = dataset.schema();
  FeatureEncoder enc;
  enc.arity_ = schema.arity();
  for (std::size_t c : schema.feature_indices()) {
    Block b;
    b.column = c;
    b.offset = enc.dimension_;
    if (schema.column(c).kind == ColumnKind::categorical) {
      b.categorical = true;
      for (const Record& rec : dataset.rows()) {
        if (const auto* s = std::get_if<std::string>(&rec.cells[c])) {
          if (std::find(b.categories.begin(), b.categories.end(), *s) == b.categories.end()) {
            b.categories.push_back(*s);
          }
        }
      }
      enc.dimension_ += b.categories.size() + 1;
    } else {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (const Record& rec : dataset.rows()) {
        if (const auto* v = std::get_if<double>(&rec.cells[c])) {
          lo = std::min(lo, *v);
          hi = std::max(hi, *v);
        }
      }
      b.min = std::isfinite(lo) ? lo : 0.0;
      b.range = std::isfinite(lo) ? hi - lo : 0.0;
      enc.dimension_ += 1;
    }
    enc.blocks_.push_back(std::move(b));
  }
  return enc;
}

void FeatureEncoder::encode(const Record& record, std::span<double> out) const {
  if (record.cells.size() != arity_) throw Error(ErrorCode::schema, "record arity does not match the encoder");
  for (const Block& b : blocks_) {
    const Cell& cell = record.cells[b.column];
    if (b.categorical) {
      const auto* s = std::get_if<std::string>(&cell);
      if (!s) throw Error(ErrorCode::type, "missing categorical value; impute first");
      std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(b.offset), b.categories.size() + 1, 0.0);
      auto it = std::find(b.categories.begin(), b.categories.end(), *s);
      const std::size_t slot = static_cast<std::size_t>(it - b.categories.begin());
      out[b.offset + slot] = kHalfSqrt2;
    } else {
      const auto* v = std::get_if<double>(&cell);
      if (!v) throw Error(ErrorCode::type, "missing numeric value; impute first");
      out[b.offset] = b.range > 0.0 ? (*v - b.min) / b.range : 0.0;
    }
  }
}

std::vector<double> FeatureEncoder::encode(const Record& record) const {
  std::vector<double> out(dimension_);
  encode(record, out);
  return out;
}

Points FeatureEncoder::encode_all(const Dataset& dataset) const {
  Points p(dataset.size(), dimension_);
  for (std::size_t i = 0; i < dataset.size(); ++i) encode(dataset.row(i), p.row(i));
  return p;
}

Discretizer Discretizer::fit(const Dataset& dataset, std::size_t numeric_bins) {
  if (numeric_bins == 0) throw Error(ErrorCode::parameter, "need at least one bin");
  const Schema& schema = dataset.schema();
  Discretizer d;
  d.bins_ = numeric_bins;
  for (std::size_t c : schema.feature_indices()) {
    Block b;
    b.column = c;
    if (schema.column(c).kind == ColumnKind::categorical) {
      b.categorical = true;
      for (const Record& rec : dataset.rows()) {
        if (const auto* s = std::get_if<std::string>(&rec.cells[c])) {
          if (std::find(b.categories.begin(), b.categories.end(), *s) == b.categories.end()) {
            b.categories.push_back(*s);
          }
        }
      }
      d.cardinalities_.push_back(b.categories.size() + 1);
    } else {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (const Record& rec : dataset.rows()) {
        if (const auto* v = std::get_if<double>(&rec.cells[c])) {
          lo = std::min(lo, *v);
          hi = std::max(hi, *v);
        }
      }
      b.min = std::isfinite(lo) ? lo : 0.0;
      b.width = std::isfinite(lo) ? (hi - lo) / static_cast<double>(numeric_bins) : 0.0;
      d.cardinalities_.push_back(numeric_bins);
    }
    d.blocks_.push_back(std::move(b));
  }
  return d;
}

std::vector<int> Discretizer::encode(const Record& record) const {
  std::vector<int> out;
  out.reserve(blocks_.size());
  for (const Block& b : blocks_) {
    const Cell& cell = record.cells.at(b.column);
    if (b.categorical) {
      const auto* s = std::get_if<std::string>(&cell);
      if (!s) throw Error(ErrorCode::type, "missing categorical value; impute first");
      auto it = std::find(b.categories.begin(), b.categories.end(), *s);
      out.push_back(static_cast<int>(it - b.categories.begin()));
    } else {
      const auto* v = std::get_if<double>(&cell);
      if (!v) throw Error(ErrorCode::type, "missing numeric value; impute first");
      long bin = 0;
      if (b.width > 0.0) bin = static_cast<long>(std::floor((*v - b.min) / b.width));
      bin = std::clamp(bin, 0L, static_cast<long>(bins_) - 1);
      out.push_back(static_cast<int>(bin));
    }
  }
  return out;
}

void require_classification(const Schema& schema) {
  auto t = schema.target_index();
  if (!t || schema.column(*t).kind != ColumnKind::categorical || schema.class_count() == 0) {
    throw Error(ErrorCode::schema, "dataset has no categorical target with class labels");
  }
}

std::vector<int> class_labels(const Dataset& dataset) {
  require_classification(dataset.schema());
  const std::size_t t = *dataset.schema().target_index();
  std::vector<int> out;
  out.reserve(dataset.size());
  for (const Record& rec : dataset.rows()) out.push_back(label_of(dataset.schema(), rec.cells[t], t));
  return out;
}

std::vector<int> clean_class_labels(const Dataset& dataset) {
  require_classification(dataset.schema());
  const std::size_t t = *dataset.schema().target_index();
  std::vector<int> out;
  out.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    out.push_back(label_of(dataset.schema(), dataset.clean_row(i).cells[t], t));
  }
  return out;
}

namespace {

std::vector<double> targets_of(const Dataset& dataset, bool clean) {
  auto t = dataset.schema().target_index();
  if (!t || dataset.schema().column(*t).kind != ColumnKind::numeric) {
    throw Error(ErrorCode::schema, "dataset has no numeric target");
  }
  std::vector<double> out;
  out.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const Record& rec = clean ? dataset.clean_row(i) : dataset.row(i);
    const auto* v = std::get_if<double>(&rec.cells[*t]);
    if (!v) missing_cell(dataset.schema(), *t);
    out.push_back(*v);
  }
  return out;
}

}  // namespace

std::vector<double> numeric_targets(const Dataset& dataset) { return targets_of(dataset, false); }
std::vector<double> clean_numeric_targets(const Dataset& dataset) { return targets_of(dataset, true); }

}  // namespace dirtybench
