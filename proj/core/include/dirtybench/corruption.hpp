#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dirtybench/dataset.hpp"

namespace dirtybench {

enum class ErrorType { missing, inconsistent, conflicting };

std::string_view to_string(ErrorType type) noexcept;
ErrorType error_type_from_string(std::string_view name);

struct CorruptionSpec {
  ErrorType error_type = ErrorType::missing;
  /// Fraction of cells (missing) or rows (inconsistent, conflicting).
  double rate = 0.0;
  std::uint64_t seed = 0;
  /// Eligible columns by name. Empty means every feature column, plus the
  /// target when `corrupt_target_in_train` is set.
  std::vector<std::string> column_mask;
  bool corrupt_target_in_train = false;
  /// Consistency rules (inconsistent only).
  std::vector<FDRule> rules;
  /// Entity-identifying columns (conflicting only). Empty means the
  /// schema's entity-key columns.
  std::vector<std::string> entity_key;
};

/// Throws a configuration error when the spec cannot apply to `schema`.
void validate(const CorruptionSpec& spec, const Schema& schema);

/// Column indices that injection may alter.
std::vector<std::size_t> eligible_columns(const CorruptionSpec& spec, const Schema& schema);

/// Sets exactly round(rate x eligible cells) uniformly chosen cells to Missing.
Dataset inject_missing(const Dataset& dataset, const CorruptionSpec& spec);

/// Rewrites the rhs of round(rate x rows) chosen rows so that each one
/// violates a rule against a row sharing its lhs values. A partner row is
/// appended (a copy of the untouched row) when no such sharer exists.
Dataset inject_inconsistent(const Dataset& dataset, const CorruptionSpec& spec);

/// Rewrites one non-key value in round(rate x rows) chosen rows so that
/// their entity group disagrees. Singleton groups get a duplicate first.
Dataset inject_conflicting(const Dataset& dataset, const CorruptionSpec& spec);

/// Dispatches on spec.error_type.
Dataset inject(const Dataset& dataset, const CorruptionSpec& spec);

struct InjectionSummary {
  std::size_t rows_before = 0;
  std::size_t rows_after = 0;
  /// Cells set to Missing (missing) or rows that differ from their origin row.
  std::size_t changed = 0;
  /// Eligible cells (missing) or original rows (inconsistent, conflicting).
  std::size_t denominator = 0;
  double achieved_rate = 0.0;
};

/// Compares an injected dataset with the dataset it was derived from.
InjectionSummary summarize_injection(const Dataset& before, const Dataset& after, const CorruptionSpec& spec);

/// Column fill values (mean for numeric, mode for categorical) learned from
/// one dataset and applicable to another with the same schema.
class Imputer {
 public:
  /// Columns with no observed value get no fill; applying the imputer to a
  /// Missing cell in such a column throws imputation_impossible.
  static Imputer fit(const Dataset& dataset);

  Dataset apply(const Dataset& dataset) const;

  const std::vector<std::optional<Cell>>& fills() const { return fills_; }

 private:
  std::vector<std::optional<Cell>> fills_;
  std::vector<std::string> names_;
};

/// Mean/mode imputation of a dataset with its own statistics. Mode ties go
/// to the value seen first.
Dataset impute(const Dataset& dataset);

}  // namespace dirtybench
