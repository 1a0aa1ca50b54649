#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dirtybench {

/// Explicit missing-value marker. Serialized as an empty field.
struct Missing {
  bool operator==(const Missing&) const = default;
};

using Cell = std::variant<Missing, double, std::string>;

inline bool is_missing(const Cell& cell) { return std::holds_alternative<Missing>(cell); }

struct Record {
  std::vector<Cell> cells;

  bool operator==(const Record&) const = default;
};

enum class ColumnKind { numeric, categorical };
enum class ColumnRole { feature, target, entity_key };

std::string_view to_string(ColumnKind kind) noexcept;
std::string_view to_string(ColumnRole role) noexcept;

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  ColumnRole role = ColumnRole::feature;

  bool operator==(const Column&) const = default;
};

/// Column layout plus the target label dictionary.
///
/// Label indices used by every classifier and clustering evaluator are
/// positions in `labels()`, which keeps first-seen order of the clean data.
class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<Column> columns, std::vector<std::string> labels = {});

  std::span<const Column> columns() const { return columns_; }
  const Column& column(std::size_t i) const { return columns_.at(i); }
  std::size_t arity() const { return columns_.size(); }

  std::optional<std::size_t> target_index() const { return target_; }
  const std::vector<std::size_t>& feature_indices() const { return features_; }
  const std::vector<std::size_t>& entity_key_indices() const { return entity_key_; }

  /// n: number of feature columns.
  std::size_t feature_count() const { return features_.size(); }
  /// n_c: number of distinct target labels (0 for numeric targets).
  std::size_t class_count() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<int> label_index(std::string_view token) const;

  std::optional<std::size_t> index_of(std::string_view name) const;
  /// Throws a binding error naming the column when absent.
  std::size_t require_index(std::string_view name) const;

  bool operator==(const Schema& other) const {
    return columns_ == other.columns_ && labels_ == other.labels_;
  }

 private:
  std::vector<Column> columns_;
  std::vector<std::string> labels_;
  std::optional<std::size_t> target_;
  std::vector<std::size_t> features_;
  std::vector<std::size_t> entity_key_;
};

struct Provenance {
  std::string source;
  std::string content_hash;
};

/// Typed table with an immutable clean copy captured at load.
///
/// Derived (corrupted, imputed, fold) datasets share the clean copy and keep
/// an origin index per row so that ground truth can always be looked up in
/// the clean rows, even after rows were duplicated.
class Dataset {
 public:
  Dataset() = default;
  Dataset(Schema schema, std::vector<Record> rows, Provenance provenance = {});

  const Schema& schema() const { return schema_; }
  const std::vector<Record>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  const Record& row(std::size_t i) const { return rows_.at(i); }

  const std::vector<Record>& clean_shadow() const { return *clean_; }
  std::shared_ptr<const std::vector<Record>> clean_shadow_ptr() const { return clean_; }
  const std::vector<std::size_t>& origin() const { return origin_; }
  const Provenance& provenance() const { return provenance_; }

  /// A dataset with new rows that keeps this one's schema, clean copy and
  /// provenance. `origin[i]` is the clean row that row i derives from.
  Dataset derive(std::vector<Record> rows, std::vector<std::size_t> origin) const;
  /// Row subset (fold extraction); origins are carried along.
  Dataset subset(std::span<const std::size_t> indices) const;

  /// Clean ground-truth record for row i.
  const Record& clean_row(std::size_t i) const { return (*clean_)[origin_[i]]; }

  bool operator==(const Dataset& other) const;

 private:
  void validate() const;

  Schema schema_;
  std::vector<Record> rows_;
  std::shared_ptr<const std::vector<Record>> clean_ = std::make_shared<const std::vector<Record>>();
  std::vector<std::size_t> origin_;
  Provenance provenance_;
};

struct LoadOptions {
  char delimiter = ',';
  bool has_header = true;
  /// Required when the file carries no header row.
  std::optional<Schema> schema_hint;
  /// Target column name; defaults to the last column.
  std::optional<std::string> target;
  bool no_target = false;
  /// Treat the target as class labels even if every token is numeric.
  bool categorical_target = false;
  std::vector<std::string> entity_key;
  std::vector<std::string> missing_tokens{""};
};

Dataset parse_dataset(std::string_view text, const LoadOptions& options = {},
                      std::string source = "<memory>");
Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options = {});

/// Canonical delimited text: header row, trimmed fields, shortest
/// round-trip numbers, empty field for Missing, '\n' line endings.
std::string to_delimited(const Dataset& dataset, char delimiter = ',');
void save_dataset(const Dataset& dataset, const std::filesystem::path& path, char delimiter = ',');

/// FNV-1a hex digest of the canonical text.
std::string content_hash(const Dataset& dataset);

/// Shortest decimal string that parses back to the same double.
std::string format_number(double value);
std::string format_cell(const Cell& cell);

/// Functional-dependency style consistency rule `lhs -> rhs`, by name.
struct FDRule {
  std::vector<std::string> lhs;
  std::string rhs;

  bool operator==(const FDRule&) const = default;
};

/// FDRule resolved against a schema.
struct BoundRule {
  std::vector<std::size_t> lhs;
  std::size_t rhs = 0;
};

/// One rule per line, `A,B -> C`; blank lines and `#` comments skipped.
std::vector<FDRule> parse_fd_rules(std::string_view text);
std::vector<FDRule> load_fd_rules(const std::filesystem::path& path);
std::vector<BoundRule> bind_rules(std::span<const FDRule> rules, const Schema& schema);

struct ErrorRates {
  double missing = 0.0;
  double inconsistent = 0.0;
  double conflicting = 0.0;
};

struct DetectOptions {
  bool inconsistent = false;
  bool conflicting = false;
  /// Entity-identifying columns; empty means the schema's entity-key columns.
  std::vector<std::string> entity_key;
  /// Columns whose cells count towards the missing rate; empty means the
  /// feature columns.
  std::vector<std::string> columns;
};

/// Missing cells over eligible cells; fraction of rows inside an FD
/// violation group; fraction of rows inside an entity group whose non-key
/// values disagree.
ErrorRates detect_error_rates(const Dataset& dataset, std::span<const FDRule> rules,
                              const DetectOptions& options = {});

/// Row indices participating in at least one violation of `rules`.
std::vector<std::size_t> inconsistent_rows(const Dataset& dataset, std::span<const BoundRule> rules);
/// Row indices whose entity group (rows agreeing on `key`) disagrees on a
/// non-key column.
std::vector<std::size_t> conflicting_rows(const Dataset& dataset, std::span<const std::size_t> key);

}  // namespace dirtybench
