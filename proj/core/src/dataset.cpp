#include "dirtybench/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "dirtybench/error.hpp"
#include "dirtybench/random.hpp"

namespace dirtybench {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view token) {
  if (token.empty()) return std::nullopt;
  if (token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

// Splits one line on `delim`, honouring double-quoted fields with "" escapes.
std::vector<std::string> split_fields(std::string_view line, char delim) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"' && trim(current).empty()) {
      current.clear();
      quoted = true;
      was_quoted = true;
    } else if (c == delim) {
      fields.push_back(was_quoted ? current : std::string(trim(current)));
      current.clear();
      was_quoted = false;
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(was_quoted ? current : std::string(trim(current)));
  return fields;
}

std::string quote_if_needed(const std::string& field, char delim) {
  if (field.find_first_of(std::string{delim, '"', '\n', '\r'}) == std::string::npos &&
      trim(field).size() == field.size()) {
    return field;
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

struct Line {
  std::size_t number;
  std::vector<std::string> fields;
};

// Composite grouping key for a set of cells; nullopt if any is missing.
std::optional<std::string> group_key(const Record& record, std::span<const std::size_t> columns) {
  std::string key;
  for (std::size_t c : columns) {
    const Cell& cell = record.cells[c];
    if (is_missing(cell)) return std::nullopt;
    key += format_cell(cell);
    key.push_back('\x1f');
  }
  return key;
}

}  // namespace

std::string_view to_string(ColumnKind kind) noexcept {
  return kind == ColumnKind::numeric ? "numeric" : "categorical";
}

std::string_view to_string(ColumnRole role) noexcept {
  switch (role) {
    case ColumnRole::feature: return "feature";
    case ColumnRole::target: return "target";
    case ColumnRole::entity_key: return "entity-key";
  }
  return "feature";
}

Schema::Schema(std::vector<Column> columns, std::vector<std::string> labels)
    : columns_(std::move(columns)), labels_(std::move(labels)) {
  std::unordered_set<std::string> names;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const Column& col = columns_[i];
    if (col.name.empty()) throw Error(ErrorCode::schema, "column " + std::to_string(i) + " has an empty name");
    if (!names.insert(col.name).second) throw Error(ErrorCode::schema, "duplicate column name '" + col.name + "'");
    switch (col.role) {
      case ColumnRole::feature: features_.push_back(i); break;
      case ColumnRole::entity_key: entity_key_.push_back(i); break;
      case ColumnRole::target:
        if (target_) throw Error(ErrorCode::schema, "more than one target column");
        target_ = i;
        break;
    }
  }
  if (features_.empty()) throw Error(ErrorCode::schema, "schema has no feature columns");
  if (!labels_.empty() && (!target_ || columns_[*target_].kind != ColumnKind::categorical)) {
    throw Error(ErrorCode::schema, "class labels require a categorical target column");
  }
}

std::optional<int> Schema::label_index(std::string_view token) const {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == token) return static_cast<int>(i);
  }
  return std::nullopt;
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Schema::require_index(std::string_view name) const {
  if (auto idx = index_of(name)) return *idx;
  throw Error(ErrorCode::binding, "unknown column '" + std::string(name) + "'");
}

Dataset::Dataset(Schema schema, std::vector<Record> rows, Provenance provenance)
    : schema_(std::move(schema)), rows_(std::move(rows)), provenance_(std::move(provenance)) {
  validate();
  clean_ = std::make_shared<const std::vector<Record>>(rows_);
  origin_.resize(rows_.size());
  std::iota(origin_.begin(), origin_.end(), std::size_t{0});
}

Dataset Dataset::derive(std::vector<Record> rows, std::vector<std::size_t> origin) const {
  if (rows.size() != origin.size()) {
    throw Error(ErrorCode::schema, "derived dataset needs one origin index per row");
  }
  Dataset out;
  out.schema_ = schema_;
  out.rows_ = std::move(rows);
  out.clean_ = clean_;
  out.origin_ = std::move(origin);
  out.provenance_ = provenance_;
  for (std::size_t o : out.origin_) {
    if (o >= clean_->size()) throw Error(ErrorCode::schema, "origin index out of range");
  }
  out.validate();
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<Record> rows;
  std::vector<std::size_t> origin;
  rows.reserve(indices.size());
  origin.reserve(indices.size());
  for (std::size_t i : indices) {
    rows.push_back(rows_.at(i));
    origin.push_back(origin_.at(i));
  }
  Dataset out;
  out.schema_ = schema_;
  out.rows_ = std::move(rows);
  out.clean_ = clean_;
  out.origin_ = std::move(origin);
  out.provenance_ = provenance_;
  return out;
}

bool Dataset::operator==(const Dataset& other) const {
  return schema_ == other.schema_ && rows_ == other.rows_ && content_hash(*this) == content_hash(other);
}

void Dataset::validate() const {
  const std::size_t arity = schema_.arity();
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const Record& rec = rows_[r];
    if (rec.cells.size() != arity) {
      throw Error(ErrorCode::schema, "row " + std::to_string(r) + " has " + std::to_string(rec.cells.size()) +
                                         " cells, schema arity is " + std::to_string(arity));
    }
    for (std::size_t c = 0; c < arity; ++c) {
      const Cell& cell = rec.cells[c];
      if (is_missing(cell)) continue;
      if (schema_.column(c).kind == ColumnKind::numeric) {
        const double* v = std::get_if<double>(&cell);
        if (!v || !std::isfinite(*v)) {
          throw Error(ErrorCode::type, "row " + std::to_string(r) + ", column '" + schema_.column(c).name +
                                           "': expected a finite number");
        }
      } else {
        const std::string* s = std::get_if<std::string>(&cell);
        if (!s || s->empty()) {
          throw Error(ErrorCode::type, "row " + std::to_string(r) + ", column '" + schema_.column(c).name +
                                           "': expected a non-empty token");
        }
      }
    }
  }
}

Dataset parse_dataset(std::string_view text, const LoadOptions& options, std::string source) {
  std::vector<Line> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++number;
    if (!trim(raw).empty()) lines.push_back({number, split_fields(raw, options.delimiter)});
    pos = end + 1;
  }

  std::vector<std::string> names;
  std::size_t first_data = 0;
  if (options.has_header) {
    if (lines.empty()) throw Error(ErrorCode::empty_input, source + ": file is empty");
    names = lines.front().fields;
    first_data = 1;
  }
  if (options.schema_hint) {
    std::vector<std::string> hinted;
    for (const Column& c : options.schema_hint->columns()) hinted.push_back(c.name);
    if (options.has_header && names != hinted) {
      throw Error(ErrorCode::parse, source + ":" + std::to_string(lines.front().number) +
                                        ": header does not match the schema hint");
    }
    names = std::move(hinted);
  } else if (!options.has_header) {
    throw Error(ErrorCode::parse, source + ": a schema hint is required when the file has no header row");
  }
  if (lines.size() <= first_data) throw Error(ErrorCode::empty_input, source + ": no data rows");

  const std::size_t arity = names.size();
  for (std::size_t i = first_data; i < lines.size(); ++i) {
    if (lines[i].fields.size() != arity) {
      throw Error(ErrorCode::parse, source + ":" + std::to_string(lines[i].number) + ": expected " +
                                        std::to_string(arity) + " fields, found " +
                                        std::to_string(lines[i].fields.size()));
    }
  }

  const auto is_missing_token = [&](const std::string& token) {
    return std::find(options.missing_tokens.begin(), options.missing_tokens.end(), token) !=
           options.missing_tokens.end();
  };

  std::vector<Column> columns;
  if (options.schema_hint) {
    columns.assign(options.schema_hint->columns().begin(), options.schema_hint->columns().end());
  } else {
    columns.resize(arity);
    for (std::size_t c = 0; c < arity; ++c) {
      columns[c].name = names[c];
      bool numeric = true;
      for (std::size_t i = first_data; i < lines.size() && numeric; ++i) {
        const std::string& tok = lines[i].fields[c];
        if (!is_missing_token(tok) && !parse_number(tok)) numeric = false;
      }
      columns[c].kind = numeric ? ColumnKind::numeric : ColumnKind::categorical;
    }
    for (const std::string& key : options.entity_key) {
      auto it = std::find(names.begin(), names.end(), key);
      if (it == names.end()) throw Error(ErrorCode::binding, "unknown entity-key column '" + key + "'");
      columns[static_cast<std::size_t>(it - names.begin())].role = ColumnRole::entity_key;
    }
    if (!options.no_target) {
      std::size_t target = arity - 1;
      if (options.target) {
        auto it = std::find(names.begin(), names.end(), *options.target);
        if (it == names.end()) throw Error(ErrorCode::binding, "unknown target column '" + *options.target + "'");
        target = static_cast<std::size_t>(it - names.begin());
      }
      columns[target].role = ColumnRole::target;
      if (options.categorical_target) columns[target].kind = ColumnKind::categorical;
    }
  }

  std::vector<Record> rows;
  rows.reserve(lines.size() - first_data);
  for (std::size_t i = first_data; i < lines.size(); ++i) {
    Record rec;
    rec.cells.reserve(arity);
    for (std::size_t c = 0; c < arity; ++c) {
      const std::string& tok = lines[i].fields[c];
      if (is_missing_token(tok)) {
        rec.cells.emplace_back(Missing{});
      } else if (columns[c].kind == ColumnKind::numeric) {
        auto v = parse_number(tok);
        if (!v) {
          throw Error(ErrorCode::type, source + ":" + std::to_string(lines[i].number) + ": column '" +
                                           columns[c].name + "' expects a number, got '" + tok + "'");
        }
        rec.cells.emplace_back(*v);
      } else {
        rec.cells.emplace_back(tok);
      }
    }
    rows.push_back(std::move(rec));
  }

  std::vector<std::string> labels;
  if (options.schema_hint) {
    labels = options.schema_hint->labels();
  }
  if (labels.empty()) {
    for (std::size_t c = 0; c < arity; ++c) {
      if (columns[c].role != ColumnRole::target || columns[c].kind != ColumnKind::categorical) continue;
      for (const Record& rec : rows) {
        if (const auto* s = std::get_if<std::string>(&rec.cells[c])) {
          if (std::find(labels.begin(), labels.end(), *s) == labels.end()) labels.push_back(*s);
        }
      }
    }
  }

  Schema schema(std::move(columns), std::move(labels));
  Dataset dataset(std::move(schema), std::move(rows), Provenance{std::move(source), {}});
  return Dataset(dataset.schema(), dataset.rows(), Provenance{dataset.provenance().source, content_hash(dataset)});
}

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_dataset(buffer.str(), options, path.string());
}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) return std::to_string(value);
  return std::string(buf, ptr);
}

std::string format_cell(const Cell& cell) {
  if (const auto* v = std::get_if<double>(&cell)) return format_number(*v);
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  return {};
}

std::string to_delimited(const Dataset& dataset, char delimiter) {
  std::string out;
  const Schema& schema = dataset.schema();
  for (std::size_t c = 0; c < schema.arity(); ++c) {
    if (c) out.push_back(delimiter);
    out += quote_if_needed(schema.column(c).name, delimiter);
  }
  out.push_back('\n');
  for (const Record& rec : dataset.rows()) {
    for (std::size_t c = 0; c < rec.cells.size(); ++c) {
      if (c) out.push_back(delimiter);
      out += quote_if_needed(format_cell(rec.cells[c]), delimiter);
    }
    out.push_back('\n');
  }
  return out;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path, char delimiter) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + path.string() + "'");
  out << to_delimited(dataset, delimiter);
  if (!out) throw Error(ErrorCode::io, "failed writing '" + path.string() + "'");
}

std::string content_hash(const Dataset& dataset) {
  return to_hex(fnv1a64(to_delimited(dataset)));
}

std::vector<FDRule> parse_fd_rules(std::string_view text) {
  std::vector<FDRule> rules;
  std::size_t pos = 0;
  std::size_t number = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++number;
    if (line.empty() || line.front() == '#') continue;

    const std::size_t arrow = line.find("->");
    if (arrow == std::string_view::npos) {
      throw Error(ErrorCode::parse, "rule line " + std::to_string(number) + ": missing '->'");
    }
    FDRule rule;
    rule.rhs = std::string(trim(line.substr(arrow + 2)));
    std::string_view lhs = line.substr(0, arrow);
    std::size_t start = 0;
    while (start <= lhs.size()) {
      std::size_t comma = lhs.find(',', start);
      if (comma == std::string_view::npos) comma = lhs.size();
      std::string_view name = trim(lhs.substr(start, comma - start));
      if (name.empty()) throw Error(ErrorCode::parse, "rule line " + std::to_string(number) + ": empty column name");
      rule.lhs.emplace_back(name);
      start = comma + 1;
    }
    if (rule.rhs.empty() || rule.rhs.find(',') != std::string::npos) {
      throw Error(ErrorCode::parse, "rule line " + std::to_string(number) + ": rhs must be a single column");
    }
    if (std::find(rule.lhs.begin(), rule.lhs.end(), rule.rhs) != rule.lhs.end()) {
      throw Error(ErrorCode::cycle, "rule line " + std::to_string(number) + ": '" + rule.rhs + "' appears on both sides");
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

std::vector<FDRule> load_fd_rules(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_fd_rules(buffer.str());
}

std::vector<BoundRule> bind_rules(std::span<const FDRule> rules, const Schema& schema) {
  std::vector<BoundRule> bound;
  bound.reserve(rules.size());
  for (const FDRule& rule : rules) {
    if (rule.lhs.empty()) throw Error(ErrorCode::binding, "rule with empty lhs");
    if (std::find(rule.lhs.begin(), rule.lhs.end(), rule.rhs) != rule.lhs.end()) {
      throw Error(ErrorCode::cycle, "'" + rule.rhs + "' appears on both sides of a rule");
    }
    BoundRule b;
    for (const std::string& name : rule.lhs) b.lhs.push_back(schema.require_index(name));
    b.rhs = schema.require_index(rule.rhs);
    bound.push_back(std::move(b));
  }
  return bound;
}

std::vector<std::size_t> inconsistent_rows(const Dataset& dataset, std::span<const BoundRule> rules) {
  std::vector<bool> flagged(dataset.size(), false);
  for (const BoundRule& rule : rules) {
    struct Group {
      std::vector<std::size_t> rows;
      std::string first;
      bool violated = false;
    };
    std::unordered_map<std::string, Group> groups;
    for (std::size_t r = 0; r < dataset.size(); ++r) {
      const Record& rec = dataset.row(r);
      if (is_missing(rec.cells[rule.rhs])) continue;
      auto key = group_key(rec, rule.lhs);
      if (!key) continue;
      std::string value = format_cell(rec.cells[rule.rhs]);
      auto [it, inserted] = groups.try_emplace(*key);
      Group& g = it->second;
      if (inserted) {
        g.first = value;
      } else if (g.first != value) {
        g.violated = true;
      }
      g.rows.push_back(r);
    }
    for (const auto& [key, g] : groups) {
      if (!g.violated) continue;
      for (std::size_t r : g.rows) flagged[r] = true;
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < flagged.size(); ++r) {
    if (flagged[r]) out.push_back(r);
  }
  return out;
}

std::vector<std::size_t> conflicting_rows(const Dataset& dataset, std::span<const std::size_t> key) {
  std::vector<std::size_t> non_key;
  for (std::size_t c = 0; c < dataset.schema().arity(); ++c) {
    if (std::find(key.begin(), key.end(), c) == key.end()) non_key.push_back(c);
  }
  std::unordered_map<std::string, std::vector<std::size_t>> groups;
  std::vector<std::string> order;
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    auto k = group_key(dataset.row(r), key);
    if (!k) continue;
    auto [it, inserted] = groups.try_emplace(*k);
    if (inserted) order.push_back(*k);
    it->second.push_back(r);
  }
  std::vector<bool> flagged(dataset.size(), false);
  for (const std::string& k : order) {
    const auto& rows = groups[k];
    if (rows.size() < 2) continue;
    bool conflict = false;
    for (std::size_t c : non_key) {
      const Cell* seen = nullptr;
      for (std::size_t r : rows) {
        const Cell& cell = dataset.row(r).cells[c];
        if (is_missing(cell)) continue;
        if (!seen) {
          seen = &cell;
        } else if (!(*seen == cell)) {
          conflict = true;
          break;
        }
      }
      if (conflict) break;
    }
    if (conflict) {
      for (std::size_t r : rows) flagged[r] = true;
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < flagged.size(); ++r) {
    if (flagged[r]) out.push_back(r);
  }
  return out;
}

ErrorRates detect_error_rates(const Dataset& dataset, std::span<const FDRule> rules, const DetectOptions& options) {
  const Schema& schema = dataset.schema();
  ErrorRates rates;
  if (dataset.size() == 0) return rates;

  std::vector<std::size_t> columns;
  if (options.columns.empty()) {
    columns = schema.feature_indices();
  } else {
    for (const std::string& name : options.columns) columns.push_back(schema.require_index(name));
  }
  std::size_t missing = 0;
  for (const Record& rec : dataset.rows()) {
    for (std::size_t c : columns) missing += is_missing(rec.cells[c]) ? 1 : 0;
  }
  const std::size_t eligible = columns.size() * dataset.size();
  rates.missing = eligible ? static_cast<double>(missing) / static_cast<double>(eligible) : 0.0;

  const double n = static_cast<double>(dataset.size());
  if (options.inconsistent) {
    if (rules.empty()) throw Error(ErrorCode::configuration, "inconsistent-rate detection needs at least one rule");
    auto bound = bind_rules(rules, schema);
    rates.inconsistent = static_cast<double>(inconsistent_rows(dataset, bound).size()) / n;
  }
  if (options.conflicting) {
    std::vector<std::size_t> key;
    if (options.entity_key.empty()) {
      key = schema.entity_key_indices();
    } else {
      for (const std::string& name : options.entity_key) key.push_back(schema.require_index(name));
    }
    if (key.empty()) throw Error(ErrorCode::configuration, "conflicting-rate detection needs entity-key columns");
    rates.conflicting = static_cast<double>(conflicting_rows(dataset, key).size()) / n;
  }
  return rates;
}

}  // namespace dirtybench
