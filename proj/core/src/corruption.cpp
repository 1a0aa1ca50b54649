#include "dirtybench/corruption.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "dirtybench/error.hpp"
#include "dirtybench/random.hpp"

namespace dirtybench {

namespace {

std::size_t target_count(double rate, std::size_t denominator) {
  return static_cast<std::size_t>(std::llround(rate * static_cast<double>(denominator)));
}

// Distinct non-missing values of a column, first-seen order.
std::vector<Cell> column_domain(const Dataset& dataset, std::size_t column) {
  std::vector<Cell> domain;
  for (const Record& rec : dataset.rows()) {
    const Cell& cell = rec.cells[column];
    if (is_missing(cell)) continue;
    if (std::find(domain.begin(), domain.end(), cell) == domain.end()) domain.push_back(cell);
  }
  return domain;
}

std::optional<std::string> key_of(const Record& rec, const std::vector<std::size_t>& columns) {
  std::string key;
  for (std::size_t c : columns) {
    if (is_missing(rec.cells[c])) return std::nullopt;
    key += format_cell(rec.cells[c]);
    key.push_back('\x1f');
  }
  return key;
}

// Rows grouped by their values on a fixed column list, kept current while
// the injectors edit and append rows.
class GroupIndex {
 public:
  explicit GroupIndex(std::vector<std::size_t> columns) : columns_(std::move(columns)) {}

  void add(const std::vector<Record>& rows, std::size_t r) {
    if (keys_.size() <= r) keys_.resize(r + 1);
    keys_[r] = key_of(rows[r], columns_);
    if (keys_[r]) groups_[*keys_[r]].push_back(r);
  }

  void refresh(const std::vector<Record>& rows, std::size_t r) {
    if (keys_[r]) {
      auto& members = groups_[*keys_[r]];
      members.erase(std::remove(members.begin(), members.end(), r), members.end());
    }
    add(rows, r);
  }

  bool covers(std::size_t column) const {
    return std::find(columns_.begin(), columns_.end(), column) != columns_.end();
  }

  bool has_key(std::size_t r) const { return r < keys_.size() && keys_[r].has_value(); }

  std::vector<std::size_t> others(std::size_t r) const {
    std::vector<std::size_t> out;
    if (!has_key(r)) return out;
    auto it = groups_.find(*keys_[r]);
    if (it == groups_.end()) return out;
    for (std::size_t m : it->second) {
      if (m != r) out.push_back(m);
    }
    return out;
  }

 private:
  std::vector<std::size_t> columns_;
  std::vector<std::optional<std::string>> keys_;
  std::unordered_map<std::string, std::vector<std::size_t>> groups_;
};

// Replacement value for `column` of `row`: any domain value other than the
// current one, and, when every other group member agrees on a single value,
// other than that too so the group ends up disagreeing.
std::optional<Cell> pick_replacement(const std::vector<Record>& rows, std::size_t row, std::size_t column,
                                     const std::vector<std::size_t>& group, const std::vector<Cell>& domain,
                                     Rng& rng) {
  const Cell& current = rows[row].cells[column];
  std::vector<Cell> peers;
  for (std::size_t m : group) {
    const Cell& cell = rows[m].cells[column];
    if (!is_missing(cell) && std::find(peers.begin(), peers.end(), cell) == peers.end()) peers.push_back(cell);
  }
  std::vector<Cell> candidates;
  for (const Cell& v : domain) {
    if (v == current) continue;
    if (peers.size() == 1 && v == peers.front()) continue;
    candidates.push_back(v);
  }
  if (candidates.empty()) return std::nullopt;
  return candidates[rng.uniform_index(candidates.size())];
}

}  // namespace

std::string_view to_string(ErrorType type) noexcept {
  switch (type) {
    case ErrorType::missing: return "missing";
    case ErrorType::inconsistent: return "inconsistent";
    case ErrorType::conflicting: return "conflicting";
  }
  return "missing";
}

ErrorType error_type_from_string(std::string_view name) {
  if (name == "missing") return ErrorType::missing;
  if (name == "inconsistent") return ErrorType::inconsistent;
  if (name == "conflicting") return ErrorType::conflicting;
  throw Error(ErrorCode::configuration, "unknown error type '" + std::string(name) + "'");
}

std::vector<std::size_t> eligible_columns(const CorruptionSpec& spec, const Schema& schema) {
  std::vector<std::size_t> columns;
  if (spec.column_mask.empty()) {
    columns = schema.feature_indices();
    if (spec.corrupt_target_in_train && schema.target_index()) columns.push_back(*schema.target_index());
    std::sort(columns.begin(), columns.end());
  } else {
    for (const std::string& name : spec.column_mask) {
      std::size_t c = schema.require_index(name);
      if (schema.target_index() == c && !spec.corrupt_target_in_train) continue;
      if (std::find(columns.begin(), columns.end(), c) == columns.end()) columns.push_back(c);
    }
  }
  return columns;
}

void validate(const CorruptionSpec& spec, const Schema& schema) {
  if (!(spec.rate >= 0.0 && spec.rate <= 1.0)) {
    throw Error(ErrorCode::configuration, "corruption rate must lie in [0, 1]");
  }
  eligible_columns(spec, schema);
  if (spec.error_type == ErrorType::inconsistent) {
    if (spec.rules.empty()) throw Error(ErrorCode::configuration, "inconsistent injection needs at least one rule");
    bind_rules(spec.rules, schema);
  }
  if (spec.error_type == ErrorType::conflicting) {
    if (spec.entity_key.empty() && schema.entity_key_indices().empty()) {
      throw Error(ErrorCode::configuration, "conflicting injection needs entity-key columns");
    }
    for (const std::string& name : spec.entity_key) schema.require_index(name);
  }
}

Dataset inject_missing(const Dataset& dataset, const CorruptionSpec& spec) {
  validate(spec, dataset.schema());
  const auto columns = eligible_columns(spec, dataset.schema());
  const std::size_t eligible = columns.size() * dataset.size();
  if (spec.rate > 0.0 && eligible == 0) {
    throw Error(ErrorCode::configuration, "missing injection requested but no eligible cells");
  }
  std::vector<Record> rows = dataset.rows();
  const std::size_t count = target_count(spec.rate, eligible);
  if (count > 0) {
    Rng rng(spec.seed);
    for (std::size_t flat : rng.sample(eligible, count)) {
      rows[flat / columns.size()].cells[columns[flat % columns.size()]] = Missing{};
    }
  }
  return dataset.derive(std::move(rows), dataset.origin());
}

Dataset inject_inconsistent(const Dataset& dataset, const CorruptionSpec& spec) {
  validate(spec, dataset.schema());
  const auto columns = eligible_columns(spec, dataset.schema());
  std::vector<BoundRule> rules;
  for (BoundRule& rule : bind_rules(spec.rules, dataset.schema())) {
    if (std::find(columns.begin(), columns.end(), rule.rhs) != columns.end()) rules.push_back(std::move(rule));
  }
  if (rules.empty()) {
    throw Error(ErrorCode::configuration, "no consistency rule has its rhs inside the eligible columns");
  }
  std::vector<std::vector<Cell>> domains;
  for (const BoundRule& rule : rules) {
    domains.push_back(column_domain(dataset, rule.rhs));
    if (domains.back().size() < 2) {
      throw Error(ErrorCode::injection_impossible, "column '" + dataset.schema().column(rule.rhs).name +
                                                       "' has fewer than two distinct values");
    }
  }

  std::vector<Record> rows = dataset.rows();
  std::vector<std::size_t> origin = dataset.origin();
  const std::size_t n0 = rows.size();
  const std::size_t count = target_count(spec.rate, n0);
  if (count == 0) return dataset.derive(std::move(rows), std::move(origin));

  std::vector<GroupIndex> index;
  for (const BoundRule& rule : rules) {
    index.emplace_back(rule.lhs);
    for (std::size_t r = 0; r < n0; ++r) index.back().add(rows, r);
  }

  Rng rng(spec.seed);
  for (std::size_t r : rng.sample(n0, count)) {
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < rules.size(); ++i) {
      if (index[i].has_key(r)) usable.push_back(i);
    }
    if (usable.empty()) continue;
    const std::size_t ri = usable[rng.uniform_index(usable.size())];
    const std::size_t rhs = rules[ri].rhs;

    auto group = index[ri].others(r);
    if (group.empty()) {
      rows.push_back(rows[r]);
      origin.push_back(origin[r]);
      for (GroupIndex& g : index) g.add(rows, rows.size() - 1);
      group = index[ri].others(r);
    }
    auto value = pick_replacement(rows, r, rhs, group, domains[ri], rng);
    if (!value) continue;
    rows[r].cells[rhs] = std::move(*value);
    for (GroupIndex& g : index) {
      if (g.covers(rhs)) g.refresh(rows, r);
    }
  }
  return dataset.derive(std::move(rows), std::move(origin));
}

Dataset inject_conflicting(const Dataset& dataset, const CorruptionSpec& spec) {
  validate(spec, dataset.schema());
  const Schema& schema = dataset.schema();
  std::vector<std::size_t> key;
  if (spec.entity_key.empty()) {
    key = schema.entity_key_indices();
  } else {
    for (const std::string& name : spec.entity_key) key.push_back(schema.require_index(name));
  }
  std::vector<std::size_t> targets;
  for (std::size_t c : eligible_columns(spec, schema)) {
    if (std::find(key.begin(), key.end(), c) == key.end()) targets.push_back(c);
  }
  if (targets.empty()) throw Error(ErrorCode::configuration, "every eligible column is an entity-key column");

  std::vector<std::vector<Cell>> domains;
  std::vector<std::size_t> mutable_columns;
  for (std::size_t c : targets) {
    auto domain = column_domain(dataset, c);
    if (domain.size() >= 2) {
      mutable_columns.push_back(domains.size());
      domains.push_back(std::move(domain));
    } else {
      domains.emplace_back();
    }
  }

  std::vector<Record> rows = dataset.rows();
  std::vector<std::size_t> origin = dataset.origin();
  const std::size_t n0 = rows.size();
  const std::size_t count = target_count(spec.rate, n0);
  if (count == 0) return dataset.derive(std::move(rows), std::move(origin));
  if (mutable_columns.empty()) {
    throw Error(ErrorCode::injection_impossible, "no non-key column has two distinct values");
  }

  GroupIndex groups(key);
  for (std::size_t r = 0; r < n0; ++r) groups.add(rows, r);

  Rng rng(spec.seed);
  for (std::size_t r : rng.sample(n0, count)) {
    if (!groups.has_key(r)) continue;
    auto members = groups.others(r);
    if (members.empty()) {
      rows.push_back(rows[r]);
      origin.push_back(origin[r]);
      groups.add(rows, rows.size() - 1);
      members = groups.others(r);
    }
    const std::size_t slot = mutable_columns[rng.uniform_index(mutable_columns.size())];
    const std::size_t column = targets[slot];
    auto value = pick_replacement(rows, r, column, members, domains[slot], rng);
    if (!value) continue;
    rows[r].cells[column] = std::move(*value);
  }
  return dataset.derive(std::move(rows), std::move(origin));
}

Dataset inject(const Dataset& dataset, const CorruptionSpec& spec) {
  switch (spec.error_type) {
    case ErrorType::missing: return inject_missing(dataset, spec);
    case ErrorType::inconsistent: return inject_inconsistent(dataset, spec);
    case ErrorType::conflicting: return inject_conflicting(dataset, spec);
  }
  return dataset;
}

Imputer Imputer::fit(const Dataset& dataset) {
  const Schema& schema = dataset.schema();
  Imputer imp;
  imp.fills_.resize(schema.arity());
  for (std::size_t c = 0; c < schema.arity(); ++c) {
    imp.names_.push_back(schema.column(c).name);
    if (schema.column(c).kind == ColumnKind::numeric) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const Record& rec : dataset.rows()) {
        if (const auto* v = std::get_if<double>(&rec.cells[c])) {
          sum += *v;
          ++n;
        }
      }
      if (n > 0) imp.fills_[c] = Cell{sum / static_cast<double>(n)};
    } else {
      std::vector<std::pair<std::string, std::size_t>> counts;
      for (const Record& rec : dataset.rows()) {
        const auto* s = std::get_if<std::string>(&rec.cells[c]);
        if (!s) continue;
        auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& p) { return p.first == *s; });
        if (it == counts.end()) {
          counts.emplace_back(*s, 1);
        } else {
          ++it->second;
        }
      }
      if (!counts.empty()) {
        // max_element returns the first maximum, i.e. the first-seen value.
        auto best = std::max_element(counts.begin(), counts.end(),
                                     [](const auto& a, const auto& b) { return a.second < b.second; });
        imp.fills_[c] = Cell{best->first};
      }
    }
  }
  return imp;
}

Dataset Imputer::apply(const Dataset& dataset) const {
  if (dataset.schema().arity() != fills_.size()) {
    throw Error(ErrorCode::schema, "imputer was fitted on a different schema");
  }
  std::vector<Record> rows = dataset.rows();
  for (Record& rec : rows) {
    for (std::size_t c = 0; c < rec.cells.size(); ++c) {
      if (!is_missing(rec.cells[c])) continue;
      if (!fills_[c]) {
        throw Error(ErrorCode::imputation_impossible, "column '" + names_[c] + "' has no observed values");
      }
      rec.cells[c] = *fills_[c];
    }
  }
  return dataset.derive(std::move(rows), dataset.origin());
}

Dataset impute(const Dataset& dataset) { return Imputer::fit(dataset).apply(dataset); }

}  // namespace dirtybench

namespace dirtybench {

InjectionSummary summarize_injection(const Dataset& before, const Dataset& after, const CorruptionSpec& spec) {
  InjectionSummary s;
  s.rows_before = before.size();
  s.rows_after = after.size();
  if (after.origin().size() != after.size()) throw Error(ErrorCode::schema, "injected dataset lacks origin indices");
  if (spec.error_type == ErrorType::missing) {
    const auto columns = eligible_columns(spec, before.schema());
    s.denominator = columns.size() * before.size();
    for (std::size_t i = 0; i < after.size(); ++i) {
      const Record& src = after.clean_row(i);
      for (std::size_t c : columns) {
        if (is_missing(after.row(i).cells[c]) && !is_missing(src.cells[c])) ++s.changed;
      }
    }
  } else {
    s.denominator = before.size();
    for (std::size_t i = 0; i < after.size(); ++i) {
      if (after.row(i) != after.clean_row(i)) ++s.changed;
    }
  }
  s.achieved_rate = s.denominator ? static_cast<double>(s.changed) / static_cast<double>(s.denominator) : 0.0;
  return s;
}

}  // namespace dirtybench
