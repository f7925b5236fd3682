#ifndef LABMINE_FEATURE_TABLE_HPP_
#define LABMINE_FEATURE_TABLE_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace labmine {

// The two per-patient encodings: mean lab value per test, and number of
// times each test was performed.
enum class AggregationMode { kAvg, kCount };

std::string_view aggregation_mode_name(AggregationMode mode);
AggregationMode aggregation_mode_from_name(std::string_view name);

struct FeatureRow {
  std::int64_t patient_id = 0;
  std::vector<double> values;
  int label = 0;  // 0 = alive, 1 = dead

  bool operator==(const FeatureRow&) const = default;
};

// Patients x lab-test attributes plus a binary outcome class. Immutable
// by convention once built; all transformations return a new table.
struct FeatureTable {
  std::vector<std::string> attribute_names;
  std::vector<FeatureRow> rows;
  AggregationMode mode = AggregationMode::kAvg;

  std::size_t n_rows() const { return rows.size(); }
  std::size_t n_attributes() const { return attribute_names.size(); }
  std::array<std::int64_t, 2> class_counts() const;
  // Fraction of rows carrying the majority class.
  double majority_prevalence() const;
  int majority_label() const;

  bool operator==(const FeatureTable&) const = default;
};

// New table holding `keep` columns in `keep` order; patient key and class
// are always retained and row order is unchanged. `keep` must be a
// non-empty duplicate-free subset of attribute_names.
FeatureTable project_columns(const FeatureTable& table, std::span<const std::string> keep);

// Rows at `indices` (in that order), same columns.
FeatureTable select_rows(const FeatureTable& table, std::span<const std::size_t> indices);

enum class TableFormat { kDelimited, kArff };

// Delimited layout: header P_ID,<item...>,CLASS with a "# mode=..."
// comment stamp. ARFF mirrors @relation/@attribute/@data with CLASS as a
// {0,1} nominal. Values are written with round-trip precision.
void write_table(const FeatureTable& table, std::ostream& out, TableFormat format);
void write_table(const FeatureTable& table, const std::filesystem::path& path, TableFormat format);
FeatureTable read_table(std::istream& in, TableFormat format);
FeatureTable read_table(const std::filesystem::path& path, TableFormat format);

// Guesses the format from the extension (.arff vs anything else).
TableFormat table_format_for_path(const std::filesystem::path& path);

}  // namespace labmine

#endif  // LABMINE_FEATURE_TABLE_HPP_
