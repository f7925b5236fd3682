#ifndef LABMINE_EVENTS_HPP_
#define LABMINE_EVENTS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "labmine/feature_table.hpp"

namespace labmine {

// Calendar timestamp. Source dates are de-identification shifted, so
// years far beyond 2100 are normal and must survive parsing and ordering.
struct Timestamp {
  int year = 1970;
  int month = 1;
  int day = 1;
  int hour = 0;
  int minute = 0;
  int second = 0;

  // Accepts M/D/YYYY HH:MM[:SS] and ISO-8601 (T or space separator).
  static std::optional<Timestamp> parse(std::string_view text);

  // Seconds relative to 1970-01-01, valid for any year; total order key.
  std::int64_t epoch_seconds() const;
  std::string to_string() const;  // ISO-8601

  bool operator==(const Timestamp&) const = default;
  auto operator<=>(const Timestamp& other) const {
    return epoch_seconds() <=> other.epoch_seconds();
  }
};

// One lab measurement for one patient stay.
struct LabEvent {
  std::int64_t subject_id = 0;
  std::optional<std::int64_t> hadm_id;
  std::optional<std::int64_t> icustay_id;
  std::int64_t item_id = 0;
  Timestamp chart_time;
  std::optional<std::string> value;       // free-text result
  std::optional<double> value_num;        // numeric result when the test is numeric
  std::optional<std::string> flag;
  std::optional<std::string> value_uom;
};

struct LabItem {
  std::int64_t item_id = 0;
  std::string test_name;
  std::string fluid;
  std::string category;
  std::optional<std::string> loinc_code;
  std::optional<std::string> loinc_description;
};

using LabCatalog = std::map<std::int64_t, LabItem>;

// subject_id -> died (true = class 1)
using OutcomeMap = std::map<std::int64_t, bool>;

struct LabEventParse {
  std::vector<LabEvent> events;
  std::size_t skipped_rows = 0;  // malformed rows, counted but not fatal
};

// Header SUBJECT_ID,HADM_ID,ICUSTAY_ID,ITEMID,CHARTTIME,VALUE,VALUENUM,
// FLAG,VALUEUOM is required; a missing mandatory column is a hard error
// naming the column. Rows with malformed fields are skipped and counted.
LabEventParse parse_labevents(std::istream& in);
LabEventParse parse_labevents(const std::filesystem::path& path);

// Header ITEMID,TEST_NAME,FLUID,CATEGORY,LOINC_CODE,LOINC_DESCRIPTION;
// duplicate item ids are a hard error, extra columns are ignored.
LabCatalog parse_labitems(std::istream& in);
LabCatalog parse_labitems(const std::filesystem::path& path);

// Header SUBJECT_ID,DIED with DIED in {0,1}; duplicates are a hard error.
OutcomeMap load_outcomes(std::istream& in);
OutcomeMap load_outcomes(const std::filesystem::path& path);

struct FeatureBuildResult {
  FeatureTable table;
  std::size_t events_outside_universe = 0;
};

// One row per outcome subject in ascending subject order, one column per
// universe item in the given order. AVG averages value_num over the
// patient's events for the item (text-only results excluded); COUNT
// counts every event. A (patient, item) pair with no qualifying events
// scores 0. Events whose subject is missing from `outcomes` are a hard
// error; events whose item is outside the universe are skipped and
// counted.
FeatureBuildResult build_feature_table(std::span<const LabEvent> events,
                                       const OutcomeMap& outcomes,
                                       AggregationMode mode,
                                       std::span<const std::int64_t> item_universe);

// Default attribute universe: all catalog ids ascending, or the ids seen
// in the events (ascending) when the catalog is empty.
std::vector<std::int64_t> default_item_universe(const LabCatalog& catalog,
                                                std::span<const LabEvent> events);

}  // namespace labmine

#endif  // LABMINE_EVENTS_HPP_
