#include "labmine/events.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "labmine/csv.hpp"
#include "labmine/errors.hpp"

namespace labmine {

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return kDays[m - 1];
}

// Days since 1970-01-01 for an arbitrary proleptic-Gregorian date
// (Howard Hinnant's civil-days algorithm; exact for shifted far-future
// years).
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool parse_fixed_int(std::string_view text, int& out) {
  const auto v = parse_int(text);
  if (!v) return false;
  out = static_cast<int>(*v);
  return true;
}

}  // namespace

std::optional<Timestamp> Timestamp::parse(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  Timestamp ts;
  std::string_view date, time;
  // Split on the first separator between date and time-of-day.
  std::size_t sep = text.find_first_of(" T");
  if (sep == std::string_view::npos) return std::nullopt;
  date = text.substr(0, sep);
  time = trim(text.substr(sep + 1));

  if (date.find('/') != std::string_view::npos) {
    // M/D/YYYY
    const auto s1 = date.find('/');
    const auto s2 = date.find('/', s1 + 1);
    if (s2 == std::string_view::npos) return std::nullopt;
    if (!parse_fixed_int(date.substr(0, s1), ts.month) ||
        !parse_fixed_int(date.substr(s1 + 1, s2 - s1 - 1), ts.day) ||
        !parse_fixed_int(date.substr(s2 + 1), ts.year)) {
      return std::nullopt;
    }
  } else if (date.find('-') != std::string_view::npos) {
    // YYYY-MM-DD
    const auto s1 = date.find('-');
    const auto s2 = date.find('-', s1 + 1);
    if (s2 == std::string_view::npos) return std::nullopt;
    if (!parse_fixed_int(date.substr(0, s1), ts.year) ||
        !parse_fixed_int(date.substr(s1 + 1, s2 - s1 - 1), ts.month) ||
        !parse_fixed_int(date.substr(s2 + 1), ts.day)) {
      return std::nullopt;
    }
  } else {
    return std::nullopt;
  }

  const auto c1 = time.find(':');
  if (c1 == std::string_view::npos) return std::nullopt;
  const auto c2 = time.find(':', c1 + 1);
  if (!parse_fixed_int(time.substr(0, c1), ts.hour)) return std::nullopt;
  if (c2 == std::string_view::npos) {
    if (!parse_fixed_int(time.substr(c1 + 1), ts.minute)) return std::nullopt;
    ts.second = 0;
  } else {
    if (!parse_fixed_int(time.substr(c1 + 1, c2 - c1 - 1), ts.minute) ||
        !parse_fixed_int(time.substr(c2 + 1), ts.second)) {
      return std::nullopt;
    }
  }

  if (ts.year < 1 || ts.month < 1 || ts.month > 12) return std::nullopt;
  if (ts.day < 1 || ts.day > days_in_month(ts.year, ts.month)) return std::nullopt;
  if (ts.hour < 0 || ts.hour > 23 || ts.minute < 0 || ts.minute > 59) return std::nullopt;
  if (ts.second < 0 || ts.second > 59) return std::nullopt;
  return ts;
}

std::int64_t Timestamp::epoch_seconds() const {
  return days_from_civil(year, month, day) * 86400 + hour * 3600 + minute * 60 + second;
}

std::string Timestamp::to_string() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d", year, month, day, hour,
                minute, second);
  return buf;
}

namespace {

// Resolves required header columns case-insensitively; throws naming the
// first missing one.
std::unordered_map<std::string, std::size_t> header_index(
    const std::vector<std::string>& header, const std::vector<std::string>& required,
    const char* what) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string key;
    for (char c : trim(header[i])) key.push_back(static_cast<char>(std::toupper(c)));
    index.emplace(std::move(key), i);
  }
  for (const auto& name : required) {
    if (!index.count(name)) {
      throw DataError(std::string(what) + ": missing required column " + name);
    }
  }
  return index;
}

std::optional<std::string> text_field(const std::vector<std::string>& fields, std::size_t i) {
  if (i >= fields.size()) return std::nullopt;
  if (trim(fields[i]).empty()) return std::nullopt;
  return fields[i];
}

}  // namespace

LabEventParse parse_labevents(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> fields;
  if (!reader.next_record(fields)) throw DataError("lab events: empty input, header required");
  const auto col = header_index(fields,
                                {"SUBJECT_ID", "HADM_ID", "ICUSTAY_ID", "ITEMID", "CHARTTIME",
                                 "VALUE", "VALUENUM", "FLAG", "VALUEUOM"},
                                "lab events");
  const std::size_t c_subject = col.at("SUBJECT_ID");
  const std::size_t c_hadm = col.at("HADM_ID");
  const std::size_t c_stay = col.at("ICUSTAY_ID");
  const std::size_t c_item = col.at("ITEMID");
  const std::size_t c_time = col.at("CHARTTIME");
  const std::size_t c_value = col.at("VALUE");
  const std::size_t c_num = col.at("VALUENUM");
  const std::size_t c_flag = col.at("FLAG");
  const std::size_t c_uom = col.at("VALUEUOM");

  LabEventParse result;
  while (reader.next_record(fields)) {
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;
    const std::size_t needed =
        std::max({c_subject, c_item, c_time, c_value, c_num, c_flag, c_uom, c_hadm, c_stay});
    if (fields.size() <= needed) {
      ++result.skipped_rows;
      continue;
    }
    LabEvent event;
    const auto subject = parse_int(fields[c_subject]);
    const auto item = parse_int(fields[c_item]);
    const auto when = Timestamp::parse(fields[c_time]);
    if (!subject || *subject <= 0 || !item || *item <= 0 || !when) {
      ++result.skipped_rows;
      continue;
    }
    event.subject_id = *subject;
    event.item_id = *item;
    event.chart_time = *when;

    bool bad = false;
    auto optional_id = [&](std::size_t c) -> std::optional<std::int64_t> {
      if (trim(fields[c]).empty()) return std::nullopt;
      const auto v = parse_int(fields[c]);
      if (!v || *v <= 0) bad = true;
      return v;
    };
    event.hadm_id = optional_id(c_hadm);
    event.icustay_id = optional_id(c_stay);
    if (!trim(fields[c_num]).empty()) {
      const auto v = parse_double(fields[c_num]);
      if (!v || !std::isfinite(*v)) {
        bad = true;
      } else {
        event.value_num = *v;
      }
    }
    if (bad) {
      ++result.skipped_rows;
      continue;
    }
    event.value = text_field(fields, c_value);
    event.flag = text_field(fields, c_flag);
    event.value_uom = text_field(fields, c_uom);
    result.events.push_back(std::move(event));
  }
  return result;
}

LabCatalog parse_labitems(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> fields;
  if (!reader.next_record(fields)) throw DataError("lab items: empty input, header required");
  const auto col = header_index(
      fields, {"ITEMID", "TEST_NAME", "FLUID", "CATEGORY", "LOINC_CODE", "LOINC_DESCRIPTION"},
      "lab items");
  const std::size_t c_item = col.at("ITEMID");
  const std::size_t c_name = col.at("TEST_NAME");
  const std::size_t c_fluid = col.at("FLUID");
  const std::size_t c_cat = col.at("CATEGORY");
  const std::size_t c_code = col.at("LOINC_CODE");
  const std::size_t c_desc = col.at("LOINC_DESCRIPTION");

  LabCatalog catalog;
  while (reader.next_record(fields)) {
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;
    const auto id = fields.size() > c_item ? parse_int(fields[c_item]) : std::nullopt;
    if (!id || *id <= 0) {
      throw DataError("lab items line " + std::to_string(reader.record_line()) +
                      ": bad ITEMID");
    }
    LabItem item;
    item.item_id = *id;
    if (fields.size() > c_name) item.test_name = fields[c_name];
    if (fields.size() > c_fluid) item.fluid = fields[c_fluid];
    if (fields.size() > c_cat) item.category = fields[c_cat];
    item.loinc_code = text_field(fields, c_code);
    item.loinc_description = text_field(fields, c_desc);
    if (!catalog.emplace(item.item_id, std::move(item)).second) {
      throw DataError("lab items: duplicate ITEMID " + std::to_string(*id));
    }
  }
  return catalog;
}

OutcomeMap load_outcomes(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> fields;
  if (!reader.next_record(fields)) throw DataError("outcomes: empty input, header required");
  const auto col = header_index(fields, {"SUBJECT_ID", "DIED"}, "outcomes");
  const std::size_t c_subject = col.at("SUBJECT_ID");
  const std::size_t c_died = col.at("DIED");

  OutcomeMap outcomes;
  while (reader.next_record(fields)) {
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;
    const auto line = std::to_string(reader.record_line());
    if (fields.size() <= std::max(c_subject, c_died)) {
      throw DataError("outcomes line " + line + ": too few fields");
    }
    const auto subject = parse_int(fields[c_subject]);
    if (!subject || *subject <= 0) {
      throw DataError("outcomes line " + line + ": bad SUBJECT_ID");
    }
    const auto died = trim(fields[c_died]);
    bool value;
    if (died == "0") {
      value = false;
    } else if (died == "1") {
      value = true;
    } else {
      throw DataError("outcomes line " + line + ": DIED must be 0 or 1, got '" +
                      std::string(died) + "'");
    }
    if (!outcomes.emplace(*subject, value).second) {
      throw DataError("outcomes: duplicate SUBJECT_ID " + std::to_string(*subject));
    }
  }
  return outcomes;
}

FeatureBuildResult build_feature_table(std::span<const LabEvent> events,
                                       const OutcomeMap& outcomes, AggregationMode mode,
                                       std::span<const std::int64_t> item_universe) {
  if (item_universe.empty()) {
    throw std::invalid_argument("build_feature_table: empty item universe");
  }
  std::unordered_map<std::int64_t, std::size_t> item_col;
  item_col.reserve(item_universe.size());
  for (std::size_t i = 0; i < item_universe.size(); ++i) {
    if (!item_col.emplace(item_universe[i], i).second) {
      throw std::invalid_argument("build_feature_table: duplicate item " +
                                  std::to_string(item_universe[i]));
    }
  }
  std::unordered_map<std::int64_t, std::size_t> patient_row;
  patient_row.reserve(outcomes.size());
  std::size_t next_row = 0;
  for (const auto& [subject, died] : outcomes) {
    (void)died;
    patient_row.emplace(subject, next_row++);  // std::map iteration: ascending subject
  }

  const std::size_t n_items = item_universe.size();
  const std::size_t n_rows = outcomes.size();
  std::vector<double> sums;
  std::vector<std::int64_t> numeric_counts;
  std::vector<std::int64_t> total_counts;
  if (mode == AggregationMode::kAvg) {
    sums.assign(n_rows * n_items, 0.0);
    numeric_counts.assign(n_rows * n_items, 0);
  } else {
    total_counts.assign(n_rows * n_items, 0);
  }

  FeatureBuildResult result;
  std::set<std::int64_t> unknown_subjects;
  for (const auto& event : events) {
    const auto row_it = patient_row.find(event.subject_id);
    if (row_it == patient_row.end()) {
      unknown_subjects.insert(event.subject_id);
      continue;
    }
    const auto col_it = item_col.find(event.item_id);
    if (col_it == item_col.end()) {
      ++result.events_outside_universe;
      continue;
    }
    const std::size_t cell = row_it->second * n_items + col_it->second;
    if (mode == AggregationMode::kAvg) {
      if (event.value_num) {
        sums[cell] += *event.value_num;
        numeric_counts[cell] += 1;
      }
    } else {
      total_counts[cell] += 1;
    }
  }
  if (!unknown_subjects.empty()) {
    std::ostringstream msg;
    msg << "events reference subjects missing from outcomes:";
    std::size_t shown = 0;
    for (std::int64_t id : unknown_subjects) {
      if (shown == 20) {
        msg << " ... (" << unknown_subjects.size() - shown << " more)";
        break;
      }
      msg << ' ' << id;
      ++shown;
    }
    throw DataError(msg.str());
  }

  FeatureTable& table = result.table;
  table.mode = mode;
  table.attribute_names.reserve(n_items);
  for (std::int64_t id : item_universe) table.attribute_names.push_back(std::to_string(id));
  table.rows.reserve(n_rows);
  for (const auto& [subject, died] : outcomes) {
    const std::size_t r = patient_row.at(subject);
    FeatureRow row;
    row.patient_id = subject;
    row.label = died ? 1 : 0;
    row.values.resize(n_items, 0.0);
    for (std::size_t c = 0; c < n_items; ++c) {
      const std::size_t cell = r * n_items + c;
      if (mode == AggregationMode::kAvg) {
        if (numeric_counts[cell] > 0) {
          row.values[c] = sums[cell] / static_cast<double>(numeric_counts[cell]);
        }
      } else {
        row.values[c] = static_cast<double>(total_counts[cell]);
      }
    }
    table.rows.push_back(std::move(row));
  }
  return result;
}

std::vector<std::int64_t> default_item_universe(const LabCatalog& catalog,
                                                std::span<const LabEvent> events) {
  std::vector<std::int64_t> universe;
  if (!catalog.empty()) {
    universe.reserve(catalog.size());
    for (const auto& [id, item] : catalog) {
      (void)item;
      universe.push_back(id);
    }
    return universe;  // map order: ascending
  }
  std::set<std::int64_t> seen;
  for (const auto& event : events) seen.insert(event.item_id);
  universe.assign(seen.begin(), seen.end());
  return universe;
}

namespace {
template <typename Fn>
auto with_file(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path.string());
  return fn(in);
}
}  // namespace

LabEventParse parse_labevents(const std::filesystem::path& path) {
  return with_file(path, [](std::istream& in) { return parse_labevents(in); });
}

LabCatalog parse_labitems(const std::filesystem::path& path) {
  return with_file(path, [](std::istream& in) { return parse_labitems(in); });
}

OutcomeMap load_outcomes(const std::filesystem::path& path) {
  return with_file(path, [](std::istream& in) { return load_outcomes(in); });
}

}  // namespace labmine
