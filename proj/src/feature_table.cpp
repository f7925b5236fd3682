#include "labmine/feature_table.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "labmine/csv.hpp"
#include "labmine/errors.hpp"

namespace labmine {

std::string_view aggregation_mode_name(AggregationMode mode) {
  return mode == AggregationMode::kAvg ? "avg" : "count";
}

AggregationMode aggregation_mode_from_name(std::string_view name) {
  if (iequals(name, "avg") || iequals(name, "average")) return AggregationMode::kAvg;
  if (iequals(name, "count")) return AggregationMode::kCount;
  throw std::invalid_argument("unknown aggregation mode: " + std::string(name));
}

std::array<std::int64_t, 2> FeatureTable::class_counts() const {
  std::array<std::int64_t, 2> counts{0, 0};
  for (const auto& row : rows) counts[row.label == 1 ? 1 : 0]++;
  return counts;
}

double FeatureTable::majority_prevalence() const {
  if (rows.empty()) return 0.0;
  const auto counts = class_counts();
  return static_cast<double>(std::max(counts[0], counts[1])) / static_cast<double>(rows.size());
}

int FeatureTable::majority_label() const {
  const auto counts = class_counts();
  return counts[1] > counts[0] ? 1 : 0;
}

FeatureTable project_columns(const FeatureTable& table, std::span<const std::string> keep) {
  if (keep.empty()) throw std::invalid_argument("project_columns: empty attribute selection");
  std::unordered_map<std::string_view, std::size_t> index;
  index.reserve(table.attribute_names.size());
  for (std::size_t i = 0; i < table.attribute_names.size(); ++i) {
    index.emplace(table.attribute_names[i], i);
  }
  std::vector<std::size_t> cols;
  cols.reserve(keep.size());
  std::unordered_set<std::string_view> seen;
  for (const auto& name : keep) {
    auto it = index.find(name);
    if (it == index.end()) {
      throw std::invalid_argument("project_columns: unknown attribute " + name);
    }
    if (!seen.insert(name).second) {
      throw std::invalid_argument("project_columns: duplicate attribute " + name);
    }
    cols.push_back(it->second);
  }
  FeatureTable out;
  out.mode = table.mode;
  out.attribute_names.assign(keep.begin(), keep.end());
  out.rows.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    FeatureRow r;
    r.patient_id = row.patient_id;
    r.label = row.label;
    r.values.reserve(cols.size());
    for (std::size_t c : cols) r.values.push_back(row.values[c]);
    out.rows.push_back(std::move(r));
  }
  return out;
}

FeatureTable select_rows(const FeatureTable& table, std::span<const std::size_t> indices) {
  FeatureTable out;
  out.mode = table.mode;
  out.attribute_names = table.attribute_names;
  out.rows.reserve(indices.size());
  for (std::size_t i : indices) out.rows.push_back(table.rows[i]);
  return out;
}

namespace {

void check_attribute_names(const std::vector<std::string>& names) {
  std::unordered_set<std::string_view> seen;
  for (const auto& name : names) {
    if (!seen.insert(name).second) {
      throw DataError("duplicate attribute name: " + name);
    }
  }
}

[[noreturn]] void schema_error(std::size_t line, const std::string& message) {
  throw DataError("line " + std::to_string(line) + ": " + message);
}

std::string label_to_text(int label) { return label == 1 ? "1" : "0"; }

int label_from_text(std::string_view text, std::size_t line) {
  const auto t = trim(text);
  if (t == "0") return 0;
  if (t == "1") return 1;
  schema_error(line, "class label must be 0 or 1, got '" + std::string(text) + "'");
}

void write_delimited(const FeatureTable& table, std::ostream& out) {
  out << "# mode=" << aggregation_mode_name(table.mode) << "\n";
  std::vector<std::string> fields;
  fields.emplace_back("P_ID");
  for (const auto& name : table.attribute_names) fields.push_back(name);
  fields.emplace_back("CLASS");
  write_csv_record(out, fields);
  for (const auto& row : table.rows) {
    fields.clear();
    fields.push_back(std::to_string(row.patient_id));
    for (double v : row.values) fields.push_back(format_double(v));
    fields.push_back(label_to_text(row.label));
    write_csv_record(out, fields);
  }
}

FeatureTable read_delimited(std::istream& in) {
  FeatureTable table;
  // Comment stamps are skipped by the reader, but the mode stamp matters;
  // peek at it before handing the stream over.
  while (in.peek() == '#') {
    std::string comment;
    std::getline(in, comment);
    const auto pos = comment.find("mode=");
    if (pos != std::string::npos) {
      const auto value = trim(std::string_view(comment).substr(pos + 5));
      table.mode = aggregation_mode_from_name(value);
    }
  }
  CsvReader reader(in);
  std::vector<std::string> fields;
  if (!reader.next_record(fields)) throw DataError("empty table file");
  if (fields.size() < 2 || !iequals(fields.front(), "P_ID") || !iequals(fields.back(), "CLASS")) {
    schema_error(reader.record_line(), "expected header P_ID,<attributes...>,CLASS");
  }
  table.attribute_names.assign(fields.begin() + 1, fields.end() - 1);
  check_attribute_names(table.attribute_names);
  const std::size_t n_cols = fields.size();
  while (reader.next_record(fields)) {
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;
    if (fields.size() != n_cols) {
      schema_error(reader.record_line(),
                   "expected " + std::to_string(n_cols) + " fields, got " +
                       std::to_string(fields.size()));
    }
    FeatureRow row;
    const auto pid = parse_int(fields[0]);
    if (!pid) schema_error(reader.record_line(), "bad patient id '" + fields[0] + "'");
    row.patient_id = *pid;
    row.values.reserve(n_cols - 2);
    for (std::size_t i = 1; i + 1 < n_cols; ++i) {
      const auto v = parse_double(fields[i]);
      if (!v) schema_error(reader.record_line(), "bad numeric value '" + fields[i] + "'");
      row.values.push_back(*v);
    }
    row.label = label_from_text(fields[n_cols - 1], reader.record_line());
    table.rows.push_back(std::move(row));
  }
  return table;
}

// ARFF attribute names are quoted when they contain whitespace or
// separators; plain item ids stay bare.
std::string arff_quote(const std::string& name) {
  if (name.find_first_of(" \t,'\"{}%") == std::string::npos && !name.empty()) return name;
  std::string out = "'";
  for (char c : name) {
    if (c == '\'') out += "\\'";
    else out.push_back(c);
  }
  out += "'";
  return out;
}

std::string arff_unquote(std::string_view token) {
  if (token.size() >= 2 && token.front() == '\'' && token.back() == '\'') {
    std::string out;
    for (std::size_t i = 1; i + 1 < token.size(); ++i) {
      if (token[i] == '\\' && i + 2 < token.size() && token[i + 1] == '\'') continue;
      out.push_back(token[i]);
    }
    return out;
  }
  return std::string(token);
}

void write_arff(const FeatureTable& table, std::ostream& out) {
  out << "% mode=" << aggregation_mode_name(table.mode) << "\n";
  out << "@relation labmine-" << aggregation_mode_name(table.mode) << "\n\n";
  out << "@attribute P_ID numeric\n";
  for (const auto& name : table.attribute_names) {
    out << "@attribute " << arff_quote(name) << " numeric\n";
  }
  out << "@attribute CLASS {0,1}\n\n@data\n";
  for (const auto& row : table.rows) {
    out << row.patient_id;
    for (double v : row.values) out << ',' << format_double(v);
    out << ',' << label_to_text(row.label) << '\n';
  }
}

FeatureTable read_arff(std::istream& in) {
  FeatureTable table;
  std::string line;
  std::size_t line_no = 0;
  bool saw_relation = false;
  bool saw_pid = false;
  bool saw_class = false;
  bool in_data = false;
  std::vector<std::string> fields;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '%') {
      const auto pos = text.find("mode=");
      if (pos != std::string_view::npos && !in_data) {
        table.mode = aggregation_mode_from_name(trim(text.substr(pos + 5)));
      }
      continue;
    }
    if (!in_data) {
      if (iequals(text.substr(0, 9), "@relation")) {
        saw_relation = true;
        continue;
      }
      if (iequals(text.substr(0, 10), "@attribute")) {
        if (saw_class) schema_error(line_no, "CLASS must be the last attribute");
        std::string_view rest = trim(text.substr(10));
        // name then type, name possibly quoted
        std::size_t name_end;
        if (!rest.empty() && rest.front() == '\'') {
          name_end = rest.find('\'', 1);
          if (name_end == std::string_view::npos) schema_error(line_no, "unterminated attribute name");
          ++name_end;
        } else {
          name_end = rest.find_first_of(" \t");
          if (name_end == std::string_view::npos) schema_error(line_no, "attribute without a type");
        }
        const std::string name = arff_unquote(rest.substr(0, name_end));
        const std::string_view type = trim(rest.substr(name_end));
        if (iequals(name, "P_ID")) {
          if (saw_pid) schema_error(line_no, "duplicate P_ID attribute");
          saw_pid = true;
        } else if (iequals(name, "CLASS")) {
          std::string compact;
          for (char c : type) {
            if (c != ' ' && c != '\t') compact.push_back(c);
          }
          if (compact != "{0,1}" && compact != "{1,0}") {
            schema_error(line_no, "CLASS must be nominal {0,1}");
          }
          saw_class = true;
        } else {
          if (!saw_pid) schema_error(line_no, "first attribute must be P_ID");
          if (!iequals(type, "numeric") && !iequals(type, "real")) {
            schema_error(line_no, "attribute " + name + " must be numeric");
          }
          table.attribute_names.push_back(name);
        }
        continue;
      }
      if (iequals(text.substr(0, 5), "@data")) {
        if (!saw_relation) schema_error(line_no, "missing @relation");
        if (!saw_pid) schema_error(line_no, "missing P_ID attribute");
        if (!saw_class) schema_error(line_no, "missing CLASS attribute");
        check_attribute_names(table.attribute_names);
        in_data = true;
        continue;
      }
      schema_error(line_no, "unrecognized header line");
    }
    // data section
    fields.clear();
    std::stringstream row_stream{std::string(text)};
    std::string field;
    while (std::getline(row_stream, field, ',')) fields.push_back(field);
    const std::size_t n_cols = table.attribute_names.size() + 2;
    if (fields.size() != n_cols) {
      schema_error(line_no, "expected " + std::to_string(n_cols) + " values, got " +
                                std::to_string(fields.size()));
    }
    FeatureRow row;
    const auto pid = parse_int(fields[0]);
    if (!pid) schema_error(line_no, "bad patient id '" + fields[0] + "'");
    row.patient_id = *pid;
    for (std::size_t i = 1; i + 1 < n_cols; ++i) {
      const auto v = parse_double(fields[i]);
      if (!v) schema_error(line_no, "bad numeric value '" + fields[i] + "'");
      row.values.push_back(*v);
    }
    row.label = label_from_text(fields[n_cols - 1], line_no);
    table.rows.push_back(std::move(row));
  }
  if (!in_data) throw DataError("not an ARFF table: missing @data section");
  return table;
}

}  // namespace

void write_table(const FeatureTable& table, std::ostream& out, TableFormat format) {
  if (format == TableFormat::kDelimited) {
    write_delimited(table, out);
  } else {
    write_arff(table, out);
  }
}

void write_table(const FeatureTable& table, const std::filesystem::path& path, TableFormat format) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path.string());
  write_table(table, out, format);
  if (!out.good()) throw DataError("write failed: " + path.string());
}

FeatureTable read_table(std::istream& in, TableFormat format) {
  return format == TableFormat::kDelimited ? read_delimited(in) : read_arff(in);
}

FeatureTable read_table(const std::filesystem::path& path, TableFormat format) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open: " + path.string());
  return read_table(in, format);
}

TableFormat table_format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".arff" ? TableFormat::kArff : TableFormat::kDelimited;
}

}  // namespace labmine
