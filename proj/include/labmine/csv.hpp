#ifndef LABMINE_CSV_HPP_
#define LABMINE_CSV_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace labmine {

// Minimal comma-separated reader: double-quoted fields with "" escapes,
// embedded newlines inside quotes, CRLF tolerated. Lines starting with
// '#' at a record boundary are treated as comments (report stamps) and
// skipped.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Reads one record into `fields`; false at end of input.
  bool next_record(std::vector<std::string>& fields);

  // 1-based line number of the start of the last record read.
  std::size_t record_line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
};

std::string csv_escape(std::string_view field);
void write_csv_record(std::ostream& out, const std::vector<std::string>& fields);

// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

// Strict, locale-free parses; nullopt on any trailing garbage.
std::optional<std::int64_t> parse_int(std::string_view text);
std::optional<double> parse_double(std::string_view text);

std::string_view trim(std::string_view text);
bool iequals(std::string_view a, std::string_view b);

}  // namespace labmine

#endif  // LABMINE_CSV_HPP_
