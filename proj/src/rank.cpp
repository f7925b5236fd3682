#include "labmine/rank.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "labmine/csv.hpp"
#include "labmine/discretize.hpp"
#include "labmine/errors.hpp"
#include "labmine/parallel.hpp"
#include "labmine/resample.hpp"

namespace labmine {

double info_gain(const FeatureTable& table, std::size_t attr_index,
                 std::span<const double> cuts) {
  if (attr_index >= table.n_attributes())
    throw std::invalid_argument("info_gain: attribute index out of range");
  const std::size_t n_bins = cuts.size() + 1;
  std::vector<std::array<std::int64_t, 2>> bins(n_bins, {0, 0});
  std::array<std::int64_t, 2> totals{0, 0};
  for (const FeatureRow& row : table.rows) {
    const std::size_t b = bin_index(cuts, row.values[attr_index]);
    ++bins[b][static_cast<std::size_t>(row.label)];
    ++totals[static_cast<std::size_t>(row.label)];
  }
  const double n = static_cast<double>(table.n_rows());
  double conditional = 0.0;
  for (const auto& counts : bins) {
    const std::int64_t bin_n = counts[0] + counts[1];
    if (bin_n == 0) continue;
    conditional += (static_cast<double>(bin_n) / n) * entropy(counts);
  }
  return entropy(totals) - conditional;
}

bool numeric_name_less(const std::string& a, const std::string& b) {
  const auto na = parse_int(a);
  const auto nb = parse_int(b);
  if (na && nb) {
    if (*na != *nb) return *na < *nb;
    return a < b;  // "007" vs "7"
  }
  return a < b;
}

std::vector<RankedAttribute> rank_all(const FeatureTable& table, int jobs) {
  if (table.n_rows() == 0) throw std::invalid_argument("rank_all: empty table");
  const std::size_t m = table.n_attributes();
  std::vector<RankedAttribute> ranked(m);
  parallel_for(m, jobs, [&](std::size_t j) {
    std::vector<double> column(table.n_rows());
    std::vector<int> labels(table.n_rows());
    for (std::size_t i = 0; i < table.n_rows(); ++i) {
      column[i] = table.rows[i].values[j];
      labels[i] = table.rows[i].label;
    }
    const std::vector<double> cuts = mdl_discretize(column, labels);
    ranked[j].name = table.attribute_names[j];
    ranked[j].gain_bits = cuts.empty() ? 0.0 : info_gain(table, j, cuts);
  });
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedAttribute& a, const RankedAttribute& b) {
                     if (a.gain_bits != b.gain_bits) return a.gain_bits > b.gain_bits;
                     return numeric_name_less(a.name, b.name);
                   });
  return ranked;
}

std::vector<std::string> head_fraction(std::span<const RankedAttribute> ranked,
                                       double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw std::invalid_argument("head_fraction: fraction must be in (0, 1]");
  if (ranked.empty()) throw std::invalid_argument("head_fraction: empty ranking");
  const std::size_t k =
      round_half_up(fraction * static_cast<double>(ranked.size()));
  if (k == 0)
    throw std::invalid_argument("head_fraction: fraction selects zero attributes");
  std::vector<std::string> names;
  names.reserve(k);
  for (std::size_t i = 0; i < k && i < ranked.size(); ++i)
    names.push_back(ranked[i].name);
  return names;
}

void write_ranking(std::ostream& out, std::span<const RankedAttribute> ranked) {
  write_csv_record(out, {"RANK", "ITEMID", "GAIN_BITS"});
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    write_csv_record(out, {std::to_string(i + 1), ranked[i].name,
                           format_double(ranked[i].gain_bits)});
  }
}

void write_ranking(const std::filesystem::path& path,
                   std::span<const RankedAttribute> ranked) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  write_ranking(out, ranked);
}

std::vector<RankedAttribute> read_ranking(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> record;
  if (!reader.next_record(record))
    throw DataError("ranking file: missing header");
  if (record.size() != 3 || !iequals(trim(record[0]), "RANK") ||
      !iequals(trim(record[1]), "ITEMID") || !iequals(trim(record[2]), "GAIN_BITS"))
    throw DataError("ranking file: expected header RANK,ITEMID,GAIN_BITS");
  std::vector<RankedAttribute> ranked;
  while (reader.next_record(record)) {
    const std::string where = "ranking file line " + std::to_string(reader.record_line());
    if (record.size() != 3) throw DataError(where + ": expected 3 fields");
    const auto rank = parse_int(trim(record[0]));
    if (!rank || *rank != static_cast<std::int64_t>(ranked.size()) + 1)
      throw DataError(where + ": RANK values must run 1..n in order");
    const auto gain = parse_double(trim(record[2]));
    if (!gain) throw DataError(where + ": bad GAIN_BITS value");
    ranked.push_back({std::string(trim(record[1])), *gain});
  }
  return ranked;
}

std::vector<RankedAttribute> read_ranking(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_ranking(in);
}

}  // namespace labmine
