#ifndef LABMINE_TESTS_HELPERS_HPP_
#define LABMINE_TESTS_HELPERS_HPP_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <utility>
#include <vector>

#include "labmine/feature_table.hpp"
#include "labmine/rng.hpp"

namespace labmine::test {

// Table literal: patients numbered 1..n in row order.
inline FeatureTable make_table(std::vector<std::string> names,
                               const std::vector<std::vector<double>>& rows,
                               const std::vector<int>& labels,
                               AggregationMode mode = AggregationMode::kAvg) {
  FeatureTable table;
  table.attribute_names = std::move(names);
  table.mode = mode;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    FeatureRow row;
    row.patient_id = static_cast<std::int64_t>(i + 1);
    row.values = rows[i];
    row.label = labels[i];
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline FeatureTable one_column(const std::vector<double>& values,
                               const std::vector<int>& labels) {
  std::vector<std::vector<double>> rows;
  rows.reserve(values.size());
  for (double v : values) rows.push_back({v});
  return make_table({"50001"}, rows, labels);
}

// Random mixed table: roughly half the columns carry small integer
// codes (forcing exact value ties), the rest continuous draws.
inline FeatureTable random_table(Rng& rng, std::size_t n_rows,
                                 std::size_t n_attrs) {
  std::vector<std::string> names;
  std::vector<bool> nominal;
  for (std::size_t a = 0; a < n_attrs; ++a) {
    names.push_back(std::to_string(50001 + a));
    nominal.push_back(rng.bernoulli(0.5));
  }
  std::vector<std::vector<double>> rows(n_rows);
  std::vector<int> labels(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) {
    for (std::size_t a = 0; a < n_attrs; ++a) {
      rows[i].push_back(nominal[a] ? static_cast<double>(rng.below(4))
                                   : rng.uniform(0.0, 10.0));
    }
    labels[i] = rng.bernoulli(0.5) ? 1 : 0;
  }
  return make_table(std::move(names), rows, labels);
}

// Scratch directory removed at scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<std::uint64_t> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("labmine_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void spit(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace labmine::test

#endif  // LABMINE_TESTS_HELPERS_HPP_
