#ifndef LABMINE_RANK_HPP_
#define LABMINE_RANK_HPP_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "labmine/feature_table.hpp"

namespace labmine {

// Information gain in bits of one attribute after binning its column
// with the given ascending cut points. No cuts means one bin and zero
// gain.
double info_gain(const FeatureTable& table, std::size_t attr_index,
                 std::span<const double> cuts);

struct RankedAttribute {
  std::string name;
  double gain_bits = 0.0;

  bool operator==(const RankedAttribute&) const = default;
};

// Orders attribute names numerically when both sides parse as integers
// (item ids), lexicographically otherwise.
bool numeric_name_less(const std::string& a, const std::string& b);

// Discretizes every attribute against the class and ranks by gain,
// descending; ties break toward the smaller name. `jobs` caps worker
// threads; the result is identical for any jobs value.
std::vector<RankedAttribute> rank_all(const FeatureTable& table, int jobs = 1);

// Names of the top round-half-up(fraction * size) attributes.
// fraction must lie in (0, 1] and the rounded count must be positive.
std::vector<std::string> head_fraction(std::span<const RankedAttribute> ranked,
                                       double fraction);

void write_ranking(std::ostream& out, std::span<const RankedAttribute> ranked);
void write_ranking(const std::filesystem::path& path,
                   std::span<const RankedAttribute> ranked);
std::vector<RankedAttribute> read_ranking(std::istream& in);
std::vector<RankedAttribute> read_ranking(const std::filesystem::path& path);

}  // namespace labmine

#endif  // LABMINE_RANK_HPP_
