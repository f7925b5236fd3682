#ifndef LABMINE_DISCRETIZE_HPP_
#define LABMINE_DISCRETIZE_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace labmine {

// Shannon entropy in bits of a class-count vector. Zero counts
// contribute zero; an all-zero vector is an error.
double entropy(std::span<const std::int64_t> class_counts);

// Supervised binning by recursive entropy minimization: candidate cuts
// sit at midpoints between adjacent sorted values whose class sets
// differ, and a cut is kept only when its gain clears the
// minimum-description-length acceptance bound. Returns ascending cut
// points; an empty result marks the column uninformative.
std::vector<double> mdl_discretize(std::span<const double> values, std::span<const int> labels);

// Index of the bin holding `value` under ascending cuts; value <= cut
// falls on the low side, mirroring the tree split convention.
std::size_t bin_index(std::span<const double> cuts, double value);

}  // namespace labmine

#endif  // LABMINE_DISCRETIZE_HPP_
