#ifndef LABMINE_ERRORS_HPP_
#define LABMINE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace labmine {

// Raised for problems in input data: bad files, schema mismatches,
// violated key constraints. The CLI maps these to exit code 2, while
// std::invalid_argument (bad parameters / API misuse) maps to exit 1.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace labmine

#endif  // LABMINE_ERRORS_HPP_
