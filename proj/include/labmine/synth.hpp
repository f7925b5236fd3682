#ifndef LABMINE_SYNTH_HPP_
#define LABMINE_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

namespace labmine {

// Desk-scale corpus with a planted, recoverable signal: informative
// items carry disjoint class-conditional value ranges plus a
// class-dependent event-count shift, everything else is class-blind
// noise. Output is byte-identical for a fixed config.
struct SynthConfig {
  std::int64_t n_patients = 3000;
  std::int64_t n_items = 700;
  std::int64_t n_informative = 10;
  double prevalence = 0.3;  // death-class fraction
  std::uint64_t seed = 0;
};

struct SynthResult {
  std::filesystem::path events_path;
  std::filesystem::path items_path;
  std::filesystem::path outcomes_path;
  std::filesystem::path planted_path;
  std::filesystem::path manifest_path;
  std::vector<std::int64_t> planted_items;  // ascending
  std::int64_t n_events = 0;
  std::int64_t n_died = 0;
};

SynthResult synth_corpus(const SynthConfig& config,
                         const std::filesystem::path& out_dir);

}  // namespace labmine

#endif  // LABMINE_SYNTH_HPP_
