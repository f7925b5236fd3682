#ifndef LABMINE_MONITOR_HPP_
#define LABMINE_MONITOR_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "labmine/events.hpp"
#include "labmine/model.hpp"

namespace labmine {

// Live per-patient aggregates, one slot per universe item. Feeding the
// same events through ingest_event reproduces the batch feature row
// exactly, including summation order.
struct PatientState {
  struct ItemAggregate {
    double sum = 0.0;                 // numeric values, in arrival order
    std::int64_t numeric_count = 0;
    std::int64_t total_count = 0;
  };

  std::int64_t subject_id = 0;
  AggregationMode mode = AggregationMode::kAvg;
  std::vector<std::int64_t> universe;          // ascending item ids
  std::map<std::int64_t, ItemAggregate> items; // universe items only
  std::optional<Timestamp> last_update;
  std::size_t events_seen = 0;
};

PatientState make_patient_state(std::int64_t subject_id,
                                std::span<const std::int64_t> universe,
                                AggregationMode mode);

// Item universe encoded in a model's attribute names; throws DataError
// when a name is not an item id.
std::vector<std::int64_t> schema_item_universe(const ModelSchema& schema);

// Applies one event. Events for items outside the universe advance
// last_update and the event counter but leave aggregates untouched,
// matching the batch builder. Subject mismatch throws.
void ingest_event(PatientState& state, const LabEvent& event);

// Feature row in universe order under the state's aggregation mode.
std::vector<double> materialize(const PatientState& state);

// Probability of the death class for the state's current row. Pure.
// Throws DataError when the model's mode or universe disagrees.
double score(const Model& model, const PatientState& state);

struct WarningEvent {
  std::int64_t subject_id = 0;
  Timestamp chart_time;  // triggering event's time
  double probability = 0.0;
  double threshold = 0.0;
};

// WarningEvent iff probability >= threshold, carrying the state's
// triggering context. Both arguments must lie in [0, 1].
std::optional<WarningEvent> check_threshold(double probability, double threshold,
                                            const PatientState& state);

struct PatientSummary {
  std::int64_t subject_id = 0;
  double final_probability = 0.0;
  std::size_t n_events = 0;
  std::size_t n_warnings = 0;
};

struct ReplayOptions {
  double threshold = 0.5;
  // One warning per crossing episode: after a warning, the patient
  // re-arms only once the probability falls below the threshold.
  // Disabled, every scoring at or above the threshold warns.
  bool suppress_repeats = true;
};

struct ReplayResult {
  std::vector<WarningEvent> warnings;     // in event order
  std::vector<PatientSummary> summaries;  // ascending subject id
};

// Streams events in order through per-patient states, scoring after
// every event. The model is consumed as-is; no training happens here.
ReplayResult replay(const Model& model, std::span<const LabEvent> events,
                    const ReplayOptions& options);

}  // namespace labmine

#endif  // LABMINE_MONITOR_HPP_
