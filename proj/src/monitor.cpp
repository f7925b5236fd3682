#include "labmine/monitor.hpp"

#include <algorithm>
#include <stdexcept>

#include "labmine/csv.hpp"
#include "labmine/errors.hpp"

namespace labmine {

PatientState make_patient_state(std::int64_t subject_id,
                                std::span<const std::int64_t> universe,
                                AggregationMode mode) {
  if (universe.empty())
    throw std::invalid_argument("patient state: empty item universe");
  PatientState state;
  state.subject_id = subject_id;
  state.mode = mode;
  state.universe.assign(universe.begin(), universe.end());
  if (!std::is_sorted(state.universe.begin(), state.universe.end()) ||
      std::adjacent_find(state.universe.begin(), state.universe.end()) !=
          state.universe.end())
    throw std::invalid_argument("patient state: universe must be strictly ascending");
  return state;
}

std::vector<std::int64_t> schema_item_universe(const ModelSchema& schema) {
  std::vector<std::int64_t> universe;
  universe.reserve(schema.attribute_names.size());
  for (const std::string& name : schema.attribute_names) {
    const auto id = parse_int(name);
    if (!id)
      throw DataError("model attribute '" + name + "' is not an item id");
    universe.push_back(*id);
  }
  return universe;
}

void ingest_event(PatientState& state, const LabEvent& event) {
  if (event.subject_id != state.subject_id)
    throw std::invalid_argument("ingest_event: event subject does not match state");
  ++state.events_seen;
  state.last_update = event.chart_time;
  if (!std::binary_search(state.universe.begin(), state.universe.end(),
                          event.item_id))
    return;
  PatientState::ItemAggregate& agg = state.items[event.item_id];
  ++agg.total_count;
  if (event.value_num) {
    agg.sum += *event.value_num;
    ++agg.numeric_count;
  }
}

std::vector<double> materialize(const PatientState& state) {
  std::vector<double> row(state.universe.size(), 0.0);
  for (std::size_t j = 0; j < state.universe.size(); ++j) {
    const auto it = state.items.find(state.universe[j]);
    if (it == state.items.end()) continue;
    const PatientState::ItemAggregate& agg = it->second;
    if (state.mode == AggregationMode::kAvg) {
      if (agg.numeric_count > 0)
        row[j] = agg.sum / static_cast<double>(agg.numeric_count);
    } else {
      row[j] = static_cast<double>(agg.total_count);
    }
  }
  return row;
}

double score(const Model& model, const PatientState& state) {
  if (model.schema.mode != state.mode)
    throw DataError("monitor: model aggregation mode '" +
                    std::string(aggregation_mode_name(model.schema.mode)) +
                    "' does not match patient state mode '" +
                    std::string(aggregation_mode_name(state.mode)) + "'");
  if (schema_item_universe(model.schema) != state.universe)
    throw DataError("monitor: model item universe does not match patient state");
  const std::vector<double> row = materialize(state);
  return predict_proba(model, row)[1];
}

std::optional<WarningEvent> check_threshold(double probability, double threshold,
                                            const PatientState& state) {
  if (!(probability >= 0.0 && probability <= 1.0))
    throw std::invalid_argument("check_threshold: probability outside [0, 1]");
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw std::invalid_argument("check_threshold: threshold outside [0, 1]");
  if (probability < threshold) return std::nullopt;
  WarningEvent warning;
  warning.subject_id = state.subject_id;
  if (state.last_update) warning.chart_time = *state.last_update;
  warning.probability = probability;
  warning.threshold = threshold;
  return warning;
}

ReplayResult replay(const Model& model, std::span<const LabEvent> events,
                    const ReplayOptions& options) {
  if (!(options.threshold >= 0.0 && options.threshold <= 1.0))
    throw std::invalid_argument("replay: threshold outside [0, 1]");
  const std::vector<std::int64_t> universe = schema_item_universe(model.schema);

  struct Tracked {
    PatientState state;
    bool armed = true;
    std::size_t n_warnings = 0;
    double last_probability = 0.0;
  };
  std::map<std::int64_t, Tracked> patients;

  ReplayResult result;
  for (const LabEvent& event : events) {
    auto [it, inserted] = patients.try_emplace(event.subject_id);
    Tracked& tracked = it->second;
    if (inserted)
      tracked.state = make_patient_state(event.subject_id, universe,
                                         model.schema.mode);
    ingest_event(tracked.state, event);
    const double p = score(model, tracked.state);
    tracked.last_probability = p;
    if (p >= options.threshold) {
      if (tracked.armed || !options.suppress_repeats) {
        auto warning = check_threshold(p, options.threshold, tracked.state);
        result.warnings.push_back(*warning);
        ++tracked.n_warnings;
      }
      tracked.armed = false;
    } else {
      tracked.armed = true;
    }
  }

  for (const auto& [subject_id, tracked] : patients) {
    PatientSummary summary;
    summary.subject_id = subject_id;
    summary.final_probability = tracked.last_probability;
    summary.n_events = tracked.state.events_seen;
    summary.n_warnings = tracked.n_warnings;
    result.summaries.push_back(summary);
  }
  return result;
}

}  // namespace labmine
