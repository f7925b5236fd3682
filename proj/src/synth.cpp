#include "labmine/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "labmine/csv.hpp"
#include "labmine/errors.hpp"
#include "labmine/events.hpp"
#include "labmine/rng.hpp"

namespace labmine {

namespace {

constexpr std::int64_t kItemIdBase = 50000;

const char* const kTestNames[] = {
    "Potassium",      "Sodium",        "Chloride",          "Bicarbonate",
    "Creatinine",     "Urea Nitrogen", "Glucose",           "Calcium Total",
    "Magnesium",      "Phosphate",     "Hematocrit",        "Hemoglobin",
    "Platelet Count", "White Blood Cells", "Red Blood Cells", "MCV",
    "MCH",            "RDW",           "Lactate",           "pH",
    "pO2",            "pCO2",          "Albumin",           "Bilirubin Total",
    "ALT",            "AST",           "Alkaline Phosphatase", "Troponin T",
    "INR",            "PTT"};
constexpr std::size_t kTestNameCount = std::size(kTestNames);

const char* const kFluids[] = {"BLOOD", "BLOOD", "BLOOD", "URINE"};
const char* const kCategories[] = {"CHEMISTRY", "HEMATOLOGY", "BLOOD GAS"};
const char* const kUnits[] = {"mEq/L", "mg/dL", "K/uL", "%",
                              "g/dL",  "IU/L",  "mmol/L", "sec"};
const char* const kNonNumericValues[] = {"TR", "HEMOLYZED", "NEG"};

struct ItemProfile {
  std::int64_t item_id = 0;
  bool planted = false;
  // Noise value model (class-blind).
  double mean = 0.0;
  double sd = 1.0;
  // Planted value model: survivors draw from [low, low+width], the
  // death class from [low+2*width, low+3*width]; the gap keeps the
  // ranges disjoint.
  double low = 0.0;
  double width = 1.0;
  std::string unit;
};

struct PendingEvent {
  std::int64_t item_id = 0;
  Timestamp time;
  bool numeric = true;
  double value = 0.0;
  const char* text = nullptr;  // non-numeric VALUE
  bool abnormal = false;
};

std::string format_chart_time(const Timestamp& t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%d/%d/%04d %02d:%02d", t.month, t.day, t.year,
                t.hour, t.minute);
  return buf;
}

Timestamp random_time(Rng& rng) {
  Timestamp t;
  t.year = 2805 + static_cast<int>(rng.below(3));
  t.month = 1 + static_cast<int>(rng.below(12));
  t.day = 1 + static_cast<int>(rng.below(28));
  t.hour = static_cast<int>(rng.below(24));
  t.minute = static_cast<int>(rng.below(60));
  t.second = 0;
  return t;
}

}  // namespace

SynthResult synth_corpus(const SynthConfig& config,
                         const std::filesystem::path& out_dir) {
  if (config.n_patients < 1)
    throw std::invalid_argument("synth: need at least 1 patient");
  if (config.n_items < 1) throw std::invalid_argument("synth: need at least 1 item");
  if (config.n_informative < 0 || config.n_informative > config.n_items)
    throw std::invalid_argument(
        "synth: informative count must lie in [0, n_items]");
  if (!(config.prevalence > 0.0 && config.prevalence < 1.0))
    throw std::invalid_argument("synth: prevalence must be in (0, 1)");

  std::filesystem::create_directories(out_dir);
  SynthResult result;
  result.events_path = out_dir / "labevents.csv";
  result.items_path = out_dir / "labitems.csv";
  result.outcomes_path = out_dir / "outcomes.csv";
  result.planted_path = out_dir / "planted_items.csv";
  result.manifest_path = out_dir / "manifest.json";

  const std::size_t n_items = static_cast<std::size_t>(config.n_items);
  const std::size_t n_informative = static_cast<std::size_t>(config.n_informative);

  // Stream 0 fixes the corpus-level draws: planted set, item profiles,
  // then outcomes, in that order.
  Rng corpus_rng = Rng::stream(config.seed, 0);

  std::set<std::size_t> planted_idx;
  for (std::size_t idx :
       corpus_rng.sample_without_replacement(n_items, n_informative))
    planted_idx.insert(idx);

  std::vector<ItemProfile> items(n_items);
  for (std::size_t i = 0; i < n_items; ++i) {
    ItemProfile& item = items[i];
    item.item_id = kItemIdBase + 1 + static_cast<std::int64_t>(i);
    item.planted = planted_idx.contains(i);
    item.mean = corpus_rng.uniform(20.0, 120.0);
    item.sd = corpus_rng.uniform(1.0, 15.0);
    item.low = corpus_rng.uniform(10.0, 80.0);
    item.width = corpus_rng.uniform(5.0, 15.0);
    item.unit = kUnits[i % std::size(kUnits)];
    if (item.planted) result.planted_items.push_back(item.item_id);
  }

  std::vector<bool> died(static_cast<std::size_t>(config.n_patients));
  for (std::size_t p = 0; p < died.size(); ++p) {
    died[p] = corpus_rng.bernoulli(config.prevalence);
    if (died[p]) ++result.n_died;
  }

  std::ofstream events(result.events_path);
  if (!events)
    throw DataError("cannot open " + result.events_path.string() + " for writing");
  write_csv_record(events, {"SUBJECT_ID", "HADM_ID", "ICUSTAY_ID", "ITEMID",
                            "CHARTTIME", "VALUE", "VALUENUM", "FLAG", "VALUEUOM"});

  std::vector<PendingEvent> pending;
  std::vector<std::string> fields;
  for (std::int64_t p = 1; p <= config.n_patients; ++p) {
    // Patient streams start at an offset so they never collide with
    // the corpus stream.
    Rng rng = Rng::stream(config.seed, 1000000 + static_cast<std::uint64_t>(p));
    const bool dead = died[static_cast<std::size_t>(p - 1)];

    pending.clear();
    for (const ItemProfile& item : items) {
      std::int64_t count = 0;
      if (item.planted) {
        const double presence = dead ? 0.95 : 0.85;
        if (rng.bernoulli(presence))
          count = dead ? 3 + rng.poisson(1.5) : 1 + rng.poisson(0.7);
      } else {
        if (rng.bernoulli(0.15)) count = 1 + rng.poisson(0.5);
      }
      for (std::int64_t e = 0; e < count; ++e) {
        PendingEvent event;
        event.item_id = item.item_id;
        event.time = random_time(rng);
        if (item.planted) {
          const double lo = dead ? item.low + 2.0 * item.width : item.low;
          event.value = rng.uniform(lo, lo + item.width);
          event.abnormal = dead;
        } else {
          if (rng.bernoulli(0.02)) {
            event.numeric = false;
            event.text = kNonNumericValues[rng.below(std::size(kNonNumericValues))];
          } else {
            event.value = item.mean + item.sd * rng.normal();
          }
          event.abnormal = event.numeric &&
                           std::abs(event.value - item.mean) > 2.0 * item.sd;
        }
        pending.push_back(event);
      }
    }
    std::stable_sort(pending.begin(), pending.end(),
                     [](const PendingEvent& a, const PendingEvent& b) {
                       return a.time < b.time;
                     });

    const std::string subject = std::to_string(p);
    const std::string hadm = std::to_string(20000 + p);
    const std::string icustay = p % 7 == 0 ? "" : std::to_string(1 + p % 40);
    for (const PendingEvent& event : pending) {
      fields.clear();
      fields.push_back(subject);
      fields.push_back(hadm);
      fields.push_back(icustay);
      fields.push_back(std::to_string(event.item_id));
      fields.push_back(format_chart_time(event.time));
      if (event.numeric) {
        const std::string value = format_double(event.value);
        fields.push_back(value);
        fields.push_back(value);
      } else {
        fields.push_back(event.text);
        fields.push_back("");
      }
      fields.push_back(event.abnormal ? "abnormal" : "");
      fields.push_back(items[static_cast<std::size_t>(event.item_id -
                                                      kItemIdBase - 1)]
                           .unit);
      write_csv_record(events, fields);
      ++result.n_events;
    }
  }
  events.close();

  std::ofstream catalog(result.items_path);
  if (!catalog)
    throw DataError("cannot open " + result.items_path.string() + " for writing");
  write_csv_record(catalog, {"ITEMID", "TEST_NAME", "FLUID", "CATEGORY",
                             "LOINC_CODE", "LOINC_DESCRIPTION"});
  for (std::size_t i = 0; i < n_items; ++i) {
    std::string name = kTestNames[i % kTestNameCount];
    if (i >= kTestNameCount)
      name += " #" + std::to_string(i / kTestNameCount + 1);
    const std::string loinc =
        std::to_string(1000 + i) + "-" + std::to_string(i % 10);
    write_csv_record(catalog,
                     {std::to_string(items[i].item_id), name,
                      kFluids[i % std::size(kFluids)],
                      kCategories[i % std::size(kCategories)], loinc,
                      name + " measurement"});
  }
  catalog.close();

  std::ofstream outcomes(result.outcomes_path);
  if (!outcomes)
    throw DataError("cannot open " + result.outcomes_path.string() +
                    " for writing");
  write_csv_record(outcomes, {"SUBJECT_ID", "DIED"});
  for (std::int64_t p = 1; p <= config.n_patients; ++p)
    write_csv_record(outcomes, {std::to_string(p),
                                died[static_cast<std::size_t>(p - 1)] ? "1" : "0"});
  outcomes.close();

  std::ofstream planted(result.planted_path);
  if (!planted)
    throw DataError("cannot open " + result.planted_path.string() +
                    " for writing");
  write_csv_record(planted, {"ITEMID"});
  for (std::int64_t id : result.planted_items)
    write_csv_record(planted, {std::to_string(id)});
  planted.close();

  nlohmann::json manifest{
      {"n_patients", config.n_patients},
      {"n_items", config.n_items},
      {"n_informative", config.n_informative},
      {"prevalence", config.prevalence},
      {"seed", config.seed},
      {"n_events", result.n_events},
      {"n_died", result.n_died},
      {"item_id_base", kItemIdBase + 1},
      {"planted_items", result.planted_items},
      {"files",
       {{"events", result.events_path.filename().string()},
        {"items", result.items_path.filename().string()},
        {"outcomes", result.outcomes_path.filename().string()},
        {"planted", result.planted_path.filename().string()}}}};
  std::ofstream manifest_out(result.manifest_path);
  if (!manifest_out)
    throw DataError("cannot open " + result.manifest_path.string() +
                    " for writing");
  manifest_out << manifest.dump(2) << '\n';
  return result;
}

}  // namespace labmine
