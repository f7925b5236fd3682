#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "labmine/bayes.hpp"
#include "labmine/rng.hpp"

#include "helpers.hpp"

using namespace labmine;
using labmine::test::make_table;
using labmine::test::one_column;
using labmine::test::random_table;

namespace {

double normal_density(double x, double mean, double variance) {
  const double d = x - mean;
  return std::exp(-d * d / (2.0 * variance)) /
         std::sqrt(2.0 * M_PI * variance);
}

}  // namespace

TEST_SUITE("nb_zeror") {

TEST_CASE("majority baseline reports raw class frequencies") {
  const FeatureTable table = one_column(
      {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, {0, 0, 0, 0, 0, 0, 0, 1, 1, 1});
  const ZeroRModel model = train_zero_r(table);
  CHECK(model.class_counts[0] == 7);
  CHECK(model.class_counts[1] == 3);
  const auto proba = model.predict_proba();
  CHECK(proba[0] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(proba[1] == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("majority baseline edge cases") {
  const ZeroRModel untrained;
  const auto proba = untrained.predict_proba();
  CHECK(proba[0] == 0.5);
  CHECK(proba[1] == 0.5);

  FeatureTable empty;
  empty.attribute_names = {"50001"};
  CHECK_THROWS_AS(train_zero_r(empty), std::invalid_argument);

  const FeatureTable pure = one_column({1, 2, 3}, {1, 1, 1});
  const auto one_sided = train_zero_r(pure).predict_proba();
  CHECK(one_sided[0] == 0.0);
  CHECK(one_sided[1] == 1.0);
}

TEST_CASE("gaussian stats are per-class maximum likelihood with smoothed priors") {
  const FeatureTable table = one_column({1, 3, 5, 9}, {0, 0, 1, 1});
  const NaiveBayesModel model = train_naive_bayes(table);
  CHECK(model.class_present[0]);
  CHECK(model.class_present[1]);
  CHECK(model.priors[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(model.priors[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(model.per_attr[0][0].mean == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(model.per_attr[0][0].variance == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(model.per_attr[1][0].mean == doctest::Approx(7.0).epsilon(1e-12));
  CHECK(model.per_attr[1][0].variance == doctest::Approx(4.0).epsilon(1e-12));

  // Unbalanced counts pick up the add-one prior.
  const FeatureTable skewed = one_column({1, 2, 3, 9}, {0, 0, 0, 1});
  const NaiveBayesModel s = train_naive_bayes(skewed);
  CHECK(s.priors[0] == doctest::Approx(4.0 / 6.0).epsilon(1e-12));
  CHECK(s.priors[1] == doctest::Approx(2.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("decision flips at the midpoint of symmetric clusters") {
  std::vector<double> values;
  std::vector<int> labels;
  Rng rng(42);
  for (int i = 0; i < 40; ++i) {
    const double jitter = rng.uniform(-1.0, 1.0);
    values.push_back(i % 2 == 0 ? 0.0 + jitter : 10.0 + jitter);
    labels.push_back(i % 2 == 0 ? 0 : 1);
  }
  // Mirror the draws so both clusters share the exact same spread.
  for (std::size_t i = 0; i + 1 < values.size(); i += 2) {
    values[i + 1] = 10.0 - values[i];
  }
  const FeatureTable table = one_column(values, labels);
  const NaiveBayesModel model = train_naive_bayes(table);
  CHECK(model.per_attr[0][0].variance ==
        doctest::Approx(model.per_attr[1][0].variance).epsilon(1e-9));

  const auto low = model.predict_proba(std::vector<double>{2.0});
  const auto high = model.predict_proba(std::vector<double>{8.0});
  const auto mid = model.predict_proba(std::vector<double>{5.0});
  CHECK(low[0] > 0.5);
  CHECK(high[1] > 0.5);
  CHECK(mid[0] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("posterior matches the closed-form density ratio") {
  const FeatureTable table =
      one_column({1, 2, 4, 8, 9, 11}, {0, 0, 0, 1, 1, 1});
  const NaiveBayesModel model = train_naive_bayes(table);
  for (const double x : {0.0, 2.5, 5.0, 7.75, 12.0}) {
    const double like0 =
        model.priors[0] *
        normal_density(x, model.per_attr[0][0].mean, model.per_attr[0][0].variance);
    const double like1 =
        model.priors[1] *
        normal_density(x, model.per_attr[1][0].mean, model.per_attr[1][0].variance);
    const auto proba = model.predict_proba(std::vector<double>{x});
    CHECK(proba[0] == doctest::Approx(like0 / (like0 + like1)).epsilon(1e-9));
    CHECK(proba[1] == doctest::Approx(like1 / (like0 + like1)).epsilon(1e-9));
  }
}

TEST_CASE("probabilities are a valid distribution on random tables") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const FeatureTable table =
        random_table(rng, 10 + rng.below(40), 1 + rng.below(6));
    if (table.class_counts()[0] == 0 || table.class_counts()[1] == 0) continue;
    const NaiveBayesModel model = train_naive_bayes(table);
    for (const FeatureRow& row : table.rows) {
      const auto proba = model.predict_proba(row.values);
      CHECK(proba[0] >= 0.0);
      CHECK(proba[1] >= 0.0);
      CHECK(proba[0] + proba[1] == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("rescaling both priors leaves the posterior unchanged") {
  Rng rng(13);
  const FeatureTable table = random_table(rng, 30, 3);
  const NaiveBayesModel model = train_naive_bayes(table);
  NaiveBayesModel scaled = model;
  scaled.priors[0] *= 3.0;
  scaled.priors[1] *= 3.0;
  for (const FeatureRow& row : table.rows) {
    const auto a = model.predict_proba(row.values);
    const auto b = scaled.predict_proba(row.values);
    CHECK(a[0] == doctest::Approx(b[0]).epsilon(1e-12));
    CHECK(a[1] == doctest::Approx(b[1]).epsilon(1e-12));
  }
}

TEST_CASE("constant columns hit the variance floor and stay harmless") {
  const FeatureTable table = make_table(
      {"50001", "50002"},
      {{4.0, 1.0}, {4.0, 2.0}, {4.0, 8.0}, {4.0, 9.0}}, {0, 0, 1, 1});
  const NaiveBayesModel model = train_naive_bayes(table);
  CHECK(model.per_attr[0][0].variance == NaiveBayesModel::kVarianceFloor);
  CHECK(model.per_attr[1][0].variance == NaiveBayesModel::kVarianceFloor);
  const auto proba = model.predict_proba(std::vector<double>{4.0, 1.5});
  CHECK(std::isfinite(proba[0]));
  CHECK(std::isfinite(proba[1]));
  CHECK(proba[0] > 0.5);
}

TEST_CASE("single-class training pins the absent class at zero") {
  const FeatureTable table = one_column({1, 2, 3}, {1, 1, 1});
  const NaiveBayesModel model = train_naive_bayes(table);
  CHECK(model.class_present[1]);
  CHECK_FALSE(model.class_present[0]);
  const auto proba = model.predict_proba(std::vector<double>{-50.0});
  CHECK(proba[0] == 0.0);
  CHECK(proba[1] == 1.0);
}

TEST_CASE("degenerate inputs are rejected") {
  const FeatureTable tiny = one_column({1}, {0});
  CHECK_THROWS_AS(train_naive_bayes(tiny), std::invalid_argument);

  const FeatureTable table = one_column({1, 2, 3, 4}, {0, 0, 1, 1});
  const NaiveBayesModel model = train_naive_bayes(table);
  CHECK_THROWS_AS(model.predict_proba(std::vector<double>{1.0, 2.0}),
                  std::invalid_argument);

  const NaiveBayesModel untrained;
  CHECK_THROWS_AS(untrained.predict_proba(std::vector<double>{}),
                  std::invalid_argument);
}

}  // TEST_SUITE
