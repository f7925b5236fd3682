#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "labmine/discretize.hpp"
#include "labmine/errors.hpp"
#include "labmine/rank.hpp"
#include "labmine/rng.hpp"

#include "helpers.hpp"
#include "oracle_info_gain.hpp"

using namespace labmine;
using labmine::test::make_table;
using labmine::test::one_column;
using labmine::test::random_table;
namespace oracle = labmine::test::oracle;

TEST_SUITE("featsel") {

TEST_CASE("entropy of the canonical class distributions") {
  CHECK(entropy(std::array<std::int64_t, 2>{1, 1}) == doctest::Approx(1.0));
  CHECK(entropy(std::array<std::int64_t, 2>{5, 0}) == doctest::Approx(0.0));
  CHECK(entropy(std::array<std::int64_t, 2>{9, 5}) ==
        doctest::Approx(0.940286).epsilon(1e-6));
  CHECK_THROWS_AS(entropy(std::array<std::int64_t, 2>{0, 0}),
                  std::invalid_argument);
}

TEST_CASE("perfectly separated column discretizes at the boundary midpoint") {
  const std::vector<double> values{1.0, 2.0, 3.0, 4.0};
  const std::vector<int> labels{0, 0, 1, 1};
  const std::vector<double> cuts = mdl_discretize(values, labels);
  REQUIRE(cuts.size() == 1);
  CHECK(cuts[0] == doctest::Approx(2.5));
}

TEST_CASE("constant column yields no cuts") {
  const std::vector<double> values{7.0, 7.0, 7.0};
  const std::vector<int> labels{0, 1, 0};
  CHECK(mdl_discretize(values, labels).empty());
}

TEST_CASE("alternating labels match the brute-force acceptance decision") {
  const std::vector<double> values{1, 2, 3, 4, 5, 6};
  const std::vector<int> labels{0, 1, 0, 1, 0, 1};
  CHECK(mdl_discretize(values, labels) == oracle::slow_cuts(values, labels));
  // No candidate can pay its description cost here.
  CHECK(mdl_discretize(values, labels).empty());
}

TEST_CASE("cuts sit strictly between observed values, ascending") {
  Rng rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 5 + rng.below(40);
    std::vector<double> values;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) {
      values.push_back(rng.bernoulli(0.5) ? static_cast<double>(rng.below(5))
                                          : rng.uniform(0.0, 10.0));
      labels.push_back(rng.bernoulli(0.5) ? 1 : 0);
    }
    const std::vector<double> cuts = mdl_discretize(values, labels);
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t c = 0; c < cuts.size(); ++c) {
      if (c > 0) CHECK(cuts[c - 1] < cuts[c]);
      CHECK(cuts[c] > sorted.front());
      CHECK(cuts[c] < sorted.back());
      // Never equal to an observed value.
      CHECK(std::find(sorted.begin(), sorted.end(), cuts[c]) == sorted.end());
    }
  }
}

TEST_CASE("two-bin fourteen-row gain works out to 0.048127 bits") {
  // Bin membership encoded directly in the value: class counts (9,5)
  // split as (6,2) below the cut and (3,3) above.
  std::vector<double> values;
  std::vector<int> labels;
  for (int i = 0; i < 6; ++i) { values.push_back(1.0); labels.push_back(0); }
  for (int i = 0; i < 2; ++i) { values.push_back(1.0); labels.push_back(1); }
  for (int i = 0; i < 3; ++i) { values.push_back(2.0); labels.push_back(0); }
  for (int i = 0; i < 3; ++i) { values.push_back(2.0); labels.push_back(1); }
  const FeatureTable table = one_column(values, labels);
  const std::vector<double> cuts{1.5};
  CHECK(info_gain(table, 0, cuts) == doctest::Approx(0.048127).epsilon(1e-4));
  CHECK(info_gain(table, 0, cuts) ==
        doctest::Approx(0.940286 - (8.0 / 14.0) * 0.811278 - (6.0 / 14.0) * 1.0)
            .epsilon(1e-5));
}

TEST_CASE("an attribute that determines the class earns the full entropy") {
  const FeatureTable table =
      one_column({1, 1, 1, 5, 5, 5, 5}, {0, 0, 0, 1, 1, 1, 1});
  const std::vector<double> cuts{3.0};
  const std::array<std::int64_t, 2> counts{3, 4};
  CHECK(info_gain(table, 0, cuts) == doctest::Approx(entropy(counts)));
}

TEST_CASE("no cuts means a single bin and exactly zero gain") {
  const FeatureTable table = one_column({4, 4, 4, 4}, {0, 1, 0, 1});
  CHECK(info_gain(table, 0, {}) == 0.0);
}

TEST_CASE("gain is bounded by the class entropy and survives row shuffling") {
  Rng rng(77);
  FeatureTable table = random_table(rng, 40, 6);
  const std::vector<RankedAttribute> ranked = rank_all(table);
  const double h = entropy(table.class_counts());
  for (const RankedAttribute& r : ranked) {
    CHECK(r.gain_bits >= 0.0);
    CHECK(r.gain_bits <= h + 1e-12);
  }
  rng.shuffle(table.rows);
  const std::vector<RankedAttribute> shuffled = rank_all(table);
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    CHECK(shuffled[i].name == ranked[i].name);
    CHECK(shuffled[i].gain_bits == doctest::Approx(ranked[i].gain_bits).epsilon(1e-12));
  }
}

TEST_CASE("single informative attribute ranks first at full class entropy") {
  Rng rng(5);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 20; ++i) {
    const int label = rng.bernoulli(0.5) ? 1 : 0;
    rows.push_back({label == 0 ? 1.0 : 9.0, 4.0, 4.0});
    labels.push_back(label);
  }
  const FeatureTable table = make_table({"50003", "50001", "50002"}, rows, labels);
  const std::vector<RankedAttribute> ranked = rank_all(table);
  CHECK(ranked[0].name == "50003");
  CHECK(ranked[0].gain_bits == doctest::Approx(entropy(table.class_counts())));
  CHECK(ranked[1].gain_bits == 0.0);
  CHECK(ranked[2].gain_bits == 0.0);
  // Zero-gain tie breaks toward the smaller item id.
  CHECK(ranked[1].name == "50001");
  CHECK(ranked[2].name == "50002");
}

TEST_CASE("duplicated column earns the same gain and sits adjacent") {
  Rng rng(13);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) {
    const int label = rng.bernoulli(0.5) ? 1 : 0;
    // Column one carries the class; the others are noise.
    rows.push_back({label == 0 ? rng.uniform(0.0, 3.0) : rng.uniform(6.0, 9.0),
                    rng.uniform(0.0, 9.0), rng.uniform(0.0, 9.0)});
    labels.push_back(label);
  }
  const FeatureTable table = make_table({"50001", "50002", "50003"}, rows, labels);
  const std::vector<RankedAttribute> before = rank_all(table);

  FeatureTable extended = table;
  extended.attribute_names.push_back("60000");
  for (FeatureRow& row : extended.rows) row.values.push_back(row.values[0]);
  const std::vector<RankedAttribute> after = rank_all(extended);

  double original_gain = 0.0;
  double clone_gain = 0.0;
  std::size_t original_pos = 0;
  std::size_t clone_pos = 0;
  for (std::size_t i = 0; i < after.size(); ++i) {
    if (after[i].name == "50001") { original_gain = after[i].gain_bits; original_pos = i; }
    if (after[i].name == "60000") { clone_gain = after[i].gain_bits; clone_pos = i; }
  }
  CHECK(clone_gain == original_gain);
  CHECK((clone_pos == original_pos + 1 || original_pos == clone_pos + 1));

  // Other attributes keep their gains bit for bit.
  for (const RankedAttribute& b : before) {
    if (b.name == "50001") continue;
    for (const RankedAttribute& a : after) {
      if (a.name == b.name) CHECK(a.gain_bits == b.gain_bits);
    }
  }
}

TEST_CASE("gains and ranking order match the brute-force recount") {
  Rng rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n_rows = 5 + rng.below(46);
    const std::size_t n_attrs = 1 + rng.below(20);
    const FeatureTable table = random_table(rng, n_rows, n_attrs);
    const std::vector<RankedAttribute> fast = rank_all(table);
    const std::vector<RankedAttribute> slow = oracle::slow_rank(table);
    REQUIRE(fast.size() == slow.size());
    for (std::size_t i = 0; i < fast.size(); ++i) {
      CHECK(fast[i].name == slow[i].name);
      CHECK(std::abs(fast[i].gain_bits - slow[i].gain_bits) < 1e-9);
    }
  }
}

TEST_CASE("head counts for 619 attributes reproduce the published column") {
  std::vector<RankedAttribute> ranked;
  for (int i = 0; i < 619; ++i)
    ranked.push_back({std::to_string(50001 + i), 1.0 / (i + 1)});
  const std::array<std::size_t, 10> expected{62, 124, 186, 248, 310,
                                             371, 433, 495, 557, 619};
  for (int tenth = 1; tenth <= 10; ++tenth) {
    const auto head = head_fraction(ranked, tenth / 10.0);
    CHECK(head.size() == expected[static_cast<std::size_t>(tenth - 1)]);
    // The head is a ranking prefix.
    for (std::size_t i = 0; i < head.size(); ++i) CHECK(head[i] == ranked[i].name);
  }
  CHECK(head_fraction(ranked, 1.0).size() == 619);
  CHECK_THROWS_AS(head_fraction(ranked, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(head_fraction(ranked, 1.5), std::invalid_argument);
  const std::vector<RankedAttribute> tiny{{"50001", 0.5}};
  CHECK_THROWS_AS(head_fraction(tiny, 0.2), std::invalid_argument);
}

TEST_CASE("ranking files round trip and enforce their header and order") {
  Rng rng(55);
  const FeatureTable table = random_table(rng, 25, 8);
  const std::vector<RankedAttribute> ranked = rank_all(table);
  std::stringstream buf;
  write_ranking(buf, ranked);
  const std::vector<RankedAttribute> back = read_ranking(buf);
  REQUIRE(back.size() == ranked.size());
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    CHECK(back[i].name == ranked[i].name);
    CHECK(back[i].gain_bits == ranked[i].gain_bits);
  }

  std::istringstream bad_header("RANK,NAME,GAIN\n1,50001,0.5\n");
  CHECK_THROWS_AS(read_ranking(bad_header), DataError);
  std::istringstream bad_order("RANK,ITEMID,GAIN_BITS\n2,50001,0.5\n");
  CHECK_THROWS_AS(read_ranking(bad_order), DataError);
}

TEST_CASE("ranking respects worker count") {
  Rng rng(31);
  const FeatureTable table = random_table(rng, 60, 12);
  const std::vector<RankedAttribute> serial = rank_all(table, 1);
  const std::vector<RankedAttribute> threaded = rank_all(table, 4);
  REQUIRE(serial.size() == threaded.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].name == threaded[i].name);
    CHECK(serial[i].gain_bits == threaded[i].gain_bits);
  }
}

}  // TEST_SUITE
