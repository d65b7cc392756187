#include <doctest.h>

#include <vector>

#include "phenollm/date.hpp"
#include "phenollm/errors.hpp"
#include "phenollm/schema.hpp"
#include "phenollm/window.hpp"
#include "support.hpp"

using namespace phenollm;

TEST_CASE("daily schema exposes the fifteen sensor columns in order") {
  const SchemaPtr& schema = globem_schema();
  const std::vector<std::string> headers = {
      "total_distance_traveled(meters)",
      "time_at_home(minutes)",
      "location_entropy",
      "phone_screen_time(minutes)",
      "average_phone_unlock_duration(minutes)",
      "phone_call_incoming_duration(minutes)",
      "phone_call_outgoing_duration(minutes)",
      "unique_bluetooth_devices_discovered_nearby",
      "step_count",
      "number_of_sedentary_episodes",
      "total_time_spent_sedentary(minutes)",
      "number_of_activity_episodes",
      "total_time_spent_active(minutes)",
      "total_time_asleep(minutes)",
      "total_time_spent_awake_while_in_bed(minutes)",
  };
  REQUIRE(schema->size() == 15);
  for (std::size_t i = 0; i < headers.size(); ++i) {
    CHECK(schema->column(i).header_name == headers[i]);
  }
}

TEST_CASE("schema lookups work both by raw export name and by header") {
  const SchemaPtr& schema = globem_schema();
  const auto steps = schema->index_of_raw(
      "f_steps:fitbit_steps_intraday_rapids_sumsteps:allday");
  REQUIRE(steps.has_value());
  CHECK(schema->column(*steps).header_name == "step_count");
  CHECK(schema->index_of_header("location_entropy").has_value());
  CHECK_FALSE(schema->index_of_raw("f_bogus:nothing:allday").has_value());
  CHECK_FALSE(schema->index_of_header("bogus").has_value());
}

TEST_CASE("only location entropy pins its precision") {
  const SchemaPtr& schema = globem_schema();
  for (std::size_t i = 0; i < schema->size(); ++i) {
    const FeatureColumn& col = schema->column(i);
    if (col.header_name == "location_entropy") {
      CHECK(col.fixed_decimals == 2);
    } else {
      CHECK(col.fixed_decimals == -1);
    }
  }
}

TEST_CASE("every duration column declares minutes and distance meters") {
  const SchemaPtr& schema = globem_schema();
  std::size_t minutes = 0, meters = 0, unitless = 0;
  for (std::size_t i = 0; i < schema->size(); ++i) {
    const std::string& unit = schema->column(i).unit;
    if (unit == "minutes") ++minutes;
    else if (unit == "meters") ++meters;
    else if (unit.empty()) ++unitless;
  }
  CHECK(minutes == 9);
  CHECK(meters == 1);
  CHECK(unitless == 5);
  CHECK(minutes + meters + unitless == schema->size());
}

namespace {

std::vector<Date> consecutive(const Date& start, int n) {
  std::vector<Date> dates;
  for (int i = 0; i < n; ++i) dates.push_back(start.plus_days(i));
  return dates;
}

FeatureWindow::Row full_row(double v) {
  return FeatureWindow::Row(globem_schema()->size(), v);
}

}  // namespace

TEST_CASE("window construction enforces consecutive dates and row shape") {
  const SchemaPtr& schema = globem_schema();
  const Date start(2019, 4, 29);

  SUBCASE("valid window") {
    FeatureWindow w(schema, consecutive(start, 3),
                    {full_row(1), full_row(2), full_row(3)});
    CHECK(w.days() == 3);
    CHECK(w.start_date() == start);
    CHECK(w.end_date() == start.plus_days(2));
    CHECK_FALSE(w.has_missing());
  }
  SUBCASE("a gap in the dates is rejected") {
    std::vector<Date> dates = {start, start.plus_days(2), start.plus_days(3)};
    CHECK_THROWS_AS(
        FeatureWindow(schema, dates, {full_row(1), full_row(2), full_row(3)}),
        InvalidWindow);
  }
  SUBCASE("a short row is rejected") {
    auto rows = std::vector<FeatureWindow::Row>{full_row(1)};
    rows[0].pop_back();
    CHECK_THROWS_AS(FeatureWindow(schema, consecutive(start, 1), rows),
                    InvalidWindow);
  }
  SUBCASE("negative and non-finite values are rejected") {
    auto rows = std::vector<FeatureWindow::Row>{full_row(1)};
    rows[0][4] = -2.0;
    CHECK_THROWS_AS(FeatureWindow(schema, consecutive(start, 1), rows),
                    InvalidWindow);
    rows[0][4] = std::nan("");
    CHECK_THROWS_AS(FeatureWindow(schema, consecutive(start, 1), rows),
                    InvalidWindow);
  }
  SUBCASE("empty windows are rejected") {
    CHECK_THROWS_AS(FeatureWindow(schema, {}, {}), InvalidWindow);
  }
  SUBCASE("row count must match date count") {
    CHECK_THROWS_AS(
        FeatureWindow(schema, consecutive(start, 2), {full_row(1)}),
        InvalidWindow);
  }
}

TEST_CASE("row lookup by date only hits days inside the window") {
  const FeatureWindow w = testing::canonical_window();
  REQUIRE(w.days() == 28);
  CHECK(w.row_of(Date(2019, 4, 29)) == std::size_t{0});
  CHECK(w.row_of(Date(2019, 5, 26)) == std::size_t{27});
  CHECK_FALSE(w.row_of(Date(2019, 4, 28)).has_value());
  CHECK_FALSE(w.row_of(Date(2019, 5, 27)).has_value());
  CHECK(w.has_missing());
  CHECK_FALSE(w.at(0, 5).has_value());
  CHECK(w.at(0, 8).has_value());
  CHECK(*w.at(0, 8) == 11430.0);
}

TEST_CASE("screener labels split at the documented cutoffs") {
  // Depression: negative iff total < 1, positive iff total > 5.
  for (int total = 0; total <= 12; ++total) {
    const ClassLabel got =
        label_sample({total, std::min(total, 6)}, Target::Depression);
    if (total == 0) {
      CHECK(got == ClassLabel::Negative);
    } else if (total >= 6) {
      CHECK(got == ClassLabel::Positive);
    } else {
      CHECK(got == ClassLabel::Borderline);
    }
  }
  // Anxiety subscale: negative iff 0, positive iff >= 3.
  for (int sub = 0; sub <= 6; ++sub) {
    const ClassLabel got = label_sample({sub + 6, sub}, Target::Anxiety);
    if (sub == 0) {
      CHECK(got == ClassLabel::Negative);
    } else if (sub >= 3) {
      CHECK(got == ClassLabel::Positive);
    } else {
      CHECK(got == ClassLabel::Borderline);
    }
  }
}

TEST_CASE("scores outside the screener bounds are rejected") {
  CHECK_THROWS_AS(label_sample({13, 0}, Target::Depression), OutOfRange);
  CHECK_THROWS_AS(label_sample({-1, 0}, Target::Depression), OutOfRange);
  CHECK_THROWS_AS(label_sample({4, 7}, Target::Anxiety), OutOfRange);
  CHECK_THROWS_AS(label_sample({4, -1}, Target::Anxiety), OutOfRange);
  // The anxiety half can never exceed the full-scale total.
  CHECK_THROWS_AS(label_sample({2, 3}, Target::Anxiety), OutOfRange);
}

TEST_CASE("custom cutoffs move the decision boundary") {
  LabelPolicy policy;
  policy.depression_negative_max = 2;
  policy.depression_positive_min = 9;
  CHECK(label_sample({2, 1}, Target::Depression, policy) ==
        ClassLabel::Negative);
  CHECK(label_sample({8, 4}, Target::Depression, policy) ==
        ClassLabel::Borderline);
  CHECK(label_sample({9, 5}, Target::Depression, policy) ==
        ClassLabel::Positive);
}

TEST_CASE("target and label names round-trip") {
  CHECK(parse_target_name("depression") == Target::Depression);
  CHECK(parse_target_name("anxiety") == Target::Anxiety);
  CHECK_FALSE(parse_target_name("mania").has_value());
  CHECK(std::string(target_name(Target::Anxiety)) == "anxiety");
  CHECK(std::string(class_label_name(ClassLabel::Borderline)) == "borderline");
}
