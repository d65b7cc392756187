#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "phenollm/dataset.hpp"
#include "phenollm/errors.hpp"
#include "phenollm/synthetic.hpp"
#include "support.hpp"

using namespace phenollm;
namespace fs = std::filesystem;

namespace {

// Tiny hand-written corpus helper: 15 feature fields per row, the same
// value repeated unless overridden in the raw csv text.
std::string header_line() {
  std::string line = "date,pid";
  for (const auto& col : globem_schema()->columns()) line += "," + col.raw_name;
  return line + ",phq4_total,phq4_anxiety";
}

std::string day_row(const std::string& date, const std::string& pid,
                    const std::string& value, const std::string& total = "",
                    const std::string& anxiety = "") {
  std::string line = date + "," + pid;
  for (int i = 0; i < 15; ++i) line += "," + value;
  return line + "," + total + "," + anxiety;
}

fs::path write_temp(const std::string& name, const std::string& body) {
  const fs::path dir = fs::temp_directory_path() / "phenollm_dataset_tests";
  fs::create_directories(dir);
  const fs::path file = dir / name;
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out << body;
  return file;
}

}  // namespace

TEST_CASE("windows assemble from the rows ending at each assessment") {
  std::string csv = header_line() + "\n";
  // Subject a: five days, assessments on day 3 (positive) and day 5
  // (negative) with a three-day lookback.
  csv += day_row("2019-03-01", "a", "10") + "\n";
  csv += day_row("2019-03-02", "a", "11") + "\n";
  csv += day_row("2019-03-03", "a", "12", "7", "3") + "\n";
  csv += day_row("2019-03-04", "a", "13") + "\n";
  csv += day_row("2019-03-05", "a", "14", "0", "0") + "\n";
  // Subject b: the assessment has only two days behind it.
  csv += day_row("2019-03-01", "b", "20") + "\n";
  csv += day_row("2019-03-02", "b", "21", "4", "2") + "\n";

  const fs::path file = write_temp("basic.csv", csv);
  const Dataset data = load_dataset(file.string(), globem_schema(), 3);

  REQUIRE(data.samples.size() == 2);
  CHECK(data.dropped_short_windows == 1);

  const LabeledSample& first = data.samples[0];
  CHECK(first.subject_id == "a");
  CHECK(first.study_year == 2019);
  CHECK(first.end_date() == Date(2019, 3, 3));
  CHECK(first.window.days() == 3);
  CHECK(*first.window.at(0, 0) == 10.0);
  CHECK(*first.window.at(2, 14) == 12.0);
  CHECK(first.scores.phq4_total == 7);
  CHECK(first.label(Target::Depression) == ClassLabel::Positive);
  CHECK(first.label(Target::Anxiety) == ClassLabel::Positive);

  const LabeledSample& second = data.samples[1];
  CHECK(second.end_date() == Date(2019, 3, 5));
  CHECK(second.label(Target::Depression) == ClassLabel::Negative);
}

TEST_CASE("unreadable feature values load as missing") {
  std::string csv = header_line() + "\n";
  std::string row = "2019-03-01,a";
  row += ",not_a_number,-5,0.5";
  for (int i = 0; i < 12; ++i) row += ",7";
  row += ",2,1";
  csv += row + "\n";
  const fs::path file = write_temp("lenient.csv", csv);
  const Dataset data = load_dataset(file.string(), globem_schema(), 1);
  REQUIRE(data.samples.size() == 1);
  const FeatureWindow& w = data.samples[0].window;
  CHECK_FALSE(w.at(0, 0).has_value());  // text
  CHECK_FALSE(w.at(0, 1).has_value());  // negative
  CHECK(*w.at(0, 2) == 0.5);
}

TEST_CASE("score columns are validated, not silently fixed") {
  SUBCASE("total above scale") {
    const fs::path f = write_temp(
        "score_hi.csv", header_line() + "\n" +
                            day_row("2019-03-01", "a", "5", "13", "2") + "\n");
    CHECK_THROWS_AS(load_dataset(f.string(), globem_schema(), 1), OutOfRange);
  }
  SUBCASE("fractional score") {
    const fs::path f = write_temp(
        "score_frac.csv",
        header_line() + "\n" + day_row("2019-03-01", "a", "5", "3.5", "1") +
            "\n");
    CHECK_THROWS_AS(load_dataset(f.string(), globem_schema(), 1), OutOfRange);
  }
  SUBCASE("anxiety exceeding the total") {
    const fs::path f = write_temp(
        "score_anx.csv", header_line() + "\n" +
                             day_row("2019-03-01", "a", "5", "2", "4") + "\n");
    CHECK_THROWS_AS(load_dataset(f.string(), globem_schema(), 1), OutOfRange);
  }
}

TEST_CASE("structural problems are rejected with the offending detail") {
  SUBCASE("duplicate subject-day") {
    const fs::path f = write_temp(
        "dup.csv", header_line() + "\n" +
                       day_row("2019-03-01", "a", "5", "2", "1") + "\n" +
                       day_row("2019-03-01", "a", "6") + "\n");
    CHECK_THROWS_AS(load_dataset(f.string(), globem_schema(), 1), MalformedRow);
  }
  SUBCASE("missing feature column") {
    const fs::path f = write_temp(
        "nocol.csv", "date,pid,phq4_total,phq4_anxiety\n2019-03-01,a,2,1\n");
    CHECK_THROWS_AS(load_dataset(f.string(), globem_schema(), 1), MissingColumn);
  }
  SUBCASE("no assessments at all") {
    const fs::path f = write_temp(
        "noassess.csv", header_line() + "\n" +
                            day_row("2019-03-01", "a", "5") + "\n");
    CHECK_THROWS_AS(load_dataset(f.string(), globem_schema(), 1), EmptyDataset);
  }
  SUBCASE("nonexistent path") {
    CHECK_THROWS_AS(load_dataset("/nonexistent/nowhere.csv", globem_schema()),
                    IoFailure);
  }
}

TEST_CASE("directories load every csv and fall back to file-stem subjects") {
  const fs::path dir = fs::temp_directory_path() / "phenollm_dataset_dir";
  fs::remove_all(dir);
  fs::create_directories(dir);
  // No pid column here: subjects come from the file names.
  std::string header = "date";
  for (const auto& col : globem_schema()->columns()) header += "," + col.raw_name;
  header += ",phq4_total,phq4_anxiety";
  auto row_no_pid = [&](const std::string& date, const std::string& total) {
    std::string line = date;
    for (int i = 0; i < 15; ++i) line += ",3";
    return line + "," + total + ",0";
  };
  {
    std::ofstream out(dir / "west.csv");
    out << header << "\n" << row_no_pid("2019-03-01", "6") << "\n";
  }
  {
    std::ofstream out(dir / "east.csv");
    out << header << "\n" << row_no_pid("2019-03-01", "0") << "\n";
  }
  const Dataset data = load_dataset(dir.string(), globem_schema(), 1);
  REQUIRE(data.samples.size() == 2);
  CHECK(data.samples[0].subject_id == "east");
  CHECK(data.samples[1].subject_id == "west");
}

TEST_CASE("per-column averages skip gaps and vanish for empty columns") {
  const SchemaPtr& schema = globem_schema();
  std::vector<Date> dates = {Date(2019, 3, 1), Date(2019, 3, 2),
                             Date(2019, 3, 3)};
  FeatureWindow::Row r1(schema->size(), 10.0), r2(schema->size(), 20.0),
      r3(schema->size(), 60.0);
  r2[4] = std::nullopt;
  r1[7] = r2[7] = r3[7] = std::nullopt;
  const FeatureWindow w(schema, dates, {r1, r2, r3});
  const auto avg = average_features(w);
  CHECK(*avg[0] == 30.0);
  CHECK(*avg[4] == 35.0);  // 10 and 60 only
  CHECK_FALSE(avg[7].has_value());
}

namespace {

Dataset small_synthetic(std::uint64_t seed) {
  SyntheticSpec spec = SyntheticSpec::plausible_defaults();
  spec.seed = seed;
  spec.subjects = 10;
  spec.years = 2;
  spec.weeks_per_year = 8;
  return generate_synthetic(spec, globem_schema()).dataset;
}

std::set<std::string> id_set(const std::vector<LabeledSample>& samples) {
  std::set<std::string> out;
  for (const auto& s : samples) out.insert(s.subject_id + "|" + s.end_date().iso());
  return out;
}

}  // namespace

TEST_CASE("balanced sampling fills every study year with equal classes") {
  const Dataset data = small_synthetic(11);
  const DatasetSplit split = balanced_sample(data.samples, 6, 99);

  std::map<int, std::pair<int, int>> year_counts;
  for (const auto& s : split.test) {
    auto& [pos, neg] = year_counts[s.study_year];
    const ClassLabel label = s.label(Target::Depression);
    CHECK(label != ClassLabel::Borderline);
    (label == ClassLabel::Positive ? pos : neg) += 1;
  }
  REQUIRE(year_counts.size() == 2);
  for (const auto& [year, counts] : year_counts) {
    CHECK(counts.first == 3);
    CHECK(counts.second == 3);
  }

  // Train and test never overlap and train holds no borderline samples.
  const auto test_ids = id_set(split.test);
  for (const auto& s : split.train) {
    CHECK(s.label(Target::Depression) != ClassLabel::Borderline);
    CHECK(test_ids.count(s.subject_id + "|" + s.end_date().iso()) == 0);
  }
}

TEST_CASE("the balanced draw depends on the seed, not the input order") {
  const Dataset data = small_synthetic(12);
  const DatasetSplit a = balanced_sample(data.samples, 4, 5);
  const DatasetSplit b = balanced_sample(data.samples, 4, 5);
  CHECK(id_set(a.test) == id_set(b.test));

  std::vector<LabeledSample> shuffled = data.samples;
  Rng rng(3);
  rng.shuffle(shuffled);
  const DatasetSplit c = balanced_sample(shuffled, 4, 5);
  CHECK(id_set(a.test) == id_set(c.test));

  const DatasetSplit d = balanced_sample(data.samples, 4, 6);
  CHECK(id_set(a.test) != id_set(d.test));
}

TEST_CASE("balanced sampling rejects odd quotas and starved classes") {
  const Dataset data = small_synthetic(13);
  CHECK_THROWS_AS(balanced_sample(data.samples, 5, 1), OutOfRange);
  CHECK_THROWS_AS(balanced_sample(data.samples, 0, 1), OutOfRange);
  try {
    balanced_sample(data.samples, 5000, 1);
    FAIL("expected InsufficientClass");
  } catch (const InsufficientClass& e) {
    CHECK(e.needed() == 2500);
    CHECK(e.available() < 2500);
  }
}

TEST_CASE("synthetic corpora are deterministic and reload exactly") {
  SyntheticSpec spec = SyntheticSpec::plausible_defaults();
  spec.seed = 2193;
  spec.subjects = 4;
  spec.years = 1;
  spec.weeks_per_year = 5;

  const SyntheticResult once = generate_synthetic(spec, globem_schema());
  const SyntheticResult twice = generate_synthetic(spec, globem_schema());
  CHECK(once.csv == twice.csv);
  CHECK(once.truth == twice.truth);
  CHECK(once.dataset.samples.size() == 4 * 5);

  const fs::path file = write_temp("synth.csv", once.csv);
  const Dataset reloaded = load_dataset(file.string(), globem_schema(),
                                        spec.window_days);
  REQUIRE(reloaded.samples.size() == once.dataset.samples.size());
  for (std::size_t i = 0; i < reloaded.samples.size(); ++i) {
    const LabeledSample& a = once.dataset.samples[i];
    const LabeledSample& b = reloaded.samples[i];
    CHECK(a.subject_id == b.subject_id);
    CHECK(a.end_date() == b.end_date());
    CHECK(a.scores.phq4_total == b.scores.phq4_total);
    CHECK(a.scores.anxiety_sub == b.scores.anxiety_sub);
    CHECK(a.window.values() == b.window.values());
  }
}

TEST_CASE("generated labels mirror the documented screener cutoffs") {
  const Dataset data = small_synthetic(77);
  for (const auto& s : data.samples) {
    const int total = s.scores.phq4_total;
    const ClassLabel expected = total < 1   ? ClassLabel::Negative
                                : total > 5 ? ClassLabel::Positive
                                            : ClassLabel::Borderline;
    CHECK(s.label(Target::Depression) == expected);
  }
}

TEST_CASE("an injected single-day collapse is the window minimum") {
  SyntheticSpec spec = SyntheticSpec::plausible_defaults();
  spec.seed = 31;
  spec.subjects = 5;
  spec.years = 2;
  spec.weeks_per_year = 4;
  // Crush sedentary minutes (a high-floor column) on day 10 of every
  // subject-year timeline.
  spec.anomalies = {{10, "total_time_spent_sedentary(minutes)", 0.05}};

  const SyntheticResult result = generate_synthetic(spec, globem_schema());
  const auto col = globem_schema()->index_of_header(
      "total_time_spent_sedentary(minutes)");
  REQUIRE(col.has_value());
  REQUIRE(result.truth.at("anomalies").size() == 10);

  std::size_t windows_checked = 0;
  for (const auto& anomaly : result.truth.at("anomalies")) {
    const Date when = Date::parse_iso(anomaly.at("date").get<std::string>());
    const std::string pid = anomaly.at("pid").get<std::string>();
    for (const auto& s : result.dataset.samples) {
      if (s.subject_id != pid) continue;
      const auto row = s.window.row_of(when);
      if (!row) continue;
      // Independent argmin over the column.
      std::size_t best = *row;
      for (std::size_t r = 0; r < s.window.days(); ++r) {
        const auto& v = s.window.at(r, *col);
        if (v && *v < *s.window.at(best, *col)) best = r;
      }
      CHECK(s.window.dates()[best] == when);
      windows_checked += 1;
    }
  }
  CHECK(windows_checked >= 10);
}

TEST_CASE("generator specs survive a json round-trip") {
  SyntheticSpec spec = SyntheticSpec::plausible_defaults();
  spec.seed = 5;
  spec.subjects = 7;
  spec.anomalies = {{3, "step_count", 0.2}};
  const SyntheticSpec back = spec_from_json(spec_to_json(spec));
  CHECK(spec_to_json(back) == spec_to_json(spec));
}

TEST_CASE("generator rejects malformed specs") {
  SyntheticSpec spec = SyntheticSpec::plausible_defaults();
  spec.subjects = 0;
  CHECK_THROWS_AS(generate_synthetic(spec, globem_schema()), InvalidSpec);
  spec = SyntheticSpec::plausible_defaults();
  spec.features.pop_back();
  CHECK_THROWS_AS(generate_synthetic(spec, globem_schema()), InvalidSpec);
  spec = SyntheticSpec::plausible_defaults();
  spec.anomalies = {{3, "no_such_column", 0.5}};
  CHECK_THROWS_AS(generate_synthetic(spec, globem_schema()), InvalidSpec);
  spec = SyntheticSpec::plausible_defaults();
  spec.anomalies = {{400, "step_count", 0.5}};
  CHECK_THROWS_AS(generate_synthetic(spec, globem_schema()), InvalidSpec);
  spec = SyntheticSpec::plausible_defaults();
  spec.weeks_per_year = 52;
  CHECK_THROWS_AS(generate_synthetic(spec, globem_schema()), InvalidSpec);
}
