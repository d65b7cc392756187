#include "phenollm/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phenollm/errors.hpp"
#include "phenollm/rng.hpp"
#include "phenollm/table.hpp"

namespace phenollm {

namespace {

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

double quantize(double v, const FeatureColumn& col) {
  if (v < 0.0) v = 0.0;
  if (col.fixed_decimals >= 0) {
    const double scale = std::pow(10.0, col.fixed_decimals);
    return std::round(v * scale) / scale;
  }
  return std::round(v);
}

int clamp_score(double raw, int hi) {
  const int v = static_cast<int>(std::lround(raw));
  return std::clamp(v, 0, hi);
}

}  // namespace

SyntheticSpec SyntheticSpec::plausible_defaults() {
  SyntheticSpec spec;
  // Order mirrors the daily schema: distance, home, entropy, screen,
  // unlock, calls in/out, bluetooth, steps, sedentary count/min, active
  // count/min, asleep, awake-in-bed. severity_shift signs follow the usual
  // clinical direction (less movement, more time at home, disturbed sleep).
  spec.features = {
      {9000.0, 2500.0, 1800.0, 0.0, -5500.0, 0.0},   // distance m
      {620.0, 90.0, 110.0, 0.0, 360.0, 0.0},         // time at home min
      {0.9, 0.25, 0.18, 0.0, -0.55, 0.0},            // location entropy
      {290.0, 45.0, 55.0, 0.0, 120.0, 0.0},          // screen time min
      {4.0, 1.0, 1.2, 0.0, 2.5, 0.0},                // avg unlock min
      {9.0, 4.0, 6.0, 0.0, -5.0, 0.25},              // incoming call min
      {11.0, 4.0, 7.0, 0.0, -6.0, 0.25},             // outgoing call min
      {24.0, 8.0, 7.0, 0.0, -12.0, 0.05},            // bluetooth devices
      {9800.0, 2200.0, 1900.0, 0.0, -6200.0, 0.0},   // steps
      {38.0, 6.0, 7.0, 0.0, 10.0, 0.0},              // sedentary episodes
      {1150.0, 90.0, 120.0, 0.0, 160.0, 0.0},        // sedentary minutes
      {36.0, 7.0, 8.0, 0.0, -14.0, 0.0},             // active episodes
      {170.0, 40.0, 45.0, 0.0, -85.0, 0.0},          // active minutes
      {420.0, 40.0, 55.0, 0.0, -110.0, 0.02},        // asleep minutes
      {26.0, 8.0, 9.0, 0.0, 22.0, 0.02},             // awake in bed min
  };
  return spec;
}

nlohmann::json spec_to_json(const SyntheticSpec& s) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : s.features) {
    features.push_back({{"base", f.base},
                        {"weekly_amplitude", f.weekly_amplitude},
                        {"noise", f.noise},
                        {"drift_per_day", f.drift_per_day},
                        {"severity_shift", f.severity_shift},
                        {"missing_rate", f.missing_rate}});
  }
  nlohmann::json anomalies = nlohmann::json::array();
  for (const auto& a : s.anomalies) {
    anomalies.push_back({{"day_offset", a.day_offset},
                         {"column", a.column_header},
                         {"multiplier", a.multiplier}});
  }
  return {{"seed", s.seed},
          {"subjects", s.subjects},
          {"years", s.years},
          {"weeks_per_year", s.weeks_per_year},
          {"window_days", s.window_days},
          {"start_year", s.start_year},
          {"positive_fraction", s.positive_fraction},
          {"low_severity", s.low_severity},
          {"high_severity", s.high_severity},
          {"severity_jitter", s.severity_jitter},
          {"features", features},
          {"anomalies", anomalies}};
}

SyntheticSpec spec_from_json(const nlohmann::json& j) {
  SyntheticSpec s = SyntheticSpec::plausible_defaults();
  s.seed = j.value("seed", s.seed);
  s.subjects = j.value("subjects", s.subjects);
  s.years = j.value("years", s.years);
  s.weeks_per_year = j.value("weeks_per_year", s.weeks_per_year);
  s.window_days = j.value("window_days", s.window_days);
  s.start_year = j.value("start_year", s.start_year);
  s.positive_fraction = j.value("positive_fraction", s.positive_fraction);
  s.low_severity = j.value("low_severity", s.low_severity);
  s.high_severity = j.value("high_severity", s.high_severity);
  s.severity_jitter = j.value("severity_jitter", s.severity_jitter);
  if (j.contains("features")) {
    s.features.clear();
    for (const auto& f : j.at("features")) {
      FeatureGen g;
      g.base = f.value("base", 0.0);
      g.weekly_amplitude = f.value("weekly_amplitude", 0.0);
      g.noise = f.value("noise", 0.0);
      g.drift_per_day = f.value("drift_per_day", 0.0);
      g.severity_shift = f.value("severity_shift", 0.0);
      g.missing_rate = f.value("missing_rate", 0.0);
      s.features.push_back(g);
    }
  }
  if (j.contains("anomalies")) {
    s.anomalies.clear();
    for (const auto& a : j.at("anomalies")) {
      AnomalySpec spec;
      spec.day_offset = a.value("day_offset", 0);
      spec.column_header = a.value("column", std::string());
      spec.multiplier = a.value("multiplier", 1.0);
      s.anomalies.push_back(spec);
    }
  }
  return s;
}

SyntheticResult generate_synthetic(const SyntheticSpec& spec, SchemaPtr schema) {
  if (!schema) throw InvalidSpec("null schema");
  if (spec.subjects < 1 || spec.years < 1 || spec.weeks_per_year < 1) {
    throw InvalidSpec("subjects, years, and weeks_per_year must be positive");
  }
  if (spec.window_days < 1) throw InvalidSpec("window_days must be positive");
  if (spec.features.size() != schema->size()) {
    throw InvalidSpec("spec has " + std::to_string(spec.features.size()) +
                      " feature generators for " +
                      std::to_string(schema->size()) + " schema columns");
  }
  std::vector<std::size_t> anomaly_cols;
  for (const auto& a : spec.anomalies) {
    const auto idx = schema->index_of_header(a.column_header);
    if (!idx) throw InvalidSpec("anomaly column '" + a.column_header + "'");
    anomaly_cols.push_back(*idx);
  }

  const int days_per_year = spec.window_days + 7 * (spec.weeks_per_year - 1);
  // Timelines start Jan 7; spilling into the next calendar year would split
  // a study year across two derived years.
  if (days_per_year > 358) {
    throw InvalidSpec("timeline of " + std::to_string(days_per_year) +
                      " days does not fit one calendar year");
  }
  const std::size_t n = schema->size();

  std::ostringstream csv;
  csv << "date,pid";
  for (const auto& col : schema->columns()) csv << ',' << col.raw_name;
  csv << ",phq4_total,phq4_anxiety\n";

  nlohmann::json windows = nlohmann::json::array();
  nlohmann::json resolved_anomalies = nlohmann::json::array();
  Dataset dataset;
  dataset.schema = schema;

  for (int subject = 0; subject < spec.subjects; ++subject) {
    char pid[16];
    std::snprintf(pid, sizeof(pid), "subj%03d", subject);
    for (int year = 0; year < spec.years; ++year) {
      Rng rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(subject),
                                      static_cast<std::uint64_t>(year)}));
      const Date start(spec.start_year + year, 1, 7);

      const bool high = rng.chance(spec.positive_fraction);
      const double base_severity = high ? spec.high_severity : spec.low_severity;
      std::vector<double> weekly_severity(
          static_cast<std::size_t>(days_per_year / 7 + 2));
      for (auto& w : weekly_severity) {
        w = std::clamp(base_severity + rng.normal(0.0, spec.severity_jitter),
                       0.0, 1.0);
      }

      // daily values, then anomalies on top
      std::vector<FeatureWindow::Row> days(static_cast<std::size_t>(days_per_year));
      for (int d = 0; d < days_per_year; ++d) {
        const double severity = weekly_severity[static_cast<std::size_t>(d / 7)];
        FeatureWindow::Row row(n);
        for (std::size_t c = 0; c < n; ++c) {
          const FeatureGen& g = spec.features[c];
          const bool missing = rng.chance(g.missing_rate);
          const double noise = g.noise > 0.0 ? rng.normal(0.0, g.noise) : 0.0;
          if (missing) continue;  // noise drawn first keeps streams aligned
          double v = g.base + g.weekly_amplitude * std::sin(kTwoPi * (d % 7) / 7.0) +
                     g.drift_per_day * d + g.severity_shift * severity + noise;
          row[c] = quantize(v, schema->column(c));
        }
        days[static_cast<std::size_t>(d)] = std::move(row);
      }
      for (std::size_t a = 0; a < spec.anomalies.size(); ++a) {
        const AnomalySpec& an = spec.anomalies[a];
        if (an.day_offset < 0 || an.day_offset >= days_per_year) {
          throw InvalidSpec("anomaly day_offset " + std::to_string(an.day_offset) +
                            " outside the " + std::to_string(days_per_year) +
                            "-day timeline");
        }
        auto& cell = days[static_cast<std::size_t>(an.day_offset)][anomaly_cols[a]];
        if (cell) {
          cell = quantize(*cell * an.multiplier, schema->column(anomaly_cols[a]));
          resolved_anomalies.push_back(
              {{"pid", pid},
               {"study_year", start.year()},
               {"date", start.plus_days(an.day_offset).iso()},
               {"column", an.column_header},
               {"multiplier", an.multiplier}});
        }
      }

      // assessments every 7 days, first one at the end of the first window
      std::vector<std::optional<AssessmentScores>> assessments(
          static_cast<std::size_t>(days_per_year));
      for (int week = 0; week < spec.weeks_per_year; ++week) {
        const int d = spec.window_days - 1 + 7 * week;
        double sum = 0.0;
        for (int off = d - spec.window_days + 1; off <= d; ++off) {
          sum += weekly_severity[static_cast<std::size_t>(off / 7)];
        }
        const double window_severity = sum / spec.window_days;
        AssessmentScores scores;
        scores.phq4_total = clamp_score(window_severity * 12.0, 12);
        scores.anxiety_sub =
            std::min(clamp_score(window_severity * 6.0, 6), scores.phq4_total);
        assessments[static_cast<std::size_t>(d)] = scores;

        std::vector<Date> w_dates;
        std::vector<FeatureWindow::Row> w_values;
        for (int off = d - spec.window_days + 1; off <= d; ++off) {
          w_dates.push_back(start.plus_days(off));
          w_values.push_back(days[static_cast<std::size_t>(off)]);
        }
        LabeledSample sample{pid, start.year(),
                             FeatureWindow(schema, std::move(w_dates),
                                           std::move(w_values)),
                             scores};
        windows.push_back(
            {{"pid", pid},
             {"study_year", sample.study_year},
             {"end_date", sample.end_date().iso()},
             {"severity", window_severity},
             {"phq4_total", scores.phq4_total},
             {"phq4_anxiety", scores.anxiety_sub},
             {"depression_label",
              class_label_name(sample.label(Target::Depression))},
             {"anxiety_label", class_label_name(sample.label(Target::Anxiety))}});
        dataset.samples.push_back(std::move(sample));
      }

      for (int d = 0; d < days_per_year; ++d) {
        csv << start.plus_days(d).iso() << ',' << pid;
        for (std::size_t c = 0; c < n; ++c) {
          csv << ',';
          const auto& v = days[static_cast<std::size_t>(d)][c];
          if (v) csv << render_cell(*v, schema->column(c), DataFormat::Csv);
        }
        if (const auto& scores = assessments[static_cast<std::size_t>(d)]) {
          csv << ',' << scores->phq4_total << ',' << scores->anxiety_sub;
        } else {
          csv << ",,";
        }
        csv << '\n';
      }
    }
  }

  SyntheticResult result;
  result.dataset = std::move(dataset);
  result.csv = csv.str();
  result.truth = {{"seed", spec.seed},
                  {"spec", spec_to_json(spec)},
                  {"windows", windows},
                  {"anomalies", resolved_anomalies}};
  return result;
}

}  // namespace phenollm
