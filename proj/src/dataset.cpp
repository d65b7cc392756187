#include "phenollm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "phenollm/errors.hpp"
#include "phenollm/rng.hpp"

namespace phenollm {

namespace {

namespace fs = std::filesystem;

struct DailyRow {
  Date date;
  FeatureWindow::Row values;
  std::optional<int> phq4_total;
  std::optional<int> phq4_anxiety;
};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::optional<double> lenient_value(const std::string& token) {
  if (token.empty() || token == "nan" || token == "NaN" || token == "NA") {
    return std::nullopt;
  }
  double v = 0.0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v) || v < 0.0) {
    return std::nullopt;
  }
  return v;
}

std::optional<int> score_value(const std::string& token, const char* column,
                               int lo, int hi) {
  if (token.empty() || token == "nan" || token == "NaN" || token == "NA") {
    return std::nullopt;
  }
  double v = 0.0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc{} || ptr != end || v != std::floor(v) || v < lo || v > hi) {
    throw OutOfRange(std::string(column) + " value '" + token + "'");
  }
  return static_cast<int>(v);
}

// One subject's rows keyed by date, assembled into windows per assessment.
void collect_samples(const std::string& subject_id,
                     const std::map<Date, DailyRow>& rows, SchemaPtr schema,
                     int window_days, Dataset& out) {
  for (const auto& [end_date, end_row] : rows) {
    if (!end_row.phq4_total) continue;
    std::vector<Date> dates;
    std::vector<FeatureWindow::Row> values;
    bool complete = true;
    for (int off = window_days - 1; off >= 0; --off) {
      const Date d = end_date.plus_days(-off);
      auto it = rows.find(d);
      if (it == rows.end()) {
        complete = false;
        break;
      }
      dates.push_back(d);
      values.push_back(it->second.values);
    }
    if (!complete) {
      out.dropped_short_windows += 1;
      continue;
    }
    AssessmentScores scores;
    scores.phq4_total = *end_row.phq4_total;
    scores.anxiety_sub = end_row.phq4_anxiety.value_or(0);
    if (scores.anxiety_sub > scores.phq4_total) {
      throw OutOfRange("anxiety " + std::to_string(scores.anxiety_sub) +
                       " exceeds total " + std::to_string(scores.phq4_total) +
                       " for " + subject_id + " at " + end_date.iso());
    }
    out.samples.push_back(LabeledSample{
        subject_id, end_date.year(),
        FeatureWindow(schema, std::move(dates), std::move(values)), scores});
  }
}

void load_file(const fs::path& file, SchemaPtr schema, int window_days,
               Dataset& out) {
  std::ifstream in(file);
  if (!in) throw IoFailure("cannot open " + file.string());

  std::string line;
  if (!std::getline(in, line)) throw EmptyDataset(file.string() + " is empty");

  const std::vector<std::string> header = split_csv(line);
  auto find = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  };

  const auto date_col = find("date");
  if (!date_col) throw MissingColumn("date");
  std::vector<std::size_t> feature_cols;
  for (const auto& col : schema->columns()) {
    const auto idx = find(col.raw_name);
    if (!idx) throw MissingColumn(col.raw_name);
    feature_cols.push_back(*idx);
  }
  const auto total_col = find("phq4_total");
  if (!total_col) throw MissingColumn("phq4_total");
  const auto anxiety_col = find("phq4_anxiety");
  if (!anxiety_col) throw MissingColumn("phq4_anxiety");
  const auto pid_col = find("pid");

  // subject -> date -> row; map keeps dates ordered and catches duplicates.
  std::map<std::string, std::map<Date, DailyRow>> by_subject;
  const std::string default_pid = file.stem().string();

  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() < header.size()) {
      throw MalformedRow(file.string() + ": row has " +
                         std::to_string(fields.size()) + " of " +
                         std::to_string(header.size()) + " fields");
    }
    DailyRow row;
    row.date = Date::parse_iso(fields[*date_col]);
    row.values.reserve(feature_cols.size());
    for (std::size_t idx : feature_cols) {
      row.values.push_back(lenient_value(fields[idx]));
    }
    row.phq4_total = score_value(fields[*total_col], "phq4_total", 0, 12);
    row.phq4_anxiety = score_value(fields[*anxiety_col], "phq4_anxiety", 0, 6);
    const std::string pid = pid_col ? fields[*pid_col] : default_pid;
    auto [it, inserted] = by_subject[pid].emplace(row.date, std::move(row));
    if (!inserted) {
      throw MalformedRow(file.string() + ": duplicate date " +
                         it->first.iso() + " for subject " + pid);
    }
  }

  for (const auto& [pid, rows] : by_subject) {
    collect_samples(pid, rows, schema, window_days, out);
  }
}

std::string sort_key(const LabeledSample& s) {
  return s.subject_id + "|" + s.end_date().iso();
}

}  // namespace

Dataset load_dataset(const std::string& path, SchemaPtr schema,
                     int window_days) {
  if (!schema) throw InvalidWindow("null schema");
  if (window_days < 1) throw OutOfRange("window_days " + std::to_string(window_days));

  Dataset out;
  out.schema = schema;

  const fs::path p(path);
  if (fs::is_directory(p)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(p)) {
      if (entry.is_regular_file() && entry.path().extension() == ".csv") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) load_file(f, schema, window_days, out);
  } else if (fs::is_regular_file(p)) {
    load_file(p, schema, window_days, out);
  } else {
    throw IoFailure("no such file or directory: " + path);
  }

  if (out.samples.empty()) {
    throw EmptyDataset("no complete assessment windows under " + path);
  }
  std::sort(out.samples.begin(), out.samples.end(),
            [](const LabeledSample& a, const LabeledSample& b) {
              return sort_key(a) < sort_key(b);
            });
  return out;
}

std::vector<std::optional<double>> average_features(const FeatureWindow& window) {
  const std::size_t n = window.schema()->size();
  std::vector<std::optional<double>> out(n);
  for (std::size_t c = 0; c < n; ++c) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t r = 0; r < window.days(); ++r) {
      if (const auto& v = window.at(r, c)) {
        sum += *v;
        count += 1;
      }
    }
    if (count > 0) out[c] = sum / static_cast<double>(count);
  }
  return out;
}

DatasetSplit balanced_sample(const std::vector<LabeledSample>& pool,
                             std::size_t per_year, std::uint64_t seed,
                             Target target, const LabelPolicy& policy) {
  if (per_year == 0 || per_year % 2 != 0) {
    throw OutOfRange("per_year must be a positive even count, got " +
                     std::to_string(per_year));
  }
  const std::size_t half = per_year / 2;

  // year -> (positives, negatives) as pool indices, canonically ordered so
  // the draw ignores input order.
  std::map<int, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>>
      by_year;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const ClassLabel label = pool[i].label(target, policy);
    if (label == ClassLabel::Borderline) continue;
    auto& bucket = by_year[pool[i].study_year];
    (label == ClassLabel::Positive ? bucket.first : bucket.second).push_back(i);
  }
  if (by_year.empty()) throw EmptyDataset("pool has no non-borderline samples");

  auto canonical = [&](std::vector<std::size_t>& idx) {
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return sort_key(pool[a]) < sort_key(pool[b]);
    });
  };

  std::vector<bool> picked(pool.size(), false);
  DatasetSplit split;
  for (auto& [year, bucket] : by_year) {
    auto& [positives, negatives] = bucket;
    if (positives.size() < half) {
      throw InsufficientClass(year, "positive", positives.size(), half);
    }
    if (negatives.size() < half) {
      throw InsufficientClass(year, "negative", negatives.size(), half);
    }
    canonical(positives);
    canonical(negatives);
    Rng pos_rng(derive_seed(seed, {static_cast<std::uint64_t>(year), 1}));
    Rng neg_rng(derive_seed(seed, {static_cast<std::uint64_t>(year), 2}));
    pos_rng.shuffle(positives);
    neg_rng.shuffle(negatives);
    for (std::size_t k = 0; k < half; ++k) {
      picked[positives[k]] = true;
      picked[negatives[k]] = true;
      split.test.push_back(pool[positives[k]]);
      split.test.push_back(pool[negatives[k]]);
    }
  }

  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (picked[i]) continue;
    if (pool[i].label(target, policy) == ClassLabel::Borderline) continue;
    split.train.push_back(pool[i]);
  }

  auto by_key = [](const LabeledSample& a, const LabeledSample& b) {
    return sort_key(a) < sort_key(b);
  };
  std::sort(split.test.begin(), split.test.end(), by_key);
  std::sort(split.train.begin(), split.train.end(), by_key);
  return split;
}

}  // namespace phenollm
