#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "phenollm/claims.hpp"
#include "phenollm/gateway.hpp"
#include "phenollm/mock_backend.hpp"
#include "phenollm/prompt.hpp"
#include "phenollm/verify.hpp"
#include "phenollm/window.hpp"

namespace phenollm {

// One prompt sent once: the unit of the experiment grid and of resume.
// Records never carry wall-clock timestamps so reruns are byte-stable;
// latency is 0 for mock and cached completions.
struct RunRecord {
  std::string sample_id;  // "<subject>|<end date>"
  std::string subject_id;
  std::string end_date;
  int study_year = 0;
  Strategy strategy = Strategy::DirectPrediction;
  DataFormat format = DataFormat::Csv;
  std::string model;
  int repetition = 0;
  std::string target;  // condition word
  std::string prompt_hash;
  std::string reply;
  Decision decision = Decision::Unparseable;
  ClassLabel truth = ClassLabel::Negative;
  bool from_cache = false;
  long long latency_ms = 0;
  bool q1 = false, q2 = false, q3 = false, q4 = false;

  std::string key() const;  // resume identity (sample, strategy, format, model, rep)
  std::string to_json_line() const;
  static RunRecord from_json_line(const std::string& line);
};

// Reads a JSONL record log. A malformed or unterminated final line is
// treated as an interrupted append and dropped (reported via
// dropped_partial_tail); malformed lines elsewhere throw IoFailure.
// A missing file yields an empty vector.
std::vector<RunRecord> load_records(const std::string& path,
                                    bool* dropped_partial_tail = nullptr);

struct ExperimentConfig {
  std::vector<Strategy> strategies;
  std::vector<DataFormat> formats;
  Target target = Target::Depression;
  int repetitions = 1;
  std::string records_path;
  std::string cache_dir;
  bool replay_only = false;
  std::size_t max_per_minute = 0;
  int throttle_ms = 0;       // extra pause after each live call
  std::size_t max_records = 0;  // stop after this many new records (0 = all)
  LabelPolicy policy;
  PromptOptions prompt;
};

struct ExperimentResult {
  std::size_t newly_run = 0;
  std::size_t skipped = 0;
  std::vector<RunRecord> records;  // full log after the run
};

// Walks the grid sample-major (sample, strategy, format, repetition) in
// deterministic order, appending each record to records_path as soon as
// its reply arrives. Existing records are skipped by key, so an
// interrupted run resumes where it stopped.
ExperimentResult run_experiment(const std::vector<LabeledSample>& samples,
                                const ExperimentConfig& config,
                                std::shared_ptr<CompletionBackend> backend,
                                Clock& clock);

}  // namespace phenollm
