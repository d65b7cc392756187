#include "phenollm/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "phenollm/errors.hpp"

namespace phenollm {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

Decision parse_decision(const std::string& name) {
  if (name == "yes") return Decision::Yes;
  if (name == "no") return Decision::No;
  return Decision::Unparseable;
}

ClassLabel parse_label(const std::string& name) {
  if (name == "positive") return ClassLabel::Positive;
  if (name == "borderline") return ClassLabel::Borderline;
  return ClassLabel::Negative;
}

}  // namespace

std::string RunRecord::key() const {
  std::ostringstream k;
  k << sample_id << "|" << strategy_name(strategy) << "|" << format_name(format)
    << "|" << model << "|" << repetition;
  return k.str();
}

std::string RunRecord::to_json_line() const {
  const json j = {{"sample_id", sample_id},
                  {"subject_id", subject_id},
                  {"end_date", end_date},
                  {"study_year", study_year},
                  {"strategy", strategy_name(strategy)},
                  {"format", format_name(format)},
                  {"model", model},
                  {"repetition", repetition},
                  {"target", target},
                  {"prompt_hash", prompt_hash},
                  {"reply", reply},
                  {"decision", decision_name(decision)},
                  {"truth", class_label_name(truth)},
                  {"from_cache", from_cache},
                  {"latency_ms", latency_ms},
                  {"q1", q1},
                  {"q2", q2},
                  {"q3", q3},
                  {"q4", q4}};
  return j.dump();
}

RunRecord RunRecord::from_json_line(const std::string& line) {
  const json j = json::parse(line);
  RunRecord r;
  r.sample_id = j.at("sample_id").get<std::string>();
  r.subject_id = j.at("subject_id").get<std::string>();
  r.end_date = j.at("end_date").get<std::string>();
  r.study_year = j.at("study_year").get<int>();
  const auto strategy = parse_strategy_name(j.at("strategy").get<std::string>());
  const auto format = parse_format_name(j.at("format").get<std::string>());
  if (!strategy || !format) throw IoFailure("record with unknown strategy/format");
  r.strategy = *strategy;
  r.format = *format;
  r.model = j.at("model").get<std::string>();
  r.repetition = j.at("repetition").get<int>();
  r.target = j.at("target").get<std::string>();
  r.prompt_hash = j.at("prompt_hash").get<std::string>();
  r.reply = j.at("reply").get<std::string>();
  r.decision = parse_decision(j.at("decision").get<std::string>());
  r.truth = parse_label(j.at("truth").get<std::string>());
  r.from_cache = j.at("from_cache").get<bool>();
  r.latency_ms = j.at("latency_ms").get<long long>();
  r.q1 = j.at("q1").get<bool>();
  r.q2 = j.at("q2").get<bool>();
  r.q3 = j.at("q3").get<bool>();
  r.q4 = j.at("q4").get<bool>();
  return r;
}

std::vector<RunRecord> load_records(const std::string& path,
                                    bool* dropped_partial_tail) {
  if (dropped_partial_tail) *dropped_partial_tail = false;
  std::vector<RunRecord> records;
  std::ifstream in(path, std::ios::binary);
  if (!in) return records;
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  std::size_t start = 0;
  while (start < content.size()) {
    const std::size_t nl = content.find('\n', start);
    const bool terminated = nl != std::string::npos;
    const std::string line =
        content.substr(start, terminated ? nl - start : std::string::npos);
    start = terminated ? nl + 1 : content.size();
    if (line.empty()) continue;
    try {
      records.push_back(RunRecord::from_json_line(line));
    } catch (const json::exception&) {
      const bool is_tail = start >= content.size();
      if (is_tail) {
        // interrupted append: drop the fragment
        if (dropped_partial_tail) *dropped_partial_tail = true;
        break;
      }
      throw IoFailure("corrupt record mid-file in " + path);
    }
    if (!terminated) {
      // parsed but unterminated: the writer died between line and newline;
      // keep it, the append below re-terminates
      if (dropped_partial_tail) *dropped_partial_tail = true;
    }
  }
  return records;
}

ExperimentResult run_experiment(const std::vector<LabeledSample>& samples,
                                const ExperimentConfig& config,
                                std::shared_ptr<CompletionBackend> backend,
                                Clock& clock) {
  if (config.records_path.empty()) {
    throw InvalidSpec("experiment needs a records path");
  }
  if (config.strategies.empty() || config.formats.empty()) {
    throw InvalidSpec("experiment needs at least one strategy and format");
  }
  if (config.repetitions < 1) throw InvalidSpec("repetitions must be >= 1");

  bool partial = false;
  ExperimentResult result;
  result.records = load_records(config.records_path, &partial);
  if (partial) {
    // rewrite the log with only intact records before appending
    const fs::path tmp = config.records_path + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw IoFailure("cannot rewrite " + config.records_path);
      for (const RunRecord& r : result.records) out << r.to_json_line() << "\n";
    }
    std::error_code ec;
    fs::rename(tmp, config.records_path, ec);
    if (ec) throw IoFailure("cannot replace record log: " + ec.message());
  }

  std::set<std::string> seen;
  for (const RunRecord& r : result.records) seen.insert(r.key());

  GatewayOptions gw;
  gw.cache_dir = config.cache_dir;
  gw.replay_only = config.replay_only;
  gw.max_per_minute = config.max_per_minute;
  Gateway gateway(backend, gw, clock);

  const fs::path parent = fs::path(config.records_path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    fs::create_directories(parent, ec);
  }
  std::ofstream out(config.records_path, std::ios::binary | std::ios::app);
  if (!out) throw IoFailure("cannot append to " + config.records_path);

  for (const LabeledSample& sample : samples) {
    for (const Strategy strategy : config.strategies) {
      for (const DataFormat format : config.formats) {
        for (int rep = 0; rep < config.repetitions; ++rep) {
          if (config.max_records > 0 && result.newly_run >= config.max_records) {
            return result;
          }
          RunRecord record;
          record.sample_id = sample.subject_id + "|" + sample.end_date().iso();
          record.subject_id = sample.subject_id;
          record.end_date = sample.end_date().iso();
          record.study_year = sample.study_year;
          record.strategy = strategy;
          record.format = format;
          record.model = gateway.model_name();
          record.repetition = rep;
          record.target = target_name(config.target);
          if (seen.count(record.key())) {
            ++result.skipped;
            continue;
          }

          PromptOptions opts = config.prompt;
          opts.target = config.target;
          const PromptBundle prompt =
              build_prompt(sample.window, strategy, format, opts);
          record.prompt_hash = prompt_hash_hex(prompt.rendered);

          RequestContext ctx;
          ctx.window = &sample.window;
          ctx.oracle_label = sample.label(config.target, config.policy);
          ctx.target = config.target;

          const auto before = clock.now();
          const CompletionResult completion =
              gateway.complete(prompt.rendered, ctx);
          const auto after = clock.now();

          record.reply = completion.text;
          record.from_cache = completion.from_cache;
          record.latency_ms =
              completion.from_cache
                  ? 0
                  : std::chrono::duration_cast<std::chrono::milliseconds>(
                        after - before)
                        .count();
          record.truth = sample.label(config.target, config.policy);

          const GradedResponse graded =
              grade_response(record.reply, sample.window);
          record.decision = graded.classification.decision;
          record.q1 = graded.report.q1;
          record.q2 = graded.report.q2;
          record.q3 = graded.report.q3;
          record.q4 = graded.report.q4;

          out << record.to_json_line() << "\n" << std::flush;
          if (!out) throw IoFailure("write failed on " + config.records_path);
          seen.insert(record.key());
          result.records.push_back(std::move(record));
          ++result.newly_run;

          if (config.throttle_ms > 0 && !completion.from_cache) {
            clock.sleep_for(std::chrono::milliseconds(config.throttle_ms));
          }
        }
      }
    }
  }
  return result;
}

}  // namespace phenollm
