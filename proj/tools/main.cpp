// Command-line harness around the library: synthetic data, sampling,
// prompt assembly, experiment runs, reply grading, tuning-set curation,
// the forest baseline, and report rendering.
//
// Exit codes: 0 success, 1 operational failure, 2 usage error.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "phenollm/curate.hpp"
#include "phenollm/dataset.hpp"
#include "phenollm/errors.hpp"
#include "phenollm/experiment.hpp"
#include "phenollm/forest.hpp"
#include "phenollm/gateway.hpp"
#include "phenollm/metrics.hpp"
#include "phenollm/mock_backend.hpp"
#include "phenollm/prompt.hpp"
#include "phenollm/report.hpp"
#include "phenollm/rng.hpp"
#include "phenollm/synthetic.hpp"
#include "phenollm/table.hpp"
#include "phenollm/verify.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace phenollm;

namespace {

std::uint64_t fresh_seed() {
  std::random_device rd;
  const auto ticks = static_cast<std::uint64_t>(
      std::chrono::steady_clock::now().time_since_epoch().count());
  return splitmix64((static_cast<std::uint64_t>(rd()) << 32) ^ rd() ^ ticks);
}

std::uint64_t seed_or_fresh(const std::optional<std::uint64_t>& given,
                            const std::string& what) {
  if (given) return *given;
  const std::uint64_t seed = fresh_seed();
  std::cout << what << " seed " << seed << "\n";
  return seed;
}

Target parse_target_or_die(const std::string& name) {
  const auto target = parse_target_name(name);
  if (!target) throw CLI::ValidationError("--target", "unknown target " + name);
  return *target;
}

std::vector<Strategy> parse_strategies(const std::vector<std::string>& names) {
  std::vector<Strategy> out;
  for (const std::string& n : names) {
    const auto s = parse_strategy_name(n);
    if (!s) throw CLI::ValidationError("--strategies", "unknown strategy " + n);
    out.push_back(*s);
  }
  return out;
}

std::vector<DataFormat> parse_formats(const std::vector<std::string>& names) {
  std::vector<DataFormat> out;
  for (const std::string& n : names) {
    const auto f = parse_format_name(n);
    if (!f) throw CLI::ValidationError("--formats", "unknown format " + n);
    out.push_back(*f);
  }
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spill(const std::string& path, const std::string& body) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    fs::create_directories(parent, ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot write " + path);
  out << body;
}

const LabeledSample& find_sample(const Dataset& dataset, const std::string& id) {
  for (const LabeledSample& s : dataset.samples) {
    if (s.subject_id + "|" + s.end_date().iso() == id) return s;
  }
  throw EmptyDataset("no sample with id '" + id + "' (expected subject|date)");
}

// ----- shared option bundles -----

struct BackendFlags {
  std::string kind = "mock";
  // mock
  std::optional<std::uint64_t> mock_seed;
  std::string answer_mode = "oracle";
  double numeric_error_rate = 0.0;
  double trend_error_rate = 0.0;
  std::size_t claims = 3;
  std::string mock_model = "mock-reasoner";
  // http
  std::string base_url;
  std::string api_path = "/v1/chat/completions";
  std::string model;
  std::string api_key_env = "LLM_API_KEY";
  double temperature = 0.0;
  int max_attempts = 5;
  int timeout_seconds = 120;
};

void add_backend_flags(CLI::App* cmd, BackendFlags& flags) {
  cmd->add_option("--backend", flags.kind, "mock or http")
      ->check(CLI::IsMember({"mock", "http"}));
  cmd->add_option("--mock-seed", flags.mock_seed, "mock reply stream seed");
  cmd->add_option("--answer-mode", flags.answer_mode,
                  "mock answers: always-no, always-yes, oracle, coin");
  cmd->add_option("--numeric-error-rate", flags.numeric_error_rate,
                  "mock probability of corrupting a numeric claim");
  cmd->add_option("--trend-error-rate", flags.trend_error_rate,
                  "mock probability of corrupting a trend claim");
  cmd->add_option("--claims", flags.claims, "mock numeric claims per reply");
  cmd->add_option("--mock-model", flags.mock_model, "mock model name");
  cmd->add_option("--base-url", flags.base_url, "http backend root url");
  cmd->add_option("--api-path", flags.api_path, "completions endpoint path");
  cmd->add_option("--model", flags.model, "http backend model name");
  cmd->add_option("--api-key-env", flags.api_key_env,
                  "environment variable holding the bearer token");
  cmd->add_option("--temperature", flags.temperature, "sampling temperature");
  cmd->add_option("--max-attempts", flags.max_attempts, "retry budget");
  cmd->add_option("--timeout", flags.timeout_seconds, "per-request seconds");
}

std::shared_ptr<CompletionBackend> make_backend(const BackendFlags& flags,
                                                Clock& clock) {
  if (flags.kind == "mock") {
    MockPolicy policy;
    policy.seed = flags.mock_seed.value_or(0);
    const auto mode = parse_answer_mode(flags.answer_mode);
    if (!mode) {
      throw CLI::ValidationError("--answer-mode",
                                 "unknown mode " + flags.answer_mode);
    }
    policy.answer_mode = *mode;
    policy.numeric_error_rate = flags.numeric_error_rate;
    policy.trend_error_rate = flags.trend_error_rate;
    policy.claims_per_response = flags.claims;
    return std::make_shared<MockBackend>(policy, flags.mock_model);
  }
  HttpBackendConfig config;
  config.base_url = flags.base_url;
  config.path = flags.api_path;
  config.model = flags.model;
  config.api_key_env = flags.api_key_env;
  config.temperature = flags.temperature;
  config.max_attempts = flags.max_attempts;
  config.timeout_seconds = flags.timeout_seconds;
  return std::make_shared<HttpBackend>(config, clock);
}

// ----- subcommand configs -----

struct GenArgs {
  std::string out_dir;
  std::string spec_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> subjects, years, weeks, window_days;
  std::optional<double> positive_fraction;
};

int cmd_dataset_gen(const GenArgs& args) {
  SyntheticSpec spec = args.spec_path.empty()
                           ? SyntheticSpec::plausible_defaults()
                           : spec_from_json(json::parse(slurp(args.spec_path)));
  spec.seed = seed_or_fresh(args.seed ? args.seed
                                      : (args.spec_path.empty()
                                             ? std::nullopt
                                             : std::optional<std::uint64_t>(
                                                   spec.seed)),
                            "generator");
  if (args.subjects) spec.subjects = *args.subjects;
  if (args.years) spec.years = *args.years;
  if (args.weeks) spec.weeks_per_year = *args.weeks;
  if (args.window_days) spec.window_days = *args.window_days;
  if (args.positive_fraction) spec.positive_fraction = *args.positive_fraction;

  const SyntheticResult result = generate_synthetic(spec, globem_schema());
  spill((fs::path(args.out_dir) / "daily.csv").string(), result.csv);
  spill((fs::path(args.out_dir) / "truth.json").string(),
        result.truth.dump(2) + "\n");
  spill((fs::path(args.out_dir) / "spec.json").string(),
        spec_to_json(spec).dump(2) + "\n");
  std::cout << "wrote " << args.out_dir << "/daily.csv ("
            << result.dataset.samples.size() << " windows, "
            << result.dataset.dropped_short_windows << " dropped)\n";
  return 0;
}

struct SampleArgs {
  std::string data;
  std::size_t per_year = 24;
  std::optional<std::uint64_t> seed;
  std::string target = "depression";
  std::string out;
};

int cmd_dataset_sample(const SampleArgs& args) {
  const Dataset dataset = load_dataset(args.data, globem_schema());
  const Target target = parse_target_or_die(args.target);
  const std::uint64_t seed = seed_or_fresh(args.seed, "sampling");
  const DatasetSplit split =
      balanced_sample(dataset.samples, args.per_year, seed, target);
  json out = {{"seed", seed},
              {"per_year", args.per_year},
              {"target", target_name(target)},
              {"test", json::array()},
              {"train", json::array()}};
  for (const LabeledSample& s : split.test) {
    out["test"].push_back(s.subject_id + "|" + s.end_date().iso());
  }
  for (const LabeledSample& s : split.train) {
    out["train"].push_back(s.subject_id + "|" + s.end_date().iso());
  }
  const std::string body = out.dump(2) + "\n";
  if (args.out.empty()) {
    std::cout << body;
  } else {
    spill(args.out, body);
    std::cout << "wrote " << args.out << " (" << split.test.size() << " test, "
              << split.train.size() << " train)\n";
  }
  return 0;
}

struct PromptArgs {
  std::string data;
  std::string sample_id;
  std::string strategy = "cot";
  std::string format = "csv";
  std::string target = "depression";
  std::string out;
};

int cmd_prompt_build(const PromptArgs& args) {
  const Dataset dataset = load_dataset(args.data, globem_schema());
  const LabeledSample& sample = find_sample(dataset, args.sample_id);
  const auto strategy = parse_strategy_name(args.strategy);
  if (!strategy) {
    throw CLI::ValidationError("--strategy", "unknown strategy " + args.strategy);
  }
  const auto format = parse_format_name(args.format);
  if (!format) {
    throw CLI::ValidationError("--format", "unknown format " + args.format);
  }
  PromptOptions opts;
  opts.target = parse_target_or_die(args.target);
  const PromptBundle bundle =
      build_prompt(sample.window, *strategy, *format, opts);
  if (args.out.empty()) {
    std::cout << bundle.rendered << "\n";
  } else {
    spill(args.out, bundle.rendered);
    std::cout << "wrote " << args.out << " (hash "
              << prompt_hash_hex(bundle.rendered) << ")\n";
  }
  return 0;
}

struct RunArgs {
  std::string data;
  std::size_t per_year = 24;
  std::optional<std::uint64_t> seed;
  std::string target = "depression";
  std::vector<std::string> strategies;
  std::vector<std::string> formats = {"csv", "markdown", "tabular", "latex"};
  int reps = 1;
  std::string records;
  std::string cache_dir;
  bool replay_only = false;
  std::size_t max_per_minute = 0;
  int throttle_ms = 0;
  std::size_t max_records = 0;
  BackendFlags backend;
};

int cmd_run(const RunArgs& args, bool reasoning) {
  const Dataset dataset = load_dataset(args.data, globem_schema());
  const Target target = parse_target_or_die(args.target);
  const std::uint64_t seed = seed_or_fresh(args.seed, "sampling");
  const DatasetSplit split =
      balanced_sample(dataset.samples, args.per_year, seed, target);

  ExperimentConfig config;
  config.strategies =
      reasoning ? std::vector<Strategy>{Strategy::ReasoningOnly}
                : parse_strategies(args.strategies);
  config.formats = parse_formats(args.formats);
  config.target = target;
  config.repetitions = args.reps;
  config.records_path = args.records;
  config.cache_dir = args.cache_dir;
  config.replay_only = args.replay_only;
  config.max_per_minute = args.max_per_minute;
  config.throttle_ms = args.throttle_ms;
  config.max_records = args.max_records;

  // The mock works on virtual time so records stay byte-deterministic; a
  // live backend needs the real clock for limits and latency.
  FakeClock fake;
  SystemClock real;
  Clock& clock = args.backend.kind == "mock" ? static_cast<Clock&>(fake)
                                             : static_cast<Clock&>(real);
  const auto backend = make_backend(args.backend, clock);
  const ExperimentResult result =
      run_experiment(split.test, config, backend, clock);

  std::cout << "records: " << result.newly_run << " new, " << result.skipped
            << " skipped, " << result.records.size() << " total\n";
  for (const auto& [key, m] : compute_metrics(result.records)) {
    std::cout << strategy_name(key.strategy) << "/" << format_name(key.format)
              << "/" << key.model << ": accuracy "
              << render_percent(m.accuracy()) << " over " << m.total
              << " (yes " << render_percent(m.yes_rate()) << ", unparseable "
              << render_percent(m.unparseable_rate()) << ")\n";
  }
  return 0;
}

struct VerifyArgs {
  std::string data;
  std::string sample_id;
  std::string reply_file;
};

int cmd_verify(const VerifyArgs& args) {
  const Dataset dataset = load_dataset(args.data, globem_schema());
  const LabeledSample& sample = find_sample(dataset, args.sample_id);
  std::string reply;
  if (args.reply_file.empty() || args.reply_file == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    reply = buf.str();
  } else {
    reply = slurp(args.reply_file);
  }
  const GradedResponse graded = grade_response(reply, sample.window);
  std::cout << annotate_report(graded);
  return 0;
}

struct CurateArgs {
  std::string records;
  std::string data;
  std::size_t size = 70;
  std::optional<std::uint64_t> seed;
  std::string target = "depression";
  int epochs = 2;
  bool keep_wrong = false;
  bool keep_dirty = false;
  std::string out_dataset = "tuning.jsonl";
  std::string out_manifest = "tuning_manifest.json";
};

int cmd_curate(const CurateArgs& args) {
  const std::vector<RunRecord> records = load_records(args.records);
  if (records.empty()) throw EmptyRecords(args.records);
  const Dataset dataset = load_dataset(args.data, globem_schema());
  CurationCriteria criteria;
  criteria.target_size = args.size;
  criteria.require_correct = !args.keep_wrong;
  criteria.require_clean_numbers = !args.keep_dirty;
  criteria.epochs = args.epochs;
  criteria.seed = seed_or_fresh(args.seed, "curation");
  const CurationResult result = curate_records(
      records, dataset, criteria, parse_target_or_die(args.target));
  spill(args.out_dataset, result.dataset_jsonl);
  spill(args.out_manifest, result.manifest_json);
  std::cout << "wrote " << args.out_dataset << " (" << result.positives
            << " positive, " << result.negatives << " negative) and "
            << args.out_manifest << "\n";
  return 0;
}

struct BaselineArgs {
  std::string data;
  std::size_t per_year = 24;
  std::optional<std::uint64_t> seed;
  std::string target = "depression";
  std::size_t trees = 100;
  std::size_t max_depth = 8;
  std::size_t features_per_split = 0;
  std::string model_out;
  std::string model_in;
};

int cmd_baseline_rf(const BaselineArgs& args) {
  const Dataset dataset = load_dataset(args.data, globem_schema());
  const Target target = parse_target_or_die(args.target);
  const std::uint64_t seed = seed_or_fresh(args.seed, "baseline");
  const DatasetSplit split =
      balanced_sample(dataset.samples, args.per_year, seed, target);

  std::optional<TrainedForest> forest;
  if (!args.model_in.empty()) {
    forest = TrainedForest::from_json(slurp(args.model_in));
  } else {
    ForestConfig config;
    config.trees = args.trees;
    config.max_depth = args.max_depth;
    config.features_per_split = args.features_per_split;
    config.seed = seed;
    config.target = target;
    forest = train_forest(split.train, config);
    std::cout << "trained " << config.trees << " trees on "
              << split.train.size() << " samples\n";
  }
  if (!args.model_out.empty()) {
    spill(args.model_out, forest->to_json());
    std::cout << "wrote " << args.model_out << "\n";
  }
  const double accuracy = evaluate_accuracy(*forest, split.test);
  std::cout << "test accuracy " << render_percent(accuracy) << " over "
            << split.test.size() << " samples\n";
  return 0;
}

struct ReportArgs {
  std::string records;
  std::string out_dir = "report";
};

int cmd_report(const ReportArgs& args) {
  const std::vector<RunRecord> records = load_records(args.records);
  if (records.empty()) throw EmptyRecords(args.records);
  const ReportFiles files = write_report(compute_metrics(records), args.out_dir);
  std::cout << "wrote " << files.metrics_csv << "\n"
            << "wrote " << files.accuracy_svg << "\n"
            << "wrote " << files.rubric_svg << "\n"
            << "wrote " << files.summary_txt << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"desk-scale behavioral sensing prompts, grading, and baselines"};
  app.require_subcommand(1);

  // dataset
  auto* dataset_cmd = app.add_subcommand("dataset", "generate or sample data");
  dataset_cmd->require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = dataset_cmd->add_subcommand("gen", "write a synthetic corpus");
  gen_cmd->add_option("--out", gen.out_dir, "output directory")->required();
  gen_cmd->add_option("--spec", gen.spec_path, "generator spec json");
  gen_cmd->add_option("--seed", gen.seed, "generator seed");
  gen_cmd->add_option("--subjects", gen.subjects, "subject count");
  gen_cmd->add_option("--years", gen.years, "study years");
  gen_cmd->add_option("--weeks", gen.weeks, "assessment weeks per year");
  gen_cmd->add_option("--window-days", gen.window_days, "window length");
  gen_cmd->add_option("--positive-fraction", gen.positive_fraction,
                      "share of high-severity subject-years");

  SampleArgs sample;
  auto* sample_cmd =
      dataset_cmd->add_subcommand("sample", "balanced test/train split");
  sample_cmd->add_option("--data", sample.data, "csv file or directory")
      ->required();
  sample_cmd->add_option("--per-year", sample.per_year, "test windows per year");
  sample_cmd->add_option("--seed", sample.seed, "sampling seed");
  sample_cmd->add_option("--target", sample.target, "depression or anxiety");
  sample_cmd->add_option("--out", sample.out, "write split json here");

  // prompt
  auto* prompt_cmd = app.add_subcommand("prompt", "assemble prompts");
  prompt_cmd->require_subcommand(1);
  PromptArgs prompt;
  auto* prompt_build = prompt_cmd->add_subcommand("build", "print one prompt");
  prompt_build->add_option("--data", prompt.data, "csv file or directory")
      ->required();
  prompt_build->add_option("--sample", prompt.sample_id, "subject|end-date")
      ->required();
  prompt_build->add_option("--strategy", prompt.strategy,
                           "direct, cot, cot-explained, cot-dsm, reasoning-only");
  prompt_build->add_option("--format", prompt.format,
                           "csv, markdown, tabular, latex");
  prompt_build->add_option("--target", prompt.target, "depression or anxiety");
  prompt_build->add_option("--out", prompt.out, "write prompt here");

  // run
  auto* run_cmd = app.add_subcommand("run", "execute an experiment grid");
  run_cmd->require_subcommand(1);
  RunArgs classify;
  classify.strategies = {"direct", "cot", "cot-explained", "cot-dsm"};
  auto* classify_cmd =
      run_cmd->add_subcommand("classify", "yes/no prediction grid");
  RunArgs reason;
  auto* reason_cmd =
      run_cmd->add_subcommand("reason", "open-ended reasoning runs");
  for (auto& [cmd, args] : {std::pair<CLI::App*, RunArgs*>{classify_cmd, &classify},
                            {reason_cmd, &reason}}) {
    cmd->add_option("--data", args->data, "csv file or directory")->required();
    cmd->add_option("--per-year", args->per_year, "test windows per year");
    cmd->add_option("--seed", args->seed, "sampling seed");
    cmd->add_option("--target", args->target, "depression or anxiety");
    cmd->add_option("--formats", args->formats, "table formats")
        ->delimiter(',');
    cmd->add_option("--reps", args->reps, "repetitions per cell");
    cmd->add_option("--records", args->records, "jsonl record log")->required();
    cmd->add_option("--cache-dir", args->cache_dir, "reply cache directory");
    cmd->add_flag("--replay-only", args->replay_only,
                  "serve replies from cache only");
    cmd->add_option("--max-per-minute", args->max_per_minute,
                    "rate limit for live calls");
    cmd->add_option("--throttle-ms", args->throttle_ms,
                    "pause after each live call");
    cmd->add_option("--max-records", args->max_records,
                    "stop after this many new records");
    add_backend_flags(cmd, args->backend);
  }
  classify_cmd->add_option("--strategies", classify.strategies,
                           "prompting strategies")
      ->delimiter(',');

  // verify
  VerifyArgs verify;
  auto* verify_cmd =
      app.add_subcommand("verify", "grade one reply against its window");
  verify_cmd->add_option("--data", verify.data, "csv file or directory")
      ->required();
  verify_cmd->add_option("--sample", verify.sample_id, "subject|end-date")
      ->required();
  verify_cmd->add_option("--reply-file", verify.reply_file,
                         "reply text file ('-' or omit for stdin)");

  // curate
  CurateArgs curate;
  auto* curate_cmd =
      app.add_subcommand("curate", "select a balanced tuning set");
  curate_cmd->add_option("--records", curate.records, "jsonl record log")
      ->required();
  curate_cmd->add_option("--data", curate.data, "csv file or directory")
      ->required();
  curate_cmd->add_option("--size", curate.size, "total examples (even)");
  curate_cmd->add_option("--seed", curate.seed, "selection seed");
  curate_cmd->add_option("--target", curate.target, "depression or anxiety");
  curate_cmd->add_option("--epochs", curate.epochs, "recommended epochs");
  curate_cmd->add_flag("--keep-wrong", curate.keep_wrong,
                       "do not require a correct decision");
  curate_cmd->add_flag("--keep-dirty", curate.keep_dirty,
                       "do not require verified numeric citations");
  curate_cmd->add_option("--out-dataset", curate.out_dataset, "jsonl output");
  curate_cmd->add_option("--out-manifest", curate.out_manifest, "json output");

  // baseline
  auto* baseline_cmd = app.add_subcommand("baseline", "classical baselines");
  baseline_cmd->require_subcommand(1);
  BaselineArgs baseline;
  auto* rf_cmd = baseline_cmd->add_subcommand("rf", "random forest baseline");
  rf_cmd->add_option("--data", baseline.data, "csv file or directory")
      ->required();
  rf_cmd->add_option("--per-year", baseline.per_year, "test windows per year");
  rf_cmd->add_option("--seed", baseline.seed, "split and bagging seed");
  rf_cmd->add_option("--target", baseline.target, "depression or anxiety");
  rf_cmd->add_option("--trees", baseline.trees, "tree count");
  rf_cmd->add_option("--max-depth", baseline.max_depth, "depth limit");
  rf_cmd->add_option("--features-per-split", baseline.features_per_split,
                     "columns tried per split (0 = sqrt)");
  rf_cmd->add_option("--model-out", baseline.model_out, "dump trained model");
  rf_cmd->add_option("--model-in", baseline.model_in,
                     "evaluate an existing model instead of training");

  // report
  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "render metric files");
  report_cmd->add_option("--records", report.records, "jsonl record log")
      ->required();
  report_cmd->add_option("--out-dir", report.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen_cmd->parsed()) return cmd_dataset_gen(gen);
    if (sample_cmd->parsed()) return cmd_dataset_sample(sample);
    if (prompt_build->parsed()) return cmd_prompt_build(prompt);
    if (classify_cmd->parsed()) return cmd_run(classify, false);
    if (reason_cmd->parsed()) return cmd_run(reason, true);
    if (verify_cmd->parsed()) return cmd_verify(verify);
    if (curate_cmd->parsed()) return cmd_curate(curate);
    if (rf_cmd->parsed()) return cmd_baseline_rf(baseline);
    if (report_cmd->parsed()) return cmd_report(report);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no subcommand\n";
  return 2;
}
