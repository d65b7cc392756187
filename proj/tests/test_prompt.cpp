#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "phenollm/prompt.hpp"
#include "phenollm/table.hpp"
#include "support.hpp"

using namespace phenollm;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing fixture ", path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<DataFormat> all_formats() {
  return {DataFormat::Csv, DataFormat::Markdown, DataFormat::Tabular,
          DataFormat::Latex};
}

std::set<BlockKind> kinds_of(const PromptBundle& bundle) {
  std::set<BlockKind> out;
  for (const auto& b : bundle.blocks) out.insert(b.kind);
  return out;
}

}  // namespace

TEST_CASE("every strategy-format prompt matches its stored fixture byte for byte") {
  const FeatureWindow window = testing::canonical_window();
  for (Strategy s : all_strategies()) {
    for (DataFormat f : all_formats()) {
      const PromptBundle bundle = build_prompt(window, s, f);
      const std::string path = std::string(PHENOLLM_FIXTURE_DIR) +
                               "/prompts/" + strategy_name(s) + "_" +
                               format_name(f) + ".txt";
      CHECK_MESSAGE(bundle.rendered == read_file(path), "fixture drift: ",
                    path);
    }
  }
}

TEST_CASE("prompt assembly is deterministic") {
  const FeatureWindow window = testing::canonical_window();
  const PromptBundle a =
      build_prompt(window, Strategy::ChainOfThoughtDsm, DataFormat::Latex);
  const PromptBundle b =
      build_prompt(window, Strategy::ChainOfThoughtDsm, DataFormat::Latex);
  CHECK(a.rendered == b.rendered);
}

TEST_CASE("each strategy assembles its documented block set in order") {
  const FeatureWindow window = testing::canonical_window();
  using BK = BlockKind;

  auto kinds_in_order = [&](Strategy s) {
    std::vector<BK> out;
    for (const auto& b : build_prompt(window, s, DataFormat::Csv).blocks) {
      out.push_back(b.kind);
    }
    return out;
  };

  CHECK(kinds_in_order(Strategy::DirectPrediction) ==
        std::vector<BK>{BK::Role, BK::TaskDescription, BK::Data,
                        BK::Instructions});
  CHECK(kinds_in_order(Strategy::ChainOfThought) ==
        std::vector<BK>{BK::Role, BK::TaskDescription, BK::Data,
                        BK::Instructions});
  CHECK(kinds_in_order(Strategy::ChainOfThoughtExplained) ==
        std::vector<BK>{BK::Role, BK::TaskDescription, BK::Data,
                        BK::VariableDescriptions, BK::Instructions});
  CHECK(kinds_in_order(Strategy::ChainOfThoughtDsm) ==
        std::vector<BK>{BK::Role, BK::TaskDescription, BK::Data,
                        BK::DsmCriteria, BK::Instructions});
  CHECK(kinds_in_order(Strategy::ReasoningOnly) ==
        std::vector<BK>{BK::Role, BK::TaskDescription, BK::Data,
                        BK::Instructions});
}

TEST_CASE("the rendered prompt is the blocks joined by blank lines") {
  const FeatureWindow window = testing::canonical_window();
  for (Strategy s : all_strategies()) {
    const PromptBundle bundle = build_prompt(window, s, DataFormat::Markdown);
    std::string joined;
    for (std::size_t i = 0; i < bundle.blocks.size(); ++i) {
      if (i) joined += "\n\n";
      joined += bundle.blocks[i].text;
    }
    CHECK(bundle.rendered == joined);
    CHECK(bundle.rendered.substr(0, 5) == "Role:");
  }
}

TEST_CASE("the data block embeds the serialized table verbatim") {
  const FeatureWindow window = testing::canonical_window();
  for (DataFormat f : all_formats()) {
    const PromptBundle bundle =
        build_prompt(window, Strategy::ChainOfThought, f);
    const PromptBlock* data = bundle.find(BlockKind::Data);
    REQUIRE(data != nullptr);
    CHECK(data->text == "Collected Data:\n" + serialize_table(window, f));
  }
}

TEST_CASE("the task list renumbers itself to the blocks present") {
  const FeatureWindow window = testing::canonical_window();

  auto task_text = [&](Strategy s) {
    return build_prompt(window, s, DataFormat::Csv)
        .find(BlockKind::TaskDescription)
        ->text;
  };

  const std::string direct = task_text(Strategy::DirectPrediction);
  CHECK(direct.find("1. A table consisting of twenty-eight days") !=
        std::string::npos);
  CHECK(direct.find("2. Instructions on how to analyze the data") !=
        std::string::npos);
  CHECK(direct.find("3.") == std::string::npos);

  const std::string explained = task_text(Strategy::ChainOfThoughtExplained);
  CHECK(explained.find("2. Explanation of the different types of data.") !=
        std::string::npos);
  CHECK(explained.find("3. Instructions on how to analyze the data") !=
        std::string::npos);

  const std::string dsm = task_text(Strategy::ChainOfThoughtDsm);
  CHECK(dsm.find("2. DSM-5 Criteria for depression.") != std::string::npos);
  CHECK(dsm.find("3. Instructions on how to analyze the data") !=
        std::string::npos);
}

TEST_CASE("the day count is written out in words") {
  const SchemaPtr& schema = globem_schema();
  std::vector<Date> dates;
  std::vector<FeatureWindow::Row> rows;
  for (int d = 0; d < 14; ++d) {
    dates.push_back(Date(2019, 4, 29).plus_days(d));
    rows.push_back(FeatureWindow::Row(schema->size(), 5.0));
  }
  const FeatureWindow two_weeks(schema, dates, rows);
  const PromptBundle bundle =
      build_prompt(two_weeks, Strategy::ChainOfThought, DataFormat::Csv);
  CHECK(bundle.find(BlockKind::TaskDescription)->text.find("fourteen days") !=
        std::string::npos);
}

TEST_CASE("direct prediction asks only for the answer, reasoning adds a step") {
  const FeatureWindow window = testing::canonical_window();
  const std::string direct =
      build_prompt(window, Strategy::DirectPrediction, DataFormat::Csv)
          .find(BlockKind::Instructions)
          ->text;
  CHECK(direct.find("best guess") != std::string::npos);
  CHECK(direct.find("hypothesize") == std::string::npos);

  const std::string cot =
      build_prompt(window, Strategy::ChainOfThought, DataFormat::Csv)
          .find(BlockKind::Instructions)
          ->text;
  CHECK(cot.find("1. Based on the collected data, hypothesize") !=
        std::string::npos);
  CHECK(cot.find("2. Make your best guess") != std::string::npos);

  const std::string reason =
      build_prompt(window, Strategy::ReasoningOnly, DataFormat::Csv)
          .find(BlockKind::Instructions)
          ->text;
  CHECK(reason.find("point out any specific trends or data points") !=
        std::string::npos);
  CHECK(reason.find("Yes") == std::string::npos);
}

TEST_CASE("the anxiety target swaps the condition word in instructions only") {
  const FeatureWindow window = testing::canonical_window();
  PromptOptions anxious;
  anxious.target = Target::Anxiety;
  const PromptBundle dep =
      build_prompt(window, Strategy::ChainOfThoughtDsm, DataFormat::Csv);
  const PromptBundle anx =
      build_prompt(window, Strategy::ChainOfThoughtDsm, DataFormat::Csv,
                   anxious);

  CHECK(anx.find(BlockKind::Instructions)
            ->text.find("currently experiencing anxiety") !=
        std::string::npos);
  CHECK(anx.find(BlockKind::Instructions)->text.find("depression") ==
        std::string::npos);
  for (BlockKind k : {BlockKind::Role, BlockKind::TaskDescription,
                      BlockKind::Data, BlockKind::DsmCriteria}) {
    CHECK(dep.find(k)->text == anx.find(k)->text);
  }
}

TEST_CASE("the criteria block lists nine numbered symptoms") {
  const FeatureWindow window = testing::canonical_window();
  const std::string dsm =
      build_prompt(window, Strategy::ChainOfThoughtDsm, DataFormat::Csv)
          .find(BlockKind::DsmCriteria)
          ->text;
  CHECK(dsm.find("DSM-5 outlines the following criterion") != std::string::npos);
  for (int i = 1; i <= 9; ++i) {
    CHECK(dsm.find("\n" + std::to_string(i) + ". ") != std::string::npos);
  }

  PromptOptions custom;
  custom.dsm_text = "Criteria\nShortened for a context-limited model.";
  const PromptBundle swapped = build_prompt(
      window, Strategy::ChainOfThoughtDsm, DataFormat::Csv, custom);
  CHECK(swapped.find(BlockKind::DsmCriteria)->text == custom.dsm_text);
}

TEST_CASE("richer strategies only ever add blocks") {
  const FeatureWindow window = testing::canonical_window();
  const auto direct =
      kinds_of(build_prompt(window, Strategy::DirectPrediction, DataFormat::Csv));
  for (Strategy s : {Strategy::ChainOfThought, Strategy::ChainOfThoughtExplained,
                     Strategy::ChainOfThoughtDsm}) {
    const auto richer = kinds_of(build_prompt(window, s, DataFormat::Csv));
    CHECK(std::includes(richer.begin(), richer.end(), direct.begin(),
                        direct.end()));
  }
}

TEST_CASE("variable descriptions cover every schema column") {
  const FeatureWindow window = testing::canonical_window();
  const std::string vars =
      build_prompt(window, Strategy::ChainOfThoughtExplained, DataFormat::Csv)
          .find(BlockKind::VariableDescriptions)
          ->text;
  CHECK(vars.find("Date: the data in this row was recorded") !=
        std::string::npos);
  for (const auto& col : globem_schema()->columns()) {
    CHECK(vars.find("\n" + col.header_name + ": ") != std::string::npos);
  }
}

TEST_CASE("numbers spell out as english words") {
  CHECK(number_words(0) == "zero");
  CHECK(number_words(7) == "seven");
  CHECK(number_words(14) == "fourteen");
  CHECK(number_words(20) == "twenty");
  CHECK(number_words(28) == "twenty-eight");
  CHECK(number_words(56) == "fifty-six");
  CHECK(number_words(100) == "one hundred");
  CHECK(number_words(135) == "one hundred thirty-five");
}

TEST_CASE("strategy names round-trip") {
  for (Strategy s : all_strategies()) {
    CHECK(parse_strategy_name(strategy_name(s)) == s);
  }
  CHECK_FALSE(parse_strategy_name("mystery").has_value());
}
