#include "phenollm/prompt.hpp"

#include "phenollm/errors.hpp"

namespace phenollm {

namespace {

constexpr const char* kRoleBlock =
    "Role:\n"
    "You are a data analyst helping a psychiatrist understand human activity "
    "data.";

constexpr const char* kTaskIntro =
    "Task:\n"
    "You will be shown data gathered from a smartphone and smart watch worn "
    "by an individual. Your goal is to analyze this data.\n"
    "You are presented with the following:";

constexpr const char* kVariableIntro =
    "Description of variables\n"
    "For the duration of the data collection period, data was logged from "
    "the individual's smartphone and a fitness tracking smartwatch. An "
    "explanation of the different types of data logged is included below:\n"
    "Date: the data in this row was recorded on that date.";

constexpr const char* kDsmBlock =
    "Depression Criteria\n"
    "Here is the DSM-5 Criteria for depression. The DSM-5 outlines the "
    "following criterion to make a diagnosis of depression. The individual "
    "must be experiencing five or more symptoms during the same 2-week "
    "period and at least one of the symptoms should be either (1) depressed "
    "mood or (2) loss of interest or pleasure.\n"
    "1. Depressed mood most of the day, nearly every day.\n"
    "2. Markedly diminished interest or pleasure in all, or almost all, "
    "activities most of the day, nearly every day.\n"
    "3. Significant weight loss when not dieting, weight gain, or a decrease "
    "or increase in appetite nearly every day.\n"
    "4. Insomnia or hypersomnia nearly every day.\n"
    "5. Psychomotor agitation or retardation nearly every day.\n"
    "6. Fatigue or loss of energy nearly every day.\n"
    "7. Feelings of worthlessness or excessive or inappropriate guilt nearly "
    "every day.\n"
    "8. Diminished ability to think or concentrate, or indecisiveness, "
    "nearly every day.\n"
    "9. Recurrent thoughts of death, recurrent suicidal ideation without a "
    "specific plan, or a suicide attempt or a specific plan for suicide.\n"
    "To receive a diagnosis of depression, these symptoms must cause "
    "clinically significant distress or impairment in social, occupational, "
    "or other important areas of functioning, and must not be the result of "
    "substance abuse or another medical condition.";

constexpr const char* kReasoningInstructions =
    "Instructions\n"
    "Although the data does not contain explicit information on mood, trends "
    "in physiological signals have been shown to correlate with mental "
    "health symptoms. Examine this data and point out any specific trends or "
    "data points that could spark fruitful conversation with a mental health "
    "professional.";

const char* ones_words[] = {"zero", "one", "two", "three", "four", "five",
                            "six", "seven", "eight", "nine", "ten", "eleven",
                            "twelve", "thirteen", "fourteen", "fifteen",
                            "sixteen", "seventeen", "eighteen", "nineteen"};
const char* tens_words[] = {"", "", "twenty", "thirty", "forty", "fifty",
                            "sixty", "seventy", "eighty", "ninety"};

std::string condition_word(Target target) {
  return target == Target::Depression ? "depression" : "anxiety";
}

std::string classify_item(Target target) {
  return "Make your best guess if this person is currently experiencing " +
         condition_word(target) +
         ". Please answer only \"Yes\" or \"No\" to this question.";
}

constexpr const char* kHypothesisItem =
    "Based on the collected data, hypothesize about the overall mental "
    "health of the individual with detailed explanations.";

std::string numbered(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    out += "\n" + std::to_string(i + 1) + ". " + items[i];
  }
  return out;
}

}  // namespace

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::DirectPrediction: return "direct";
    case Strategy::ChainOfThought: return "cot";
    case Strategy::ChainOfThoughtExplained: return "cot-explained";
    case Strategy::ChainOfThoughtDsm: return "cot-dsm";
    case Strategy::ReasoningOnly: return "reasoning-only";
  }
  return "unknown";
}

std::optional<Strategy> parse_strategy_name(const std::string& name) {
  for (Strategy s : all_strategies()) {
    if (name == strategy_name(s)) return s;
  }
  return std::nullopt;
}

std::vector<Strategy> all_strategies() {
  return {Strategy::DirectPrediction, Strategy::ChainOfThought,
          Strategy::ChainOfThoughtExplained, Strategy::ChainOfThoughtDsm,
          Strategy::ReasoningOnly};
}

const char* block_kind_name(BlockKind kind) {
  switch (kind) {
    case BlockKind::Role: return "role";
    case BlockKind::TaskDescription: return "task";
    case BlockKind::Data: return "data";
    case BlockKind::VariableDescriptions: return "variables";
    case BlockKind::DsmCriteria: return "criteria";
    case BlockKind::Instructions: return "instructions";
  }
  return "unknown";
}

const PromptBlock* PromptBundle::find(BlockKind kind) const {
  for (const auto& b : blocks) {
    if (b.kind == kind) return &b;
  }
  return nullptr;
}

std::string number_words(std::size_t n) {
  if (n < 20) return ones_words[n];
  if (n < 100) {
    std::string out = tens_words[n / 10];
    if (n % 10) out += std::string("-") + ones_words[n % 10];
    return out;
  }
  if (n < 200) {
    std::string out = "one hundred";
    if (n % 100) out += " " + number_words(n % 100);
    return out;
  }
  return std::to_string(n);
}

PromptBundle build_prompt(const FeatureWindow& window, Strategy strategy,
                          DataFormat format, const PromptOptions& options) {
  const bool with_variables = strategy == Strategy::ChainOfThoughtExplained;
  const bool with_criteria = strategy == Strategy::ChainOfThoughtDsm;

  PromptBundle bundle;
  bundle.strategy = strategy;
  bundle.format = format;
  bundle.target = options.target;

  bundle.blocks.push_back({BlockKind::Role, kRoleBlock});

  std::vector<std::string> items;
  items.push_back("A table consisting of " + number_words(window.days()) +
                  " days of collected activity tracking data [Collected Data]");
  if (with_variables) {
    items.push_back(
        "Explanation of the different types of data. [Description of "
        "Variables]");
  }
  if (with_criteria) {
    items.push_back("DSM-5 Criteria for depression. [Depression Criteria]");
  }
  items.push_back("Instructions on how to analyze the data [Instructions]");
  bundle.blocks.push_back(
      {BlockKind::TaskDescription, kTaskIntro + numbered(items)});

  bundle.blocks.push_back(
      {BlockKind::Data, "Collected Data:\n" + serialize_table(window, format)});

  if (with_variables) {
    std::string text = kVariableIntro;
    for (const auto& col : window.schema()->columns()) {
      text += "\n" + col.header_name + ": " + col.description;
    }
    bundle.blocks.push_back({BlockKind::VariableDescriptions, std::move(text)});
  }

  if (with_criteria) {
    bundle.blocks.push_back(
        {BlockKind::DsmCriteria,
         options.dsm_text.empty() ? kDsmBlock : options.dsm_text});
  }

  std::string instructions;
  switch (strategy) {
    case Strategy::DirectPrediction:
      instructions = "Instructions" + numbered({classify_item(options.target)});
      break;
    case Strategy::ChainOfThought:
    case Strategy::ChainOfThoughtExplained:
    case Strategy::ChainOfThoughtDsm:
      instructions = "Instructions" +
                     numbered({kHypothesisItem, classify_item(options.target)});
      break;
    case Strategy::ReasoningOnly:
      instructions = kReasoningInstructions;
      break;
  }
  bundle.blocks.push_back({BlockKind::Instructions, std::move(instructions)});

  for (std::size_t i = 0; i < bundle.blocks.size(); ++i) {
    if (i) bundle.rendered += "\n\n";
    bundle.rendered += bundle.blocks[i].text;
  }
  return bundle;
}

}  // namespace phenollm
