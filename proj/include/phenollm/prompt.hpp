#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phenollm/table.hpp"
#include "phenollm/window.hpp"

namespace phenollm {

enum class Strategy {
  DirectPrediction,
  ChainOfThought,
  ChainOfThoughtExplained,
  ChainOfThoughtDsm,
  ReasoningOnly,
};

const char* strategy_name(Strategy s);
std::optional<Strategy> parse_strategy_name(const std::string& name);
std::vector<Strategy> all_strategies();

enum class BlockKind {
  Role,
  TaskDescription,
  Data,
  VariableDescriptions,
  DsmCriteria,
  Instructions,
};

const char* block_kind_name(BlockKind kind);

struct PromptBlock {
  BlockKind kind;
  std::string text;
};

struct PromptOptions {
  Target target = Target::Depression;
  // Replaces the built-in diagnostic criteria block body when non-empty.
  std::string dsm_text;
};

struct PromptBundle {
  Strategy strategy;
  DataFormat format;
  Target target;
  std::vector<PromptBlock> blocks;
  // Blocks joined by blank lines, in block order.
  std::string rendered;

  const PromptBlock* find(BlockKind kind) const;
};

// Assembles the block-structured prompt for one window. The task
// description renumbers itself to match the blocks present; the anxiety
// target swaps the condition word inside the Instructions block only.
PromptBundle build_prompt(const FeatureWindow& window, Strategy strategy,
                          DataFormat format, const PromptOptions& options = {});

// "28" -> "twenty-eight"; used for the task description's data-table item.
std::string number_words(std::size_t n);

}  // namespace phenollm
