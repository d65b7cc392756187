#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phenollm/dataset.hpp"
#include "phenollm/experiment.hpp"

namespace phenollm {

struct CurationCriteria {
  std::size_t target_size = 70;      // split evenly across the two classes
  bool require_correct = true;       // decision must match the truth label
  bool require_clean_numbers = true; // every numeric citation verified (q2)
  int epochs = 2;                    // recommended tuning epochs, recorded
  std::uint64_t seed = 0;
};

struct CurationResult {
  // Chat-format tuning examples, one JSON object per line: system = role
  // block, user = remaining prompt, assistant = the recorded reply.
  std::string dataset_jsonl;
  std::string manifest_json;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

// Selects a class-balanced tuning set from qualifying records. Prompts are
// rebuilt from the dataset and must hash to the recorded prompt_hash, so a
// drifted dataset cannot silently produce wrong tuning pairs. Throws
// InsufficientQualifying when a class cannot fill target_size / 2.
CurationResult curate_records(const std::vector<RunRecord>& records,
                              const Dataset& dataset,
                              const CurationCriteria& criteria,
                              Target target = Target::Depression);

}  // namespace phenollm
