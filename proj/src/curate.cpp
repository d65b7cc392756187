#include "phenollm/curate.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "phenollm/errors.hpp"
#include "phenollm/gateway.hpp"
#include "phenollm/rng.hpp"

namespace phenollm {

using json = nlohmann::json;

namespace {

// system = role block, user = everything after it, joined as rendered
std::pair<std::string, std::string> split_prompt(const PromptBundle& bundle) {
  const PromptBlock* role = bundle.find(BlockKind::Role);
  if (role == nullptr || bundle.blocks.empty() ||
      bundle.blocks.front().kind != BlockKind::Role) {
    throw InvalidSpec("prompt has no leading role block");
  }
  std::string user;
  for (std::size_t i = 1; i < bundle.blocks.size(); ++i) {
    if (i > 1) user += "\n\n";
    user += bundle.blocks[i].text;
  }
  return {role->text, user};
}

}  // namespace

CurationResult curate_records(const std::vector<RunRecord>& records,
                              const Dataset& dataset,
                              const CurationCriteria& criteria,
                              Target target) {
  if (criteria.target_size == 0 || criteria.target_size % 2 != 0) {
    throw OutOfRange("curation target size must be even and positive");
  }
  if (records.empty()) throw EmptyRecords("nothing to curate");

  std::map<std::string, const LabeledSample*> by_id;
  for (const LabeledSample& s : dataset.samples) {
    by_id[s.subject_id + "|" + s.end_date().iso()] = &s;
  }

  struct Candidate {
    const RunRecord* record;
    std::string system;
    std::string user;
  };
  std::vector<Candidate> positives, negatives;

  for (const RunRecord& r : records) {
    if (r.truth == ClassLabel::Borderline) continue;
    if (r.decision == Decision::Unparseable) continue;
    const bool truth_pos = r.truth == ClassLabel::Positive;
    if (criteria.require_correct &&
        (r.decision == Decision::Yes) != truth_pos) {
      continue;
    }
    if (criteria.require_clean_numbers && !(r.q1 && r.q2)) continue;

    const auto found = by_id.find(r.sample_id);
    if (found == by_id.end()) {
      throw InvalidSpec("record " + r.sample_id + " is not in the dataset");
    }
    PromptOptions opts;
    opts.target = target;
    const PromptBundle bundle =
        build_prompt(found->second->window, r.strategy, r.format, opts);
    if (prompt_hash_hex(bundle.rendered) != r.prompt_hash) {
      throw InvalidSpec("rebuilt prompt hash differs for " + r.sample_id +
                        "; dataset or prompt assembly drifted");
    }
    auto [system, user] = split_prompt(bundle);
    (truth_pos ? positives : negatives)
        .push_back({&r, std::move(system), std::move(user)});
  }

  const std::size_t per_class = criteria.target_size / 2;
  const std::size_t qualifying_pos = positives.size();
  const std::size_t qualifying_neg = negatives.size();
  if (qualifying_pos < per_class) {
    throw InsufficientQualifying("positive", qualifying_pos, per_class);
  }
  if (qualifying_neg < per_class) {
    throw InsufficientQualifying("negative", qualifying_neg, per_class);
  }

  // canonical order, then a seeded shuffle picks the subset
  const auto canonical = [](const Candidate& a, const Candidate& b) {
    return a.record->key() < b.record->key();
  };
  std::sort(positives.begin(), positives.end(), canonical);
  std::sort(negatives.begin(), negatives.end(), canonical);
  Rng pos_rng(derive_seed(criteria.seed, {1}));
  Rng neg_rng(derive_seed(criteria.seed, {2}));
  pos_rng.shuffle(positives);
  neg_rng.shuffle(negatives);
  positives.resize(per_class);
  negatives.resize(per_class);

  std::vector<Candidate> chosen;
  chosen.reserve(criteria.target_size);
  chosen.insert(chosen.end(), positives.begin(), positives.end());
  chosen.insert(chosen.end(), negatives.begin(), negatives.end());
  std::sort(chosen.begin(), chosen.end(), canonical);

  std::ostringstream lines;
  for (const Candidate& c : chosen) {
    const json example = {
        {"messages",
         json::array({{{"role", "system"}, {"content", c.system}},
                      {{"role", "user"}, {"content", c.user}},
                      {{"role", "assistant"}, {"content", c.record->reply}}})}};
    lines << example.dump() << "\n";
  }

  const json manifest = {
      {"seed", criteria.seed},
      {"epochs", criteria.epochs},
      {"target", target_name(target)},
      {"criteria",
       {{"target_size", criteria.target_size},
        {"require_correct", criteria.require_correct},
        {"require_clean_numbers", criteria.require_clean_numbers}}},
      {"counts",
       {{"positive", per_class},
        {"negative", per_class},
        {"qualifying_positive", qualifying_pos},
        {"qualifying_negative", qualifying_neg}}}};

  CurationResult result;
  result.dataset_jsonl = lines.str();
  result.positives = per_class;
  result.negatives = per_class;
  result.manifest_json = manifest.dump(2) + "\n";
  return result;
}

}  // namespace phenollm
