#pragma once
// Synthetic datasets and synthetic responders for validating the metric
// pipeline at desk scale: an oracle, an anti-oracle, a uniform guesser and
// a noisy model with controllable accuracy and score concentration.

#include <cstdint>
#include <string>

#include "parc/ingest.hpp"

namespace parc {

enum class SyntheticKind { oracle, anti_oracle, uniform, noisy };

struct SyntheticModelSpec {
    SyntheticKind kind = SyntheticKind::oracle;
    double p_correct = 1.0;   // noisy only: chance of picking a correct letter
    double sharpness = 5.0;   // noisy only: score concentration on the chosen letter
    std::uint64_t seed = 0;
    std::string model_id = "synthetic";
};

// n prompts with deterministic pseudo-questions and uniformly drawn answer
// keys of exactly `correct_count` letters, so the expected random accuracy
// is correct_count / option_count by construction. Identical seeds give
// identical datasets. Requires 1 <= correct_count < option_count.
DatasetHandle make_synthetic_dataset(int n, int option_count, int correct_count,
                                     std::uint64_t seed, const std::string& dataset_id = "synthetic");

// One deterministic record per (spec.seed, prompt.id). The declared choice
// is always among the argmax letters of the attached scores:
//   oracle      — lowest correct letter, score mass 0.995 on it;
//   anti_oracle — lowest wrong letter, score mass 0.995 on it;
//   uniform     — seeded uniform letter over flat scores 1/|options|;
//   noisy       — correct letter with probability p_correct else a uniform
//                 wrong one; scores are the softmax of sharpness-scaled
//                 one-hot logits.
ResponseRecord respond(const SyntheticModelSpec& spec, const Prompt& prompt);

ResponseLog respond_all(const SyntheticModelSpec& spec, const DatasetHandle& dataset);

}  // namespace parc
