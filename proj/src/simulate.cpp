#include "parc/simulate.hpp"

#include <cmath>

#include "parc/rng.hpp"

namespace parc {

namespace {

std::string padded_index(int i) {
    std::string digits = std::to_string(i);
    return std::string(digits.size() >= 6 ? 0 : 6 - digits.size(), '0') + digits;
}

std::vector<std::pair<char, double>> one_hot_scores(const OptionSet& options, char chosen,
                                                    double chosen_mass) {
    std::vector<std::pair<char, double>> scores;
    double rest = (1.0 - chosen_mass) / static_cast<double>(options.size() - 1);
    for (std::size_t i = 0; i < options.size(); ++i) {
        char letter = options.letter_at(i);
        scores.emplace_back(letter, letter == chosen ? chosen_mass : rest);
    }
    return scores;
}

char pick_from(const LetterSet& set, SplitMix64& rng) {
    return set.letters()[static_cast<std::size_t>(rng.next_below(set.size()))];
}

}  // namespace

DatasetHandle make_synthetic_dataset(int n, int option_count, int correct_count,
                                     std::uint64_t seed, const std::string& dataset_id) {
    if (n < 1) throw Error("make_synthetic_dataset: n must be >= 1");
    if (correct_count < 1 || correct_count >= option_count)
        throw Error("make_synthetic_dataset: need 1 <= correct_count < option_count");
    if (option_count > 26) throw Error("make_synthetic_dataset: at most 26 options");

    DatasetHandle dataset;
    dataset.dataset_id = dataset_id;
    dataset.style = DatasetStyle::single_image_mc;
    for (int i = 0; i < n; ++i) {
        Prompt p;
        p.id = dataset_id + "-" + padded_index(i);
        p.dataset_id = dataset_id;
        p.question =
            "Is synthetic attribute " + std::to_string(i) + " above the reference level?";
        std::vector<std::string> texts;
        for (int o = 0; o < option_count; ++o) texts.push_back("candidate " + std::to_string(o + 1));
        p.options = OptionSet(std::move(texts));

        // Uniform key: partial Fisher-Yates over the letters.
        SplitMix64 rng{fnv1a(p.id, mix_seed(kFnvBasis, seed))};
        std::vector<char> letters;
        for (int o = 0; o < option_count; ++o) letters.push_back(static_cast<char>('A' + o));
        std::vector<char> correct;
        for (int c = 0; c < correct_count; ++c) {
            std::size_t j = static_cast<std::size_t>(rng.next_below(letters.size()));
            correct.push_back(letters[j]);
            letters.erase(letters.begin() + static_cast<std::ptrdiff_t>(j));
        }
        p.answer_key.correct = LetterSet(correct);
        p.answer_key.original_correct = LetterSet(correct);
        dataset.prompts.push_back(std::move(p));
    }
    return dataset;
}

ResponseRecord respond(const SyntheticModelSpec& spec, const Prompt& prompt) {
    SplitMix64 rng{fnv1a(prompt.id, mix_seed(fnv1a(spec.model_id), spec.seed))};
    const std::size_t k = prompt.options.size();
    const LetterSet& correct = prompt.answer_key.correct;
    const LetterSet wrong = correct.complement_within(k);

    char chosen = 0;
    std::vector<std::pair<char, double>> scores;
    switch (spec.kind) {
        case SyntheticKind::oracle:
            chosen = correct.letters().front();
            scores = one_hot_scores(prompt.options, chosen, 0.995);
            break;
        case SyntheticKind::anti_oracle:
            if (wrong.empty()) throw Error("anti-oracle needs at least one wrong option");
            chosen = wrong.letters().front();
            scores = one_hot_scores(prompt.options, chosen, 0.995);
            break;
        case SyntheticKind::uniform: {
            chosen = static_cast<char>('A' + rng.next_below(k));
            double flat = 1.0 / static_cast<double>(k);
            for (std::size_t i = 0; i < k; ++i)
                scores.emplace_back(prompt.options.letter_at(i), flat);
            break;
        }
        case SyntheticKind::noisy: {
            if (wrong.empty()) throw Error("noisy model needs at least one wrong option");
            if (!(spec.p_correct >= 0.0 && spec.p_correct <= 1.0))
                throw Error("p_correct must be in [0,1]");
            if (!(spec.sharpness > 0.0)) throw Error("sharpness must be > 0");
            chosen = rng.next_unit() < spec.p_correct ? pick_from(correct, rng)
                                                      : pick_from(wrong, rng);
            // Softmax of sharpness-scaled one-hot logits.
            double expo = std::exp(spec.sharpness);
            double denom = expo + static_cast<double>(k - 1);
            scores = one_hot_scores(prompt.options, chosen, expo / denom);
            break;
        }
    }

    ResponseRecord record;
    record.prompt_id = prompt.id;
    record.model_id = spec.model_id;
    record.raw_text = std::string("The answer is (") + chosen + ").";
    record.option_scores = std::move(scores);
    return record;
}

ResponseLog respond_all(const SyntheticModelSpec& spec, const DatasetHandle& dataset) {
    ResponseLog log;
    log.model_id = spec.model_id;
    log.scoring_mode = ScoringMode::parsed_text;
    log.records.reserve(dataset.prompts.size());
    for (const Prompt& p : dataset.prompts) log.records.push_back(respond(spec, p));
    return log;
}

}  // namespace parc
