#include "parc/core.hpp"

#include <algorithm>

namespace parc {

VariationKind variation_kind(VariationTag tag) {
    switch (tag) {
        case VariationTag::O:
            return VariationKind::original;
        case VariationTag::LR_I:
        case VariationTag::LR_C:
        case VariationTag::LR_V:
            return VariationKind::language_reformulation;
        case VariationTag::LS_N:
        case VariationTag::LS_A:
        case VariationTag::LS_M:
            return VariationKind::language_semantic;
        case VariationTag::VR_B:
        case VariationTag::VR_L:
        case VariationTag::VR_R:
            return VariationKind::vision_reformulation;
        case VariationTag::VS_S:
        case VariationTag::VS_E:
            return VariationKind::vision_semantic;
    }
    throw Error("variation_kind: invalid tag");
}

bool answer_changes(VariationTag tag) {
    VariationKind kind = variation_kind(tag);
    return kind == VariationKind::language_semantic || kind == VariationKind::vision_semantic;
}

bool is_language_tag(VariationTag tag) {
    VariationKind kind = variation_kind(tag);
    return kind == VariationKind::language_reformulation || kind == VariationKind::language_semantic;
}

bool is_vision_tag(VariationTag tag) {
    VariationKind kind = variation_kind(tag);
    return kind == VariationKind::vision_reformulation || kind == VariationKind::vision_semantic;
}

std::string_view to_string(VariationTag tag) {
    switch (tag) {
        case VariationTag::O: return "O";
        case VariationTag::LR_I: return "LR-I";
        case VariationTag::LR_C: return "LR-C";
        case VariationTag::LR_V: return "LR-V";
        case VariationTag::LS_N: return "LS-N";
        case VariationTag::LS_A: return "LS-A";
        case VariationTag::LS_M: return "LS-M";
        case VariationTag::VR_B: return "VR-B";
        case VariationTag::VR_L: return "VR-L";
        case VariationTag::VR_R: return "VR-R";
        case VariationTag::VS_S: return "VS-S";
        case VariationTag::VS_E: return "VS-E";
    }
    throw Error("to_string: invalid variation tag");
}

std::optional<VariationTag> variation_from_string(std::string_view text) {
    for (VariationTag tag : kAllVariationTags) {
        if (to_string(tag) == text) return tag;
    }
    return std::nullopt;
}

LetterSet::LetterSet(std::vector<char> letters) : letters_(std::move(letters)) {
    std::sort(letters_.begin(), letters_.end());
    letters_.erase(std::unique(letters_.begin(), letters_.end()), letters_.end());
    for (char c : letters_) {
        if (c < 'A' || c > 'Z') throw Error(std::string("invalid option letter '") + c + "'");
    }
}

bool LetterSet::contains(char letter) const {
    return std::binary_search(letters_.begin(), letters_.end(), letter);
}

LetterSet LetterSet::complement_within(std::size_t option_count) const {
    std::vector<char> out;
    for (std::size_t i = 0; i < option_count; ++i) {
        char c = static_cast<char>('A' + i);
        if (!contains(c)) out.push_back(c);
    }
    return LetterSet(std::move(out));
}

OptionSet::OptionSet(std::vector<std::string> texts) : texts_(std::move(texts)) {
    if (texts_.size() < 2) throw Error("option set needs at least 2 options");
    if (texts_.size() > 26) throw Error("option set supports at most 26 options");
    for (const std::string& t : texts_) {
        if (t.empty()) throw Error("option text must be non-empty");
    }
}

const std::string& OptionSet::text_of(char letter) const {
    if (!has_letter(letter)) throw Error(std::string("unknown option letter '") + letter + "'");
    return texts_[static_cast<std::size_t>(letter - 'A')];
}

LetterSet OptionSet::all_letters() const {
    std::vector<char> all;
    for (std::size_t i = 0; i < texts_.size(); ++i) all.push_back(letter_at(i));
    return LetterSet(std::move(all));
}

void validate_answer_key(const AnswerKey& key, const OptionSet& options) {
    if (key.correct.empty()) throw Error("answer key has no correct letters");
    if (key.original_correct.empty()) throw Error("answer key has no original_correct letters");
    for (char c : key.correct.letters()) {
        if (!options.has_letter(c)) throw Error(std::string("unknown letter '") + c + "' in correct set");
    }
    for (char c : key.original_correct.letters()) {
        if (!options.has_letter(c))
            throw Error(std::string("unknown letter '") + c + "' in original_correct set");
    }
}

void validate_prompt(const Prompt& prompt) {
    if (prompt.id.empty()) throw Error("prompt id must be non-empty");
    if (prompt.dataset_id.empty()) throw Error("prompt dataset_id must be non-empty");
    validate_answer_key(prompt.answer_key, prompt.options);
    bool is_original = prompt.variation == VariationTag::O;
    if (is_original && !prompt.parent_id.empty())
        throw Error("original prompt '" + prompt.id + "' must not have a parent_id");
    if (!is_original && prompt.parent_id.empty())
        throw Error("varied prompt '" + prompt.id + "' needs a parent_id");
    if (is_original && !(prompt.answer_key.correct == prompt.answer_key.original_correct))
        throw Error("original prompt '" + prompt.id + "' must have correct == original_correct");

    switch (prompt.images.size()) {
        case 0:
            break;
        case 1:
            if (prompt.images[0].role != ImageRole::single)
                throw Error("single-image prompt '" + prompt.id + "' must use role 'single'");
            break;
        case 2: {
            bool has_left = prompt.images[0].role == ImageRole::left ||
                            prompt.images[1].role == ImageRole::left;
            bool has_right = prompt.images[0].role == ImageRole::right ||
                             prompt.images[1].role == ImageRole::right;
            if (!has_left || !has_right)
                throw Error("two-image prompt '" + prompt.id + "' needs roles left and right");
            break;
        }
        default:
            throw Error("prompt '" + prompt.id + "' has more than 2 images");
    }
}

std::string_view to_string(ImageRole role) {
    switch (role) {
        case ImageRole::single: return "single";
        case ImageRole::left: return "left";
        case ImageRole::right: return "right";
    }
    throw Error("to_string: invalid image role");
}

std::optional<ImageRole> image_role_from_string(std::string_view text) {
    if (text == "single") return ImageRole::single;
    if (text == "left") return ImageRole::left;
    if (text == "right") return ImageRole::right;
    return std::nullopt;
}

ModelChoice ModelChoice::of(char letter) {
    if (letter < 'A' || letter > 'Z') throw Error("model choice letter out of range");
    return ModelChoice(letter);
}

char ModelChoice::letter() const {
    if (is_unparsed()) throw Error("letter() called on Unparsed choice");
    return letter_;
}

void validate_option_scores(const std::vector<std::pair<char, double>>& scores,
                            const OptionSet& options) {
    if (scores.size() != options.size())
        throw Error("score vector shape mismatch: " + std::to_string(scores.size()) +
                    " entries for " + std::to_string(options.size()) + " options");
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i].first != options.letter_at(i))
            throw Error(std::string("score keys must match option letters, got '") +
                        scores[i].first + "'");
        if (scores[i].second < 0.0)
            throw Error(std::string("negative probability for option '") + scores[i].first + "'");
        total += scores[i].second;
    }
    if (total < 1.0 - 1e-6 || total > 1.0 + 1e-6)
        throw Error("scores do not normalize: sum = " + std::to_string(total));
}

}  // namespace parc
