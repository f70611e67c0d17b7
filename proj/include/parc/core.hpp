#pragma once
// Core domain types shared by every other module: prompts, option sets,
// answer keys, variation tags and model choices. All types are immutable
// value types once constructed and safe to share across threads.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace parc {

// Thrown for any domain invariant violation. Loaders wrap it with file/line
// context before surfacing to the CLI.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// The twelve prompt states: the unmodified original plus eleven variations
// over the language and vision components.
enum class VariationTag {
    O,     // original
    LR_I,  // language reformulation: question -> instruction
    LR_C,  // language reformulation: concise
    LR_V,  // language reformulation: verbose
    LS_N,  // language semantic: negation with "not"
    LS_A,  // language semantic: antonym substitution
    LS_M,  // language semantic: more -> less
    VR_B,  // vision reformulation: blur
    VR_L,  // vision reformulation: lighting (brighten)
    VR_R,  // vision reformulation: 90 degree rotation
    VS_S,  // vision semantic: swap the two images
    VS_E,  // vision semantic: exchange the winning image
};

inline constexpr std::array<VariationTag, 12> kAllVariationTags = {
    VariationTag::O,    VariationTag::LR_I, VariationTag::LR_C, VariationTag::LR_V,
    VariationTag::LS_N, VariationTag::LS_A, VariationTag::LS_M, VariationTag::VR_B,
    VariationTag::VR_L, VariationTag::VR_R, VariationTag::VS_S, VariationTag::VS_E,
};

enum class VariationKind {
    original,
    language_reformulation,
    language_semantic,
    vision_reformulation,
    vision_semantic,
};

VariationKind variation_kind(VariationTag tag);

// True exactly for the semantic kinds (LS-*, VS-*): these alter the
// expected answer, reformulations preserve it.
bool answer_changes(VariationTag tag);

bool is_language_tag(VariationTag tag);
bool is_vision_tag(VariationTag tag);

std::string_view to_string(VariationTag tag);
std::optional<VariationTag> variation_from_string(std::string_view text);

// A sorted, duplicate-free set of option letters ('A'..'Z').
class LetterSet {
public:
    LetterSet() = default;
    explicit LetterSet(std::vector<char> letters);

    bool contains(char letter) const;
    bool empty() const { return letters_.empty(); }
    std::size_t size() const { return letters_.size(); }
    const std::vector<char>& letters() const { return letters_; }

    // Letters of a contiguous option prefix of `option_count` letters that
    // are not in this set.
    LetterSet complement_within(std::size_t option_count) const;

    bool operator==(const LetterSet&) const = default;

private:
    std::vector<char> letters_;
};

// Ordered answer options. Letters are always the contiguous uppercase
// prefix A, B, C, ... so they are derived from position rather than stored.
class OptionSet {
public:
    OptionSet() = default;
    // Throws unless there are >= 2 non-empty texts (and at most 26).
    explicit OptionSet(std::vector<std::string> texts);

    std::size_t size() const { return texts_.size(); }
    char letter_at(std::size_t index) const { return static_cast<char>('A' + index); }
    char last_letter() const { return letter_at(texts_.size() - 1); }
    bool has_letter(char letter) const {
        return letter >= 'A' && letter < static_cast<char>('A' + texts_.size());
    }
    const std::string& text_of(char letter) const;
    const std::vector<std::string>& texts() const { return texts_; }

    LetterSet all_letters() const;

    bool operator==(const OptionSet&) const = default;

private:
    std::vector<std::string> texts_;
};

// Correct answer letters plus the letters that were correct on the original
// prompt. For originals the two sets coincide; semantic variations flip
// `correct` to the complement while keeping `original_correct` so that
// answers matching the originally-correct option can be scored wrong.
struct AnswerKey {
    LetterSet correct;
    LetterSet original_correct;

    bool operator==(const AnswerKey&) const = default;
};

// Validates the key against an option set; throws on violation.
void validate_answer_key(const AnswerKey& key, const OptionSet& options);

enum class ImageRole { single, left, right };

std::string_view to_string(ImageRole role);
std::optional<ImageRole> image_role_from_string(std::string_view text);

struct ImageSlot {
    ImageRole role = ImageRole::single;
    std::string path;
    int width = 0;   // 0 when unknown (not yet decoded)
    int height = 0;

    bool operator==(const ImageSlot&) const = default;
};

struct Prompt {
    std::string id;
    std::string parent_id;  // empty iff variation == O
    std::string question;
    OptionSet options;
    AnswerKey answer_key;
    std::vector<ImageSlot> images;  // none, one `single`, or a {left, right} pair
    VariationTag variation = VariationTag::O;
    std::string dataset_id;

    bool operator==(const Prompt&) const = default;
};

// Validates prompt-local invariants (parent link consistency is checked at
// dataset level where the sibling prompts are known).
void validate_prompt(const Prompt& prompt);

// A parsed model answer: either one of the prompt's option letters or the
// explicit Unparsed sentinel. Unparsed responses participate in scoring
// (counted wrong and inconsistent), which is why this is not an optional.
class ModelChoice {
public:
    static ModelChoice unparsed() { return ModelChoice(0); }
    static ModelChoice of(char letter);

    bool is_unparsed() const { return letter_ == 0; }
    char letter() const;

    bool operator==(const ModelChoice&) const = default;

private:
    explicit ModelChoice(char letter) : letter_(letter) {}
    char letter_;
};

struct ResponseRecord {
    std::string prompt_id;
    std::string model_id;
    std::string raw_text;
    // Softmax scores per option letter, sorted by letter. When present the
    // keys must match the prompt's letters exactly and sum to 1 (+-1e-6).
    std::optional<std::vector<std::pair<char, double>>> option_scores;
    std::optional<ModelChoice> choice;

    bool operator==(const ResponseRecord&) const = default;
};

// Checks score-vector shape against the prompt: exact letter match,
// non-negative entries, total mass 1 within 1e-6. Throws on violation.
void validate_option_scores(const std::vector<std::pair<char, double>>& scores,
                            const OptionSet& options);

}  // namespace parc
