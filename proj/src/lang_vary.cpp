#include "parc/lang_vary.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <map>
#include <thread>
#include <vector>

namespace parc {

namespace {

constexpr std::string_view kPlaceholder = "<Prompt to alter>";

constexpr std::string_view kTemplateInstruction =
    R"(Rewrite the given phrases into instructions. Keep the instruction short, and as
close to the original sentence as possible. If the phrase is already an
instruction, keep the original phrase. Only return a single new instruction,
do NOT give additional explanations.

Q: "Are the two sofas the same color in the picture?"
A: "Determine if the two sofas are the same color in the picture."

Q: "Based on the image, how can fun and engaging toothbrush holders help
children develop better dental health habits?"
A: "Based on the image, identify how fun and engaging toothbrush holders can
help children develop better dental health habits."

Q: "Which pants' fit is more regular?"
A: "Determine which pants' fit is more regular."

Q: "In the picture, which direction is the teddy bear facing?"
A: "Identify the direction in which the teddy bear is facing in the picture."

Q: "<Prompt to alter>"
A: )";

constexpr std::string_view kTemplateConcise =
    R"(Rephrase the following question using fewer words. Make sure the meaning of the
question stays the same. Return the same question if it is not possible to use
fewer words. For your context, the question is about an image that is not provided
here. Ensure correct grammar. Only return a single new question, do NOT give
additional explanations. Use fewer words than the original question.

Q: "Which road is more paved?"
A: "More paved road?"

Q: "Are the two sofas the same color in the picture?"
A: "Are the sofas the same color?"

Q: "Which cloud is whiter?"
A: "Whiter cloud?"

Q: "Which jacket is more asymmetrical??"
A: "More asymmetrical jacket?"

Q: "<Prompt to alter>"
A: )";

constexpr std::string_view kTemplateVerbose =
    R"(Rephrase the following question to make it more verbose. Make sure the meaning of
the question stays the same, do NOT invent additional details. For your context,
the question is about an image that is not provided here. Ensure correct grammar.
Only return a single new question, do NOT give additional explanations.

Q: "<Prompt to alter>"
A: )";

constexpr std::string_view kTemplateNot =
    R"(Change the following questions to ask for the opposite by negating them with `not'.
Keep the question as close to the original as possible. Ensure correct grammar.
Return a single, complete question. Do NOT abbreviate parts of the question.
Do NOT give additional explanations.

Q: "Which road is more paved?"
A: "Which road is not more paved?"

Q: "Which umbrella is yellower?"
A: "Which umbrella is not yellower?"

Q: "Which cat is staring more directly at the camera?"
A: "Which cat is notstaring more directly at the camera?"

Q: "Which fence is burnter?"
A: "Which fence is not more burnt?"

Q: "<Prompt to alter>"
A: )";

constexpr std::string_view kTemplateAntonyms =
    R"(Change the following questions to ask for the opposite by using antonyms or words
with opposite meanings. Keep the question as close to the original as possible.
Ensure correct grammar. Return a single, complete question. Do NOT abbreviate parts
of the question. Do NOT give additional explanations.

Q: "Which road is more paved?"
A: "Which road is more unpaved?"

Q: "Which cat is staring more directly at the camera?"
A: "Which cat is looking more away from the camera?"

Q: "Which bike is more folded?"
A: "Which bike is more unfolded?"

Q: "In what direction is Chile from Peru?"
A: "In what direction is Peru from Chile?"

Q: "Which Python code can generate the content of the image?"
A: "Which Python code refuses generating the content of the image?"

Q: "What musn't Joe and Alice trade to each get what they want?"
A: "What musn't Joe and Alice trade to each get what they want?"

Q: "Which apple is closer to the camera?"
A: "Which apple is farther from the camera?"

Q: "Which bottle is more dented?"
A: "Which bottle is more intact?"

Q: "Which aluminum is more molten?"
A: "Which aluminum is more solid?"

Q: "<Prompt to alter>"
A: )";

constexpr std::string_view kTemplateMoreLess =
    R"(Change the following questions to ask for the opposite by switching the word `more'
for `less' or `fewer'. Keep the question as close to the original as possible.
Ensure correct grammar. Return a single, complete question. Do NOT abbreviate parts
of the question. Do NOT give additional explanations.

Q: "Which road is more paved?"
A: "Which road is less paved?"

Q: "Which umbrella is yellower?"
A: "Which umbrella is less yellow?"

Q: "Which bed is closer to the camera?"
A: "Which bed is less close to the camera?"

Q: "Which animal has longer hair?"
A: "Which animal has less long hair?"

Q: "Which cat is staring more directly at the camera?"
A: "Which cat is staring less directly at the camera?"

Q: "Which fence is burnter?"
A: "Which fence is less burnt?"

Q: "<Prompt to alter>"
A: )";

bool is_word_boundary(const std::string& text, std::size_t pos, std::size_t len) {
    bool left = pos == 0 || std::isalnum(static_cast<unsigned char>(text[pos - 1])) == 0;
    std::size_t end = pos + len;
    bool right = end >= text.size() || std::isalnum(static_cast<unsigned char>(text[end])) == 0;
    return left && right;
}

// Position of `word` as a whole lowercase-compared word, or npos.
std::size_t find_word(const std::string& text, const std::string& word) {
    std::string lower = text;
    for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    std::size_t pos = 0;
    while ((pos = lower.find(word, pos)) != std::string::npos) {
        if (is_word_boundary(lower, pos, word.size())) return pos;
        ++pos;
    }
    return std::string::npos;
}

bool replace_word(std::string& text, const std::string& word, const std::string& replacement) {
    std::size_t pos = find_word(text, word);
    if (pos == std::string::npos) return false;
    text.replace(pos, word.size(), replacement);
    return true;
}

// Comparative forms the rule rewriter can turn into "less <base>".
const std::map<std::string, std::string>& comparative_table() {
    static const std::map<std::string, std::string> table = {
        {"fuller", "less full"},     {"brighter", "less bright"}, {"longer", "less long"},
        {"closer", "less close"},    {"wider", "less wide"},      {"heavier", "less heavy"},
        {"cleaner", "less clean"},   {"yellower", "less yellow"}, {"whiter", "less white"},
        {"steeper", "less steep"},   {"rougher", "less rough"},   {"taller", "less tall"},
        {"shinier", "less shiny"},   {"darker", "less dark"},     {"older", "less old"},
    };
    return table;
}

const std::map<std::string, std::string>& antonym_table() {
    static const std::map<std::string, std::string> table = {
        {"fuller", "emptier"},   {"emptier", "fuller"},   {"brighter", "dimmer"},
        {"dimmer", "brighter"},  {"longer", "shorter"},   {"shorter", "longer"},
        {"closer", "farther"},   {"farther", "closer"},   {"wider", "narrower"},
        {"narrower", "wider"},   {"heavier", "lighter"},  {"lighter", "heavier"},
        {"cleaner", "dirtier"},  {"dirtier", "cleaner"},  {"rugged", "smooth"},
        {"smooth", "rugged"},    {"steeper", "flatter"},  {"taller", "shorter"},
        {"shinier", "duller"},   {"darker", "brighter"},  {"older", "newer"},
        {"newer", "older"},      {"wrinkled", "pressed"}, {"pressed", "wrinkled"},
    };
    return table;
}

const std::vector<std::string>& auxiliary_words() {
    static const std::vector<std::string> words = {
        "is", "are", "was", "were", "does", "do",   "did",    "has",  "have",
        "had", "can", "could", "will", "would", "should", "must", "shall",
    };
    return words;
}

const std::vector<std::string>& filler_phrases() {
    static const std::vector<std::string> phrases = {
        "In the presented picture, ", "in the presented picture, ", " in the presented picture",
        "In the picture, ",           "in the picture, ",           " in the picture",
        "In the image, ",             "in the image, ",             " in the image",
        "Based on the image, ",       "based on the image, ",
        "Please ",                    "please ",
    };
    return phrases;
}

std::string decapitalize(std::string text) {
    if (!text.empty()) text[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(text[0])));
    return text;
}

std::string question_to_clause(const std::string& question) {
    std::string clause = decapitalize(question);
    while (!clause.empty() && (clause.back() == '?' || clause.back() == ' ')) clause.pop_back();
    return clause;
}

class RuleRewriter final : public TextRewriter {
public:
    bool supports(VariationTag kind) const override { return is_language_tag(kind); }
    bool deterministic() const override { return true; }

    std::string rewrite_question(const RewriteRequest& request) override {
        const std::string& q = request.question;
        switch (request.kind) {
            case VariationTag::LR_I:
                return "Determine " + question_to_clause(q) + ".";
            case VariationTag::LR_C: {
                std::string out = q;
                for (const std::string& phrase : filler_phrases()) {
                    std::size_t pos;
                    while ((pos = out.find(phrase)) != std::string::npos)
                        out.erase(pos, phrase.size());
                }
                if (!out.empty())
                    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
                // Returning the question unchanged is allowed when no
                // words can be dropped.
                return out.empty() ? q : out;
            }
            case VariationTag::LR_V:
                return "In the presented picture, " + decapitalize(q);
            case VariationTag::LS_N: {
                std::string out = q;
                for (const std::string& aux : auxiliary_words()) {
                    std::size_t pos = find_word(out, aux);
                    if (pos == std::string::npos) continue;
                    out.insert(pos + aux.size(), " not");
                    return out;
                }
                throw Error("no auxiliary verb found for negation in: " + q);
            }
            case VariationTag::LS_A: {
                std::string out = q;
                for (const auto& [word, antonym] : antonym_table()) {
                    if (replace_word(out, word, antonym)) return out;
                }
                throw Error("no antonym rule applies to: " + q);
            }
            case VariationTag::LS_M: {
                std::string out = q;
                if (replace_word(out, "more", "less")) return out;
                for (const auto& [word, lessened] : comparative_table()) {
                    if (replace_word(out, word, lessened)) return out;
                }
                throw Error("no more/comparative pattern in: " + q);
            }
            default:
                throw Error("rule rewriter does not support this variation");
        }
    }
};

}  // namespace

std::string_view rewrite_template(VariationTag kind) {
    switch (kind) {
        case VariationTag::LR_I: return kTemplateInstruction;
        case VariationTag::LR_C: return kTemplateConcise;
        case VariationTag::LR_V: return kTemplateVerbose;
        case VariationTag::LS_N: return kTemplateNot;
        case VariationTag::LS_A: return kTemplateAntonyms;
        case VariationTag::LS_M: return kTemplateMoreLess;
        default:
            throw Error("no rewrite template for non-language variation");
    }
}

std::string fill_template(VariationTag kind, const std::string& question) {
    std::string filled(rewrite_template(kind));
    std::size_t pos = filled.find(kPlaceholder);
    if (pos == std::string::npos) throw Error("template is missing the placeholder");
    filled.replace(pos, kPlaceholder.size(), question);
    return filled;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    std::size_t end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

std::string strip_rewriter_reply(const std::string& reply) {
    std::string out = trim(reply);
    if (out.rfind("A:", 0) == 0) out = trim(out.substr(2));
    if (out.size() >= 2 && out.front() == '"' && out.back() == '"')
        out = trim(out.substr(1, out.size() - 2));
    if (out.empty()) throw Error("rewriter returned an empty reply");
    if (out.find('\n') != std::string::npos)
        throw Error("rewriter returned a multi-line reply: " + out);
    return out;
}

std::string rewrite(const RewriteRequest& request, TextRewriter& rewriter) {
    if (!is_language_tag(request.kind))
        throw Error("rewrite: kind must be a language variation");
    if (!rewriter.supports(request.kind))
        throw Error(std::string("rewriter does not support ") +
                    std::string(to_string(request.kind)));
    std::string out = trim(rewriter.rewrite_question(request));
    if (out.empty()) throw Error("rewriter returned an empty question");
    if (out.find('\n') != std::string::npos)
        throw Error("rewriter returned multiple lines: " + out);
    return out;
}

AnswerKey transform_answer_key(const AnswerKey& key, const OptionSet& options,
                               VariationTag kind) {
    if (!is_language_tag(kind)) throw Error("transform_answer_key: kind must be a language tag");
    if (key.correct.size() >= options.size())
        throw Error("answer key covers every option, nothing to transform");
    if (!answer_changes(kind)) return key;

    AnswerKey out;
    out.original_correct = key.original_correct;
    out.correct = key.original_correct.complement_within(options.size());
    if (out.correct.empty())
        throw Error("semantic transform impossible: every option is originally correct");
    return out;
}

bool ls_m_applicable(const std::string& question) {
    if (find_word(question, "more") != std::string::npos) return true;
    for (const auto& [word, unused] : comparative_table()) {
        if (find_word(question, word) != std::string::npos) return true;
    }
    return false;
}

VariationResult apply_language_variation(const Prompt& prompt, VariationTag kind,
                                         TextRewriter& rewriter) {
    if (prompt.variation != VariationTag::O)
        throw Error("language variations apply to Original prompts only");
    if (!is_language_tag(kind)) throw Error("not a language variation tag");

    if (kind == VariationTag::LS_M && !ls_m_applicable(prompt.question)) {
        VariationResult result;
        result.status = VariationResult::Status::not_applicable;
        result.detail = "question has no more/comparative pattern";
        return result;
    }

    Prompt varied = prompt;
    varied.id = prompt.id + "::" + std::string(to_string(kind));
    varied.parent_id = prompt.id;
    varied.variation = kind;
    varied.question = rewrite({kind, prompt.question}, rewriter);
    varied.answer_key = transform_answer_key(prompt.answer_key, prompt.options, kind);

    VariationResult result;
    result.status = VariationResult::Status::ok;
    result.prompt = std::move(varied);
    return result;
}

std::vector<VariationResult> apply_language_variation_batch(std::span<const Prompt> prompts,
                                                            VariationTag kind,
                                                            TextRewriter& rewriter,
                                                            int max_in_flight) {
    if (max_in_flight < 1) throw Error("max_in_flight must be >= 1");
    std::vector<VariationResult> results(prompts.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= prompts.size()) return;
            try {
                results[i] = apply_language_variation(prompts[i], kind, rewriter);
            } catch (const std::exception& e) {
                results[i].status = VariationResult::Status::failed;
                results[i].detail = e.what();
            }
        }
    };

    const std::size_t n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(max_in_flight), prompts.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
        for (std::thread& t : threads) t.join();
    }
    return results;
}

std::unique_ptr<TextRewriter> make_rule_rewriter() { return std::make_unique<RuleRewriter>(); }

}  // namespace parc
