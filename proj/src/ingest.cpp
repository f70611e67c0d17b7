#include "parc/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace parc {

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void fail_at(const std::filesystem::path& path, std::size_t line_no,
                          const std::string& message) {
    throw Error(path.string() + ":" + std::to_string(line_no) + ": " + message);
}

std::vector<char> parse_letter_array(const ordered_json& arr, const char* field) {
    if (!arr.is_array()) throw Error(std::string(field) + " must be an array of letters");
    std::vector<char> out;
    for (const auto& item : arr) {
        std::string s = item.get<std::string>();
        if (s.size() != 1) throw Error(std::string(field) + " entries must be single letters");
        out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(s[0]))));
    }
    return out;
}

Prompt prompt_from_json(const ordered_json& j) {
    Prompt p;
    p.id = j.at("id").get<std::string>();
    p.question = j.at("question").get<std::string>();
    p.dataset_id = j.at("dataset_id").get<std::string>();

    const auto& opts = j.at("options");
    if (!opts.is_array() || opts.size() < 2) throw Error("options must list at least 2 entries");
    // Original letters in file order; remapped below to the contiguous prefix.
    std::vector<char> file_letters;
    std::vector<std::string> texts;
    for (const auto& o : opts) {
        std::string letter = o.at("letter").get<std::string>();
        if (letter.size() != 1) throw Error("option letter must be a single character");
        file_letters.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(letter[0]))));
        texts.push_back(o.at("text").get<std::string>());
    }
    std::set<char> unique_letters(file_letters.begin(), file_letters.end());
    if (unique_letters.size() != file_letters.size()) throw Error("duplicate option letter");
    p.options = OptionSet(std::move(texts));

    auto remap = [&](std::vector<char> raw, const char* field) {
        std::vector<char> mapped;
        for (char c : raw) {
            auto it = std::find(file_letters.begin(), file_letters.end(), c);
            if (it == file_letters.end())
                throw Error(std::string("unknown letter '") + c + "' in " + field);
            mapped.push_back(static_cast<char>('A' + (it - file_letters.begin())));
        }
        return LetterSet(std::move(mapped));
    };

    p.answer_key.correct = remap(parse_letter_array(j.at("correct"), "correct"), "correct");
    if (j.contains("original_correct")) {
        p.answer_key.original_correct =
            remap(parse_letter_array(j.at("original_correct"), "original_correct"),
                  "original_correct");
    } else {
        p.answer_key.original_correct = p.answer_key.correct;
    }

    if (j.contains("images")) {
        for (const auto& im : j.at("images")) {
            ImageSlot slot;
            std::string role = im.at("role").get<std::string>();
            auto parsed = image_role_from_string(role);
            if (!parsed) throw Error("unknown image role '" + role + "'");
            slot.role = *parsed;
            slot.path = im.at("path").get<std::string>();
            if (im.contains("width")) slot.width = im.at("width").get<int>();
            if (im.contains("height")) slot.height = im.at("height").get<int>();
            p.images.push_back(std::move(slot));
        }
    }

    if (j.contains("variation")) {
        std::string tag = j.at("variation").get<std::string>();
        auto parsed = variation_from_string(tag);
        if (!parsed) throw Error("unknown variation tag '" + tag + "'");
        p.variation = *parsed;
    }
    if (j.contains("parent_id")) p.parent_id = j.at("parent_id").get<std::string>();

    validate_prompt(p);
    return p;
}

ordered_json prompt_to_json(const Prompt& p) {
    ordered_json j;
    j["id"] = p.id;
    j["question"] = p.question;
    ordered_json opts = ordered_json::array();
    for (std::size_t i = 0; i < p.options.size(); ++i) {
        ordered_json o;
        o["letter"] = std::string(1, p.options.letter_at(i));
        o["text"] = p.options.texts()[i];
        opts.push_back(std::move(o));
    }
    j["options"] = std::move(opts);
    ordered_json correct = ordered_json::array();
    for (char c : p.answer_key.correct.letters()) correct.push_back(std::string(1, c));
    j["correct"] = std::move(correct);
    ordered_json original = ordered_json::array();
    for (char c : p.answer_key.original_correct.letters()) original.push_back(std::string(1, c));
    j["original_correct"] = std::move(original);
    ordered_json images = ordered_json::array();
    for (const ImageSlot& slot : p.images) {
        ordered_json im;
        im["role"] = std::string(to_string(slot.role));
        im["path"] = slot.path;
        if (slot.width > 0) im["width"] = slot.width;
        if (slot.height > 0) im["height"] = slot.height;
        images.push_back(std::move(im));
    }
    j["images"] = std::move(images);
    j["variation"] = std::string(to_string(p.variation));
    if (!p.parent_id.empty()) j["parent_id"] = p.parent_id;
    j["dataset_id"] = p.dataset_id;
    return j;
}

bool is_comparative(const Prompt& p) {
    if (p.images.size() != 2 || p.options.size() != 2) return false;
    return p.options.texts()[0] == "Left" && p.options.texts()[1] == "Right";
}

}  // namespace

std::string_view to_string(DatasetStyle style) {
    return style == DatasetStyle::comparative_two_image ? "comparative_two_image"
                                                        : "single_image_mc";
}

const Prompt* DatasetHandle::find(const std::string& prompt_id) const {
    for (const Prompt& p : prompts) {
        if (p.id == prompt_id) return &p;
    }
    return nullptr;
}

DatasetHandle load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open dataset file: " + path.string());

    DatasetHandle dataset;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        Prompt p;
        try {
            p = prompt_from_json(ordered_json::parse(line));
        } catch (const ordered_json::exception& e) {
            fail_at(path, line_no, std::string("malformed line: ") + e.what());
        } catch (const Error& e) {
            fail_at(path, line_no, e.what());
        }
        if (!seen_ids.insert(p.id).second) fail_at(path, line_no, "duplicate id '" + p.id + "'");
        if (dataset.prompts.empty()) {
            dataset.dataset_id = p.dataset_id;
        } else if (p.dataset_id != dataset.dataset_id) {
            fail_at(path, line_no, "mixed dataset_id values in one file");
        }
        dataset.prompts.push_back(std::move(p));
    }
    if (dataset.prompts.empty()) throw Error("dataset file is empty: " + path.string());

    // Style must be homogeneous across the file.
    bool first_comparative = is_comparative(dataset.prompts.front());
    dataset.style = first_comparative ? DatasetStyle::comparative_two_image
                                      : DatasetStyle::single_image_mc;
    for (std::size_t i = 0; i < dataset.prompts.size(); ++i) {
        const Prompt& p = dataset.prompts[i];
        bool comparative = is_comparative(p);
        if (comparative != first_comparative)
            throw Error(path.string() + ": mixed styles (prompt '" + p.id + "')");
        if (!comparative && p.images.size() > 1)
            throw Error(path.string() + ": prompt '" + p.id +
                        "' has 2 images but is not comparative (needs Left/Right options)");
    }

    // Parents may live in a sibling file of the same dataset (vary output),
    // so only in-file parents can be checked here; validate_parent_links
    // covers the cross-file case once every file is loaded.
    std::unordered_map<std::string, const Prompt*> by_id;
    for (const Prompt& p : dataset.prompts) by_id[p.id] = &p;
    for (const Prompt& p : dataset.prompts) {
        if (p.parent_id.empty()) continue;
        auto it = by_id.find(p.parent_id);
        if (it != by_id.end() && it->second->variation != VariationTag::O)
            throw Error(path.string() + ": parent of '" + p.id + "' is not an Original prompt");
    }
    return dataset;
}

void validate_parent_links(std::span<const DatasetHandle> datasets) {
    std::unordered_map<std::string, const Prompt*> by_key;
    for (const DatasetHandle& d : datasets) {
        for (const Prompt& p : d.prompts) by_key.emplace(p.dataset_id + "\x1f" + p.id, &p);
    }
    for (const DatasetHandle& d : datasets) {
        for (const Prompt& p : d.prompts) {
            if (p.parent_id.empty()) continue;
            auto it = by_key.find(p.dataset_id + "\x1f" + p.parent_id);
            if (it == by_key.end())
                throw Error("prompt '" + p.id + "' references unknown parent '" + p.parent_id +
                            "' in dataset '" + p.dataset_id + "'");
            if (it->second->variation != VariationTag::O)
                throw Error("parent of '" + p.id + "' is not an Original prompt");
        }
    }
}

void save_dataset(const DatasetHandle& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write dataset file: " + path.string());
    for (const Prompt& p : dataset.prompts) out << prompt_to_json(p).dump() << '\n';
}

ResponseLog load_responses(const std::filesystem::path& path,
                           std::span<const DatasetHandle> datasets, ScoringMode mode) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open response file: " + path.string());

    std::unordered_map<std::string, const Prompt*> prompt_index;
    for (const DatasetHandle& d : datasets) {
        for (const Prompt& p : d.prompts) prompt_index.emplace(p.id, &p);
    }

    ResponseLog log;
    log.scoring_mode = mode;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ResponseRecord rec;
        try {
            ordered_json j = ordered_json::parse(line);
            rec.prompt_id = j.at("prompt_id").get<std::string>();
            rec.model_id = j.at("model_id").get<std::string>();
            rec.raw_text = j.at("raw_text").get<std::string>();
            if (j.contains("option_scores") && !j.at("option_scores").is_null()) {
                std::vector<std::pair<char, double>> scores;
                for (const auto& [key, value] : j.at("option_scores").items()) {
                    if (key.size() != 1) throw Error("score key must be a single letter");
                    scores.emplace_back(
                        static_cast<char>(std::toupper(static_cast<unsigned char>(key[0]))),
                        value.get<double>());
                }
                std::sort(scores.begin(), scores.end());
                rec.option_scores = std::move(scores);
            }
        } catch (const ordered_json::exception& e) {
            fail_at(path, line_no, std::string("malformed line: ") + e.what());
        } catch (const Error& e) {
            fail_at(path, line_no, e.what());
        }

        auto it = prompt_index.find(rec.prompt_id);
        if (it == prompt_index.end())
            fail_at(path, line_no, "unknown prompt_id '" + rec.prompt_id + "'");
        if (rec.option_scores) {
            try {
                validate_option_scores(*rec.option_scores, it->second->options);
            } catch (const Error& e) {
                fail_at(path, line_no, e.what());
            }
        }

        if (log.records.empty()) {
            log.model_id = rec.model_id;
        } else if (rec.model_id != log.model_id) {
            fail_at(path, line_no, "mixed model_id values in one response file");
        }
        if (!seen.insert(rec.prompt_id + "\x1f" + rec.model_id).second)
            fail_at(path, line_no,
                    "duplicate (prompt_id, model_id): " + rec.prompt_id + ", " + rec.model_id);
        log.records.push_back(std::move(rec));
    }
    if (log.records.empty()) throw Error("response file is empty: " + path.string());
    return log;
}

void save_responses(const ResponseLog& log, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write response file: " + path.string());
    for (const ResponseRecord& rec : log.records) {
        ordered_json j;
        j["prompt_id"] = rec.prompt_id;
        j["model_id"] = rec.model_id;
        j["raw_text"] = rec.raw_text;
        if (rec.option_scores) {
            ordered_json scores;
            for (const auto& [letter, value] : *rec.option_scores)
                scores[std::string(1, letter)] = value;
            j["option_scores"] = std::move(scores);
        }
        out << j.dump() << '\n';
    }
}

namespace {

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

// Collects option letters referenced as isolated tokens: "B", "(B)", "B.",
// "B)" or "B:". Bare tokens must be uppercase; bracketed/punctuated forms
// are accepted case-insensitively.
std::vector<char> letter_token_matches(const std::string& text, const OptionSet& options) {
    std::set<char> hits;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char up = static_cast<char>(std::toupper(static_cast<unsigned char>(text[i])));
        if (!options.has_letter(up)) continue;
        bool left_bound = i == 0 || !is_word_char(text[i - 1]);
        bool right_bound = i + 1 == text.size() || !is_word_char(text[i + 1]);
        if (!left_bound || !right_bound) continue;

        bool parenthesized = i > 0 && text[i - 1] == '(' && i + 1 < text.size() && text[i + 1] == ')';
        bool punctuated = i + 1 < text.size() &&
                          (text[i + 1] == '.' || text[i + 1] == ')' || text[i + 1] == ':');
        bool bare_upper = std::isupper(static_cast<unsigned char>(text[i])) != 0;
        if (parenthesized || punctuated || bare_upper) hits.insert(up);
    }
    return std::vector<char>(hits.begin(), hits.end());
}

std::string lowercase(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Word-bounded, case-insensitive containment of the full option text.
bool contains_option_text(const std::string& haystack_lower, const std::string& needle_lower) {
    if (needle_lower.empty()) return false;
    std::size_t pos = 0;
    while ((pos = haystack_lower.find(needle_lower, pos)) != std::string::npos) {
        bool left_bound = pos == 0 || !is_word_char(haystack_lower[pos - 1]);
        std::size_t end = pos + needle_lower.size();
        bool right_bound = end == haystack_lower.size() || !is_word_char(haystack_lower[end]);
        if (left_bound && right_bound) return true;
        ++pos;
    }
    return false;
}

}  // namespace

ModelChoice parse_choice(const std::string& raw_text, const OptionSet& options) {
    std::vector<char> letters = letter_token_matches(raw_text, options);
    if (letters.size() == 1) return ModelChoice::of(letters[0]);
    if (letters.size() > 1) return ModelChoice::unparsed();

    std::string lower = lowercase(raw_text);
    std::vector<std::pair<char, std::string>> text_matches;
    for (std::size_t i = 0; i < options.size(); ++i) {
        std::string needle = lowercase(options.texts()[i]);
        if (contains_option_text(lower, needle))
            text_matches.emplace_back(options.letter_at(i), std::move(needle));
    }
    if (text_matches.size() == 1) return ModelChoice::of(text_matches[0].first);
    if (text_matches.size() > 1) {
        // The longest matching text wins only when it subsumes every other
        // match (e.g. "red pen" over "pen"); unrelated matches are ambiguous.
        const std::pair<char, std::string>* longest = &text_matches[0];
        for (const auto& match : text_matches) {
            if (match.second.size() > longest->second.size()) longest = &match;
        }
        bool subsumes_all = true;
        for (const auto& match : text_matches) {
            if (match.first != longest->first &&
                longest->second.find(match.second) == std::string::npos)
                subsumes_all = false;
        }
        if (subsumes_all) return ModelChoice::of(longest->first);
    }
    return ModelChoice::unparsed();
}

ModelChoice choice_from_scores(const std::vector<std::pair<char, double>>& option_scores) {
    if (option_scores.empty()) throw Error("choice_from_scores: empty score map");
    char best = option_scores.front().first;
    double best_score = option_scores.front().second;
    for (const auto& [letter, score] : option_scores) {
        // Ties break to the alphabetically first letter.
        if (score > best_score || (score == best_score && letter < best)) {
            best = letter;
            best_score = score;
        }
    }
    return ModelChoice::of(best);
}

ModelChoice effective_choice(const ResponseRecord& record, const OptionSet& options,
                             ScoringMode mode) {
    if (record.choice) return *record.choice;
    if (mode == ScoringMode::logit_argmax && record.option_scores)
        return choice_from_scores(*record.option_scores);
    return parse_choice(record.raw_text, options);
}

}  // namespace parc
