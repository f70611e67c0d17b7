#pragma once
// Dataset and response-log loading, validation and canonical serialization,
// plus the free-text and logit-argmax answer parsers.
//
// File formats (UTF-8, one JSON object per line):
//   dataset line:  {"id", "question", "options": [{"letter","text"}, ...],
//                   "correct": [letters], "original_correct": [letters]?,
//                   "images": [{"role","path"}]?, "variation"?, "parent_id"?,
//                   "dataset_id"}
//   response line: {"prompt_id", "model_id", "raw_text",
//                   "option_scores": {letter: number, ...}?}
// Serialization is canonical (fixed key order, shortest-round-trip floats)
// so that load -> save -> load is byte-stable.

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "parc/core.hpp"

namespace parc {

enum class DatasetStyle { comparative_two_image, single_image_mc };

std::string_view to_string(DatasetStyle style);

struct DatasetHandle {
    std::string dataset_id;
    std::vector<Prompt> prompts;
    DatasetStyle style = DatasetStyle::single_image_mc;

    const Prompt* find(const std::string& prompt_id) const;
};

enum class ScoringMode { parsed_text, logit_argmax };

struct ResponseLog {
    std::string model_id;
    std::vector<ResponseRecord> records;
    ScoringMode scoring_mode = ScoringMode::parsed_text;
};

// Loads and fully validates a dataset file. Option letters are normalized to
// the contiguous uppercase prefix A, B, C, ... in file order; correct /
// original_correct letters are remapped accordingly. Errors report the
// offending line number. The style is inferred from the records and must be
// homogeneous.
DatasetHandle load_dataset(const std::filesystem::path& path);

// Cross-file invariant: every varied prompt's parent_id must resolve to an
// Original prompt of the same dataset_id within the given collection.
void validate_parent_links(std::span<const DatasetHandle> datasets);

// Canonical writer; the inverse of load_dataset up to letter normalization.
void save_dataset(const DatasetHandle& dataset, const std::filesystem::path& path);

// Loads one model's responses and links every record against the given
// datasets. Requires a homogeneous model_id per file, no duplicate
// (prompt_id, model_id) pairs, and valid score vectors where present.
ResponseLog load_responses(const std::filesystem::path& path,
                           std::span<const DatasetHandle> datasets,
                           ScoringMode mode = ScoringMode::parsed_text);

void save_responses(const ResponseLog& log, const std::filesystem::path& path);

// Parses free-form model text into an option letter. Precedence:
//   1. isolated letter token, "(X)" or "X." pattern;
//   2. case-insensitive whole-option-text containment, longest text wins;
//   3. Unparsed.
// Two distinct letters matching at the same precedence level yield Unparsed.
// Pure and total; never throws.
ModelChoice parse_choice(const std::string& raw_text, const OptionSet& options);

// Argmax over per-option scores; ties break to the alphabetically first
// letter. Throws on an empty map. Never returns Unparsed.
ModelChoice choice_from_scores(const std::vector<std::pair<char, double>>& option_scores);

// The effective choice of a record under the log's scoring mode:
// logit_argmax uses the score argmax when scores are present and falls back
// to text parsing otherwise; parsed_text always parses the raw text.
ModelChoice effective_choice(const ResponseRecord& record, const OptionSet& options,
                             ScoringMode mode);

}  // namespace parc
