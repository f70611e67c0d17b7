#pragma once
// The six language variations. Question rewriting goes through a pluggable
// TextRewriter: a deterministic rule/table-based rewriter that needs no
// network, and an HTTP client that sends the built-in instruction template
// for the requested variation to a chat-completion endpoint.

#include <memory>
#include <optional>
#include <span>
#include <string>

#include "parc/core.hpp"

namespace parc {

struct RewriteRequest {
    VariationTag kind;  // one of LR-I, LR-C, LR-V, LS-N, LS-A, LS-M
    std::string question;
};

class TextRewriter {
public:
    virtual ~TextRewriter() = default;
    virtual bool supports(VariationTag kind) const = 0;
    virtual bool deterministic() const = 0;
    // Returns the rewritten question; throws Error on failure.
    virtual std::string rewrite_question(const RewriteRequest& request) = 0;
};

// Checks support, invokes the rewriter and validates the reply: non-empty
// and a single line. Throws on violation.
std::string rewrite(const RewriteRequest& request, TextRewriter& rewriter);

// The instruction template sent to a remote rewriter for this variation,
// with the `<Prompt to alter>` placeholder still in place.
std::string_view rewrite_template(VariationTag kind);

// Template with the placeholder substituted by the question.
std::string fill_template(VariationTag kind, const std::string& question);

// Reply normalization for remote rewriters: trims whitespace, strips one
// leading "A:" and one pair of surrounding double quotes. Throws when the
// result is empty or spans multiple lines.
std::string strip_rewriter_reply(const std::string& reply);

// Reformulations keep the key; semantic kinds flip `correct` to the
// complement of `original_correct` while preserving `original_correct`.
// Requires |correct| < |options|; a semantic flip also needs at least one
// originally-wrong option to exist.
AnswerKey transform_answer_key(const AnswerKey& key, const OptionSet& options, VariationTag kind);

// Whether the more->less variation applies to this question (it needs a
// "more" or a known comparative form). Prompts failing this are skipped and
// surfaced as not-applicable rather than silently dropped.
bool ls_m_applicable(const std::string& question);

struct VariationResult {
    enum class Status { ok, not_applicable, failed };
    Status status = Status::failed;
    std::optional<Prompt> prompt;
    std::string detail;
};

// Builds the varied prompt: fresh id `<parent>::<tag>`, rewritten question,
// transformed key, images untouched. Requires an Original prompt and a
// language tag. Returns not_applicable for LS-M on non-comparative
// questions; rewriter failures propagate as Error.
VariationResult apply_language_variation(const Prompt& prompt, VariationTag kind,
                                         TextRewriter& rewriter);

// Batch form: rewrites run concurrently with at most max_in_flight in
// flight; results come back in input order. Per-prompt rewriter failures
// are captured as failed results instead of aborting the batch.
std::vector<VariationResult> apply_language_variation_batch(std::span<const Prompt> prompts,
                                                            VariationTag kind,
                                                            TextRewriter& rewriter,
                                                            int max_in_flight);

// Deterministic offline rewriter: pair tables for the bundled corpora plus
// generic rules (instruction prefix for LR-I, filler-phrase removal for
// LR-C, verbose prefix for LR-V, "not" insertion after the first auxiliary
// for LS-N, antonym table for LS-A, more->less for LS-M).
std::unique_ptr<TextRewriter> make_rule_rewriter();

struct RewriterEndpoint {
    std::string url;  // http://host:port[/path]; default path /v1/chat/completions
    std::string auth_header_name;
    std::string auth_header_value;
    std::string model_name = "rewriter";
    int timeout_seconds = 30;
    int retry_count = 2;
};

// Chat-completion client at temperature 0. The request body carries the
// filled instruction template as the user message.
std::unique_ptr<TextRewriter> make_http_rewriter(RewriterEndpoint endpoint);

}  // namespace parc
