// Live-inference client. One chat-completion request per prompt; replies may
// carry per-option-letter logprobs which become softmax scores.
//
// Request body:  {"model", "temperature": 0, "messages": [{"role": "user",
//                 "content": "<question + options>"}], "images": [paths],
//                 "option_letters": ["A", ...]}
// Reply body:    {"choices": [{"message": {"content": "..."},
//                 "option_logprobs": {"A": -0.1, ...}?}]}

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "parc/report.hpp"

namespace parc {

namespace {

struct SplitUrl {
    std::string base;
    std::string path;
};

SplitUrl split_query_url(const std::string& url) {
    std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error("endpoint URL needs a scheme: " + url);
    std::size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/v1/chat/completions"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

std::string prompt_message(const Prompt& prompt) {
    std::string msg = prompt.question;
    for (std::size_t i = 0; i < prompt.options.size(); ++i) {
        msg += "\n(" + std::string(1, prompt.options.letter_at(i)) + ") " +
               prompt.options.texts()[i];
    }
    return msg;
}

// Softmax over the prompt's letters; absent when any letter lacks a logprob.
std::optional<std::vector<std::pair<char, double>>> scores_from_logprobs(
    const nlohmann::json& logprobs, const OptionSet& options) {
    std::vector<std::pair<char, double>> raw;
    double max_lp = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < options.size(); ++i) {
        std::string key(1, options.letter_at(i));
        if (!logprobs.contains(key)) return std::nullopt;
        double lp = logprobs.at(key).get<double>();
        raw.emplace_back(options.letter_at(i), lp);
        max_lp = std::max(max_lp, lp);
    }
    double total = 0.0;
    for (auto& [letter, lp] : raw) {
        lp = std::exp(lp - max_lp);
        total += lp;
    }
    for (auto& [letter, lp] : raw) lp /= total;
    return raw;
}

ResponseRecord query_one(const InferenceEndpoint& endpoint, const SplitUrl& url,
                         const Prompt& prompt) {
    ResponseRecord record;
    record.prompt_id = prompt.id;
    record.model_id = endpoint.model_name;
    record.raw_text = "";  // stays empty (Unparsed) when every attempt fails

    nlohmann::json body;
    body["model"] = endpoint.model_name;
    body["temperature"] = 0;
    body["messages"] =
        nlohmann::json::array({{{"role", "user"}, {"content", prompt_message(prompt)}}});
    nlohmann::json images = nlohmann::json::array();
    for (const ImageSlot& slot : prompt.images) images.push_back(slot.path);
    body["images"] = std::move(images);
    nlohmann::json letters = nlohmann::json::array();
    for (std::size_t i = 0; i < prompt.options.size(); ++i)
        letters.push_back(std::string(1, prompt.options.letter_at(i)));
    body["option_letters"] = std::move(letters);
    const std::string payload = body.dump();

    for (int attempt = 0; attempt <= endpoint.retry_count; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(100 << (attempt - 1)));
        httplib::Client client(url.base);
        client.set_connection_timeout(endpoint.timeout_seconds, 0);
        client.set_read_timeout(endpoint.timeout_seconds, 0);
        if (!endpoint.auth_header_name.empty())
            client.set_default_headers({{endpoint.auth_header_name, endpoint.auth_header_value}});
        httplib::Result res = client.Post(url.path, payload, "application/json");
        if (!res || res->status != 200) continue;
        try {
            nlohmann::json reply = nlohmann::json::parse(res->body);
            const nlohmann::json& choice = reply.at("choices").at(0);
            record.raw_text = choice.at("message").at("content").get<std::string>();
            if (choice.contains("option_logprobs"))
                record.option_scores =
                    scores_from_logprobs(choice.at("option_logprobs"), prompt.options);
            return record;
        } catch (const nlohmann::json::exception&) {
            continue;  // malformed reply counts as a failed attempt
        }
    }
    return record;
}

}  // namespace

ResponseLog query_model(const InferenceEndpoint& endpoint, std::span<const Prompt> prompts) {
    if (endpoint.max_in_flight < 1) throw Error("max_in_flight must be >= 1");
    SplitUrl url = split_query_url(endpoint.url);

    ResponseLog log;
    log.model_id = endpoint.model_name;
    log.scoring_mode = ScoringMode::parsed_text;
    log.records.resize(prompts.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= prompts.size()) return;
            log.records[i] = query_one(endpoint, url, prompts[i]);
        }
    };
    std::size_t n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(endpoint.max_in_flight), prompts.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    return log;
}

}  // namespace parc
