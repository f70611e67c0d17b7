// Remote rewriter speaking a chat-completion style protocol. One request
// per question at temperature 0; the user message is the filled instruction
// template for the requested variation.

#include <chrono>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "parc/lang_vary.hpp"

namespace parc {

namespace {

struct SplitUrl {
    std::string base;  // scheme://host:port
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error("endpoint URL needs a scheme: " + url);
    std::size_t path_start = url.find('/', scheme_end + 3);
    SplitUrl out;
    if (path_start == std::string::npos) {
        out.base = url;
        out.path = "/v1/chat/completions";
    } else {
        out.base = url.substr(0, path_start);
        out.path = url.substr(path_start);
    }
    return out;
}

class HttpRewriter final : public TextRewriter {
public:
    explicit HttpRewriter(RewriterEndpoint endpoint)
        : endpoint_(std::move(endpoint)), url_(split_url(endpoint_.url)) {}

    bool supports(VariationTag kind) const override { return is_language_tag(kind); }
    bool deterministic() const override { return false; }

    std::string rewrite_question(const RewriteRequest& request) override {
        nlohmann::json body;
        body["model"] = endpoint_.model_name;
        body["temperature"] = 0;
        body["messages"] = nlohmann::json::array(
            {{{"role", "user"}, {"content", fill_template(request.kind, request.question)}}});
        const std::string payload = body.dump();

        std::string last_error;
        for (int attempt = 0; attempt <= endpoint_.retry_count; ++attempt) {
            if (attempt > 0) {
                std::this_thread::sleep_for(std::chrono::milliseconds(100 << (attempt - 1)));
            }
            httplib::Client client(url_.base);
            client.set_connection_timeout(endpoint_.timeout_seconds, 0);
            client.set_read_timeout(endpoint_.timeout_seconds, 0);
            if (!endpoint_.auth_header_name.empty()) {
                client.set_default_headers(
                    {{endpoint_.auth_header_name, endpoint_.auth_header_value}});
            }
            httplib::Result res = client.Post(url_.path, payload, "application/json");
            if (!res) {
                last_error = "transport failure: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status >= 500) {
                last_error = "server error " + std::to_string(res->status);
                continue;
            }
            if (res->status != 200)
                throw Error("rewriter endpoint returned status " + std::to_string(res->status));
            try {
                nlohmann::json reply = nlohmann::json::parse(res->body);
                std::string content =
                    reply.at("choices").at(0).at("message").at("content").get<std::string>();
                return strip_rewriter_reply(content);
            } catch (const nlohmann::json::exception& e) {
                throw Error(std::string("malformed rewriter reply: ") + e.what());
            }
        }
        throw Error("rewriter request failed after retries: " + last_error);
    }

private:
    RewriterEndpoint endpoint_;
    SplitUrl url_;
};

}  // namespace

std::unique_ptr<TextRewriter> make_http_rewriter(RewriterEndpoint endpoint) {
    return std::make_unique<HttpRewriter>(std::move(endpoint));
}

}  // namespace parc
