// Exercises the two HTTP client surfaces against an in-process server: the
// remote rewriter (chat-completion request carrying the instruction
// template) and the live-inference client (text + per-letter logprobs).

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "parc/lang_vary.hpp"
#include "parc/report.hpp"

using namespace parc;

namespace {

struct TestServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;

    explicit TestServer(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
        server.Post("/v1/chat/completions", std::move(handler));
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this]() { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~TestServer() {
        server.stop();
        thread.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }
};

}  // namespace

TEST_CASE("http rewriter sends the filled template and strips the reply") {
    std::atomic<int> requests{0};
    nlohmann::json seen_body;
    std::mutex seen_mutex;

    TestServer server([&](const httplib::Request& req, httplib::Response& res) {
        ++requests;
        {
            std::lock_guard<std::mutex> lock(seen_mutex);
            seen_body = nlohmann::json::parse(req.body);
        }
        nlohmann::json reply = {
            {"choices",
             {{{"message", {{"content", "A: \"Which mug is not fuller?\""}}}}}}};
        res.set_content(reply.dump(), "application/json");
    });

    RewriterEndpoint endpoint;
    endpoint.url = server.url();
    endpoint.model_name = "test-rewriter";
    auto rewriter = make_http_rewriter(endpoint);
    CHECK_FALSE(rewriter->deterministic());

    std::string out = rewrite({VariationTag::LS_N, "Which mug is fuller?"}, *rewriter);
    CHECK(out == "Which mug is not fuller?");
    CHECK(requests == 1);

    // The request embeds the full instruction template with the question
    // substituted, at temperature 0.
    std::lock_guard<std::mutex> lock(seen_mutex);
    CHECK(seen_body.at("model") == "test-rewriter");
    CHECK(seen_body.at("temperature").get<double>() == 0.0);
    std::string content = seen_body.at("messages").at(0).at("content").get<std::string>();
    std::string expected = fill_template(VariationTag::LS_N, "Which mug is fuller?");
    CHECK(content == expected);
    CHECK(content.find("Q: \"Which mug is fuller?\"") != std::string::npos);
    CHECK(content.find("<Prompt to alter>") == std::string::npos);
}

TEST_CASE("http rewriter retries transient server errors") {
    std::atomic<int> requests{0};
    TestServer server([&](const httplib::Request&, httplib::Response& res) {
        if (++requests == 1) {
            res.status = 500;
            return;
        }
        nlohmann::json reply = {{"choices", {{{"message", {{"content", "\"More full mug?\""}}}}}}};
        res.set_content(reply.dump(), "application/json");
    });

    RewriterEndpoint endpoint;
    endpoint.url = server.url();
    endpoint.retry_count = 2;
    auto rewriter = make_http_rewriter(endpoint);
    CHECK(rewrite({VariationTag::LR_C, "Which mug is more full?"}, *rewriter) == "More full mug?");
    CHECK(requests == 2);
}

TEST_CASE("http rewriter rejects empty and multi-line replies") {
    std::string payload;
    TestServer server([&](const httplib::Request&, httplib::Response& res) {
        nlohmann::json reply = {{"choices", {{{"message", {{"content", payload}}}}}}};
        res.set_content(reply.dump(), "application/json");
    });

    RewriterEndpoint endpoint;
    endpoint.url = server.url();
    endpoint.retry_count = 0;
    auto rewriter = make_http_rewriter(endpoint);

    payload = "  ";
    CHECK_THROWS_AS(rewrite({VariationTag::LS_N, "Is it full?"}, *rewriter), Error);
    payload = "line one\nline two";
    CHECK_THROWS_AS(rewrite({VariationTag::LS_N, "Is it full?"}, *rewriter), Error);
}

namespace {

Prompt little_prompt(const std::string& id) {
    Prompt p;
    p.id = id;
    p.dataset_id = "d";
    p.question = "Which side is fuller?";
    p.options = OptionSet({"Left", "Right"});
    p.answer_key.correct = LetterSet({'A'});
    p.answer_key.original_correct = LetterSet({'A'});
    return p;
}

}  // namespace

TEST_CASE("query_model collects text and softmaxed logprobs in prompt order") {
    TestServer server([&](const httplib::Request& req, httplib::Response& res) {
        nlohmann::json body = nlohmann::json::parse(req.body);
        std::string content = body.at("messages").at(0).at("content").get<std::string>();
        // Echo a per-prompt answer so ordering is observable.
        nlohmann::json reply = {
            {"choices",
             {{{"message", {{"content", "(A)"}}},
               {"option_logprobs", {{"A", -0.1}, {"B", -2.4}}}}}}};
        res.set_content(reply.dump(), "application/json");
        (void)content;
    });

    InferenceEndpoint endpoint;
    endpoint.url = server.url();
    endpoint.model_name = "test-model";
    endpoint.max_in_flight = 3;

    std::vector<Prompt> prompts;
    for (int i = 0; i < 7; ++i) prompts.push_back(little_prompt("q" + std::to_string(i)));

    ResponseLog log = query_model(endpoint, prompts);
    REQUIRE(log.records.size() == 7);
    for (std::size_t i = 0; i < log.records.size(); ++i) {
        CHECK(log.records[i].prompt_id == prompts[i].id);  // stable order
        CHECK(log.records[i].raw_text == "(A)");
        REQUIRE(log.records[i].option_scores.has_value());
        const auto& scores = *log.records[i].option_scores;
        double za = std::exp(0.0);
        double zb = std::exp(-2.3);
        CHECK(scores[0].first == 'A');
        CHECK(scores[0].second == doctest::Approx(za / (za + zb)).epsilon(1e-9));
        CHECK(scores[0].second + scores[1].second == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("query_model records failures as Unparsed instead of aborting") {
    std::atomic<int> served{0};
    TestServer server([&](const httplib::Request& req, httplib::Response& res) {
        nlohmann::json body = nlohmann::json::parse(req.body);
        std::string content = body.at("messages").at(0).at("content").get<std::string>();
        if (content.find("q1") != std::string::npos) {
            res.status = 500;  // this prompt always fails
            return;
        }
        ++served;
        nlohmann::json reply = {{"choices", {{{"message", {{"content", "(B)"}}}}}}};
        res.set_content(reply.dump(), "application/json");
    });

    InferenceEndpoint endpoint;
    endpoint.url = server.url();
    endpoint.retry_count = 1;
    endpoint.max_in_flight = 1;

    std::vector<Prompt> prompts;
    for (int i = 0; i < 3; ++i) {
        Prompt p = little_prompt("p" + std::to_string(i));
        p.question = "marker q" + std::to_string(i);
        prompts.push_back(p);
    }

    ResponseLog log = query_model(endpoint, prompts);
    REQUIRE(log.records.size() == 3);
    CHECK(log.records[0].raw_text == "(B)");
    CHECK(log.records[1].raw_text == "");  // failed after retries
    CHECK_FALSE(log.records[1].option_scores.has_value());
    CHECK(log.records[2].raw_text == "(B)");
    CHECK(parse_choice(log.records[1].raw_text, prompts[1].options).is_unparsed());
}

TEST_CASE("endpoints without logprobs leave option_scores absent") {
    TestServer server([&](const httplib::Request&, httplib::Response& res) {
        nlohmann::json reply = {{"choices", {{{"message", {{"content", "Right"}}}}}}};
        res.set_content(reply.dump(), "application/json");
    });

    InferenceEndpoint endpoint;
    endpoint.url = server.url();
    std::vector<Prompt> prompts = {little_prompt("only")};
    ResponseLog log = query_model(endpoint, prompts);
    REQUIRE(log.records.size() == 1);
    CHECK_FALSE(log.records[0].option_scores.has_value());
    CHECK(parse_choice(log.records[0].raw_text, prompts[0].options) == ModelChoice::of('B'));
}
