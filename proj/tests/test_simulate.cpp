#include <doctest.h>

#include <algorithm>

#include "parc/lang_vary.hpp"
#include "parc/metrics.hpp"
#include "parc/simulate.hpp"

using namespace parc;

TEST_CASE("make_synthetic_dataset pins the random accuracy by construction") {
    DatasetHandle two = make_synthetic_dataset(100, 2, 1, 7);
    CHECK(two.prompts.size() == 100);
    CHECK(random_accuracy(two.prompts) == 0.5);

    DatasetHandle three = make_synthetic_dataset(100, 3, 2, 7);
    CHECK(random_accuracy(three.prompts) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    SUBCASE("same seed, same dataset; different seed, different keys") {
        DatasetHandle again = make_synthetic_dataset(100, 2, 1, 7);
        CHECK(again.prompts == two.prompts);
        DatasetHandle other = make_synthetic_dataset(100, 2, 1, 8);
        CHECK_FALSE(other.prompts == two.prompts);
    }
    SUBCASE("keys have exactly the requested size and valid letters") {
        for (const Prompt& p : three.prompts) {
            CHECK(p.answer_key.correct.size() == 2);
            for (char c : p.answer_key.correct.letters()) CHECK(p.options.has_letter(c));
        }
    }
    CHECK_THROWS_AS(make_synthetic_dataset(10, 3, 3, 0), Error);
    CHECK_THROWS_AS(make_synthetic_dataset(10, 3, 0, 0), Error);
    CHECK_THROWS_AS(make_synthetic_dataset(0, 3, 1, 0), Error);
}

TEST_CASE("synthetic responders hit their accuracy contracts") {
    DatasetHandle dataset = make_synthetic_dataset(400, 4, 1, 3);

    auto mean_accuracy = [&](const SyntheticModelSpec& spec) {
        double total = 0.0;
        for (const Prompt& p : dataset.prompts) {
            ResponseRecord rec = respond(spec, p);
            total += accuracy(parse_choice(rec.raw_text, p.options), p.answer_key);
        }
        return total / static_cast<double>(dataset.prompts.size());
    };

    SyntheticModelSpec oracle{SyntheticKind::oracle, 1.0, 5.0, 0, "oracle"};
    CHECK(mean_accuracy(oracle) == 1.0);

    SyntheticModelSpec anti{SyntheticKind::anti_oracle, 0.0, 5.0, 0, "anti"};
    CHECK(mean_accuracy(anti) == 0.0);

    SUBCASE("noisy accuracy concentrates around p_correct") {
        DatasetHandle big = make_synthetic_dataset(10000, 4, 1, 5);
        SyntheticModelSpec noisy{SyntheticKind::noisy, 0.8, 3.0, 1, "noisy"};
        double total = 0.0;
        for (const Prompt& p : big.prompts) {
            ResponseRecord rec = respond(noisy, p);
            total += accuracy(parse_choice(rec.raw_text, p.options), p.answer_key);
        }
        CHECK(total / 10000.0 == doctest::Approx(0.8).epsilon(0.025));
    }
}

TEST_CASE("respond is deterministic and score-consistent") {
    DatasetHandle dataset = make_synthetic_dataset(50, 3, 1, 9);
    for (SyntheticKind kind : {SyntheticKind::oracle, SyntheticKind::anti_oracle,
                               SyntheticKind::uniform, SyntheticKind::noisy}) {
        SyntheticModelSpec spec{kind, 0.7, 4.0, 11, "m"};
        for (const Prompt& p : dataset.prompts) {
            ResponseRecord first = respond(spec, p);
            ResponseRecord second = respond(spec, p);
            CHECK(first == second);
            REQUIRE(first.option_scores.has_value());
            CHECK_NOTHROW(validate_option_scores(*first.option_scores, p.options));
            // The declared choice is always among the score argmax letters.
            ModelChoice declared = parse_choice(first.raw_text, p.options);
            REQUIRE_FALSE(declared.is_unparsed());
            double declared_score = 0.0;
            double max_score = 0.0;
            for (const auto& [letter, score] : *first.option_scores) {
                if (letter == declared.letter()) declared_score = score;
                max_score = std::max(max_score, score);
            }
            CHECK(declared_score == doctest::Approx(max_score).epsilon(1e-12));
        }
    }
}

TEST_CASE("oracle scores concentrate on the chosen correct letter") {
    DatasetHandle dataset = make_synthetic_dataset(20, 4, 2, 13);
    SyntheticModelSpec spec{SyntheticKind::oracle, 1.0, 5.0, 0, "oracle"};
    for (const Prompt& p : dataset.prompts) {
        ResponseRecord rec = respond(spec, p);
        ModelChoice choice = parse_choice(rec.raw_text, p.options);
        CHECK(p.answer_key.correct.contains(choice.letter()));
        for (const auto& [letter, score] : *rec.option_scores) {
            if (letter == choice.letter()) CHECK(score >= 0.99);
        }
    }
}

TEST_CASE("a deterministic model is self-consistent across a reformulation copy") {
    DatasetHandle dataset = make_synthetic_dataset(60, 3, 1, 21);
    auto rewriter = make_rule_rewriter();
    SyntheticModelSpec spec{SyntheticKind::oracle, 1.0, 5.0, 0, "oracle"};

    double cons_total = 0.0;
    for (const Prompt& p : dataset.prompts) {
        VariationResult varied = apply_language_variation(p, VariationTag::LR_I, *rewriter);
        REQUIRE(varied.status == VariationResult::Status::ok);
        ModelChoice on_original = parse_choice(respond(spec, p).raw_text, p.options);
        ModelChoice on_varied =
            parse_choice(respond(spec, *varied.prompt).raw_text, varied.prompt->options);
        cons_total += consistency(on_varied, on_original, ConsistencyKind::reformulation);
    }
    CHECK(cons_total / 60.0 == 1.0);
}
