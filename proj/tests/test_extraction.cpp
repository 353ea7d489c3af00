#include <doctest.h>

#include "reqcheck/common/errors.hpp"
#include "reqcheck/corpus/chunker.hpp"
#include "reqcheck/corpus/tokenizer.hpp"
#include "reqcheck/extract/extractor.hpp"
#include "reqcheck/extract/records.hpp"
#include "reqcheck/llm/gateway.hpp"
#include "reqcheck/prompts/registry.hpp"

#include "support/fixtures.hpp"
#include "support/record_gen.hpp"

#include <random>

using namespace reqcheck;
using namespace reqcheck::extract;

namespace {

corpus::Chunk chunk_of(const std::string& text, const std::string& id = "doc#000000") {
    corpus::Chunk chunk;
    chunk.chunk_id = id;
    chunk.doc_id = "doc";
    chunk.text = text;
    chunk.token_count = corpus::count_tokens(text);
    return chunk;
}

} // namespace

TEST_CASE("parse accepts the documented record forms") {
    const std::string output =
        "(\"entity\"<|>\"ARTICLE 1\"<|>\"article\"<|>\"defines broker duties\")##\n"
        "(\"relationship\"<|>\"ARTICLE 25\"<|>\"ARTICLE 1\"<|>\"adds mandates\"<|>\"8\")\n"
        "<|COMPLETE|>";
    auto parsed = parse_extraction_output(output);
    REQUIRE(parsed.entities.size() == 1);
    REQUIRE(parsed.relations.size() == 1);
    CHECK(parsed.malformed_count == 0);
    CHECK(parsed.entities[0].name == "ARTICLE 1");
    CHECK(parsed.entities[0].entity_type == "article");
    CHECK(parsed.entities[0].description == "defines broker duties");
    CHECK(parsed.relations[0].source == "ARTICLE 25");
    CHECK(parsed.relations[0].target == "ARTICLE 1");
    CHECK(parsed.relations[0].strength == doctest::Approx(8.0));
}

TEST_CASE("parse tolerates surrounding prose and stops at the completion delimiter") {
    const std::string output =
        "Sure! Here are the elements I found:\n"
        "(\"entity\"<|>\"FCP\"<|>\"standard\"<|>\"core processor term\")\n"
        "<|COMPLETE|>\n"
        "(\"entity\"<|>\"AFTER\"<|>\"standard\"<|>\"must not be parsed\")";
    auto parsed = parse_extraction_output(output);
    REQUIRE(parsed.entities.size() == 1);
    CHECK(parsed.entities[0].name == "FCP");
}

TEST_CASE("malformed records are skipped and counted, not fatal") {
    const std::string output =
        "(\"entity\"<|>\"ONLY TWO FIELDS\")##\n"
        "(\"entity\"<|>\"GOOD\"<|>\"article\"<|>\"fine\")##\n"
        "(\"widget\"<|>\"A\"<|>\"B\"<|>\"C\")##\n"
        "(\"relationship\"<|>\"X\"<|>\"X\"<|>\"self loop\"<|>\"3\")##\n"
        "(\"relationship\"<|>\"X\"<|>\"Y\"<|>\"bad strength\"<|>\"lots\")\n"
        "<|COMPLETE|>";
    auto parsed = parse_extraction_output(output);
    CHECK(parsed.entities.size() == 1);
    CHECK(parsed.relations.empty());
    CHECK(parsed.malformed_count == 4);
}

TEST_CASE("strength values are clamped into [1,10]") {
    auto parsed = parse_extraction_output(
        "(\"relationship\"<|>\"A\"<|>\"B\"<|>\"too strong\"<|>\"15\")<|COMPLETE|>");
    REQUIRE(parsed.relations.size() == 1);
    CHECK(parsed.relations[0].strength == doctest::Approx(10.0));
}

TEST_CASE("serialize/parse round-trip is the identity") {
    std::mt19937_64 rng(2024);
    const std::vector<std::string> types = {"article", "standard", "requirement"};
    for (int trial = 0; trial < 200; ++trial) {
        auto generated = test_gen::random_records(rng, types);
        auto wire = serialize_records(generated.entities, generated.relations);
        auto parsed = parse_extraction_output(wire, types);
        REQUIRE(parsed.malformed_count == 0);
        REQUIRE(parsed.entities.size() == generated.entities.size());
        REQUIRE(parsed.relations.size() == generated.relations.size());
        for (std::size_t i = 0; i < generated.entities.size(); ++i) {
            REQUIRE(parsed.entities[i].name == generated.entities[i].name);
            REQUIRE(parsed.entities[i].entity_type == generated.entities[i].entity_type);
            REQUIRE(parsed.entities[i].description == generated.entities[i].description);
        }
        for (std::size_t i = 0; i < generated.relations.size(); ++i) {
            REQUIRE(parsed.relations[i].source == generated.relations[i].source);
            REQUIRE(parsed.relations[i].target == generated.relations[i].target);
            REQUIRE(parsed.relations[i].description == generated.relations[i].description);
            REQUIRE(parsed.relations[i].strength ==
                    doctest::Approx(generated.relations[i].strength).epsilon(1e-12));
        }
    }
}

TEST_CASE("merge folds case variants and keeps types distinct") {
    std::vector<EntityRecord> records;
    records.push_back(test_fixtures::entity("Article 1", "article", "first", "doc#000001"));
    records.back().name = "Article 1"; // lower-case variant on purpose
    records.push_back(test_fixtures::entity("ARTICLE 1", "article", "second", "doc#000000"));
    records.push_back(test_fixtures::entity("ARTICLE 1", "requirement", "other type"));

    std::map<std::string, std::size_t> order = {{"doc#000000", 0}, {"doc#000001", 1}};
    auto merged = merge_entities(records, order);
    REQUIRE(merged.size() == 2);
    CHECK(merged[0].name == "ARTICLE 1");
    CHECK(merged[0].entity_type == "article");
    CHECK(merged[0].source_chunks.size() == 2);
    // Descriptions ordered by chunk ordinal: doc#000000 before doc#000001.
    CHECK(merged[0].description == "second\nfirst");
    CHECK(merged[1].entity_type == "requirement");
}

TEST_CASE("merge is idempotent and preserves disjoint records") {
    std::vector<EntityRecord> records = {
        test_fixtures::entity("A", "article", "a desc"),
        test_fixtures::entity("B", "standard", "b desc"),
        test_fixtures::entity("A", "article", "a second desc", "doc#000001"),
    };
    auto once = merge_entities(records);
    auto twice = merge_entities(once);
    REQUIRE(once.size() == 2);
    REQUIRE(twice.size() == once.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
        CHECK(twice[i].name == once[i].name);
        CHECK(twice[i].description == once[i].description);
        CHECK(twice[i].source_chunks == once[i].source_chunks);
    }
}

TEST_CASE("scripted extraction finds the article pair") {
    auto dir = test_fixtures::fresh_dir("extract_articles");
    auto gateway = test_fixtures::scripted_gateway(dir / "cache.jsonl");
    ExtractionConfig config;
    config.max_gleanings = 0;
    config.chat_model = "scripted-chat";

    auto chunk = chunk_of(
        "ARTICLE 25 provides additional mandates for the disclosure duties introduced in "
        "ARTICLE 1 of the broker regulation.");
    auto outcome = extract_elements(chunk, config, *gateway);

    REQUIRE(outcome.entities.size() == 2);
    CHECK(outcome.entities[0].name == "ARTICLE 25");
    CHECK(outcome.entities[1].name == "ARTICLE 1");
    REQUIRE(outcome.relations.size() == 1);
    CHECK(outcome.relations[0].source == "ARTICLE 25");
    CHECK(outcome.relations[0].target == "ARTICLE 1");
    CHECK(outcome.relations[0].strength == doctest::Approx(8.0));
    for (const auto& entity : outcome.entities) {
        CHECK(entity.source_chunks.count("doc#000000") == 1);
    }
}

TEST_CASE("empty-ish chunks extract nothing") {
    auto dir = test_fixtures::fresh_dir("extract_empty");
    auto gateway = test_fixtures::scripted_gateway(dir / "cache.jsonl");
    ExtractionConfig config;
    config.max_gleanings = 0;
    auto outcome = extract_elements(chunk_of("and then the of it"), config, *gateway);
    CHECK(outcome.entities.empty());
    CHECK(outcome.relations.empty());
    CHECK(outcome.malformed_count == 0);
}

TEST_CASE("gleaning rounds add elements with the same provenance") {
    auto dir = test_fixtures::fresh_dir("extract_gleaning");
    auto gateway = test_fixtures::scripted_gateway(dir / "cache.jsonl");
    ExtractionConfig base_only;
    base_only.max_gleanings = 0;
    ExtractionConfig with_gleaning;
    with_gleaning.max_gleanings = 1;

    auto chunk = chunk_of("The clause (1.2.3) mentions GLEANME for later rounds.",
                          "doc#000007");
    auto base = extract_elements(chunk, base_only, *gateway);
    auto gleaned = extract_elements(chunk, with_gleaning, *gateway);

    // Monotonic: everything from the base round is still present.
    for (const auto& entity : base.entities) {
        bool found = false;
        for (const auto& candidate : gleaned.entities) {
            if (candidate.name == entity.name &&
                candidate.entity_type == entity.entity_type) {
                found = true;
            }
        }
        CHECK_MESSAGE(found, entity.name);
    }
    bool has_gleaned = false;
    for (const auto& entity : gleaned.entities) {
        if (entity.name == "GLEANED PROVISION") {
            has_gleaned = true;
            CHECK(entity.source_chunks.count("doc#000007") == 1);
        }
    }
    CHECK(has_gleaned);
    CHECK(gleaned.rounds == 2);
}

TEST_CASE("one repair attempt recovers malformed output, then fails typed") {
    auto dir = test_fixtures::fresh_dir("extract_repair");
    auto cache_path = dir / "cache.jsonl";
    ExtractionConfig config;
    config.max_gleanings = 0;
    config.chat_model = "scripted-chat";
    auto chunk = chunk_of("some text", "doc#000000");

    // Hand-scripted replay: base reply malformed, repair reply well-formed.
    const std::string base_prompt = prompts::render_named(
        "extraction", {{"entity_types", "article, standard, requirement"},
                       {"few_shot", "(no examples provided)"},
                       {"input_text", chunk.text}});
    const std::string bad_reply = "(\"entity\"<|>\"HALF\")<|COMPLETE|>";
    const std::string repair_prompt = prompts::render_named(
        "extraction_repair", {{"previous_output", bad_reply},
                              {"entity_types", "article, standard, requirement"}});
    const std::string good_reply =
        "(\"entity\"<|>\"FIXED\"<|>\"article\"<|>\"recovered\")<|COMPLETE|>";

    {
        llm::ReplayCache cache(cache_path);
        auto key_of = [](const std::string& prompt) {
            llm::ChatRequest request;
            request.model_name = "scripted-chat";
            request.messages.push_back({llm::Role::User, prompt});
            return llm::Gateway::chat_key(request);
        };
        llm::ChatResponse bad;
        bad.text = bad_reply;
        llm::ChatResponse good;
        good.text = good_reply;
        cache.store_chat(key_of(base_prompt), {}, bad);
        cache.store_chat(key_of(repair_prompt), {}, good);
    }

    auto gateway = test_fixtures::scripted_gateway(cache_path, llm::GatewayMode::Replay);
    auto outcome = extract_elements(chunk, config, *gateway);
    REQUIRE(outcome.entities.size() == 1);
    CHECK(outcome.entities[0].name == "FIXED");
    CHECK(outcome.malformed_count == 1);

    // Second scenario: the repair reply is malformed too -> protocol error.
    auto dir2 = test_fixtures::fresh_dir("extract_repair_fail");
    auto cache_path2 = dir2 / "cache.jsonl";
    {
        llm::ReplayCache cache(cache_path2);
        auto key_of = [](const std::string& prompt) {
            llm::ChatRequest request;
            request.model_name = "scripted-chat";
            request.messages.push_back({llm::Role::User, prompt});
            return llm::Gateway::chat_key(request);
        };
        llm::ChatResponse bad;
        bad.text = bad_reply;
        cache.store_chat(key_of(base_prompt), {}, bad);
        cache.store_chat(key_of(repair_prompt), {}, bad);
    }
    auto gateway2 = test_fixtures::scripted_gateway(cache_path2, llm::GatewayMode::Replay);
    try {
        extract_elements(chunk, config, *gateway2);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::LlmProtocolError);
    }
}

TEST_CASE("summarize_element passes single descriptions through without a call") {
    auto dir = test_fixtures::fresh_dir("summarize_single");
    auto gateway = test_fixtures::scripted_gateway(dir / "cache.jsonl");
    ExtractionConfig config;
    auto summary = summarize_element("FCP", {"the only description"}, config, *gateway);
    CHECK(summary == "the only description");
    CHECK(gateway->cost_report().total.live_calls == 0);
}

TEST_CASE("summarize_element consolidates multiple descriptions") {
    auto dir = test_fixtures::fresh_dir("summarize_multi");
    auto gateway = test_fixtures::scripted_gateway(dir / "cache.jsonl");
    ExtractionConfig config;
    config.chat_model = "scripted-chat";
    auto summary = summarize_element(
        "FCP", {"core processor of the platform", "synchronized in groups"}, config, *gateway);
    CHECK(summary.find("FCP") != std::string::npos);
    CHECK(summary.find("consolidated from 2 descriptions") != std::string::npos);
    CHECK(gateway->cost_report().total.live_calls == 1);
}

TEST_CASE("summarize_element rejects empty input") {
    auto dir = test_fixtures::fresh_dir("summarize_empty");
    auto gateway = test_fixtures::scripted_gateway(dir / "cache.jsonl");
    ExtractionConfig config;
    CHECK_THROWS_AS(summarize_element("X", {}, config, *gateway), Error);
}

TEST_CASE("malformed-record injection never breaks a list with valid records") {
    std::mt19937_64 rng(99);
    const std::vector<std::string> types = {"article", "standard", "requirement"};
    for (int trial = 0; trial < 100; ++trial) {
        auto generated = test_gen::random_records(rng, types);
        if (generated.entities.empty() && generated.relations.empty()) continue;
        auto wire = serialize_records(generated.entities, generated.relations);
        // Inject a malformed record ahead of the valid ones.
        auto corrupted = "(\"entity\"<|>\"BROKEN\")##\n" + wire;
        auto parsed = parse_extraction_output(corrupted, types);
        REQUIRE(parsed.malformed_count == 1);
        REQUIRE(parsed.entities.size() == generated.entities.size());
        REQUIRE(parsed.relations.size() == generated.relations.size());
    }
}
