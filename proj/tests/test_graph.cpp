#include <doctest.h>

#include "reqcheck/common/errors.hpp"
#include "reqcheck/graph/community.hpp"
#include "reqcheck/graph/knowledge_graph.hpp"
#include "reqcheck/graph/persist.hpp"
#include "reqcheck/graph/ranking.hpp"
#include "reqcheck/corpus/clean.hpp"
#include "reqcheck/graph/report.hpp"

#include <nlohmann/json.hpp>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <fstream>
#include <random>

using namespace reqcheck;
using namespace reqcheck::graph;
using test_fixtures::entity;
using test_fixtures::relation;

TEST_CASE("build_graph aggregates the documented examples") {
    SUBCASE("single relation becomes one weighted edge") {
        auto graph = build_graph({entity("ARTICLE 1"), entity("ARTICLE 25")},
                                 {relation("ARTICLE 25", "ARTICLE 1", 8.0, "adds mandates")});
        REQUIRE(graph.edges().size() == 1);
        CHECK(graph.edges()[0].weight == doctest::Approx(8.0));
        CHECK(graph.nodes()[0].node_rank == 1);
        CHECK(graph.nodes()[1].node_rank == 1);
        REQUIRE(graph.edges()[0].directed_hint.has_value());
        CHECK(graph.edges()[0].directed_hint->first.name == "ARTICLE 25");
        CHECK(graph.edges()[0].directed_hint->second.name == "ARTICLE 1");
    }
    SUBCASE("antiparallel relations aggregate undirected") {
        auto graph = build_graph({entity("A"), entity("B")},
                                 {relation("A", "B", 3.0), relation("B", "A", 4.0)});
        REQUIRE(graph.edges().size() == 1);
        CHECK(graph.edges()[0].weight == doctest::Approx(7.0));
        // Direction hint keeps the first relation's orientation.
        CHECK(graph.edges()[0].directed_hint->first.name == "A");
    }
    SUBCASE("dangling endpoints are dropped with a count") {
        auto graph = build_graph({entity("A")}, {relation("A", "GHOST", 2.0)});
        CHECK(graph.edges().empty());
        CHECK(graph.stats().dangling_dropped == 1);
    }
    SUBCASE("case-folded self loops are dropped") {
        auto graph = build_graph({entity("A")}, {relation("A", "a", 2.0)});
        CHECK(graph.edges().empty());
        CHECK(graph.stats().self_loops_dropped == 1);
    }
}

TEST_CASE("rank equals degree and sums to twice the edge count") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        auto graph = test_fixtures::random_graph(rng, 8);
        std::size_t rank_sum = 0;
        for (const auto& node : graph.nodes()) rank_sum += node.node_rank;
        CHECK(rank_sum == 2 * graph.edges().size());
    }
}

TEST_CASE("two triangles joined by a bridge split into two communities") {
    auto graph = test_fixtures::two_triangles_bridge();
    auto hierarchy = detect_communities(graph, 1.0, 3, 0);
    auto level0 = hierarchy.at_level(0);
    REQUIRE(level0.size() == 2);
    CHECK(level0[0]->members.size() == 3);
    CHECK(level0[1]->members.size() == 3);

    Partition partition;
    for (const auto* community : level0) partition.push_back(community->members);
    double detected = modularity(graph, partition, 1.0);
    double best = test_oracles::brute_force_best_modularity(graph, 1.0);
    CHECK(detected == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("complete graph K4 stays a single community") {
    auto graph = test_fixtures::complete_k4();
    auto hierarchy = detect_communities(graph, 1.0, 3, 0);
    REQUIRE(hierarchy.at_level(0).size() == 1);
    Partition partition = {hierarchy.at_level(0)[0]->members};
    CHECK(modularity(graph, partition, 1.0) ==
          doctest::Approx(test_oracles::brute_force_best_modularity(graph, 1.0))
              .epsilon(1e-9));
}

TEST_CASE("edgeless graphs yield singleton communities") {
    auto graph = test_fixtures::isolated_nodes(3);
    auto hierarchy = detect_communities(graph, 1.0, 3, 0);
    auto level0 = hierarchy.at_level(0);
    REQUIRE(level0.size() == 3);
    for (const auto* community : level0) CHECK(community->members.size() == 1);
}

TEST_CASE("detection matches the brute-force modularity oracle on random fixtures") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        auto graph = test_fixtures::random_graph(rng, 8);
        auto hierarchy = detect_communities(graph, 1.0, 3, 0);
        Partition partition;
        for (const auto* community : hierarchy.at_level(0)) {
            partition.push_back(community->members);
        }
        double detected = modularity(graph, partition, 1.0);
        double best = test_oracles::brute_force_best_modularity(graph, 1.0);
        REQUIRE_MESSAGE(detected >= best - 1e-9,
                        "trial " << trial << " detected " << detected << " best " << best);
    }
}

TEST_CASE("every level partitions the node set and children nest in parents") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 15; ++trial) {
        auto graph = test_fixtures::random_graph(rng, 8);
        auto hierarchy = detect_communities(graph, 1.0, 4, trial);
        REQUIRE(hierarchy.level_count() >= 1);
        for (std::size_t level = 0; level < hierarchy.level_count(); ++level) {
            std::set<NodeKey> seen;
            for (const auto* community : hierarchy.at_level(level)) {
                REQUIRE(!community->members.empty());
                for (const auto& key : community->members) {
                    REQUIRE(seen.insert(key).second); // partition: no overlap
                }
                if (level > 0) {
                    REQUIRE(community->parent.has_value());
                    const auto* parent = hierarchy.find(*community->parent);
                    REQUIRE(parent != nullptr);
                    for (const auto& key : community->members) {
                        REQUIRE(parent->members.count(key) == 1);
                    }
                }
            }
            REQUIRE(seen.size() == graph.nodes().size());
        }
    }
}

TEST_CASE("detection is deterministic for a fixed seed") {
    auto graph = test_fixtures::two_triangles_bridge();
    auto a = detect_communities(graph, 1.0, 3, 7);
    auto b = detect_communities(graph, 1.0, 3, 7);
    REQUIRE(a.all().size() == b.all().size());
    for (std::size_t i = 0; i < a.all().size(); ++i) {
        CHECK(a.all()[i].community_id == b.all()[i].community_id);
        CHECK(a.all()[i].members == b.all()[i].members);
    }
}

TEST_CASE("empty-query ranking equals the static ordering") {
    auto graph = test_fixtures::two_triangles_bridge();
    // C and D carry the bridge, so the triangle communities tie on mass;
    // make one community heavier by adding an edge.
    auto hierarchy = detect_communities(graph, 1.0, 3, 0);
    auto children = children_or_roots(hierarchy, "");
    REQUIRE(children.size() == 2);

    auto ranking = rank_subcommunities(graph, children, {}, "", 0.7, {}, nullptr);
    REQUIRE(ranking.entries.size() == 2);
    CHECK(ranking.entries[0].final_score == ranking.entries[0].static_score);
    CHECK(ranking.entries[0].dynamic_score == 0.0);
    CHECK(ranking.entries[0].final_score >= ranking.entries[1].final_score);
    // Tie on score breaks by community id ascending.
    if (ranking.entries[0].final_score == ranking.entries[1].final_score) {
        CHECK(ranking.entries[0].community_id < ranking.entries[1].community_id);
    }
}

TEST_CASE("a query equal to one child's summary ranks that child first") {
    auto dir = test_fixtures::fresh_dir("ranking_query");
    auto gateway = test_fixtures::scripted_gateway(dir / "cache.jsonl");

    auto graph = test_fixtures::two_triangles_bridge();
    auto hierarchy = detect_communities(graph, 1.0, 3, 0);
    auto children = children_or_roots(hierarchy, "");
    REQUIRE(children.size() == 2);

    std::map<std::string, CommunityReport> reports;
    CommunityReport first;
    first.community_id = children[0]->community_id;
    first.summary = "synchronization watchdog provisions cluster";
    CommunityReport second;
    second.community_id = children[1]->community_id;
    second.summary = "logging cadence reporting cluster";
    reports[first.community_id] = first;
    reports[second.community_id] = second;

    auto ranking = rank_subcommunities(graph, children, reports,
                                       "logging cadence reporting cluster", 0.2, {},
                                       gateway.get());
    CHECK(ranking.entries[0].community_id == second.community_id);
    CHECK(ranking.entries[0].dynamic_score == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("children below the similarity threshold are demoted, never removed") {
    auto dir = test_fixtures::fresh_dir("ranking_demote");
    auto gateway = test_fixtures::scripted_gateway(dir / "cache.jsonl");

    auto graph = test_fixtures::two_triangles_bridge();
    auto hierarchy = detect_communities(graph, 1.0, 3, 0);
    auto children = children_or_roots(hierarchy, "");

    std::map<std::string, CommunityReport> reports;
    CommunityReport relevant;
    relevant.community_id = children[0]->community_id;
    relevant.summary = "alpha beta gamma delta";
    CommunityReport offtopic;
    offtopic.community_id = children[1]->community_id;
    offtopic.summary = "completely unrelated vocabulary here";
    reports[relevant.community_id] = relevant;
    reports[offtopic.community_id] = offtopic;

    auto ranking = rank_subcommunities(graph, children, reports, "alpha beta gamma delta",
                                       0.9, {}, gateway.get());
    REQUIRE(ranking.entries.size() == children.size()); // nothing removed
    CHECK(ranking.entries[0].passed_threshold);
    CHECK(!ranking.entries[1].passed_threshold);
    CHECK(ranking.entries[0].community_id == relevant.community_id);
}

TEST_CASE("blended ranking matches an independent recomputation on a 3-child fixture") {
    auto dir = test_fixtures::fresh_dir("ranking_blend");
    auto gateway = test_fixtures::scripted_gateway(dir / "cache.jsonl");

    // Chain of three 2-node communities with different internal weights.
    auto graph = build_graph(
        {entity("A1"), entity("A2"), entity("B1"), entity("B2"), entity("C1"), entity("C2")},
        {relation("A1", "A2", 9.0), relation("B1", "B2", 5.0), relation("C1", "C2", 2.0)});
    auto hierarchy = detect_communities(graph, 1.0, 2, 0);
    auto children = children_or_roots(hierarchy, "");
    REQUIRE(children.size() == 3);

    std::map<std::string, CommunityReport> reports;
    const char* summaries[3] = {"skew synchronization timing", "watchdog timer arming",
                                "palette theme colors"};
    for (std::size_t i = 0; i < 3; ++i) {
        CommunityReport report;
        report.community_id = children[i]->community_id;
        report.summary = summaries[i];
        reports[report.community_id] = report;
    }

    const std::string query = "synchronization timing of the watchdog";
    RankingConfig config;
    auto ranking =
        rank_subcommunities(graph, children, reports, query, 0.0, config, gateway.get());

    // Independent recomputation: embeddings via the same gateway, cosine via
    // the long-double oracle, static parts from first principles.
    std::vector<double> degree_mass(3, 0.0);
    double max_mass = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        for (const auto& key : children[i]->members) {
            degree_mass[i] += static_cast<double>(graph.degree(key));
        }
        max_mass = std::max(max_mass, degree_mass[i]);
    }
    auto stripped = corpus::strip_query_stopwords(query);
    for (std::size_t i = 0; i < 3; ++i) {
        auto vectors = gateway->embed(std::vector<std::string>{stripped, summaries[i]});
        double dynamic = test_oracles::cosine_oracle(vectors[0], vectors[1]);
        double expected_static = (degree_mass[i] / max_mass +
                                  1.0 /*all-article prior*/) /
                                 2.0;
        double expected_final = 0.5 * expected_static + 0.5 * dynamic;
        bool found = false;
        for (const auto& row : ranking.entries) {
            if (row.community_id != children[i]->community_id) continue;
            found = true;
            CHECK(row.static_score == doctest::Approx(expected_static).epsilon(1e-9));
            CHECK(row.dynamic_score == doctest::Approx(dynamic).epsilon(1e-9));
            CHECK(row.final_score == doctest::Approx(expected_final).epsilon(1e-9));
        }
        CHECK(found);
    }
    for (std::size_t i = 1; i < ranking.entries.size(); ++i) {
        bool prev_passed = ranking.entries[i - 1].passed_threshold;
        bool cur_passed = ranking.entries[i].passed_threshold;
        if (prev_passed == cur_passed) {
            CHECK(ranking.entries[i - 1].final_score >= ranking.entries[i].final_score);
        }
    }
}

TEST_CASE("community report parsing clamps severity and caps findings") {
    const std::string reply = R"(Here is the report:
{"title": "T", "summary": "S", "impact_severity": 12,
 "rating_explanation": "why", "findings": [{"summary": "f1", "explanation": "e1"}]}
)";
    auto outcome = parse_community_report(reply, 1);
    CHECK(outcome.report.impact_severity == doctest::Approx(10.0));
    REQUIRE(outcome.warnings.size() == 1);
    CHECK(outcome.warnings[0].find("clamped") != std::string::npos);

    CHECK_THROWS_AS(parse_community_report("no json here at all", 1), Error);
    CHECK_THROWS_AS(parse_community_report(
                        R"({"title":"T","summary":"S","impact_severity":3,
                            "rating_explanation":"r","findings":[]})",
                        1),
                    Error);
}

TEST_CASE("severity stays in range whatever the reply says") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> wild(-50.0, 50.0);
    for (int trial = 0; trial < 50; ++trial) {
        double severity = wild(rng);
        nlohmann::json reply = {{"title", "T"},
                                {"summary", "S"},
                                {"impact_severity", severity},
                                {"rating_explanation", "r"},
                                {"findings", {{{"summary", "f"}, {"explanation", "e"}}}}};
        auto outcome = parse_community_report(reply.dump(), 1);
        REQUIRE(outcome.report.impact_severity >= 0.0);
        REQUIRE(outcome.report.impact_severity <= 10.0);
    }
}

TEST_CASE("scripted community summarization produces a parsed report") {
    auto dir = test_fixtures::fresh_dir("community_report");
    auto gateway = test_fixtures::scripted_gateway(dir / "cache.jsonl");
    auto graph = test_fixtures::two_triangles_bridge();
    auto hierarchy = detect_communities(graph, 1.0, 2, 0);
    const auto* community = hierarchy.at_level(0)[0];

    auto outcome = summarize_community(graph, *community, {}, 800, *gateway);
    CHECK(!outcome.report.title.empty());
    CHECK(!outcome.report.summary.empty());
    CHECK(outcome.report.impact_severity >= 0.0);
    CHECK(outcome.report.impact_severity <= 10.0);
    CHECK(outcome.report.findings.size() >= 1);
}

TEST_CASE("tiny token budgets still pack the top-ranked element") {
    auto dir = test_fixtures::fresh_dir("community_budget");
    auto gateway = test_fixtures::scripted_gateway(dir / "cache.jsonl");
    auto graph = build_graph({entity("TOP", "article", "most connected element"),
                              entity("LESS", "article", "less connected element")},
                             {relation("TOP", "LESS", 2.0)});
    Community community;
    community.community_id = "c0_0";
    community.members = {NodeKey{"TOP", "article"}, NodeKey{"LESS", "article"}};

    auto outcome = summarize_community(graph, community, {}, 1, *gateway);
    REQUIRE(outcome.report.findings.size() == 1);
    const bool names_a_member =
        outcome.report.findings[0].summary.find("LESS") != std::string::npos ||
        outcome.report.findings[0].summary.find("TOP") != std::string::npos;
    CHECK(names_a_member);
}

TEST_CASE("persist/load round-trips the index structurally") {
    auto dir = test_fixtures::fresh_dir("persist");
    GraphIndex index;
    index.graph = build_graph({entity("ARTICLE 1"), entity("ARTICLE 25")},
                              {relation("ARTICLE 25", "ARTICLE 1", 8.0, "adds mandates")});
    index.communities = detect_communities(index.graph, 1.0, 2, 0);
    CommunityReport report;
    report.community_id = index.communities.at_level(0)[0]->community_id;
    report.title = "Articles";
    report.summary = "Two related articles.";
    report.impact_severity = 6.5;
    report.rating_explanation = "central";
    report.findings = {{"f", "e"}};
    index.reports[report.community_id] = report;
    corpus::Chunk chunk;
    chunk.chunk_id = "doc#000000";
    chunk.doc_id = "doc";
    chunk.text = "ARTICLE 25 adds mandates to ARTICLE 1";
    chunk.token_count = 8;
    chunk.char_span = {0, chunk.text.size()};
    index.chunks.push_back(chunk);
    index.document_kinds["doc"] = corpus::DocumentKind::Reference;
    index.glossary.push_back({"FCP", "Fault-tolerant Core Processor", "doc"});
    index.tokenizer_version = "wp-1";

    auto path = dir / "graph.json";
    persist_graph(index, path);
    auto loaded = load_graph(path);

    REQUIRE(loaded.graph.nodes().size() == index.graph.nodes().size());
    REQUIRE(loaded.graph.edges().size() == index.graph.edges().size());
    CHECK(loaded.graph.edges()[0].weight == doctest::Approx(8.0));
    CHECK(loaded.graph.edges()[0].directed_hint->first.name == "ARTICLE 25");
    CHECK(loaded.graph.nodes()[0].node_rank == 1);
    REQUIRE(loaded.communities.all().size() == index.communities.all().size());
    CHECK(loaded.reports.at(report.community_id).impact_severity == doctest::Approx(6.5));
    REQUIRE(loaded.chunks.size() == 1);
    CHECK(loaded.chunks[0].text == chunk.text);
    CHECK(loaded.document_kinds.at("doc") == corpus::DocumentKind::Reference);
    CHECK(loaded.glossary.size() == 1);

    // Deterministic: a second dump is byte-identical.
    auto path2 = dir / "graph2.json";
    persist_graph(index, path2);
    std::ifstream a(path, std::ios::binary);
    std::ifstream b(path2, std::ios::binary);
    std::string bytes_a((std::istreambuf_iterator<char>(a)), {});
    std::string bytes_b((std::istreambuf_iterator<char>(b)), {});
    CHECK(bytes_a == bytes_b);
}

TEST_CASE("corrupted dumps never load partially") {
    auto dir = test_fixtures::fresh_dir("persist_corrupt");
    auto path = dir / "broken.json";
    std::ofstream(path) << "{\"schema_version\": 1, \"nodes\": [{\"bad\"";
    CHECK_THROWS_AS(load_graph(path), Error);

    auto versioned = dir / "wrong_version.json";
    std::ofstream(versioned) << "{\"schema_version\": 99}";
    try {
        load_graph(versioned);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SchemaVersionMismatch);
    }
}

TEST_CASE("graphml export lists nodes, edges and communities") {
    GraphIndex index;
    index.graph = test_fixtures::two_triangles_bridge();
    index.communities = detect_communities(index.graph, 1.0, 2, 0);
    auto xml = to_graphml(index);
    CHECK(xml.find("<graphml") != std::string::npos);
    CHECK(xml.find("<node id=\"A|article\"") != std::string::npos);
    CHECK(xml.find("weight") != std::string::npos);
    CHECK(xml.find("c0_") != std::string::npos);
}
