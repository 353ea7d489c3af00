#include "reqcheck/graph/persist.hpp"

#include "reqcheck/common/errors.hpp"
#include "reqcheck/common/strings.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace reqcheck::graph {

using nlohmann::ordered_json;

namespace {

ordered_json key_json(const NodeKey& key) {
    ordered_json out;
    out["name"] = key.name;
    out["type"] = key.entity_type;
    return out;
}

NodeKey key_from_json(const ordered_json& value) {
    return NodeKey{value.at("name").get<std::string>(), value.at("type").get<std::string>()};
}

std::string xml_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

} // namespace

void persist_graph(const GraphIndex& index, const std::filesystem::path& path) {
    ordered_json dump;
    dump["schema_version"] = kGraphSchemaVersion;
    dump["tokenizer_version"] = index.tokenizer_version;

    ordered_json nodes = ordered_json::array();
    for (const auto& node : index.graph.nodes()) {
        ordered_json n;
        n["key"] = key_json(node.key);
        n["description"] = node.description;
        n["rank"] = node.node_rank;
        n["source_chunks"] =
            std::vector<std::string>(node.source_chunks.begin(), node.source_chunks.end());
        nodes.push_back(std::move(n));
    }
    dump["nodes"] = std::move(nodes);

    ordered_json edges = ordered_json::array();
    for (const auto& edge : index.graph.edges()) {
        ordered_json e;
        e["a"] = key_json(edge.a);
        e["b"] = key_json(edge.b);
        e["weight"] = edge.weight;
        e["description"] = edge.description;
        if (edge.directed_hint) {
            e["direction"] = {key_json(edge.directed_hint->first),
                              key_json(edge.directed_hint->second)};
        }
        e["source_chunks"] =
            std::vector<std::string>(edge.source_chunks.begin(), edge.source_chunks.end());
        edges.push_back(std::move(e));
    }
    dump["edges"] = std::move(edges);

    ordered_json communities = ordered_json::array();
    for (const auto& community : index.communities.all()) {
        ordered_json c;
        c["id"] = community.community_id;
        c["level"] = community.level;
        ordered_json members = ordered_json::array();
        for (const auto& key : community.members) members.push_back(key_json(key));
        c["members"] = std::move(members);
        if (community.parent) c["parent"] = *community.parent;
        communities.push_back(std::move(c));
    }
    dump["communities"] = std::move(communities);

    ordered_json reports = ordered_json::array();
    for (const auto& [community_id, report] : index.reports) {
        ordered_json r;
        r["community_id"] = community_id;
        r["title"] = report.title;
        r["summary"] = report.summary;
        r["impact_severity"] = report.impact_severity;
        r["rating_explanation"] = report.rating_explanation;
        ordered_json findings = ordered_json::array();
        for (const auto& finding : report.findings) {
            findings.push_back({{"summary", finding.summary},
                                {"explanation", finding.explanation}});
        }
        r["findings"] = std::move(findings);
        reports.push_back(std::move(r));
    }
    dump["reports"] = std::move(reports);

    ordered_json chunks = ordered_json::array();
    for (const auto& chunk : index.chunks) {
        ordered_json c;
        c["chunk_id"] = chunk.chunk_id;
        c["doc_id"] = chunk.doc_id;
        c["ordinal"] = chunk.ordinal;
        c["text"] = chunk.text;
        c["token_count"] = chunk.token_count;
        c["char_span"] = {chunk.char_span.first, chunk.char_span.second};
        chunks.push_back(std::move(c));
    }
    dump["chunks"] = std::move(chunks);

    ordered_json kinds = ordered_json::object();
    for (const auto& [doc_id, kind] : index.document_kinds) {
        kinds[doc_id] = corpus::to_string(kind);
    }
    dump["document_kinds"] = std::move(kinds);

    ordered_json glossary = ordered_json::array();
    for (const auto& entry : index.glossary) {
        glossary.push_back({{"term", entry.term},
                            {"definition", entry.definition},
                            {"source_doc", entry.source_doc}});
    }
    dump["glossary"] = std::move(glossary);

    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write graph dump " + path.string());
    }
    out << dump.dump(1, '\t') << "\n";
    if (!out.good()) {
        throw Error(ErrorCode::IoError, "short write on " + path.string());
    }
}

GraphIndex load_graph(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot read graph dump " + path.string());
    }
    ordered_json dump;
    try {
        in >> dump;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::IoError, path.string() + ": " + e.what());
    }

    if (!dump.contains("schema_version") ||
        dump["schema_version"].get<int>() != kGraphSchemaVersion) {
        throw Error(ErrorCode::SchemaVersionMismatch,
                    path.string() + ": expected schema " +
                        std::to_string(kGraphSchemaVersion));
    }

    GraphIndex index;
    try {
        index.tokenizer_version = dump.value("tokenizer_version", "");

        std::vector<Node> nodes;
        for (const auto& n : dump.at("nodes")) {
            Node node;
            node.key = key_from_json(n.at("key"));
            node.description = n.value("description", "");
            for (const auto& chunk_id : n.at("source_chunks")) {
                node.source_chunks.insert(chunk_id.get<std::string>());
            }
            nodes.push_back(std::move(node));
        }

        std::vector<Edge> edges;
        for (const auto& e : dump.at("edges")) {
            Edge edge;
            edge.a = key_from_json(e.at("a"));
            edge.b = key_from_json(e.at("b"));
            edge.weight = e.at("weight").get<double>();
            edge.description = e.value("description", "");
            if (e.contains("direction")) {
                edge.directed_hint = std::make_pair(key_from_json(e["direction"][0]),
                                                    key_from_json(e["direction"][1]));
            }
            for (const auto& chunk_id : e.at("source_chunks")) {
                edge.source_chunks.insert(chunk_id.get<std::string>());
            }
            edges.push_back(std::move(edge));
        }
        index.graph = graph_from_parts(std::move(nodes), std::move(edges));

        for (const auto& c : dump.at("communities")) {
            Community community;
            community.community_id = c.at("id").get<std::string>();
            community.level = c.at("level").get<std::size_t>();
            for (const auto& member : c.at("members")) {
                community.members.insert(key_from_json(member));
            }
            if (c.contains("parent")) community.parent = c["parent"].get<std::string>();
            index.communities.add(std::move(community));
        }

        for (const auto& r : dump.at("reports")) {
            CommunityReport report;
            report.community_id = r.at("community_id").get<std::string>();
            report.title = r.value("title", "");
            report.summary = r.value("summary", "");
            report.impact_severity = r.value("impact_severity", 0.0);
            report.rating_explanation = r.value("rating_explanation", "");
            for (const auto& f : r.at("findings")) {
                report.findings.push_back(
                    {f.value("summary", ""), f.value("explanation", "")});
            }
            index.reports[report.community_id] = std::move(report);
        }

        for (const auto& c : dump.at("chunks")) {
            corpus::Chunk chunk;
            chunk.chunk_id = c.at("chunk_id").get<std::string>();
            chunk.doc_id = c.at("doc_id").get<std::string>();
            chunk.ordinal = c.at("ordinal").get<std::size_t>();
            chunk.text = c.at("text").get<std::string>();
            chunk.token_count = c.at("token_count").get<std::size_t>();
            chunk.char_span = {c.at("char_span")[0].get<std::size_t>(),
                               c.at("char_span")[1].get<std::size_t>()};
            index.chunks.push_back(std::move(chunk));
        }

        for (const auto& [doc_id, kind] : dump.at("document_kinds").items()) {
            index.document_kinds[doc_id] =
                corpus::document_kind_from_string(kind.get<std::string>());
        }

        if (dump.contains("glossary")) {
            for (const auto& g : dump["glossary"]) {
                index.glossary.push_back({g.value("term", ""), g.value("definition", ""),
                                          g.value("source_doc", "")});
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::IoError, path.string() + ": malformed dump: " + e.what());
    }
    return index;
}

std::string to_graphml(const GraphIndex& index) {
    // Level-0 community of each node, for cluster coloring.
    std::map<NodeKey, std::string> community_of;
    for (const auto* community : index.communities.at_level(0)) {
        for (const auto& key : community->members) {
            community_of[key] = community->community_id;
        }
    }

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"d0\" for=\"node\" attr.name=\"type\" attr.type=\"string\"/>\n"
        << "  <key id=\"d1\" for=\"node\" attr.name=\"rank\" attr.type=\"int\"/>\n"
        << "  <key id=\"d2\" for=\"node\" attr.name=\"community\" attr.type=\"string\"/>\n"
        << "  <key id=\"d3\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
        << "  <graph id=\"G\" edgedefault=\"undirected\">\n";
    for (const auto& node : index.graph.nodes()) {
        out << "    <node id=\"" << xml_escape(node.key.str()) << "\">\n"
            << "      <data key=\"d0\">" << xml_escape(node.key.entity_type) << "</data>\n"
            << "      <data key=\"d1\">" << node.node_rank << "</data>\n"
            << "      <data key=\"d2\">" << xml_escape(community_of[node.key]) << "</data>\n"
            << "    </node>\n";
    }
    std::size_t edge_id = 0;
    for (const auto& edge : index.graph.edges()) {
        out << "    <edge id=\"e" << edge_id++ << "\" source=\""
            << xml_escape(edge.a.str()) << "\" target=\"" << xml_escape(edge.b.str())
            << "\">\n"
            << "      <data key=\"d3\">" << edge.weight << "</data>\n"
            << "    </edge>\n";
    }
    out << "  </graph>\n</graphml>\n";
    return out.str();
}

} // namespace reqcheck::graph
