// Copyright 2026 The topickg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>

#include "json.hpp"
#include "topickg/error.hpp"
#include "topickg/kg.hpp"

namespace topickg {

namespace {

using json = nlohmann::json;

std::string fmt17(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

// Single-quoted Cypher string literal.
std::string cypher_string(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\'': out += "\\'"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  return out + "'";
}

// Attribute keys become property names; anything outside [A-Za-z0-9_] is
// backtick-quoted.
std::string cypher_key(std::string_view k) {
  bool plain = !k.empty() && !std::isdigit(static_cast<unsigned char>(k.front()));
  for (char c : k)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') plain = false;
  if (plain) return std::string(k);
  std::string out = "`";
  for (char c : k) {
    if (c == '`') out.push_back('`');
    out.push_back(c);
  }
  return out + "`";
}

void write_jsonl(const KnowledgeGraph& g, std::ostream& out) {
  for (const auto& [id, n] : g.nodes()) {
    json rec = {{"type", "node"},
                {"id", n.id},
                {"kind", std::string(to_string(n.kind))},
                {"attributes", n.attributes}};
    out << rec.dump() << '\n';
  }
  for (const auto& [key, e] : g.edges()) {
    json rec = {
        {"type", "edge"}, {"src", e.src}, {"dst", e.dst}, {"kind", std::string(to_string(e.kind))}};
    if (e.weight) rec["weight"] = *e.weight;
    out << rec.dump() << '\n';
  }
}

void write_graphml(const KnowledgeGraph& g, std::ostream& out) {
  std::set<std::string> attr_keys;
  for (const auto& [id, n] : g.nodes())
    for (const auto& [k, v] : n.attributes) attr_keys.insert(k);
  std::map<std::string, std::string> key_id;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
         "  <key id=\"kind\" for=\"all\" attr.name=\"kind\" attr.type=\"string\"/>\n"
         "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n";
  int next = 0;
  for (const auto& k : attr_keys) {
    key_id[k] = "a" + std::to_string(next++);
    out << "  <key id=\"" << key_id[k] << "\" for=\"node\" attr.name=\"" << xml_escape(k)
        << "\" attr.type=\"string\"/>\n";
  }
  out << "  <graph id=\"G\" edgedefault=\"directed\">\n";
  for (const auto& [id, n] : g.nodes()) {
    out << "    <node id=\"" << xml_escape(n.id) << "\" labels=\":" << to_string(n.kind)
        << "\">\n      <data key=\"kind\">" << to_string(n.kind) << "</data>\n";
    for (const auto& [k, v] : n.attributes)
      out << "      <data key=\"" << key_id[k] << "\">" << xml_escape(v) << "</data>\n";
    out << "    </node>\n";
  }
  std::size_t edge_no = 0;
  for (const auto& [key, e] : g.edges()) {
    out << "    <edge id=\"e" << edge_no++ << "\" source=\"" << xml_escape(e.src) << "\" target=\""
        << xml_escape(e.dst) << "\" label=\"" << to_string(e.kind) << "\">\n"
        << "      <data key=\"kind\">" << to_string(e.kind) << "</data>\n";
    if (e.weight) out << "      <data key=\"weight\">" << fmt17(*e.weight) << "</data>\n";
    out << "    </edge>\n";
  }
  out << "  </graph>\n</graphml>\n";
}

void write_cypher(const KnowledgeGraph& g, std::ostream& out) {
  for (const auto& [id, n] : g.nodes()) {
    out << "MERGE (n:" << to_string(n.kind) << " {id: " << cypher_string(n.id) << "})";
    if (!n.attributes.empty()) {
      out << " SET ";
      bool first = true;
      for (const auto& [k, v] : n.attributes) {
        out << (first ? "" : ", ") << "n." << cypher_key(k) << " = " << cypher_string(v);
        first = false;
      }
    }
    out << ";\n";
  }
  for (const auto& [key, e] : g.edges()) {
    out << "MATCH (a:" << to_string(g.node(e.src).kind) << " {id: " << cypher_string(e.src)
        << "}), (b:" << to_string(g.node(e.dst).kind) << " {id: " << cypher_string(e.dst)
        << "}) MERGE (a)-[r:" << to_string(e.kind) << "]->(b)";
    if (e.weight) out << " SET r.weight = " << fmt17(*e.weight);
    out << ";\n";
  }
}

}  // namespace

std::optional<ExportFormat> parse_export_format(std::string_view s) {
  if (s == "jsonl") return ExportFormat::Jsonl;
  if (s == "graphml") return ExportFormat::GraphMl;
  if (s == "cypher") return ExportFormat::Cypher;
  return std::nullopt;
}

std::string_view extension(ExportFormat format) {
  switch (format) {
    case ExportFormat::Jsonl: return ".jsonl";
    case ExportFormat::GraphMl: return ".graphml";
    case ExportFormat::Cypher: return ".cypher";
  }
  return "";
}

void export_graph(const KnowledgeGraph& g, ExportFormat format, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  switch (format) {
    case ExportFormat::Jsonl: write_jsonl(g, out); break;
    case ExportFormat::GraphMl: write_graphml(g, out); break;
    case ExportFormat::Cypher: write_cypher(g, out); break;
  }
  out.flush();
  if (!out) throw InputError("write failed: " + path.string());
}

KnowledgeGraph import_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  KnowledgeGraph g;
  std::string line;
  std::size_t line_no = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      json rec = json::parse(line);
      const auto type = rec.at("type").get<std::string>();
      if (type == "node") {
        GraphNode n{rec.at("id").get<std::string>(), parse_node_kind(rec.at("kind").get<std::string>()),
                    rec.value("attributes", std::map<std::string, std::string>{})};
        if (!g.add_node(std::move(n))) throw InputError("duplicate node");
      } else if (type == "edge") {
        GraphEdge e{rec.at("src").get<std::string>(), rec.at("dst").get<std::string>(),
                    parse_edge_kind(rec.at("kind").get<std::string>()), std::nullopt};
        if (rec.contains("weight")) e.weight = rec["weight"].get<double>();
        if (!g.add_edge(std::move(e))) throw InputError("duplicate edge");
      } else {
        throw InputError("unknown record type '" + type + "'");
      }
    }
  } catch (const std::exception& e) {
    throw InputError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
  }
  g.validate();
  return g;
}

}  // namespace topickg
