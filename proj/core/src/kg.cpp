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

#include "topickg/kg.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "json.hpp"
#include "topickg/error.hpp"

namespace topickg {

using json = nlohmann::json;

std::string_view to_string(EntityLabel label) {
  switch (label) {
    case EntityLabel::Organization: return "Organization";
    case EntityLabel::Event: return "Event";
    case EntityLabel::Person: return "Person";
    case EntityLabel::Location: return "Location";
    case EntityLabel::Product: return "Product";
    case EntityLabel::GeopoliticalEntity: return "GeopoliticalEntity";
  }
  return "?";
}

std::optional<EntityLabel> parse_entity_label(std::string_view s) {
  static const std::map<std::string, EntityLabel, std::less<>> names = {
      {"organization", EntityLabel::Organization},
      {"org", EntityLabel::Organization},
      {"event", EntityLabel::Event},
      {"person", EntityLabel::Person},
      {"location", EntityLabel::Location},
      {"loc", EntityLabel::Location},
      {"product", EntityLabel::Product},
      {"geopoliticalentity", EntityLabel::GeopoliticalEntity},
      {"geopolitical entity", EntityLabel::GeopoliticalEntity},
      {"gpe", EntityLabel::GeopoliticalEntity},
  };
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  auto it = names.find(lower);
  if (it == names.end()) return std::nullopt;
  return it->second;
}

std::string normalize_surface(std::string_view surface) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : surface) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

AnnotationLoad ingest_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read annotation file: " + path.string());
  AnnotationLoad out;
  std::set<std::tuple<std::string, EntityLabel, std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }))
      continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": malformed record: " +
                       e.what());
    }
    auto where = [&] { return path.string() + ":" + std::to_string(line_no); };
    if (!rec.is_object() || !rec.contains("doc_id") || !rec["doc_id"].is_string() ||
        rec["doc_id"].get<std::string>().empty())
      throw InputError(where() + ": annotation record missing doc_id");
    if (!rec.contains("label") || !rec["label"].is_string())
      throw InputError(where() + ": annotation record missing label");
    auto label = parse_entity_label(rec["label"].get<std::string>());
    if (!label) {
      ++out.skipped_labels;
      continue;
    }
    std::string surface = rec.value("text", std::string());
    std::string normalized = normalize_surface(surface);
    if (normalized.empty()) throw InputError(where() + ": annotation with empty text");
    std::string doc_id = rec["doc_id"].get<std::string>();
    if (!seen.emplace(doc_id, *label, normalized).second) {
      ++out.duplicates;
      continue;
    }
    out.annotations.push_back({std::move(doc_id), *label, std::move(surface), std::move(normalized)});
  }
  return out;
}

std::vector<std::string> load_gazetteer_terms(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read gazetteer file: " + path.string());
  std::vector<std::string> terms;
  std::string line;
  while (std::getline(in, line)) {
    auto term = normalize_surface(line);
    if (term.empty() || term.front() == '#') continue;
    terms.push_back(std::move(term));
  }
  return terms;
}

namespace {

// Character trie over normalized terms.
class TermTrie {
 public:
  TermTrie() : nodes_(1) {}

  void insert(const std::string& term, EntityLabel label) {
    std::size_t cur = 0;
    for (char c : term) {
      auto it = nodes_[cur].next.find(c);
      if (it == nodes_[cur].next.end()) {
        nodes_.emplace_back();
        it = nodes_[cur].next.emplace(c, nodes_.size() - 1).first;
      }
      cur = it->second;
    }
    auto& l = nodes_[cur].label;
    if (!l || static_cast<int>(label) < static_cast<int>(*l)) l = label;
  }

  // Calls fn(end, label) for every term starting at `start`.
  template <typename F>
  void match_from(const std::string& text, std::size_t start, F&& fn) const {
    std::size_t cur = 0;
    for (std::size_t i = start; i < text.size(); ++i) {
      auto it = nodes_[cur].next.find(text[i]);
      if (it == nodes_[cur].next.end()) return;
      cur = it->second;
      if (nodes_[cur].label) fn(i + 1, *nodes_[cur].label);
    }
  }

 private:
  struct Node {
    std::map<char, std::size_t> next;
    std::optional<EntityLabel> label;
  };
  std::vector<Node> nodes_;
};

bool is_word(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::vector<EntityAnnotation> gazetteer_match(std::span<const DocumentRecord> docs,
                                              const Gazetteer& gazetteer) {
  TermTrie trie;
  bool any = false;
  for (const auto& [label, terms] : gazetteer)
    for (const auto& t : terms) {
      auto norm = normalize_surface(t);
      if (norm.empty()) continue;
      trie.insert(norm, label);
      any = true;
    }
  std::vector<EntityAnnotation> out;
  if (!any) return out;

  for (const auto& doc : docs) {
    const std::string text = normalize_surface(doc.title + " " + doc.body);
    struct Match {
      std::size_t begin, end;
      EntityLabel label;
    };
    std::vector<Match> matches;
    for (std::size_t i = 0; i < text.size(); ++i) {
      if (i > 0 && is_word(text[i - 1]) && is_word(text[i])) continue;
      trie.match_from(text, i, [&](std::size_t end, EntityLabel label) {
        if (end < text.size() && is_word(text[end - 1]) && is_word(text[end])) return;
        matches.push_back({i, end, label});
      });
    }
    std::sort(matches.begin(), matches.end(), [](const Match& a, const Match& b) {
      auto la = a.end - a.begin, lb = b.end - b.begin;
      if (la != lb) return la > lb;
      return a.begin < b.begin;
    });
    std::vector<bool> taken(text.size(), false);
    std::set<std::pair<EntityLabel, std::string>> emitted;
    for (const auto& m : matches) {
      if (std::any_of(taken.begin() + static_cast<std::ptrdiff_t>(m.begin),
                      taken.begin() + static_cast<std::ptrdiff_t>(m.end), [](bool b) { return b; }))
        continue;
      std::fill(taken.begin() + static_cast<std::ptrdiff_t>(m.begin),
                taken.begin() + static_cast<std::ptrdiff_t>(m.end), true);
      std::string surface = text.substr(m.begin, m.end - m.begin);
      if (emitted.emplace(m.label, surface).second)
        out.push_back({doc.doc_id, m.label, surface, surface});
    }
  }
  return out;
}

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Author: return "Author";
    case NodeKind::Category: return "Category";
    case NodeKind::Document: return "Document";
    case NodeKind::Entity: return "Entity";
    case NodeKind::Keyword: return "Keyword";
    case NodeKind::Topic: return "Topic";
  }
  return "?";
}

std::string_view to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::AUTHORED_BY: return "AUTHORED_BY";
    case EdgeKind::HAS_KEYWORD: return "HAS_KEYWORD";
    case EdgeKind::HAS_TOPIC: return "HAS_TOPIC";
    case EdgeKind::IN_CATEGORY: return "IN_CATEGORY";
    case EdgeKind::MENTIONS: return "MENTIONS";
    case EdgeKind::SHARES_ENTITY: return "SHARES_ENTITY";
  }
  return "?";
}

NodeKind parse_node_kind(std::string_view s) {
  for (auto k : {NodeKind::Author, NodeKind::Category, NodeKind::Document, NodeKind::Entity,
                 NodeKind::Keyword, NodeKind::Topic})
    if (to_string(k) == s) return k;
  throw InputError("unknown node kind '" + std::string(s) + "'");
}

EdgeKind parse_edge_kind(std::string_view s) {
  for (auto k : {EdgeKind::AUTHORED_BY, EdgeKind::HAS_KEYWORD, EdgeKind::HAS_TOPIC,
                 EdgeKind::IN_CATEGORY, EdgeKind::MENTIONS, EdgeKind::SHARES_ENTITY})
    if (to_string(k) == s) return k;
  throw InputError("unknown edge kind '" + std::string(s) + "'");
}

bool KnowledgeGraph::add_node(GraphNode node) {
  if (node.id.empty()) throw Error("graph node with empty id");
  if (auto it = nodes_.find(node.id); it != nodes_.end()) {
    if (it->second.kind != node.kind)
      throw Error("graph node '" + node.id + "' already exists as " +
                  std::string(to_string(it->second.kind)));
    return false;
  }
  ++stats_.nodes[node.kind];
  auto id = node.id;
  nodes_.emplace(std::move(id), std::move(node));
  return true;
}

bool KnowledgeGraph::add_edge(GraphEdge edge) {
  if (!nodes_.contains(edge.src) || !nodes_.contains(edge.dst))
    throw Error("edge " + edge.src + " -> " + edge.dst + " references a missing node");
  EdgeKey key{edge.src, edge.dst, edge.kind};
  if (edges_.contains(key)) return false;
  ++stats_.edges[edge.kind];
  edges_.emplace(std::move(key), std::move(edge));
  return true;
}

bool KnowledgeGraph::has_edge(const std::string& src, const std::string& dst, EdgeKind kind) const {
  return edges_.contains(EdgeKey{src, dst, kind});
}

const GraphNode& KnowledgeGraph::node(const std::string& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error("no graph node '" + id + "'");
  return it->second;
}

void KnowledgeGraph::validate() const {
  auto require = [](const GraphNode& n, std::initializer_list<const char*> keys) {
    for (const char* k : keys)
      if (!n.attributes.contains(k))
        throw Error(std::string(to_string(n.kind)) + " node '" + n.id + "' lacks attribute '" + k +
                    "'");
  };
  for (const auto& [id, n] : nodes_) {
    switch (n.kind) {
      case NodeKind::Document: require(n, {"doc_id"}); break;
      case NodeKind::Topic: require(n, {"node_path", "topic"}); break;
      case NodeKind::Entity: require(n, {"label", "normalized"}); break;
      default: break;
    }
  }
  for (const auto& [key, e] : edges_) {
    if (!nodes_.contains(e.src) || !nodes_.contains(e.dst))
      throw Error("edge " + e.src + " -> " + e.dst + " references a missing node");
    switch (e.kind) {
      case EdgeKind::HAS_TOPIC:
      case EdgeKind::HAS_KEYWORD:
        if (!e.weight || *e.weight < 0.0 || *e.weight > 1.0)
          throw Error(std::string(to_string(e.kind)) + " edge " + e.src + " -> " + e.dst +
                      " needs a weight in [0, 1]");
        break;
      case EdgeKind::SHARES_ENTITY:
        if (!e.weight || *e.weight < 1.0)
          throw Error("SHARES_ENTITY edge " + e.src + " -> " + e.dst + " needs a weight >= 1");
        break;
      default: break;
    }
  }
}

std::string document_node_id(std::string_view doc_id) { return "doc:" + std::string(doc_id); }
std::string topic_node_id(std::string_view tree_node_id, int topic) {
  return "topic:" + std::string(tree_node_id) + "#" + std::to_string(topic);
}
std::string keyword_node_id(std::string_view token) { return "keyword:" + std::string(token); }
std::string entity_node_id(EntityLabel label, std::string_view normalized) {
  return "entity:" + std::string(to_string(label)) + ":" + std::string(normalized);
}
std::string category_node_id(std::string_view category) {
  return "category:" + std::string(category);
}
std::string author_node_id(std::string_view author) { return "author:" + std::string(author); }

KnowledgeGraph assemble_graph(std::span<const DocumentRecord> docs, const TopicNode& node,
                              std::span<const EntityAnnotation> annotations) {
  KnowledgeGraph g;
  if (docs.empty()) return g;
  if (node.k < 1) throw ArgumentError("assemble_graph: node " + node.node_id + " has no topics");

  std::map<std::string, std::size_t> column;
  for (std::size_t j = 0; j < node.doc_ids.size(); ++j) column.emplace(node.doc_ids[j], j);

  for (int t = 0; t < node.k; ++t) {
    g.add_node({topic_node_id(node.node_id, t),
                NodeKind::Topic,
                {{"node_path", node.node_id},
                 {"topic", std::to_string(t)},
                 {"documents", std::to_string(node.topic_size(t))}}});
  }
  for (int t = 0; t < node.k && static_cast<std::size_t>(t) < node.keywords.size(); ++t) {
    for (const auto& kw : node.keywords[static_cast<std::size_t>(t)]) {
      g.add_node({keyword_node_id(kw.token), NodeKind::Keyword, {{"token", kw.token}}});
      g.add_edge({keyword_node_id(kw.token), topic_node_id(node.node_id, t), EdgeKind::HAS_KEYWORD,
                  kw.normalized});
    }
  }

  for (const auto& d : docs) {
    auto it = column.find(d.doc_id);
    if (it == column.end())
      throw ArgumentError("assemble_graph: document '" + d.doc_id + "' is not in node " +
                          node.node_id);
    const auto j = static_cast<Index>(it->second);

    GraphNode dn{document_node_id(d.doc_id), NodeKind::Document, {}};
    for (const auto& [k, v] : d.extra) dn.attributes[k] = v;
    dn.attributes["doc_id"] = d.doc_id;
    dn.attributes["title"] = d.title;
    if (d.year) dn.attributes["year"] = std::to_string(*d.year);
    if (d.doi) dn.attributes["doi"] = *d.doi;
    if (!d.primary_category.empty()) dn.attributes["primary_category"] = d.primary_category;
    if (!d.authors.empty()) {
      std::string joined;
      for (const auto& a : d.authors) joined += (joined.empty() ? "" : "; ") + a;
      dn.attributes["authors"] = joined;
    }
    if (!g.add_node(std::move(dn)))
      throw ArgumentError("assemble_graph: duplicate document '" + d.doc_id + "'");

    const int topic = node.assignment[static_cast<std::size_t>(j)];
    const double l1 = node.H.col(j).sum();
    const double weight = l1 > 0.0 ? node.H(topic, j) / l1 : 0.0;
    g.add_edge({document_node_id(d.doc_id), topic_node_id(node.node_id, topic), EdgeKind::HAS_TOPIC,
                std::clamp(weight, 0.0, 1.0)});

    for (const auto& c : d.categories) {
      g.add_node({category_node_id(c), NodeKind::Category, {{"name", c}}});
      g.add_edge({document_node_id(d.doc_id), category_node_id(c), EdgeKind::IN_CATEGORY, {}});
    }
    for (const auto& a : d.authors) {
      g.add_node({author_node_id(a), NodeKind::Author, {{"name", a}}});
      g.add_edge({document_node_id(d.doc_id), author_node_id(a), EdgeKind::AUTHORED_BY, {}});
    }
  }

  for (const auto& ann : annotations) {
    const auto doc = document_node_id(ann.doc_id);
    if (!g.has_node(doc))
      throw ArgumentError("annotation references unknown document '" + ann.doc_id + "'");
    const auto ent = entity_node_id(ann.label, ann.normalized);
    g.add_node({ent,
                NodeKind::Entity,
                {{"label", std::string(to_string(ann.label))},
                 {"normalized", ann.normalized},
                 {"surface", ann.surface}}});
    g.add_edge({doc, ent, EdgeKind::MENTIONS, {}});
  }
  g.validate();
  return g;
}

KnowledgeGraph add_community_edges(KnowledgeGraph g, std::size_t max_pairs) {
  std::map<std::string, std::vector<std::string>> docs_by_entity;
  for (const auto& [key, e] : g.edges()) {
    if (e.kind != EdgeKind::MENTIONS) continue;
    if (g.node(e.src).kind != NodeKind::Document) continue;
    docs_by_entity[e.dst].push_back(e.src);
  }
  std::map<std::pair<std::string, std::string>, std::size_t> shared;
  for (auto& [entity, docs] : docs_by_entity) {
    std::sort(docs.begin(), docs.end());
    for (std::size_t a = 0; a < docs.size(); ++a)
      for (std::size_t b = a + 1; b < docs.size(); ++b) {
        ++shared[{docs[a], docs[b]}];
        if (shared.size() > max_pairs)
          throw Error("community edges exceed the limit of " + std::to_string(max_pairs) +
                      " document pairs");
      }
  }
  for (const auto& [pair, count] : shared)
    g.add_edge({pair.first, pair.second, EdgeKind::SHARES_ENTITY, static_cast<double>(count)});
  return g;
}

std::map<int, std::map<std::string, std::size_t>> category_histograms(
    const TopicNode& node, std::span<const DocumentRecord> docs) {
  std::map<std::string, const DocumentRecord*> by_id;
  for (const auto& d : docs) by_id.emplace(d.doc_id, &d);
  std::map<int, std::map<std::string, std::size_t>> out;
  for (int t = 0; t < node.k; ++t) out[t];
  for (std::size_t j = 0; j < node.doc_ids.size() && j < node.assignment.size(); ++j) {
    auto it = by_id.find(node.doc_ids[j]);
    std::string cat = it == by_id.end() || it->second->primary_category.empty()
                          ? "(none)"
                          : it->second->primary_category;
    ++out[node.assignment[j]][cat];
  }
  return out;
}

}  // namespace topickg
