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

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "topickg/corpus.hpp"
#include "topickg/hierarchy.hpp"

namespace topickg {

// The six entity labels kept in the graph.
enum class EntityLabel { Organization, Event, Person, Location, Product, GeopoliticalEntity };

std::string_view to_string(EntityLabel label);
// Accepts the canonical names and the common short tags (ORG, EVENT, PERSON,
// LOC, PRODUCT, GPE). Anything else is not one of the six labels.
std::optional<EntityLabel> parse_entity_label(std::string_view s);

struct EntityAnnotation {
  std::string doc_id;
  EntityLabel label = EntityLabel::Organization;
  std::string surface;
  std::string normalized;

  bool operator==(const EntityAnnotation&) const = default;
};

// ASCII case fold, whitespace runs collapsed to one space, trimmed.
std::string normalize_surface(std::string_view surface);

struct AnnotationLoad {
  std::vector<EntityAnnotation> annotations;
  std::size_t skipped_labels = 0;  // records whose label is outside the six
  std::size_t duplicates = 0;      // collapsed (doc_id, label, normalized) repeats
};

// Line-delimited JSON records {"doc_id", "label", "text"}.
AnnotationLoad ingest_annotations(const std::filesystem::path& path);

using Gazetteer = std::map<EntityLabel, std::vector<std::string>>;

// One term per line; blank lines and lines starting with '#' are ignored.
std::vector<std::string> load_gazetteer_terms(const std::filesystem::path& path);

// Case-insensitive scan of title and body for terms on word boundaries.
// Overlapping matches are resolved longest first, then leftmost; a span
// listed under several labels takes the first label in enum order. One
// annotation per distinct (doc, label, normalized).
std::vector<EntityAnnotation> gazetteer_match(std::span<const DocumentRecord> docs,
                                              const Gazetteer& gazetteer);

enum class NodeKind { Author, Category, Document, Entity, Keyword, Topic };
// Declared in name order so enum order equals string order.
enum class EdgeKind { AUTHORED_BY, HAS_KEYWORD, HAS_TOPIC, IN_CATEGORY, MENTIONS, SHARES_ENTITY };

std::string_view to_string(NodeKind kind);
std::string_view to_string(EdgeKind kind);
NodeKind parse_node_kind(std::string_view s);
EdgeKind parse_edge_kind(std::string_view s);

struct GraphNode {
  std::string id;
  NodeKind kind = NodeKind::Document;
  std::map<std::string, std::string> attributes;

  bool operator==(const GraphNode&) const = default;
};

struct GraphEdge {
  std::string src;
  std::string dst;
  EdgeKind kind = EdgeKind::HAS_TOPIC;
  std::optional<double> weight;

  bool operator==(const GraphEdge&) const = default;
};

struct GraphStats {
  std::map<NodeKind, std::size_t> nodes;
  std::map<EdgeKind, std::size_t> edges;

  bool operator==(const GraphStats&) const = default;
};

class KnowledgeGraph {
 public:
  using EdgeKey = std::tuple<std::string, std::string, EdgeKind>;

  // Returns false (and leaves the graph unchanged) if the id already exists
  // with the same kind; a kind clash throws.
  bool add_node(GraphNode node);
  // Endpoints must exist. Returns false if (src, dst, kind) already exists.
  bool add_edge(GraphEdge edge);

  bool has_node(const std::string& id) const { return nodes_.contains(id); }
  bool has_edge(const std::string& src, const std::string& dst, EdgeKind kind) const;
  const GraphNode& node(const std::string& id) const;

  // Sorted by id and by (src, dst, kind) respectively.
  const std::map<std::string, GraphNode>& nodes() const { return nodes_; }
  const std::map<EdgeKey, GraphEdge>& edges() const { return edges_; }

  const GraphStats& stats() const { return stats_; }
  bool empty() const { return nodes_.empty(); }

  // Referential integrity, required attributes per node kind and weight
  // ranges per edge kind. Throws Error describing the first violation.
  void validate() const;

  bool operator==(const KnowledgeGraph& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_;
  }

 private:
  std::map<std::string, GraphNode> nodes_;
  std::map<EdgeKey, GraphEdge> edges_;
  GraphStats stats_;
};

std::string document_node_id(std::string_view doc_id);
std::string topic_node_id(std::string_view tree_node_id, int topic);
std::string keyword_node_id(std::string_view token);
std::string entity_node_id(EntityLabel label, std::string_view normalized);
std::string category_node_id(std::string_view category);
std::string author_node_id(std::string_view author);

// Builds Document, Topic, Keyword, Entity, Category and Author nodes for the
// documents of one factorized tree node. Every document must belong to the
// node; every annotation must reference one of `docs`.
KnowledgeGraph assemble_graph(std::span<const DocumentRecord> docs, const TopicNode& node,
                              std::span<const EntityAnnotation> annotations);

// Adds one SHARES_ENTITY edge per document pair with at least one common
// entity, weighted by the number of shared entities. Existing pairs are left
// alone. Throws if more than `max_pairs` pairs would be created.
KnowledgeGraph add_community_edges(KnowledgeGraph g, std::size_t max_pairs = 1'000'000);

enum class ExportFormat { Jsonl, GraphMl, Cypher };

std::optional<ExportFormat> parse_export_format(std::string_view s);
std::string_view extension(ExportFormat format);

void export_graph(const KnowledgeGraph& g, ExportFormat format, const std::filesystem::path& path);
KnowledgeGraph import_jsonl(const std::filesystem::path& path);

// Primary-category counts of the documents assigned to each topic of `node`.
std::map<int, std::map<std::string, std::size_t>> category_histograms(
    const TopicNode& node, std::span<const DocumentRecord> docs);

}  // namespace topickg
