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

#include "topickg/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "topickg/hash.hpp"
#include "topickg/log.hpp"

namespace topickg {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Ingest: return "ingest";
    case Stage::Clean: return "clean";
    case Stage::Matrices: return "matrices";
    case Stage::Hierarchy: return "hierarchy";
    case Stage::Annotations: return "annotations";
    case Stage::Graph: return "graph";
    case Stage::Export: return "export";
  }
  return "?";
}

std::optional<Stage> parse_stage(std::string_view s) {
  for (Stage st : kStages)
    if (to_string(st) == s) return st;
  return std::nullopt;
}

const StageRecord* Manifest::find(Stage stage) const {
  for (const auto& r : stages)
    if (r.stage == stage) return &r;
  return nullptr;
}

void write_manifest(const fs::path& path, const Manifest& m) {
  json stages = json::array();
  for (const auto& r : m.stages) {
    json outputs = json::array();
    for (const auto& o : r.outputs) outputs.push_back({{"path", o.path}, {"sha256", o.sha256}});
    json rec = {{"stage", std::string(to_string(r.stage))},
                {"status", r.status},
                {"inputs_hash", r.inputs_hash},
                {"outputs", outputs},
                {"wall_time_s", r.wall_time_s},
                {"seed", r.seed ? json(*r.seed) : json(nullptr)}};
    stages.push_back(std::move(rec));
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << json{{"stages", stages}}.dump(2) << '\n';
  }
  fs::rename(tmp, path);
}

Manifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path.string());
  Manifest m;
  try {
    json doc = json::parse(in);
    for (const auto& rec : doc.at("stages")) {
      StageRecord r;
      auto st = parse_stage(rec.at("stage").get<std::string>());
      if (!st) throw InputError("unknown stage '" + rec.at("stage").get<std::string>() + "'");
      r.stage = *st;
      r.status = rec.at("status").get<std::string>();
      r.inputs_hash = rec.at("inputs_hash").get<std::string>();
      for (const auto& o : rec.at("outputs"))
        r.outputs.push_back({o.at("path").get<std::string>(), o.at("sha256").get<std::string>()});
      r.wall_time_s = rec.at("wall_time_s").get<double>();
      if (!rec.at("seed").is_null()) r.seed = rec.at("seed").get<std::uint64_t>();
      m.stages.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw InputError("malformed manifest " + path.string() + ": " + e.what());
  }
  return m;
}

namespace {

std::string fmt17(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

fs::path stage_dir(const PipelineConfig& cfg, Stage s) { return cfg.output_dir / to_string(s); }
fs::path split_cache(const PipelineConfig& cfg) { return cfg.output_dir / "cache" / "split"; }

fs::path documents_path(const PipelineConfig& cfg) {
  return stage_dir(cfg, Stage::Ingest) / "documents.jsonl";
}
fs::path tokens_path(const PipelineConfig& cfg) {
  return stage_dir(cfg, Stage::Clean) / "tokens.jsonl";
}
fs::path tree_path(const PipelineConfig& cfg) { return stage_dir(cfg, Stage::Hierarchy) / "tree"; }
fs::path annotations_path(const PipelineConfig& cfg) {
  return stage_dir(cfg, Stage::Annotations) / "annotations.jsonl";
}
fs::path graph_path(const PipelineConfig& cfg) {
  return stage_dir(cfg, Stage::Graph) / "graph.jsonl";
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InputError("cannot write " + p.string());
  return out;
}

// ---- stage artifacts ----

void write_documents(const fs::path& p, std::span<const DocumentRecord> docs) {
  auto out = open_out(p);
  for (const auto& d : docs) {
    json rec = {{"id", d.doc_id},       {"title", d.title},
                {"body", d.body},       {"authors", d.authors},
                {"primary_category", d.primary_category},
                {"categories", d.categories}, {"extra", d.extra}};
    if (d.year) rec["year"] = *d.year;
    if (d.doi) rec["doi"] = *d.doi;
    out << rec.dump() << '\n';
  }
}

std::vector<DocumentRecord> read_documents(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw InputError("cannot read " + p.string());
  std::vector<DocumentRecord> docs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json rec = json::parse(line);
    DocumentRecord d;
    d.doc_id = rec.at("id").get<std::string>();
    d.title = rec.at("title").get<std::string>();
    d.body = rec.at("body").get<std::string>();
    d.authors = rec.at("authors").get<std::vector<std::string>>();
    d.primary_category = rec.at("primary_category").get<std::string>();
    d.categories = rec.at("categories").get<std::vector<std::string>>();
    d.extra = rec.at("extra").get<std::map<std::string, std::string>>();
    if (rec.contains("year")) d.year = rec["year"].get<int>();
    if (rec.contains("doi")) d.doi = rec["doi"].get<std::string>();
    docs.push_back(std::move(d));
  }
  return docs;
}

void write_tokens(const fs::path& p, std::span<const TokenizedDocument> docs) {
  auto out = open_out(p);
  for (const auto& d : docs) out << json{{"id", d.doc_id}, {"tokens", d.tokens}}.dump() << '\n';
}

std::vector<TokenizedDocument> read_tokens(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw InputError("cannot read " + p.string());
  std::vector<TokenizedDocument> docs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json rec = json::parse(line);
    docs.push_back({rec.at("id").get<std::string>(), rec.at("tokens").get<std::vector<std::string>>()});
  }
  return docs;
}

void write_lines(const fs::path& p, const std::vector<std::string>& lines) {
  auto out = open_out(p);
  for (const auto& l : lines) out << l << '\n';
}

// ---- config slices ----

MatrixParams matrix_params(const PipelineConfig& cfg, bool category) {
  MatrixParams mp;
  mp.vocab.min_df = cfg.min_df;
  mp.vocab.min_df_fraction = cfg.min_df_fraction;
  mp.vocab.max_df_fraction = cfg.max_df_fraction;
  mp.vocab.min_tokens = cfg.min_tokens;
  mp.cooccurrence = cfg.cooccurrence;
  mp.semantic = cfg.semantic;
  mp.category = category;
  return mp;
}

// Primary category per document. The category matrix needs one for every
// document, so it is disabled (with a warning) when any is missing.
std::map<std::string, std::string> doc_categories(std::span<const DocumentRecord> docs,
                                                  bool& category) {
  std::map<std::string, std::string> out;
  std::size_t missing = 0;
  for (const auto& d : docs) {
    if (d.primary_category.empty()) ++missing;
    else out.emplace(d.doc_id, d.primary_category);
  }
  if (category && missing > 0) {
    log_warning(std::to_string(missing) +
                " document(s) have no category; the word-category matrix is disabled");
    category = false;
  }
  return out;
}

class KeyWriter {
 public:
  KeyWriter& operator()(std::string_view key, std::string_view value) {
    text_ += std::string(key) + "=" + std::string(value) + "\n";
    return *this;
  }
  KeyWriter& operator()(std::string_view key, double value) { return (*this)(key, fmt17(value)); }
  KeyWriter& operator()(std::string_view key, std::int64_t value) {
    return (*this)(key, std::to_string(value));
  }
  KeyWriter& operator()(std::string_view key, std::uint64_t value) {
    return (*this)(key, std::to_string(value));
  }
  KeyWriter& operator()(std::string_view key, int value) {
    return (*this)(key, static_cast<std::int64_t>(value));
  }
  KeyWriter& operator()(std::string_view key, bool value) {
    return (*this)(key, value ? std::string_view("true") : std::string_view("false"));
  }
  KeyWriter& file(std::string_view key, const std::optional<fs::path>& p) {
    return (*this)(key, p ? sha256_file(*p) : std::string("-"));
  }
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

void matrix_slice(KeyWriter& k, const PipelineConfig& cfg) {
  k("min_df", static_cast<std::uint64_t>(cfg.min_df))("min_df_fraction", cfg.min_df_fraction)(
      "max_df_fraction", cfg.max_df_fraction)("min_tokens", static_cast<std::uint64_t>(cfg.min_tokens))(
      "window", cfg.cooccurrence.window)("shift", cfg.cooccurrence.shift)("semantic", cfg.semantic)(
      "category", cfg.category);
}

std::string config_slice(const PipelineConfig& cfg, Stage stage) {
  KeyWriter k;
  k("stage", to_string(stage));
  switch (stage) {
    case Stage::Ingest: {
      const auto& f = cfg.fields;
      k("corpus", sha256_file(cfg.corpus))("id", f.id)("title", f.title)("body", f.body)(
          "authors", f.authors)("categories", f.categories)("primary_category", f.primary_category)(
          "year", f.year)("doi", f.doi);
      break;
    }
    case Stage::Clean:
      k.file("stopwords", cfg.stopwords).file("lemma_map", cfg.lemma_map);
      for (const auto& p : cfg.stop_phrases) k("stop_phrase", p);
      k("join_hyphens", cfg.join_hyphens)("lowercase", cfg.lowercase)("strip_non_ascii",
                                                                       cfg.strip_non_ascii);
      break;
    case Stage::Matrices:
      matrix_slice(k, cfg);
      break;
    case Stage::Hierarchy: {
      matrix_slice(k, cfg);
      const auto& n = cfg.nmfk;
      k("chunks", cfg.chunks)("semantic_weight", cfg.weights.semantic)(
          "category_weight", cfg.weights.category)("k_min", n.k_range.lo)("k_max", n.k_range.hi)(
          "perturbations", n.n_perturbs)("perturb_epsilon", n.perturb_epsilon)(
          "silhouette_threshold", n.silhouette_threshold)("max_iter", n.nmf_params.max_iter)(
          "tol", n.nmf_params.tol)("max_depth", cfg.max_depth)(
          "min_docs", static_cast<std::uint64_t>(cfg.min_docs))("keywords", cfg.keywords)(
          "expand_all", cfg.expand.all)("master_seed", cfg.master_seed);
      for (const auto& [node, topics] : cfg.expand.selected) {
        std::string list;
        for (int t : topics) list += std::to_string(t) + ",";
        k("expand." + node, list);
      }
      break;
    }
    case Stage::Annotations:
      k.file("annotations", cfg.annotations);
      for (const auto& [label, p] : cfg.gazetteer)
        k(std::string("gazetteer.") + std::string(to_string(label)), sha256_file(p));
      break;
    case Stage::Graph:
      k("node", cfg.graph_node)("community_edges", cfg.community_edges)(
          "max_pairs", static_cast<std::uint64_t>(cfg.max_pairs));
      break;
    case Stage::Export:
      for (auto f : cfg.formats) k("format", extension(f));
      break;
  }
  return k.text();
}

std::vector<Stage> upstream(Stage s) {
  switch (s) {
    case Stage::Ingest: return {};
    case Stage::Clean: return {Stage::Ingest};
    case Stage::Matrices: return {Stage::Ingest, Stage::Clean};
    case Stage::Hierarchy: return {Stage::Ingest, Stage::Clean};
    case Stage::Annotations: return {Stage::Ingest};
    case Stage::Graph: return {Stage::Ingest, Stage::Hierarchy, Stage::Annotations};
    case Stage::Export: return {Stage::Graph};
  }
  return {};
}

std::vector<OutputRecord> hash_outputs(const PipelineConfig& cfg, Stage s) {
  std::vector<OutputRecord> out;
  const fs::path dir = stage_dir(cfg, s);
  if (!fs::exists(dir)) return out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto rel = fs::relative(entry.path(), cfg.output_dir).generic_string();
    out.push_back({rel, sha256_file(entry.path())});
  }
  std::sort(out.begin(), out.end(),
            [](const OutputRecord& a, const OutputRecord& b) { return a.path < b.path; });
  return out;
}

// ---- stages ----

void run_ingest(const PipelineConfig& cfg) {
  LoadReport report;
  auto docs = load_corpus(cfg.corpus, cfg.fields, &report);
  if (report.rejected > 0)
    log_warning(std::to_string(report.rejected) + " corpus record(s) lack an id or body and were skipped");
  if (docs.empty()) throw InputError("corpus " + cfg.corpus.string() + " has no usable records");
  write_documents(documents_path(cfg), docs);
}

void run_clean(const PipelineConfig& cfg) {
  CleaningConfig cc;
  if (cfg.stopwords) cc.stopwords = load_stopwords(*cfg.stopwords);
  if (cfg.lemma_map) cc.lemma_map = load_lemma_map(*cfg.lemma_map);
  cc.stop_phrases = cfg.stop_phrases;
  cc.min_tokens = cfg.min_tokens;
  cc.join_hyphens = cfg.join_hyphens;
  cc.lowercase = cfg.lowercase;
  cc.strip_non_ascii = cfg.strip_non_ascii;
  auto docs = read_documents(documents_path(cfg));
  write_tokens(tokens_path(cfg), clean_corpus(docs, cc));
}

void run_matrices(const PipelineConfig& cfg) {
  auto docs = read_documents(documents_path(cfg));
  auto tokens = read_tokens(tokens_path(cfg));
  bool category = cfg.category;
  auto cats = doc_categories(docs, category);
  auto nm = build_node_matrices(tokens, cats, matrix_params(cfg, category));
  const fs::path dir = stage_dir(cfg, Stage::Matrices);
  write_lines(dir / "vocabulary.txt", nm.vocab.tokens);
  std::vector<std::string> ids;
  for (const auto& d : nm.docs) ids.push_back(d.doc_id);
  write_lines(dir / "documents.txt", ids);
  write_lines(dir / "dropped.txt", nm.dropped);
  write_triplets(dir / "X.tri", nm.X);
  if (nm.S) write_triplets(dir / "S.tri", *nm.S);
  if (nm.C) {
    write_triplets(dir / "C.tri", nm.C->matrix);
    write_lines(dir / "categories.txt", nm.C->labels);
  }
}

void run_hierarchy(const PipelineConfig& cfg) {
  auto docs = read_documents(documents_path(cfg));
  auto tokens = read_tokens(tokens_path(cfg));
  bool category = cfg.category;
  auto cats = doc_categories(docs, category);

  HierarchyParams hp;
  hp.max_depth = cfg.max_depth;
  hp.min_docs = cfg.min_docs;
  hp.expand = cfg.expand;
  hp.matrices = matrix_params(cfg, category);
  hp.keywords = cfg.keywords;

  SplitParams sp;
  sp.chunks = cfg.chunks;
  sp.nmfk = cfg.nmfk;
  sp.nmfk.master_seed = cfg.master_seed;
  sp.nmfk.threads = cfg.threads;
  sp.weights = cfg.weights;

  auto tree = build_topic_tree(tokens, cats, hp, sp, split_cache(cfg));
  if (tree.k == 0) throw InputError("the root node could not be factorized: " + tree.leaf_reason);
  write_topic_tree(tree_path(cfg), tree);
}

void run_annotations(const PipelineConfig& cfg) {
  auto docs = read_documents(documents_path(cfg));
  std::set<std::string> known;
  for (const auto& d : docs) known.insert(d.doc_id);

  std::vector<EntityAnnotation> all;
  if (cfg.annotations) {
    auto load = ingest_annotations(*cfg.annotations);
    if (load.skipped_labels > 0)
      log_warning(std::to_string(load.skipped_labels) +
                  " annotation(s) with labels outside the six kept labels were skipped");
    for (auto& a : load.annotations) {
      if (!known.contains(a.doc_id))
        throw InputError("annotation references unknown document '" + a.doc_id + "'");
      all.push_back(std::move(a));
    }
  }
  if (!cfg.gazetteer.empty()) {
    Gazetteer gz;
    for (const auto& [label, p] : cfg.gazetteer) gz[label] = load_gazetteer_terms(p);
    auto matched = gazetteer_match(docs, gz);
    all.insert(all.end(), matched.begin(), matched.end());
  }
  std::set<std::tuple<std::string, EntityLabel, std::string>> seen;
  std::vector<EntityAnnotation> unique;
  for (auto& a : all)
    if (seen.emplace(a.doc_id, a.label, a.normalized).second) unique.push_back(std::move(a));
  std::sort(unique.begin(), unique.end(), [](const EntityAnnotation& a, const EntityAnnotation& b) {
    return std::tie(a.doc_id, a.label, a.normalized) < std::tie(b.doc_id, b.label, b.normalized);
  });
  auto out = open_out(annotations_path(cfg));
  for (const auto& a : unique)
    out << json{{"doc_id", a.doc_id}, {"label", std::string(to_string(a.label))}, {"text", a.surface}}
               .dump()
        << '\n';
}

void run_graph(const PipelineConfig& cfg) {
  auto docs = read_documents(documents_path(cfg));
  auto tree = read_topic_tree(tree_path(cfg));
  const TopicNode* node = tree.find(cfg.graph_node);
  if (!node) throw InputError("graph.node '" + cfg.graph_node + "' is not in the topic tree");
  if (node->k == 0)
    throw InputError("graph.node '" + cfg.graph_node + "' was not factorized: " + node->leaf_reason);

  std::map<std::string, const DocumentRecord*> by_id;
  for (const auto& d : docs) by_id.emplace(d.doc_id, &d);
  std::vector<DocumentRecord> node_docs;
  std::set<std::string> members;
  for (const auto& id : node->doc_ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw InputError("topic tree references unknown document '" + id + "'");
    node_docs.push_back(*it->second);
    members.insert(id);
  }
  auto load = ingest_annotations(annotations_path(cfg));
  std::vector<EntityAnnotation> kept;
  for (auto& a : load.annotations)
    if (members.contains(a.doc_id)) kept.push_back(std::move(a));
  if (kept.size() < load.annotations.size())
    log_warning(std::to_string(load.annotations.size() - kept.size()) +
                " annotation(s) refer to documents outside graph node '" + cfg.graph_node + "'");

  auto g = assemble_graph(node_docs, *node, kept);
  if (cfg.community_edges) g = add_community_edges(std::move(g), cfg.max_pairs);
  export_graph(g, ExportFormat::Jsonl, graph_path(cfg));
}

void run_export(const PipelineConfig& cfg) {
  auto g = import_jsonl(graph_path(cfg));
  for (auto f : cfg.formats)
    export_graph(g, f, stage_dir(cfg, Stage::Export) / ("graph" + std::string(extension(f))));
}

void run_stage(const PipelineConfig& cfg, Stage s) {
  switch (s) {
    case Stage::Ingest: run_ingest(cfg); break;
    case Stage::Clean: run_clean(cfg); break;
    case Stage::Matrices: run_matrices(cfg); break;
    case Stage::Hierarchy: run_hierarchy(cfg); break;
    case Stage::Annotations: run_annotations(cfg); break;
    case Stage::Graph: run_graph(cfg); break;
    case Stage::Export: run_export(cfg); break;
  }
}

// Throws if a recorded output is missing or no longer matches its digest.
void verify_checkpoint(const PipelineConfig& cfg, const StageRecord& rec) {
  for (const auto& o : rec.outputs) {
    const fs::path p = cfg.output_dir / o.path;
    std::error_code ec;
    const bool present = fs::is_regular_file(p, ec);
    if (!present || sha256_file(p) != o.sha256)
      throw StageError(rec.stage,
                       "stale checkpoint: " + p.string() +
                           (present ? " does not match its recorded digest" : " is missing") +
                           "; rerun with --from " + std::string(to_string(rec.stage)) +
                           " or delete " + cfg.output_dir.string());
  }
}

}  // namespace

Manifest run_pipeline(const PipelineConfig& cfg, const RunOptions& options) {
  validate_config(cfg);
  fs::create_directories(cfg.output_dir);
  const fs::path manifest_path = cfg.output_dir / "manifest.json";
  Manifest previous;
  if (fs::exists(manifest_path)) previous = read_manifest(manifest_path);

  Manifest current;
  bool forced = false;
  for (Stage s : kStages) {
    if (options.from && *options.from == s) forced = true;

    std::string inputs;
    try {
      inputs = config_slice(cfg, s);
    } catch (const std::exception& e) {
      throw StageError(s, e.what());
    }
    for (Stage u : upstream(s)) {
      const StageRecord* ur = current.find(u);
      for (const auto& o : ur->outputs) inputs += "upstream " + o.path + " " + o.sha256 + "\n";
    }
    StageRecord rec;
    rec.stage = s;
    rec.inputs_hash = sha256_hex(inputs);

    const StageRecord* old = previous.find(s);
    if (!forced && old && old->inputs_hash == rec.inputs_hash) {
      verify_checkpoint(cfg, *old);
      rec = *old;
      rec.status = "skipped (checkpoint)";
    } else {
      std::error_code ec;
      fs::remove_all(stage_dir(cfg, s), ec);
      if (s == Stage::Hierarchy && forced) fs::remove_all(split_cache(cfg), ec);
      fs::create_directories(stage_dir(cfg, s));
      const auto t0 = std::chrono::steady_clock::now();
      try {
        run_stage(cfg, s);
      } catch (const StageError&) {
        throw;
      } catch (const std::exception& e) {
        throw StageError(s, e.what());
      }
      rec.wall_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      rec.outputs = hash_outputs(cfg, s);
      rec.status = "ran";
      if (s == Stage::Hierarchy) rec.seed = cfg.master_seed;
    }
    current.stages.push_back(rec);
    write_manifest(manifest_path, current);
    if (options.on_stage) options.on_stage(rec);
  }
  return current;
}

std::vector<DocumentRecord> load_documents(const PipelineConfig& cfg) {
  return read_documents(documents_path(cfg));
}

TopicNode load_tree(const PipelineConfig& cfg) { return read_topic_tree(tree_path(cfg)); }

KnowledgeGraph load_graph(const PipelineConfig& cfg) { return import_jsonl(graph_path(cfg)); }

}  // namespace topickg
