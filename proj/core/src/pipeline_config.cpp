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

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "topickg/pipeline.hpp"

namespace topickg {

namespace {

namespace fs = std::filesystem;

void check_keys(const YAML::Node& node, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) throw ValidationError(where + ": expected a mapping");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    auto key = kv.first.as<std::string>();
    if (!ok.contains(key)) throw ValidationError("unknown config key '" + where + key + "'");
  }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out, const std::string& where) {
  if (!node[key]) return;
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception&) {
    throw ValidationError("config key '" + where + key + "' has the wrong type");
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

void read_path(const YAML::Node& node, const char* key, std::optional<fs::path>& out,
               const fs::path& base, const std::string& where) {
  std::string s;
  read(node, key, s, where);
  if (!s.empty()) out = resolve(base, s);
}

}  // namespace

PipelineConfig parse_config(std::string_view yaml, const fs::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml));
  } catch (const YAML::Exception& e) {
    throw ValidationError(std::string("config is not valid YAML: ") + e.what());
  }
  PipelineConfig cfg;
  if (root.IsNull()) throw ValidationError("config is empty");
  check_keys(root, "", {"corpus", "cleaning", "vocabulary", "cooccurrence", "split", "nmfk",
                        "hierarchy", "entities", "graph", "export", "output_dir", "master_seed",
                        "threads"});

  if (auto c = root["corpus"]) {
    check_keys(c, "corpus.", {"path", "fields"});
    std::string p;
    read(c, "path", p, "corpus.");
    if (!p.empty()) cfg.corpus = resolve(base_dir, p);
    if (auto f = c["fields"]) {
      check_keys(f, "corpus.fields.", {"id", "title", "body", "authors", "categories",
                                       "primary_category", "year", "doi"});
      const std::string w = "corpus.fields.";
      read(f, "id", cfg.fields.id, w);
      read(f, "title", cfg.fields.title, w);
      read(f, "body", cfg.fields.body, w);
      read(f, "authors", cfg.fields.authors, w);
      read(f, "categories", cfg.fields.categories, w);
      read(f, "primary_category", cfg.fields.primary_category, w);
      read(f, "year", cfg.fields.year, w);
      read(f, "doi", cfg.fields.doi, w);
    }
  }
  if (auto c = root["cleaning"]) {
    const std::string w = "cleaning.";
    check_keys(c, w, {"stopwords", "lemma_map", "stop_phrases", "min_tokens", "join_hyphens",
                      "lowercase", "strip_non_ascii"});
    read_path(c, "stopwords", cfg.stopwords, base_dir, w);
    read_path(c, "lemma_map", cfg.lemma_map, base_dir, w);
    read(c, "stop_phrases", cfg.stop_phrases, w);
    read(c, "min_tokens", cfg.min_tokens, w);
    read(c, "join_hyphens", cfg.join_hyphens, w);
    read(c, "lowercase", cfg.lowercase, w);
    read(c, "strip_non_ascii", cfg.strip_non_ascii, w);
  }
  if (auto v = root["vocabulary"]) {
    const std::string w = "vocabulary.";
    check_keys(v, w, {"min_df", "min_df_fraction", "max_df_fraction"});
    read(v, "min_df", cfg.min_df, w);
    read(v, "min_df_fraction", cfg.min_df_fraction, w);
    read(v, "max_df_fraction", cfg.max_df_fraction, w);
  }
  if (auto c = root["cooccurrence"]) {
    const std::string w = "cooccurrence.";
    check_keys(c, w, {"window", "shift"});
    read(c, "window", cfg.cooccurrence.window, w);
    read(c, "shift", cfg.cooccurrence.shift, w);
  }
  if (auto s = root["split"]) {
    const std::string w = "split.";
    check_keys(s, w, {"chunks", "semantic", "category", "semantic_weight", "category_weight"});
    read(s, "chunks", cfg.chunks, w);
    read(s, "semantic", cfg.semantic, w);
    read(s, "category", cfg.category, w);
    read(s, "semantic_weight", cfg.weights.semantic, w);
    read(s, "category_weight", cfg.weights.category, w);
  }
  if (auto n = root["nmfk"]) {
    const std::string w = "nmfk.";
    check_keys(n, w, {"k_min", "k_max", "perturbations", "perturb_epsilon",
                      "silhouette_threshold", "max_iter", "tol"});
    read(n, "k_min", cfg.nmfk.k_range.lo, w);
    read(n, "k_max", cfg.nmfk.k_range.hi, w);
    read(n, "perturbations", cfg.nmfk.n_perturbs, w);
    read(n, "perturb_epsilon", cfg.nmfk.perturb_epsilon, w);
    read(n, "silhouette_threshold", cfg.nmfk.silhouette_threshold, w);
    read(n, "max_iter", cfg.nmfk.nmf_params.max_iter, w);
    read(n, "tol", cfg.nmfk.nmf_params.tol, w);
  }
  if (auto h = root["hierarchy"]) {
    const std::string w = "hierarchy.";
    check_keys(h, w, {"max_depth", "min_docs", "keywords", "expand"});
    read(h, "max_depth", cfg.max_depth, w);
    read(h, "min_docs", cfg.min_docs, w);
    read(h, "keywords", cfg.keywords, w);
    if (auto e = h["expand"]) {
      if (e.IsScalar()) {
        auto s = e.as<std::string>();
        if (s == "all") cfg.expand.all = true;
        else if (s == "none") {
          cfg.expand.all = false;
          cfg.expand.selected.clear();
        } else {
          throw ValidationError("hierarchy.expand must be 'all', 'none' or a node map");
        }
      } else if (e.IsMap()) {
        cfg.expand.all = false;
        for (const auto& kv : e) {
          try {
            cfg.expand.selected[kv.first.as<std::string>()] = kv.second.as<std::vector<int>>();
          } catch (const YAML::Exception&) {
            throw ValidationError("hierarchy.expand entries must be lists of topic indices");
          }
        }
      } else {
        throw ValidationError("hierarchy.expand must be 'all', 'none' or a node map");
      }
    }
  }
  if (auto e = root["entities"]) {
    const std::string w = "entities.";
    check_keys(e, w, {"annotations", "gazetteer"});
    read_path(e, "annotations", cfg.annotations, base_dir, w);
    if (auto g = e["gazetteer"]) {
      if (!g.IsMap()) throw ValidationError("entities.gazetteer must map labels to term files");
      for (const auto& kv : g) {
        auto name = kv.first.as<std::string>();
        auto label = parse_entity_label(name);
        if (!label) throw ValidationError("entities.gazetteer: unknown entity label '" + name + "'");
        cfg.gazetteer[*label] = resolve(base_dir, kv.second.as<std::string>());
      }
    }
  }
  if (auto g = root["graph"]) {
    const std::string w = "graph.";
    check_keys(g, w, {"node", "community_edges", "max_pairs"});
    read(g, "node", cfg.graph_node, w);
    read(g, "community_edges", cfg.community_edges, w);
    read(g, "max_pairs", cfg.max_pairs, w);
  }
  if (auto x = root["export"]) {
    check_keys(x, "export.", {"formats"});
    std::vector<std::string> names;
    read(x, "formats", names, "export.");
    if (x["formats"]) {
      cfg.formats.clear();
      for (const auto& n : names) {
        auto f = parse_export_format(n);
        if (!f) throw ValidationError("unknown export format '" + n + "'");
        if (std::find(cfg.formats.begin(), cfg.formats.end(), *f) == cfg.formats.end())
          cfg.formats.push_back(*f);
      }
    }
  }
  std::string out;
  read(root, "output_dir", out, "");
  if (!out.empty()) cfg.output_dir = resolve(base_dir, out);
  else cfg.output_dir = resolve(base_dir, cfg.output_dir.string());
  read(root, "master_seed", cfg.master_seed, "");
  read(root, "threads", cfg.threads, "");
  cfg.nmfk.master_seed = cfg.master_seed;
  cfg.nmfk.threads = cfg.threads;
  return cfg;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), fs::absolute(path).parent_path());
}

void validate_config(const PipelineConfig& cfg) {
  auto require_file = [](const fs::path& p, const std::string& what) {
    std::error_code ec;
    if (!fs::is_regular_file(p, ec)) throw ValidationError(what + " not found: " + p.string());
  };
  if (cfg.corpus.empty()) throw ValidationError("corpus.path is required");
  require_file(cfg.corpus, "corpus");
  if (cfg.stopwords) require_file(*cfg.stopwords, "stopword list");
  if (cfg.lemma_map) require_file(*cfg.lemma_map, "lemma map");
  if (cfg.annotations) require_file(*cfg.annotations, "annotation file");
  for (const auto& [label, p] : cfg.gazetteer)
    require_file(p, std::string(to_string(label)) + " gazetteer");

  if (cfg.min_df < 1) throw ValidationError("vocabulary.min_df must be >= 1");
  if (!(cfg.min_df_fraction >= 0.0 && cfg.min_df_fraction <= 1.0))
    throw ValidationError("vocabulary.min_df_fraction must lie in [0, 1]");
  if (!(cfg.max_df_fraction > 0.0 && cfg.max_df_fraction <= 1.0))
    throw ValidationError("vocabulary.max_df_fraction must lie in (0, 1]");
  if (cfg.cooccurrence.window < 1) throw ValidationError("cooccurrence.window must be >= 1");
  if (!(cfg.cooccurrence.shift >= 1.0)) throw ValidationError("cooccurrence.shift must be >= 1");
  if (cfg.chunks < 1) throw ValidationError("split.chunks must be >= 1");
  if (!(cfg.weights.semantic >= 0.0) || !(cfg.weights.category >= 0.0))
    throw ValidationError("split weights must be >= 0");
  if (cfg.max_depth < 0) throw ValidationError("hierarchy.max_depth must be >= 0");
  if (cfg.min_docs < 1) throw ValidationError("hierarchy.min_docs must be >= 1");
  if (cfg.keywords < 1) throw ValidationError("hierarchy.keywords must be >= 1");
  if (cfg.threads < 1) throw ValidationError("threads must be >= 1");
  if (cfg.max_pairs < 1) throw ValidationError("graph.max_pairs must be >= 1");
  if (cfg.formats.empty()) throw ValidationError("export.formats must not be empty");
  if (cfg.graph_node.empty()) throw ValidationError("graph.node must not be empty");
  try {
    cfg.nmfk.validate();
  } catch (const Error& e) {
    throw ValidationError(std::string("nmfk: ") + e.what());
  }
}

}  // namespace topickg
