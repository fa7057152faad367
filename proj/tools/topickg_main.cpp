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

// topickg: command-line driver for the corpus-to-graph pipeline.
//
// Exit codes: 0 success, 1 invalid configuration or arguments, 2 a stage or
// command failed.

#include <CLI11.hpp>

#include <iostream>

#include "topickg/pipeline.hpp"

namespace {

using namespace topickg;

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kFailure = 2;

PipelineConfig load_and_validate(const std::string& path, std::optional<int> threads) {
  PipelineConfig cfg = load_config(path);
  if (threads) {
    cfg.threads = *threads;
    cfg.nmfk.threads = *threads;
  }
  validate_config(cfg);
  return cfg;
}

int cmd_run(const PipelineConfig& cfg, const std::string& from) {
  RunOptions opts;
  if (!from.empty()) {
    auto st = parse_stage(from);
    if (!st) {
      std::cerr << "error: unknown stage '" << from << "'\n";
      return kValidation;
    }
    opts.from = st;
  }
  opts.on_stage = [](const StageRecord& r) {
    std::cout << to_string(r.stage) << '\t' << r.status << '\t' << r.wall_time_s << "s\n";
  };
  run_pipeline(cfg, opts);
  std::cout << "manifest: " << (cfg.output_dir / "manifest.json").string() << '\n';
  return kOk;
}

int cmd_export(const PipelineConfig& cfg, const std::vector<std::string>& formats,
               const std::string& out_dir) {
  std::vector<ExportFormat> fs;
  for (const auto& f : formats) {
    auto ef = parse_export_format(f);
    if (!ef) {
      std::cerr << "error: unknown export format '" << f << "'\n";
      return kValidation;
    }
    fs.push_back(*ef);
  }
  if (fs.empty()) fs = cfg.formats;
  const std::filesystem::path dir =
      out_dir.empty() ? cfg.output_dir / "export" : std::filesystem::path(out_dir);
  std::filesystem::create_directories(dir);
  const KnowledgeGraph g = load_graph(cfg);
  for (auto f : fs) {
    auto path = dir / ("graph" + std::string(extension(f)));
    export_graph(g, f, path);
    std::cout << path.string() << '\n';
  }
  return kOk;
}

int cmd_stats(const PipelineConfig& cfg) {
  const KnowledgeGraph g = load_graph(cfg);
  std::cout << "section\tkind\tcount\n";
  for (const auto& [kind, n] : g.stats().nodes) std::cout << "node\t" << to_string(kind) << '\t' << n << '\n';
  for (const auto& [kind, n] : g.stats().edges) std::cout << "edge\t" << to_string(kind) << '\t' << n << '\n';

  const TopicNode tree = load_tree(cfg);
  const TopicNode* node = tree.find(cfg.graph_node);
  if (!node) throw Error("graph.node '" + cfg.graph_node + "' is not in the topic tree");
  const auto docs = load_documents(cfg);
  std::cout << "\nnode\ttopic\tcategory\tdocuments\n";
  for (const auto& [topic, hist] : category_histograms(*node, docs))
    for (const auto& [cat, n] : hist)
      std::cout << node->node_id << '\t' << topic << '\t' << cat << '\t' << n << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build topic hierarchies and knowledge graphs from document corpora"};
  app.require_subcommand(1);

  std::string config;
  std::optional<int> threads;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config, "Pipeline configuration (YAML)")->required();
  };

  auto* validate = app.add_subcommand("validate", "Check a configuration without running it");
  add_common(validate);

  std::string from;
  auto* run = app.add_subcommand("run", "Run the pipeline, resuming from checkpoints");
  add_common(run);
  run->add_option("--from", from, "Recompute this stage and all later ones");
  run->add_option("-j,--threads", threads, "Worker threads (overrides the config)");

  std::vector<std::string> formats;
  std::string out_dir;
  auto* exp = app.add_subcommand("export", "Write the knowledge graph of a finished run");
  add_common(exp);
  exp->add_option("-f,--format", formats, "jsonl, graphml or cypher (repeatable)");
  exp->add_option("-o,--out", out_dir, "Destination directory");

  auto* stats = app.add_subcommand("stats", "Print graph counts and topic category histograms");
  add_common(stats);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  PipelineConfig cfg;
  try {
    cfg = load_and_validate(config, threads);
  } catch (const std::exception& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kValidation;
  }

  try {
    if (*validate) {
      std::cout << "configuration OK\n";
      return kOk;
    }
    if (*run) return cmd_run(cfg, from);
    if (*exp) return cmd_export(cfg, formats, out_dir);
    if (*stats) return cmd_stats(cfg);
  } catch (const ValidationError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
