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

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "doctest.h"
#include "support.hpp"
#include "topickg/error.hpp"
#include "topickg/hash.hpp"
#include "topickg/pipeline.hpp"

using namespace topickg;

namespace {

std::string small_config(const std::filesystem::path& out, int threads = 1) {
  const auto data = std::filesystem::path(TOPICKG_TEST_DATA);
  std::ostringstream y;
  y << "corpus:\n  path: " << (data / "corpus20.jsonl").string() << "\n"
    << "cleaning:\n  stopwords: " << (data / "stopwords.txt").string() << "\n"
    << "  lemma_map: " << (data / "lemmas.tsv").string() << "\n"
    << "  stop_phrases: [\"All rights reserved.\"]\n"
    << "vocabulary:\n  min_df: 2\n  max_df_fraction: 0.8\n"
    << "cooccurrence:\n  window: 10\n  shift: 1\n"
    << "split:\n  chunks: 2\n"
    << "nmfk:\n  k_min: 1\n  k_max: 4\n  perturbations: 3\n  max_iter: 300\n"
    << "hierarchy:\n  max_depth: 1\n  min_docs: 5\n  keywords: 8\n"
    << "entities:\n  gazetteer:\n    Organization: " << (data / "gazetteer/organization.txt").string()
    << "\n    Product: " << (data / "gazetteer/product.txt").string() << "\n"
    << "export:\n  formats: [jsonl, graphml, cypher]\n"
    << "output_dir: " << out.string() << "\n"
    << "master_seed: 7\n"
    << "threads: " << threads << "\n";
  return y.str();
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("parse_config: values, defaults and relative paths") {
  auto cfg = parse_config("corpus:\n  path: c.jsonl\nsplit:\n  chunks: 3\nmaster_seed: 9\n"
                          "hierarchy:\n  expand:\n    root: [0, 2]\n",
                          "/base");
  CHECK(cfg.corpus == std::filesystem::path("/base/c.jsonl"));
  CHECK(cfg.chunks == 3);
  CHECK(cfg.master_seed == 9);
  CHECK(cfg.nmfk.master_seed == 9);
  CHECK(cfg.output_dir == std::filesystem::path("/base/out"));
  CHECK_FALSE(cfg.expand.all);
  CHECK(cfg.expand.expands("root", 2));
  CHECK_FALSE(cfg.expand.expands("root", 1));
  CHECK(cfg.formats == std::vector<ExportFormat>{ExportFormat::Jsonl});
}

TEST_CASE("parse_config: rejections") {
  CHECK_THROWS_AS(parse_config("corpus:\n  path: c\n  colour: red\n", "/"), ValidationError);
  CHECK_THROWS_AS(parse_config("bogus: 1\n", "/"), ValidationError);
  CHECK_THROWS_AS(parse_config("export:\n  formats: [csv]\n", "/"), ValidationError);
  CHECK_THROWS_AS(parse_config("split:\n  chunks: many\n", "/"), ValidationError);
  CHECK_THROWS_AS(parse_config("entities:\n  gazetteer:\n    Date: x.txt\n", "/"), ValidationError);
}

TEST_CASE("validate_config: ranges and missing files before any stage runs") {
  testing::TempDir dir("cfg");
  auto cfg = parse_config(small_config(dir.path() / "out"), dir.path());
  validate_config(cfg);

  auto bad = cfg;
  bad.corpus = dir.path() / "nope.jsonl";
  CHECK_THROWS_AS(validate_config(bad), ValidationError);
  CHECK_THROWS_AS(run_pipeline(bad), ValidationError);
  CHECK_FALSE(std::filesystem::exists(dir.path() / "out"));

  bad = cfg;
  bad.cooccurrence.shift = 0.5;
  CHECK_THROWS_AS(validate_config(bad), ValidationError);
  bad = cfg;
  bad.chunks = 0;
  CHECK_THROWS_AS(validate_config(bad), ValidationError);
  bad = cfg;
  bad.nmfk.k_range = {3, 2};
  CHECK_THROWS_AS(validate_config(bad), ValidationError);
  bad = cfg;
  bad.max_df_fraction = 1.5;
  CHECK_THROWS_AS(validate_config(bad), ValidationError);
}

TEST_CASE("shipped sample configuration is valid") {
  auto cfg = load_config(std::filesystem::path(TOPICKG_CONFIG_DIR) / "sample.yaml");
  validate_config(cfg);
  CHECK(cfg.corpus.filename() == "corpus20.jsonl");
  CHECK(cfg.gazetteer.size() == 3);
  CHECK(cfg.formats.size() == 3);
}

TEST_CASE("manifest files round trip") {
  testing::TempDir dir("manifest");
  Manifest m;
  StageRecord r;
  r.stage = Stage::Hierarchy;
  r.status = "ran";
  r.inputs_hash = "abc";
  r.outputs = {{"hierarchy/x", "00"}};
  r.wall_time_s = 1.25;
  r.seed = 42;
  m.stages.push_back(r);
  write_manifest(dir.path() / "m.json", m);
  auto back = read_manifest(dir.path() / "m.json");
  REQUIRE(back.stages.size() == 1);
  CHECK(back.stages[0].stage == Stage::Hierarchy);
  CHECK(back.stages[0].outputs == r.outputs);
  CHECK(back.stages[0].seed == 42);
  CHECK(back.find(Stage::Ingest) == nullptr);
  CHECK(parse_stage("annotations") == Stage::Annotations);
  CHECK_FALSE(parse_stage("nope").has_value());
}

TEST_CASE("run_pipeline: full run, checkpoint skip, --from and stale outputs") {
  testing::TempDir dir("pipe");
  auto cfg = parse_config(small_config(dir.path() / "out"), dir.path());

  auto first = run_pipeline(cfg);
  REQUIRE(first.stages.size() == 7);
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(first.stages[i].stage == kStages[i]);
    CHECK(first.stages[i].status == "ran");
    for (const auto& o : first.stages[i].outputs)
      CHECK(sha256_file(cfg.output_dir / o.path) == o.sha256);
  }
  CHECK(first.find(Stage::Hierarchy)->seed == 7);
  const auto& on_disk = read_manifest(cfg.output_dir / "manifest.json");
  CHECK(on_disk.stages.size() == 7);
  for (const char* ext : {".jsonl", ".graphml", ".cypher"})
    CHECK(std::filesystem::exists(cfg.output_dir / "export" / (std::string("graph") + ext)));

  auto g = load_graph(cfg);
  CHECK_FALSE(g.empty());
  g.validate();
  CHECK(load_documents(cfg).size() == 20);

  const auto export_bytes = read_file(cfg.output_dir / "export/graph.jsonl");
  std::vector<std::string> seen;
  RunOptions opts;
  opts.on_stage = [&](const StageRecord& r) { seen.push_back(r.status); };
  auto second = run_pipeline(cfg, opts);
  CHECK(seen == std::vector<std::string>(7, "skipped (checkpoint)"));
  for (std::size_t i = 0; i < 7; ++i) CHECK(second.stages[i].outputs == first.stages[i].outputs);

  // A threads override leaves every checkpoint valid.
  auto more = cfg;
  more.threads = 3;
  more.nmfk.threads = 3;
  for (const auto& r : run_pipeline(more).stages) CHECK(r.status == "skipped (checkpoint)");

  RunOptions from;
  from.from = Stage::Graph;
  auto third = run_pipeline(cfg, from);
  for (std::size_t i = 0; i < 7; ++i)
    CHECK(third.stages[i].status == (i >= 5 ? "ran" : "skipped (checkpoint)"));
  CHECK(read_file(cfg.output_dir / "export/graph.jsonl") == export_bytes);

  // Changing a graph-only setting reruns graph and export only.
  auto nocomm = cfg;
  nocomm.community_edges = false;
  auto fourth = run_pipeline(nocomm);
  for (std::size_t i = 0; i < 5; ++i) CHECK(fourth.stages[i].status == "skipped (checkpoint)");
  CHECK(fourth.stages[5].status == "ran");

  std::ofstream(cfg.output_dir / "clean/tokens.jsonl", std::ios::app) << "tampered\n";
  try {
    run_pipeline(cfg);
    FAIL("expected a stale checkpoint error");
  } catch (const StageError& e) {
    CHECK(e.stage() == Stage::Clean);
    const std::string msg = e.what();
    CHECK(msg.find("stale") != std::string::npos);
    CHECK(msg.find("--from") != std::string::npos);
  }
  from.from = Stage::Clean;
  auto fifth = run_pipeline(cfg, from);
  CHECK(fifth.stages[1].status == "ran");
  CHECK(fifth.stages[1].outputs == first.stages[1].outputs);
}

TEST_CASE("run_pipeline: unknown graph node is a stage error") {
  testing::TempDir dir("pipe-node");
  auto cfg = parse_config(small_config(dir.path() / "out"), dir.path());
  cfg.graph_node = "root/42";
  try {
    run_pipeline(cfg);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage() == Stage::Graph);
  }
  auto m = read_manifest(cfg.output_dir / "manifest.json");
  CHECK(m.stages.size() == 5);
}

#ifdef TOPICKG_CLI
TEST_CASE("command line exit codes") {
  testing::TempDir dir("cli");
  const auto cfg_path = dir.path() / "config.yaml";
  std::ofstream(cfg_path) << small_config(dir.path() / "out");
  const std::string cli = TOPICKG_CLI;
  const std::string quiet = " > " + (dir.path() / "log.txt").string() + " 2>&1";
  auto rc = [&](const std::string& args) {
    const int status = std::system((cli + " " + args + quiet).c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  CHECK(rc("validate -c " + cfg_path.string()) == 0);
  CHECK(rc("validate -c " + (dir.path() / "missing.yaml").string()) == 1);
  CHECK(rc("frobnicate") == 1);

  std::ofstream(dir.path() / "bad.yaml") << "corpus:\n  path: nowhere.jsonl\n";
  CHECK(rc("run -c " + (dir.path() / "bad.yaml").string()) == 1);

  CHECK(rc("run -c " + cfg_path.string() + " -j 2") == 0);
  CHECK(rc("stats -c " + cfg_path.string()) == 0);
  CHECK(rc("export -c " + cfg_path.string() + " -f graphml -o " + (dir.path() / "ex").string()) == 0);
  CHECK(std::filesystem::exists(dir.path() / "ex/graph.graphml"));
  CHECK(rc("run -c " + cfg_path.string() + " --from nowhere") == 1);

  std::ofstream(dir.path() / "out/graph/graph.jsonl", std::ios::app) << "x\n";
  CHECK(rc("run -c " + cfg_path.string()) == 2);
}
#endif
