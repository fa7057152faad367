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

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "topickg/corpus.hpp"
#include "topickg/error.hpp"
#include "topickg/hierarchy.hpp"
#include "topickg/kg.hpp"
#include "topickg/matrices.hpp"
#include "topickg/nmfk.hpp"
#include "topickg/split.hpp"

namespace topickg {

// Everything one run needs. Relative paths are resolved against the
// directory of the config file by load_config.
struct PipelineConfig {
  std::filesystem::path corpus;
  FieldMapping fields;

  std::optional<std::filesystem::path> stopwords;
  std::optional<std::filesystem::path> lemma_map;
  std::vector<std::string> stop_phrases;
  std::size_t min_tokens = 1;
  bool join_hyphens = true;
  bool lowercase = true;
  bool strip_non_ascii = true;

  std::size_t min_df = 2;
  double min_df_fraction = 0.0;
  double max_df_fraction = 0.8;

  CooccurrenceConfig cooccurrence;
  bool semantic = true;
  bool category = true;

  int chunks = 20;
  SideWeights weights;
  NmfkParams nmfk;

  int max_depth = 1;
  std::size_t min_docs = 20;
  ExpandPolicy expand;
  int keywords = 50;

  std::optional<std::filesystem::path> annotations;
  std::map<EntityLabel, std::filesystem::path> gazetteer;

  std::string graph_node = "root";
  bool community_edges = true;
  std::size_t max_pairs = 1'000'000;

  std::vector<ExportFormat> formats{ExportFormat::Jsonl};
  std::filesystem::path output_dir = "out";
  std::uint64_t master_seed = 0;
  int threads = 1;
};

// Rejected configuration: unknown keys, bad values, missing input files.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// YAML document whose keys mirror PipelineConfig. Does not check paths.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(std::string_view yaml, const std::filesystem::path& base_dir);

// Value ranges and the existence of every referenced input file.
void validate_config(const PipelineConfig& cfg);

enum class Stage { Ingest, Clean, Matrices, Hierarchy, Annotations, Graph, Export };
inline constexpr std::array<Stage, 7> kStages{Stage::Ingest,      Stage::Clean, Stage::Matrices,
                                              Stage::Hierarchy,   Stage::Annotations,
                                              Stage::Graph,       Stage::Export};

std::string_view to_string(Stage stage);
std::optional<Stage> parse_stage(std::string_view s);

class StageError : public Error {
 public:
  StageError(Stage stage, const std::string& what)
      : Error("stage " + std::string(to_string(stage)) + " failed: " + what), stage_(stage) {}
  Stage stage() const { return stage_; }

 private:
  Stage stage_;
};

struct OutputRecord {
  std::string path;  // relative to the output directory
  std::string sha256;

  bool operator==(const OutputRecord&) const = default;
};

struct StageRecord {
  Stage stage = Stage::Ingest;
  std::string status;       // "ran" or "skipped (checkpoint)"
  std::string inputs_hash;  // config slice plus upstream output digests
  std::vector<OutputRecord> outputs;
  double wall_time_s = 0.0;
  std::optional<std::uint64_t> seed;
};

struct Manifest {
  std::vector<StageRecord> stages;

  const StageRecord* find(Stage stage) const;
};

void write_manifest(const std::filesystem::path& path, const Manifest& m);
Manifest read_manifest(const std::filesystem::path& path);

struct RunOptions {
  // Recompute this stage and every later one regardless of checkpoints.
  std::optional<Stage> from;
  std::function<void(const StageRecord&)> on_stage;
};

// Runs the seven stages in order under cfg.output_dir. A stage whose recorded
// inputs hash matches and whose outputs still hash to their recorded digests
// is skipped. Outputs that no longer match their digests raise StageError.
Manifest run_pipeline(const PipelineConfig& cfg, const RunOptions& options = {});

// Artifacts of a finished run, read back from cfg.output_dir.
std::vector<DocumentRecord> load_documents(const PipelineConfig& cfg);
TopicNode load_tree(const PipelineConfig& cfg);
KnowledgeGraph load_graph(const PipelineConfig& cfg);

}  // namespace topickg
