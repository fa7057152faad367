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

#include <charconv>
#include <fstream>
#include <sstream>

#include "topickg/error.hpp"
#include "topickg/hierarchy.hpp"

namespace topickg {

namespace {

namespace fs = std::filesystem;

std::string fmt17(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

// from_chars rather than stod: stod reports subnormal values as out of range.
double parse_real(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InputError("bad number '" + s + "'");
  return v;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw InputError("cannot write " + p.string());
  return out;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw InputError("cannot read " + p.string());
  return in;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ls(line);
  while (std::getline(ls, field, '\t')) out.push_back(field);
  return out;
}

void write_node(const fs::path& dir, const TopicNode& node) {
  fs::create_directories(dir);
  {
    auto out = open_out(dir / "node.tsv");
    out << "node_id\t" << node.node_id << "\ndepth\t" << node.depth << "\ntopic\t" << node.topic
        << "\nk\t" << node.k << "\nleaf_reason\t" << node.leaf_reason << "\nchildren\t";
    for (std::size_t i = 0; i < node.children.size(); ++i)
      out << (i ? " " : "") << node.children[i].topic;
    out << '\n';
  }
  {
    auto out = open_out(dir / "vocabulary.txt");
    for (const auto& t : node.vocabulary) out << t << '\n';
  }
  {
    auto out = open_out(dir / "assignments.tsv");
    for (std::size_t j = 0; j < node.doc_ids.size(); ++j)
      out << node.doc_ids[j] << '\t' << (node.assignment.empty() ? -1 : node.assignment[j]) << '\n';
  }
  {
    auto out = open_out(dir / "dropped.txt");
    for (const auto& d : node.dropped) out << d << '\n';
  }
  if (node.k > 0) {
    write_dense(dir / "W.tri", node.W);
    write_dense(dir / "H.tri", node.H);
    fs::create_directories(dir / "keywords");
    for (std::size_t t = 0; t < node.keywords.size(); ++t) {
      auto out = open_out(dir / "keywords" / ("topic_" + std::to_string(t) + ".tsv"));
      const auto& list = node.keywords[t];
      for (std::size_t r = 0; r < list.size(); ++r)
        out << r + 1 << '\t' << list[r].token << '\t' << fmt17(list[r].weight) << '\t'
            << fmt17(list[r].normalized) << '\n';
    }
  }
  for (const auto& child : node.children) write_node(dir / std::to_string(child.topic), child);
}

TopicNode read_node(const fs::path& dir) {
  TopicNode node;
  std::vector<int> child_topics;
  {
    auto in = open_in(dir / "node.tsv");
    std::string line;
    while (std::getline(in, line)) {
      auto tab = line.find('\t');
      if (tab == std::string::npos) throw InputError("bad line in " + (dir / "node.tsv").string());
      std::string key = line.substr(0, tab), value = line.substr(tab + 1);
      if (key == "node_id") node.node_id = value;
      else if (key == "depth") node.depth = std::stoi(value);
      else if (key == "topic") node.topic = std::stoi(value);
      else if (key == "k") node.k = std::stoi(value);
      else if (key == "leaf_reason") node.leaf_reason = value;
      else if (key == "children") {
        std::istringstream cs(value);
        int t = 0;
        while (cs >> t) child_topics.push_back(t);
      }
    }
  }
  {
    auto in = open_in(dir / "vocabulary.txt");
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) node.vocabulary.push_back(line);
  }
  {
    auto in = open_in(dir / "assignments.tsv");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto f = split_tabs(line);
      if (f.size() != 2) throw InputError("bad assignment line '" + line + "'");
      node.doc_ids.push_back(f[0]);
      if (node.k > 0) node.assignment.push_back(std::stoi(f[1]));
    }
  }
  {
    auto in = open_in(dir / "dropped.txt");
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) node.dropped.push_back(line);
  }
  if (node.k > 0) {
    node.W = read_dense(dir / "W.tri");
    node.H = read_dense(dir / "H.tri");
    node.keywords.resize(static_cast<std::size_t>(node.k));
    for (int t = 0; t < node.k; ++t) {
      auto in = open_in(dir / "keywords" / ("topic_" + std::to_string(t) + ".tsv"));
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_tabs(line);
        if (f.size() != 4) throw InputError("bad keyword line '" + line + "'");
        node.keywords[static_cast<std::size_t>(t)].push_back({f[1], parse_real(f[2]), parse_real(f[3])});
      }
    }
  }
  for (int t : child_topics) node.children.push_back(read_node(dir / std::to_string(t)));
  return node;
}

}  // namespace

void write_topic_tree(const std::filesystem::path& dir, const TopicNode& root) {
  write_node(dir / root.node_id, root);
}

TopicNode read_topic_tree(const std::filesystem::path& dir) { return read_node(dir / "root"); }

}  // namespace topickg
