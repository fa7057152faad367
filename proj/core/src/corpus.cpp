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

#include "topickg/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "topickg/error.hpp"

namespace topickg {

using json = nlohmann::json;

std::optional<std::size_t> Vocabulary::find(const std::string& token) const {
  auto it = index.find(token);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens, std::vector<std::size_t> df) {
  Vocabulary v;
  v.tokens = std::move(tokens);
  v.df = std::move(df);
  v.index.reserve(v.tokens.size());
  for (std::size_t i = 0; i < v.tokens.size(); ++i) v.index.emplace(v.tokens[i], i);
  return v;
}

namespace {

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<std::string> json_string(const json& rec, const std::string& key) {
  if (key.empty()) return std::nullopt;
  auto it = rec.find(key);
  if (it == rec.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  if (it->is_number()) return it->dump();
  return std::nullopt;
}

std::vector<std::string> json_string_list(const json& rec, const std::string& key,
                                          bool comma_split) {
  std::vector<std::string> out;
  auto it = rec.find(key);
  if (it == rec.end() || it->is_null()) return out;
  if (it->is_array()) {
    for (const auto& e : *it)
      if (e.is_string() && !e.get<std::string>().empty()) out.push_back(e.get<std::string>());
    return out;
  }
  if (!it->is_string()) return out;
  std::string s = it->get<std::string>();
  if (comma_split) {
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ',')) {
      auto words = split_whitespace(part);
      std::string joined;
      for (const auto& w : words) joined += (joined.empty() ? "" : " ") + w;
      if (!joined.empty()) out.push_back(joined);
    }
    return out;
  }
  return split_whitespace(s);
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool ieq(char a, char b) {
  return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
}

// Case-insensitive removal of every occurrence of each phrase.
std::string strip_phrases(std::string text, const std::vector<std::string>& phrases) {
  for (const auto& phrase : phrases) {
    if (phrase.empty()) continue;
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
      if (i + phrase.size() <= text.size() &&
          std::equal(phrase.begin(), phrase.end(), text.begin() + static_cast<std::ptrdiff_t>(i), ieq)) {
        out.push_back(' ');
        i += phrase.size();
      } else {
        out.push_back(text[i++]);
      }
    }
    text = std::move(out);
  }
  return text;
}

bool is_email_char(char c) {
  return is_word_char(c) || c == '.' || c == '_' || c == '%' || c == '+' || c == '-';
}

// Removes markup tags, LaTeX command names, e-mail addresses and (optionally)
// non-ASCII bytes; every remaining symbol except '-' becomes a space.
std::string strip_markup_and_symbols(const std::string& text, bool strip_non_ascii) {
  std::string s;
  s.reserve(text.size());
  // Pass 1: tags and e-mail addresses.
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '<') {
      auto close = text.find('>', i + 1);
      if (close != std::string::npos) {
        s.push_back(' ');
        i = close;
        continue;
      }
    }
    if (c == '@') {
      std::size_t left = s.size();
      while (left > 0 && is_email_char(s[left - 1])) --left;
      std::size_t right = i + 1;
      while (right < text.size() && is_email_char(text[right])) ++right;
      std::string_view domain(text.data() + i + 1, right - i - 1);
      if (left < s.size() && domain.find('.') != std::string_view::npos) {
        s.resize(left);
        s.push_back(' ');
        i = right - 1;
        continue;
      }
    }
    s.push_back(c);
  }
  // Pass 2: LaTeX commands, non-ASCII, symbols.
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto u = static_cast<unsigned char>(s[i]);
    if (u >= 0x80) {
      if (!strip_non_ascii) out.push_back(s[i]);
      continue;
    }
    if (s[i] == '\\') {
      std::size_t j = i + 1;
      while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back(' ');
      i = j - 1;
      continue;
    }
    if (is_word_char(s[i]) || s[i] == '-') {
      out.push_back(s[i]);
    } else {
      out.push_back(' ');
    }
  }
  return out;
}

bool token_char(char c) { return is_word_char(c) || static_cast<unsigned char>(c) >= 0x80; }

// Hyphen runs between two word characters are removed; any other hyphen
// becomes a separator.
std::string handle_hyphens(const std::string& s, bool join) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    if (s[i] != '-') {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && s[j] == '-') ++j;
    bool between = i > 0 && token_char(s[i - 1]) && j < s.size() && token_char(s[j]);
    if (!(join && between)) out.push_back(' ');
    i = j;
  }
  return out;
}

}  // namespace

std::vector<DocumentRecord> load_corpus(const std::filesystem::path& path,
                                        const FieldMapping& fields, LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read corpus file: " + path.string());

  std::vector<DocumentRecord> docs;
  std::unordered_map<std::string, std::size_t> seen;  // doc_id -> line number
  LoadReport local;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (split_whitespace(line).empty()) continue;
    ++local.lines;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": malformed record: " +
                       e.what());
    }
    if (!rec.is_object())
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": malformed record: not a JSON object");

    auto id = json_string(rec, fields.id);
    auto body = json_string(rec, fields.body);
    if (!id || id->empty() || !body) {
      ++local.rejected;
      continue;
    }
    if (auto [it, inserted] = seen.emplace(*id, line_no); !inserted) {
      throw InputError(path.string() + ": duplicate doc_id '" + *id + "' on lines " +
                       std::to_string(it->second) + " and " + std::to_string(line_no));
    }

    DocumentRecord d;
    d.doc_id = *id;
    d.body = *body;
    d.title = json_string(rec, fields.title).value_or("");
    d.authors = json_string_list(rec, fields.authors, true);
    d.categories = json_string_list(rec, fields.categories, false);
    if (auto primary = json_string(rec, fields.primary_category); primary && !primary->empty()) {
      d.primary_category = *primary;
      if (std::find(d.categories.begin(), d.categories.end(), *primary) == d.categories.end())
        d.categories.insert(d.categories.begin(), *primary);
    } else if (!d.categories.empty()) {
      d.primary_category = d.categories.front();
    }
    if (auto year = json_string(rec, fields.year)) {
      try {
        d.year = std::stoi(*year);
      } catch (const std::exception&) {
        throw InputError(path.string() + ":" + std::to_string(line_no) + ": malformed year '" +
                         *year + "'");
      }
    }
    if (auto doi = json_string(rec, fields.doi); doi && !doi->empty()) d.doi = *doi;

    const std::string* known[] = {&fields.id,      &fields.title,           &fields.body,
                                  &fields.authors, &fields.categories,      &fields.year,
                                  &fields.doi,     &fields.primary_category};
    for (const auto& [key, value] : rec.items()) {
      bool mapped = std::any_of(std::begin(known), std::end(known),
                                [&](const std::string* k) { return *k == key; });
      if (mapped || value.is_null()) continue;
      d.extra[key] = value.is_string() ? value.get<std::string>() : value.dump();
    }
    docs.push_back(std::move(d));
  }
  if (report) *report = local;
  return docs;
}

std::vector<std::string> clean_text(std::string_view raw, const CleaningConfig& cfg) {
  std::string text = strip_phrases(std::string(raw), cfg.stop_phrases);
  text = strip_markup_and_symbols(text, cfg.strip_non_ascii);
  if (cfg.lowercase) {
    std::transform(text.begin(), text.end(), text.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  }
  text = handle_hyphens(text, cfg.join_hyphens);

  std::vector<std::string> tokens;
  for (auto& tok : split_whitespace(text)) {
    if (cfg.lemma_map) {
      if (auto it = cfg.lemma_map->find(tok); it != cfg.lemma_map->end()) tok = it->second;
    }
    if (tok.size() <= 1 || cfg.stopwords.contains(tok)) continue;
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

std::vector<TokenizedDocument> clean_corpus(std::span<const DocumentRecord> docs,
                                            const CleaningConfig& cfg) {
  std::vector<TokenizedDocument> out;
  out.reserve(docs.size());
  for (const auto& d : docs) {
    std::string text = d.title.empty() ? d.body : d.title + "\n" + d.body;
    out.push_back({d.doc_id, clean_text(text, cfg)});
  }
  return out;
}

VocabularyResult build_vocabulary(std::span<const TokenizedDocument> docs, std::size_t min_df,
                                  double max_df_fraction, std::size_t min_tokens) {
  if (min_df < 1) throw ArgumentError("min_df must be >= 1");
  if (!(max_df_fraction > 0.0 && max_df_fraction <= 1.0))
    throw ArgumentError("max_df_fraction must be in (0, 1]");
  if (docs.empty()) throw ArgumentError("cannot build a vocabulary from zero documents");

  std::map<std::string, std::size_t> df;
  for (const auto& d : docs) {
    std::vector<std::string_view> uniq(d.tokens.begin(), d.tokens.end());
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    for (auto t : uniq) ++df[std::string(t)];
  }

  const double n = static_cast<double>(docs.size());
  const double max_df = max_df_fraction * n * (1.0 + 1e-12);
  std::vector<std::string> kept;
  std::vector<std::size_t> kept_df;
  std::size_t too_rare = 0, too_common = 0;
  for (const auto& [tok, count] : df) {
    if (count < min_df) {
      ++too_rare;
    } else if (static_cast<double>(count) > max_df) {
      ++too_common;
    } else {
      kept.push_back(tok);
      kept_df.push_back(count);
    }
  }
  if (kept.empty()) {
    std::ostringstream msg;
    msg << "vocabulary is empty after df filtering over " << docs.size() << " documents: "
        << df.size() << " candidate tokens, " << too_rare << " below min_df=" << min_df << ", "
        << too_common << " above max_df_fraction=" << max_df_fraction << " of N";
    throw ArgumentError(msg.str());
  }

  VocabularyResult result{Vocabulary::from_tokens(std::move(kept), std::move(kept_df)), {}};
  if (min_tokens > 0) {
    for (std::size_t i = 0; i < docs.size(); ++i) {
      std::size_t n_in = 0;
      for (const auto& t : docs[i].tokens)
        if (result.vocab.index.contains(t)) ++n_in;
      if (n_in < min_tokens) result.excluded.push_back(i);
    }
  }
  return result;
}

TokenizedDocument restrict_to_vocabulary(const TokenizedDocument& doc, const Vocabulary& vocab) {
  TokenizedDocument out{doc.doc_id, {}};
  for (const auto& t : doc.tokens)
    if (vocab.index.contains(t)) out.tokens.push_back(t);
  return out;
}

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read stopword file: " + path.string());
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto parts = split_whitespace(line);
    if (parts.empty() || parts.front().starts_with('#')) continue;
    words.insert(parts.front());
  }
  return words;
}

std::unordered_map<std::string, std::string> load_lemma_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read lemma map: " + path.string());
  std::unordered_map<std::string, std::string> map;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto parts = split_whitespace(line);
    if (parts.empty() || parts.front().starts_with('#')) continue;
    if (parts.size() != 2)
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": expected two columns (surface, lemma)");
    map[parts[0]] = parts[1];
  }
  return map;
}

}  // namespace topickg
