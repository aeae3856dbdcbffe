// Copyright 2026 The pasalign Authors
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

// File formats.
//
// Encoded corpus (one JSON object per line):
//   {"id", "text", "words", "word_to_subtokens": [[b, e], ...],
//    "embedding_dim", "token_embeddings": [[d numbers], ...],
//    "sentence_embedding": [d numbers] (optional),
//    "srl_frames": [{"predicate_word", "arguments": [{"role", "start_word", "end_word"}]}]}
// Phrase store (one JSON object per line): {"phrase", "embedding"}
// Blank lines and lines starting with '#' are skipped in both.
//
// Dataset pair files are tab separated; see PairPreset.
// Score files: pair_id TAB score(%.9g) TAB mode.

#pragma once

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pasalign/calibration.hpp"
#include "pasalign/error.hpp"
#include "pasalign/similarity.hpp"
#include "pasalign/spans.hpp"

namespace pasalign {

namespace detail {

inline std::string location(const std::string& path, std::size_t line) {
  return path + ":" + std::to_string(line);
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return in;
}

inline bool skippable(const std::string& line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string::npos || line[first] == '#';
}

inline void chomp(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

// Typed field access with errors naming file, line and field.
class FieldReader {
 public:
  FieldReader(const nlohmann::json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) fail("", "expected a JSON object");
  }

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw ValidationError(where_ + (field.empty() ? "" : ": field '" + field + "'") + ": " + what);
  }

  bool has(const char* key) const { return obj_.contains(key) && !obj_.at(key).is_null(); }

  const nlohmann::json& get(const char* key) const {
    if (!obj_.contains(key)) fail(key, "missing");
    return obj_.at(key);
  }

  std::string string(const char* key) const {
    const auto& v = get(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  std::size_t index(const nlohmann::json& v, const std::string& field) const {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      fail(field, "expected a non-negative integer");
    }
    return v.get<std::size_t>();
  }

  std::size_t index(const char* key) const { return index(get(key), key); }

  std::vector<double> vector(const nlohmann::json& v, const std::string& field) const {
    if (!v.is_array()) fail(field, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) {
      if (!x.is_number()) fail(field, "expected an array of numbers");
      const double d = x.get<double>();
      if (!std::isfinite(d)) fail(field, "non-finite number");
      out.push_back(d);
    }
    return out;
  }

  std::vector<double> vector(const char* key) const { return vector(get(key), key); }

  const std::string& where() const noexcept { return where_; }

 private:
  const nlohmann::json& obj_;
  std::string where_;
};

inline nlohmann::json parse_line(const std::string& line, const std::string& where) {
  try {
    return nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(where + ": malformed JSON: " + e.what());
  }
}

}  // namespace detail

/// Parses one corpus line; throws ValidationError prefixed with `where`.
inline EncodedSentence parse_encoded_sentence(const nlohmann::json& obj, const std::string& where) {
  detail::FieldReader f(obj, where);
  EncodedSentence s;
  auto& r = s.record;
  r.id = f.string("id");
  r.text = f.string("text");

  const auto& words = f.get("words");
  if (!words.is_array()) f.fail("words", "expected an array of strings");
  for (const auto& w : words) {
    if (!w.is_string()) f.fail("words", "expected an array of strings");
    r.words.push_back(w.get<std::string>());
  }

  const auto& ranges = f.get("word_to_subtokens");
  if (!ranges.is_array()) f.fail("word_to_subtokens", "expected an array of [begin, end] pairs");
  for (const auto& range : ranges) {
    if (!range.is_array() || range.size() != 2) {
      f.fail("word_to_subtokens", "expected an array of [begin, end] pairs");
    }
    r.word_to_subtokens.push_back(
        {f.index(range[0], "word_to_subtokens"), f.index(range[1], "word_to_subtokens")});
  }

  r.embedding_dim = f.index("embedding_dim");
  if (r.embedding_dim == 0) f.fail("embedding_dim", "must be positive");

  const auto& tokens = f.get("token_embeddings");
  if (!tokens.is_array() || tokens.empty()) {
    f.fail("token_embeddings", "expected a non-empty array of vectors");
  }
  std::vector<double> flat;
  flat.reserve(tokens.size() * r.embedding_dim);
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    auto row = f.vector(tokens[t], "token_embeddings");
    if (row.size() != r.embedding_dim) {
      f.fail("token_embeddings", "vector " + std::to_string(t) + " has dimension " +
                                     std::to_string(row.size()) + ", embedding_dim is " +
                                     std::to_string(r.embedding_dim));
    }
    flat.insert(flat.end(), row.begin(), row.end());
  }
  s.tokens = TokenEmbeddings(r.embedding_dim, std::move(flat));
  r.token_count = s.tokens.size();

  if (f.has("sentence_embedding")) {
    s.sentence_embedding = f.vector("sentence_embedding");
    if (s.sentence_embedding->size() != r.embedding_dim) {
      f.fail("sentence_embedding", "dimension " + std::to_string(s.sentence_embedding->size()) +
                                       " does not match embedding_dim " +
                                       std::to_string(r.embedding_dim));
    }
    r.has_sentence_embedding = true;
  }

  const auto& frames = f.get("srl_frames");
  if (!frames.is_array()) f.fail("srl_frames", "expected an array");
  for (const auto& fr : frames) {
    detail::FieldReader ff(fr, where + ": srl_frames");
    SRLFrame frame;
    frame.predicate_word = ff.index("predicate_word");
    const auto& args = ff.get("arguments");
    if (!args.is_array()) ff.fail("arguments", "expected an array");
    for (const auto& a : args) {
      detail::FieldReader af(a, where + ": srl_frames.arguments");
      frame.arguments.push_back({af.string("role"), af.index("start_word"), af.index("end_word")});
    }
    r.srl_frames.push_back(std::move(frame));
  }

  try {
    validate_encoded(s);
  } catch (const ValidationError& e) {
    throw ValidationError(where + ": " + e.what());
  }
  return s;
}

/// Validated sentences in file order with lookup by id.
class EncodedCorpus {
 public:
  void add(EncodedSentence s, const std::string& where = "") {
    if (!sentences_.empty() && s.record.embedding_dim != dim()) {
      throw ValidationError(where + (where.empty() ? "" : ": ") + "record '" + s.record.id +
                            "' has embedding_dim " + std::to_string(s.record.embedding_dim) +
                            ", corpus dimension is " + std::to_string(dim()));
    }
    if (index_.contains(s.record.id)) {
      throw ValidationError(where + (where.empty() ? "" : ": ") + "duplicate record id '" +
                            s.record.id + "'");
    }
    index_.emplace(s.record.id, sentences_.size());
    sentences_.push_back(std::move(s));
  }

  const EncodedSentence* find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &sentences_[it->second];
  }

  std::size_t size() const noexcept { return sentences_.size(); }
  std::size_t dim() const noexcept {
    return sentences_.empty() ? 0 : sentences_.front().record.embedding_dim;
  }
  const std::vector<EncodedSentence>& sentences() const noexcept { return sentences_; }

 private:
  std::vector<EncodedSentence> sentences_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline EncodedCorpus load_encoded_corpus(const std::string& path) {
  auto in = detail::open_input(path);
  EncodedCorpus corpus;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    detail::chomp(line);
    if (detail::skippable(line)) continue;
    const auto where = detail::location(path, lineno);
    corpus.add(parse_encoded_sentence(detail::parse_line(line, where), where), where);
  }
  if (corpus.size() == 0) throw ValidationError(path + ": no records");
  return corpus;
}

inline nlohmann::ordered_json to_json(const EncodedSentence& s) {
  const auto& r = s.record;
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["text"] = r.text;
  j["words"] = r.words;
  auto ranges = nlohmann::ordered_json::array();
  for (const auto& w : r.word_to_subtokens) ranges.push_back({w.begin, w.end});
  j["word_to_subtokens"] = std::move(ranges);
  j["embedding_dim"] = r.embedding_dim;
  auto tokens = nlohmann::ordered_json::array();
  for (std::size_t t = 0; t < s.tokens.size(); ++t) {
    const auto row = s.tokens[t];
    tokens.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j["token_embeddings"] = std::move(tokens);
  if (s.sentence_embedding) j["sentence_embedding"] = *s.sentence_embedding;
  auto frames = nlohmann::ordered_json::array();
  for (const auto& f : r.srl_frames) {
    nlohmann::ordered_json jf;
    jf["predicate_word"] = f.predicate_word;
    auto args = nlohmann::ordered_json::array();
    for (const auto& a : f.arguments) {
      nlohmann::ordered_json ja;
      ja["role"] = a.role;
      ja["start_word"] = a.start_word;
      ja["end_word"] = a.end_word;
      args.push_back(std::move(ja));
    }
    jf["arguments"] = std::move(args);
    frames.push_back(std::move(jf));
  }
  j["srl_frames"] = std::move(frames);
  return j;
}

inline void write_encoded_corpus(const std::string& path, const EncodedCorpus& corpus) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  for (const auto& s : corpus.sentences()) out << to_json(s).dump() << '\n';
}

inline PhraseStore load_phrase_store(const std::string& path) {
  auto in = detail::open_input(path);
  PhraseStore store;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    detail::chomp(line);
    if (detail::skippable(line)) continue;
    const auto where = detail::location(path, lineno);
    const auto obj = detail::parse_line(line, where);
    detail::FieldReader f(obj, where);
    try {
      store.insert(f.string("phrase"), f.vector("embedding"));
    } catch (const ValidationError& e) {
      if (std::string_view(e.what()).starts_with(where)) throw;
      throw ValidationError(where + ": " + e.what());
    }
  }
  if (store.empty()) throw ValidationError(path + ": no records");
  return store;
}

inline void write_phrase_store(const std::string& path, const PhraseStore& store) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  for (const auto& key : store.keys()) {
    nlohmann::ordered_json j;
    j["phrase"] = key;
    j["embedding"] = *store.find(key);
    out << j.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Dataset pair files

struct DatasetPair {
  std::string pair_id;
  std::string id_a;
  std::string id_b;
  Label gold = Label::negative;
};

struct LoadedPair {
  DatasetPair pair;
  std::string text_a;
  std::string text_b;
  std::string raw_line;
};

struct PairFile {
  std::optional<std::string> header;
  std::vector<LoadedPair> pairs;
  std::size_t discarded = 0;  // rows dropped by the label convention
};

enum class ColumnRole { ignore, pair_id, id_a, id_b, text_a, text_b, label };

/// Column layout and label convention of a dataset file.
///
/// Sentence ids default to "<pair_id>:a" / "<pair_id>:b" when the layout has
/// no id columns; the pair id defaults to the 1-based data row number.
struct PairPreset {
  std::vector<ColumnRole> columns;
  bool header = false;         // first line is a header
  bool header_optional = false;  // treat line 1 as header iff its first field is "id"
  std::vector<std::pair<std::string, Label>> label_map;
  bool annotator_votes = false;  // "(n, 6)" style counts instead of label_map
  bool keep_middle_votes = false;  // 3-of-6 votes kept as negative instead of dropped

  static PairPreset paws() {
    PairPreset p;
    p.columns = {ColumnRole::pair_id, ColumnRole::text_a, ColumnRole::text_b, ColumnRole::label};
    p.header_optional = true;
    p.label_map = {{"1", Label::positive}, {"0", Label::negative}};
    return p;
  }

  static PairPreset msrp() {
    PairPreset p;
    p.columns = {ColumnRole::label, ColumnRole::id_a, ColumnRole::id_b, ColumnRole::text_a,
                 ColumnRole::text_b};
    p.header = true;
    p.label_map = {{"1", Label::positive}, {"0", Label::negative}};
    return p;
  }

  static PairPreset twitterurl(bool keep_middle = false) {
    PairPreset p;
    p.columns = {ColumnRole::text_a, ColumnRole::text_b, ColumnRole::label};
    p.annotator_votes = true;
    p.keep_middle_votes = keep_middle;
    return p;
  }

  /// `columns` is a comma list of id,id1,id2,s1,s2,label,_ ; `labels` is a
  /// comma list of value=pos|neg.
  static PairPreset custom(std::string_view columns, std::string_view labels, bool header) {
    PairPreset p;
    p.header = header;
    auto split = [](std::string_view s) {
      std::vector<std::string> out;
      std::string cur;
      for (char ch : s) {
        if (ch == ',') {
          out.push_back(cur);
          cur.clear();
        } else {
          cur += ch;
        }
      }
      out.push_back(cur);
      return out;
    };
    for (const auto& c : split(columns)) {
      if (c == "id") p.columns.push_back(ColumnRole::pair_id);
      else if (c == "id1") p.columns.push_back(ColumnRole::id_a);
      else if (c == "id2") p.columns.push_back(ColumnRole::id_b);
      else if (c == "s1") p.columns.push_back(ColumnRole::text_a);
      else if (c == "s2") p.columns.push_back(ColumnRole::text_b);
      else if (c == "label") p.columns.push_back(ColumnRole::label);
      else if (c == "_" || c.empty()) p.columns.push_back(ColumnRole::ignore);
      else throw ValidationError("unknown column role '" + c + "'");
    }
    for (const auto& entry : split(labels)) {
      const auto eq = entry.find('=');
      if (eq == std::string::npos) throw ValidationError("label map entry '" + entry + "' lacks '='");
      const auto value = entry.substr(0, eq);
      const auto cls = entry.substr(eq + 1);
      if (cls == "pos" || cls == "positive") p.label_map.emplace_back(value, Label::positive);
      else if (cls == "neg" || cls == "negative") p.label_map.emplace_back(value, Label::negative);
      else throw ValidationError("label map class '" + cls + "' is not pos or neg");
    }
    if (p.label_map.empty()) throw ValidationError("custom preset needs a label map");
    return p;
  }

  static PairPreset named(std::string_view name) {
    if (name == "paws") return paws();
    if (name == "msrp") return msrp();
    if (name == "twitterurl") return twitterurl();
    throw ValidationError("unknown dataset preset '" + std::string(name) + "'");
  }
};

namespace detail {

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

// "(4, 6)" or "4" -> 4
inline std::optional<int> parse_votes(std::string_view s) {
  std::string t = trim(s);
  if (!t.empty() && t.front() == '(') {
    const auto comma = t.find(',');
    if (comma == std::string::npos) return std::nullopt;
    t = trim(std::string_view(t).substr(1, comma - 1));
  }
  if (t.empty()) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (errno != 0 || *end != '\0' || v < 0) return std::nullopt;
  return static_cast<int>(v);
}

}  // namespace detail

/// Loads a tab-separated pair file. Throws ValidationError with the line
/// number on short rows or unparseable labels.
inline PairFile load_pairs(const std::string& path, const PairPreset& preset) {
  auto in = detail::open_input(path);
  PairFile file;
  std::string line;
  std::size_t row = 0;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    detail::chomp(line);
    if (lineno == 1 && preset.header) {
      file.header = line;
      continue;
    }
    if (line.empty()) continue;
    auto fields = detail::split_tabs(line);
    if (lineno == 1 && preset.header_optional && fields.front() == "id") {
      file.header = line;
      continue;
    }
    const auto where = detail::location(path, lineno);
    if (fields.size() < preset.columns.size()) {
      throw ValidationError(where + ": expected " + std::to_string(preset.columns.size()) +
                            " tab-separated fields, found " + std::to_string(fields.size()));
    }
    ++row;
    LoadedPair lp;
    lp.raw_line = line;
    std::optional<Label> label;
    bool discard = false;
    for (std::size_t c = 0; c < preset.columns.size(); ++c) {
      const auto& v = fields[c];
      switch (preset.columns[c]) {
        case ColumnRole::ignore: break;
        case ColumnRole::pair_id: lp.pair.pair_id = v; break;
        case ColumnRole::id_a: lp.pair.id_a = v; break;
        case ColumnRole::id_b: lp.pair.id_b = v; break;
        case ColumnRole::text_a: lp.text_a = v; break;
        case ColumnRole::text_b: lp.text_b = v; break;
        case ColumnRole::label:
          if (preset.annotator_votes) {
            const auto votes = detail::parse_votes(v);
            if (!votes || *votes > 6) {
              throw ValidationError(where + ": unparseable annotator label '" + v + "'");
            }
            if (*votes >= 4) label = Label::positive;
            else if (*votes <= 2 || preset.keep_middle_votes) label = Label::negative;
            else discard = true;
          } else {
            const auto t = detail::trim(v);
            for (const auto& [value, cls] : preset.label_map) {
              if (t == value) label = cls;
            }
            if (!label) throw ValidationError(where + ": unparseable label '" + v + "'");
          }
          break;
      }
    }
    if (discard) {
      ++file.discarded;
      continue;
    }
    if (!label) throw ValidationError(where + ": preset has no label column");
    lp.pair.gold = *label;
    if (lp.pair.pair_id.empty()) {
      lp.pair.pair_id = (!lp.pair.id_a.empty() && !lp.pair.id_b.empty())
                            ? lp.pair.id_a + "_" + lp.pair.id_b
                            : std::to_string(row);
    }
    if (lp.pair.id_a.empty()) lp.pair.id_a = lp.pair.pair_id + ":a";
    if (lp.pair.id_b.empty()) lp.pair.id_b = lp.pair.pair_id + ":b";
    file.pairs.push_back(std::move(lp));
  }
  return file;
}

// ---------------------------------------------------------------------------
// Score files and metric reports

/// printf("%.9g"), the fixed precision of every real in text outputs.
inline std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

struct ScoreLine {
  std::string pair_id;
  double score = 0.0;
  ScoreMode mode = ScoreMode::aligned;
};

inline std::string format_score_line(const ScoreLine& s) {
  return s.pair_id + "\t" + format_real(s.score) + "\t" + std::string(to_string(s.mode)) + "\n";
}

inline void write_scores(std::ostream& out, const std::vector<ScoreLine>& scores) {
  for (const auto& s : scores) out << format_score_line(s);
}

inline std::vector<ScoreLine> load_scores(const std::string& path) {
  auto in = detail::open_input(path);
  std::vector<ScoreLine> out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    detail::chomp(line);
    if (line.empty()) continue;
    const auto where = detail::location(path, lineno);
    const auto fields = detail::split_tabs(line);
    if (fields.size() != 3) throw ValidationError(where + ": expected pair_id, score, mode");
    char* end = nullptr;
    const double score = std::strtod(fields[1].c_str(), &end);
    if (end == fields[1].c_str() || *end != '\0' || !std::isfinite(score)) {
      throw ValidationError(where + ": unparseable score '" + fields[1] + "'");
    }
    const auto mode = parse_mode(fields[2]);
    if (!mode) throw ValidationError(where + ": unknown mode '" + fields[2] + "'");
    out.push_back({fields[0], score, *mode});
  }
  if (out.empty()) throw ValidationError(path + ": no scores");
  return out;
}

/// Attaches gold labels to scores by pair id; every score must resolve.
inline std::vector<LabeledScore> attach_labels(const std::vector<ScoreLine>& scores,
                                               const std::vector<LoadedPair>& pairs) {
  std::unordered_map<std::string, Label> gold;
  for (const auto& p : pairs) gold.emplace(p.pair.pair_id, p.pair.gold);
  std::vector<LabeledScore> out;
  out.reserve(scores.size());
  for (const auto& s : scores) {
    auto it = gold.find(s.pair_id);
    if (it == gold.end()) throw ValidationError("score for unknown pair id '" + s.pair_id + "'");
    out.push_back({s.pair_id, s.score, it->second});
  }
  return out;
}

inline std::string format_report_kv(const MetricReport& r) {
  std::ostringstream out;
  out << "f1_pos\t" << format_real(r.f1_pos) << '\n'
      << "accuracy\t" << format_real(r.accuracy) << '\n'
      << "precision_pos\t" << format_real(r.precision_pos) << '\n'
      << "recall_pos\t" << format_real(r.recall_pos) << '\n'
      << "recall_neg\t" << format_real(r.recall_neg) << '\n'
      << "threshold\t" << format_real(r.threshold) << '\n'
      << "tp\t" << r.counts.tp << '\n'
      << "fp\t" << r.counts.fp << '\n'
      << "tn\t" << r.counts.tn << '\n'
      << "fn\t" << r.counts.fn << '\n';
  return out.str();
}

inline nlohmann::ordered_json report_to_json(const MetricReport& r) {
  nlohmann::ordered_json j;
  j["f1_pos"] = r.f1_pos;
  j["accuracy"] = r.accuracy;
  j["precision_pos"] = r.precision_pos;
  j["recall_pos"] = r.recall_pos;
  j["recall_neg"] = r.recall_neg;
  j["threshold"] = r.threshold;
  j["tp"] = r.counts.tp;
  j["fp"] = r.counts.fp;
  j["tn"] = r.counts.tn;
  j["fn"] = r.counts.fn;
  return j;
}

}  // namespace pasalign
