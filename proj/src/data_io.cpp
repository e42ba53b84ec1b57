#include "lexfn/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "lexfn/error.hpp"
#include "text_util.hpp"

namespace lexfn {

void EmbeddingTable::insert(std::string key, Vector vector) {
  if (vector.empty()) throw RejectedInput(fmt::format("empty vector for '{}'", key));
  if (!all_finite(vector)) throw RejectedInput(fmt::format("non-finite vector for '{}'", key));
  if (dim_ == 0) dim_ = vector.size();
  if (vector.size() != dim_) {
    throw RejectedInput(
        fmt::format("vector for '{}' has dimension {}, table has {}", key, vector.size(), dim_));
  }
  auto [it, inserted] = entries_.emplace(std::move(key), std::move(vector));
  if (!inserted) throw RejectedInput(fmt::format("duplicate key '{}'", it->first));
}

const Vector* EmbeddingTable::find(std::string_view key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

const Vector& EmbeddingTable::at(std::string_view key) const {
  const Vector* v = find(key);
  if (v == nullptr) throw MissingWord(std::string(key), "no vector");
  return *v;
}

EmbeddingTable load_embeddings(const std::string& path) {
  auto in = text::open_input(path);
  EmbeddingTable table;
  std::string line;
  std::size_t lineno = 0;
  std::map<std::string, std::size_t> first_seen;
  while (std::getline(in, line)) {
    ++lineno;
    auto view = text::strip_cr(line);
    if (view.empty()) continue;
    auto fields = text::split_ws(view);
    if (fields.size() < 2) throw ParseError(path, lineno, "expected a key and at least one value");
    std::string key(fields[0]);
    if (key.empty()) throw ParseError(path, lineno, "empty key");
    Vector v;
    v.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      auto x = text::parse_double(fields[i]);
      if (!x || !std::isfinite(*x)) {
        throw ParseError(path, lineno, fmt::format("invalid value '{}'", fields[i]));
      }
      v.push_back(*x);
    }
    if (table.dim() != 0 && v.size() != table.dim()) {
      throw FormatError(fmt::format("{}:{}: vector for '{}' has dimension {}, expected {}", path,
                                    lineno, key, v.size(), table.dim()));
    }
    if (auto it = first_seen.find(key); it != first_seen.end()) {
      throw ParseError(path, lineno,
                       fmt::format("duplicate key '{}' (first on line {})", key, it->second));
    }
    first_seen.emplace(key, lineno);
    table.insert(std::move(key), std::move(v));
  }
  if (table.empty()) throw FormatError(fmt::format("{}: no vectors, dimension undeterminable", path));
  return table;
}

std::string format_embeddings(const EmbeddingTable& table) {
  std::string out;
  for (const auto& [key, v] : table.entries()) {
    out += key;
    for (double x : v) out += fmt::format(" {}", x);
    out += '\n';
  }
  return out;
}

void save_embeddings(const EmbeddingTable& table, const std::string& path) {
  text::write_file(path, format_embeddings(table));
}

std::string normalize_key(std::string_view key) {
  std::string out;
  bool pending_sep = false;
  for (char c : key) {
    if (c == ' ' || c == '\t' || c == '_') {
      pending_sep = !out.empty();
      continue;
    }
    if (pending_sep) out += '_';
    pending_sep = false;
    out += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  }
  return out;
}

CorpusCounts load_counts(const std::string& path) {
  auto in = text::open_input(path);
  CorpusCounts counts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto view = text::strip_cr(line);
    if (view.empty()) continue;
    auto fields = text::split(view, '\t');
    if (fields.size() != 2) throw ParseError(path, lineno, "expected key<TAB>count");
    auto c = text::parse_count(fields[1]);
    if (!c) throw ParseError(path, lineno, fmt::format("invalid count '{}'", fields[1]));
    counts[std::string(fields[0])] = *c;
  }
  return counts;
}

namespace {

bool tuple_order(const TrainingTuple& a, const TrainingTuple& b) {
  if (a.occurrence_count != b.occurrence_count) return a.occurrence_count > b.occurrence_count;
  if (a.holistic_key != b.holistic_key) return a.holistic_key < b.holistic_key;
  return a.args < b.args;
}

}  // namespace

TuplesByWord filter_tuples(const TuplesByWord& tuples, const CorpusCounts& counts,
                           const TupleFilter& filter, std::vector<std::string>* warnings) {
  TuplesByWord out;
  for (const auto& [head, list] : tuples) {
    std::vector<TrainingTuple> kept;
    for (const auto& t : list) {
      if (t.occurrence_count < filter.p_min) continue;
      bool ok = true;
      for (const auto& noun : t.args) {
        auto it = counts.find(noun);
        if (it == counts.end()) {
          if (warnings) {
            warnings->push_back(fmt::format("noun '{}' has no corpus count; dropping tuple '{}'",
                                            noun, t.holistic_key));
          }
          ok = false;
          break;
        }
        if (it->second < filter.q_min) {
          ok = false;
          break;
        }
      }
      if (ok) kept.push_back(t);
    }
    std::sort(kept.begin(), kept.end(), tuple_order);
    if (kept.size() > filter.cap) kept.resize(filter.cap);
    if (!kept.empty()) out.emplace(head, std::move(kept));
  }
  return out;
}

TuplesByWord load_tuples(const std::string& path, WordKind kind, const CorpusCounts& counts,
                         const TupleFilter& filter, const EmbeddingTable* holistic,
                         std::vector<std::string>* warnings) {
  auto in = text::open_input(path);
  const std::size_t expected = kind == WordKind::adjective ? 4 : 5;
  TuplesByWord parsed;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto view = text::strip_cr(line);
    if (view.empty()) continue;
    auto fields = text::split(view, '\t');
    if (fields.size() != expected) {
      throw ParseError(path, lineno,
                       fmt::format("expected {} tab-separated fields, found {}", expected, fields.size()));
    }
    for (auto f : fields) {
      if (f.empty()) throw ParseError(path, lineno, "empty field");
    }
    TrainingTuple t;
    if (kind == WordKind::adjective) {
      t.head = std::string(fields[0]);
      t.args = {std::string(fields[1])};
    } else {
      t.head = std::string(fields[1]);
      t.args = {std::string(fields[0]), std::string(fields[2])};
    }
    t.holistic_key = normalize_key(fields[expected - 2]);
    auto c = text::parse_count(fields[expected - 1]);
    if (!c || *c == 0) throw ParseError(path, lineno, "occurrence count must be a positive integer");
    t.occurrence_count = *c;
    parsed[t.head].push_back(std::move(t));
  }
  TuplesByWord out = filter_tuples(parsed, counts, filter, warnings);
  if (holistic != nullptr) {
    for (const auto& [head, list] : out) {
      for (const auto& t : list) {
        if (!holistic->contains(t.holistic_key)) {
          throw MissingWord(t.holistic_key, "holistic vector for a tuple of '" + head + "'");
        }
      }
    }
  }
  return out;
}

std::string format_tuples(const TuplesByWord& tuples, WordKind kind) {
  std::string out;
  for (const auto& [head, list] : tuples) {
    for (const auto& t : list) {
      if (kind == WordKind::adjective) {
        out += fmt::format("{}\t{}\t{}\t{}\n", t.head, t.args.at(0), t.holistic_key, t.occurrence_count);
      } else {
        out += fmt::format("{}\t{}\t{}\t{}\t{}\n", t.args.at(0), t.head, t.args.at(1), t.holistic_key,
                           t.occurrence_count);
      }
    }
  }
  return out;
}

std::string_view to_string(EvalShape shape) {
  switch (shape) {
    case EvalShape::word_pair: return "word-pair";
    case EvalShape::an_pair: return "an-pair";
    case EvalShape::svo_pair: return "svo-pair";
  }
  return "unknown";
}

EvalShape parse_eval_shape(std::string_view text) {
  if (text == "word-pair") return EvalShape::word_pair;
  if (text == "an-pair") return EvalShape::an_pair;
  if (text == "svo-pair") return EvalShape::svo_pair;
  throw RejectedInput(fmt::format("unknown dataset shape '{}'", text));
}

std::size_t words_per_side(EvalShape shape) {
  switch (shape) {
    case EvalShape::word_pair: return 1;
    case EvalShape::an_pair: return 2;
    case EvalShape::svo_pair: return 3;
  }
  return 0;
}

std::vector<EvalItem> load_eval_dataset(const std::string& path, EvalShape shape) {
  auto in = text::open_input(path);
  const std::size_t side = words_per_side(shape);
  std::vector<EvalItem> items;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = text::split_ws(text::strip_cr(line));
    if (fields.empty()) continue;
    if (fields.size() != 2 * side + 1) {
      throw ParseError(path, lineno,
                       fmt::format("{} items need {} fields, found {}", to_string(shape),
                                   2 * side + 1, fields.size()));
    }
    auto gold = text::parse_double(fields.back());
    if (!gold || !std::isfinite(*gold)) throw ParseError(path, lineno, "invalid gold score");
    EvalItem item;
    item.shape = shape;
    for (std::size_t i = 0; i < side; ++i) {
      item.left.emplace_back(fields[i]);
      item.right.emplace_back(fields[side + i]);
    }
    item.gold_score = *gold;
    items.push_back(std::move(item));
  }
  return items;
}

EvalShape detect_eval_shape(const std::string& path) {
  auto in = text::open_input(path);
  std::string line;
  while (std::getline(in, line)) {
    auto fields = text::split_ws(text::strip_cr(line));
    if (fields.empty()) continue;
    switch (fields.size()) {
      case 3: return EvalShape::word_pair;
      case 5: return EvalShape::an_pair;
      case 7: return EvalShape::svo_pair;
      default:
        throw FormatError(fmt::format("{}: cannot infer dataset shape from {} fields", path, fields.size()));
    }
  }
  throw FormatError(fmt::format("{}: empty dataset", path));
}

}  // namespace lexfn
