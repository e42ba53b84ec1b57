#include "lexfn/archive.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <sstream>

#include <fmt/format.h>

#include "lexfn/config.hpp"
#include "lexfn/error.hpp"
#include "text_util.hpp"

namespace lexfn {

namespace {

constexpr std::string_view kMagic = "lexfn-archive 1";

struct Header {
  std::string kind;
  std::string representation = "full";
  std::size_t noun_dim = 0;
  std::size_t sentence_dim = 0;
  std::size_t vector_dim = 0;
  std::size_t rank = 0;
};

struct Record {
  std::string name;
  std::span<const double> values;
};

void append_le(std::string& out, double x) {
  auto bits = std::bit_cast<std::uint64_t>(x);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xffU));
}

double read_le(const char* p) {
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(p[b]);
  return std::bit_cast<double>(bits);
}

std::string hex(std::uint64_t v) { return fmt::format("{:016x}", v); }

std::string serialize(const Header& h, const std::vector<Record>& records,
                      std::string_view config_text) {
  std::string payload;
  std::string table;
  for (const auto& r : records) {
    if (r.name.empty() || r.name.find_first_of("\t\n\r") != std::string::npos) {
      throw RejectedInput(fmt::format("entry name '{}' cannot be archived", r.name));
    }
    table += fmt::format("{}\t{}\t{}\n", r.name, payload.size(), r.values.size() * 8);
    for (double x : r.values) append_le(payload, x);
  }
  std::string manifest;
  manifest += kMagic;
  manifest += '\n';
  manifest += fmt::format("kind {}\n", h.kind);
  manifest += fmt::format("representation {}\n", h.representation);
  manifest += fmt::format("noun_dim {}\n", h.noun_dim);
  manifest += fmt::format("sentence_dim {}\n", h.sentence_dim);
  manifest += fmt::format("vector_dim {}\n", h.vector_dim);
  manifest += fmt::format("rank {}\n", h.rank);
  manifest += fmt::format("entries {}\n", records.size());
  manifest += fmt::format("config_digest {}\n", hex(fnv1a64(config_text)));
  manifest += fmt::format("payload_digest {}\n", hex(fnv1a64(payload)));
  manifest += table;
  manifest += fmt::format("manifest_digest {}\n", hex(fnv1a64(manifest)));
  return manifest + payload;
}

struct Parsed {
  Header header;
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;
};

std::size_t parse_size_field(std::string_view line, std::string_view key) {
  auto fields = text::split(line, ' ');
  if (fields.size() != 2 || fields[0] != key) {
    throw IntegrityError(fmt::format("archive manifest: expected '{}', found '{}'", key, line));
  }
  auto v = text::parse_count(fields[1]);
  if (!v) throw IntegrityError(fmt::format("archive manifest: bad value for '{}'", key));
  return static_cast<std::size_t>(*v);
}

std::string parse_word_field(std::string_view line, std::string_view key) {
  auto fields = text::split(line, ' ');
  if (fields.size() != 2 || fields[0] != key) {
    throw IntegrityError(fmt::format("archive manifest: expected '{}', found '{}'", key, line));
  }
  return std::string(fields[1]);
}

/// Reads one '\n'-terminated line starting at pos.
std::string_view next_line(std::string_view bytes, std::size_t& pos) {
  auto end = bytes.find('\n', pos);
  if (end == std::string_view::npos) throw IntegrityError("archive manifest is truncated");
  auto line = bytes.substr(pos, end - pos);
  pos = end + 1;
  return line;
}

/// `expected_length(header)` gives the byte length every record must have.
template <typename LengthFn>
Parsed deserialize(std::string_view bytes, LengthFn expected_length) {
  std::size_t pos = 0;
  if (next_line(bytes, pos) != kMagic) throw IntegrityError("not a lexfn archive");
  Parsed out;
  Header& h = out.header;
  h.kind = parse_word_field(next_line(bytes, pos), "kind");
  h.representation = parse_word_field(next_line(bytes, pos), "representation");
  h.noun_dim = parse_size_field(next_line(bytes, pos), "noun_dim");
  h.sentence_dim = parse_size_field(next_line(bytes, pos), "sentence_dim");
  h.vector_dim = parse_size_field(next_line(bytes, pos), "vector_dim");
  h.rank = parse_size_field(next_line(bytes, pos), "rank");
  const std::size_t entries = parse_size_field(next_line(bytes, pos), "entries");
  parse_word_field(next_line(bytes, pos), "config_digest");
  const std::string payload_digest = parse_word_field(next_line(bytes, pos), "payload_digest");

  const std::size_t record_length = expected_length(h);
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (std::size_t i = 0; i < entries; ++i) {
    auto fields = text::split(next_line(bytes, pos), '\t');
    if (fields.size() != 3) throw IntegrityError("archive manifest: malformed entry record");
    auto offset = text::parse_count(fields[1]);
    auto length = text::parse_count(fields[2]);
    if (!offset || !length) throw IntegrityError("archive manifest: malformed entry record");
    if (*length != record_length) {
      throw IntegrityError(fmt::format("entry '{}' has {} bytes, declared shape needs {}", fields[0],
                                       *length, record_length));
    }
    const std::size_t expected_offset = i * record_length;
    if (*offset != expected_offset) {
      throw IntegrityError(fmt::format("entry '{}' is not at offset {}", fields[0], expected_offset));
    }
    out.names.emplace_back(fields[0]);
    spans.emplace_back(*offset, *length);
  }
  const std::size_t manifest_end_before_digest = pos;
  const std::string manifest_digest = parse_word_field(next_line(bytes, pos), "manifest_digest");
  if (manifest_digest != hex(fnv1a64(bytes.substr(0, manifest_end_before_digest)))) {
    throw IntegrityError("archive manifest digest mismatch");
  }

  auto payload = bytes.substr(pos);
  if (payload.size() != entries * record_length) {
    throw IntegrityError(fmt::format("archive payload has {} bytes, manifest declares {}",
                                     payload.size(), entries * record_length));
  }
  if (payload_digest != hex(fnv1a64(payload))) throw IntegrityError("archive payload digest mismatch");
  for (const auto& [offset, length] : spans) {
    std::vector<double> values(length / 8);
    for (std::size_t j = 0; j < values.size(); ++j) values[j] = read_le(payload.data() + offset + 8 * j);
    out.values.push_back(std::move(values));
  }
  return out;
}

Shape shape_from(const Header& h) {
  Shape s;
  try {
    s.kind = parse_word_kind(h.kind);
    s.rep = parse_representation(h.representation);
  } catch (const RejectedInput& e) {
    throw IntegrityError(std::string("archive manifest: ") + e.what());
  }
  s.noun_dim = h.noun_dim;
  s.sentence_dim = h.sentence_dim;
  s.rank = h.rank;
  if (s.kind == WordKind::adjective && s.sentence_dim != 0) {
    throw IntegrityError("archive manifest: adjective archives have sentence_dim 0");
  }
  if (s.rep == Representation::full && s.rank != 0) {
    throw IntegrityError("archive manifest: full archives have rank 0");
  }
  try {
    s.validate();
  } catch (const RejectedInput& e) {
    throw IntegrityError(std::string("archive manifest: ") + e.what());
  }
  return s;
}

}  // namespace

std::string serialize_model(const ParamsStore& store, std::string_view config_text) {
  Header h;
  const Shape& s = store.shape();
  h.kind = std::string(to_string(s.kind));
  h.representation = std::string(to_string(s.rep));
  h.noun_dim = s.noun_dim;
  h.sentence_dim = s.sentence_dim;
  h.rank = s.rank;
  std::vector<Record> records;
  for (std::size_t i = 0; i < store.size(); ++i) records.push_back({store.word(i), store[i].values()});
  return serialize(h, records, config_text);
}

ParamsStore deserialize_model(std::string_view bytes) {
  Parsed p = deserialize(bytes, [](const Header& h) {
    if (h.kind == "glf") throw IntegrityError("archive holds a GLF tensor, not a model");
    return shape_from(h).size() * 8;
  });
  const Shape shape = shape_from(p.header);
  ParamsStore store(shape, p.names);
  if (store.size() != p.names.size()) throw IntegrityError("archive lists a word twice");
  for (std::size_t i = 0; i < p.names.size(); ++i) {
    try {
      store.at(p.names[i]) = Params(shape, std::move(p.values[i]));
    } catch (const RejectedInput& e) {
      throw IntegrityError(fmt::format("entry '{}': {}", p.names[i], e.what()));
    }
  }
  return store;
}

void save_model(const ParamsStore& store, const std::string& path, std::string_view config_text) {
  text::write_file(path, serialize_model(store, config_text));
}

ParamsStore load_model(const std::string& path) { return deserialize_model(read_file_bytes(path)); }

std::string serialize_glf(const GlfTensor& g, std::string_view config_text) {
  Header h;
  h.kind = "glf";
  h.noun_dim = g.noun_dim();
  h.vector_dim = g.vector_dim();
  return serialize(h, {Record{"G", g.values()}}, config_text);
}

GlfTensor deserialize_glf(std::string_view bytes) {
  Parsed p = deserialize(bytes, [](const Header& h) {
    if (h.kind != "glf") throw IntegrityError("archive does not hold a GLF tensor");
    if (h.noun_dim == 0 || h.vector_dim == 0) throw IntegrityError("GLF archive has zero dimensions");
    return h.noun_dim * h.noun_dim * h.vector_dim * 8;
  });
  if (p.values.size() != 1) throw IntegrityError("GLF archive must hold exactly one entry");
  try {
    return GlfTensor(p.header.noun_dim, p.header.vector_dim, std::move(p.values[0]));
  } catch (const RejectedInput& e) {
    throw IntegrityError(e.what());
  }
}

void save_glf(const GlfTensor& g, const std::string& path, std::string_view config_text) {
  text::write_file(path, serialize_glf(g, config_text));
}

GlfTensor load_glf(const std::string& path) { return deserialize_glf(read_file_bytes(path)); }

std::string read_file_bytes(const std::string& path) {
  auto in = text::open_input(path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace lexfn
