#pragma once

#include <string>
#include <string_view>

#include "lexfn/glf.hpp"
#include "lexfn/params.hpp"

namespace lexfn {

// Archive layout: a text manifest followed by a little-endian float64 payload.
//
//   lexfn-archive 1
//   kind adjective|verb|glf
//   representation full|lowrank
//   noun_dim N
//   sentence_dim S
//   vector_dim D
//   rank R
//   entries W
//   config_digest <hex>
//   payload_digest <hex>
//   <name> TAB <byte offset> TAB <byte length>      (W lines)
//   manifest_digest <hex>                          (covers every line above)
//   <payload>
//
// The manifest is validated against the declared shape before the payload is
// read; any mismatch is an IntegrityError.

std::string serialize_model(const ParamsStore& store, std::string_view config_text = {});
ParamsStore deserialize_model(std::string_view bytes);

void save_model(const ParamsStore& store, const std::string& path, std::string_view config_text = {});
ParamsStore load_model(const std::string& path);

std::string serialize_glf(const GlfTensor& g, std::string_view config_text = {});
GlfTensor deserialize_glf(std::string_view bytes);

void save_glf(const GlfTensor& g, const std::string& path, std::string_view config_text = {});
GlfTensor load_glf(const std::string& path);

std::string read_file_bytes(const std::string& path);

}  // namespace lexfn
