#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "stackgrasp/geometry.hpp"
#include "stackgrasp/mask.hpp"

namespace stackgrasp::detail {

using nlohmann::json;

json rle_to_json(const RunLengthMask &rle);
RunLengthMask rle_from_json(const json &j, const std::string &where);

// Parses a JSON file; syntax errors become ErrorKind::kParse naming the file
// and byte offset.
json read_json_file(const std::filesystem::path &path);

// Writes `text` to `path` via a temporary sibling and rename.
void write_text_atomic(const std::filesystem::path &path, const std::string &text);

// Typed field access with ErrorKind::kParse naming the file and field path.
template <typename T>
T field(const json &j, const std::string &key, const std::string &where);

const json &member(const json &j, const std::string &key, const std::string &where);

std::vector<double> number_array(const json &j, std::size_t expected,
                                 const std::string &where);

}  // namespace stackgrasp::detail
