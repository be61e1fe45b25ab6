#include "json_util.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "stackgrasp/error.hpp"

namespace stackgrasp::detail {

json rle_to_json(const RunLengthMask &rle) {
  return json{{"counts", rle.counts}, {"size", {rle.height, rle.width}}};
}

RunLengthMask rle_from_json(const json &j, const std::string &where) {
  RunLengthMask rle;
  const json &size = member(j, "size", where);
  if (!size.is_array() || size.size() != 2 || !size[0].is_number_integer() ||
      !size[1].is_number_integer()) {
    throw Error(ErrorKind::kParse, fmt::format("{}.size: expected [height, width]", where));
  }
  rle.height = size[0].get<int>();
  rle.width = size[1].get<int>();
  const json &counts = member(j, "counts", where);
  if (!counts.is_array()) {
    throw Error(ErrorKind::kParse,
                fmt::format("{}.counts: expected an array of run lengths", where));
  }
  rle.counts.reserve(counts.size());
  for (const json &c : counts) {
    if (!c.is_number_unsigned() && !(c.is_number_integer() && c.get<long long>() >= 0)) {
      throw Error(ErrorKind::kParse,
                  fmt::format("{}.counts: run lengths must be non-negative integers", where));
    }
    rle.counts.push_back(c.get<std::uint32_t>());
  }
  try {
    decode_rle(rle);
  } catch (const Error &e) {
    throw Error(ErrorKind::kParse, fmt::format("{}: {}", where, e.what()));
  }
  return rle;
}

json read_json_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kParse, fmt::format("{}: cannot open file", path.string()));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str());
  } catch (const json::parse_error &e) {
    throw Error(ErrorKind::kParse,
                fmt::format("{}: invalid JSON at byte offset {}", path.string(), e.byte));
  }
}

void write_text_atomic(const std::filesystem::path &path, const std::string &text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorKind::kStorage, fmt::format("{}: cannot open for writing", tmp.string()));
    }
    out << text;
    if (!out) {
      throw Error(ErrorKind::kStorage, fmt::format("{}: write failed", tmp.string()));
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::kStorage, fmt::format("{}: cannot move into place", path.string()));
  }
}

const json &member(const json &j, const std::string &key, const std::string &where) {
  if (!j.is_object()) {
    throw Error(ErrorKind::kParse, fmt::format("{}: expected an object", where));
  }
  auto it = j.find(key);
  if (it == j.end()) {
    throw Error(ErrorKind::kParse, fmt::format("{}.{}: missing field", where, key));
  }
  return *it;
}

template <typename T>
T field(const json &j, const std::string &key, const std::string &where) {
  const json &v = member(j, key, where);
  try {
    return v.get<T>();
  } catch (const json::exception &) {
    throw Error(ErrorKind::kParse, fmt::format("{}.{}: wrong type", where, key));
  }
}

template int field<int>(const json &, const std::string &, const std::string &);
template double field<double>(const json &, const std::string &, const std::string &);
template bool field<bool>(const json &, const std::string &, const std::string &);
template std::string field<std::string>(const json &, const std::string &,
                                        const std::string &);
template std::vector<bool> field<std::vector<bool>>(const json &, const std::string &,
                                                    const std::string &);

std::vector<double> number_array(const json &j, std::size_t expected,
                                 const std::string &where) {
  if (!j.is_array() || j.size() != expected) {
    throw Error(ErrorKind::kParse,
                fmt::format("{}: expected an array of {} numbers", where, expected));
  }
  std::vector<double> out;
  out.reserve(expected);
  for (const json &v : j) {
    if (!v.is_number()) {
      throw Error(ErrorKind::kParse, fmt::format("{}: non-numeric entry", where));
    }
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace stackgrasp::detail
