#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "verbatim/errors.hpp"

namespace verbatim::io {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return std::move(ss).str();
}

// Writes to a sibling temp file and renames over the target, so readers never
// observe a partially written output.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path.string() + "'");
  }
}

inline std::vector<std::string_view> lines(std::string_view doc) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < doc.size()) {
    auto nl = doc.find('\n', start);
    if (nl == std::string_view::npos) nl = doc.size();
    auto line = doc.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = nl + 1;
  }
  return out;
}

/// One "id<TAB>text" record. Text may be empty.
struct TsvRecord {
  std::string id;
  std::string text;
  friend bool operator==(const TsvRecord&, const TsvRecord&) = default;
};

// Parses "id<TAB>text" lines in file order. Blank lines are skipped; a
// missing tab or a repeated id is a FormatError naming the line.
inline std::vector<TsvRecord> parse_tsv(std::string_view doc) {
  std::vector<TsvRecord> out;
  std::map<std::string, std::size_t, std::less<>> seen;
  auto ls = lines(doc);
  for (std::size_t n = 0; n < ls.size(); ++n) {
    auto line = ls[n];
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw FormatError("line " + std::to_string(n + 1) + ": expected 'id<TAB>text'");
    }
    std::string id(line.substr(0, tab));
    if (auto [it, fresh] = seen.emplace(id, n + 1); !fresh) {
      throw FormatError("line " + std::to_string(n + 1) + ": duplicate id '" + id +
                        "' (first seen on line " + std::to_string(it->second) + ")");
    }
    out.push_back({std::move(id), std::string(line.substr(tab + 1))});
  }
  return out;
}

inline std::string format_tsv(const std::vector<TsvRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.id;
    out += '\t';
    out += r.text;
    out += '\n';
  }
  return out;
}

}  // namespace verbatim::io
