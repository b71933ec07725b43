#include "posesynth/manifest.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string_view>
#include <unordered_set>

#include <fmt/format.h>

#include "posesynth/errors.h"

namespace posesynth {
namespace {

std::vector<std::string_view> SplitCsv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

std::string FormatPoseValue(double v) {
  std::string s = fmt::format("{:.6f}", v);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string SerializeManifest(const std::vector<ManifestRecord>& records) {
  std::string out;
  out += kManifestMagic;
  out += '\n';
  out += kManifestHeader;
  out += '\n';
  for (const auto& rec : records) {
    out += rec.image_path;
    for (double v : rec.pose.AsArray()) {
      out += ',';
      out += FormatPoseValue(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<ManifestRecord> ParseManifest(const std::string& text) {
  std::vector<ManifestRecord> records;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string_view line(text.data() + pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line_no == 1) {
      if (line != kManifestMagic) {
        throw ParseError(fmt::format("line 1: expected \"{}\"", kManifestMagic), 1);
      }
      continue;
    }
    if (line_no == 2) {
      if (line != kManifestHeader) {
        throw ParseError(fmt::format("line 2: expected header \"{}\"", kManifestHeader), 2);
      }
      continue;
    }
    if (line.empty()) continue;

    const auto fields = SplitCsv(line);
    if (fields.size() != 7) {
      throw ParseError(
          fmt::format("line {}: expected 7 fields, got {}", line_no, fields.size()), line_no);
    }
    ManifestRecord rec;
    rec.image_path = std::string(fields[0]);
    if (rec.image_path.empty()) {
      throw ParseError(fmt::format("line {}: empty image path", line_no), line_no);
    }
    std::array<double, 6> v{};
    for (int k = 0; k < 6; ++k) {
      const std::string_view f = fields[k + 1];
      const char* end = f.data() + f.size();
      const auto res = std::from_chars(f.data(), end, v[k]);
      if (f.empty() || res.ec != std::errc() || res.ptr != end) {
        throw ParseError(fmt::format("line {}: bad number '{}'", line_no, f), line_no);
      }
      if (!std::isfinite(v[k])) {
        throw ParseError(fmt::format("line {}: non-finite pose value", line_no), line_no);
      }
    }
    rec.pose = Pose::FromArray(v);
    if (!seen.insert(rec.image_path).second) {
      throw ParseError(fmt::format("line {}: duplicate image path '{}'", line_no, rec.image_path),
                       line_no);
    }
    records.push_back(std::move(rec));
  }
  if (line_no < 2) {
    throw ParseError(fmt::format("line {}: missing manifest header", line_no + 1), line_no + 1);
  }
  return records;
}

std::vector<ManifestRecord> ReadManifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open manifest " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return ParseManifest(text);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

void WriteManifest(const std::vector<ManifestRecord>& records, const std::filesystem::path& path) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write manifest " + path.string());
    out << SerializeManifest(records);
    if (!out) throw IoError("failed writing manifest " + path.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move manifest into place at " + path.string() + ": " + ec.message());
}

}  // namespace posesynth
