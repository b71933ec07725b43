#include "posesynth/pointcloud.h"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include <fmt/format.h>

#include "posesynth/errors.h"

namespace posesynth {

void PointCloud::Reserve(std::size_t n) {
  positions.reserve(n);
  colors.reserve(n);
}

void PointCloud::Add(const Eigen::Vector3f& p, const Color& c) {
  positions.push_back(p);
  colors.push_back(c);
}

bool Aabb::Contains(const Vec3& p, double tolerance) const {
  return (p.array() >= min.array() - tolerance).all() &&
         (p.array() <= max.array() + tolerance).all();
}

Aabb BoundingBox(const PointCloud& cloud) {
  if (cloud.empty()) throw InvalidArgument("bounding box of an empty point cloud");
  Eigen::Vector3f lo = cloud.positions.front();
  Eigen::Vector3f hi = lo;
  for (const auto& p : cloud.positions) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return Aabb{lo.cast<double>(), hi.cast<double>()};
}

// ---------------------------------------------------------------------------
// PLY reading

namespace {

enum class PlyType { kInt8, kUint8, kInt16, kUint16, kInt32, kUint32, kFloat32, kFloat64 };

std::optional<PlyType> ParsePlyType(std::string_view s) {
  if (s == "char" || s == "int8") return PlyType::kInt8;
  if (s == "uchar" || s == "uint8") return PlyType::kUint8;
  if (s == "short" || s == "int16") return PlyType::kInt16;
  if (s == "ushort" || s == "uint16") return PlyType::kUint16;
  if (s == "int" || s == "int32") return PlyType::kInt32;
  if (s == "uint" || s == "uint32") return PlyType::kUint32;
  if (s == "float" || s == "float32") return PlyType::kFloat32;
  if (s == "double" || s == "float64") return PlyType::kFloat64;
  return std::nullopt;
}

std::size_t PlyTypeSize(PlyType t) {
  switch (t) {
    case PlyType::kInt8:
    case PlyType::kUint8:
      return 1;
    case PlyType::kInt16:
    case PlyType::kUint16:
      return 2;
    case PlyType::kInt32:
    case PlyType::kUint32:
    case PlyType::kFloat32:
      return 4;
    case PlyType::kFloat64:
      return 8;
  }
  return 0;
}

bool IsFloatType(PlyType t) { return t == PlyType::kFloat32 || t == PlyType::kFloat64; }

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::kFloat32;
  bool is_list = false;
  PlyType count_type = PlyType::kUint8;
};

struct PlyElement {
  std::string name;
  std::uint64_t count = 0;
  std::vector<PlyProperty> properties;
};

struct PlyHeader {
  PlyEncoding encoding = PlyEncoding::kAscii;
  std::vector<PlyElement> elements;
  std::size_t body_offset = 0;
};

std::vector<std::string_view> SplitWords(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) words.push_back(line.substr(i, j - i));
    i = j;
  }
  return words;
}

PlyHeader ParseHeader(std::string_view data) {
  PlyHeader header;
  std::size_t pos = 0;
  bool saw_format = false;
  bool first = true;
  while (true) {
    const std::size_t line_start = pos;
    const std::size_t eol = data.find('\n', pos);
    if (eol == std::string_view::npos) {
      throw ParseError("PLY header is not terminated by end_header", 0, line_start);
    }
    const auto words = SplitWords(data.substr(pos, eol - pos));
    pos = eol + 1;
    const auto fail = [&](const std::string& what) -> ParseError {
      return ParseError("malformed PLY header: " + what, 0, line_start);
    };
    if (first) {
      if (words.size() != 1 || words[0] != "ply") throw fail("missing 'ply' magic");
      first = false;
      continue;
    }
    if (words.empty()) continue;
    const std::string_view key = words[0];
    if (key == "comment" || key == "obj_info") continue;
    if (key == "end_header") break;
    if (key == "format") {
      if (words.size() != 3) throw fail("bad format line");
      if (words[1] == "ascii") {
        header.encoding = PlyEncoding::kAscii;
      } else if (words[1] == "binary_little_endian") {
        header.encoding = PlyEncoding::kBinaryLittleEndian;
      } else if (words[1] == "binary_big_endian") {
        throw ParseError("unsupported PLY format binary_big_endian", 0, line_start);
      } else {
        throw fail("unknown format '" + std::string(words[1]) + "'");
      }
      saw_format = true;
    } else if (key == "element") {
      if (words.size() != 3) throw fail("bad element line");
      PlyElement el;
      el.name = std::string(words[1]);
      const auto* end = words[2].data() + words[2].size();
      if (std::from_chars(words[2].data(), end, el.count).ptr != end) {
        throw fail("bad element count");
      }
      header.elements.push_back(std::move(el));
    } else if (key == "property") {
      if (header.elements.empty()) throw fail("property before any element");
      PlyProperty prop;
      if (words.size() == 5 && words[1] == "list") {
        const auto count_type = ParsePlyType(words[2]);
        const auto item_type = ParsePlyType(words[3]);
        if (!count_type || !item_type) throw fail("unknown list property type");
        prop.is_list = true;
        prop.count_type = *count_type;
        prop.type = *item_type;
        prop.name = std::string(words[4]);
      } else if (words.size() == 3) {
        const auto type = ParsePlyType(words[1]);
        if (!type) throw fail("unknown property type '" + std::string(words[1]) + "'");
        prop.type = *type;
        prop.name = std::string(words[2]);
      } else {
        throw fail("bad property line");
      }
      header.elements.back().properties.push_back(std::move(prop));
    } else {
      throw fail("unexpected keyword '" + std::string(key) + "'");
    }
  }
  if (!saw_format) throw ParseError("malformed PLY header: missing format line", 0, 0);
  header.body_offset = pos;
  return header;
}

// Role of each vertex property in the output cloud.
enum class Slot { kNone, kX, kY, kZ, kRed, kGreen, kBlue };

Slot SlotFor(const PlyProperty& p) {
  if (p.is_list) return Slot::kNone;
  if (p.name == "x") return Slot::kX;
  if (p.name == "y") return Slot::kY;
  if (p.name == "z") return Slot::kZ;
  if (p.name == "red") return Slot::kRed;
  if (p.name == "green") return Slot::kGreen;
  if (p.name == "blue") return Slot::kBlue;
  return Slot::kNone;
}

std::uint8_t ToColorChannel(double v, PlyType type) {
  // Float colors are conventionally normalized to [0, 1].
  if (IsFloatType(type)) v *= 255.0;
  return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
}

class BinaryReader {
 public:
  BinaryReader(std::string_view data, std::size_t offset) : data_(data), pos_(offset) {}

  std::size_t position() const { return pos_; }

  double Read(PlyType type, const std::string& context) {
    const std::size_t n = PlyTypeSize(type);
    if (data_.size() - pos_ < n) {
      throw ParseError("truncated PLY body while reading " + context, 0, pos_);
    }
    unsigned char buf[8];
    std::memcpy(buf, data_.data() + pos_, n);
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + n);
    pos_ += n;
    switch (type) {
      case PlyType::kInt8: return static_cast<std::int8_t>(buf[0]);
      case PlyType::kUint8: return buf[0];
      case PlyType::kInt16: { std::int16_t v; std::memcpy(&v, buf, 2); return v; }
      case PlyType::kUint16: { std::uint16_t v; std::memcpy(&v, buf, 2); return v; }
      case PlyType::kInt32: { std::int32_t v; std::memcpy(&v, buf, 4); return v; }
      case PlyType::kUint32: { std::uint32_t v; std::memcpy(&v, buf, 4); return v; }
      case PlyType::kFloat32: { float v; std::memcpy(&v, buf, 4); return v; }
      case PlyType::kFloat64: { double v; std::memcpy(&v, buf, 8); return v; }
    }
    return 0.0;
  }

  void Skip(std::size_t n, const std::string& context) {
    if (data_.size() - pos_ < n) {
      throw ParseError("truncated PLY body while reading " + context, 0, pos_);
    }
    pos_ += n;
  }

 private:
  std::string_view data_;
  std::size_t pos_;
};

class AsciiReader {
 public:
  AsciiReader(std::string_view data, std::size_t offset) : data_(data), pos_(offset) {}

  // Next whitespace-separated token; throws on end of data.
  std::string_view Next(const std::string& context) {
    while (pos_ < data_.size() && std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
    if (pos_ >= data_.size()) {
      throw ParseError("truncated PLY body while reading " + context, 0, pos_);
    }
    token_start_ = pos_;
    while (pos_ < data_.size() && !std::isspace(static_cast<unsigned char>(data_[pos_]))) ++pos_;
    return data_.substr(token_start_, pos_ - token_start_);
  }

  double Read(PlyType type, const std::string& context) {
    const std::string_view tok = Next(context);
    const char* end = tok.data() + tok.size();
    if (type == PlyType::kFloat32) {
      float v;
      if (std::from_chars(tok.data(), end, v).ptr == end) return v;
    } else if (type == PlyType::kFloat64) {
      double v;
      if (std::from_chars(tok.data(), end, v).ptr == end) return v;
    } else {
      long long v;
      if (std::from_chars(tok.data(), end, v).ptr == end) return static_cast<double>(v);
    }
    throw ParseError("bad number '" + std::string(tok) + "' in " + context, 0, token_start_);
  }

  // Float properties keep their exact float value in ASCII files.
  float ReadFloat(const std::string& context) {
    const std::string_view tok = Next(context);
    const char* end = tok.data() + tok.size();
    float v;
    if (std::from_chars(tok.data(), end, v).ptr != end) {
      throw ParseError("bad number '" + std::string(tok) + "' in " + context, 0, token_start_);
    }
    return v;
  }

 private:
  std::string_view data_;
  std::size_t pos_;
  std::size_t token_start_ = 0;
};

template <typename Reader>
void SkipElement(Reader& reader, const PlyElement& el, PlyEncoding encoding) {
  for (std::uint64_t i = 0; i < el.count; ++i) {
    for (const auto& prop : el.properties) {
      const std::string ctx = "element '" + el.name + "'";
      if (!prop.is_list) {
        if constexpr (std::is_same_v<Reader, BinaryReader>) {
          reader.Skip(PlyTypeSize(prop.type), ctx);
        } else {
          reader.Next(ctx);
        }
        continue;
      }
      const double n = reader.Read(prop.count_type, ctx);
      if (n < 0) throw ParseError("negative list length in " + ctx, 0, 0);
      const auto count = static_cast<std::size_t>(n);
      for (std::size_t k = 0; k < count; ++k) {
        if constexpr (std::is_same_v<Reader, BinaryReader>) {
          reader.Skip(PlyTypeSize(prop.type), ctx);
        } else {
          reader.Next(ctx);
        }
      }
    }
  }
  (void)encoding;
}

template <typename Reader>
PointCloud ReadVertices(Reader& reader, const PlyElement& el) {
  std::vector<Slot> slots;
  for (const auto& p : el.properties) slots.push_back(SlotFor(p));
  PointCloud cloud;
  if (el.count > std::numeric_limits<std::size_t>::max() / 16) {
    throw ParseError("vertex count too large", 0, 0);
  }
  cloud.Reserve(static_cast<std::size_t>(std::min<std::uint64_t>(el.count, 1u << 26)));
  const std::string ctx = "element 'vertex'";
  for (std::uint64_t i = 0; i < el.count; ++i) {
    Eigen::Vector3f p = Eigen::Vector3f::Zero();
    Color c = kDefaultPointColor;
    for (std::size_t k = 0; k < el.properties.size(); ++k) {
      const auto& prop = el.properties[k];
      if (prop.is_list) {
        const double n = reader.Read(prop.count_type, ctx);
        for (std::size_t m = 0; m < static_cast<std::size_t>(std::max(n, 0.0)); ++m) {
          reader.Read(prop.type, ctx);
        }
        continue;
      }
      double value;
      if constexpr (std::is_same_v<Reader, AsciiReader>) {
        value = prop.type == PlyType::kFloat32 ? reader.ReadFloat(ctx) : reader.Read(prop.type, ctx);
      } else {
        value = reader.Read(prop.type, ctx);
      }
      switch (slots[k]) {
        case Slot::kX: p.x() = static_cast<float>(value); break;
        case Slot::kY: p.y() = static_cast<float>(value); break;
        case Slot::kZ: p.z() = static_cast<float>(value); break;
        case Slot::kRed: c[0] = ToColorChannel(value, prop.type); break;
        case Slot::kGreen: c[1] = ToColorChannel(value, prop.type); break;
        case Slot::kBlue: c[2] = ToColorChannel(value, prop.type); break;
        case Slot::kNone: break;
      }
    }
    if (!p.allFinite()) {
      throw ParseError(fmt::format("vertex {} has non-finite coordinates", i), 0, 0);
    }
    cloud.Add(p, c);
  }
  return cloud;
}

}  // namespace

PointCloud LoadPly(const std::filesystem::path& path, PlyLoadReport* report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open PLY file " + path.string());
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  const PlyHeader header = ParseHeader(data);
  const auto vertex_it = std::find_if(header.elements.begin(), header.elements.end(),
                                      [](const PlyElement& e) { return e.name == "vertex"; });
  if (vertex_it == header.elements.end()) {
    throw ParseError("PLY file has no vertex element", 0, 0);
  }
  for (const char* axis : {"x", "y", "z"}) {
    const bool found = std::any_of(vertex_it->properties.begin(), vertex_it->properties.end(),
                                   [&](const PlyProperty& p) { return !p.is_list && p.name == axis; });
    if (!found) throw ParseError(std::string("PLY vertex element lacks property ") + axis, 0, 0);
  }

  PlyLoadReport local;
  for (const auto& prop : vertex_it->properties) {
    if (SlotFor(prop) == Slot::kNone) ++local.skipped_properties;
  }
  local.skipped_elements = header.elements.size() - 1;

  const auto read_all = [&](auto& reader) {
    for (auto it = header.elements.begin(); it != vertex_it; ++it) {
      SkipElement(reader, *it, header.encoding);
    }
    return ReadVertices(reader, *vertex_it);
  };

  PointCloud cloud;
  if (header.encoding == PlyEncoding::kAscii) {
    AsciiReader reader(data, header.body_offset);
    cloud = read_all(reader);
  } else {
    BinaryReader reader(data, header.body_offset);
    cloud = read_all(reader);
  }
  if (report) *report = local;
  return cloud;
}

void WritePly(const PointCloud& cloud, const std::filesystem::path& path, PlyEncoding encoding) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write PLY file " + path.string());
  out << "ply\n"
      << (encoding == PlyEncoding::kAscii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n")
      << "element vertex " << cloud.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n"
      << "property uchar red\nproperty uchar green\nproperty uchar blue\n"
      << "end_header\n";
  if (encoding == PlyEncoding::kAscii) {
    std::string line;
    char buf[32];
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      line.clear();
      for (int k = 0; k < 3; ++k) {
        const auto res = std::to_chars(buf, buf + sizeof(buf), cloud.positions[i][k]);
        line.append(buf, res.ptr);
        line.push_back(' ');
      }
      line += fmt::format("{} {} {}\n", cloud.colors[i][0], cloud.colors[i][1], cloud.colors[i][2]);
      out << line;
    }
  } else {
    std::vector<char> record(15);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      for (int k = 0; k < 3; ++k) {
        float v = cloud.positions[i][k];
        unsigned char b[4];
        std::memcpy(b, &v, 4);
        if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + 4);
        std::memcpy(record.data() + 4 * k, b, 4);
      }
      std::memcpy(record.data() + 12, cloud.colors[i].data(), 3);
      out.write(record.data(), static_cast<std::streamsize>(record.size()));
    }
  }
  if (!out) throw IoError("failed writing PLY file " + path.string());
}

// ---------------------------------------------------------------------------
// Procedural scene

namespace {

// Uniform double in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
double Uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t Mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

struct Face {
  Vec3 origin;
  Vec3 axis_u;  // spans the face together with axis_v
  Vec3 axis_v;
  double len_u;
  double len_v;
  Color base;
};

}  // namespace

PointCloud ProceduralRoom(std::uint64_t seed, const RoomSpec& spec) {
  if (spec.point_count < 1) throw InvalidArgument("procedural room needs at least one point");
  if (!(spec.width > 0.0 && spec.height > 0.0 && spec.depth > 0.0)) {
    throw InvalidArgument("procedural room dimensions must be positive");
  }
  const double w = spec.width, h = spec.height, d = spec.depth;
  const Vec3 ex = Vec3::UnitX(), ey = -Vec3::UnitY(), ez = Vec3::UnitZ();
  const std::array<Face, 6> faces{{
      {Vec3(0, 0, 0), ex, ez, w, d, {110, 96, 80}},     // floor
      {Vec3(0, -h, 0), ex, ez, w, d, {225, 225, 215}},  // ceiling
      {Vec3(0, 0, 0), ez, ey, d, h, {200, 70, 60}},     // x = 0 wall
      {Vec3(w, 0, 0), ez, ey, d, h, {60, 90, 190}},     // x = w wall
      {Vec3(0, 0, 0), ex, ey, w, h, {70, 170, 80}},     // z = 0 wall
      {Vec3(0, 0, d), ex, ey, w, h, {220, 190, 60}},    // z = d wall
  }};
  std::array<double, 6> cumulative{};
  double total = 0.0;
  for (std::size_t i = 0; i < faces.size(); ++i) {
    total += faces[i].len_u * faces[i].len_v;
    cumulative[i] = total;
  }

  constexpr double kBlockSize = 0.5;  // meters per pattern block
  std::mt19937_64 rng(seed);
  PointCloud cloud;
  cloud.Reserve(spec.point_count);
  for (std::size_t n = 0; n < spec.point_count; ++n) {
    const double pick = Uniform(rng) * total;
    std::size_t fi = 0;
    while (fi + 1 < faces.size() && pick >= cumulative[fi]) ++fi;
    const Face& f = faces[fi];
    const double a = Uniform(rng) * f.len_u;
    const double b = Uniform(rng) * f.len_v;
    const Vec3 p = f.origin + a * f.axis_u + b * f.axis_v;

    const auto bu = static_cast<std::uint64_t>(a / kBlockSize);
    const auto bv = static_cast<std::uint64_t>(b / kBlockSize);
    const std::uint64_t block = Mix(seed ^ Mix(fi * 0x100000001b3ull + bu * 0x10001ull + bv));
    // Per-block brightness in [0.45, 1.15] and a small hue shift.
    const double shade = 0.45 + 0.7 * static_cast<double>(block & 0xffff) / 65535.0;
    Color c;
    for (int k = 0; k < 3; ++k) {
      const double hue = static_cast<double>((block >> (16 + 8 * k)) & 0xff) / 255.0 - 0.5;
      const double jitter = (Uniform(rng) - 0.5) * 24.0;
      const double v = f.base[k] * shade + hue * 40.0 + jitter;
      c[k] = static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
    }
    cloud.Add(p.cast<float>(), c);
  }
  return cloud;
}

}  // namespace posesynth
