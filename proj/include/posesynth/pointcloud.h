#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "posesynth/geometry.h"

namespace posesynth {

using Color = std::array<std::uint8_t, 3>;

inline constexpr Color kDefaultPointColor{128, 128, 128};

// Colored points in the reconstruction frame (meters). Coordinates are stored
// as 32-bit floats, which is what dense reconstruction tools emit.
struct PointCloud {
  std::vector<Eigen::Vector3f> positions;
  std::vector<Color> colors;

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }
  void Reserve(std::size_t n);
  void Add(const Eigen::Vector3f& p, const Color& c);

  friend bool operator==(const PointCloud&, const PointCloud&) = default;
};

struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  Vec3 Center() const { return 0.5 * (min + max); }
  Vec3 Extent() const { return max - min; }
  bool Contains(const Vec3& p, double tolerance = 0.0) const;
};

// Throws InvalidArgument on an empty cloud.
Aabb BoundingBox(const PointCloud& cloud);

enum class PlyEncoding { kAscii, kBinaryLittleEndian };

struct PlyLoadReport {
  // Vertex properties other than x, y, z, red, green, blue.
  std::size_t skipped_properties = 0;
  // Non-vertex elements (faces, edges, ...).
  std::size_t skipped_elements = 0;
};

// Reads the vertex element of an ASCII or binary little-endian PLY file.
// Missing color properties default to mid-gray. Throws IoError when the file
// cannot be opened and ParseError (with byte offset) on malformed content.
PointCloud LoadPly(const std::filesystem::path& path, PlyLoadReport* report = nullptr);

void WritePly(const PointCloud& cloud, const std::filesystem::path& path,
              PlyEncoding encoding = PlyEncoding::kBinaryLittleEndian);

// Axis-aligned box "room" used as a stand-in scene. The room spans
// [0, width] x [-height, 0] x [0, depth]: the floor is the y = 0 plane and the
// ceiling lies above it (up is -Y).
struct RoomSpec {
  double width = 10.0;
  double height = 4.0;
  double depth = 10.0;
  std::size_t point_count = 100000;
};

// Points scattered over the six interior faces with area-proportional
// density. Each face has its own base color and a coarse block pattern;
// every point gets additional seeded color jitter. Pure in (seed, spec).
PointCloud ProceduralRoom(std::uint64_t seed, const RoomSpec& spec);

}  // namespace posesynth
