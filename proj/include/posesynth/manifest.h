#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "posesynth/geometry.h"

namespace posesynth {

// One (image, ground-truth pose) pair. image_path is relative to the
// directory holding the manifest.
struct ManifestRecord {
  std::string image_path;
  Pose pose;

  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

// Manifest CSV:
//   # posesynth-manifest v1
//   image,x,y,z,pitch,yaw,roll
//   images/train/000000.png,0.500000,-1.600000,0.500000,0.000000,45.000000,0.000000
// Floats carry exactly six decimals; '.' is always the decimal separator.
inline constexpr const char* kManifestMagic = "# posesynth-manifest v1";
inline constexpr const char* kManifestHeader = "image,x,y,z,pitch,yaw,roll";

// Locale-independent fixed six-decimal rendering; never prints "-0.000000".
std::string FormatPoseValue(double v);

std::string SerializeManifest(const std::vector<ManifestRecord>& records);

// Throws ParseError (with 1-based line number) on a bad magic or header line,
// wrong field count, unparsable or non-finite numbers, or duplicate paths.
std::vector<ManifestRecord> ParseManifest(const std::string& text);

std::vector<ManifestRecord> ReadManifest(const std::filesystem::path& path);

// Writes to a temporary sibling and renames, so a partially written manifest
// is never observable under `path`.
void WriteManifest(const std::vector<ManifestRecord>& records, const std::filesystem::path& path);

}  // namespace posesynth
