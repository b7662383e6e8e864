#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pisa/dropsim.hpp"
#include "pisa/mask.hpp"

namespace pisa {

// On-disk formats. All integers and floats are little-endian regardless of
// host; identical in-memory values always produce byte-identical files.
//
// Mask clip ("PISAMASKSEQv001\0"):
//   16-byte magic, u32 n_frames, u32 height, u32 width, then per frame a u32
//   run count followed by that many u32 run lengths. Runs alternate starting
//   with a zero-pixel run (an empty first run means the frame starts with 1s)
//   and must sum to height*width. Row-major within the frame. The encoder is
//   canonical: only the first run may be zero-length.
//
// Field clip ("PISAFIELDSEQv01\0"):
//   16-byte magic, u32 n_frames, u32 height, u32 width, u32 channels, then
//   n_frames*height*width*channels IEEE binary32 values, frame-major,
//   row-major, channel-interleaved. Values must be finite.
//
// Clip manifest: UTF-8 "key = value" lines, one per field, '#' comments.
// Unknown keys round-trip unchanged.

void write_mask_sequence(const std::filesystem::path& path, const MaskSequence& m);
MaskSequence read_mask_sequence(const std::filesystem::path& path);

void write_field_sequence(const std::filesystem::path& path, const FieldSequence& f);
FieldSequence read_field_sequence(const std::filesystem::path& path);

// In-memory encodings, used by the file functions and handy in tests.
std::vector<std::uint8_t> encode_mask_sequence(const MaskSequence& m);
MaskSequence decode_mask_sequence(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> encode_field_sequence(const FieldSequence& f);
FieldSequence decode_field_sequence(const std::vector<std::uint8_t>& bytes);

struct ClipManifest {
  int schema_version = 1;
  double fps = 16.0;
  int n_frames = 32;
  CameraModel camera;
  double gravity = 9.81;
  std::string caption;
  std::vector<std::string> object_ids;
  // Scene echo for simulated clips; absent for clips of unknown provenance.
  std::optional<SceneSpec> scene;
  // Unrecognized keys in file order.
  std::vector<std::pair<std::string, std::string>> extra;

  void validate() const;
};

void write_manifest(const std::filesystem::path& path, const ClipManifest& m);
ClipManifest read_manifest(const std::filesystem::path& path);

std::string encode_manifest(const ClipManifest& m);
ClipManifest decode_manifest(const std::string& text);

}  // namespace pisa
