#include "pisa/maskio.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "pisa/errors.hpp"
#include "pisa/text.hpp"

namespace pisa {

namespace {

constexpr char kMaskMagic[16] = {'P', 'I', 'S', 'A', 'M', 'A', 'S', 'K',
                                 'S', 'E', 'Q', 'v', '0', '0', '1', '\0'};
constexpr char kFieldMagic[16] = {'P', 'I', 'S', 'A', 'F', 'I', 'E', 'L',
                                  'D', 'S', 'E', 'Q', 'v', '0', '1', '\0'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
  out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xFF));
}

class ByteReader {
 public:
  ByteReader(const std::vector<std::uint8_t>& bytes, const char* what)
      : bytes_(bytes), what_(what) {}

  std::uint64_t offset() const { return offset_; }

  void expect_magic(const char (&magic)[16]) {
    if (bytes_.size() < 16) {
      throw FormatError(std::string(what_) + ": truncated before magic", bytes_.size());
    }
    if (std::memcmp(bytes_.data(), magic, 16) != 0) {
      throw FormatError(std::string(what_) + ": bad magic", 0);
    }
    offset_ = 16;
  }

  std::uint32_t u32(const char* field) {
    if (offset_ + 4 > bytes_.size()) {
      throw FormatError(std::string(what_) + ": truncated reading " + field, offset_);
    }
    std::uint32_t v = static_cast<std::uint32_t>(bytes_[offset_]) |
                      (static_cast<std::uint32_t>(bytes_[offset_ + 1]) << 8) |
                      (static_cast<std::uint32_t>(bytes_[offset_ + 2]) << 16) |
                      (static_cast<std::uint32_t>(bytes_[offset_ + 3]) << 24);
    offset_ += 4;
    return v;
  }

  void expect_end() {
    if (offset_ != bytes_.size()) {
      throw FormatError(std::string(what_) + ": trailing data", offset_);
    }
  }

 private:
  const std::vector<std::uint8_t>& bytes_;
  const char* what_;
  std::uint64_t offset_ = 0;
};

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path,
                      const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ValidationError("short write to " + path.string());
}

}  // namespace

std::vector<std::uint8_t> encode_mask_sequence(const MaskSequence& m) {
  if (m.n_frames < 1 || m.height < 1 || m.width < 1) {
    throw ValidationError("mask sequence dimensions must be >= 1");
  }
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMaskMagic, kMaskMagic + 16);
  put_u32(out, static_cast<std::uint32_t>(m.n_frames));
  put_u32(out, static_cast<std::uint32_t>(m.height));
  put_u32(out, static_cast<std::uint32_t>(m.width));
  const std::size_t frame_px = m.frame_size();
  std::vector<std::uint32_t> runs;
  for (int f = 0; f < m.n_frames; ++f) {
    const std::uint8_t* px = m.frame(f);
    runs.clear();
    // Alternating run lengths, zeros first; only the first run may be empty.
    std::uint8_t current = 0;
    std::uint32_t run = 0;
    for (std::size_t i = 0; i < frame_px; ++i) {
      std::uint8_t v = px[i] ? 1 : 0;
      if (v == current) {
        ++run;
      } else {
        runs.push_back(run);
        current = v;
        run = 1;
      }
    }
    runs.push_back(run);
    put_u32(out, static_cast<std::uint32_t>(runs.size()));
    for (std::uint32_t r : runs) put_u32(out, r);
  }
  return out;
}

MaskSequence decode_mask_sequence(const std::vector<std::uint8_t>& bytes) {
  ByteReader in(bytes, "mask sequence");
  in.expect_magic(kMaskMagic);
  std::uint32_t n_frames = in.u32("n_frames");
  std::uint32_t height = in.u32("height");
  std::uint32_t width = in.u32("width");
  if (n_frames < 1 || height < 1 || width < 1) {
    throw FormatError("mask sequence: zero dimension in header", 16);
  }
  const std::uint64_t frame_px = static_cast<std::uint64_t>(height) * width;
  if (frame_px > (1ull << 32)) {
    throw FormatError("mask sequence: implausible frame size", 16);
  }
  MaskSequence m = MaskSequence::create(static_cast<int>(n_frames),
                                        static_cast<int>(height),
                                        static_cast<int>(width));
  for (std::uint32_t f = 0; f < n_frames; ++f) {
    std::uint64_t frame_offset = in.offset();
    std::uint32_t run_count = in.u32("run count");
    if (run_count == 0 || run_count > frame_px + 1) {
      throw FormatError("mask sequence: implausible run count", frame_offset);
    }
    std::uint8_t* px = m.frame(static_cast<int>(f));
    std::uint64_t filled = 0;
    std::uint8_t value = 0;
    for (std::uint32_t i = 0; i < run_count; ++i) {
      std::uint32_t run = in.u32("run length");
      if (filled + run > frame_px) {
        throw FormatError("mask sequence: runs exceed frame size", frame_offset);
      }
      if (value) std::memset(px + filled, 1, run);
      filled += run;
      value ^= 1;
    }
    if (filled != frame_px) {
      throw FormatError("mask sequence: runs do not sum to frame size", frame_offset);
    }
  }
  in.expect_end();
  return m;
}

void write_mask_sequence(const std::filesystem::path& path, const MaskSequence& m) {
  write_file_bytes(path, encode_mask_sequence(m));
}

MaskSequence read_mask_sequence(const std::filesystem::path& path) {
  return decode_mask_sequence(read_file_bytes(path));
}

std::vector<std::uint8_t> encode_field_sequence(const FieldSequence& f) {
  if (f.n_frames < 1 || f.height < 1 || f.width < 1 || f.channels < 1) {
    throw ValidationError("field sequence dimensions must be >= 1");
  }
  const std::size_t expected = static_cast<std::size_t>(f.n_frames) * f.height *
                               f.width * f.channels;
  if (f.data.size() != expected) {
    throw ValidationError("field sequence data size does not match dimensions");
  }
  std::vector<std::uint8_t> out;
  out.reserve(32 + 4 * expected);
  out.insert(out.end(), kFieldMagic, kFieldMagic + 16);
  put_u32(out, static_cast<std::uint32_t>(f.n_frames));
  put_u32(out, static_cast<std::uint32_t>(f.height));
  put_u32(out, static_cast<std::uint32_t>(f.width));
  put_u32(out, static_cast<std::uint32_t>(f.channels));
  for (std::size_t i = 0; i < f.data.size(); ++i) {
    float v = static_cast<float>(f.data[i]);
    if (!std::isfinite(v)) {
      throw ValidationError("field value at index " + format_int(i) +
                            " is not a finite binary32 (" + format_double(f.data[i]) + ")");
    }
    put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  return out;
}

FieldSequence decode_field_sequence(const std::vector<std::uint8_t>& bytes) {
  ByteReader in(bytes, "field sequence");
  in.expect_magic(kFieldMagic);
  std::uint32_t n_frames = in.u32("n_frames");
  std::uint32_t height = in.u32("height");
  std::uint32_t width = in.u32("width");
  std::uint32_t channels = in.u32("channels");
  if (n_frames < 1 || height < 1 || width < 1 || channels < 1) {
    throw FormatError("field sequence: zero dimension in header", 16);
  }
  std::uint64_t count = static_cast<std::uint64_t>(n_frames) * height * width * channels;
  if (count > (1ull << 34)) {
    throw FormatError("field sequence: implausible element count", 16);
  }
  FieldSequence f = FieldSequence::create(static_cast<int>(n_frames),
                                          static_cast<int>(height),
                                          static_cast<int>(width),
                                          static_cast<int>(channels));
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint64_t at = in.offset();
    float v = std::bit_cast<float>(in.u32("field value"));
    if (!std::isfinite(v)) {
      throw FormatError("field sequence: non-finite value at index " + format_int(i), at);
    }
    f.data[i] = static_cast<double>(v);
  }
  in.expect_end();
  return f;
}

void write_field_sequence(const std::filesystem::path& path, const FieldSequence& f) {
  write_file_bytes(path, encode_field_sequence(f));
}

FieldSequence read_field_sequence(const std::filesystem::path& path) {
  return decode_field_sequence(read_file_bytes(path));
}

void ClipManifest::validate() const {
  if (schema_version != 1) {
    throw ValidationError("unsupported manifest schema_version " +
                          format_int(schema_version));
  }
  if (!(fps > 0.0)) throw ValidationError("manifest fps must be > 0");
  if (n_frames < 2) throw ValidationError("manifest n_frames must be >= 2");
  if (!(gravity > 0.0)) throw ValidationError("manifest gravity must be > 0");
  camera.validate();
  if (scene) {
    scene->validate();
    if (!(scene->camera == camera) || scene->fps != fps ||
        scene->n_frames != n_frames || scene->gravity != gravity) {
      throw ValidationError("manifest scene echo disagrees with top-level fields");
    }
  }
}

std::string encode_manifest(const ClipManifest& m) {
  m.validate();
  std::string out;
  out += "# pisa clip manifest\n";
  out += "schema_version = " + format_int(m.schema_version) + "\n";
  out += "fps = " + format_double(m.fps) + "\n";
  out += "n_frames = " + format_int(m.n_frames) + "\n";
  if (!m.caption.empty()) out += "caption = " + m.caption + "\n";
  out += "gravity = " + format_double(m.gravity) + "\n";
  out += "camera.focal_length_mm = " + format_double(m.camera.focal_length_mm) + "\n";
  out += "camera.sensor_width_mm = " + format_double(m.camera.sensor_width_mm) + "\n";
  out += "camera.image_width = " + format_int(m.camera.image_width) + "\n";
  out += "camera.image_height = " + format_int(m.camera.image_height) + "\n";
  out += "camera.camera_height_m = " + format_double(m.camera.camera_height_m) + "\n";
  if (!m.object_ids.empty()) {
    out += "object_ids = ";
    for (std::size_t i = 0; i < m.object_ids.size(); ++i) {
      if (i) out += ",";
      out += m.object_ids[i];
    }
    out += "\n";
  }
  if (m.scene) {
    const SceneSpec& s = *m.scene;
    out += "scene.shape = ";
    out += (s.dropper.shape == SolidShape::sphere ? "sphere" : "box");
    out += "\n";
    if (s.dropper.shape == SolidShape::sphere) {
      out += "scene.size_m = " + format_double(s.dropper.radius()) + "\n";
    } else {
      out += "scene.size_m = " + format_double(s.dropper.half_extents[0]) + " " +
             format_double(s.dropper.half_extents[1]) + " " +
             format_double(s.dropper.half_extents[2]) + "\n";
    }
    if (!s.dropper.albedo_tag.empty()) {
      out += "scene.albedo = " + s.dropper.albedo_tag + "\n";
    }
    out += "scene.y0_m = " + format_double(s.y0_m) + "\n";
    out += "scene.depth_m = " + format_double(s.depth_m) + "\n";
    out += "scene.restitution = " + format_double(s.restitution) + "\n";
    out += "scene.rng_seed = " + format_uint(s.rng_seed) + "\n";
  }
  for (const auto& [k, v] : m.extra) {
    out += k + " = " + v + "\n";
  }
  return out;
}

namespace {

ClipManifest decode_manifest_impl(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::size_t line_no = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("manifest line " + format_int(line_no) + ": missing '='");
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) {
      throw FormatError("manifest line " + format_int(line_no) + ": empty key");
    }
    entries.emplace_back(std::move(key), std::move(value));
  }

  auto take = [&entries](const std::string& key) -> std::optional<std::string> {
    std::optional<std::string> found;
    for (std::size_t i = 0; i < entries.size();) {
      if (entries[i].first == key) {
        if (found) throw FormatError("manifest: duplicate key '" + key + "'");
        found = std::move(entries[i].second);
        entries.erase(entries.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        ++i;
      }
    }
    return found;
  };
  auto require = [&take](const std::string& key) -> std::string {
    auto v = take(key);
    if (!v) throw FormatError("manifest: missing required key '" + key + "'");
    return *v;
  };

  ClipManifest m;
  m.schema_version = static_cast<int>(parse_int(require("schema_version"), "schema_version"));
  m.fps = parse_double(require("fps"), "fps");
  m.n_frames = static_cast<int>(parse_int(require("n_frames"), "n_frames"));
  m.camera.focal_length_mm =
      parse_double(require("camera.focal_length_mm"), "camera.focal_length_mm");
  m.camera.sensor_width_mm =
      parse_double(require("camera.sensor_width_mm"), "camera.sensor_width_mm");
  m.camera.image_width =
      static_cast<int>(parse_int(require("camera.image_width"), "camera.image_width"));
  m.camera.image_height =
      static_cast<int>(parse_int(require("camera.image_height"), "camera.image_height"));
  m.camera.camera_height_m =
      parse_double(require("camera.camera_height_m"), "camera.camera_height_m");
  if (auto v = take("caption")) m.caption = *v;
  if (auto v = take("gravity")) m.gravity = parse_double(*v, "gravity");
  if (auto v = take("object_ids")) {
    for (const std::string& id : split(*v, ',')) {
      std::string t(trim(id));
      if (!t.empty()) m.object_ids.push_back(std::move(t));
    }
  }

  auto shape = take("scene.shape");
  if (shape) {
    SceneSpec s;
    if (*shape == "sphere") {
      s.dropper.shape = SolidShape::sphere;
    } else if (*shape == "box") {
      s.dropper.shape = SolidShape::box;
    } else {
      throw FormatError("manifest: unknown scene.shape '" + *shape + "'");
    }
    std::string size = require("scene.size_m");
    std::vector<std::string> parts;
    for (const std::string& p : split(size, ' ')) {
      if (!trim(p).empty()) parts.emplace_back(trim(p));
    }
    if (s.dropper.shape == SolidShape::sphere) {
      if (parts.size() != 1) {
        throw FormatError("manifest: scene.size_m for a sphere takes one value");
      }
      double r = parse_double(parts[0], "scene.size_m");
      s.dropper.half_extents = {r, r, r};
    } else {
      if (parts.size() != 3) {
        throw FormatError("manifest: scene.size_m for a box takes three values");
      }
      for (int i = 0; i < 3; ++i) {
        s.dropper.half_extents[i] = parse_double(parts[i], "scene.size_m");
      }
    }
    if (auto v = take("scene.albedo")) s.dropper.albedo_tag = *v;
    s.y0_m = parse_double(require("scene.y0_m"), "scene.y0_m");
    s.depth_m = parse_double(require("scene.depth_m"), "scene.depth_m");
    if (auto v = take("scene.restitution")) s.restitution = parse_double(*v, "scene.restitution");
    if (auto v = take("scene.rng_seed")) {
      s.rng_seed = parse_uint(*v, "scene.rng_seed");
    }
    s.fps = m.fps;
    s.n_frames = m.n_frames;
    s.gravity = m.gravity;
    s.camera = m.camera;
    m.scene = std::move(s);
  }

  m.extra = std::move(entries);
  m.validate();
  return m;
}

}  // namespace

ClipManifest decode_manifest(const std::string& text) {
  // Unparseable values and impossible field combinations both mean the file
  // is malformed, so validation failures surface as format errors here.
  try {
    return decode_manifest_impl(text);
  } catch (const ValidationError& e) {
    throw FormatError(std::string("manifest: ") + e.what());
  }
}

void write_manifest(const std::filesystem::path& path, const ClipManifest& m) {
  std::string text = encode_manifest(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw ValidationError("short write to " + path.string());
}

ClipManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_manifest(text);
}

}  // namespace pisa
