#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pisa {

// Binary mask clip. Data is frame-major, row-major, one byte per pixel with
// values 0/1. object_id is carried by the clip manifest, not by the mask file.
struct MaskSequence {
  int n_frames = 0;
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;
  std::string object_id;

  static MaskSequence create(int n_frames, int height, int width,
                             std::string object_id = {});

  std::size_t frame_size() const {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }
  const std::uint8_t* frame(int f) const { return data.data() + frame_size() * f; }
  std::uint8_t* frame(int f) { return data.data() + frame_size() * f; }

  std::uint8_t at(int f, int r, int c) const {
    return data[frame_size() * f + static_cast<std::size_t>(r) * width + c];
  }
  void set(int f, int r, int c, std::uint8_t v) {
    data[frame_size() * f + static_cast<std::size_t>(r) * width + c] = v;
  }

  std::size_t foreground_count(int f) const;
  bool frame_empty(int f) const { return foreground_count(f) == 0; }
};

// Dense per-pixel float clip (flow, depth, logits). Held as double in memory;
// the file format narrows to IEEE binary32. Layout is frame-major, row-major,
// channel-interleaved. Flow clips carry 2 channels and, when paired with an
// n-frame mask clip, n-1 frames.
struct FieldSequence {
  int n_frames = 0;
  int height = 0;
  int width = 0;
  int channels = 1;
  std::vector<double> data;

  static FieldSequence create(int n_frames, int height, int width, int channels);

  std::size_t size() const { return data.size(); }
  double& at(int f, int r, int c, int ch) {
    return data[index(f, r, c, ch)];
  }
  double at(int f, int r, int c, int ch) const {
    return data[index(f, r, c, ch)];
  }
  std::size_t index(int f, int r, int c, int ch) const {
    return ((static_cast<std::size_t>(f) * height + r) * width + c) * channels + ch;
  }

  bool same_shape(const FieldSequence& o) const {
    return n_frames == o.n_frames && height == o.height && width == o.width &&
           channels == o.channels;
  }
};

}  // namespace pisa
