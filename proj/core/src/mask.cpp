#include "pisa/mask.hpp"

#include "pisa/errors.hpp"
#include "pisa/text.hpp"

namespace pisa {

MaskSequence MaskSequence::create(int n_frames, int height, int width,
                                  std::string object_id) {
  if (n_frames < 1 || height < 1 || width < 1) {
    throw ValidationError("mask sequence dimensions must be >= 1");
  }
  MaskSequence m;
  m.n_frames = n_frames;
  m.height = height;
  m.width = width;
  m.object_id = std::move(object_id);
  m.data.assign(static_cast<std::size_t>(n_frames) * height * width, 0);
  return m;
}

std::size_t MaskSequence::foreground_count(int f) const {
  const std::uint8_t* p = frame(f);
  std::size_t n = frame_size();
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) count += p[i];
  return count;
}

FieldSequence FieldSequence::create(int n_frames, int height, int width, int channels) {
  if (n_frames < 1 || height < 1 || width < 1 || channels < 1) {
    throw ValidationError("field sequence dimensions must be >= 1");
  }
  FieldSequence f;
  f.n_frames = n_frames;
  f.height = height;
  f.width = width;
  f.channels = channels;
  f.data.assign(static_cast<std::size_t>(n_frames) * height * width * channels, 0.0);
  return f;
}

}  // namespace pisa
