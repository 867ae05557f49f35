#include "binareye/bitcore.hpp"

namespace binareye {

BipolarVector BipolarVector::from_values(const std::vector<int>& values) {
  BipolarVector v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] != 1 && values[i] != -1)
      throw Error("bipolar value must be +1 or -1");
    if (values[i] == 1) v.set(i, true);
  }
  return v;
}

void BipolarVector::mask_tail() {
  std::size_t rem = length_ % kWordBits;
  if (rem != 0 && !words_.empty()) {
    words_.back() &= (uint64_t{1} << rem) - 1;
  }
}

BinaryFeatureMap::BinaryFeatureMap(int channels, int width, int height)
    : channels_(channels), width_(width), height_(height) {
  if (channels <= 0 || channels % int(kWordBits) != 0)
    throw Error("channel count must be a positive multiple of 64");
  if (width < 1 || width > 32 || height < 1 || height > 32)
    throw Error("feature map dimensions must be in [1,32]");
  payload_.assign(words_per_site() * width * height, 0);
}

IntegerImage::IntegerImage(std::vector<uint8_t> pixels)
    : pixels_(std::move(pixels)) {
  if (pixels_.size() != kBytes)
    throw Error("image must be exactly " + std::to_string(kBytes) + " bytes");
  for (uint8_t p : pixels_) {
    if (p > 127) throw Error("pixel value exceeds 7-bit range");
  }
}

void IntegerImage::set_pixel(int c, int x, int y, uint8_t v) {
  if (v > 127) throw Error("pixel value exceeds 7-bit range");
  pixels_[(std::size_t(y) * kWidth + x) * kChannels + c] = v;
}

BinaryFeatureMap pack_features(const std::vector<int>& values, int channels,
                               int width, int height) {
  if (channels != 64 && channels != 128 && channels != 256)
    throw Error("channel count must be one of {64,128,256}");
  if (values.size() != std::size_t(channels) * width * height)
    throw Error("value count does not match C*W*H");
  BinaryFeatureMap map(channels, width, height);
  std::size_t i = 0;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < channels; ++c, ++i) {
        if (values[i] != 1 && values[i] != -1)
          throw Error("bipolar value must be +1 or -1");
        if (values[i] == 1) map.set(c, x, y, true);
      }
  return map;
}

std::vector<int> unpack_features(const BinaryFeatureMap& map) {
  std::vector<int> out;
  out.reserve(map.bit_count());
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x)
      for (int c = 0; c < map.channels(); ++c)
        out.push_back(map.get(c, x, y) ? +1 : -1);
  return out;
}

int64_t xnor_popcount(const BipolarVector& a, const BipolarVector& w) {
  if (a.length() != w.length()) throw Error("vector length mismatch");
  const auto& aw = a.words();
  const auto& ww = w.words();
  int64_t match = 0;
  for (std::size_t i = 0; i < aw.size(); ++i)
    match += std::popcount(~(aw[i] ^ ww[i]));
  // Pad bits agree (both zero) in every word; drop their contribution.
  std::size_t pad = aw.size() * kWordBits - a.length();
  return match - int64_t(pad);
}

int64_t bipolar_dot(const BipolarVector& a, const BipolarVector& w) {
  return 2 * xnor_popcount(a, w) - int64_t(a.length());
}

}  // namespace binareye
