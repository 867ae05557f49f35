#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace binareye {

/// Library-wide error type. All precondition violations throw this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kWordBits = 64;

inline std::size_t words_for_bits(std::size_t bits) {
  return (bits + kWordBits - 1) / kWordBits;
}

/// Packed vector of bipolar (+1/-1) values. Bit 1 <-> +1, bit 0 <-> -1.
/// Pad bits beyond length() are kept at zero so whole-word popcounts need
/// no masking except on the final word.
class BipolarVector {
 public:
  BipolarVector() = default;
  explicit BipolarVector(std::size_t length)
      : length_(length), words_(words_for_bits(length), 0) {}

  static BipolarVector from_values(const std::vector<int>& values);

  std::size_t length() const { return length_; }

  bool get(std::size_t i) const {
    return (words_[i / kWordBits] >> (i % kWordBits)) & 1u;
  }
  void set(std::size_t i, bool plus_one) {
    uint64_t mask = uint64_t{1} << (i % kWordBits);
    if (plus_one)
      words_[i / kWordBits] |= mask;
    else
      words_[i / kWordBits] &= ~mask;
  }
  int value(std::size_t i) const { return get(i) ? +1 : -1; }

  const std::vector<uint64_t>& words() const { return words_; }
  std::vector<uint64_t>& words() { return words_; }

  /// Clears any bits at positions >= length().
  void mask_tail();

 private:
  std::size_t length_ = 0;
  std::vector<uint64_t> words_;
};

/// Bit-packed C x W x H activation tensor. Channel-major within each (x,y)
/// site, channel 0 at the LSB of the site's word 0; sites row-major
/// (y outer, x inner). C must be a multiple of 64.
class BinaryFeatureMap {
 public:
  BinaryFeatureMap() = default;
  BinaryFeatureMap(int channels, int width, int height);

  int channels() const { return channels_; }
  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t words_per_site() const { return channels_ / kWordBits; }
  std::size_t bit_count() const {
    return std::size_t(channels_) * width_ * height_;
  }

  std::size_t site_word(int x, int y) const {
    return (std::size_t(y) * width_ + x) * words_per_site();
  }

  bool get(int c, int x, int y) const {
    std::size_t w = site_word(x, y) + c / kWordBits;
    return (payload_[w] >> (c % kWordBits)) & 1u;
  }
  void set(int c, int x, int y, bool plus_one) {
    std::size_t w = site_word(x, y) + c / kWordBits;
    uint64_t mask = uint64_t{1} << (c % kWordBits);
    if (plus_one)
      payload_[w] |= mask;
    else
      payload_[w] &= ~mask;
  }

  const std::vector<uint64_t>& payload() const { return payload_; }
  std::vector<uint64_t>& payload() { return payload_; }

 private:
  int channels_ = 0;
  int width_ = 0;
  int height_ = 0;
  std::vector<uint64_t> payload_;
};

/// 32x32 RGB image with 7-bit pixels, interleaved row-major (y, x, c).
class IntegerImage {
 public:
  static constexpr int kWidth = 32;
  static constexpr int kHeight = 32;
  static constexpr int kChannels = 3;
  static constexpr int kBytes = kWidth * kHeight * kChannels;

  IntegerImage() : pixels_(kBytes, 0) {}
  explicit IntegerImage(std::vector<uint8_t> pixels);

  uint8_t pixel(int c, int x, int y) const {
    return pixels_[(std::size_t(y) * kWidth + x) * kChannels + c];
  }
  void set_pixel(int c, int x, int y, uint8_t v);

  const std::vector<uint8_t>& bytes() const { return pixels_; }

 private:
  std::vector<uint8_t> pixels_;
};

/// Packs dense bipolar values given in (c, x, y) order, c fastest.
BinaryFeatureMap pack_features(const std::vector<int>& values, int channels,
                               int width, int height);

/// Inverse of pack_features.
std::vector<int> unpack_features(const BinaryFeatureMap& map);

/// Number of positions where a and w agree (pad bits excluded).
int64_t xnor_popcount(const BipolarVector& a, const BipolarVector& w);

/// Integer dot product of two bipolar vectors: 2*xnor_popcount - N.
int64_t bipolar_dot(const BipolarVector& a, const BipolarVector& w);

/// Binary comparator. Tie (sum == threshold) maps to +1.
inline bool sign_threshold(int64_t sum, int64_t threshold) {
  return sum >= threshold;
}

}  // namespace binareye
