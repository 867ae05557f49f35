#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace binareye {

/// Dense +1/-1 tensor, stored int8, index (c, x, y) with channels fastest.
/// Used by the integer reference path and as the compiler's input form;
/// deliberately unpacked.
struct DenseTensor {
  int channels = 0;
  int width = 0;
  int height = 0;
  std::vector<int8_t> values;

  DenseTensor() = default;
  DenseTensor(int c, int w, int h)
      : channels(c), width(w), height(h), values(std::size_t(c) * w * h, -1) {}

  int8_t& at(int c, int x, int y) {
    return values[(std::size_t(y) * width + x) * channels + c];
  }
  int8_t at(int c, int x, int y) const {
    return values[(std::size_t(y) * width + x) * channels + c];
  }
};

/// One convolutional layer in dense form. Weights are +1/-1 int8 stored
/// [f][position][channel] with channels contiguous; position is dy*2+dx.
/// FIRST layers have 3 input channels, CNN layers have `channels`.
struct DenseConvLayer {
  bool first = false;
  bool pool = false;
  int filters = 0;   // F = 256/S
  int channels = 0;  // C = 256/S (3 for FIRST)
  std::vector<int8_t> weights;
  std::vector<int32_t> thresholds;  // one per filter

  int8_t weight(int f, int pos, int c) const {
    return weights[(std::size_t(f) * 4 + pos) * channels + c];
  }
  int8_t& weight(int f, int pos, int c) {
    return weights[(std::size_t(f) * 4 + pos) * channels + c];
  }
};

struct DenseFcLayer {
  int classes = 0;
  int feature_bits = 0;
  std::vector<int8_t> weights;  // [class][bit], +1/-1
  std::vector<int32_t> biases;  // one per class

  int8_t weight(int cls, int bit) const {
    return weights[std::size_t(cls) * feature_bits + bit];
  }
};

/// Full parameter set of a network, shape-consistent with a
/// NetworkDescription: conv[0] is the FIRST layer.
struct DenseNet {
  int s_mode = 1;
  std::vector<DenseConvLayer> conv;
  std::optional<DenseFcLayer> fc;
};

}  // namespace binareye
