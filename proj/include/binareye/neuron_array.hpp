#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "binareye/bitcore.hpp"
#include "binareye/trace.hpp"

namespace binareye {

enum class LayerKind : uint8_t { First, Cnn, Fc };

inline constexpr int kNeuronCount = 64;          // neurons per LD-CONV phase
inline constexpr int kSubNeurons = 4;            // sub-neurons per neuron
inline constexpr int kSubWeightBits = 256;       // 64 channels x 2x2
inline constexpr int kNeuronWeightBits = 1024;   // 4 sub-neurons
inline constexpr int kNeuronWeightWords = 16;
inline constexpr int kPhaseWeightBits = kNeuronCount * kNeuronWeightBits;
inline constexpr int kThresholdBits = 12;        // packed threshold width
inline constexpr int kMaxFcFeatureBits = 4096;
inline constexpr int kMaxFcClasses = 10;

/// One neuron's local flip-flop contents: 1024 weight bits packed
/// sub-neuron-major, then 2x2 position (dy row-major, dx inner), then
/// channel at the LSB; plus up to 4 signed thresholds (S of them used).
struct NeuronWeights {
  std::array<uint64_t, kNeuronWeightWords> bits{};
  std::array<int32_t, kSubNeurons> thresholds{};

  bool weight_bit(int sub, int pos, int channel) const {
    int idx = sub * kSubWeightBits + pos * 64 + channel;
    return (bits[idx / 64] >> (idx % 64)) & 1u;
  }
  void set_weight_bit(int sub, int pos, int channel, bool plus_one) {
    int idx = sub * kSubWeightBits + pos * 64 + channel;
    uint64_t mask = uint64_t{1} << (idx % 64);
    if (plus_one)
      bits[idx / 64] |= mask;
    else
      bits[idx / 64] &= ~mask;
  }
};

/// All weights of one layer in packed form: 64 neurons per phase,
/// 4/S phases; FC layers carry class vectors and biases instead.
struct LayerWeights {
  LayerKind kind = LayerKind::Cnn;
  int s_mode = 1;
  bool pool = false;
  std::vector<NeuronWeights> neurons;        // kNeuronCount * phases()
  std::vector<BipolarVector> class_weights;  // FC only
  std::vector<int32_t> class_biases;         // FC only

  int phases() const { return 4 / s_mode; }
  int output_channels() const { return 256 / s_mode; }
};

/// S feature maps of 256/S channels each, processed in parallel.
struct FeatureMapSet {
  int s_mode = 1;
  std::vector<BinaryFeatureMap> maps;

  int width() const { return maps.front().width(); }
  int height() const { return maps.front().height(); }
  int map_channels() const { return 256 / s_mode; }

  /// Concatenated 256-channel view: map m occupies channels
  /// [m*256/S, (m+1)*256/S). This is the feature-bank storage layout.
  BinaryFeatureMap concat() const;
  static FeatureMapSet split(const BinaryFeatureMap& concat, int s_mode);
};

/// 64x2x2 dot product of one sub-neuron. `patch` holds 256 bipolar values
/// ordered position-major (dy,dx row-major) with 64 channels per position.
int subneuron_partial(const BipolarVector& patch,
                      std::span<const uint64_t, 4> subweights);

/// Combines 4 sub-neuron partial sums into S output bits.
/// S=1: one bit from p0+p1+p2+p3. S=2: (p0+p1) for map A, (p2+p3) for
/// map B. S=4: one bit per partial.
std::array<bool, 4> neuron_eval(const std::array<int, 4>& partials, int s_mode,
                                std::span<const int32_t> thresholds);

/// Stride-1 valid 2x2 convolution over all 4/S LD-CONV phases, with
/// streamed 2x2 max-pooling applied when the layer requests it.
FeatureMapSet conv_layer(const FeatureMapSet& inputs,
                         const LayerWeights& weights,
                         TraceSink* sink = nullptr, int layer_index = 1);

/// 2x2 stride-2 per-channel max; bitwise OR under the bit-1 <-> +1
/// encoding. Odd trailing row/column dropped.
BinaryFeatureMap maxpool_stream(const BinaryFeatureMap& map);

/// Multi-bit first layer: 3-channel 2x2 integer convolution of the 7-bit
/// image against bipolar weights stored in channels 0-2 of sub-neuron 0.
FeatureMapSet first_layer(const IntegerImage& image,
                          const LayerWeights& weights,
                          TraceSink* sink = nullptr, int layer_index = 1);

struct FcResult {
  std::vector<int64_t> scores;
  int label = 0;
};

/// Binary fully-connected classifier over the flattened feature map
/// ((c,x,y) order, c fastest). Ties break toward the lowest class index.
FcResult fc_layer(const BinaryFeatureMap& features, const LayerWeights& weights);

}  // namespace binareye
