#pragma once

#include <cstdint>
#include <vector>

#include "binareye/bitcore.hpp"
#include "binareye/compiler.hpp"
#include "binareye/dense.hpp"

namespace binareye {
namespace oracle {

/// Plain integer reference for one CNN layer: triple-loop stride-1 valid
/// 2x2 convolution with sign thresholding (tie -> +1). No bit tricks; kept
/// independent of the packed datapath.
DenseTensor ref_conv_layer(const DenseTensor& input, const DenseConvLayer& layer);

/// Reference first layer over the 7-bit image (pooling applied when
/// the layer requests it, as in ref_conv_layer).
DenseTensor ref_first_layer(const IntegerImage& image,
                            const DenseConvLayer& layer);

/// 2x2 stride-2 per-element max.
DenseTensor ref_maxpool(const DenseTensor& input);

struct RefFcResult {
  std::vector<int64_t> scores;
  int label = 0;
};

/// Flattens (c,x,y) with channels fastest, then brute-force +-1 dot plus
/// bias per class; argmax with ties toward the lowest index.
RefFcResult ref_fc(const DenseTensor& features, const DenseFcLayer& layer);

struct RefRunResult {
  /// Post-pool output of every conv layer, in order.
  std::vector<DenseTensor> boundaries;
  std::vector<int64_t> scores;  // empty when the net has no FC layer
  int label = -1;
};

RefRunResult ref_network(const IntegerImage& image, const DenseNet& net);

/// Deterministic random parameter set matching a network description.
DenseNet random_dense(const NetworkDescription& net, uint64_t seed);

struct RandomNetwork {
  NetworkDescription description;
  DenseNet params;
};

/// Deterministic random network: `depth` CNN layers (the first FIRST),
/// pooling chosen at random but constrained so every compile constraint
/// holds; an FC layer is appended whenever the final map fits 4096 bits.
RandomNetwork random_network(uint64_t seed, int depth, int s_mode);

/// Fully random draw of depth and S from the seed.
RandomNetwork random_network(uint64_t seed);

IntegerImage random_image(uint64_t seed);

}  // namespace oracle
}  // namespace binareye
