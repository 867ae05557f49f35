#include "binareye/oracle.hpp"

#include <random>

namespace binareye {
namespace oracle {

namespace {

int8_t sign_bit(int64_t sum, int64_t threshold) {
  return sum >= threshold ? int8_t(+1) : int8_t(-1);
}

/// Uniform integer in [lo, hi] without stdlib distributions, so draws are
/// identical across standard libraries.
int64_t uniform(std::mt19937_64& rng, int64_t lo, int64_t hi) {
  return lo + int64_t(rng() % uint64_t(hi - lo + 1));
}

// Deepest CNN stack whose weight regions fit the weight SRAM at this S.
int max_depth(int s_mode) {
  std::size_t region = (4 / std::size_t(s_mode)) * 8192 + 384;
  int d = int(kWeightSramBytes / region);
  return std::min(d, kMaxCnnLayers);
}

}  // namespace

DenseTensor ref_conv_layer(const DenseTensor& input, const DenseConvLayer& layer) {
  if (layer.first) throw Error("ref_conv_layer cannot run a FIRST layer");
  if (input.channels != layer.channels)
    throw Error("reference conv: channel mismatch");
  if (input.width < 2 || input.height < 2)
    throw Error("reference conv: input must be at least 2x2");
  const int ow = input.width - 1, oh = input.height - 1;
  const int C = layer.channels;
  DenseTensor out(layer.filters, ow, oh);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x)
      for (int f = 0; f < layer.filters; ++f) {
        int acc = 0;
        for (int pos = 0; pos < 4; ++pos) {
          const int8_t* w = &layer.weights[(std::size_t(f) * 4 + pos) * C];
          const int8_t* a = &input.values[(std::size_t(y + (pos >> 1)) *
                                               input.width +
                                           (x + (pos & 1))) *
                                          C];
          for (int c = 0; c < C; ++c) acc += int(w[c]) * int(a[c]);
        }
        out.at(f, x, y) = sign_bit(acc, layer.thresholds[f]);
      }
  if (layer.pool) return ref_maxpool(out);
  return out;
}

DenseTensor ref_first_layer(const IntegerImage& image,
                            const DenseConvLayer& layer) {
  if (!layer.first) throw Error("ref_first_layer needs a FIRST layer");
  const int ow = IntegerImage::kWidth - 1, oh = IntegerImage::kHeight - 1;
  DenseTensor out(layer.filters, ow, oh);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x)
      for (int f = 0; f < layer.filters; ++f) {
        int acc = 0;
        for (int pos = 0; pos < 4; ++pos)
          for (int c = 0; c < 3; ++c)
            acc += int(layer.weight(f, pos, c)) *
                   int(image.pixel(c, x + (pos & 1), y + (pos >> 1)));
        out.at(f, x, y) = sign_bit(acc, layer.thresholds[f]);
      }
  if (layer.pool) return ref_maxpool(out);
  return out;
}

DenseTensor ref_maxpool(const DenseTensor& input) {
  if (input.width < 2 || input.height < 2)
    throw Error("reference pool: input must be at least 2x2");
  DenseTensor out(input.channels, input.width / 2, input.height / 2);
  for (int y = 0; y < out.height; ++y)
    for (int x = 0; x < out.width; ++x)
      for (int c = 0; c < input.channels; ++c) {
        int8_t m = input.at(c, 2 * x, 2 * y);
        m = std::max(m, input.at(c, 2 * x + 1, 2 * y));
        m = std::max(m, input.at(c, 2 * x, 2 * y + 1));
        m = std::max(m, input.at(c, 2 * x + 1, 2 * y + 1));
        out.at(c, x, y) = m;
      }
  return out;
}

RefFcResult ref_fc(const DenseTensor& features, const DenseFcLayer& layer) {
  const std::size_t n = features.values.size();
  if (n != std::size_t(layer.feature_bits))
    throw Error("reference FC: feature length mismatch");
  RefFcResult r;
  for (int c = 0; c < layer.classes; ++c) {
    int64_t score = layer.biases[c];
    for (std::size_t b = 0; b < n; ++b)
      score += int(layer.weight(c, int(b))) * int(features.values[b]);
    r.scores.push_back(score);
  }
  r.label = 0;
  for (int c = 1; c < layer.classes; ++c)
    if (r.scores[c] > r.scores[r.label]) r.label = c;
  return r;
}

RefRunResult ref_network(const IntegerImage& image, const DenseNet& net) {
  RefRunResult result;
  if (net.conv.empty()) throw Error("network has no layers");
  DenseTensor t = ref_first_layer(image, net.conv.front());
  result.boundaries.push_back(t);
  for (std::size_t i = 1; i < net.conv.size(); ++i) {
    t = ref_conv_layer(t, net.conv[i]);
    result.boundaries.push_back(t);
  }
  if (net.fc) {
    auto fc = ref_fc(t, *net.fc);
    result.scores = std::move(fc.scores);
    result.label = fc.label;
  }
  return result;
}

DenseNet random_dense(const NetworkDescription& net, uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + 1);
  auto shapes = track_geometry(net);
  const int fc_channels = 256 / net.s_mode;
  DenseNet dense;
  dense.s_mode = net.s_mode;
  for (int i = 0; i < net.cnn_layer_count(); ++i) {
    DenseConvLayer layer;
    layer.first = i == 0;
    layer.pool = net.layers[i].pool;
    layer.filters = fc_channels;
    layer.channels = layer.first ? 3 : fc_channels;
    layer.weights.resize(std::size_t(layer.filters) * 4 * layer.channels);
    for (auto& w : layer.weights) w = (rng() & 1) ? int8_t(+1) : int8_t(-1);
    layer.thresholds.resize(layer.filters);
    // Thresholds drawn near the center of the dot-product range so outputs
    // stay mixed rather than saturating.
    int range = layer.first ? 300 : 40;
    for (auto& t : layer.thresholds) t = int32_t(uniform(rng, -range, range));
    dense.conv.push_back(std::move(layer));
  }
  if (net.has_fc()) {
    DenseFcLayer fc;
    fc.classes = net.fc_classes();
    fc.feature_bits =
        fc_channels * shapes.back().pooled_w * shapes.back().pooled_h;
    fc.weights.resize(std::size_t(fc.classes) * fc.feature_bits);
    for (auto& w : fc.weights) w = (rng() & 1) ? int8_t(+1) : int8_t(-1);
    fc.biases.resize(fc.classes);
    for (auto& b : fc.biases) b = int32_t(uniform(rng, -50, 50));
    dense.fc = std::move(fc);
  }
  return dense;
}

RandomNetwork random_network(uint64_t seed, int depth, int s_mode) {
  if (s_mode != 1 && s_mode != 2 && s_mode != 4)
    throw Error("S must be one of {1,2,4}");
  if (depth < 1 || depth > max_depth(s_mode))
    throw Error("depth must be in [1," + std::to_string(max_depth(s_mode)) +
                "] at S=" + std::to_string(s_mode));
  std::mt19937_64 rng(seed);
  NetworkDescription net;
  net.name = "random-" + std::to_string(seed);
  net.s_mode = s_mode;
  int w = 32;
  for (int i = 0; i < depth; ++i) {
    int out = w - 1;
    int remaining = depth - 1 - i;
    // Pooling must leave room for the remaining conv layers.
    bool may_pool = out >= 2 && out / 2 >= remaining + 1;
    LayerDesc l;
    l.kind = LayerKind::Cnn;
    if (may_pool) l.pool = out > 12 ? true : (rng() & 1) != 0;
    net.layers.push_back(l);
    w = l.pool ? out / 2 : out;
  }
  std::size_t final_bits = std::size_t(256 / s_mode) * w * w;
  if (final_bits <= kMaxFcFeatureBits) {
    LayerDesc fc;
    fc.kind = LayerKind::Fc;
    fc.classes = int(2 + rng() % 9);
    net.layers.push_back(fc);
  }
  RandomNetwork rn;
  rn.description = net;
  rn.params = random_dense(net, seed);
  return rn;
}

RandomNetwork random_network(uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0xD1B54A32D192ED03ull);
  int s_mode = 1 << (rng() % 3);
  int depth = int(1 + rng() % uint64_t(max_depth(s_mode)));
  return random_network(seed, depth, s_mode);
}

IntegerImage random_image(uint64_t seed) {
  std::mt19937_64 rng(seed * 0xBF58476D1CE4E5B9ull + 7);
  std::vector<uint8_t> bytes(IntegerImage::kBytes);
  for (auto& b : bytes) b = uint8_t(rng() & 0x7F);
  return IntegerImage(std::move(bytes));
}

}  // namespace oracle
}  // namespace binareye
