#include "binareye/neuron_array.hpp"

#include <bit>

namespace binareye {

namespace {

void check_set(const FeatureMapSet& set) {
  int s = set.s_mode;
  if (s != 1 && s != 2 && s != 4) throw Error("S must be one of {1,2,4}");
  if (set.maps.size() != std::size_t(s))
    throw Error("feature map set must hold exactly S maps");
  int c = 256 / s;
  for (const auto& m : set.maps) {
    if (m.channels() != c) throw Error("feature map channel count must be 256/S");
    if (m.width() != set.maps.front().width() ||
        m.height() != set.maps.front().height())
      throw Error("feature maps in a set must share W and H");
  }
}

void emit(TraceSink* sink, EventKind kind, int layer, int phase, uint64_t bits,
          uint64_t ops) {
  if (sink) sink->emit(TraceEvent{kind, layer, phase, bits, ops});
}

}  // namespace

BinaryFeatureMap FeatureMapSet::concat() const {
  check_set(*this);
  if (s_mode == 1) return maps[0];
  int w = width(), h = height();
  std::size_t wps = map_channels() / kWordBits;
  BinaryFeatureMap out(256, w, h);
  for (std::size_t site = 0; site < std::size_t(w) * h; ++site) {
    for (int m = 0; m < s_mode; ++m) {
      const auto& src = maps[m].payload();
      for (std::size_t j = 0; j < wps; ++j)
        out.payload()[site * 4 + m * wps + j] = src[site * wps + j];
    }
  }
  return out;
}

FeatureMapSet FeatureMapSet::split(const BinaryFeatureMap& concat, int s_mode) {
  if (concat.channels() != 256)
    throw Error("concatenated map must have 256 channels");
  if (s_mode != 1 && s_mode != 2 && s_mode != 4)
    throw Error("S must be one of {1,2,4}");
  FeatureMapSet set;
  set.s_mode = s_mode;
  if (s_mode == 1) {
    set.maps.push_back(concat);
    return set;
  }
  int w = concat.width(), h = concat.height();
  std::size_t wps = (256 / s_mode) / kWordBits;
  for (int m = 0; m < s_mode; ++m) {
    BinaryFeatureMap map(256 / s_mode, w, h);
    for (std::size_t site = 0; site < std::size_t(w) * h; ++site)
      for (std::size_t j = 0; j < wps; ++j)
        map.payload()[site * wps + j] = concat.payload()[site * 4 + m * wps + j];
    set.maps.push_back(std::move(map));
  }
  return set;
}

int subneuron_partial(const BipolarVector& patch,
                      std::span<const uint64_t, 4> subweights) {
  if (patch.length() != kSubWeightBits)
    throw Error("sub-neuron patch must hold 256 bipolar values");
  int match = 0;
  for (int pos = 0; pos < 4; ++pos)
    match += std::popcount(~(patch.words()[pos] ^ subweights[pos]));
  return 2 * match - kSubWeightBits;
}

std::array<bool, 4> neuron_eval(const std::array<int, 4>& p, int s_mode,
                                std::span<const int32_t> thresholds) {
  if (thresholds.size() < std::size_t(s_mode))
    throw Error("need S thresholds");
  std::array<bool, 4> out{};
  switch (s_mode) {
    case 1:
      out[0] = sign_threshold(p[0] + p[1] + p[2] + p[3], thresholds[0]);
      break;
    case 2:
      out[0] = sign_threshold(p[0] + p[1], thresholds[0]);
      out[1] = sign_threshold(p[2] + p[3], thresholds[1]);
      break;
    case 4:
      for (int j = 0; j < 4; ++j) out[j] = sign_threshold(p[j], thresholds[j]);
      break;
    default:
      throw Error("S must be one of {1,2,4}");
  }
  return out;
}

FeatureMapSet conv_layer(const FeatureMapSet& inputs,
                         const LayerWeights& weights, TraceSink* sink,
                         int layer_index) {
  check_set(inputs);
  if (weights.kind != LayerKind::Cnn) throw Error("conv_layer needs a CNN layer");
  if (weights.s_mode != inputs.s_mode)
    throw Error("layer S-mode does not match input set");
  const int s = weights.s_mode;
  const int phases = weights.phases();
  if (weights.neurons.size() != std::size_t(kNeuronCount) * phases)
    throw Error("layer must hold 64 neurons per phase");
  const int w = inputs.width(), h = inputs.height();
  if (w < 2 || h < 2) throw Error("convolution input must be at least 2x2");

  BinaryFeatureMap in = inputs.concat();
  const int ow = w - 1, oh = h - 1;
  BinaryFeatureMap out(256, ow, oh);
  const int fpm = 256 / s;
  const uint64_t* iw = in.payload().data();
  const uint64_t ops_per_step = uint64_t(2) * kNeuronCount * kNeuronWeightBits / s;

  for (int p = 0; p < phases; ++p) {
    emit(sink, EventKind::Ld, layer_index, p, kPhaseWeightBits, 0);
    emit(sink, EventKind::SramRd, layer_index, p,
         uint64_t(kNeuronCount) * s * kThresholdBits, 0);
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        const uint64_t* site[4] = {
            iw + in.site_word(x, y), iw + in.site_word(x + 1, y),
            iw + in.site_word(x, y + 1), iw + in.site_word(x + 1, y + 1)};
        for (int n = 0; n < kNeuronCount; ++n) {
          const NeuronWeights& nw = weights.neurons[p * kNeuronCount + n];
          std::array<int, 4> partials;
          for (int j = 0; j < 4; ++j) {
            int match = 0;
            for (int pos = 0; pos < 4; ++pos)
              match += std::popcount(~(site[pos][j] ^ nw.bits[j * 4 + pos]));
            partials[j] = 2 * match - kSubWeightBits;
          }
          auto bits = neuron_eval(partials, s,
                                  std::span<const int32_t>(nw.thresholds));
          for (int m = 0; m < s; ++m)
            out.set(m * fpm + p * kNeuronCount + n, x, y, bits[m]);
        }
        if (sink) {
          // First step of a row fetches the whole 2x2 window; later steps
          // reuse 2 sites from the previous step.
          emit(sink, EventKind::ConvStep, layer_index, p, 0, ops_per_step);
          emit(sink, EventKind::SramRd, layer_index, p,
               uint64_t(x == 0 ? 4 : 2) * 256, 0);
          emit(sink, EventKind::SramWr, layer_index, p, uint64_t(kNeuronCount) * s,
               0);
        }
      }
    }
  }
  if (weights.pool) out = maxpool_stream(out);
  return FeatureMapSet::split(out, s);
}

BinaryFeatureMap maxpool_stream(const BinaryFeatureMap& map) {
  const int w = map.width(), h = map.height();
  if (w < 2 || h < 2) throw Error("max-pooling needs at least a 2x2 map");
  const int ow = w / 2, oh = h / 2;
  BinaryFeatureMap out(map.channels(), ow, oh);
  const std::size_t wps = map.words_per_site();
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      std::size_t d = out.site_word(x, y);
      std::size_t a = map.site_word(2 * x, 2 * y);
      std::size_t b = map.site_word(2 * x + 1, 2 * y);
      std::size_t c = map.site_word(2 * x, 2 * y + 1);
      std::size_t e = map.site_word(2 * x + 1, 2 * y + 1);
      for (std::size_t j = 0; j < wps; ++j)
        out.payload()[d + j] = map.payload()[a + j] | map.payload()[b + j] |
                               map.payload()[c + j] | map.payload()[e + j];
    }
  return out;
}

FeatureMapSet first_layer(const IntegerImage& image, const LayerWeights& weights,
                          TraceSink* sink, int layer_index) {
  if (weights.kind != LayerKind::First)
    throw Error("first_layer needs a FIRST layer");
  const int s = weights.s_mode;
  if (s != 1 && s != 2 && s != 4) throw Error("S must be one of {1,2,4}");
  const int phases = weights.phases();
  if (weights.neurons.size() != std::size_t(kNeuronCount) * phases)
    throw Error("layer must hold 64 neurons per phase");

  const int ow = IntegerImage::kWidth - 1, oh = IntegerImage::kHeight - 1;
  BinaryFeatureMap out(256, ow, oh);
  const int fpm = 256 / s;
  const uint64_t ops_per_step = uint64_t(2) * kNeuronCount * kNeuronWeightBits / s;
  const uint64_t site_bits = IntegerImage::kChannels * 7;

  for (int p = 0; p < phases; ++p) {
    emit(sink, EventKind::Ld, layer_index, p, kPhaseWeightBits, 0);
    emit(sink, EventKind::SramRd, layer_index, p,
         uint64_t(kNeuronCount) * s * kThresholdBits, 0);
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        for (int n = 0; n < kNeuronCount; ++n) {
          const NeuronWeights& nw = weights.neurons[p * kNeuronCount + n];
          int dot = 0;
          for (int pos = 0; pos < 4; ++pos) {
            int dx = pos & 1, dy = pos >> 1;
            for (int c = 0; c < IntegerImage::kChannels; ++c) {
              int sign = nw.weight_bit(0, pos, c) ? +1 : -1;
              dot += sign * int(image.pixel(c, x + dx, y + dy));
            }
          }
          for (int m = 0; m < s; ++m)
            out.set(m * fpm + p * kNeuronCount + n, x, y,
                    sign_threshold(dot, nw.thresholds[m]));
        }
        if (sink) {
          emit(sink, EventKind::ConvStep, layer_index, p, 0, ops_per_step);
          emit(sink, EventKind::SramRd, layer_index, p,
               uint64_t(x == 0 ? 4 : 2) * site_bits, 0);
          emit(sink, EventKind::SramWr, layer_index, p, uint64_t(kNeuronCount) * s,
               0);
        }
      }
    }
  }
  BinaryFeatureMap result = weights.pool ? maxpool_stream(out) : out;
  return FeatureMapSet::split(result, s);
}

FcResult fc_layer(const BinaryFeatureMap& features, const LayerWeights& weights) {
  if (weights.kind != LayerKind::Fc) throw Error("fc_layer needs an FC layer");
  const std::size_t n = features.bit_count();
  if (n > kMaxFcFeatureBits)
    throw Error("FC feature length exceeds 4096 bits");
  const std::size_t classes = weights.class_weights.size();
  if (classes < 2 || classes > kMaxFcClasses)
    throw Error("FC class count must be in [2,10]");
  if (weights.class_biases.size() != classes)
    throw Error("FC bias count must match class count");

  // The feature-map payload is already the flattened (c,x,y) bit order.
  BipolarVector flat(n);
  flat.words() = features.payload();
  flat.mask_tail();

  FcResult r;
  r.scores.reserve(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    if (weights.class_weights[c].length() != n)
      throw Error("FC class vector length does not match feature length");
    r.scores.push_back(bipolar_dot(flat, weights.class_weights[c]) +
                       weights.class_biases[c]);
  }
  r.label = 0;
  for (std::size_t c = 1; c < classes; ++c)
    if (r.scores[c] > r.scores[r.label]) r.label = int(c);
  return r;
}

}  // namespace binareye
