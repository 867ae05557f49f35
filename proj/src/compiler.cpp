#include "binareye/compiler.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

namespace binareye {

namespace {

constexpr std::size_t kPhaseWeightBytes = kNeuronCount * kWeightRowBytes;  // 8192
constexpr std::size_t kThresholdBlockBytes = 384;  // 256 x 12-bit

std::size_t conv_region_bytes(int s_mode) {
  return (4 / s_mode) * kPhaseWeightBytes + kThresholdBlockBytes;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

void write_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(uint8_t(v & 0xFF));
  out.push_back(uint8_t(v >> 8));
}

void write_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(uint8_t((v >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(const std::vector<uint8_t>& bytes) : bytes_(bytes) {}
  uint8_t u8() { return take(1)[0]; }
  uint16_t u16() {
    const uint8_t* p = take(2);
    return uint16_t(p[0]) | uint16_t(p[1]) << 8;
  }
  uint32_t u32() {
    const uint8_t* p = take(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= uint32_t(p[i]) << (8 * i);
    return v;
  }
  const uint8_t* take(std::size_t n) {
    if (pos_ + n > bytes_.size())
      throw Error("container truncated at byte " + std::to_string(bytes_.size()));
    const uint8_t* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::vector<uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

int NetworkDescription::cnn_layer_count() const {
  int n = 0;
  for (const auto& l : layers)
    if (l.kind != LayerKind::Fc) ++n;
  return n;
}

bool NetworkDescription::has_fc() const {
  return !layers.empty() && layers.back().kind == LayerKind::Fc;
}

int NetworkDescription::fc_classes() const {
  return has_fc() ? layers.back().classes : 0;
}

NetworkDescription parse_network(const std::string& text) {
  NetworkDescription net;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    key = lower(key);
    auto bad = [&](const std::string& msg) {
      throw Error("line " + std::to_string(lineno) + ": " + msg);
    };
    if (key == "name") {
      if (!(ls >> net.name)) bad("name needs a value");
    } else if (key == "input") {
      if (!(ls >> net.input_w >> net.input_h >> net.input_ch >> net.input_bits))
        bad("input needs: width height channels bits");
    } else if (key == "smode") {
      if (!(ls >> net.s_mode)) bad("smode needs a value");
    } else if (key == "layer") {
      std::string kind;
      if (!(ls >> kind)) bad("layer needs a kind (cnn or fc)");
      kind = lower(kind);
      LayerDesc desc;
      if (kind == "cnn")
        desc.kind = LayerKind::Cnn;
      else if (kind == "fc")
        desc.kind = LayerKind::Fc;
      else
        bad("unknown layer kind '" + kind + "'");
      std::string opt;
      while (ls >> opt) {
        auto eq = opt.find('=');
        std::string k = lower(eq == std::string::npos ? opt : opt.substr(0, eq));
        std::string v = eq == std::string::npos ? "" : opt.substr(eq + 1);
        if (k == "pool")
          desc.pool = v != "0";
        else if (k == "classes")
          desc.classes = std::atoi(v.c_str());
        else
          bad("unknown layer option '" + opt + "'");
      }
      net.layers.push_back(desc);
    } else {
      bad("unknown directive '" + key + "'");
    }
  }
  return net;
}

NetworkDescription load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open network description: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_network(ss.str());
}

std::string network_to_text(const NetworkDescription& net) {
  std::ostringstream out;
  if (!net.name.empty()) out << "name " << net.name << "\n";
  out << "input " << net.input_w << ' ' << net.input_h << ' ' << net.input_ch
      << ' ' << net.input_bits << "\n";
  out << "smode " << net.s_mode << "\n";
  for (const auto& l : net.layers) {
    if (l.kind == LayerKind::Fc)
      out << "layer fc classes=" << l.classes << "\n";
    else
      out << "layer cnn pool=" << int(l.pool) << "\n";
  }
  return out.str();
}

std::vector<LayerShape> track_geometry(const NetworkDescription& net) {
  std::vector<LayerShape> shapes;
  int w = net.input_w, h = net.input_h;
  int ncnn = net.cnn_layer_count();
  int i = 0;
  for (const auto& l : net.layers) {
    if (l.kind == LayerKind::Fc) break;
    LayerShape s{};
    s.in_w = w;
    s.in_h = h;
    if (w < 2 || h < 2)
      throw Error("layer " + std::to_string(i + 1) +
                  ": spatial dimension drops below 2");
    s.out_w = w - 1;
    s.out_h = h - 1;
    s.pooled_w = l.pool ? s.out_w / 2 : s.out_w;
    s.pooled_h = l.pool ? s.out_h / 2 : s.out_h;
    if (s.pooled_w < 1 || s.pooled_h < 1)
      throw Error("layer " + std::to_string(i + 1) +
                  ": pooling empties the feature map");
    // Intermediate maps must still admit a 2x2 window.
    if (i + 1 < ncnn && (s.pooled_w < 2 || s.pooled_h < 2))
      throw Error("layer " + std::to_string(i + 2) +
                  ": spatial dimension drops below 2");
    shapes.push_back(s);
    w = s.pooled_w;
    h = s.pooled_h;
    ++i;
  }
  return shapes;
}

std::vector<std::string> check_constraints(const NetworkDescription& net) {
  std::vector<std::string> out;
  if (net.input_w != 32 || net.input_h != 32)
    out.push_back("input must be 32x32 (W×H up to 32×32)");
  if (net.input_ch != 3 || net.input_bits != 7)
    out.push_back("input must be 3-channel with 7-bit pixels");
  if (net.s_mode != 1 && net.s_mode != 2 && net.s_mode != 4)
    out.push_back("F must be 256/S ∈ {64,128,256}: S must be one of {1,2,4}");
  int ncnn = net.cnn_layer_count();
  if (ncnn < 1 || ncnn > kMaxCnnLayers)
    out.push_back("CNN layer count must be in [1,14]");
  int fc_count = 0;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (net.layers[i].kind == LayerKind::Fc) {
      ++fc_count;
      if (i + 1 != net.layers.size())
        out.push_back("FC layer must be the last layer");
      if (net.layers[i].classes < 2 || net.layers[i].classes > kMaxFcClasses)
        out.push_back("FC class count must be in [2,10]");
    }
  }
  if (fc_count > 1) out.push_back("at most one FC layer is supported");
  if (!out.empty()) return out;  // geometry needs a structurally sane net

  std::vector<LayerShape> shapes;
  try {
    shapes = track_geometry(net);
  } catch (const Error& e) {
    out.push_back(e.what());
    return out;
  }
  std::size_t weight_bytes = std::size_t(ncnn) * conv_region_bytes(net.s_mode);
  if (weight_bytes > kWeightSramBytes)
    out.push_back("weight SRAM overflow: " + std::to_string(weight_bytes) +
                  " B exceeds " + std::to_string(kWeightSramBytes) + " B");
  if (net.has_fc()) {
    std::size_t features =
        std::size_t(256 / net.s_mode) * shapes.back().pooled_w *
        shapes.back().pooled_h;
    if (features > kMaxFcFeatureBits)
      out.push_back("FC feature length " + std::to_string(features) +
                    " exceeds 4096 bits");
    else if (std::size_t(net.fc_classes()) * features / 8 > kFcSramBytes)
      out.push_back("FC SRAM overflow");
  }
  return out;
}

std::vector<uint8_t> pack_thresholds12(const std::vector<int32_t>& values) {
  if (values.size() % 2) throw Error("threshold count must be even");
  std::vector<uint8_t> out;
  out.reserve(values.size() / 2 * 3);
  for (std::size_t i = 0; i < values.size(); i += 2) {
    for (int k = 0; k < 2; ++k) {
      int32_t v = values[i + k];
      if (v < -2048 || v > 2047)
        throw Error("threshold " + std::to_string(v) +
                    " outside 12-bit signed range");
    }
    uint32_t a = uint32_t(values[i]) & 0xFFF;
    uint32_t b = uint32_t(values[i + 1]) & 0xFFF;
    out.push_back(uint8_t(a & 0xFF));
    out.push_back(uint8_t((a >> 8) | ((b & 0xF) << 4)));
    out.push_back(uint8_t(b >> 4));
  }
  return out;
}

std::vector<int32_t> unpack_thresholds12(std::span<const uint8_t> bytes,
                                         std::size_t count) {
  if (count % 2 || bytes.size() < count / 2 * 3)
    throw Error("threshold block too short");
  std::vector<int32_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count / 2; ++i) {
    uint32_t b0 = bytes[3 * i], b1 = bytes[3 * i + 1], b2 = bytes[3 * i + 2];
    uint32_t a = b0 | ((b1 & 0xF) << 8);
    uint32_t b = (b1 >> 4) | (b2 << 4);
    auto sext = [](uint32_t v) {
      return int32_t(v & 0x800 ? v | 0xFFFFF000u : v);
    };
    out.push_back(sext(a));
    out.push_back(sext(b));
  }
  return out;
}

namespace {

void check_params_shape(const NetworkDescription& net, const DenseNet& params,
                        const std::vector<LayerShape>& shapes) {
  int ncnn = net.cnn_layer_count();
  int fc = 256 / net.s_mode;
  if (params.s_mode != net.s_mode)
    throw Error("parameter S-mode does not match network");
  if (params.conv.size() != std::size_t(ncnn))
    throw Error("parameter set has wrong CNN layer count");
  for (int i = 0; i < ncnn; ++i) {
    const auto& l = params.conv[i];
    bool first = i == 0;
    int channels = first ? 3 : fc;
    if (l.first != first || l.filters != fc || l.channels != channels)
      throw Error("layer " + std::to_string(i + 1) + ": parameter shape mismatch");
    if (l.weights.size() != std::size_t(fc) * 4 * channels ||
        l.thresholds.size() != std::size_t(fc))
      throw Error("layer " + std::to_string(i + 1) + ": parameter size mismatch");
  }
  if (net.has_fc() != params.fc.has_value())
    throw Error("parameter set and network disagree about the FC layer");
  if (params.fc) {
    std::size_t features =
        std::size_t(fc) * shapes.back().pooled_w * shapes.back().pooled_h;
    if (params.fc->classes != net.fc_classes() ||
        params.fc->feature_bits != int(features) ||
        params.fc->weights.size() != std::size_t(params.fc->classes) * features ||
        params.fc->biases.size() != std::size_t(params.fc->classes))
      throw Error("FC parameter shape mismatch");
  }
}

NeuronWeights pack_neuron(const DenseConvLayer& layer, int filter, int s_mode) {
  NeuronWeights nw{};
  if (layer.first) {
    for (int pos = 0; pos < 4; ++pos)
      for (int c = 0; c < 3; ++c)
        nw.set_weight_bit(0, pos, c, layer.weight(filter, pos, c) > 0);
  } else {
    // Sub-neuron j serves concatenated channels [64j, 64j+64); parallel
    // maps replicate the logical kernel across sub-neuron groups.
    for (int j = 0; j < kSubNeurons; ++j) {
      int base = (64 * j) % layer.channels;
      for (int pos = 0; pos < 4; ++pos)
        for (int c = 0; c < 64; ++c)
          nw.set_weight_bit(j, pos, c, layer.weight(filter, pos, base + c) > 0);
    }
  }
  for (int s = 0; s < s_mode; ++s)
    nw.thresholds[s] = layer.thresholds[filter];
  return nw;
}

void store_row(std::vector<uint8_t>& sram, std::size_t offset,
               const NeuronWeights& nw) {
  for (int k = 0; k < kNeuronWeightWords; ++k)
    for (int b = 0; b < 8; ++b)
      sram[offset + 8 * k + b] = uint8_t((nw.bits[k] >> (8 * b)) & 0xFF);
}

}  // namespace

CompileResult compile_network(const NetworkDescription& net,
                              const DenseNet& params) {
  auto diags = check_constraints(net);
  if (!diags.empty()) {
    std::string msg = "network violates hardware constraints:";
    for (const auto& d : diags) msg += "\n  " + d;
    throw Error(msg);
  }
  auto shapes = track_geometry(net);
  check_params_shape(net, params, shapes);

  const int s = net.s_mode;
  const int phases = 4 / s;
  const int ncnn = net.cnn_layer_count();

  CompileResult result;
  MemoryImage& img = result.image;
  img.weight_sram.assign(std::size_t(ncnn) * conv_region_bytes(s), 0);

  Program& prog = result.program;
  prog.instructions.push_back(IoInstruction{IoDirection::In, Bank::West});

  std::size_t base = 0;
  for (int i = 0; i < ncnn; ++i) {
    const auto& layer = params.conv[i];
    for (int p = 0; p < phases; ++p)
      for (int n = 0; n < kNeuronCount; ++n) {
        NeuronWeights nw = pack_neuron(layer, p * kNeuronCount + n, s);
        store_row(img.weight_sram,
                  base + (std::size_t(p) * kNeuronCount + n) * kWeightRowBytes,
                  nw);
      }
    std::vector<int32_t> thresholds;
    thresholds.reserve(std::size_t(phases) * kNeuronCount * s);
    for (int p = 0; p < phases; ++p)
      for (int n = 0; n < kNeuronCount; ++n)
        for (int k = 0; k < s; ++k)
          thresholds.push_back(layer.thresholds[p * kNeuronCount + n]);
    auto packed = pack_thresholds12(thresholds);
    std::copy(packed.begin(), packed.end(),
              img.weight_sram.begin() + base + phases * kPhaseWeightBytes);

    LayerRegion region{};
    region.kind = i == 0 ? LayerKind::First : LayerKind::Cnn;
    region.s_mode = uint8_t(s);
    region.pool = net.layers[i].pool;
    region.base = uint32_t(base);
    region.length = uint32_t(conv_region_bytes(s));
    region.in_w = uint8_t(shapes[i].in_w);
    region.in_h = uint8_t(shapes[i].in_h);
    img.layers.push_back(region);

    CnnInstruction cnn;
    cnn.s_mode = s;
    cnn.width = shapes[i].in_w;
    cnn.height = shapes[i].in_h;
    cnn.pool = net.layers[i].pool;
    cnn.first_layer = i == 0;
    cnn.weight_base = uint32_t(base / kWeightRowBytes);
    cnn.in_bank = i % 2 == 0 ? Bank::West : Bank::East;
    cnn.out_bank = i % 2 == 0 ? Bank::East : Bank::West;
    prog.instructions.push_back(cnn);

    base += conv_region_bytes(s);
  }

  Bank final_bank = (ncnn - 1) % 2 == 0 ? Bank::East : Bank::West;
  if (net.has_fc()) {
    const auto& fc = *params.fc;
    img.fc_sram.assign(std::size_t(fc.classes) * fc.feature_bits / 8, 0);
    for (int c = 0; c < fc.classes; ++c)
      for (int b = 0; b < fc.feature_bits; ++b)
        if (fc.weight(c, b) > 0) {
          std::size_t bit = std::size_t(c) * fc.feature_bits + b;
          img.fc_sram[bit / 8] |= uint8_t(1u << (bit % 8));
        }
    for (int32_t bias : fc.biases) {
      if (bias < -32768 || bias > 32767)
        throw Error("FC bias outside 16-bit signed range");
      img.fc_biases.push_back(int16_t(bias));
    }
    LayerRegion region{};
    region.kind = LayerKind::Fc;
    region.s_mode = uint8_t(s);
    region.classes = uint8_t(fc.classes);
    region.base = 0;
    region.length = uint32_t(img.fc_sram.size());
    region.in_w = uint8_t(shapes.back().pooled_w);
    region.in_h = uint8_t(shapes.back().pooled_h);
    img.layers.push_back(region);

    prog.instructions.push_back(FcInstruction{fc.feature_bits, fc.classes});
    if (prog.instructions.size() < 16)
      prog.instructions.push_back(
          IoInstruction{IoDirection::OutLabel, Bank::West});
  } else {
    prog.instructions.push_back(IoInstruction{IoDirection::OutMap, final_bank});
  }

  validate_program(prog);
  if (img.weight_sram.size() > kWeightSramBytes)
    throw Error("weight SRAM overflow");
  if (img.fc_sram.size() > kFcSramBytes) throw Error("FC SRAM overflow");
  return result;
}

LayerWeights decode_layer_weights(std::span<const uint8_t> weight_sram,
                                  uint32_t base_bytes, bool first, int s_mode,
                                  bool pool) {
  if (s_mode != 1 && s_mode != 2 && s_mode != 4)
    throw Error("S must be one of {1,2,4}");
  const int phases = 4 / s_mode;
  std::size_t need = base_bytes + phases * kPhaseWeightBytes + kThresholdBlockBytes;
  if (need > weight_sram.size())
    throw Error("weight region extends past end of weight SRAM");

  LayerWeights lw;
  lw.kind = first ? LayerKind::First : LayerKind::Cnn;
  lw.s_mode = s_mode;
  lw.pool = pool;
  lw.neurons.resize(std::size_t(phases) * kNeuronCount);
  for (int p = 0; p < phases; ++p)
    for (int n = 0; n < kNeuronCount; ++n) {
      std::size_t off =
          base_bytes + (std::size_t(p) * kNeuronCount + n) * kWeightRowBytes;
      NeuronWeights& nw = lw.neurons[std::size_t(p) * kNeuronCount + n];
      for (int k = 0; k < kNeuronWeightWords; ++k) {
        uint64_t w = 0;
        for (int b = 0; b < 8; ++b)
          w |= uint64_t(weight_sram[off + 8 * k + b]) << (8 * b);
        nw.bits[k] = w;
      }
    }
  auto thresholds = unpack_thresholds12(
      weight_sram.subspan(base_bytes + phases * kPhaseWeightBytes,
                          kThresholdBlockBytes),
      std::size_t(phases) * kNeuronCount * s_mode);
  for (int p = 0; p < phases; ++p)
    for (int n = 0; n < kNeuronCount; ++n)
      for (int s = 0; s < s_mode; ++s)
        lw.neurons[std::size_t(p) * kNeuronCount + n].thresholds[s] =
            thresholds[(std::size_t(p) * kNeuronCount + n) * s_mode + s];
  return lw;
}

LayerWeights decode_fc_weights(std::span<const uint8_t> fc_sram,
                               std::span<const int16_t> biases,
                               int feature_bits, int classes) {
  if (std::size_t(classes) * feature_bits / 8 > fc_sram.size())
    throw Error("FC region extends past end of FC SRAM");
  if (biases.size() != std::size_t(classes))
    throw Error("FC bias count must match class count");
  LayerWeights lw;
  lw.kind = LayerKind::Fc;
  for (int c = 0; c < classes; ++c) {
    BipolarVector v(feature_bits);
    for (int b = 0; b < feature_bits; ++b) {
      std::size_t bit = std::size_t(c) * feature_bits + b;
      if (fc_sram[bit / 8] & (1u << (bit % 8))) v.set(b, true);
    }
    lw.class_weights.push_back(std::move(v));
    lw.class_biases.push_back(biases[c]);
  }
  return lw;
}

std::vector<uint8_t> serialize_container(const MemoryImage& image) {
  std::vector<uint8_t> out = {'B', 'N', 'R', 'Y'};
  write_u16(out, 1);
  write_u16(out, uint16_t(image.layers.size()));
  for (const auto& l : image.layers) {
    out.push_back(uint8_t(l.kind));
    out.push_back(l.s_mode);
    out.push_back(uint8_t(l.pool));
    out.push_back(l.classes);
    write_u32(out, l.base);
    write_u32(out, l.length);
    out.push_back(l.in_w);
    out.push_back(l.in_h);
    write_u16(out, 0);
  }
  write_u32(out, uint32_t(image.weight_sram.size()));
  out.insert(out.end(), image.weight_sram.begin(), image.weight_sram.end());
  write_u32(out, uint32_t(image.fc_sram.size()));
  out.insert(out.end(), image.fc_sram.begin(), image.fc_sram.end());
  out.push_back(uint8_t(image.fc_biases.size()));
  for (int16_t b : image.fc_biases) write_u16(out, uint16_t(b));
  return out;
}

MemoryImage deserialize_container(const std::vector<uint8_t>& bytes) {
  Reader r(bytes);
  const uint8_t* magic = r.take(4);
  if (std::memcmp(magic, "BNRY", 4) != 0)
    throw Error("not a weight container (bad magic)");
  if (r.u16() != 1) throw Error("unsupported container version");
  MemoryImage img;
  std::size_t layers = r.u16();
  for (std::size_t i = 0; i < layers; ++i) {
    LayerRegion l{};
    uint8_t kind = r.u8();
    if (kind > 2) throw Error("invalid layer kind in container");
    l.kind = LayerKind(kind);
    l.s_mode = r.u8();
    l.pool = r.u8() != 0;
    l.classes = r.u8();
    l.base = r.u32();
    l.length = r.u32();
    l.in_w = r.u8();
    l.in_h = r.u8();
    r.u16();
    img.layers.push_back(l);
  }
  std::size_t wlen = r.u32();
  if (wlen > kWeightSramBytes) throw Error("weight payload exceeds 259 KiB");
  const uint8_t* wp = r.take(wlen);
  img.weight_sram.assign(wp, wp + wlen);
  std::size_t flen = r.u32();
  if (flen > kFcSramBytes) throw Error("FC payload exceeds 5 kB");
  const uint8_t* fp = r.take(flen);
  img.fc_sram.assign(fp, fp + flen);
  std::size_t biases = r.u8();
  for (std::size_t i = 0; i < biases; ++i) img.fc_biases.push_back(int16_t(r.u16()));
  if (!r.done())
    throw Error("trailing bytes after container payload at byte " +
                std::to_string(r.pos()));
  return img;
}

void save_container(const MemoryImage& image, const std::string& path) {
  auto bytes = serialize_container(image);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open container for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            std::streamsize(bytes.size()));
  if (!out) throw Error("write failed: " + path);
}

MemoryImage load_container(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open container: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return deserialize_container(bytes);
}

NetworkDescription benchmark9(int s_mode) {
  NetworkDescription net;
  net.name = "benchmark9";
  net.s_mode = s_mode;
  for (int i = 0; i < 8; ++i) {
    LayerDesc l;
    l.kind = LayerKind::Cnn;
    l.pool = i == 3 || i == 5;  // after layers 4 and 6
    net.layers.push_back(l);
  }
  LayerDesc fc;
  fc.kind = LayerKind::Fc;
  fc.classes = 10;
  net.layers.push_back(fc);
  return net;
}

}  // namespace binareye
