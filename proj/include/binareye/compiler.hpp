#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "binareye/dense.hpp"
#include "binareye/isa.hpp"
#include "binareye/neuron_array.hpp"

namespace binareye {

inline constexpr std::size_t kWeightSramBytes = 265216;  // 259 KiB
inline constexpr std::size_t kFcSramBytes = 5120;        // 5 kB
inline constexpr std::size_t kBankBits = 262144;         // 32 kB per bank
inline constexpr int kMaxCnnLayers = 14;
inline constexpr std::size_t kWeightRowBytes = kNeuronWeightBits / 8;  // 128

struct LayerDesc {
  LayerKind kind = LayerKind::Cnn;
  bool pool = false;
  int classes = 0;  // FC only
};

struct NetworkDescription {
  std::string name;
  int input_w = 32;
  int input_h = 32;
  int input_ch = 3;
  int input_bits = 7;
  int s_mode = 1;
  std::vector<LayerDesc> layers;

  int cnn_layer_count() const;
  bool has_fc() const;
  int fc_classes() const;
};

/// Line-oriented description: `name X`, `input 32 32 3 7`, `smode S`,
/// `layer cnn [pool=0|1]`, `layer fc classes=N`, `#` comments.
NetworkDescription parse_network(const std::string& text);
NetworkDescription load_network(const std::string& path);
std::string network_to_text(const NetworkDescription& net);

/// Per-CNN-layer spatial geometry after conv (-1) and optional pooling.
struct LayerShape {
  int in_w, in_h;
  int out_w, out_h;        // after conv
  int pooled_w, pooled_h;  // after optional pool (== out when no pool)
};

/// Tracks shapes through the network; throws on underflow.
std::vector<LayerShape> track_geometry(const NetworkDescription& net);

/// Diagnostics for every violated hardware constraint; empty iff
/// compile_network can succeed.
std::vector<std::string> check_constraints(const NetworkDescription& net);

struct LayerRegion {
  LayerKind kind;
  uint8_t s_mode;
  bool pool;
  uint8_t classes;   // FC only
  uint32_t base;     // byte offset into its SRAM
  uint32_t length;   // bytes
  uint8_t in_w, in_h;
};

/// Weight memory image: CNN layers in weight SRAM (per layer: 4/S phases
/// of 64 x 1024-bit rows, then 256 thresholds packed 12-bit, 384 B), FC
/// class vectors in FC SRAM. Class biases live in FC-logic registers, not
/// SRAM, so both paper capacity figures stay exact.
struct MemoryImage {
  std::vector<uint8_t> weight_sram;
  std::vector<uint8_t> fc_sram;
  std::vector<int16_t> fc_biases;
  std::vector<LayerRegion> layers;
};

struct CompileResult {
  Program program;
  MemoryImage image;
};

/// Compiles a network plus trained parameters into an instruction stream
/// and memory image. Banks alternate WEST->EAST->WEST...; the first CNN
/// layer is flagged FIRST; weight bases are in 1024-bit rows.
CompileResult compile_network(const NetworkDescription& net,
                              const DenseNet& params);

/// Raises the packed form of one CNN/FIRST layer back out of weight SRAM.
LayerWeights decode_layer_weights(std::span<const uint8_t> weight_sram,
                                  uint32_t base_bytes, bool first, int s_mode,
                                  bool pool);

/// Reconstructs FC weights from FC SRAM plus the bias registers.
LayerWeights decode_fc_weights(std::span<const uint8_t> fc_sram,
                               std::span<const int16_t> biases,
                               int feature_bits, int classes);

/// 12-bit two's-complement threshold packing, two values per 3 bytes.
std::vector<uint8_t> pack_thresholds12(const std::vector<int32_t>& values);
std::vector<int32_t> unpack_thresholds12(std::span<const uint8_t> bytes,
                                         std::size_t count);

/// Weight container file: magic "BNRY", version u16, layer table, then the
/// raw weight/FC SRAM payloads and bias registers (all little-endian).
std::vector<uint8_t> serialize_container(const MemoryImage& image);
MemoryImage deserialize_container(const std::vector<uint8_t>& bytes);
void save_container(const MemoryImage& image, const std::string& path);
MemoryImage load_container(const std::string& path);

/// The repo's reference 9-layer network (8 CNN + FC/10, pools after
/// layers 4 and 6): 32 -> 31,30,29,28 ->14, 13,12 ->6, 5,4, FC on
/// (256/S)*16 bits. A reconstruction of the usual always-on benchmark
/// geometry, not measured silicon.
NetworkDescription benchmark9(int s_mode);

}  // namespace binareye
