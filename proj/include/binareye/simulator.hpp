#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "binareye/compiler.hpp"
#include "binareye/isa.hpp"
#include "binareye/neuron_array.hpp"
#include "binareye/trace.hpp"

namespace binareye {

struct BankState {
  std::vector<uint64_t> words;  // 4096 x 64 = 262,144 bits
  int width = 0;
  int height = 0;
  bool valid = false;
};

struct LayerSummary {
  int ordinal;  // 1-based; IO instructions are not summarized
  LayerKind kind;
  int out_w = 0;
  int out_h = 0;
  uint64_t ops = 0;
  uint64_t ld_bits = 0;
};

struct RunResult {
  int label = -1;  // -1 when the program carries no FC layer
  std::vector<int64_t> scores;
  std::optional<BinaryFeatureMap> out_map;  // IO OUT_MAP payload
  std::vector<LayerSummary> layers;
  std::vector<TraceEvent> trace;
  /// Concatenated 256-channel map written after each CNN layer, retained
  /// only when RunOptions::keep_layer_outputs is set.
  std::vector<BinaryFeatureMap> layer_outputs;
  uint64_t program_hash = 0;
};

struct RunOptions {
  bool collect_trace = true;
  bool keep_layer_outputs = false;
};

/// Full machine state: weight SRAM, two ping-pong feature banks, FC SRAM,
/// program memory and the staged 7-bit input image.
struct MachineState {
  std::vector<uint8_t> weight_sram;
  std::array<BankState, 2> banks;
  std::vector<uint8_t> fc_sram;
  std::vector<int16_t> fc_biases;
  Program program;
  std::size_t pc = 0;
  std::optional<IntegerImage> staged;

  // Execution context accumulated across steps.
  int cnn_count = 0;
  int current_s_mode = 0;
  int last_out_bank = -1;
  bool finalized = false;
  RunResult result;
  RunOptions options;
};

/// Initializes a machine from a memory image: feature banks cleared,
/// pc = 0. Throws on capacity overflow.
MachineState load_memory_image(const MemoryImage& image);

void set_program(MachineState& state, const Program& program);
void stage_input(MachineState& state, const IntegerImage& image);

/// Executes the instruction at pc and advances it.
void step(MachineState& state, TraceSink* sink = nullptr);

/// Input-to-label execution: deterministic in (program, image contents,
/// input image).
RunResult run(const Program& program, const MemoryImage& image,
              const IntegerImage& input, const RunOptions& options = {});

}  // namespace binareye
