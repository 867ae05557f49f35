#include "binareye/simulator.hpp"

namespace binareye {

namespace {

constexpr std::size_t kBankWords = kBankBits / kWordBits;  // 4096

BinaryFeatureMap bank_to_map(const BankState& bank) {
  BinaryFeatureMap map(256, bank.width, bank.height);
  std::size_t words = map.payload().size();
  std::copy(bank.words.begin(), bank.words.begin() + words,
            map.payload().begin());
  return map;
}

void map_to_bank(const BinaryFeatureMap& map, BankState& bank) {
  if (map.bit_count() > kBankBits)
    throw Error("feature map does not fit a 32 kB bank");
  std::fill(bank.words.begin(), bank.words.end(), 0);
  std::copy(map.payload().begin(), map.payload().end(), bank.words.begin());
  bank.width = map.width();
  bank.height = map.height();
  bank.valid = true;
}

void exec_io(MachineState& state, const IoInstruction& io, TraceSink* sink) {
  switch (io.direction) {
    case IoDirection::In: {
      if (!state.staged) throw Error("IO IN executed with no staged input");
      if (sink)
        sink->emit(TraceEvent{EventKind::Io, 0, 0,
                              uint64_t(IntegerImage::kBytes) * 7, 0});
      break;
    }
    case IoDirection::OutLabel: {
      if (state.result.scores.empty())
        throw Error("IO OUT_LABEL before any FC layer");
      if (sink) sink->emit(TraceEvent{EventKind::Io, 0, 0, 8, 0});
      state.finalized = true;
      break;
    }
    case IoDirection::OutMap: {
      const BankState& bank = state.banks[int(io.bank)];
      if (!bank.valid) throw Error("IO OUT_MAP from an empty bank");
      state.result.out_map = bank_to_map(bank);
      if (sink)
        sink->emit(TraceEvent{EventKind::Io, 0, 0,
                              uint64_t(256) * bank.width * bank.height, 0});
      state.finalized = true;
      break;
    }
  }
}

void exec_cnn(MachineState& state, const CnnInstruction& cnn, TraceSink* sink) {
  const int s = cnn.s_mode;
  int layer_index = ++state.cnn_count;
  LayerWeights weights = decode_layer_weights(
      state.weight_sram, cnn.weight_base * uint32_t(kWeightRowBytes),
      cnn.first_layer, s, cnn.pool);

  FeatureMapSet out;
  if (cnn.first_layer) {
    if (!state.staged) throw Error("FIRST layer executed with no staged input");
    if (cnn.width != IntegerImage::kWidth || cnn.height != IntegerImage::kHeight)
      throw Error("FIRST layer must be 32x32");
    out = first_layer(*state.staged, weights, sink, layer_index);
  } else {
    const BankState& bank = state.banks[int(cnn.in_bank)];
    if (!bank.valid || bank.width != cnn.width || bank.height != cnn.height)
      throw Error("shape mismatch between bank contents and instruction WxH");
    FeatureMapSet in = FeatureMapSet::split(bank_to_map(bank), s);
    out = conv_layer(in, weights, sink, layer_index);
  }

  BinaryFeatureMap concat = out.concat();
  map_to_bank(concat, state.banks[int(cnn.out_bank)]);
  state.current_s_mode = s;
  state.last_out_bank = int(cnn.out_bank);
  if (state.options.keep_layer_outputs)
    state.result.layer_outputs.push_back(concat);

  LayerSummary summary{};
  summary.ordinal = layer_index;
  summary.kind = cnn.first_layer ? LayerKind::First : LayerKind::Cnn;
  summary.out_w = concat.width();
  summary.out_h = concat.height();
  uint64_t area = uint64_t(cnn.width - 1) * (cnn.height - 1);
  summary.ops = 2ull * (256 / s) * (256 / s) * 4 * area;
  summary.ld_bits = uint64_t(4 / s) * kPhaseWeightBits;
  state.result.layers.push_back(summary);
}

void exec_fc(MachineState& state, const FcInstruction& fc, TraceSink* sink) {
  if (state.last_out_bank < 0) throw Error("FC before any CNN output");
  const BankState& bank = state.banks[state.last_out_bank];
  const int s = state.current_s_mode;
  const int channels = 256 / s;
  int feature_bits = channels * bank.width * bank.height;
  if (feature_bits != fc.feature_bits)
    throw Error("FC feature length does not match the final feature map");

  // FC flattens the first of the S parallel maps (concat channels
  // [0, 256/S)).
  BinaryFeatureMap map = bank_to_map(bank);
  BinaryFeatureMap features(channels, bank.width, bank.height);
  std::size_t wps = channels / kWordBits;
  for (std::size_t site = 0; site < std::size_t(bank.width) * bank.height;
       ++site)
    for (std::size_t j = 0; j < wps; ++j)
      features.payload()[site * wps + j] = map.payload()[site * 4 + j];

  LayerWeights weights = decode_fc_weights(state.fc_sram, state.fc_biases,
                                           fc.feature_bits, fc.classes);
  FcResult r = fc_layer(features, weights);
  state.result.scores = r.scores;
  state.result.label = r.label;
  if (sink)
    sink->emit(TraceEvent{EventKind::FcEval, state.cnn_count + 1, 0,
                          uint64_t(fc.classes) * fc.feature_bits,
                          2ull * fc.feature_bits * fc.classes});

  LayerSummary summary{};
  summary.ordinal = state.cnn_count + 1;
  summary.kind = LayerKind::Fc;
  summary.ops = 2ull * fc.feature_bits * fc.classes;
  state.result.layers.push_back(summary);
}

}  // namespace

MachineState load_memory_image(const MemoryImage& image) {
  if (image.weight_sram.size() > kWeightSramBytes)
    throw Error("weight image exceeds 259 KiB capacity");
  if (image.fc_sram.size() > kFcSramBytes)
    throw Error("FC image exceeds 5 kB capacity");
  MachineState state;
  state.weight_sram = image.weight_sram;
  state.weight_sram.resize(kWeightSramBytes, 0);
  state.fc_sram = image.fc_sram;
  state.fc_sram.resize(kFcSramBytes, 0);
  state.fc_biases = image.fc_biases;
  for (auto& bank : state.banks) bank.words.assign(kBankWords, 0);
  return state;
}

void set_program(MachineState& state, const Program& program) {
  validate_program(program);
  state.program = program;
  state.pc = 0;
}

void stage_input(MachineState& state, const IntegerImage& image) {
  state.staged = image;
}

void step(MachineState& state, TraceSink* sink) {
  if (state.pc >= state.program.instructions.size())
    throw Error("program counter past end of program");
  const Instruction& ins = state.program.instructions[state.pc];
  if (const auto* io = std::get_if<IoInstruction>(&ins))
    exec_io(state, *io, sink);
  else if (const auto* cnn = std::get_if<CnnInstruction>(&ins))
    exec_cnn(state, *cnn, sink);
  else
    exec_fc(state, std::get<FcInstruction>(ins), sink);
  ++state.pc;
}

RunResult run(const Program& program, const MemoryImage& image,
              const IntegerImage& input, const RunOptions& options) {
  MachineState state = load_memory_image(image);
  set_program(state, program);
  stage_input(state, input);
  state.options = options;
  VectorTraceSink sink;
  TraceSink* sinkp = options.collect_trace ? &sink : nullptr;
  while (state.pc < state.program.instructions.size()) step(state, sinkp);
  state.result.trace = sink.take();
  state.result.program_hash = program_hash(program);
  return std::move(state.result);
}

}  // namespace binareye
