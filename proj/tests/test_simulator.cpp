#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <map>

#include "binareye/oracle.hpp"
#include "binareye/simulator.hpp"
#include "binareye/trace.hpp"
#include "binareye/verify.hpp"
#include "doctest.h"

using namespace binareye;

namespace {

struct Compiled {
  CompileResult result;
  IntegerImage image;
};

Compiled make(int s_mode, uint64_t seed = 1) {
  NetworkDescription net = benchmark9(s_mode);
  return {compile_network(net, oracle::random_dense(net, seed)),
          oracle::random_image(seed)};
}

}  // namespace

TEST_CASE("phase law: exactly 4/S LD events per CNN layer") {
  for (int s : {1, 2, 4}) {
    Compiled c = make(s);
    RunResult r = run(c.result.program, c.result.image, c.image);
    std::map<int, int> ld_per_layer;
    for (const auto& e : r.trace)
      if (e.kind == EventKind::Ld) {
        ++ld_per_layer[e.layer];
        CHECK(e.bits == 65536);  // one full array preload
      }
    REQUIRE(ld_per_layer.size() == 8);
    for (const auto& [layer, count] : ld_per_layer) CHECK(count == 4 / s);
  }
}

TEST_CASE("trace conservation: event totals match the layer summaries") {
  Compiled c = make(1);
  RunResult r = run(c.result.program, c.result.image, c.image);

  std::map<int, uint64_t> conv_ops, ld_bits, wr_bits;
  uint64_t fc_ops = 0;
  for (const auto& e : r.trace) {
    if (e.kind == EventKind::ConvStep) conv_ops[e.layer] += e.ops;
    if (e.kind == EventKind::Ld) ld_bits[e.layer] += e.bits;
    if (e.kind == EventKind::SramWr) wr_bits[e.layer] += e.bits;
    if (e.kind == EventKind::FcEval) fc_ops += e.ops;
  }
  for (const auto& l : r.layers) {
    if (l.kind == LayerKind::Fc) {
      CHECK(fc_ops == l.ops);
      continue;
    }
    CHECK(conv_ops[l.ordinal] == l.ops);
    CHECK(ld_bits[l.ordinal] == l.ld_bits);
    // Every output bit is written exactly once, pre-pooling.
    auto cnn = std::get<CnnInstruction>(
        c.result.program.instructions[std::size_t(l.ordinal)]);
    CHECK(wr_bits[l.ordinal] ==
          uint64_t(256) * (cnn.width - 1) * (cnn.height - 1));
  }
}

TEST_CASE("input transfer accounts 21,504 image bits") {
  Compiled c = make(4);
  RunResult r = run(c.result.program, c.result.image, c.image);
  REQUIRE_FALSE(r.trace.empty());
  CHECK(r.trace.front().kind == EventKind::Io);
  CHECK(r.trace.front().bits == 21504);  // 32 x 32 x 3 x 7
  // Label output is one byte.
  CHECK(r.trace.back().kind == EventKind::Io);
  CHECK(r.trace.back().bits == 8);
}

TEST_CASE("feature banks ping-pong between layers") {
  Compiled c = make(1);
  MachineState state = load_memory_image(c.result.image);
  set_program(state, c.result.program);
  stage_input(state, c.image);

  step(state);  // IO IN
  step(state);  // FIRST layer -> east bank
  CHECK(state.banks[1].valid);
  CHECK_FALSE(state.banks[0].valid);
  CHECK(state.banks[1].width == 31);
  step(state);  // layer 2 -> west bank
  CHECK(state.banks[0].valid);
  CHECK(state.banks[0].width == 30);
  CHECK(state.last_out_bank == 0);
}

TEST_CASE("runs are deterministic and trace-collection does not change them") {
  Compiled c = make(2, 9);
  RunOptions quiet;
  quiet.collect_trace = false;
  RunResult a = run(c.result.program, c.result.image, c.image);
  RunResult b = run(c.result.program, c.result.image, c.image, quiet);
  CHECK(a.label == b.label);
  CHECK(a.scores == b.scores);
  CHECK(b.trace.empty());
  CHECK_FALSE(a.trace.empty());
  CHECK(a.program_hash == program_hash(c.result.program));
}

TEST_CASE("nets without a classifier stream the final map out") {
  auto rn = oracle::random_network(99, 1, 1);
  REQUIRE_FALSE(rn.description.has_fc());
  auto compiled = compile_network(rn.description, rn.params);
  RunResult r = run(compiled.program, compiled.image, oracle::random_image(99));
  CHECK(r.label == -1);
  CHECK(r.scores.empty());
  REQUIRE(r.out_map.has_value());
  CHECK(r.out_map->channels() == 256);
  CHECK(r.out_map->width() == 15);  // 31 pooled once
}

TEST_CASE("mismatched instruction geometry is rejected") {
  Compiled c = make(1);
  auto bad = c.result.program;
  auto& cnn = std::get<CnnInstruction>(bad.instructions[2]);
  cnn.width = 17;  // bank will hold a 31x31 map
  CHECK_THROWS_WITH_AS(run(bad, c.result.image, c.image),
                       doctest::Contains("shape mismatch"), Error);
}

TEST_CASE("FC checks its feature length against the final map") {
  Compiled c = make(1);
  auto bad = c.result.program;
  std::get<FcInstruction>(bad.instructions[9]).feature_bits = 2048;
  CHECK_THROWS_WITH_AS(run(bad, c.result.image, c.image),
                       doctest::Contains("feature length"), Error);
}

TEST_CASE("oversized memory images are rejected") {
  MemoryImage img;
  img.weight_sram.assign(kWeightSramBytes + 1, 0);
  CHECK_THROWS_WITH_AS(load_memory_image(img), doctest::Contains("259"), Error);
  img.weight_sram.clear();
  img.fc_sram.assign(kFcSramBytes + 1, 0);
  CHECK_THROWS_WITH_AS(load_memory_image(img), doctest::Contains("5 kB"), Error);
}

TEST_CASE("trace files round-trip through disk") {
  Compiled c = make(4);
  RunResult r = run(c.result.program, c.result.image, c.image);
  std::string path = "sim_trace_test.tmp";
  write_trace_file(path, r.program_hash, r.trace);
  TraceFile back = read_trace_file(path);
  std::remove(path.c_str());
  CHECK(back.program_hash == r.program_hash);
  REQUIRE(back.events.size() == r.trace.size());
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    CHECK(back.events[i].kind == r.trace[i].kind);
    CHECK(back.events[i].layer == r.trace[i].layer);
    CHECK(back.events[i].phase == r.trace[i].phase);
    CHECK(back.events[i].bits == r.trace[i].bits);
    CHECK(back.events[i].ops == r.trace[i].ops);
  }
}

TEST_CASE("end-to-end equivalence with the integer oracle") {
  // Small curated sweep here; the acceptance suite runs the big one.
  for (uint64_t seed : {101ull, 202ull, 303ull}) {
    VerifyOutcome outcome = verify_seed(seed, 1);
    INFO("seed ", seed, ": ", outcome.detail);
    CHECK(outcome.ok);
  }
}
