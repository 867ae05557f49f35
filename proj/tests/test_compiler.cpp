#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "binareye/compiler.hpp"
#include "binareye/oracle.hpp"
#include "doctest.h"

using namespace binareye;

namespace {

CompileResult compile_benchmark(int s_mode, uint64_t seed = 1) {
  NetworkDescription net = benchmark9(s_mode);
  return compile_network(net, oracle::random_dense(net, seed));
}

}  // namespace

TEST_CASE("network description text round-trips") {
  NetworkDescription net = benchmark9(2);
  NetworkDescription back = parse_network(network_to_text(net));
  CHECK(back.name == net.name);
  CHECK(back.s_mode == 2);
  REQUIRE(back.layers.size() == net.layers.size());
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    CHECK(back.layers[i].kind == net.layers[i].kind);
    CHECK(back.layers[i].pool == net.layers[i].pool);
    CHECK(back.layers[i].classes == net.layers[i].classes);
  }
}

TEST_CASE("description parser flags bad lines with line numbers") {
  CHECK_THROWS_WITH_AS(parse_network("input 32 32 3 7\nbogus 1\n"),
                       doctest::Contains("line 2"), Error);
  CHECK_THROWS_WITH_AS(parse_network("layer dense\n"),
                       doctest::Contains("unknown layer kind"), Error);
}

TEST_CASE("geometry tracking: conv shrinks by 1, pool halves") {
  auto shapes = track_geometry(benchmark9(1));
  REQUIRE(shapes.size() == 8);
  CHECK(shapes[0].in_w == 32);
  CHECK(shapes[0].pooled_w == 31);
  CHECK(shapes[3].in_w == 29);
  CHECK(shapes[3].pooled_w == 14);  // 28 / 2
  CHECK(shapes[5].pooled_w == 6);   // 12 / 2
  CHECK(shapes[7].pooled_w == 4);

  // A deep unpooled stack underflows eventually.
  NetworkDescription deep;
  for (int i = 0; i < 14; ++i) deep.layers.push_back(LayerDesc{});
  deep.input_w = deep.input_h = 10;
  CHECK_THROWS_WITH_AS(track_geometry(deep),
                       doctest::Contains("drops below 2"), Error);
}

TEST_CASE("constraint checker reports every violation") {
  NetworkDescription net = benchmark9(1);
  CHECK(check_constraints(net).empty());

  net.s_mode = 3;
  net.input_w = 16;
  auto diags = check_constraints(net);
  REQUIRE(diags.size() == 2);
  CHECK(diags[0].find("32x32") != std::string::npos);
  CHECK(diags[1].find("{64,128,256}") != std::string::npos);

  // 9 full-rate layers exceed the weight SRAM: 9 x 33,152 > 265,216.
  NetworkDescription wide;
  for (int i = 0; i < 9; ++i) wide.layers.push_back(LayerDesc{});
  diags = check_constraints(wide);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0] == "weight SRAM overflow: 298368 B exceeds 265216 B");

  // FC over too large a map.
  NetworkDescription fat;
  fat.layers.push_back(LayerDesc{});
  fat.layers.push_back(LayerDesc{LayerKind::Fc, false, 10});
  diags = check_constraints(fat);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].find("exceeds 4096 bits") != std::string::npos);
}

TEST_CASE("12-bit threshold packing round-trips the full signed range") {
  std::mt19937_64 rng(8);
  std::vector<int32_t> values{-2048, 2047, 0, -1};
  for (int i = 0; i < 1000; ++i)
    values.push_back(int32_t(rng() % 4096) - 2048);
  auto packed = pack_thresholds12(values);
  CHECK(packed.size() == values.size() / 2 * 3);
  CHECK(unpack_thresholds12(packed, values.size()) == values);

  CHECK_THROWS_WITH_AS(pack_thresholds12({2048, 0}),
                       doctest::Contains("12-bit"), Error);
  CHECK_THROWS_WITH_AS(pack_thresholds12({0}), doctest::Contains("even"), Error);
}

TEST_CASE("reference network fills both SRAMs exactly") {
  for (int s : {1, 2, 4}) {
    auto result = compile_benchmark(s);
    if (s == 1) {
      CHECK(result.image.weight_sram.size() == kWeightSramBytes);  // 259 KiB
      CHECK(result.image.fc_sram.size() == kFcSramBytes);          // 5 kB
    } else {
      CHECK(result.image.weight_sram.size() ==
            std::size_t(8) * ((4 / s) * 8192 + 384));
      CHECK(result.image.fc_sram.size() ==
            std::size_t(10) * (256 / s) * 16 / 8);
    }
    CHECK(result.image.fc_biases.size() == 10);
  }
}

TEST_CASE("compiled program alternates banks and flags the first layer") {
  auto result = compile_benchmark(1);
  const auto& ins = result.program.instructions;
  REQUIRE(ins.size() == 11);  // IO IN + 8 CNN + FC + IO OUT
  CHECK(std::get<IoInstruction>(ins.front()).direction == IoDirection::In);
  Bank expect_in = Bank::West;
  std::size_t row_base = 0;
  for (int i = 0; i < 8; ++i) {
    auto cnn = std::get<CnnInstruction>(ins[1 + i]);
    CHECK(cnn.in_bank == expect_in);
    CHECK(cnn.out_bank != expect_in);
    CHECK(cnn.first_layer == (i == 0));
    CHECK(cnn.weight_base == row_base);
    row_base += 33152 / kWeightRowBytes;  // 259 rows per full-rate layer
    expect_in = cnn.out_bank;
  }
  auto fc = std::get<FcInstruction>(ins[9]);
  CHECK(fc.feature_bits == 4096);
  CHECK(fc.classes == 10);
  CHECK(std::get<IoInstruction>(ins.back()).direction == IoDirection::OutLabel);
}

TEST_CASE("nets whose tail cannot feed the classifier emit a map output") {
  // A single full-rate layer leaves 256 x 31 x 31 bits, far over the
  // classifier's 4,096-bit input, so the program streams the map out.
  auto rn = oracle::random_network(99, 1, 1);
  REQUIRE_FALSE(rn.description.has_fc());
  auto result = compile_network(rn.description, rn.params);
  const auto& last = std::get<IoInstruction>(result.program.instructions.back());
  CHECK(last.direction == IoDirection::OutMap);
  CHECK(last.bank == Bank::East);
}

TEST_CASE("compile rejects constraint violations and shape mismatches") {
  NetworkDescription nine;
  for (int i = 0; i < 9; ++i) nine.layers.push_back(LayerDesc{});
  CHECK_THROWS_WITH_AS(compile_network(nine, DenseNet{}),
                       doctest::Contains("weight SRAM overflow"), Error);

  NetworkDescription net = benchmark9(1);
  DenseNet params = oracle::random_dense(net, 1);
  params.conv[3].thresholds.pop_back();
  CHECK_THROWS_WITH_AS(compile_network(net, params),
                       doctest::Contains("layer 4"), Error);
}

TEST_CASE("packed layers decode back to the dense parameters") {
  for (int s : {1, 2, 4}) {
    NetworkDescription net = benchmark9(s);
    DenseNet params = oracle::random_dense(net, 5);
    auto result = compile_network(net, params);

    const int fpm = 256 / s;
    for (int li = 0; li < 8; ++li) {
      const auto& region = result.image.layers[li];
      LayerWeights lw = decode_layer_weights(result.image.weight_sram,
                                             region.base, li == 0, s,
                                             region.pool);
      const auto& dense = params.conv[li];
      for (int f = 0; f < fpm; ++f) {
        const auto& nw = lw.neurons[f];
        int channels = li == 0 ? 3 : 64;  // FIRST uses sub 0 only
        for (int pos = 0; pos < 4; ++pos)
          for (int c = 0; c < channels; ++c)
            REQUIRE(nw.weight_bit(0, pos, c) == (dense.weight(f, pos, c) > 0));
        for (int k = 0; k < s; ++k)
          REQUIRE(nw.thresholds[k] == dense.thresholds[f]);
      }
    }

    LayerWeights fcw = decode_fc_weights(result.image.fc_sram,
                                         result.image.fc_biases,
                                         params.fc->feature_bits, 10);
    for (int c = 0; c < 10; ++c) {
      REQUIRE(fcw.class_biases[c] == params.fc->biases[c]);
      for (int b = 0; b < params.fc->feature_bits; ++b)
        REQUIRE(fcw.class_weights[c].get(b) == (params.fc->weight(c, b) > 0));
    }
  }
}

TEST_CASE("weight container write -> read -> write is byte-identical") {
  for (int s : {1, 4}) {
    auto result = compile_benchmark(s, 3);
    auto bytes = serialize_container(result.image);
    CHECK(bytes[0] == 'B');
    CHECK(bytes[1] == 'N');
    CHECK(bytes[2] == 'R');
    CHECK(bytes[3] == 'Y');
    MemoryImage back = deserialize_container(bytes);
    CHECK(back.weight_sram == result.image.weight_sram);
    CHECK(back.fc_sram == result.image.fc_sram);
    CHECK(back.fc_biases == result.image.fc_biases);
    REQUIRE(back.layers.size() == result.image.layers.size());
    CHECK(serialize_container(back) == bytes);
  }
}

TEST_CASE("container loader rejects malformed files") {
  auto bytes = serialize_container(compile_benchmark(4).image);
  auto bad_magic = bytes;
  bad_magic[2] = 'X';
  CHECK_THROWS_WITH_AS(deserialize_container(bad_magic),
                       doctest::Contains("magic"), Error);
  auto truncated = bytes;
  truncated.resize(truncated.size() / 2);
  CHECK_THROWS_WITH_AS(deserialize_container(truncated),
                       doctest::Contains("truncated at byte"), Error);
  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_WITH_AS(deserialize_container(trailing),
                       doctest::Contains("trailing"), Error);
}
