// Exercises the shared-library surface the CLI is built on. Includes only
// the public C header.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <cstring>
#include <string>

#include "binareye.h"
#include "doctest.h"

TEST_CASE("version and error reporting") {
  CHECK(be_version() != nullptr);
  be_net* net = nullptr;
  CHECK(be_net_parse_string("layer dense\n", &net) != BE_OK);
  CHECK(std::strlen(be_last_error()) > 0);
  CHECK(be_net_builtin("nonsense", 1, &net) != BE_OK);
  CHECK(std::string(be_last_error()).find("nonsense") != std::string::npos);
}

TEST_CASE("parse, check, compile, run, report") {
  be_net* net = nullptr;
  REQUIRE(be_net_builtin("benchmark9", 2, &net) == BE_OK);
  CHECK(be_net_smode(net) == 2);

  char* diags = nullptr;
  REQUIRE(be_net_check(net, &diags) == BE_OK);
  CHECK(std::string(diags).empty());
  be_string_free(diags);

  be_weights* weights = nullptr;
  REQUIRE(be_weights_random(net, 11, &weights) == BE_OK);
  be_program* program = nullptr;
  be_memimg* image = nullptr;
  REQUIRE(be_compile(net, weights, &program, &image) == BE_OK);

  uint64_t wb = 0, fb = 0;
  be_memimg_stats(image, &wb, &fb);
  CHECK(wb == 8u * (2 * 8192 + 384));
  CHECK(fb == 10u * 2048 / 8);

  be_image* input = nullptr;
  REQUIRE(be_image_random(11, &input) == BE_OK);
  be_result* result = nullptr;
  REQUIRE(be_run(program, image, input, 1, &result) == BE_OK);
  int label = be_result_label(result);
  CHECK(label >= 0);
  CHECK(label < 10);
  REQUIRE(be_result_num_scores(result) == 10);
  int64_t scores[10];
  REQUIRE(be_result_scores(result, scores, 10) == BE_OK);
  CHECK(scores[label] >= scores[0]);
  int64_t too_small[2];
  CHECK(be_result_scores(result, too_small, 2) != BE_OK);

  char* summary = nullptr;
  REQUIRE(be_result_summary(result, &summary) == BE_OK);
  CHECK(std::string(summary).find("label") != std::string::npos);
  be_string_free(summary);

  char* report = nullptr;
  REQUIRE(be_report_net(net, 0, 0, 0, 0, 0, 1, &report) == BE_OK);
  CHECK(std::string(report).find("battery_days=33.75") != std::string::npos);
  be_string_free(report);

  be_result_free(result);
  be_image_free(input);
  be_memimg_free(image);
  be_program_free(program);
  be_weights_free(weights);
  be_net_free(net);
}

TEST_CASE("program and container files round-trip through the C API") {
  be_net* net = nullptr;
  REQUIRE(be_net_builtin("benchmark9", 4, &net) == BE_OK);
  be_weights* weights = nullptr;
  REQUIRE(be_weights_random(net, 3, &weights) == BE_OK);
  be_program* program = nullptr;
  be_memimg* image = nullptr;
  REQUIRE(be_compile(net, weights, &program, &image) == BE_OK);

  const char* prog_bin = "capi_prog.tmp";
  const char* prog_txt = "capi_prog_txt.tmp";
  const char* cont = "capi_weights.tmp";
  REQUIRE(be_program_save(program, prog_bin, 1) == BE_OK);
  REQUIRE(be_program_save(program, prog_txt, 0) == BE_OK);
  REQUIRE(be_memimg_save(image, cont) == BE_OK);

  char* want = nullptr;
  REQUIRE(be_program_disassemble(program, &want) == BE_OK);
  for (const char* path : {prog_bin, prog_txt}) {
    be_program* loaded = nullptr;
    REQUIRE(be_program_load(path, &loaded) == BE_OK);
    char* got = nullptr;
    REQUIRE(be_program_disassemble(loaded, &got) == BE_OK);
    CHECK(std::string(got) == want);
    be_string_free(got);
    be_program_free(loaded);
  }
  be_string_free(want);

  be_memimg* loaded = nullptr;
  REQUIRE(be_memimg_load(cont, &loaded) == BE_OK);
  uint64_t a = 0, b = 0, c = 0, d = 0;
  be_memimg_stats(image, &a, &b);
  be_memimg_stats(loaded, &c, &d);
  CHECK(a == c);
  CHECK(b == d);
  be_memimg_free(loaded);

  std::remove(prog_bin);
  std::remove(prog_txt);
  std::remove(cont);
  be_memimg_free(image);
  be_program_free(program);
  be_weights_free(weights);
  be_net_free(net);
}

TEST_CASE("assembly text goes straight through be_program_assemble") {
  be_program* program = nullptr;
  REQUIRE(be_program_assemble(
              "IO IN WEST\nCNN S=1 W=4 H=4 IN=WEST OUT=EAST\n", &program) ==
          BE_OK);
  char* text = nullptr;
  REQUIRE(be_program_disassemble(program, &text) == BE_OK);
  CHECK(std::string(text) ==
        "IO IN WEST\nCNN S=1 W=4 H=4 POOL=0 FIRST=0 WB=0 IN=WEST OUT=EAST\n");
  be_string_free(text);
  be_program_free(program);
  CHECK(be_program_assemble("CNN", &program) != BE_OK);
}

TEST_CASE("trace writing and trace-based reports") {
  be_net* net = nullptr;
  REQUIRE(be_net_builtin("benchmark9", 1, &net) == BE_OK);
  be_weights* weights = nullptr;
  REQUIRE(be_weights_random(net, 1, &weights) == BE_OK);
  be_program* program = nullptr;
  be_memimg* image = nullptr;
  REQUIRE(be_compile(net, weights, &program, &image) == BE_OK);
  be_image* input = nullptr;
  REQUIRE(be_image_random(1, &input) == BE_OK);
  be_result* result = nullptr;
  REQUIRE(be_run(program, image, input, 1, &result) == BE_OK);

  const char* trace = "capi_trace.tmp";
  REQUIRE(be_result_write_trace(result, trace) == BE_OK);
  char* report = nullptr;
  REQUIRE(be_report_trace(trace, 0, 0, 0, 0, 0, 1, &report) == BE_OK);
  CHECK(std::string(report).find("total ops=2013347840 cycles=49105") !=
        std::string::npos);
  be_string_free(report);
  std::remove(trace);

  be_result_free(result);
  be_image_free(input);
  be_memimg_free(image);
  be_program_free(program);
  be_weights_free(weights);
  be_net_free(net);
}

TEST_CASE("bench table and verification sweep") {
  char* text = nullptr;
  REQUIRE(be_bench(0, 0, &text) == BE_OK);
  CHECK(std::string(text).find("2013347840") != std::string::npos);
  be_string_free(text);

  char* report = nullptr;
  int passed = 0;
  REQUIRE(be_verify(500, 4, 1, 0, &report, &passed) == BE_OK);
  CHECK(passed == 4);
  CHECK(std::string(report).find("4/4 equivalent") != std::string::npos);
  be_string_free(report);
}
