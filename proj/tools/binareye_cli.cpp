// Command-line front end. Links only the C API so it doubles as a smoke
// test for the shared library surface.
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "binareye.h"

namespace {

[[noreturn]] void die(const char* what) {
  std::fprintf(stderr, "error: %s: %s\n", what, be_last_error());
  std::exit(1);
}

struct StringOut {
  char* value = nullptr;
  ~StringOut() { be_string_free(value); }
};

bool text_program_path(const std::string& path) {
  auto dot = path.rfind('.');
  if (dot == std::string::npos) return false;
  std::string ext = path.substr(dot + 1);
  return ext == "s" || ext == "asm";
}

be_net* open_net(const std::string& spec, int s_mode) {
  be_net* net = nullptr;
  if (spec.rfind("builtin:", 0) == 0) {
    if (be_net_builtin(spec.c_str() + 8, s_mode > 0 ? s_mode : 1, &net))
      die("builtin network");
  } else if (be_net_parse_file(spec.c_str(), &net)) {
    die("network description");
  }
  return net;
}

be_image* open_image(const std::string& path, uint64_t seed) {
  be_image* image = nullptr;
  if (!path.empty()) {
    StringOut warn;
    if (be_image_load(path.c_str(), &image, &warn.value)) die("input image");
    if (warn.value) std::fprintf(stderr, "warning: %s\n", warn.value);
  } else if (be_image_random(seed, &image)) {
    die("random image");
  }
  return image;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"binareye: compiler, bit-exact simulator and performance "
               "model for a 64-neuron binary-CNN processor"};
  app.require_subcommand(1);
  app.set_version_flag("--version", be_version());

  // --- asm: assembly text -> binary program ---------------------------
  std::string asm_in, asm_out;
  auto* cmd_asm = app.add_subcommand("asm", "Assemble a program");
  cmd_asm->add_option("input", asm_in, "Assembly source")->required();
  cmd_asm->add_option("-o,--output", asm_out, "Binary program file")->required();

  // --- disasm: program file -> assembly text --------------------------
  std::string dis_in, dis_out;
  auto* cmd_dis = app.add_subcommand("disasm", "Disassemble a program");
  cmd_dis->add_option("input", dis_in, "Program file")->required();
  cmd_dis->add_option("-o,--output", dis_out, "Assembly output (default stdout)");

  // --- compile: network description -> program + weight container -----
  std::string comp_net, comp_prog, comp_weights;
  uint64_t comp_seed = 1;
  int comp_smode = 0;
  bool comp_check = false;
  auto* cmd_comp = app.add_subcommand(
      "compile", "Compile a network description (training is out of scope; "
                 "parameters are drawn from --seed)");
  cmd_comp->add_option("network", comp_net,
                       "Description file, or builtin:benchmark9")->required();
  cmd_comp->add_option("-o,--program", comp_prog, "Output program file");
  cmd_comp->add_option("-w,--weights", comp_weights, "Output weight container");
  cmd_comp->add_option("--seed", comp_seed, "Parameter seed");
  cmd_comp->add_option("--smode", comp_smode, "S mode for builtin networks");
  cmd_comp->add_flag("--check", comp_check, "Only check constraints");

  // --- sim: run a compiled program -------------------------------------
  std::string sim_prog, sim_weights, sim_image, sim_trace;
  auto* cmd_sim = app.add_subcommand("sim", "Run a program on an input image");
  cmd_sim->add_option("program", sim_prog, "Program file")->required();
  cmd_sim->add_option("weights", sim_weights, "Weight container")->required();
  cmd_sim->add_option("-i,--image", sim_image,
                      "32x32 input (raw RGB or P6 PPM); random when omitted");
  cmd_sim->add_option("--trace", sim_trace, "Write an event trace here");

  // --- report: cycle/energy model -------------------------------------
  std::string rep_net, rep_trace, rep_format = "table";
  double rep_freq = 0, rep_budget = 0, rep_battery = 0;
  int rep_fw = 0, rep_fh = 0;
  int rep_smode = 0;
  auto* cmd_rep = app.add_subcommand("report", "Cycle and energy report");
  cmd_rep->add_option("--net", rep_net,
                      "Network description, or builtin:benchmark9");
  cmd_rep->add_option("--trace", rep_trace, "Recorded trace file");
  cmd_rep->add_option("--format", rep_format, "table or kv")
      ->check(CLI::IsMember({"table", "kv"}));
  cmd_rep->add_option("--freq-mhz", rep_freq, "Clock in MHz (default 6)");
  cmd_rep->add_option("--budget-mw", rep_budget, "Power budget (default 1)");
  cmd_rep->add_option("--battery-mwh", rep_battery, "Battery (default 810)");
  cmd_rep->add_option("--frame-w", rep_fw, "Detection frame width (default 160)");
  cmd_rep->add_option("--frame-h", rep_fh, "Detection frame height (default 120)");
  cmd_rep->add_option("--smode", rep_smode, "S mode for builtin networks");

  // --- verify: simulator vs integer oracle -----------------------------
  uint64_t ver_seed = 1;
  int ver_count = 25, ver_inputs = 2, ver_jobs = 0;
  auto* cmd_ver = app.add_subcommand(
      "verify", "Cross-check the simulator against the integer reference "
                "on random networks");
  cmd_ver->add_option("--seed", ver_seed, "First seed");
  cmd_ver->add_option("--count", ver_count, "Number of networks");
  cmd_ver->add_option("--inputs", ver_inputs, "Inputs per network");
  cmd_ver->add_option("--jobs", ver_jobs, "Worker threads (0 = auto)");

  // --- bench: reference network at every S mode -------------------------
  std::string bench_format = "table";
  double bench_freq = 0;
  auto* cmd_bench = app.add_subcommand("bench", "Reference network summary");
  cmd_bench->add_option("--format", bench_format, "table or kv")
      ->check(CLI::IsMember({"table", "kv"}));
  cmd_bench->add_option("--freq-mhz", bench_freq, "Clock in MHz (default 6)");

  CLI11_PARSE(app, argc, argv);

  if (cmd_asm->parsed()) {
    be_program* program = nullptr;
    if (be_program_load(asm_in.c_str(), &program)) die("assemble");
    int rc = be_program_save(program, asm_out.c_str(),
                             text_program_path(asm_out) ? 0 : 1);
    be_program_free(program);
    if (rc) die("write program");
    return 0;
  }

  if (cmd_dis->parsed()) {
    be_program* program = nullptr;
    if (be_program_load(dis_in.c_str(), &program)) die("load program");
    StringOut text;
    int rc = be_program_disassemble(program, &text.value);
    be_program_free(program);
    if (rc) die("disassemble");
    if (dis_out.empty()) {
      std::fputs(text.value, stdout);
    } else {
      std::FILE* f = std::fopen(dis_out.c_str(), "wb");
      if (!f || std::fputs(text.value, f) < 0) {
        std::fprintf(stderr, "error: cannot write %s\n", dis_out.c_str());
        return 1;
      }
      std::fclose(f);
    }
    return 0;
  }

  if (cmd_comp->parsed()) {
    be_net* net = open_net(comp_net, comp_smode);
    StringOut diags;
    if (be_net_check(net, &diags.value)) die("constraint check");
    if (diags.value && diags.value[0]) {
      std::fputs(diags.value, stderr);
      be_net_free(net);
      return 1;
    }
    if (comp_check) {
      std::puts("ok");
      be_net_free(net);
      return 0;
    }
    if (comp_prog.empty() && comp_weights.empty()) {
      std::fprintf(stderr, "error: nothing to do; pass --program and/or "
                           "--weights (or --check)\n");
      be_net_free(net);
      return 1;
    }
    be_weights* weights = nullptr;
    if (be_weights_random(net, comp_seed, &weights)) die("draw parameters");
    be_program* program = nullptr;
    be_memimg* image = nullptr;
    if (be_compile(net, weights, &program, &image)) die("compile");
    if (!comp_prog.empty() &&
        be_program_save(program, comp_prog.c_str(),
                        text_program_path(comp_prog) ? 0 : 1))
      die("write program");
    if (!comp_weights.empty() && be_memimg_save(image, comp_weights.c_str()))
      die("write weights");
    uint64_t wb = 0, fb = 0;
    be_memimg_stats(image, &wb, &fb);
    std::printf("compiled: %llu weight bytes, %llu fc bytes\n",
                (unsigned long long)wb, (unsigned long long)fb);
    be_memimg_free(image);
    be_program_free(program);
    be_weights_free(weights);
    be_net_free(net);
    return 0;
  }

  if (cmd_sim->parsed()) {
    be_program* program = nullptr;
    if (be_program_load(sim_prog.c_str(), &program)) die("load program");
    be_memimg* image = nullptr;
    if (be_memimg_load(sim_weights.c_str(), &image)) die("load weights");
    be_image* input = open_image(sim_image, 1);
    be_result* result = nullptr;
    if (be_run(program, image, input, sim_trace.empty() ? 0 : 1, &result))
      die("run");
    StringOut summary;
    if (be_result_summary(result, &summary.value)) die("summarize");
    std::fputs(summary.value, stdout);
    if (!sim_trace.empty() &&
        be_result_write_trace(result, sim_trace.c_str()))
      die("write trace");
    be_result_free(result);
    be_image_free(input);
    be_memimg_free(image);
    be_program_free(program);
    return 0;
  }

  if (cmd_rep->parsed()) {
    if (rep_net.empty() == rep_trace.empty()) {
      std::fprintf(stderr, "error: pass exactly one of --net or --trace\n");
      return 1;
    }
    int kv = rep_format == "kv" ? 1 : 0;
    StringOut text;
    int rc;
    if (!rep_net.empty()) {
      be_net* net = open_net(rep_net, rep_smode);
      rc = be_report_net(net, rep_freq * 1e6, rep_budget, rep_battery, rep_fw,
                         rep_fh, kv, &text.value);
      be_net_free(net);
    } else {
      rc = be_report_trace(rep_trace.c_str(), rep_freq * 1e6, rep_budget,
                           rep_battery, rep_fw, rep_fh, kv, &text.value);
    }
    if (rc) die("report");
    std::fputs(text.value, stdout);
    return 0;
  }

  if (cmd_ver->parsed()) {
    StringOut report;
    int passed = 0;
    if (be_verify(ver_seed, ver_count, ver_inputs, ver_jobs, &report.value,
                  &passed))
      die("verify");
    std::fputs(report.value, stdout);
    return passed == ver_count ? 0 : 1;
  }

  if (cmd_bench->parsed()) {
    StringOut text;
    if (be_bench(bench_freq * 1e6, bench_format == "kv" ? 1 : 0, &text.value))
      die("bench");
    std::fputs(text.value, stdout);
    return 0;
  }

  return 0;
}
