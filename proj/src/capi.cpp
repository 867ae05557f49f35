#include "binareye.h"

#include <cstring>
#include <fstream>
#include <sstream>

#include "binareye/compiler.hpp"
#include "binareye/image_io.hpp"
#include "binareye/isa.hpp"
#include "binareye/oracle.hpp"
#include "binareye/perf.hpp"
#include "binareye/simulator.hpp"
#include "binareye/trace.hpp"
#include "binareye/verify.hpp"

using namespace binareye;

struct be_net {
  NetworkDescription net;
};
struct be_weights {
  DenseNet params;
};
struct be_program {
  Program program;
};
struct be_memimg {
  MemoryImage image;
};
struct be_image {
  IntegerImage image;
};
struct be_result {
  RunResult result;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    return BE_OK;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BE_ERROR;
  }
}

perf::PerfParams make_params(double freq_hz) {
  perf::PerfParams params = perf::default_params();
  if (freq_hz > 0) params.freq_hz = freq_hz;
  return params;
}

perf::AppOptions make_app(double budget_mw, double battery_mwh, int frame_w,
                          int frame_h) {
  perf::AppOptions app;
  if (budget_mw > 0) app.budget_w = budget_mw * 1e-3;
  if (battery_mwh > 0) app.battery_mwh = battery_mwh;
  if (frame_w > 0) app.frame_w = frame_w;
  if (frame_h > 0) app.frame_h = frame_h;
  return app;
}

}  // namespace

extern "C" {

const char* be_version(void) { return "1.0.0"; }

const char* be_last_error(void) { return g_last_error.c_str(); }

void be_string_free(char* s) { std::free(s); }

int be_net_parse_file(const char* path, be_net** out) {
  return guarded([&] { *out = new be_net{load_network(path)}; });
}

int be_net_parse_string(const char* text, be_net** out) {
  return guarded([&] { *out = new be_net{parse_network(text)}; });
}

int be_net_builtin(const char* name, int s_mode, be_net** out) {
  return guarded([&] {
    if (std::string(name) != "benchmark9")
      throw Error(std::string("unknown builtin network '") + name + "'");
    *out = new be_net{benchmark9(s_mode)};
  });
}

int be_net_check(const be_net* net, char** diagnostics) {
  return guarded([&] {
    std::string text;
    for (const auto& d : check_constraints(net->net)) {
      text += d;
      text += '\n';
    }
    *diagnostics = dup_string(text);
  });
}

int be_net_smode(const be_net* net) { return net->net.s_mode; }

void be_net_free(be_net* net) { delete net; }

int be_weights_random(const be_net* net, uint64_t seed, be_weights** out) {
  return guarded([&] {
    *out = new be_weights{oracle::random_dense(net->net, seed)};
  });
}

void be_weights_free(be_weights* w) { delete w; }

int be_compile(const be_net* net, const be_weights* weights,
               be_program** program, be_memimg** image) {
  return guarded([&] {
    auto result = compile_network(net->net, weights->params);
    *program = new be_program{std::move(result.program)};
    *image = new be_memimg{std::move(result.image)};
  });
}

int be_program_assemble(const char* text, be_program** out) {
  return guarded([&] { *out = new be_program{assemble(text)}; });
}

int be_program_disassemble(const be_program* program, char** text) {
  return guarded([&] { *text = dup_string(disassemble(program->program)); });
}

int be_program_load(const char* path, be_program** out) {
  return guarded([&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(std::string("cannot open program: ") + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), "BNRP", 4) == 0) {
      *out = new be_program{deserialize_program(bytes)};
    } else {
      *out = new be_program{
          assemble(std::string(bytes.begin(), bytes.end()))};
    }
  });
}

int be_program_save(const be_program* program, const char* path, int binary) {
  return guarded([&] {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(std::string("cannot open program for writing: ") + path);
    if (binary) {
      auto bytes = serialize_program(program->program);
      out.write(reinterpret_cast<const char*>(bytes.data()),
                std::streamsize(bytes.size()));
    } else {
      out << disassemble(program->program);
    }
    if (!out) throw Error(std::string("write failed: ") + path);
  });
}

void be_program_free(be_program* program) { delete program; }

int be_memimg_save(const be_memimg* image, const char* path) {
  return guarded([&] { save_container(image->image, path); });
}

int be_memimg_load(const char* path, be_memimg** out) {
  return guarded([&] { *out = new be_memimg{load_container(path)}; });
}

int be_memimg_stats(const be_memimg* image, uint64_t* weight_bytes,
                    uint64_t* fc_bytes) {
  if (weight_bytes) *weight_bytes = image->image.weight_sram.size();
  if (fc_bytes) *fc_bytes = image->image.fc_sram.size();
  return BE_OK;
}

void be_memimg_free(be_memimg* image) { delete image; }

int be_image_load(const char* path, be_image** out, char** warning) {
  return guarded([&] {
    std::string warn;
    *out = new be_image{load_image(path, &warn)};
    if (warning) *warning = warn.empty() ? nullptr : dup_string(warn);
  });
}

int be_image_random(uint64_t seed, be_image** out) {
  return guarded([&] { *out = new be_image{oracle::random_image(seed)}; });
}

void be_image_free(be_image* image) { delete image; }

int be_run(const be_program* program, const be_memimg* image,
           const be_image* input, int collect_trace, be_result** out) {
  return guarded([&] {
    RunOptions opts;
    opts.collect_trace = collect_trace != 0;
    *out = new be_result{
        run(program->program, image->image, input->image, opts)};
  });
}

int be_result_label(const be_result* result) { return result->result.label; }

size_t be_result_num_scores(const be_result* result) {
  return result->result.scores.size();
}

int be_result_scores(const be_result* result, int64_t* scores, size_t cap) {
  return guarded([&] {
    if (cap < result->result.scores.size())
      throw Error("score buffer too small");
    for (std::size_t i = 0; i < result->result.scores.size(); ++i)
      scores[i] = result->result.scores[i];
  });
}

int be_result_write_trace(const be_result* result, const char* path) {
  return guarded([&] {
    write_trace_file(path, result->result.program_hash, result->result.trace);
  });
}

int be_result_summary(const be_result* result, char** text) {
  return guarded([&] {
    std::ostringstream out;
    for (const auto& l : result->result.layers) {
      out << "layer " << l.ordinal << ' '
          << (l.kind == LayerKind::Fc
                  ? "FC"
                  : (l.kind == LayerKind::First ? "FIRST" : "CNN"));
      if (l.kind != LayerKind::Fc)
        out << " out " << l.out_w << 'x' << l.out_h;
      out << " ops " << l.ops << '\n';
    }
    if (!result->result.scores.empty()) {
      out << "scores";
      for (int64_t s : result->result.scores) out << ' ' << s;
      out << "\nlabel " << result->result.label << '\n';
    } else if (result->result.out_map) {
      out << "output map 256x" << result->result.out_map->width() << 'x'
          << result->result.out_map->height() << '\n';
    }
    *text = dup_string(out.str());
  });
}

void be_result_free(be_result* result) { delete result; }

int be_report_net(const be_net* net, double freq_hz, double budget_mw,
                  double battery_mwh, int frame_w, int frame_h, int kv_format,
                  char** text) {
  return guarded([&] {
    auto report =
        perf::build_report(perf::perf_from_net(net->net), make_params(freq_hz),
                           make_app(budget_mw, battery_mwh, frame_w, frame_h));
    *text = dup_string(perf::format_report(
        report, kv_format ? perf::ReportFormat::Kv : perf::ReportFormat::Table));
  });
}

int be_report_trace(const char* trace_path, double freq_hz, double budget_mw,
                    double battery_mwh, int frame_w, int frame_h, int kv_format,
                    char** text) {
  return guarded([&] {
    TraceFile tf = read_trace_file(trace_path);
    auto report =
        perf::build_report(perf::perf_from_trace(tf.events), make_params(freq_hz),
                           make_app(budget_mw, battery_mwh, frame_w, frame_h));
    *text = dup_string(perf::format_report(
        report, kv_format ? perf::ReportFormat::Kv : perf::ReportFormat::Table));
  });
}

int be_bench(double freq_hz, int kv_format, char** text) {
  return guarded([&] {
    perf::PerfParams params = make_params(freq_hz);
    std::ostringstream out;
    if (kv_format) {
      out << "param.e_op_fj=" << params.e_op * 1e15
          << " param.e_ld_fj=" << params.e_ld * 1e15
          << " param.freq_hz=" << params.freq_hz << "\n";
    } else {
      out << "reference 9-layer network, e_op=" << params.e_op * 1e15
          << " fJ/op, e_ld=" << params.e_ld * 1e15 << " fJ/bit, f="
          << params.freq_hz / 1e6 << " MHz\n";
      out << "S  ops           cycles   inf/s    uJ/inf   GOPS     TOPS/W(I2L)\n";
    }
    for (int s : {1, 2, 4}) {
      auto report = perf::build_report(perf::perf_from_net(benchmark9(s)),
                                       params, perf::AppOptions{});
      char buf[160];
      if (kv_format) {
        std::snprintf(buf, sizeof buf,
                      "s=%d ops=%llu cycles=%llu inf_s=%.2f uj=%.4f gops=%.1f "
                      "tops_w_i2l=%.1f\n",
                      s, (unsigned long long)report.total_ops,
                      (unsigned long long)report.total_cycles, report.inf_per_s,
                      report.uj_per_inf, report.gops, report.tops_w_i2l);
      } else {
        std::snprintf(buf, sizeof buf,
                      "%-2d %-13llu %-8llu %-8.2f %-8.4f %-8.1f %.1f\n", s,
                      (unsigned long long)report.total_ops,
                      (unsigned long long)report.total_cycles, report.inf_per_s,
                      report.uj_per_inf, report.gops, report.tops_w_i2l);
      }
      out << buf;
    }
    *text = dup_string(out.str());
  });
}

int be_verify(uint64_t first_seed, int count, int inputs_per_net, int jobs,
              char** report, int* passed) {
  return guarded([&] {
    VerifySummary summary = verify_sweep(first_seed, count, inputs_per_net, jobs);
    std::ostringstream out;
    for (const auto& o : summary.outcomes)
      if (!o.ok) out << "seed " << o.seed << " FAILED: " << o.detail << '\n';
    out << summary.passed << '/' << summary.total << " equivalent\n";
    if (report) *report = dup_string(out.str());
    if (passed) *passed = summary.passed;
  });
}

}  // extern "C"
