#include "binareye/perf.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace binareye {
namespace perf {

namespace {

uint64_t ceil_div(uint64_t a, uint64_t b) { return (a + b - 1) / b; }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

PerfParams calibrate(const std::vector<CalibrationPoint>& points) {
  if (points.size() < 2) throw Error("calibration needs at least 2 points");
  // Least-squares normal equations for E = a*ops + b*ld_bits.
  double soo = 0, sol = 0, sll = 0, soe = 0, sle = 0;
  for (const auto& p : points) {
    double o = double(p.ops), l = double(p.ld_bits);
    soo += o * o;
    sol += o * l;
    sll += l * l;
    soe += o * p.energy_j;
    sle += l * p.energy_j;
  }
  double det = soo * sll - sol * sol;
  if (std::abs(det) <= 1e-12 * soo * sll || det == 0.0)
    throw Error("singular calibration system: points are proportional");
  double a = (soe * sll - sle * sol) / det;
  double b = (soo * sle - sol * soe) / det;
  if (a <= 0) throw Error("calibration produced a nonpositive op coefficient");
  if (b < -1e-18) throw Error("calibration produced a negative LD coefficient");
  PerfParams params;
  params.e_op = a;
  params.e_ld = b < 0 ? 0 : b;
  return params;
}

PerfParams default_params() {
  auto point = [](int s, double energy_j) {
    PerfInput in = perf_from_net(benchmark9(s));
    uint64_t ld = 0;
    for (const auto& l : in.layers) ld += l.ld_bits;
    return CalibrationPoint{energy_j, total_ops(in), ld};
  };
  return calibrate({point(1, 14.4e-6), point(4, 0.92e-6)});
}

uint64_t cnn_layer_ops(int s_mode, int out_w, int out_h) {
  uint64_t fc = 256 / uint64_t(s_mode);
  return 2 * fc * fc * 4 * uint64_t(out_w) * out_h;
}

uint64_t fc_layer_ops(int feature_bits, int classes) {
  return 2ull * feature_bits * classes;
}

PerfInput perf_from_net(const NetworkDescription& net) {
  auto diags = check_constraints(net);
  if (!diags.empty()) throw Error("invalid network: " + diags.front());
  auto shapes = track_geometry(net);
  const int s = net.s_mode;
  PerfInput input;
  input.io_bits.push_back(uint64_t(IntegerImage::kBytes) * 7);
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    LayerPerf l;
    l.ordinal = int(i) + 1;
    l.kind = i == 0 ? LayerKind::First : LayerKind::Cnn;
    l.s_mode = s;
    l.phases = 4 / s;
    l.ops = cnn_layer_ops(s, shapes[i].out_w, shapes[i].out_h);
    l.ld_bits = uint64_t(l.phases) * kPhaseWeightBits;
    l.conv_steps = uint64_t(l.phases) * shapes[i].out_w * shapes[i].out_h;
    input.layers.push_back(l);
  }
  uint64_t final_bits =
      uint64_t(256 / s) * shapes.back().pooled_w * shapes.back().pooled_h;
  if (net.has_fc()) {
    LayerPerf l;
    l.ordinal = int(shapes.size()) + 1;
    l.kind = LayerKind::Fc;
    l.s_mode = s;
    l.fc_bits = final_bits * net.fc_classes();
    l.ops = fc_layer_ops(int(final_bits), net.fc_classes());
    input.layers.push_back(l);
    input.io_bits.push_back(8);  // label out
  } else {
    input.io_bits.push_back(256ull * shapes.back().pooled_w *
                            shapes.back().pooled_h);
  }
  return input;
}

PerfInput perf_from_trace(const std::vector<TraceEvent>& events) {
  std::map<int, LayerPerf> layers;
  PerfInput input;
  for (const auto& e : events) {
    if (e.kind == EventKind::Io) {
      input.io_bits.push_back(e.bits);
      continue;
    }
    LayerPerf& l = layers[e.layer];
    l.ordinal = e.layer;
    switch (e.kind) {
      case EventKind::Ld:
        l.kind = LayerKind::Cnn;
        l.ld_bits += e.bits;
        l.phases += 1;
        break;
      case EventKind::ConvStep:
        l.conv_steps += 1;
        l.ops += e.ops;
        break;
      case EventKind::FcEval:
        l.kind = LayerKind::Fc;
        l.fc_bits += e.bits;
        l.ops += e.ops;
        break;
      default:
        break;  // SRAM read/write energy is folded into e_op
    }
  }
  for (auto& [ordinal, layer] : layers) input.layers.push_back(layer);
  return input;
}

uint64_t total_ops(const PerfInput& input) {
  uint64_t ops = 0;
  for (const auto& l : input.layers) ops += l.ops;
  return ops;
}

LayerCycles count_cycles(const LayerPerf& layer, const PerfParams& params) {
  LayerCycles c;
  if (layer.kind == LayerKind::Fc) {
    c.total = ceil_div(layer.fc_bits, 64);
    return c;
  }
  if (layer.phases <= 0) throw Error("CNN layer has no LD phases in trace");
  uint64_t ld_per_phase =
      ceil_div(layer.ld_bits / layer.phases, uint64_t(params.ld_width));
  uint64_t conv_per_phase = layer.conv_steps / layer.phases;
  c.ld = ld_per_phase * layer.phases;
  c.conv = layer.conv_steps;
  if (params.overlap_ld)
    c.total = std::max(ld_per_phase, conv_per_phase) * layer.phases;
  else
    c.total = c.ld + c.conv;
  return c;
}

double layer_energy(const LayerPerf& layer, const PerfParams& params) {
  if (params.e_op <= 0) throw Error("performance parameters are uncalibrated");
  return params.e_op * double(layer.ops) + params.e_ld * double(layer.ld_bits);
}

PerfReport build_report(const PerfInput& input, const PerfParams& params,
                        const AppOptions& app) {
  if (params.e_op <= 0) throw Error("performance parameters are uncalibrated");
  if (app.budget_w <= 0) throw Error("power budget must be positive");
  PerfReport report;
  report.params = params;
  report.app = app;
  for (const auto& l : input.layers) {
    LayerReport row;
    row.layer = l;
    row.cycles = count_cycles(l, params);
    row.seconds = double(row.cycles.total) / params.freq_hz;
    row.joules = layer_energy(l, params);
    row.gops = row.seconds > 0 ? double(l.ops) / row.seconds / 1e9 : 0;
    report.layers.push_back(row);
    report.total_ops += l.ops;
    report.total_cycles += row.cycles.total;
    report.total_ld_bits += l.ld_bits;
    report.joules += row.joules;
  }
  for (uint64_t bits : input.io_bits) report.total_cycles += ceil_div(bits, 64);
  report.seconds = double(report.total_cycles) / params.freq_hz;
  report.inf_per_s = 1.0 / report.seconds;
  report.uj_per_inf = report.joules * 1e6;
  report.gops = double(report.total_ops) / report.seconds / 1e9;
  report.tops_w_core = 1.0 / params.e_op / 1e12;
  report.tops_w_i2l = double(report.total_ops) / report.joules / 1e12;
  report.edp_js = report.joules * report.seconds;
  report.power_w = report.joules / report.seconds;

  if (app.frame_w >= app.window && app.frame_h >= app.window) {
    int wx = (app.frame_w - app.window) / app.stride + 1;
    int wy = (app.frame_h - app.window) / app.stride + 1;
    report.windows_per_frame = wx * wy;
    report.fps_at_budget =
        (app.budget_w / report.joules) / report.windows_per_frame;
  }
  report.battery_days = app.battery_mwh / (app.budget_w * 1e3) / 24.0;
  return report;
}

std::string format_report(const PerfReport& r, ReportFormat format) {
  std::ostringstream out;
  if (format == ReportFormat::Kv) {
    out << "param.e_op_fj=" << fmt("%.4f", r.params.e_op * 1e15)
        << " param.e_ld_fj=" << fmt("%.4f", r.params.e_ld * 1e15)
        << " param.ld_width=" << r.params.ld_width
        << " param.freq_hz=" << fmt("%g", r.params.freq_hz)
        << " param.overlap_ld=" << int(r.params.overlap_ld) << "\n";
    for (const auto& l : r.layers) {
      out << "layer=" << l.layer.ordinal << " kind="
          << (l.layer.kind == LayerKind::Fc
                  ? "FC"
                  : (l.layer.kind == LayerKind::First ? "FIRST" : "CNN"))
          << " ops=" << l.layer.ops << " ldbits=" << l.layer.ld_bits
          << " cycles=" << l.cycles.total << " uj=" << fmt("%.4f", l.joules * 1e6)
          << " gops=" << fmt("%.1f", l.gops) << "\n";
    }
    out << "total ops=" << r.total_ops << " cycles=" << r.total_cycles
        << " ldbits=" << r.total_ld_bits << " uj=" << fmt("%.4f", r.uj_per_inf)
        << " inf_s=" << fmt("%.2f", r.inf_per_s) << " gops=" << fmt("%.1f", r.gops)
        << " tops_w_core=" << fmt("%.1f", r.tops_w_core)
        << " tops_w_i2l=" << fmt("%.1f", r.tops_w_i2l)
        << " edp_js=" << fmt("%.3e", r.edp_js)
        << " power_mw=" << fmt("%.3f", r.power_w * 1e3) << "\n";
    out << "app windows=" << r.windows_per_frame
        << " fps=" << fmt("%.2f", r.fps_at_budget)
        << " budget_mw=" << fmt("%.3f", r.app.budget_w * 1e3)
        << " battery_mwh=" << fmt("%.1f", r.app.battery_mwh)
        << " battery_days=" << fmt("%.2f", r.battery_days) << "\n";
    return out.str();
  }

  out << "model: e_op=" << fmt("%.3f", r.params.e_op * 1e15)
      << " fJ/op, e_ld=" << fmt("%.3f", r.params.e_ld * 1e15)
      << " fJ/bit, LD width=" << r.params.ld_width
      << " b/cycle, f=" << fmt("%.3g", r.params.freq_hz / 1e6) << " MHz, LD "
      << (r.params.overlap_ld ? "overlapped" : "serialized") << "\n";
  out << "layer  kind   ops            ld_bits    cycles     uJ        GOPS\n";
  for (const auto& l : r.layers) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-6d %-6s %-14llu %-10llu %-10llu %-9.4f %.1f\n",
                  l.layer.ordinal,
                  l.layer.kind == LayerKind::Fc
                      ? "FC"
                      : (l.layer.kind == LayerKind::First ? "FIRST" : "CNN"),
                  (unsigned long long)l.layer.ops,
                  (unsigned long long)l.layer.ld_bits,
                  (unsigned long long)l.cycles.total, l.joules * 1e6, l.gops);
    out << buf;
  }
  out << "total: " << r.total_ops << " ops, " << r.total_cycles << " cycles, "
      << fmt("%.4f", r.uj_per_inf) << " uJ/inf, " << fmt("%.2f", r.inf_per_s)
      << " inf/s, " << fmt("%.1f", r.gops) << " GOPS\n";
  out << "efficiency: core " << fmt("%.1f", r.tops_w_core) << " TOPS/W, I2L "
      << fmt("%.1f", r.tops_w_i2l) << " TOPS/W, EDP "
      << fmt("%.3e", r.edp_js) << " Js, P " << fmt("%.3f", r.power_w * 1e3)
      << " mW\n";
  out << "app: " << r.windows_per_frame << " windows/frame, "
      << fmt("%.2f", r.fps_at_budget) << " fps @ "
      << fmt("%.1f", r.app.budget_w * 1e3) << " mW, "
      << fmt("%.2f", r.battery_days) << " battery days @ "
      << fmt("%.0f", r.app.battery_mwh) << " mWh\n";
  return out.str();
}

}  // namespace perf
}  // namespace binareye
