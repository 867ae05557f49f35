#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "binareye/compiler.hpp"
#include "binareye/trace.hpp"

namespace binareye {
namespace perf {

/// Two-coefficient energy model plus cycle-model knobs. Energy per layer
/// is e_op * ops + e_ld * weight bits loaded; feature-SRAM access energy
/// is absorbed into e_op. Supply voltages are metadata only.
struct PerfParams {
  double e_op = 0;  // J per binary op
  double e_ld = 0;  // J per weight bit loaded
  int ld_width = 64;        // LD bits per cycle
  double freq_hz = 6e6;     // nominal range 1.5-48 MHz
  bool overlap_ld = false;  // hide LD behind CONV instead of serializing
  double supply_min_v = 0.66;
  double supply_max_v = 0.9;
};

inline constexpr double kFreqMinHz = 1.5e6;
inline constexpr double kFreqMaxHz = 48e6;

struct CalibrationPoint {
  double energy_j;
  uint64_t ops;
  uint64_t ld_bits;
};

/// Solves e_op/e_ld by least squares from >= 2 reference points. Throws
/// on a singular (proportional) system or a nonpositive op coefficient.
PerfParams calibrate(const std::vector<CalibrationPoint>& points);

/// Coefficients fitted from the S=1 (14.4 uJ) and S=4 (0.92 uJ) energy
/// points of the reference 9-layer network.
PerfParams default_params();

/// Per-layer primaries the model consumes, from either a network
/// description or a recorded trace.
struct LayerPerf {
  int ordinal = 0;
  LayerKind kind = LayerKind::Cnn;
  int s_mode = 0;
  int phases = 0;
  uint64_t ops = 0;
  uint64_t ld_bits = 0;     // CNN weight bits loaded
  uint64_t conv_steps = 0;  // CNN steps across all phases
  uint64_t fc_bits = 0;     // FC weight-bit reads
};

struct PerfInput {
  std::vector<LayerPerf> layers;
  std::vector<uint64_t> io_bits;  // one entry per IO instruction
};

uint64_t cnn_layer_ops(int s_mode, int out_w, int out_h);
uint64_t fc_layer_ops(int feature_bits, int classes);

PerfInput perf_from_net(const NetworkDescription& net);
PerfInput perf_from_trace(const std::vector<TraceEvent>& events);

uint64_t total_ops(const PerfInput& input);

struct LayerCycles {
  uint64_t ld = 0;
  uint64_t conv = 0;
  uint64_t total = 0;
};

LayerCycles count_cycles(const LayerPerf& layer, const PerfParams& params);
double layer_energy(const LayerPerf& layer, const PerfParams& params);

struct AppOptions {
  double budget_w = 1e-3;
  double battery_mwh = 810;
  int frame_w = 160;  // QQVGA sliding-window detection
  int frame_h = 120;
  int window = 32;
  int stride = 16;
};

struct LayerReport {
  LayerPerf layer;
  LayerCycles cycles;
  double seconds = 0;
  double joules = 0;
  double gops = 0;
};

struct PerfReport {
  std::vector<LayerReport> layers;
  uint64_t total_ops = 0;
  uint64_t total_cycles = 0;
  uint64_t total_ld_bits = 0;
  double seconds = 0;
  double joules = 0;
  double inf_per_s = 0;
  double uj_per_inf = 0;
  double gops = 0;
  double tops_w_core = 0;
  double tops_w_i2l = 0;
  double edp_js = 0;
  double power_w = 0;
  int windows_per_frame = 0;
  double fps_at_budget = 0;
  double battery_days = 0;
  PerfParams params;
  AppOptions app;
};

PerfReport build_report(const PerfInput& input, const PerfParams& params,
                        const AppOptions& app = {});

enum class ReportFormat { Table, Kv };
std::string format_report(const PerfReport& report, ReportFormat format);

}  // namespace perf
}  // namespace binareye
