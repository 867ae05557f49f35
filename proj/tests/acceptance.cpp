// Acceptance gate: one pass/fail line per criterion, nonzero exit when any
// criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "binareye/compiler.hpp"
#include "binareye/isa.hpp"
#include "binareye/oracle.hpp"
#include "binareye/perf.hpp"
#include "binareye/simulator.hpp"
#include "binareye/verify.hpp"

using namespace binareye;

namespace {

int failures = 0;

void report(int index, const char* name, bool ok, const std::string& detail) {
  std::printf("%s: %d %s (%s)\n", ok ? "PASS" : "FAIL", index, name,
              detail.c_str());
  if (!ok) ++failures;
}

bool within(double value, double target, double tolerance) {
  return std::abs(value - target) <= tolerance * std::abs(target);
}

// 1. Simulator equals the integer oracle on 100 random networks x 10 inputs.
void criterion_equivalence() {
  auto start = std::chrono::steady_clock::now();
  VerifySummary summary = verify_sweep(1, 100, 10, 0);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              start)
                    .count();
  std::string detail = std::to_string(summary.passed) + "/100 networks, " +
                       std::to_string(secs).substr(0, 5) + " s";
  for (const auto& o : summary.outcomes)
    if (!o.ok) detail += "; " + o.detail;
  report(1, "oracle equivalence, 100 networks x 10 inputs",
         summary.passed == 100 && secs < 60.0, detail);
}

// 2. Exact op counts for the reference 9-layer network.
void criterion_ops() {
  uint64_t layer1 = perf::cnn_layer_ops(1, 31, 31);
  uint64_t total1 = perf::total_ops(perf::perf_from_net(benchmark9(1)));
  uint64_t total4 = perf::total_ops(perf::perf_from_net(benchmark9(4)));
  bool ok = layer1 == 503840768ull && total1 == 2013347840ull &&
            total4 == 125849600ull;
  report(2, "op accounting", ok,
         "layer1=" + std::to_string(layer1) + " total=" +
             std::to_string(total1) + " s4=" + std::to_string(total4));
}

// 3. Modeled throughput at 6 MHz vs the measured silicon.
void criterion_throughput() {
  perf::PerfReport r =
      perf::build_report(perf::perf_from_net(benchmark9(1)),
                         perf::default_params());
  double layer1_gops = r.layers.front().gops;
  bool ok = within(layer1_gops, 352.0, 0.15) && within(r.inf_per_s, 120.0, 0.15);
  char buf[96];
  std::snprintf(buf, sizeof buf, "layer1=%.1f GOPS (352 +-15%%), %.2f inf/s "
                                 "(120 +-15%%)",
                layer1_gops, r.inf_per_s);
  report(3, "throughput calibration", ok, buf);
}

// 4. Energy model fitted from the two anchor points predicts the third.
void criterion_energy() {
  perf::PerfParams p = perf::default_params();
  perf::PerfReport r2 =
      perf::build_report(perf::perf_from_net(benchmark9(2)), p);
  perf::PerfReport r1 =
      perf::build_report(perf::perf_from_net(benchmark9(1)), p);
  bool ok = within(r2.uj_per_inf, 3.47, 0.10) && within(r1.tops_w_i2l, 145.0, 0.10);
  char buf[96];
  std::snprintf(buf, sizeof buf, "E(mid)=%.3f uJ (3.47 +-10%%), I2L=%.1f "
                                 "TOPS/W (145 +-10%%)",
                r2.uj_per_inf, r1.tops_w_i2l);
  report(4, "energy calibration and prediction", ok, buf);
}

// 5. Exact memory capacities and the largest intermediate map.
void criterion_capacity() {
  NetworkDescription net = benchmark9(1);
  auto compiled = compile_network(net, oracle::random_dense(net, 1));
  std::size_t wbytes = compiled.image.weight_sram.size();
  std::size_t fbytes = compiled.image.fc_sram.size();
  auto shapes = track_geometry(net);
  std::size_t largest = 0;
  for (const auto& s : shapes)
    largest = std::max(largest, std::size_t(256) * s.pooled_w * s.pooled_h);
  bool ok = wbytes == 265216 && fbytes == 5120 && largest == 246016 &&
            largest <= kBankBits;
  report(5, "capacity arithmetic", ok,
         "weights=" + std::to_string(wbytes) + " B, fc=" +
             std::to_string(fbytes) + " B, largest map=" +
             std::to_string(largest) + " b of " + std::to_string(kBankBits));
}

// 6. Exactly 4/S weight-load events per CNN layer.
void criterion_phase_law() {
  bool ok = true;
  std::string detail;
  for (int s : {1, 2, 4}) {
    NetworkDescription net = benchmark9(s);
    auto compiled = compile_network(net, oracle::random_dense(net, 1));
    RunResult r = run(compiled.program, compiled.image, oracle::random_image(1));
    int per_layer[9] = {};
    for (const auto& e : r.trace)
      if (e.kind == EventKind::Ld) ++per_layer[e.layer];
    for (int l = 1; l <= 8; ++l)
      if (per_layer[l] != 4 / s) ok = false;
    detail += "S=" + std::to_string(s) + ":" + std::to_string(per_layer[1]) + " ";
  }
  report(6, "phase law: 4/S LD events per layer", ok, detail + "LDs/layer");
}

// 7. Sliding-window and battery application reports.
void criterion_application() {
  perf::AppOptions app;
  perf::PerfInput in = perf::perf_from_net(benchmark9(4));
  perf::PerfParams p = perf::default_params();
  perf::PerfReport at1 = perf::build_report(in, p, app);
  app.budget_w = 10e-3;
  perf::PerfReport at10 = perf::build_report(in, p, app);
  bool ok = at1.windows_per_frame == 54 && within(at1.fps_at_budget, 20.0, 0.10) &&
            within(at10.fps_at_budget, 200.0, 0.10) &&
            std::abs(at1.battery_days - 33.75) < 1e-9;
  char buf[96];
  std::snprintf(buf, sizeof buf,
                "%d windows, %.2f fps @1mW, %.1f fps @10mW, %.2f days",
                at1.windows_per_frame, at1.fps_at_budget, at10.fps_at_budget,
                at1.battery_days);
  report(7, "application reports", ok, buf);
}

// 8. Toolchain round-trips.
Program random_program(std::mt19937_64& rng) {
  Program p;
  Bank bank = (rng() & 1) ? Bank::East : Bank::West;
  p.instructions.push_back(IoInstruction{IoDirection::In, bank});
  int cnn_count = int(rng() % 14);
  for (int i = 0; i < cnn_count; ++i) {
    CnnInstruction cnn;
    cnn.s_mode = 1 << (rng() % 3);
    cnn.width = 2 + int(rng() % 31);
    cnn.height = 2 + int(rng() % 31);
    cnn.pool = rng() & 1;
    cnn.first_layer = i == 0 && (rng() & 1);
    cnn.weight_base = uint32_t(rng() % 4096);
    cnn.in_bank = bank;
    cnn.out_bank = bank == Bank::West ? Bank::East : Bank::West;
    bank = cnn.out_bank;
    p.instructions.push_back(cnn);
  }
  if (rng() & 1)
    p.instructions.push_back(
        FcInstruction{64 * int(1 + rng() % 64), 2 + int(rng() % 9)});
  return p;
}

void criterion_roundtrips() {
  std::mt19937_64 rng(2026);
  int ok_programs = 0;
  for (int i = 0; i < 1000; ++i) {
    Program p = random_program(rng);
    bool same = assemble(disassemble(p)).instructions == p.instructions &&
                decode_program(encode_program(p)).instructions == p.instructions;
    if (same) ++ok_programs;
  }
  NetworkDescription net = benchmark9(2);
  auto compiled = compile_network(net, oracle::random_dense(net, 4));
  auto bytes = serialize_container(compiled.image);
  bool container_ok = serialize_container(deserialize_container(bytes)) == bytes;
  report(8, "toolchain round-trips", ok_programs == 1000 && container_ok,
         std::to_string(ok_programs) + "/1000 programs, container " +
             (container_ok ? "byte-identical" : "differs"));
}

}  // namespace

int main() {
  criterion_equivalence();
  criterion_ops();
  criterion_throughput();
  criterion_energy();
  criterion_capacity();
  criterion_phase_law();
  criterion_application();
  criterion_roundtrips();
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures ? 1 : 0;
}
