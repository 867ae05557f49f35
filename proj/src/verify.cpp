#include "binareye/verify.hpp"

#include <atomic>
#include <sstream>
#include <thread>

#include "binareye/oracle.hpp"
#include "binareye/simulator.hpp"

namespace binareye {

namespace {

std::string compare_boundary(const BinaryFeatureMap& concat,
                             const DenseTensor& ref, int logical_channels) {
  if (concat.width() != ref.width || concat.height() != ref.height ||
      ref.channels != logical_channels)
    return "boundary shape mismatch";
  for (int y = 0; y < ref.height; ++y)
    for (int x = 0; x < ref.width; ++x)
      for (int c = 0; c < logical_channels; ++c) {
        int sim = concat.get(c, x, y) ? +1 : -1;
        if (sim != ref.at(c, x, y)) {
          std::ostringstream msg;
          msg << "bit mismatch at (c=" << c << ",x=" << x << ",y=" << y
              << "): sim=" << sim << " oracle=" << int(ref.at(c, x, y));
          return msg.str();
        }
      }
  return {};
}

}  // namespace

VerifyOutcome verify_seed(uint64_t seed, int inputs_per_net) {
  VerifyOutcome outcome;
  outcome.seed = seed;
  try {
    auto rn = oracle::random_network(seed);
    auto compiled = compile_network(rn.description, rn.params);
    const int logical_channels = 256 / rn.description.s_mode;

    for (int k = 0; k < inputs_per_net; ++k) {
      IntegerImage image = oracle::random_image(seed * 1000 + k);
      auto ref = oracle::ref_network(image, rn.params);
      RunOptions opts;
      opts.collect_trace = false;
      opts.keep_layer_outputs = true;
      RunResult sim = run(compiled.program, compiled.image, image, opts);

      std::ostringstream where;
      where << "seed " << seed << " input " << k;
      if (sim.layer_outputs.size() != ref.boundaries.size()) {
        outcome.detail = where.str() + ": layer count mismatch";
        return outcome;
      }
      for (std::size_t l = 0; l < ref.boundaries.size(); ++l) {
        std::string diff = compare_boundary(sim.layer_outputs[l],
                                            ref.boundaries[l], logical_channels);
        if (!diff.empty()) {
          outcome.detail =
              where.str() + " layer " + std::to_string(l + 1) + ": " + diff;
          return outcome;
        }
      }
      if (rn.description.has_fc()) {
        if (sim.scores != ref.scores) {
          outcome.detail = where.str() + ": FC scores differ";
          return outcome;
        }
        if (sim.label != ref.label) {
          outcome.detail = where.str() + ": label mismatch";
          return outcome;
        }
      }
    }
    std::ostringstream ok;
    ok << "depth " << rn.description.cnn_layer_count() << " S "
       << rn.description.s_mode
       << (rn.description.has_fc() ? " fc" : " no-fc");
    outcome.ok = true;
    outcome.detail = ok.str();
  } catch (const std::exception& e) {
    outcome.detail = std::string("exception: ") + e.what();
  }
  return outcome;
}

VerifySummary verify_sweep(uint64_t first_seed, int count, int inputs_per_net,
                           int jobs) {
  if (jobs < 1) jobs = int(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 1;
  VerifySummary summary;
  summary.total = count;
  summary.outcomes.resize(count);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= count) return;
      summary.outcomes[i] = verify_seed(first_seed + uint64_t(i), inputs_per_net);
    }
  };
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (const auto& o : summary.outcomes)
    if (o.ok) ++summary.passed;
  return summary;
}

}  // namespace binareye
