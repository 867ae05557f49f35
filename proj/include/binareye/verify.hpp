#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace binareye {

struct VerifyOutcome {
  uint64_t seed = 0;
  bool ok = false;
  std::string detail;  // first mismatch, or the network summary on success
};

/// Compiles a seeded random network, runs it on random inputs through the
/// full toolchain (pack -> memory image -> simulator) and compares every
/// layer boundary, plus scores and label, against the integer oracle.
VerifyOutcome verify_seed(uint64_t seed, int inputs_per_net);

struct VerifySummary {
  int total = 0;
  int passed = 0;
  std::vector<VerifyOutcome> outcomes;  // ordered by seed
};

VerifySummary verify_sweep(uint64_t first_seed, int count, int inputs_per_net,
                           int jobs);

}  // namespace binareye
