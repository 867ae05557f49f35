#include "binareye/trace.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "binareye/bitcore.hpp"

namespace binareye {

const char* event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::Ld: return "LD";
    case EventKind::ConvStep: return "CONV_STEP";
    case EventKind::SramRd: return "SRAM_RD";
    case EventKind::SramWr: return "SRAM_WR";
    case EventKind::FcEval: return "FC_EVAL";
    case EventKind::Io: return "IO";
  }
  return "?";
}

EventKind event_kind_from_name(const std::string& name) {
  if (name == "LD") return EventKind::Ld;
  if (name == "CONV_STEP") return EventKind::ConvStep;
  if (name == "SRAM_RD") return EventKind::SramRd;
  if (name == "SRAM_WR") return EventKind::SramWr;
  if (name == "FC_EVAL") return EventKind::FcEval;
  if (name == "IO") return EventKind::Io;
  throw Error("unknown trace event kind: " + name);
}

void write_trace_file(const std::string& path, uint64_t program_hash,
                      const std::vector<TraceEvent>& events) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open trace file for writing: " + path);
  out << "# binareye trace v1\n";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, program_hash);
  out << "# program " << buf << "\n";
  out << "# kind layer phase bits ops\n";
  for (const auto& e : events) {
    out << event_kind_name(e.kind) << ' ' << e.layer << ' ' << e.phase << ' '
        << e.bits << ' ' << e.ops << '\n';
  }
  if (!out) throw Error("write failed: " + path);
}

TraceFile read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trace file: " + path);
  TraceFile tf;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string word;
      hs >> word;
      if (word == "program") {
        std::string hex;
        hs >> hex;
        tf.program_hash = std::strtoull(hex.c_str(), nullptr, 16);
      }
      continue;
    }
    std::istringstream ls(line);
    std::string kind;
    TraceEvent e{};
    if (!(ls >> kind >> e.layer >> e.phase >> e.bits >> e.ops))
      throw Error("malformed trace line " + std::to_string(lineno) + " in " +
                  path);
    e.kind = event_kind_from_name(kind);
    tf.events.push_back(e);
  }
  return tf;
}

}  // namespace binareye
