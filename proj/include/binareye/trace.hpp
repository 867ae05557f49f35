#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace binareye {

enum class EventKind : uint8_t { Ld, ConvStep, SramRd, SramWr, FcEval, Io };

const char* event_kind_name(EventKind kind);
EventKind event_kind_from_name(const std::string& name);

/// One per-phase event from a simulated run. `layer` is the 1-based layer
/// ordinal (0 for IO instructions), `bits` the memory bits touched and
/// `ops` the per-inference binary-op count charged to the event.
struct TraceEvent {
  EventKind kind;
  int layer;
  int phase;
  uint64_t bits;
  uint64_t ops;
};

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void emit(const TraceEvent& event) = 0;
};

class VectorTraceSink final : public TraceSink {
 public:
  void emit(const TraceEvent& event) override { events_.push_back(event); }
  const std::vector<TraceEvent>& events() const { return events_; }
  std::vector<TraceEvent> take() { return std::move(events_); }

 private:
  std::vector<TraceEvent> events_;
};

/// Writes a trace file: a `# binareye trace v1` header, the program hash,
/// then one `kind layer phase bits ops` line per event.
void write_trace_file(const std::string& path, uint64_t program_hash,
                      const std::vector<TraceEvent>& events);

struct TraceFile {
  uint64_t program_hash = 0;
  std::vector<TraceEvent> events;
};

TraceFile read_trace_file(const std::string& path);

}  // namespace binareye
