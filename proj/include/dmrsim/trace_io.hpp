#pragma once

/*
 * JSONL trace serialization. A trace file is one header object on the first
 * line followed by one event object per line:
 *
 *   {"format":"dmrsim-trace","version":1,"scenario":"static-2","seed":42}
 *   {"t":0.0,"kind":"submit","job":"j01"}
 *   {"t":0.0,"kind":"start","job":"j01","nodes":2}
 *   ...
 *
 * Key order is fixed and doubles use shortest round-trip formatting, so equal
 * runs produce byte-identical files. Parsing reports the 1-based line number
 * of the first problem.
 */

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "dmrsim/domain.hpp"

namespace dmrsim {

struct TraceFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TraceMeta {
  std::string scenario;
  std::uint64_t seed = 0;
  NodeCount total_compute_nodes = 0;
  NodeCount reserved_total_nodes = 0;

  bool operator==(const TraceMeta&) const = default;
};

inline constexpr int kTraceFormatVersion = 1;
inline constexpr const char* kTraceFormatName = "dmrsim-trace";

inline std::string trace_kind_name(TraceKind k) {
  switch (k) {
    case TraceKind::Submit: return "submit";
    case TraceKind::Start: return "start";
    case TraceKind::StepProgress: return "step_progress";
    case TraceKind::CeSample: return "ce_sample";
    case TraceKind::ResizeDecided: return "resize_decided";
    case TraceKind::ResizePendingResources: return "resize_pending_resources";
    case TraceKind::ResizeGranted: return "resize_granted";
    case TraceKind::CheckpointWritten: return "checkpoint_written";
    case TraceKind::Terminate: return "terminate";
    case TraceKind::Restart: return "restart";
    case TraceKind::Finish: return "finish";
    case TraceKind::NodesAllocatedTotal: return "nodes_allocated_total";
  }
  throw std::logic_error("trace_kind_name: unknown kind");
}

inline std::optional<TraceKind> trace_kind_from_name(const std::string& s) {
  static const std::vector<TraceKind> kinds = {
      TraceKind::Submit,        TraceKind::Start,
      TraceKind::StepProgress,  TraceKind::CeSample,
      TraceKind::ResizeDecided, TraceKind::ResizePendingResources,
      TraceKind::ResizeGranted, TraceKind::CheckpointWritten,
      TraceKind::Terminate,     TraceKind::Restart,
      TraceKind::Finish,        TraceKind::NodesAllocatedTotal,
  };
  for (TraceKind k : kinds)
    if (trace_kind_name(k) == s) return k;
  return std::nullopt;
}

inline nlohmann::ordered_json trace_event_to_json(const TraceEvent& e) {
  nlohmann::ordered_json j;
  j["t"] = e.time;
  j["kind"] = trace_kind_name(e.kind);
  if (!e.job.empty()) j["job"] = e.job;
  if (e.nodes) j["nodes"] = *e.nodes;
  if (e.nodes_from) j["from"] = *e.nodes_from;
  if (e.nodes_to) j["to"] = *e.nodes_to;
  if (e.total_nodes) j["total_nodes"] = *e.total_nodes;
  if (e.step) j["step"] = *e.step;
  if (e.ce) j["ce"] = *e.ce;
  if (e.duration) j["duration_s"] = *e.duration;
  return j;
}

inline TraceEvent trace_event_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw TraceFormatError("event is not a JSON object");
  if (!j.contains("t") || !j["t"].is_number())
    throw TraceFormatError("event is missing a numeric \"t\"");
  if (!j.contains("kind") || !j["kind"].is_string())
    throw TraceFormatError("event is missing a string \"kind\"");
  TraceEvent e;
  e.time = j["t"].get<double>();
  const auto kind = trace_kind_from_name(j["kind"].get<std::string>());
  if (!kind) throw TraceFormatError("unknown event kind \"" + j["kind"].get<std::string>() + "\"");
  e.kind = *kind;
  if (j.contains("job")) e.job = j["job"].get<std::string>();
  if (j.contains("nodes")) e.nodes = j["nodes"].get<NodeCount>();
  if (j.contains("from")) e.nodes_from = j["from"].get<NodeCount>();
  if (j.contains("to")) e.nodes_to = j["to"].get<NodeCount>();
  if (j.contains("total_nodes")) e.total_nodes = j["total_nodes"].get<NodeCount>();
  if (j.contains("step")) e.step = j["step"].get<StepCount>();
  if (j.contains("ce")) e.ce = j["ce"].get<double>();
  if (j.contains("duration_s")) e.duration = j["duration_s"].get<double>();
  return e;
}

inline void write_trace(std::ostream& os, const TraceMeta& meta,
                        const std::vector<TraceEvent>& events) {
  nlohmann::ordered_json header;
  header["format"] = kTraceFormatName;
  header["version"] = kTraceFormatVersion;
  header["scenario"] = meta.scenario;
  header["seed"] = meta.seed;
  header["total_compute_nodes"] = meta.total_compute_nodes;
  header["reserved_total_nodes"] = meta.reserved_total_nodes;
  os << header.dump() << '\n';
  for (const TraceEvent& e : events) os << trace_event_to_json(e).dump() << '\n';
}

inline std::string trace_to_string(const TraceMeta& meta, const std::vector<TraceEvent>& events) {
  std::ostringstream os;
  write_trace(os, meta, events);
  return os.str();
}

struct ParsedTrace {
  TraceMeta meta;
  std::vector<TraceEvent> events;
};

inline ParsedTrace read_trace(std::istream& is) {
  ParsedTrace out;
  std::string line;
  std::size_t lineno = 0;
  bool saw_header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw TraceFormatError("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!saw_header) {
      if (!j.is_object() || j.value("format", "") != kTraceFormatName)
        throw TraceFormatError("line " + std::to_string(lineno) +
                               ": not a dmrsim trace header");
      if (j.value("version", -1) != kTraceFormatVersion)
        throw TraceFormatError("line " + std::to_string(lineno) +
                               ": unsupported trace version");
      out.meta.scenario = j.value("scenario", "");
      out.meta.seed = j.value("seed", std::uint64_t{0});
      out.meta.total_compute_nodes = j.value("total_compute_nodes", 0);
      out.meta.reserved_total_nodes = j.value("reserved_total_nodes", 0);
      saw_header = true;
      continue;
    }
    try {
      out.events.push_back(trace_event_from_json(j));
    } catch (const TraceFormatError& e) {
      throw TraceFormatError("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw TraceFormatError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!saw_header) throw TraceFormatError("empty trace: missing header line");
  return out;
}

inline ParsedTrace parse_trace(const std::string& text) {
  std::istringstream is(text);
  return read_trace(is);
}

}  // namespace dmrsim
