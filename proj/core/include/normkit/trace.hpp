#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace normkit {

/// One trace event. The first `inline_count` fields print as bare values,
/// the rest as key=value:
///   infer: cutWith(self,knife) [0.76, 1] rule=r1
struct TraceRecord {
  std::string event;
  std::vector<std::pair<std::string, std::string>> fields;
  std::size_t inline_count = 0;

  explicit TraceRecord(std::string ev = {}) : event(std::move(ev)) {}

  /// Adds a bare value (after earlier bare values, before keyed ones).
  TraceRecord& value(std::string key, std::string v);
  TraceRecord& field(std::string key, std::string v);
  const std::string* get(std::string_view key) const;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

using Trace = std::vector<TraceRecord>;

enum class TraceFormat { text, jsonl };

std::string render_line(const TraceRecord& r);
/// One JSON object per line: {"event":..,"inline":n,"fields":{...}}.
std::string render_json(const TraceRecord& r);
std::string render(const Trace& trace, TraceFormat format);

/// Reads back the output of render(trace, TraceFormat::jsonl).
Trace parse_jsonl(std::string_view text, std::string_view source_name = "<trace>");

}  // namespace normkit
