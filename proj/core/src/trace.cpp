#include "normkit/trace.hpp"

#include <json.hpp>

#include "normkit/error.hpp"

namespace normkit {

using ordered_json = nlohmann::ordered_json;

namespace {

void require_fresh(const TraceRecord& r, const std::string& key) {
  if (r.get(key)) throw ModelError("trace event '" + r.event + "' repeats field '" + key + "'");
}

}  // namespace

TraceRecord& TraceRecord::value(std::string key, std::string v) {
  require_fresh(*this, key);
  fields.insert(fields.begin() + static_cast<std::ptrdiff_t>(inline_count), {std::move(key), std::move(v)});
  ++inline_count;
  return *this;
}

TraceRecord& TraceRecord::field(std::string key, std::string v) {
  require_fresh(*this, key);
  fields.emplace_back(std::move(key), std::move(v));
  return *this;
}

const std::string* TraceRecord::get(std::string_view key) const {
  for (const auto& [k, v] : fields) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string render_line(const TraceRecord& r) {
  std::string out = r.event;
  if (!r.fields.empty()) out += ':';
  for (std::size_t i = 0; i < r.fields.size(); ++i) {
    out += ' ';
    if (i >= r.inline_count) out += r.fields[i].first + "=";
    out += r.fields[i].second;
  }
  return out;
}

std::string render_json(const TraceRecord& r) {
  ordered_json j;
  j["event"] = r.event;
  j["inline"] = r.inline_count;
  ordered_json fields = ordered_json::object();
  for (const auto& [k, v] : r.fields) fields[k] = v;
  j["fields"] = std::move(fields);
  return j.dump();
}

std::string render(const Trace& trace, TraceFormat format) {
  std::string out;
  for (const auto& r : trace) {
    out += format == TraceFormat::text ? render_line(r) : render_json(r);
    out += '\n';
  }
  return out;
}

Trace parse_jsonl(std::string_view text, std::string_view source_name) {
  Trace out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (line.empty()) continue;
    auto fail = [&](const std::string& msg) -> void {
      throw ParseError(std::string(source_name), {line_no, 1}, msg);
    };
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) fail("not a JSON object");
    if (!j.contains("event") || !j["event"].is_string()) fail("missing string 'event'");
    if (!j.contains("inline") || !j["inline"].is_number_unsigned()) fail("missing count 'inline'");
    if (!j.contains("fields") || !j["fields"].is_object()) fail("missing object 'fields'");
    TraceRecord r(j["event"].get<std::string>());
    for (const auto& [k, v] : j["fields"].items()) {
      if (!v.is_string()) fail("field '" + k + "' is not a string");
      r.fields.emplace_back(k, v.get<std::string>());
    }
    r.inline_count = j["inline"].get<std::size_t>();
    if (r.inline_count > r.fields.size()) fail("'inline' exceeds the field count");
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace normkit
