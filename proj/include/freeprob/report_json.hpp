#pragma once

// Report emission: insertion-ordered JSON with fixed 12-significant-digit
// float formatting so repeated runs produce byte-identical files, a flat
// CSV rendering for plotting, and atomic writes (temp file + rename).

#include <string>

#include "json.hpp"

namespace freeprob::report {

using Json = nlohmann::ordered_json;

inline const char* tool_version() { return "freeprob 0.1.0"; }

// %.12g; non-finite values become the strings "inf", "-inf", "nan"
std::string format_double(double x);

// Two-space indented dump with format_double applied to every float.
std::string dump(const Json& j);

// CSV rendering: an object whose "rows" key holds an array of flat
// objects becomes header + data lines; any other object becomes
// key,value lines with dotted paths. Values use format_double.
std::string to_csv(const Json& j);

// Writes via a sibling temp file and rename; throws std::runtime_error
// on I/O failure. Empty path means stdout.
void write_text(const std::string& path, const std::string& content);

// dump() or to_csv() by format ("json" | "csv"), then write_text.
void write_report(const std::string& path, const Json& j,
                  const std::string& format);

}  // namespace freeprob::report
