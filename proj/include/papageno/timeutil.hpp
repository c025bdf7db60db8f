#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace papageno {

using Timestamp = std::chrono::sys_seconds;

// ISO-8601: "YYYY-MM-DD", "YYYY-MM-DDTHH:MM[:SS[.fff]]" with optional "Z" or
// "+HH:MM"/"-HH:MM" offset (space also accepted as date/time separator).
// Result is UTC. Throws papageno::Error on malformed input.
Timestamp parse_iso8601(std::string_view s);

std::string format_iso8601(Timestamp t);               // "YYYY-MM-DDTHH:MM:SSZ"
std::string format_date(std::chrono::sys_days day);    // "YYYY-MM-DD"
std::chrono::sys_days parse_date(std::string_view s);  // "YYYY-MM-DD"

}  // namespace papageno
