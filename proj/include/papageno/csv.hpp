#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace papageno::csv {

// RFC 4180-style: comma separated, double-quoted fields with "" escapes.
// Returns false at end of input.
bool read_row(std::istream& in, std::vector<std::string>& row);

std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& row);

}  // namespace papageno::csv
