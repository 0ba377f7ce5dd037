#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace cbci::csv {

using Row = std::vector<std::string>;

/// Reads RFC-4180 rows (quoted fields, doubled quotes, embedded newlines).
/// Accepts LF and CRLF line endings. A trailing newline does not produce an
/// empty row; blank lines are skipped.
std::vector<Row> read_all(std::istream& in);

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape_field(std::string_view field);

void write_row(std::ostream& out, const Row& row);

}  // namespace cbci::csv
