#pragma once

#include <istream>
#include <string>

#include "cbci/data_model.hpp"

namespace cbci {

/// Parses a schema sidecar. The format is one `key = value` per line, with
/// `#` comments:
///
///     class   = Class
///     id      = Record
///     missing = "?", ""
///     columns = Z1, Z2, Z3, Z4
///     column.Z1 = categorical: K11, K12, K13
///     column.Z3 = categorical
///     column.Z2 = numeric
///
/// List items are comma separated and trimmed; double quotes keep commas,
/// spaces or an empty token.
SchemaSpec parse_schema_spec(std::istream& in);
SchemaSpec read_schema_file(const std::string& path);

/// Splits a comma list using the sidecar quoting rules.
std::vector<std::string> split_list(std::string_view text);

}  // namespace cbci
