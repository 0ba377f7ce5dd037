#include "cbci/schema_file.hpp"

#include <fstream>

#include "cbci/error.hpp"

namespace cbci {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string_view> pieces;
    bool quoted = false;
    std::size_t begin = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '"') {
            quoted = !quoted;
        } else if (text[i] == ',' && !quoted) {
            pieces.push_back(text.substr(begin, i - begin));
            begin = i + 1;
        }
    }
    if (quoted) fail(ErrorKind::Parse, "unterminated quote in list '" + std::string(text) + "'");
    if (trim(text).empty()) return {};
    pieces.push_back(text.substr(begin));

    std::vector<std::string> items;
    items.reserve(pieces.size());
    for (auto piece : pieces) {
        piece = trim(piece);
        if (piece.size() >= 2 && piece.front() == '"' && piece.back() == '"') {
            piece = piece.substr(1, piece.size() - 2);
        }
        items.emplace_back(piece);
    }
    return items;
}

SchemaSpec parse_schema_spec(std::istream& in) {
    SchemaSpec spec;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            fail(ErrorKind::Parse, "schema line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key(trim(view.substr(0, eq)));
        const std::string_view value = trim(view.substr(eq + 1));

        if (key == "class") {
            spec.class_attribute = std::string(value);
        } else if (key == "id") {
            spec.id_attribute = std::string(value);
        } else if (key == "missing") {
            spec.missing_tokens = split_list(value);
        } else if (key == "columns") {
            spec.columns = split_list(value);
        } else if (key.rfind("column.", 0) == 0 && key.size() > 7) {
            ColumnSpec col;
            const auto colon = value.find(':');
            const std::string_view kind = trim(value.substr(0, colon));
            if (kind == "numeric") {
                col.kind = AttributeKind::Numeric;
            } else if (kind == "categorical") {
                col.kind = AttributeKind::Categorical;
            } else {
                fail(ErrorKind::Parse, "schema line " + std::to_string(lineno) + ": unknown kind '" +
                                           std::string(kind) + "'");
            }
            if (colon != std::string_view::npos) {
                if (col.kind != AttributeKind::Categorical) {
                    fail(ErrorKind::Parse, "schema line " + std::to_string(lineno) +
                                               ": only categorical columns take levels");
                }
                col.levels = split_list(value.substr(colon + 1));
            }
            spec.declared[key.substr(7)] = std::move(col);
        } else {
            fail(ErrorKind::Parse, "schema line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    if (spec.class_attribute.empty()) fail(ErrorKind::Parse, "schema: empty class column name");
    return spec;
}

SchemaSpec read_schema_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot read schema file '" + path + "'");
    return parse_schema_spec(in);
}

}  // namespace cbci
