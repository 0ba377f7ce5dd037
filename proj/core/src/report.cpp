#include "cbci/report.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "cbci/csv.hpp"
#include "cbci/error.hpp"

namespace cbci::report {

std::string fixed6(double value) {
    if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, 6);
    if (ec != std::errc{}) fail(ErrorKind::Validation, "cannot format value");
    std::string out(buf, ptr);
    if (out == "-0.000000") out.erase(0, 1);
    return out;
}

Section& Document::section(std::string name) {
    order_.push_back({false, sections_.size()});
    sections_.push_back({std::move(name), {}});
    return sections_.back();
}

Table& Document::table(std::string name, std::vector<std::string> columns) {
    order_.push_back({true, tables_.size()});
    tables_.push_back({std::move(name), std::move(columns), {}});
    return tables_.back();
}

const Section* Document::find_section(std::string_view name) const {
    for (const auto& s : sections_) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

const Table* Document::find_table(std::string_view name) const {
    for (const auto& t : tables_) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

std::vector<const Table*> Document::tables_with_prefix(std::string_view prefix) const {
    std::vector<const Table*> out;
    for (const auto& t : tables_) {
        if (t.name.rfind(prefix, 0) == 0) out.push_back(&t);
    }
    return out;
}

void Document::write(std::ostream& out) const {
    if (!title_.empty()) out << "# " << title_ << "\n";
    bool first = title_.empty();
    for (const auto& block : order_) {
        if (!first) out << "\n";
        first = false;
        if (block.is_table) {
            const auto& t = tables_[block.index];
            out << "[table " << t.name << "]\n";
            csv::write_row(out, t.columns);
            for (const auto& row : t.rows) csv::write_row(out, row);
        } else {
            const auto& s = sections_[block.index];
            out << "[section " << s.name << "]\n";
            for (const auto& [k, v] : s.entries) out << k << " = " << v << "\n";
        }
    }
}

std::string Document::str() const {
    std::ostringstream out;
    write(out);
    return out.str();
}

Document Document::parse(std::istream& in) {
    Document doc;
    std::string line;
    Section* section = nullptr;
    Table* table = nullptr;
    bool need_header = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lineno == 1 && line.rfind("# ", 0) == 0) {
            doc.title_ = line.substr(2);
            continue;
        }
        if (line.front() == '[' && line.back() == ']') {
            const std::string inner = line.substr(1, line.size() - 2);
            const auto space = inner.find(' ');
            const std::string kind = inner.substr(0, space);
            const std::string name = space == std::string::npos ? std::string() : inner.substr(space + 1);
            if (kind == "table") {
                table = &doc.table(name, {});
                section = nullptr;
                need_header = true;
            } else if (kind == "section") {
                section = &doc.section(name);
                table = nullptr;
            } else {
                fail(ErrorKind::Parse, "report line " + std::to_string(lineno) + ": unknown block '" + kind + "'");
            }
            continue;
        }
        if (table) {
            std::istringstream row_in(line);
            auto rows = csv::read_all(row_in);
            auto row = rows.empty() ? csv::Row{} : rows.front();
            if (need_header) {
                table->columns = std::move(row);
                need_header = false;
            } else {
                table->rows.push_back(std::move(row));
            }
        } else if (section) {
            const auto eq = line.find(" = ");
            if (eq == std::string::npos) {
                fail(ErrorKind::Parse, "report line " + std::to_string(lineno) + ": expected key = value");
            }
            section->add(line.substr(0, eq), line.substr(eq + 3));
        } else {
            fail(ErrorKind::Parse, "report line " + std::to_string(lineno) + ": content outside a block");
        }
    }
    return doc;
}

}  // namespace cbci::report
