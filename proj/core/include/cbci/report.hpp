#pragma once

#include <deque>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cbci::report {

/// Fixed six-decimal text, with negative zero printed as zero.
std::string fixed6(double value);

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

struct Section {
    std::string name;
    std::vector<std::pair<std::string, std::string>> entries;

    void add(std::string key, std::string value) { entries.emplace_back(std::move(key), std::move(value)); }
};

/// A structured-text document of named key/value sections and CSV tables:
///
///     # title
///
///     [section config]
///     key = value
///
///     [table type1]
///     record,type1
///     MR1,6.791479
///
/// Blocks are written in insertion order, separated by a blank line.
class Document {
public:
    explicit Document(std::string title = {}) : title_(std::move(title)) {}

    Section& section(std::string name);
    Table& table(std::string name, std::vector<std::string> columns);

    const std::string& title() const noexcept { return title_; }
    const Section* find_section(std::string_view name) const;
    const Table* find_table(std::string_view name) const;
    std::vector<const Table*> tables_with_prefix(std::string_view prefix) const;

    void write(std::ostream& out) const;
    std::string str() const;

    static Document parse(std::istream& in);

private:
    struct Block {
        bool is_table = false;
        std::size_t index = 0;
    };
    std::string title_;
    std::deque<Section> sections_;
    std::deque<Table> tables_;
    std::vector<Block> order_;
};

}  // namespace cbci::report
