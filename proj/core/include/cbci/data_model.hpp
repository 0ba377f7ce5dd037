#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cbci {

/// 1-based input ordinal. All tie-breaking uses the lowest id.
using RecordId = std::size_t;

/// An encoded cell; std::nullopt marks a missing value.
using Cell = std::optional<double>;

enum class AttributeKind { Numeric, Categorical };

struct AttributeDescriptor {
    std::string name;
    AttributeKind kind = AttributeKind::Numeric;
    /// Ordered level names; level i (0-based here) encodes to i + 1.
    std::vector<std::string> levels;
    /// Levels came from the schema file rather than from the data.
    bool levels_explicit = false;

    bool is_categorical() const noexcept { return kind == AttributeKind::Categorical; }

    /// 1-based encoded index of `level`, if it is one of the levels.
    std::optional<std::size_t> level_index(std::string_view level) const;
};

/// Feature attributes bound to a concrete CSV header.
struct Schema {
    std::vector<AttributeDescriptor> attributes;
    std::string class_attribute;
    /// Optional column holding a display name per record; never a feature.
    std::optional<std::string> id_attribute;
    std::vector<std::string> missing_tokens{"?", ""};

    std::size_t size() const noexcept { return attributes.size(); }
    std::optional<std::size_t> index_of(std::string_view name) const;
    bool is_missing_token(std::string_view text) const;

    /// Throws Validation on duplicate names, duplicate levels, n == 0 or a
    /// class attribute that is also listed as a feature.
    void validate() const;
};

/// Column declaration from a schema sidecar, before it meets a header.
struct ColumnSpec {
    AttributeKind kind = AttributeKind::Numeric;
    std::vector<std::string> levels;  // empty: derive from data
};

/// Contents of a schema sidecar file. Columns not declared are numeric.
struct SchemaSpec {
    std::string class_attribute = "class";
    std::optional<std::string> id_attribute;
    std::vector<std::string> missing_tokens{"?", ""};
    /// Explicit feature column list; when empty, every header column other
    /// than the class and id columns is a feature.
    std::vector<std::string> columns;
    std::map<std::string, ColumnSpec, std::less<>> declared;
};

/// One input row as text. `cells` is std::nullopt where the raw text is a
/// missing token.
struct RawRecord {
    RecordId id = 0;
    std::string name;
    std::vector<std::optional<std::string>> cells;
    std::optional<std::string> label;
    /// Verbatim field text in header order, kept for byte-faithful output.
    std::vector<std::string> raw_fields;
};

struct RawDataset {
    Schema schema;
    std::vector<std::string> header;
    std::vector<RawRecord> records;
};

struct Record {
    RecordId id = 0;
    std::string name;
    std::vector<Cell> values;
    std::optional<std::string> label;

    std::size_t missing_count() const noexcept;
    bool is_complete() const noexcept { return missing_count() == 0; }
    /// Throws Validation if any cell is missing.
    std::vector<double> complete_values() const;
    /// Display name, falling back to "R<id>".
    std::string display_name() const;
};

/// Per-column affine map used by the optional min-max scaling.
struct ColumnScaling {
    std::vector<double> minimum;
    std::vector<double> range;  // 0 for constant columns

    double forward(std::size_t column, double value) const;
    double inverse(std::size_t column, double value) const;
};

struct Dataset {
    Schema schema;
    std::vector<Record> records;
    std::optional<ColumnScaling> scaling;

    std::size_t size() const noexcept { return records.size(); }
};

struct GroupSplit {
    std::vector<Record> complete;    // G1
    std::vector<Record> incomplete;  // G2
};

/// Binds a sidecar spec to a header row. Throws Validation on mismatch.
Schema bind_schema(const SchemaSpec& spec, std::span<const std::string> header);

/// Parses a CSV whose header must contain exactly the schema's features,
/// the class column and, if set, the id column.
RawDataset load_csv(std::istream& source, const Schema& schema);
RawDataset load_csv(std::istream& source, const SchemaSpec& spec);

/// Fills in derived level lists (sorted lexicographically) for categorical
/// columns that have none.
Schema resolve_levels(const RawDataset& raw);

Dataset encode(const RawDataset& raw);

/// Text form of an encoded value. Categorical values are rounded to the
/// nearest level index first.
std::string decode_value(const AttributeDescriptor& column, double value);

GroupSplit split_groups(const Dataset& dataset);

/// Maps every present value to [0,1] per column; constant columns map to 0.
Dataset minmax_scale(const Dataset& dataset);

/// Undoes `dataset.scaling`, if any. Categorical cells are rounded back to
/// level indices.
Dataset unscale(const Dataset& dataset);

/// Writes `result` using the layout of `original`: cells that were present
/// in the input are written verbatim, filled cells are decoded, and absent
/// labels are replaced when `result` carries one.
void write_csv(std::ostream& out, const RawDataset& original, const Dataset& result);

/// Shortest round-trip text for a double ("7", "2.5", "0.1").
std::string format_number(double value);

}  // namespace cbci
