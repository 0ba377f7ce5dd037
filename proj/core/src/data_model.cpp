#include "cbci/data_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <unordered_map>

#include "cbci/csv.hpp"
#include "cbci/error.hpp"

namespace cbci {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::string where(RecordId id, std::string_view column) {
    return "row " + std::to_string(id) + ", column '" + std::string(column) + "'";
}

}  // namespace

std::optional<std::size_t> AttributeDescriptor::level_index(std::string_view level) const {
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] == level) return i + 1;
    }
    return std::nullopt;
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < attributes.size(); ++i) {
        if (attributes[i].name == name) return i;
    }
    return std::nullopt;
}

bool Schema::is_missing_token(std::string_view text) const {
    return std::find(missing_tokens.begin(), missing_tokens.end(), text) != missing_tokens.end() ||
           std::find(missing_tokens.begin(), missing_tokens.end(), trim(text)) != missing_tokens.end();
}

void Schema::validate() const {
    if (attributes.empty()) fail(ErrorKind::Validation, "schema has no feature attributes");
    std::set<std::string_view> names;
    for (const auto& a : attributes) {
        if (!names.insert(a.name).second) {
            fail(ErrorKind::Validation, "duplicate attribute '" + a.name + "'");
        }
        std::set<std::string_view> levels(a.levels.begin(), a.levels.end());
        if (levels.size() != a.levels.size()) {
            fail(ErrorKind::Validation, "duplicate level in attribute '" + a.name + "'");
        }
        if (!a.is_categorical() && !a.levels.empty()) {
            fail(ErrorKind::Validation, "numeric attribute '" + a.name + "' lists levels");
        }
    }
    if (names.count(class_attribute)) {
        fail(ErrorKind::Validation, "class attribute '" + class_attribute + "' is also a feature");
    }
    if (id_attribute && (names.count(*id_attribute) || *id_attribute == class_attribute)) {
        fail(ErrorKind::Validation, "id attribute '" + *id_attribute + "' collides with another column");
    }
}

std::size_t Record::missing_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(), [](const Cell& c) { return !c.has_value(); }));
}

std::vector<double> Record::complete_values() const {
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& c : values) {
        if (!c) fail(ErrorKind::Validation, "record " + display_name() + " has a missing cell");
        out.push_back(*c);
    }
    return out;
}

std::string Record::display_name() const {
    return name.empty() ? "R" + std::to_string(id) : name;
}

double ColumnScaling::forward(std::size_t column, double value) const {
    return range[column] > 0.0 ? (value - minimum[column]) / range[column] : 0.0;
}

double ColumnScaling::inverse(std::size_t column, double value) const {
    return minimum[column] + value * range[column];
}

Schema bind_schema(const SchemaSpec& spec, std::span<const std::string> header) {
    std::set<std::string_view> seen;
    for (const auto& h : header) {
        if (!seen.insert(h).second) fail(ErrorKind::Validation, "duplicate header column '" + h + "'");
    }
    if (!seen.count(spec.class_attribute)) {
        fail(ErrorKind::Validation, "class column '" + spec.class_attribute + "' not in header");
    }
    if (spec.id_attribute && !seen.count(*spec.id_attribute)) {
        fail(ErrorKind::Validation, "id column '" + *spec.id_attribute + "' not in header");
    }

    Schema schema;
    schema.class_attribute = spec.class_attribute;
    schema.id_attribute = spec.id_attribute;
    schema.missing_tokens = spec.missing_tokens;

    std::vector<std::string> features;
    if (spec.columns.empty()) {
        for (const auto& h : header) {
            if (h == spec.class_attribute || (spec.id_attribute && h == *spec.id_attribute)) continue;
            features.push_back(h);
        }
    } else {
        features = spec.columns;
    }
    for (const auto& name : features) {
        AttributeDescriptor a;
        a.name = name;
        if (auto it = spec.declared.find(name); it != spec.declared.end()) {
            a.kind = it->second.kind;
            a.levels = it->second.levels;
            a.levels_explicit = !a.levels.empty();
        }
        schema.attributes.push_back(std::move(a));
    }
    for (const auto& [name, col] : spec.declared) {
        if (!schema.index_of(name)) {
            fail(ErrorKind::Validation, "schema declares column '" + name + "' which is not a feature");
        }
    }
    schema.validate();
    return schema;
}

namespace {

RawDataset from_rows(std::vector<csv::Row> rows, const Schema& schema) {
    schema.validate();
    if (rows.empty()) fail(ErrorKind::Parse, "csv has no header row");

    RawDataset raw;
    raw.schema = schema;
    raw.header = std::move(rows.front());

    // Map header positions onto features / class / id.
    constexpr std::size_t kClass = static_cast<std::size_t>(-1);
    constexpr std::size_t kId = static_cast<std::size_t>(-2);
    std::vector<std::size_t> role(raw.header.size());
    std::vector<bool> feature_seen(schema.size(), false);
    bool class_seen = false;
    bool id_seen = false;
    for (std::size_t j = 0; j < raw.header.size(); ++j) {
        const auto& h = raw.header[j];
        if (h == schema.class_attribute) {
            if (class_seen) fail(ErrorKind::Validation, "duplicate class column in header");
            class_seen = true;
            role[j] = kClass;
        } else if (schema.id_attribute && h == *schema.id_attribute) {
            if (id_seen) fail(ErrorKind::Validation, "duplicate id column in header");
            id_seen = true;
            role[j] = kId;
        } else if (auto idx = schema.index_of(h)) {
            if (feature_seen[*idx]) fail(ErrorKind::Validation, "duplicate header column '" + h + "'");
            feature_seen[*idx] = true;
            role[j] = *idx;
        } else {
            fail(ErrorKind::Validation, "header column '" + h + "' is not in the schema");
        }
    }
    if (!class_seen) fail(ErrorKind::Validation, "header lacks class column '" + schema.class_attribute + "'");
    if (schema.id_attribute && !id_seen) {
        fail(ErrorKind::Validation, "header lacks id column '" + *schema.id_attribute + "'");
    }
    for (std::size_t i = 0; i < schema.size(); ++i) {
        if (!feature_seen[i]) {
            fail(ErrorKind::Validation, "header lacks attribute '" + schema.attributes[i].name + "'");
        }
    }

    raw.records.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        auto& fields = rows[r];
        const RecordId id = r;
        if (fields.size() != raw.header.size()) {
            fail(ErrorKind::Parse, "row " + std::to_string(id) + " has " + std::to_string(fields.size()) +
                                       " fields, header has " + std::to_string(raw.header.size()));
        }
        RawRecord rec;
        rec.id = id;
        rec.cells.resize(schema.size());
        for (std::size_t j = 0; j < fields.size(); ++j) {
            const auto& text = fields[j];
            if (role[j] == kClass) {
                if (!schema.is_missing_token(text)) rec.label = std::string(trim(text));
            } else if (role[j] == kId) {
                rec.name = std::string(trim(text));
            } else {
                const auto& attr = schema.attributes[role[j]];
                if (schema.is_missing_token(text)) continue;
                if (!attr.is_categorical() && !parse_number(text)) {
                    fail(ErrorKind::Parse, where(id, attr.name) + ": '" + text + "' is not numeric");
                }
                rec.cells[role[j]] = std::string(trim(text));
            }
        }
        rec.raw_fields = std::move(fields);
        raw.records.push_back(std::move(rec));
    }
    return raw;
}

}  // namespace

RawDataset load_csv(std::istream& source, const Schema& schema) {
    return from_rows(csv::read_all(source), schema);
}

RawDataset load_csv(std::istream& source, const SchemaSpec& spec) {
    auto rows = csv::read_all(source);
    if (rows.empty()) fail(ErrorKind::Parse, "csv has no header row");
    const Schema schema = bind_schema(spec, rows.front());
    return from_rows(std::move(rows), schema);
}

Schema resolve_levels(const RawDataset& raw) {
    Schema schema = raw.schema;
    for (std::size_t c = 0; c < schema.size(); ++c) {
        auto& attr = schema.attributes[c];
        if (!attr.is_categorical() || !attr.levels.empty()) continue;
        std::set<std::string> levels;
        for (const auto& rec : raw.records) {
            if (rec.cells[c]) levels.insert(*rec.cells[c]);
        }
        attr.levels.assign(levels.begin(), levels.end());
        attr.levels_explicit = false;
    }
    return schema;
}

Dataset encode(const RawDataset& raw) {
    Dataset ds;
    ds.schema = resolve_levels(raw);
    ds.records.reserve(raw.records.size());
    for (const auto& rr : raw.records) {
        Record rec;
        rec.id = rr.id;
        rec.name = rr.name;
        rec.label = rr.label;
        rec.values.resize(ds.schema.size());
        for (std::size_t c = 0; c < ds.schema.size(); ++c) {
            if (!rr.cells[c]) continue;
            const auto& attr = ds.schema.attributes[c];
            if (attr.is_categorical()) {
                auto idx = attr.level_index(*rr.cells[c]);
                if (!idx) {
                    fail(ErrorKind::Validation,
                         where(rr.id, attr.name) + ": '" + *rr.cells[c] + "' is not a declared level");
                }
                rec.values[c] = static_cast<double>(*idx);
            } else {
                auto v = parse_number(*rr.cells[c]);
                if (!v) fail(ErrorKind::Parse, where(rr.id, attr.name) + ": not numeric");
                rec.values[c] = *v;
            }
        }
        ds.records.push_back(std::move(rec));
    }
    return ds;
}

std::string decode_value(const AttributeDescriptor& column, double value) {
    if (!column.is_categorical()) return format_number(value);
    const double rounded = std::round(value);
    if (!std::isfinite(rounded) || rounded < 1.0 || rounded > static_cast<double>(column.levels.size())) {
        fail(ErrorKind::Validation, "value " + format_number(value) + " is outside the " +
                                        std::to_string(column.levels.size()) + " levels of '" +
                                        column.name + "'");
    }
    return column.levels[static_cast<std::size_t>(rounded) - 1];
}

GroupSplit split_groups(const Dataset& dataset) {
    GroupSplit split;
    for (const auto& rec : dataset.records) {
        (rec.is_complete() ? split.complete : split.incomplete).push_back(rec);
    }
    return split;
}

Dataset minmax_scale(const Dataset& dataset) {
    if (dataset.scaling) fail(ErrorKind::Validation, "dataset is already scaled");
    const std::size_t n = dataset.schema.size();
    ColumnScaling scaling;
    scaling.minimum.assign(n, 0.0);
    scaling.range.assign(n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
        bool any = false;
        double lo = 0.0;
        double hi = 0.0;
        for (const auto& rec : dataset.records) {
            if (!rec.values[c]) continue;
            const double v = *rec.values[c];
            if (!any) {
                lo = hi = v;
                any = true;
            } else {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
        if (!any) {
            fail(ErrorKind::Validation, "column '" + dataset.schema.attributes[c].name + "' is entirely missing");
        }
        scaling.minimum[c] = lo;
        scaling.range[c] = hi - lo;
    }

    Dataset out = dataset;
    for (auto& rec : out.records) {
        for (std::size_t c = 0; c < n; ++c) {
            if (rec.values[c]) rec.values[c] = scaling.forward(c, *rec.values[c]);
        }
    }
    out.scaling = std::move(scaling);
    return out;
}

Dataset unscale(const Dataset& dataset) {
    if (!dataset.scaling) return dataset;
    Dataset out = dataset;
    const auto& s = *dataset.scaling;
    for (auto& rec : out.records) {
        for (std::size_t c = 0; c < out.schema.size(); ++c) {
            if (!rec.values[c]) continue;
            double v = s.inverse(c, *rec.values[c]);
            if (out.schema.attributes[c].is_categorical()) v = std::round(v);
            rec.values[c] = v;
        }
    }
    out.scaling.reset();
    return out;
}

void write_csv(std::ostream& out, const RawDataset& original, const Dataset& result) {
    const Schema& schema = result.schema;
    std::unordered_map<RecordId, const Record*> by_id;
    for (const auto& rec : result.records) by_id.emplace(rec.id, &rec);

    // Header positions of the features, by name.
    std::vector<std::optional<std::size_t>> feature_at(original.header.size());
    std::optional<std::size_t> class_at;
    for (std::size_t j = 0; j < original.header.size(); ++j) {
        if (original.header[j] == schema.class_attribute) {
            class_at = j;
        } else {
            feature_at[j] = schema.index_of(original.header[j]);
        }
    }

    csv::write_row(out, original.header);
    for (const auto& raw : original.records) {
        csv::Row row = raw.raw_fields;
        auto it = by_id.find(raw.id);
        if (it != by_id.end()) {
            const Record& rec = *it->second;
            for (std::size_t j = 0; j < row.size(); ++j) {
                if (feature_at[j]) {
                    const std::size_t c = *feature_at[j];
                    if (!raw.cells[c] && rec.values[c]) {
                        row[j] = decode_value(schema.attributes[c], *rec.values[c]);
                    }
                } else if (class_at && j == *class_at && !raw.label && rec.label) {
                    row[j] = *rec.label;
                }
            }
        }
        csv::write_row(out, row);
    }
}

std::string format_number(double value) {
    if (value == 0.0) return "0";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) fail(ErrorKind::Validation, "cannot format number");
    return std::string(buf, ptr);
}

}  // namespace cbci
