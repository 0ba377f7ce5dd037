#include "cbci/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <unordered_map>

#include "cbci/error.hpp"

namespace cbci {
namespace {

void accumulate(ErrorStats& stats, double error) {
    ++stats.count;
    stats.rmse += error * error;  // finalised later
    stats.mae += std::abs(error);
}

void finalise(ErrorStats& stats) {
    if (stats.count == 0) return;
    stats.rmse = std::sqrt(stats.rmse / static_cast<double>(stats.count));
    stats.mae /= static_cast<double>(stats.count);
}

/// Most frequent value, ties to the one seen first.
double mode_first_seen(std::span<const double> values) {
    double best = values.front();
    std::size_t best_count = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto count = static_cast<std::size_t>(std::count(values.begin(), values.end(), values[i]));
        if (count > best_count) {
            best_count = count;
            best = values[i];
        }
    }
    return best;
}

std::optional<std::string> majority_label(std::span<const Record* const> records) {
    std::vector<std::pair<std::string, std::size_t>> counts;  // first-seen order
    for (const auto* r : records) {
        if (!r->label) continue;
        auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& p) { return p.first == *r->label; });
        if (it == counts.end()) {
            counts.emplace_back(*r->label, 1);
        } else {
            ++it->second;
        }
    }
    if (counts.empty()) return std::nullopt;
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    return best->first;
}

double gaussian(std::mt19937_64& rng) {
    const double u1 = 1.0 - uniform_unit(rng);
    const double u2 = uniform_unit(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t bound) {
    if (bound == 0) fail(ErrorKind::Validation, "uniform_index: empty range");
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = rng();
        if (r >= threshold) return r % bound;
    }
}

double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

MaskResult mask_dataset(const Dataset& dataset, const MaskSpec& spec) {
    if (!(spec.fraction > 0.0 && spec.fraction < 1.0)) {
        fail(ErrorKind::Validation, "mask fraction must lie strictly between 0 and 1");
    }
    const std::size_t n = dataset.schema.size();
    std::vector<std::size_t> columns = spec.eligible_columns;
    if (columns.empty() && spec.eligible_columns.empty()) {
        for (std::size_t c = 0; c < n; ++c) columns.push_back(c);
    }
    std::sort(columns.begin(), columns.end());
    columns.erase(std::unique(columns.begin(), columns.end()), columns.end());
    if (columns.empty()) fail(ErrorKind::Validation, "no eligible columns to mask");
    for (auto c : columns) {
        if (c >= n) fail(ErrorKind::Validation, "eligible column " + std::to_string(c) + " out of range");
    }
    const std::size_t cap = spec.max_per_record ? *spec.max_per_record : (n > 0 ? n - 1 : 0);

    struct Candidate {
        std::size_t row;
        std::size_t column;
    };
    std::vector<Candidate> candidates;
    std::vector<std::size_t> present(dataset.records.size(), 0);
    for (std::size_t r = 0; r < dataset.records.size(); ++r) {
        const auto& values = dataset.records[r].values;
        present[r] = static_cast<std::size_t>(std::count_if(values.begin(), values.end(),
                                                            [](const Cell& c) { return c.has_value(); }));
        for (auto c : columns) {
            if (values[c]) candidates.push_back({r, c});
        }
    }

    MaskResult result;
    result.masked = dataset;
    result.requested = static_cast<std::size_t>(std::llround(spec.fraction * static_cast<double>(candidates.size())));

    std::mt19937_64 rng(spec.seed);
    for (std::size_t i = candidates.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(candidates[i - 1], candidates[j]);
    }

    std::vector<std::size_t> masked_per_row(dataset.records.size(), 0);
    std::size_t accepted = 0;
    for (const auto& cand : candidates) {
        if (accepted == result.requested) break;
        if (masked_per_row[cand.row] >= cap || present[cand.row] <= 1) continue;
        auto& rec = result.masked.records[cand.row];
        result.truth.push_back({rec.id, cand.column, *rec.values[cand.column]});
        rec.values[cand.column].reset();
        ++masked_per_row[cand.row];
        --present[cand.row];
        ++accepted;
    }
    result.shortfall = result.requested - accepted;

    if (spec.hide_labels) {
        for (std::size_t r = 0; r < result.masked.records.size(); ++r) {
            auto& rec = result.masked.records[r];
            if (masked_per_row[r] > 0 && rec.label) {
                result.hidden_labels.emplace(rec.id, *rec.label);
                rec.label.reset();
            }
        }
    }
    std::sort(result.truth.begin(), result.truth.end(), [](const MaskedCell& a, const MaskedCell& b) {
        return a.record_id < b.record_id || (a.record_id == b.record_id && a.column < b.column);
    });
    return result;
}

Metrics score_imputation(const Dataset& imputed, std::span<const MaskedCell> truth,
                         const std::map<RecordId, std::string>* true_labels) {
    std::unordered_map<RecordId, const Record*> by_id;
    for (const auto& r : imputed.records) by_id.emplace(r.id, &r);

    Metrics m;
    std::set<RecordId> touched;
    for (const auto& cell : truth) {
        auto it = by_id.find(cell.record_id);
        if (it == by_id.end() || cell.column >= imputed.schema.size()) {
            fail(ErrorKind::Validation, "scored position (record " + std::to_string(cell.record_id) + ", column " +
                                            std::to_string(cell.column) + ") does not exist");
        }
        const Cell& value = it->second->values[cell.column];
        if (!value) {
            fail(ErrorKind::Validation, "record " + std::to_string(cell.record_id) + " column " +
                                            std::to_string(cell.column) + " is still missing");
        }
        touched.insert(cell.record_id);
        if (imputed.schema.attributes[cell.column].is_categorical()) {
            ++m.categorical_count;
            if (std::round(*value) == std::round(cell.value)) ++m.categorical_correct;
        } else {
            const double err = *value - cell.value;
            accumulate(m.numeric, err);
            accumulate(m.per_column[cell.column], err);
        }
    }
    finalise(m.numeric);
    for (auto& [c, stats] : m.per_column) finalise(stats);
    if (m.categorical_count) {
        m.categorical_accuracy = static_cast<double>(m.categorical_correct) / static_cast<double>(m.categorical_count);
    }

    if (true_labels) {
        for (RecordId id : touched) {
            auto truth_it = true_labels->find(id);
            if (truth_it == true_labels->end()) continue;
            ++m.class_count;
            const auto& predicted = by_id.at(id)->label;
            if (predicted && *predicted == truth_it->second) ++m.class_correct;
        }
        if (m.class_count) {
            m.class_accuracy = static_cast<double>(m.class_correct) / static_cast<double>(m.class_count);
        }
    }
    return m;
}

std::string describe(const BaselineKind& kind) {
    if (std::holds_alternative<baseline::GlobalMeanMode>(kind)) return "global_mean_mode";
    return "raw_knn(" + std::to_string(std::get<baseline::RawKnn>(kind).k) + ")";
}

Dataset run_baseline(const Dataset& masked, const BaselineKind& kind, bool predict_labels) {
    std::vector<const Record*> complete;
    for (const auto& r : masked.records) {
        if (r.is_complete()) complete.push_back(&r);
    }
    if (complete.empty()) fail(ErrorKind::Pipeline, "baseline: no complete records");
    const std::size_t n = masked.schema.size();
    Dataset out = masked;

    if (std::holds_alternative<baseline::GlobalMeanMode>(kind)) {
        std::vector<double> fillers(n);
        for (std::size_t c = 0; c < n; ++c) {
            std::vector<double> column;
            column.reserve(complete.size());
            for (const auto* r : complete) column.push_back(*r->values[c]);
            if (masked.schema.attributes[c].is_categorical()) {
                std::sort(column.begin(), column.end());
                std::size_t best_count = 0;
                for (std::size_t i = 0; i < column.size();) {
                    std::size_t j = i;
                    while (j < column.size() && column[j] == column[i]) ++j;
                    if (j - i > best_count) {  // strict: ties keep the lowest level
                        best_count = j - i;
                        fillers[c] = column[i];
                    }
                    i = j;
                }
            } else {
                double sum = 0.0;
                for (double v : column) sum += v;
                fillers[c] = sum / static_cast<double>(column.size());
            }
        }
        const auto majority = majority_label(complete);
        for (auto& r : out.records) {
            const bool had_missing = !r.is_complete();
            for (std::size_t c = 0; c < n; ++c) {
                if (!r.values[c]) r.values[c] = fillers[c];
            }
            if (predict_labels && !r.label && had_missing) r.label = majority;
        }
        return out;
    }

    const std::size_t k = std::get<baseline::RawKnn>(kind).k;
    if (k == 0 || k > complete.size()) {
        fail(ErrorKind::Validation, "raw_knn k must lie in 1.." + std::to_string(complete.size()));
    }
    for (auto& r : out.records) {
        if (r.is_complete()) continue;
        std::vector<std::pair<double, const Record*>> ranked;
        ranked.reserve(complete.size());
        for (const auto* g : complete) {
            double sum = 0.0;
            bool any = false;
            for (std::size_t c = 0; c < n; ++c) {
                if (!r.values[c]) continue;
                const double d = *r.values[c] - *g->values[c];
                sum += d * d;
                any = true;
            }
            if (!any) fail(ErrorKind::Validation, "raw_knn: record " + r.display_name() + " has no present cell");
            ranked.emplace_back(std::sqrt(sum), g);
        }
        std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end(),
                          [](const auto& a, const auto& b) {
                              return a.first < b.first || (a.first == b.first && a.second->id < b.second->id);
                          });
        std::vector<const Record*> nearest;
        for (std::size_t i = 0; i < k; ++i) nearest.push_back(ranked[i].second);
        for (std::size_t c = 0; c < n; ++c) {
            if (r.values[c]) continue;
            std::vector<double> column;
            for (const auto* g : nearest) column.push_back(*g->values[c]);
            if (masked.schema.attributes[c].is_categorical()) {
                r.values[c] = mode_first_seen(column);
            } else {
                double sum = 0.0;
                for (double v : column) sum += v;
                r.values[c] = sum / static_cast<double>(column.size());
            }
        }
        if (predict_labels && !r.label) r.label = majority_label(nearest);
    }
    return out;
}

Dataset make_synthetic(const SyntheticSpec& spec) {
    if (spec.rows == 0 || spec.classes == 0 || spec.numeric_columns + spec.categorical_columns == 0) {
        fail(ErrorKind::Validation, "synthetic spec needs rows, classes and at least one column");
    }
    if (spec.categorical_columns > 0 && spec.levels < 2) {
        fail(ErrorKind::Validation, "synthetic categorical columns need at least 2 levels");
    }
    std::mt19937_64 rng(spec.seed);

    Dataset ds;
    ds.schema.class_attribute = "class";
    for (std::size_t c = 0; c < spec.numeric_columns; ++c) {
        ds.schema.attributes.push_back({"x" + std::to_string(c + 1), AttributeKind::Numeric, {}, false});
    }
    std::vector<std::string> levels;
    for (std::size_t l = 0; l < spec.levels; ++l) levels.push_back("L" + std::to_string(l + 1));
    for (std::size_t c = 0; c < spec.categorical_columns; ++c) {
        ds.schema.attributes.push_back({"c" + std::to_string(c + 1), AttributeKind::Categorical, levels, true});
    }

    std::vector<std::vector<double>> centres(spec.classes, std::vector<double>(spec.numeric_columns));
    std::vector<std::vector<std::size_t>> preferred(spec.classes, std::vector<std::size_t>(spec.categorical_columns));
    for (std::size_t k = 0; k < spec.classes; ++k) {
        for (auto& v : centres[k]) v = 10.0 * uniform_unit(rng);
        for (auto& p : preferred[k]) p = static_cast<std::size_t>(uniform_index(rng, spec.levels));
    }

    ds.records.reserve(spec.rows);
    for (std::size_t i = 0; i < spec.rows; ++i) {
        const auto k = static_cast<std::size_t>(uniform_index(rng, spec.classes));
        Record r;
        r.id = i + 1;
        r.label = "C" + std::to_string(k + 1);
        for (std::size_t c = 0; c < spec.numeric_columns; ++c) {
            const double v = centres[k][c] + spec.noise * gaussian(rng);
            r.values.emplace_back(std::round(v * 1000.0) / 1000.0);
        }
        for (std::size_t c = 0; c < spec.categorical_columns; ++c) {
            std::size_t level = preferred[k][c];
            if (uniform_unit(rng) >= 0.7) level = static_cast<std::size_t>(uniform_index(rng, spec.levels));
            r.values.emplace_back(static_cast<double>(level + 1));
        }
        ds.records.push_back(std::move(r));
    }
    return ds;
}

}  // namespace cbci
