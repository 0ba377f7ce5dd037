#include "cbci/imputation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "cbci/error.hpp"

namespace cbci {
namespace {

const Record& donor_record(std::span<const Record> group, RecordId id) {
    auto it = std::lower_bound(group.begin(), group.end(), id,
                               [](const Record& r, RecordId v) { return r.id < v; });
    if (it != group.end() && it->id == id) return *it;
    auto scan = std::find_if(group.begin(), group.end(), [&](const Record& r) { return r.id == id; });
    if (scan == group.end()) fail(ErrorKind::Validation, "donor " + std::to_string(id) + " is not a complete record");
    return *scan;
}

/// Most frequent value; ties go to the value that appears first in `values`.
double mode_first_seen(std::span<const double> values) {
    std::vector<std::pair<double, std::size_t>> counts;
    for (double v : values) {
        auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& p) { return p.first == v; });
        if (it == counts.end()) {
            counts.emplace_back(v, 1);
        } else {
            ++it->second;
        }
    }
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    return best->first;
}

/// Most frequent value; ties go to the smallest value.
double mode_lowest(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    double best = values.front();
    std::size_t best_count = 0;
    for (std::size_t i = 0; i < values.size();) {
        std::size_t j = i;
        while (j < values.size() && values[j] == values[i]) ++j;
        if (j - i > best_count) {
            best_count = j - i;
            best = values[i];
        }
        i = j;
    }
    return best;
}

double mean(std::span<const double> values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

InitStrategy scaled_init(const InitStrategy& init, const Dataset& work) {
    const auto* fixed = std::get_if<init::Fixed>(&init);
    if (!fixed || !work.scaling) return init;
    init::Fixed scaled = *fixed;
    for (auto& m : scaled.means) {
        if (m.size() != work.schema.size()) {
            fail(ErrorKind::Validation, "FIXED init mean has " + std::to_string(m.size()) + " values, records have " +
                                            std::to_string(work.schema.size()));
        }
        for (std::size_t c = 0; c < m.size(); ++c) m[c] = work.scaling->forward(c, m[c]);
    }
    return scaled;
}

struct Prepared {
    Dataset work;
    PipelineState state;
    std::size_t k = 0;
    std::size_t neighbor_count = 0;
};

Prepared prepare(const Dataset& dataset, const ImputeConfig& config, ImputationReport& report) {
    Prepared p;
    p.work = config.scale ? minmax_scale(dataset) : dataset;
    p.state.split = split_groups(p.work);
    const auto& g1 = p.state.split.complete;
    if (g1.empty()) fail(ErrorKind::Pipeline, "no complete records: nothing to learn from");

    p.k = config.k ? *config.k : infer_k(g1);
    p.state.model = kmeans(g1, p.k, scaled_init(config.init, p.work), config.max_iter);
    if (!p.state.model.converged) {
        report.warnings.push_back("kmeans stopped at max_iter = " + std::to_string(config.max_iter) +
                                  " before converging");
    }
    if (p.state.model.empty_repairs > 0) {
        report.warnings.push_back("kmeans repaired " + std::to_string(p.state.model.empty_repairs) +
                                  " empty cluster(s)");
    }
    p.neighbor_count = config.neighbor_count ? *config.neighbor_count : p.k;
    if (p.neighbor_count == 0) fail(ErrorKind::Validation, "neighbour count must be positive");
    report.k = p.k;
    report.neighbor_count = p.neighbor_count;

    const MappingConfig mc{p.neighbor_count};
    p.state.complete_mappings.reserve(g1.size());
    for (const auto& r : g1) {
        p.state.complete_mappings.push_back(map_complete(r, p.state.model, g1, mc, &report.warnings));
    }
    return p;
}

void validate_fill(const FillStrategy& strategy, std::size_t group_size) {
    if (const auto* top = std::get_if<fill::TopK>(&strategy)) {
        if (top->k == 0) fail(ErrorKind::Validation, "TOP_K needs k >= 1");
        if (top->k > group_size) {
            fail(ErrorKind::Validation, "TOP_K k = " + std::to_string(top->k) + " exceeds the " +
                                            std::to_string(group_size) + " complete records");
        }
    }
}

std::vector<FilledCell> describe_fills(const Record& before, const Record& after, const Dataset& output) {
    std::vector<FilledCell> cells;
    for (std::size_t c = 0; c < before.values.size(); ++c) {
        if (before.values[c] || !after.values[c]) continue;
        FilledCell fc;
        fc.column = c;
        fc.encoded = *after.values[c];
        fc.decoded = decode_value(output.schema.attributes[c], fc.encoded);
        cells.push_back(std::move(fc));
    }
    return cells;
}

}  // namespace

std::string describe(const FillStrategy& strategy) {
    if (std::holds_alternative<fill::CopyDonor>(strategy)) return "copy_donor";
    if (const auto* top = std::get_if<fill::TopK>(&strategy)) return "top_k(" + std::to_string(top->k) + ")";
    return "class_mean";
}

std::size_t ImputationReport::failures() const {
    return static_cast<std::size_t>(
        std::count_if(targets.begin(), targets.end(), [](const TargetReport& t) { return t.error.has_value(); }));
}

DonorMatch match_nearest(const MappingEntry& target, std::span<const MappingEntry> donors) {
    if (donors.empty()) fail(ErrorKind::Pipeline, "no complete records to match against");
    DonorMatch match;
    match.target_id = target.record_id;
    match.ranked_donors.reserve(donors.size());
    for (const auto& d : donors) match.ranked_donors.push_back({d.record_id, std::abs(d.total - target.total)});
    std::sort(match.ranked_donors.begin(), match.ranked_donors.end(), [](const RankedDonor& a, const RankedDonor& b) {
        return a.difference < b.difference || (a.difference == b.difference && a.donor_id < b.donor_id);
    });
    return match;
}

Record fill_record(const Record& target, const DonorMatch& match, std::span<const Record> group,
                   const Schema& schema, const FillStrategy& strategy) {
    validate_fill(strategy, group.size());
    if (match.ranked_donors.empty()) fail(ErrorKind::Pipeline, "empty donor ranking");
    Record out = target;
    const Record& donor = donor_record(group, match.chosen().donor_id);

    if (std::holds_alternative<fill::CopyDonor>(strategy)) {
        for (std::size_t c = 0; c < out.values.size(); ++c) {
            if (!out.values[c]) out.values[c] = donor.values[c];
        }
        return out;
    }

    if (const auto* top = std::get_if<fill::TopK>(&strategy)) {
        if (top->k > match.ranked_donors.size()) {
            fail(ErrorKind::Validation, "TOP_K k exceeds the donor ranking");
        }
        std::vector<const Record*> donors;
        for (std::size_t i = 0; i < top->k; ++i) donors.push_back(&donor_record(group, match.ranked_donors[i].donor_id));
        for (std::size_t c = 0; c < out.values.size(); ++c) {
            if (out.values[c]) continue;
            std::vector<double> column;  // best-ranked first
            for (const auto* d : donors) column.push_back(*d->values[c]);
            out.values[c] = schema.attributes[c].is_categorical() ? mode_first_seen(column) : mean(column);
        }
        return out;
    }

    if (!donor.label) {
        fail(ErrorKind::Pipeline, "CLASS_MEAN: donor " + donor.display_name() + " has no class label");
    }
    std::vector<const Record*> peers;
    for (const auto& r : group) {
        if (r.label == donor.label) peers.push_back(&r);
    }
    std::sort(peers.begin(), peers.end(), [](const Record* a, const Record* b) { return a->id < b->id; });
    for (std::size_t c = 0; c < out.values.size(); ++c) {
        if (out.values[c]) continue;
        std::vector<double> column;
        for (const auto* p : peers) column.push_back(*p->values[c]);
        out.values[c] = schema.attributes[c].is_categorical() ? mode_lowest(std::move(column)) : mean(column);
    }
    return out;
}

std::string predict_class(const DonorMatch& match, std::span<const Record> group, std::size_t top_k) {
    if (top_k == 0) fail(ErrorKind::Validation, "class prediction needs top_k >= 1");
    const std::size_t limit = std::min(top_k, match.ranked_donors.size());

    struct Vote {
        std::size_t count = 0;
        RecordId best_ranked = 0;  // first donor of this class in rank order
    };
    std::map<std::string, Vote> votes;
    for (std::size_t i = 0; i < limit; ++i) {
        const Record& d = donor_record(group, match.ranked_donors[i].donor_id);
        if (!d.label) continue;
        auto [it, inserted] = votes.try_emplace(*d.label);
        if (inserted) it->second.best_ranked = d.id;
        ++it->second.count;
    }
    if (votes.empty()) {
        fail(ErrorKind::Pipeline, "top-" + std::to_string(top_k) + " donors of record " +
                                      std::to_string(match.target_id) + " are all unlabelled");
    }
    auto best = votes.begin();
    for (auto it = votes.begin(); it != votes.end(); ++it) {
        if (it->second.count > best->second.count ||
            (it->second.count == best->second.count && it->second.best_ranked < best->second.best_ranked)) {
            best = it;
        }
    }
    return best->first;
}

ImputationResult impute_dataset(const Dataset& dataset, const ImputeConfig& config) {
    ImputationResult result;
    auto& report = result.report;

    const bool any_missing = std::any_of(dataset.records.begin(), dataset.records.end(),
                                         [](const Record& r) { return !r.is_complete(); });
    if (!any_missing) {
        result.imputed = dataset;
        result.state.split = split_groups(dataset);
        report.warnings.push_back("nothing to impute: no record has a missing cell");
        return result;
    }

    Prepared p = prepare(dataset, config, report);
    const auto& g1 = p.state.split.complete;
    validate_fill(config.fill, g1.size());
    const MappingConfig mc{p.neighbor_count};

    std::unordered_map<RecordId, Record> filled;
    for (const auto& target : p.state.split.incomplete) {
        TargetReport tr;
        tr.target_id = target.id;
        tr.name = target.display_name();
        if (target.missing_count() == target.values.size()) {
            tr.error = "every attribute is missing";
            report.targets.push_back(std::move(tr));
            continue;
        }
        tr.mapping = map_missing(target, p.state.model, g1, mc, &report.warnings);
        p.state.incomplete_mappings.push_back(*tr.mapping);
        tr.match = match_nearest(*tr.mapping, p.state.complete_mappings);
        Record out;
        try {
            out = fill_record(target, *tr.match, g1, p.work.schema, config.fill);
        } catch (const Error& e) {
            tr.error = e.what();
            report.targets.push_back(std::move(tr));
            continue;
        }
        try {
            tr.predicted_class = predict_class(*tr.match, g1, config.class_top_k);
        } catch (const Error& e) {
            report.warnings.push_back(e.what());
        }
        if (config.predict_labels && !out.label && tr.predicted_class) {
            out.label = tr.predicted_class;
            tr.label_assigned = true;
        }
        filled.emplace(target.id, std::move(out));
        report.targets.push_back(std::move(tr));
    }

    Dataset working_out = p.work;
    for (auto& r : working_out.records) {
        if (auto it = filled.find(r.id); it != filled.end()) r = it->second;
    }
    result.imputed = unscale(working_out);

    std::unordered_map<RecordId, const Record*> in_by_id;
    std::unordered_map<RecordId, const Record*> out_by_id;
    for (const auto& r : dataset.records) in_by_id.emplace(r.id, &r);
    for (const auto& r : result.imputed.records) out_by_id.emplace(r.id, &r);
    for (auto& tr : report.targets) {
        if (tr.error) continue;
        tr.filled = describe_fills(*in_by_id.at(tr.target_id), *out_by_id.at(tr.target_id), result.imputed);
    }
    std::sort(report.targets.begin(), report.targets.end(),
              [](const TargetReport& a, const TargetReport& b) { return a.target_id < b.target_id; });
    result.state = std::move(p.state);
    return result;
}

ImputationResult classify_dataset(const Dataset& dataset, const ImputeConfig& config) {
    ImputationResult result;
    auto& report = result.report;

    const bool any_unlabelled = std::any_of(dataset.records.begin(), dataset.records.end(),
                                            [](const Record& r) { return !r.label; });
    if (!any_unlabelled) {
        result.imputed = dataset;
        result.state.split = split_groups(dataset);
        report.warnings.push_back("nothing to classify: every record has a label");
        return result;
    }

    Prepared p = prepare(dataset, config, report);
    const auto& g1 = p.state.split.complete;
    const MappingConfig mc{p.neighbor_count};

    // Only labelled complete records can vote.
    std::vector<MappingEntry> labelled;
    for (std::size_t i = 0; i < g1.size(); ++i) {
        if (g1[i].label) labelled.push_back(p.state.complete_mappings[i]);
    }
    if (labelled.empty()) fail(ErrorKind::Pipeline, "no labelled complete records");

    std::unordered_map<RecordId, std::string> assigned;
    for (const auto& target : p.work.records) {
        if (target.label) continue;
        TargetReport tr;
        tr.target_id = target.id;
        tr.name = target.display_name();
        try {
            if (target.is_complete()) {
                const auto pos = static_cast<std::size_t>(
                    std::find_if(g1.begin(), g1.end(), [&](const Record& r) { return r.id == target.id; }) - g1.begin());
                tr.mapping = p.state.complete_mappings[pos];
            } else if (target.missing_count() == target.values.size()) {
                tr.error = "every attribute is missing";
            } else {
                tr.mapping = map_missing(target, p.state.model, g1, mc, &report.warnings);
                p.state.incomplete_mappings.push_back(*tr.mapping);
            }
            if (tr.mapping) {
                tr.match = match_nearest(*tr.mapping, labelled);
                tr.predicted_class = predict_class(*tr.match, g1, config.class_top_k);
                tr.label_assigned = true;
                assigned.emplace(target.id, *tr.predicted_class);
            }
        } catch (const Error& e) {
            tr.error = e.what();
        }
        report.targets.push_back(std::move(tr));
    }

    result.imputed = dataset;
    for (auto& r : result.imputed.records) {
        if (auto it = assigned.find(r.id); it != assigned.end()) r.label = it->second;
    }
    result.state = std::move(p.state);
    return result;
}

}  // namespace cbci
