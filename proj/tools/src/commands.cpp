#include "cbci_cli/commands.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "cbci/csv.hpp"
#include "cbci/error.hpp"
#include "cbci/schema_file.hpp"

namespace cbci::cli {

using report::fixed6;

std::string to_string(InitKind kind) {
    switch (kind) {
        case InitKind::FarthestFirst: return "farthest_first";
        case InitKind::ClassSeeded: return "class_seeded";
        case InitKind::Fixed: return "fixed";
    }
    return "?";
}

std::string to_string(FillKind kind) {
    switch (kind) {
        case FillKind::CopyDonor: return "copy_donor";
        case FillKind::TopK: return "top_k";
        case FillKind::ClassMean: return "class_mean";
    }
    return "?";
}

std::string to_string(Method method) {
    switch (method) {
        case Method::Cbci: return "cbci";
        case Method::GlobalMeanMode: return "global_mean_mode";
        case Method::RawKnn: return "raw_knn";
    }
    return "?";
}

namespace {

struct Loaded {
    RawDataset raw;
    Dataset data;
};

Loaded load(const RunConfig& config) {
    if (config.input.empty()) fail(ErrorKind::Validation, "no input file given");
    if (config.schema.empty()) fail(ErrorKind::Validation, "no schema file given");
    SchemaSpec spec = read_schema_file(config.schema);
    if (config.missing_tokens) spec.missing_tokens = *config.missing_tokens;
    std::ifstream in(config.input, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot read input file '" + config.input + "'");
    Loaded out;
    out.raw = load_csv(in, spec);
    out.data = encode(out.raw);
    return out;
}

ImputeConfig impute_config(const RunConfig& config) {
    ImputeConfig ic;
    ic.k = config.k;
    switch (config.init) {
        case InitKind::FarthestFirst: ic.init = init::FarthestFirst{config.start_id}; break;
        case InitKind::ClassSeeded: ic.init = init::ClassSeeded{}; break;
        case InitKind::Fixed:
            if (config.means_file.empty()) fail(ErrorKind::Validation, "init 'fixed' needs a means file");
            ic.init = init::Fixed{read_means_file(config.means_file)};
            break;
    }
    ic.max_iter = config.max_iter;
    ic.neighbor_count = config.neighbor_count;
    switch (config.fill) {
        case FillKind::CopyDonor: ic.fill = fill::CopyDonor{}; break;
        case FillKind::TopK: ic.fill = fill::TopK{config.top_k}; break;
        case FillKind::ClassMean: ic.fill = fill::ClassMean{}; break;
    }
    ic.class_top_k = config.class_top_k;
    ic.predict_labels = config.assign_labels;
    ic.scale = config.scale;
    return ic;
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

std::string quoted_list(const std::vector<std::string>& items) {
    std::vector<std::string> q;
    for (const auto& s : items) q.push_back('"' + s + '"');
    return join(q, ", ");
}

std::string yes_no(bool b) { return b ? "true" : "false"; }

std::string count_or(std::size_t resolved, const std::optional<std::size_t>& given) {
    if (resolved == 0) return given ? std::to_string(*given) : "auto (unresolved)";
    return std::to_string(resolved) + (given ? "" : " (auto)");
}

void add_run_section(report::Document& doc, const RunConfig& config, const ImputeConfig& ic,
                     const Schema& schema, const ImputationReport& rep) {
    auto& s = doc.section("config");
    s.add("input", config.input);
    s.add("schema", config.schema);
    s.add("missing_tokens", quoted_list(schema.missing_tokens));
    s.add("k", count_or(rep.k, config.k));
    s.add("init", describe(ic.init));
    if (config.init == InitKind::Fixed) s.add("means_file", config.means_file);
    s.add("max_iter", std::to_string(config.max_iter));
    s.add("neighbor_count", count_or(rep.neighbor_count, config.neighbor_count));
    s.add("fill", describe(ic.fill));
    s.add("class_top_k", std::to_string(config.class_top_k));
    s.add("scale", yes_no(config.scale));
    s.add("assign_labels", yes_no(config.assign_labels));

    if (const auto* fixed = std::get_if<init::Fixed>(&ic.init)) {
        std::vector<std::string> cols{"cluster"};
        for (const auto& a : schema.attributes) cols.push_back(a.name);
        auto& t = doc.table("initial_means", cols);
        for (std::size_t c = 0; c < fixed->means.size(); ++c) {
            std::vector<std::string> row{std::to_string(c + 1)};
            for (double v : fixed->means[c]) row.push_back(fixed6(v));
            t.rows.push_back(std::move(row));
        }
    }
}

void add_data_section(report::Document& doc, const Dataset& data, const PipelineState& state) {
    std::set<std::string> labels;
    for (const auto& r : data.records) {
        if (r.label) labels.insert(*r.label);
    }
    auto& s = doc.section("data");
    s.add("records", std::to_string(data.size()));
    s.add("attributes", std::to_string(data.schema.size()));
    s.add("complete", std::to_string(state.split.complete.size()));
    s.add("incomplete", std::to_string(state.split.incomplete.size()));
    s.add("classes", std::to_string(labels.size()));
}

void add_clustering_section(report::Document& doc, const ClusterModel& model) {
    if (model.k == 0) return;
    auto& s = doc.section("clustering");
    s.add("iterations", std::to_string(model.iterations));
    s.add("converged", yes_no(model.converged));
    s.add("empty_repairs", std::to_string(model.empty_repairs));
    s.add("wcss", model.wcss_history.empty() ? "" : fixed6(model.wcss_history.back()));
}

using Names = std::unordered_map<RecordId, std::string>;

Names names_of(const Dataset& data) {
    Names names;
    for (const auto& r : data.records) names.emplace(r.id, r.display_name());
    return names;
}

void add_targets_table(report::Document& doc, const ImputationReport& rep, const Names& names) {
    auto& t = doc.table("targets", {"record", "mapping", "donor", "difference", "predicted_class",
                                    "label_assigned", "status"});
    for (const auto& tr : rep.targets) {
        std::vector<std::string> row{tr.name};
        row.push_back(tr.mapping ? fixed6(tr.mapping->total) : "");
        if (tr.match && !tr.match->ranked_donors.empty()) {
            row.push_back(names.at(tr.match->chosen().donor_id));
            row.push_back(fixed6(tr.match->chosen().difference));
        } else {
            row.insert(row.end(), {"", ""});
        }
        row.push_back(tr.predicted_class.value_or(""));
        row.push_back(yes_no(tr.label_assigned));
        row.push_back(tr.error ? "error: " + *tr.error : "ok");
        t.rows.push_back(std::move(row));
    }
}

void add_filled_table(report::Document& doc, const ImputationReport& rep, const Schema& schema) {
    auto& t = doc.table("imputed_cells", {"record", "column", "value"});
    for (const auto& tr : rep.targets) {
        for (const auto& f : tr.filled) {
            t.rows.push_back({tr.name, schema.attributes[f.column].name, f.decoded});
        }
    }
}

void add_warnings(report::Document& doc, const std::vector<std::string>& warnings) {
    if (warnings.empty()) return;
    auto& t = doc.table("warnings", {"message"});
    for (const auto& w : warnings) t.rows.push_back({w});
}

int add_result_section(report::Document& doc, const ImputationReport& rep) {
    const std::size_t failures = rep.failures();
    auto& s = doc.section("result");
    s.add("targets", std::to_string(rep.targets.size()));
    s.add("failures", std::to_string(failures));
    s.add("status", failures ? "partial" : "ok");
    return failures ? kExitPartial : kExitOk;
}

std::string csv_text(const RawDataset& raw, const Dataset& result) {
    std::ostringstream out;
    write_csv(out, raw, result);
    return out.str();
}

const MappingEntry* find_mapping(const std::vector<MappingEntry>& mappings, RecordId id) {
    for (const auto& m : mappings) {
        if (m.record_id == id) return &m;
    }
    return nullptr;
}

std::vector<std::string> cluster_columns(const char* first, std::size_t k) {
    std::vector<std::string> cols{first};
    for (std::size_t c = 0; c < k; ++c) cols.push_back("cluster_" + std::to_string(c + 1));
    return cols;
}

void add_mapping_tables(report::Document& doc, const std::string& suffix, const char* sum_name,
                        const std::vector<MappingEntry>& mappings, std::size_t k, const Names& names) {
    auto& dist = doc.table("cluster_distances_" + suffix, cluster_columns("record", k));
    for (const auto& m : mappings) {
        std::vector<std::string> row{names.at(m.record_id)};
        for (double v : m.cluster_distances) row.push_back(fixed6(v));
        dist.rows.push_back(std::move(row));
    }
    auto& sums = doc.table(sum_name, {"record", sum_name});
    for (const auto& m : mappings) sums.rows.push_back({names.at(m.record_id), fixed6(m.cluster_sum)});
}

void add_neighbor_tables(report::Document& doc, const std::string& suffix, const std::vector<MappingEntry>& mappings,
                         std::size_t d, const Names& names) {
    auto& nb = doc.table("neighbors_" + suffix, {"record", "rank", "neighbor", "distance"});
    for (const auto& m : mappings) {
        for (std::size_t i = 0; i < m.neighbors.size(); ++i) {
            nb.rows.push_back({names.at(m.record_id), std::to_string(i + 1), names.at(m.neighbors[i].id),
                               fixed6(m.neighbors[i].distance)});
        }
    }
    std::vector<std::string> cols{"record", "cluster_sum"};
    for (std::size_t i = 0; i < d; ++i) cols.push_back("neighbor_" + std::to_string(i + 1));
    cols.push_back("total");
    auto& fm = doc.table("final_mapping_" + suffix, cols);
    for (const auto& m : mappings) {
        std::vector<std::string> row{names.at(m.record_id), fixed6(m.cluster_sum)};
        for (std::size_t i = 0; i < d; ++i) row.push_back(i < m.neighbors.size() ? fixed6(m.neighbors[i].distance) : "");
        row.push_back(fixed6(m.total));
        fm.rows.push_back(std::move(row));
    }
}

void add_trace_tables(report::Document& doc, const Dataset& data, const ImputationResult& result) {
    const auto& state = result.state;
    const auto& model = state.model;
    const auto& schema = data.schema;
    const Names names = names_of(data);

    auto& split = doc.table("group_split", {"record", "group", "missing_columns"});
    for (const auto& r : data.records) {
        std::vector<std::string> missing;
        for (std::size_t c = 0; c < r.values.size(); ++c) {
            if (!r.values[c]) missing.push_back(schema.attributes[c].name);
        }
        split.rows.push_back({r.display_name(), missing.empty() ? "G1" : "G2", join(missing, " ")});
    }
    if (model.k == 0) return;

    auto& clusters = doc.table("clusters", {"cluster", "size", "members"});
    for (std::size_t c = 0; c < model.k; ++c) {
        std::vector<std::string> members;
        for (RecordId id : model.members[c]) members.push_back(names.at(id));
        clusters.rows.push_back({std::to_string(c + 1), std::to_string(members.size()), join(members, " ")});
    }

    std::vector<std::string> mean_cols{"cluster"};
    for (const auto& a : schema.attributes) mean_cols.push_back(a.name);
    auto& means = doc.table("cluster_means", mean_cols);
    for (std::size_t c = 0; c < model.k; ++c) {
        std::vector<std::string> row{std::to_string(c + 1)};
        for (double v : model.means[c]) row.push_back(fixed6(v));
        means.rows.push_back(std::move(row));
    }

    auto& history = doc.table("wcss_history", {"step", "wcss"});
    for (std::size_t i = 0; i < model.wcss_history.size(); ++i) {
        history.rows.push_back({std::to_string(i), fixed6(model.wcss_history[i])});
    }

    const std::size_t d = result.report.neighbor_count;
    add_mapping_tables(doc, "g1", "type1", state.complete_mappings, model.k, names);
    add_mapping_tables(doc, "g2", "type2", state.incomplete_mappings, model.k, names);

    const auto& g1 = state.split.complete;
    for (std::size_t c = 0; c < model.k; ++c) {
        const auto& ids = model.members[c];
        std::vector<std::string> cols{"record"};
        for (RecordId id : ids) cols.push_back(names.at(id));
        auto& pw = doc.table("pairwise_cluster_" + std::to_string(c + 1), cols);
        const auto dist = pairwise_distances(ids, g1);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            std::vector<std::string> row{names.at(ids[i])};
            for (std::size_t j = 0; j < ids.size(); ++j) row.push_back(fixed6(dist[i * ids.size() + j]));
            pw.rows.push_back(std::move(row));
        }
    }

    add_neighbor_tables(doc, "g1", state.complete_mappings, d, names);
    add_neighbor_tables(doc, "g2", state.incomplete_mappings, d, names);

    for (const auto& tr : result.report.targets) {
        if (!tr.match || !tr.mapping) continue;
        auto& t = doc.table("donor_ranking_" + tr.name,
                            {"rank", "donor", "donor_mapping", "target_mapping", "difference"});
        for (std::size_t i = 0; i < tr.match->ranked_donors.size(); ++i) {
            const auto& rd = tr.match->ranked_donors[i];
            const auto* dm = find_mapping(state.complete_mappings, rd.donor_id);
            t.rows.push_back({std::to_string(i + 1), names.at(rd.donor_id), dm ? fixed6(dm->total) : "",
                              fixed6(tr.mapping->total), fixed6(rd.difference)});
        }
    }

    std::vector<std::string> row_cols{"record"};
    for (const auto& a : schema.attributes) row_cols.push_back(a.name);
    row_cols.push_back("class");
    auto& rows = doc.table("imputed_rows", row_cols);
    for (const auto& tr : result.report.targets) {
        if (tr.error) continue;
        const auto it = std::find_if(result.imputed.records.begin(), result.imputed.records.end(),
                                     [&](const Record& r) { return r.id == tr.target_id; });
        std::vector<std::string> row{tr.name};
        for (std::size_t c = 0; c < it->values.size(); ++c) {
            row.push_back(it->values[c] ? decode_value(schema.attributes[c], *it->values[c]) : "");
        }
        row.push_back(it->label ? *it->label : tr.predicted_class.value_or(""));
        rows.rows.push_back(std::move(row));
    }
}

}  // namespace

CommandOutput cmd_impute(const RunConfig& config) {
    const Loaded in = load(config);
    const ImputeConfig ic = impute_config(config);
    const ImputationResult result = impute_dataset(in.data, ic);

    CommandOutput out;
    out.report = report::Document("cbci impute");
    add_run_section(out.report, config, ic, in.data.schema, result.report);
    add_data_section(out.report, in.data, result.state);
    add_clustering_section(out.report, result.state.model);
    add_targets_table(out.report, result.report, names_of(in.data));
    add_filled_table(out.report, result.report, in.data.schema);
    add_warnings(out.report, result.report.warnings);
    out.exit_code = add_result_section(out.report, result.report);
    out.csv = csv_text(in.raw, result.imputed);
    return out;
}

CommandOutput cmd_trace(const RunConfig& config) {
    const Loaded in = load(config);
    const ImputeConfig ic = impute_config(config);
    const ImputationResult result = impute_dataset(in.data, ic);

    CommandOutput out;
    out.report = report::Document("cbci trace");
    add_run_section(out.report, config, ic, in.data.schema, result.report);
    add_data_section(out.report, in.data, result.state);
    add_clustering_section(out.report, result.state.model);
    add_trace_tables(out.report, in.data, result);
    add_targets_table(out.report, result.report, names_of(in.data));
    add_warnings(out.report, result.report.warnings);
    out.exit_code = add_result_section(out.report, result.report);
    if (!config.output.empty()) out.csv = csv_text(in.raw, result.imputed);
    return out;
}

CommandOutput cmd_classify(const RunConfig& config) {
    const Loaded in = load(config);
    const ImputeConfig ic = impute_config(config);
    const ImputationResult result = classify_dataset(in.data, ic);

    CommandOutput out;
    out.report = report::Document("cbci classify");
    add_run_section(out.report, config, ic, in.data.schema, result.report);
    add_data_section(out.report, in.data, result.state);
    add_clustering_section(out.report, result.state.model);
    add_targets_table(out.report, result.report, names_of(in.data));
    add_warnings(out.report, result.report.warnings);
    out.exit_code = add_result_section(out.report, result.report);
    out.csv = csv_text(in.raw, result.imputed);
    return out;
}

namespace {

std::vector<std::size_t> eligible_columns(const Schema& schema, const std::vector<std::string>& names) {
    std::vector<std::size_t> cols;
    for (const auto& name : names) {
        const auto idx = schema.index_of(name);
        if (!idx) fail(ErrorKind::Validation, "unknown mask column '" + name + "'");
        cols.push_back(*idx);
    }
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    return cols;
}

void add_metrics(report::Document& doc, const std::string& method, const Metrics& m, std::size_t unfilled,
                 const Schema& schema) {
    auto& s = doc.section("metrics " + method);
    s.add("unfilled_cells", std::to_string(unfilled));
    s.add("numeric_count", std::to_string(m.numeric.count));
    s.add("numeric_rmse", fixed6(m.numeric.rmse));
    s.add("numeric_mae", fixed6(m.numeric.mae));
    s.add("categorical_count", std::to_string(m.categorical_count));
    s.add("categorical_correct", std::to_string(m.categorical_correct));
    s.add("categorical_accuracy", fixed6(m.categorical_accuracy));
    s.add("class_count", std::to_string(m.class_count));
    s.add("class_correct", std::to_string(m.class_correct));
    s.add("class_accuracy", fixed6(m.class_accuracy));
    auto& t = doc.table("per_column " + method, {"column", "count", "rmse", "mae"});
    for (const auto& [col, stats] : m.per_column) {
        t.rows.push_back({schema.attributes[col].name, std::to_string(stats.count), fixed6(stats.rmse), fixed6(stats.mae)});
    }
}

}  // namespace

CommandOutput cmd_evaluate(const EvaluateConfig& config) {
    if (!(config.fraction > 0.0 && config.fraction < 1.0)) {
        fail(ErrorKind::Validation, "mask fraction must lie strictly between 0 and 1");
    }
    if (config.methods.empty()) fail(ErrorKind::Validation, "no evaluation methods given");

    Dataset data;
    if (config.synthetic) {
        data = make_synthetic(config.synthetic_spec);
    } else {
        data = load(config.run).data;
    }

    MaskSpec spec;
    spec.fraction = config.fraction;
    spec.seed = config.seed;
    spec.eligible_columns = eligible_columns(data.schema, config.mask_columns);
    spec.max_per_record = config.max_per_record;
    spec.hide_labels = config.hide_labels;
    {
        std::vector<std::size_t> cols = spec.eligible_columns;
        if (cols.empty()) {
            for (std::size_t c = 0; c < data.schema.size(); ++c) cols.push_back(c);
        }
        for (const auto& r : data.records) {
            for (std::size_t c : cols) {
                if (!r.values[c]) {
                    fail(ErrorKind::Validation, "record " + r.display_name() + " is already missing " +
                                                    data.schema.attributes[c].name + "; evaluation needs complete input");
                }
            }
        }
    }
    const MaskResult mask = mask_dataset(data, spec);

    CommandOutput out;
    auto& doc = out.report;
    doc = report::Document("cbci evaluate");

    ImputeConfig ic = impute_config(config.run);
    ic.predict_labels = config.hide_labels;

    std::vector<std::pair<std::string, Dataset>> runs;
    ImputationReport cbci_report;
    for (Method m : config.methods) {
        switch (m) {
            case Method::Cbci: {
                auto result = impute_dataset(mask.masked, ic);
                cbci_report = result.report;
                runs.emplace_back(to_string(m), std::move(result.imputed));
                break;
            }
            case Method::GlobalMeanMode:
                runs.emplace_back(to_string(m), run_baseline(mask.masked, baseline::GlobalMeanMode{}, config.hide_labels));
                break;
            case Method::RawKnn:
                runs.emplace_back(describe(BaselineKind{baseline::RawKnn{config.knn_k}}),
                                  run_baseline(mask.masked, baseline::RawKnn{config.knn_k}, config.hide_labels));
                break;
        }
    }

    auto& s = doc.section("config");
    if (config.synthetic) {
        const auto& sp = config.synthetic_spec;
        s.add("source", "synthetic");
        s.add("synthetic_rows", std::to_string(sp.rows));
        s.add("synthetic_numeric", std::to_string(sp.numeric_columns));
        s.add("synthetic_categorical", std::to_string(sp.categorical_columns));
        s.add("synthetic_classes", std::to_string(sp.classes));
        s.add("synthetic_levels", std::to_string(sp.levels));
        s.add("synthetic_noise", fixed6(sp.noise));
        s.add("synthetic_seed", std::to_string(sp.seed));
    } else {
        s.add("source", "file");
        s.add("input", config.run.input);
        s.add("schema", config.run.schema);
        s.add("missing_tokens", quoted_list(data.schema.missing_tokens));
    }
    s.add("fraction", fixed6(config.fraction));
    s.add("seed", std::to_string(config.seed));
    s.add("rng", kRngAlgorithm);
    std::vector<std::string> mask_names;
    for (std::size_t c : spec.eligible_columns) mask_names.push_back(data.schema.attributes[c].name);
    s.add("mask_columns", mask_names.empty() ? "all" : join(mask_names, ", "));
    s.add("max_per_record", std::to_string(config.max_per_record.value_or(data.schema.size() - 1)));
    s.add("hide_labels", yes_no(config.hide_labels));
    std::vector<std::string> method_names;
    for (const auto& [name, _] : runs) method_names.push_back(name);
    s.add("methods", join(method_names, ", "));
    s.add("knn_k", std::to_string(config.knn_k));
    s.add("k", count_or(cbci_report.k, config.run.k));
    s.add("init", describe(ic.init));
    s.add("max_iter", std::to_string(config.run.max_iter));
    s.add("neighbor_count", count_or(cbci_report.neighbor_count, config.run.neighbor_count));
    s.add("fill", describe(ic.fill));
    s.add("class_top_k", std::to_string(config.run.class_top_k));
    s.add("scale", yes_no(config.run.scale));

    auto& ms = doc.section("mask");
    ms.add("records", std::to_string(data.size()));
    ms.add("requested", std::to_string(mask.requested));
    ms.add("masked", std::to_string(mask.truth.size()));
    ms.add("shortfall", std::to_string(mask.shortfall));
    ms.add("hidden_labels", std::to_string(mask.hidden_labels.size()));

    bool partial = false;
    for (const auto& [name, imputed] : runs) {
        std::unordered_map<RecordId, const Record*> by_id;
        for (const auto& r : imputed.records) by_id.emplace(r.id, &r);
        std::vector<MaskedCell> filled;
        for (const auto& cell : mask.truth) {
            if (by_id.at(cell.record_id)->values[cell.column]) filled.push_back(cell);
        }
        const std::size_t unfilled = mask.truth.size() - filled.size();
        partial = partial || unfilled > 0;
        const Metrics m = score_imputation(imputed, filled, config.hide_labels ? &mask.hidden_labels : nullptr);
        add_metrics(doc, name, m, unfilled, data.schema);
    }
    add_warnings(doc, cbci_report.warnings);

    if (config.list_masked) {
        auto& t = doc.table("masked_cells", {"record", "column", "value"});
        for (const auto& cell : mask.truth) {
            t.rows.push_back({std::to_string(cell.record_id), data.schema.attributes[cell.column].name,
                              format_number(cell.value)});
        }
    }
    out.exit_code = partial ? kExitPartial : kExitOk;
    return out;
}

}  // namespace cbci::cli
