// Acceptance suite: one PASS/FAIL line per criterion, with the failing
// comparisons listed underneath. Exit status is non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "cbci/evaluation.hpp"
#include "cbci/imputation.hpp"
#include "cbci/mapping.hpp"
#include "cbci_cli/commands.hpp"
#include "support/fixtures.hpp"

using namespace cbci;
namespace fs = std::filesystem;

namespace {

class Check {
public:
    void expect(bool ok, const std::string& what) {
        ++count_;
        if (!ok) failures_.push_back(what);
    }
    void near(double got, double want, double tol, const std::string& what) {
        std::ostringstream s;
        s << std::setprecision(9) << what << ": got " << got << ", expected " << want << " (|diff| "
          << std::abs(got - want) << " > " << tol << ")";
        expect(std::abs(got - want) <= tol, s.str());
    }
    void note(std::string text) { notes_.push_back(std::move(text)); }

    std::size_t count() const { return count_; }
    const std::vector<std::string>& failures() const { return failures_; }
    const std::vector<std::string>& notes() const { return notes_; }

private:
    std::size_t count_ = 0;
    std::vector<std::string> failures_;
    std::vector<std::string> notes_;
};

std::string name_list(const Dataset& ds, const std::vector<RecordId>& ids) {
    std::string out;
    for (RecordId id : ids) out += (out.empty() ? "" : ",") + fixtures::by_id(ds, id).display_name();
    return out;
}

std::vector<RecordId> ids_of(const std::vector<Record>& records) {
    std::vector<RecordId> ids;
    for (const auto& r : records) ids.push_back(r.id);
    return ids;
}

ImputeConfig fixed_config() {
    ImputeConfig c;
    c.init = fixtures::case_study_means();
    return c;
}

RecordId id_of(const Dataset& ds, const std::string& name) {
    for (const auto& r : ds.records) {
        if (r.display_name() == name) return r.id;
    }
    throw std::out_of_range(name);
}

const MappingEntry& entry(const std::vector<MappingEntry>& entries, RecordId id) {
    for (const auto& e : entries) {
        if (e.record_id == id) return e;
    }
    throw std::out_of_range("no mapping for " + std::to_string(id));
}

// ---------------------------------------------------------------------------

void criterion_1(Check& c) {
    const auto ds = fixtures::case_study();
    const auto split = split_groups(ds);
    c.expect(name_list(ds, ids_of(split.complete)) == "MR1,MR2,MR4,MR6,MR7,MR8,MR9",
             "G1 = " + name_list(ds, ids_of(split.complete)));
    c.expect(name_list(ds, ids_of(split.incomplete)) == "MR3,MR5", "G2 = " + name_list(ds, ids_of(split.incomplete)));

    // encoded rows of the complete-records table
    const std::map<std::string, std::vector<double>> table4{
        {"MR1", {1, 5, 1, 10}}, {"MR2", {3, 7, 1, 5}}, {"MR4", {2, 5, 1, 10}}, {"MR6", {2, 9, 1, 10}},
        {"MR7", {1, 5, 2, 3}},  {"MR8", {3, 6, 2, 7}}, {"MR9", {2, 6, 2, 10}}};
    for (const auto& r : split.complete) {
        c.expect(r.complete_values() == table4.at(r.display_name()), r.display_name() + " encoded row differs");
    }
}

void criterion_2(Check& c) {
    const auto ds = fixtures::case_study();
    const auto g1 = split_groups(ds).complete;
    const auto model = kmeans(g1, 2, fixtures::case_study_means());

    std::set<std::string> got;
    for (const auto& members : model.members) got.insert(name_list(ds, members));
    c.expect(got == std::set<std::string>{"MR1,MR4,MR6,MR9", "MR2,MR7,MR8"}, "cluster membership");

    // Printed means, matched to the computed cluster with the same members.
    // The printed table labels them the other way round from the membership
    // table; both rows are checked regardless of the label.
    const std::map<std::string, std::vector<double>> printed{{"MR2,MR7,MR8", {2.33, 6, 1.67, 5}},
                                                             {"MR1,MR4,MR6,MR9", {1.75, 6.25, 1.25, 10}}};
    for (std::size_t k = 0; k < model.k; ++k) {
        const auto key = name_list(ds, model.members[k]);
        if (!printed.count(key)) continue;
        for (std::size_t a = 0; a < 4; ++a) {
            c.near(model.means[k][a], printed.at(key)[a], 5e-3, "mean of {" + key + "} attribute " + std::to_string(a + 1));
        }
    }

    // Lloyd fixed point: every record is nearest its own mean, and each mean
    // is the centroid of its members.
    for (std::size_t i = 0; i < g1.size(); ++i) {
        const auto v = g1[i].complete_values();
        const std::size_t own = model.assignment[i];
        for (std::size_t k = 0; k < model.k; ++k) {
            c.expect(distance_full(v, model.means[own]) <= distance_full(v, model.means[k]),
                     g1[i].display_name() + " is closer to another mean");
        }
    }
    const auto centroids = cluster_means(model, g1);
    for (std::size_t k = 0; k < model.k; ++k) {
        for (std::size_t a = 0; a < 4; ++a) c.near(model.means[k][a], centroids[k][a], 1e-12, "centroid");
    }
    c.expect(model.converged, "kmeans did not converge");
}

void criterion_3(Check& c) {
    const auto ds = fixtures::case_study();
    const auto result = impute_dataset(ds, fixed_config());
    const auto& st = result.state;
    // The distance tables' "first cluster" is the cluster with mean
    // (2.33, 6, 1.67, 5), which is cluster 2 in means-file order.
    const std::size_t first = st.model.cluster_of(id_of(ds, "MR2"));
    const std::size_t second = st.model.cluster_of(id_of(ds, "MR1"));

    const std::map<std::string, std::pair<double, double>> t8_9{
        {"MR1", {5.312459, 1.47902}},  {"MR2", {1.374369, 5.214163}}, {"MR4", {5.153208, 1.299038}},
        {"MR6", {5.878397, 2.772634}}, {"MR7", {2.624669, 7.189402}}, {"MR8", {2.134375, 3.344772}},
        {"MR9", {5.022173, 0.829156}}};
    const std::map<std::string, double> t10{{"MR1", 6.791479}, {"MR2", 6.588532}, {"MR4", 6.452246},
                                            {"MR6", 8.651031}, {"MR7", 9.814071}, {"MR8", 5.479147},
                                            {"MR9", 5.851329}};
    for (const auto& [name, d] : t8_9) {
        const auto& e = entry(st.complete_mappings, id_of(ds, name));
        c.near(e.cluster_distances[first], d.first, 1e-5, "distance to first cluster " + name);
        c.near(e.cluster_distances[second], d.second, 1e-5, "distance to second cluster " + name);
        c.near(e.cluster_sum, t10.at(name), 1e-5, "type-1 sum " + name);
    }
    const std::map<std::string, std::pair<double, double>> t11{{"MR3", {2.603417, 3.181981}},
                                                               {"MR5", {3.091206, 3.561952}}};
    for (const auto& [name, d] : t11) {
        const auto& e = entry(st.incomplete_mappings, id_of(ds, name));
        c.near(e.cluster_distances[first], d.first, 1e-5, "G2 distance to first cluster " + name);
        c.near(e.cluster_distances[second], d.second, 1e-5, "G2 distance to second cluster " + name);
    }

    // pairwise distances within the cluster {MR1, MR4, MR6, MR9}, as printed
    const std::vector<std::string> names{"MR1", "MR4", "MR6", "MR9"};
    const std::vector<std::vector<double>> t13{{0, 1, 4.123106, 1.732051},
                                               {1, 0, 4, 1.414214},
                                               {4.1231, 4, 0, 3.162278},
                                               {1.732, 1.414, 3.16, 0}};
    const auto& members = st.model.members[second];
    const auto pw = pairwise_distances(members, st.split.complete);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            const auto a = std::find(members.begin(), members.end(), id_of(ds, names[i])) - members.begin();
            const auto b = std::find(members.begin(), members.end(), id_of(ds, names[j])) - members.begin();
            c.near(pw[static_cast<std::size_t>(a) * members.size() + static_cast<std::size_t>(b)], t13[i][j], 1e-3,
                   "pairwise " + names[i] + "-" + names[j]);
        }
    }

    const std::map<std::string, double> t15{{"MR1", 9.52353},  {"MR2", 12.64357}, {"MR4", 8.86646},
                                            {"MR6", 15.81331}, {"MR7", 18.0022},  {"MR8", 12.51121},
                                            {"MR9", 8.997329}};
    for (const auto& [name, total] : t15) {
        c.near(entry(st.complete_mappings, id_of(ds, name)).total, total, 1e-4, "final mapping " + name);
    }
    c.note("the reference values for MR9-MR6 and MR9's final mapping were rounded before use; the exact "
           "values are sqrt(10) = 3.162278 and 8.997594");
}

void criterion_4(Check& c) {
    const auto ds = fixtures::case_study();
    const auto result = impute_dataset(ds, fixed_config());
    auto o_in = fixtures::to_oracle(ds);
    o_in.fixed_means = fixtures::case_study_means().means;
    const auto oracle_out = oracle::run(o_in);

    const std::map<std::string, std::pair<double, double>> sums{{"MR3", {5.785398, 6.791479}},
                                                                {"MR5", {6.653158, 6.588532}}};
    const std::map<std::string, std::pair<double, double>> t11{{"MR3", {2.603417, 3.181981}},
                                                               {"MR5", {3.091206, 3.561952}}};
    for (const auto& [name, s] : sums) {
        const RecordId id = id_of(ds, name);
        const double got = entry(result.state.incomplete_mappings, id).cluster_sum;
        c.near(got, oracle_out.type_sum.at(id), 1e-9, "type-2 " + name + " vs oracle");
        c.near(got, s.first, 1e-6, "type-2 " + name + " vs derived value");
        c.near(got, t11.at(name).first + t11.at(name).second, 2e-6, "type-2 " + name + " vs sum of its printed cluster distances");
        c.expect(std::abs(got - s.second) > 1e-3, "type-2 " + name + " should differ from the printed type-2 value");
        std::ostringstream note;
        note << std::fixed << std::setprecision(6) << name << " type-2 = " << got << " (printed: " << s.second
             << ")";
        c.note(note.str());
    }
}

void criterion_5(Check& c) {
    const auto ds = fixtures::case_study();
    const RecordId mr5 = id_of(ds, "MR5");
    const RecordId mr8 = id_of(ds, "MR8");

    // formula-faithful pipeline
    const auto result = impute_dataset(ds, fixed_config());
    const auto& t = *std::find_if(result.report.targets.begin(), result.report.targets.end(),
                                  [&](const TargetReport& r) { return r.target_id == mr5; });
    c.expect(t.match->chosen().donor_id == mr8, "pipeline donor for MR5");
    c.expect(*fixtures::by_id(result.imputed, mr5).values[3] == 7.0, "pipeline MR5 Z4");
    c.expect(t.predicted_class == std::optional<std::string>("C-2"), "pipeline MR5 class");

    // the printed mapping values
    std::vector<MappingEntry> printed;
    for (const auto& [name, total] : std::vector<std::pair<std::string, double>>{
             {"MR1", 9.52353}, {"MR2", 12.64357}, {"MR4", 8.86646}, {"MR6", 15.81331},
             {"MR7", 18.0022}, {"MR8", 12.51121}, {"MR9", 8.997329}}) {
        MappingEntry e;
        e.record_id = id_of(ds, name);
        e.total = total;
        printed.push_back(e);
    }
    MappingEntry target;
    target.record_id = mr5;
    target.total = 11.86645;
    const auto match = match_nearest(target, printed);
    const auto g1 = split_groups(ds).complete;
    c.expect(match.chosen().donor_id == mr8, "printed-values donor for MR5");
    const auto filled = fill_record(fixtures::by_id(ds, mr5), match, g1, ds.schema, fill::CopyDonor{});
    c.expect(*filled.values[3] == 7.0, "printed-values MR5 Z4");
    c.expect(predict_class(match, g1, 1) == "C-2", "printed-values MR5 class");
}

void criterion_6(Check& c) {
    const auto ds = fixtures::case_study();
    const RecordId mr3 = id_of(ds, "MR3");
    const auto result = impute_dataset(ds, fixed_config());
    const auto& t = *std::find_if(result.report.targets.begin(), result.report.targets.end(),
                                  [&](const TargetReport& r) { return r.target_id == mr3; });
    const auto& donor = t.match->chosen();
    c.expect(fixtures::by_id(ds, donor.donor_id).display_name() == "MR1", "MR3 donor");
    c.near(donor.difference, 1.326363, 1e-6, "MR3 donor difference");
    const double z3 = *fixtures::by_id(result.imputed, mr3).values[2];
    c.expect(z3 == 1.0, "MR3 Z3 encoded");
    c.expect(decode_value(ds.schema.attributes[2], z3) == "J31", "MR3 Z3 decoded");
    c.expect(t.predicted_class == std::optional<std::string>("C-1"), "MR3 class");

    auto o_in = fixtures::to_oracle(ds);
    o_in.fixed_means = fixtures::case_study_means().means;
    const auto o = oracle::run(o_in);
    c.expect(o.donor.at(mr3) == donor.donor_id, "oracle donor");
    c.near(donor.difference, o.donor_difference.at(mr3), 1e-12, "oracle difference");
    c.expect(o.imputed.at(mr3) == fixtures::by_id(result.imputed, mr3).complete_values(), "oracle imputed row");
    c.expect(o.predicted.at(mr3) == "C-1", "oracle class");
    c.note("differs from the printed MR3 imputation (donor MR8, Z3 = 2, class C-2), which followed the "
           "misprinted type-2 sums");
}

// ---------------------------------------------------------------------------

Dataset random_numeric(std::mt19937_64& rng, std::size_t m, std::size_t n, std::size_t classes) {
    Dataset ds;
    for (std::size_t a = 0; a < n; ++a) ds.schema.attributes.push_back({"a" + std::to_string(a)});
    ds.schema.class_attribute = "class";
    for (std::size_t i = 0; i < m; ++i) {
        Record r;
        r.id = i + 1;
        r.name = "R" + std::to_string(i + 1);
        for (std::size_t a = 0; a < n; ++a) r.values.emplace_back(10.0 * uniform_unit(rng));
        r.label = "c" + std::to_string(i % classes);
        ds.records.push_back(r);
    }
    // the first classes + 1 rows stay complete; others lose some cells but
    // keep at least one
    for (std::size_t i = classes + 1; i < m && n > 1; ++i) {
        if (uniform_index(rng, 2) == 0) continue;
        const std::size_t holes = 1 + uniform_index(rng, n - 1);
        for (std::size_t h = 0; h < holes; ++h) ds.records[i].values[uniform_index(rng, n)].reset();
        if (ds.records[i].missing_count() == n) ds.records[i].values[0] = 10.0 * uniform_unit(rng);
    }
    return ds;
}

Dataset renumbered(Dataset ds) {
    for (std::size_t i = 0; i < ds.records.size(); ++i) ds.records[i].id = i + 1;
    return ds;
}

void criterion_7(Check& c) {
    std::mt19937_64 rng(20240607);
    std::size_t cases = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t m = 5 + uniform_index(rng, 8);   // 5..12
        const std::size_t n = 1 + uniform_index(rng, 6);   // 1..6
        const std::size_t classes = 1 + uniform_index(rng, 3);
        const auto ds = random_numeric(rng, m, n, classes);
        const std::string tag = "trial " + std::to_string(trial);
        const auto result = impute_dataset(ds, ImputeConfig{});

        // (a) completeness, present cells untouched
        for (std::size_t i = 0; i < m; ++i) {
            const auto& in = ds.records[i];
            const auto& out = result.imputed.records[i];
            c.expect(out.is_complete(), tag + " (a) missing cell left");
            for (std::size_t a = 0; a < n; ++a) {
                if (in.values[a]) c.expect(*out.values[a] == *in.values[a], tag + " (a) present cell altered");
            }
        }

        // (b) type2 = type1 on complete records
        for (const auto& r : result.state.split.complete) {
            const auto& means = result.state.model.means;
            c.expect(type2_sum(r.values, means) == type1_sum(r.complete_values(), means), tag + " (b)");
        }

        // (c) uniform positive scaling keeps every donor
        const double factor = 0.5 + 9.5 * uniform_unit(rng);
        Dataset scaled = ds;
        for (auto& r : scaled.records) {
            for (auto& v : r.values) {
                if (v) *v *= factor;
            }
        }
        const auto scaled_result = impute_dataset(scaled, ImputeConfig{});
        for (std::size_t t = 0; t < result.report.targets.size(); ++t) {
            c.expect(scaled_result.report.targets[t].match->chosen().donor_id ==
                         result.report.targets[t].match->chosen().donor_id,
                     tag + " (c) donor changed under scaling");
        }

        // (d) permuting record order changes no imputed value. Ids follow
        // input order, so the permuted file is renumbered and matched back by
        // name; class-seeded init keeps the clustering order-free.
        ImputeConfig seeded;
        seeded.init = init::ClassSeeded{};
        const auto base = impute_dataset(ds, seeded);
        Dataset perm = ds;
        for (std::size_t i = perm.records.size(); i > 1; --i) {
            std::swap(perm.records[i - 1], perm.records[uniform_index(rng, i)]);
        }
        perm = renumbered(perm);
        const auto permuted = impute_dataset(perm, seeded);
        for (const auto& r : base.imputed.records) {
            const auto it = std::find_if(permuted.imputed.records.begin(), permuted.imputed.records.end(),
                                         [&](const Record& p) { return p.name == r.name; });
            c.expect(it->values == r.values, tag + " (d) imputed values depend on record order");
        }

        // (e) WCSS never increases
        const auto& h = result.state.model.wcss_history;
        for (std::size_t i = 1; i < h.size(); ++i) {
            c.expect(h[i] <= h[i - 1] * (1 + 1e-12) + 1e-12, tag + " (e) WCSS increased");
        }

        // (f) oracle equivalence of every mapping total
        const auto o = oracle::run(fixtures::to_oracle(ds));
        if (result.report.targets.empty()) continue;
        ++cases;
        for (const auto& e : result.state.complete_mappings) {
            c.near(e.total, o.mapping.at(e.record_id), 1e-9, tag + " (f) G1 mapping " + std::to_string(e.record_id));
        }
        for (const auto& t : result.report.targets) {
            c.near(t.mapping->total, o.mapping.at(t.target_id), 1e-9, tag + " (f) G2 mapping");
            c.expect(t.match->chosen().donor_id == o.donor.at(t.target_id), tag + " (f) donor");
        }
    }
    c.note(std::to_string(cases) + " of 50 random datasets had records to impute");
}

// ---------------------------------------------------------------------------

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("cbci_acceptance_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int shell(const std::string& args) {
    const std::string cmd = std::string(CBCI_TOOL_PATH) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const std::string& s) { return "'" + s + "'"; }

void criterion_8(Check& c) {
    TempDir dir;
    const std::string in = q(fixtures::data_path("case_study.csv"));
    const std::string schema = q(fixtures::data_path("case_study.schema"));
    const std::string means = q(fixtures::data_path("case_study_means.txt"));

    std::string blank = fixtures::slurp(fixtures::data_path("case_study.csv"));
    blank.replace(blank.find("MR3,K11,7,?,7,C-1"), 17, "MR3,K11,7,?,7,");
    std::ofstream(dir.file("blank.csv"), std::ios::binary) << blank;

    const std::string common = "-s " + schema + " --init fixed --means " + means;
    const std::vector<std::pair<std::string, std::string>> runs{
        {"impute", "impute -i " + in + " " + common},
        {"trace", "trace -i " + in + " " + common},
        {"classify", "classify -i " + q(dir.file("blank.csv")) + " " + common},
        {"evaluate", "evaluate --synthetic --rows 300 --seed 11 --fraction 0.15"},
    };
    for (const auto& [name, args] : runs) {
        std::vector<std::string> reports, csvs;
        for (int rep = 0; rep < 2; ++rep) {
            const std::string r = dir.file(name + std::to_string(rep) + ".txt");
            const std::string o = dir.file(name + std::to_string(rep) + ".csv");
            std::string full = args + " -r " + q(r);
            if (name != "evaluate") full += " -o " + q(o);
            c.expect(shell(full) == 0, name + " exited non-zero");
            reports.push_back(fixtures::slurp(r));
            csvs.push_back(name != "evaluate" ? fixtures::slurp(o) : "");
        }
        c.expect(!reports[0].empty(), name + " wrote an empty report");
        c.expect(reports[0] == reports[1], name + " reports differ between runs");
        c.expect(csvs[0] == csvs[1], name + " CSVs differ between runs");
    }
}

void criterion_9(Check& c) {
    SyntheticSpec spec;
    spec.rows = 300;
    spec.seed = 42;
    const auto data = make_synthetic(spec);
    MaskSpec ms;
    ms.fraction = 0.1;
    ms.seed = 42;

    auto score_once = [&] {
        const auto mask = mask_dataset(data, ms);
        ImputeConfig ic;
        ic.predict_labels = true;
        const auto result = impute_dataset(mask.masked, ic);
        return score_imputation(result.imputed, mask.truth, &mask.hidden_labels);
    };
    const auto a = score_once();
    const auto b = score_once();
    c.expect(a.numeric.count == b.numeric.count && a.numeric.rmse == b.numeric.rmse && a.numeric.mae == b.numeric.mae &&
                 a.categorical_correct == b.categorical_correct && a.class_correct == b.class_correct,
             "repeated runs give different metrics");
    c.expect(a.numeric.count > 0 && a.categorical_count > 0, "mask hid no cells");

    // scoring the unmasked data against the hidden cells is exact
    const auto mask = mask_dataset(data, ms);
    const auto perfect = score_imputation(data, mask.truth);
    c.expect(perfect.numeric.rmse == 0.0 && perfect.numeric.mae == 0.0, "perfect imputation has numeric error");
    c.expect(perfect.categorical_accuracy == 1.0, "perfect imputation has categorical error");

    // global mean on Z2 over the complete records is 43/7
    auto ds = fixtures::case_study();
    const RecordId mr3 = id_of(ds, "MR3");
    for (auto& r : ds.records) {
        if (r.id == mr3) r.values[1].reset();
    }
    const auto filled = run_baseline(ds, baseline::GlobalMeanMode{});
    c.near(*fixtures::by_id(filled, mr3).values[1], 43.0 / 7.0, 1e-12, "GLOBAL_MEAN_MODE Z2");
    c.near(*fixtures::by_id(filled, id_of(ds, "MR5")).values[3], 55.0 / 7.0, 1e-12, "GLOBAL_MEAN_MODE Z4");
    c.expect(*fixtures::by_id(filled, mr3).values[2] == 1.0, "GLOBAL_MEAN_MODE Z3 mode");
}

// ---------------------------------------------------------------------------

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void performance_case_study(Check& c) {
    const auto start = std::chrono::steady_clock::now();
    cli::RunConfig rc;
    rc.input = fixtures::data_path("case_study.csv");
    rc.schema = fixtures::data_path("case_study.schema");
    rc.init = cli::InitKind::Fixed;
    rc.means_file = fixtures::data_path("case_study_means.txt");
    const auto out = cli::cmd_trace(rc);
    const double s = seconds_since(start);
    c.expect(out.exit_code == 0, "trace failed");
    c.expect(s < 1.0, "case study took " + std::to_string(s) + " s");
    c.note("case study trace: " + std::to_string(s) + " s");
}

void performance_evaluation(Check& c) {
    const auto start = std::chrono::steady_clock::now();
    cli::EvaluateConfig e;
    e.synthetic = true;
    e.synthetic_spec.rows = 10000;
    e.synthetic_spec.numeric_columns = 16;
    e.synthetic_spec.categorical_columns = 4;
    e.synthetic_spec.seed = 5;
    e.seed = 5;
    e.fraction = 0.1;
    const auto out = cli::cmd_evaluate(e);
    const double s = seconds_since(start);
    c.expect(out.exit_code == 0, "evaluation failed");
    c.expect(s < 10.0, "evaluation took " + std::to_string(s) + " s");
    c.note("10000 x 20 evaluation, three methods: " + std::to_string(s) + " s");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
        {"criterion 1 golden split", criterion_1},
        {"criterion 2 golden clustering", criterion_2},
        {"criterion 3 golden distances", criterion_3},
        {"criterion 4 type-2 inconsistency", criterion_4},
        {"criterion 5 end-to-end MR5", criterion_5},
        {"criterion 6 end-to-end MR3 (formula-faithful)", criterion_6},
        {"criterion 7 property suite", criterion_7},
        {"criterion 8 determinism", criterion_8},
        {"criterion 9 evaluation harness", criterion_9},
        {"performance: case study < 1 s", performance_case_study},
        {"performance: 10000 x 20 evaluation < 10 s", performance_evaluation},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Check c;
        try {
            fn(c);
        } catch (const std::exception& e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        const bool ok = c.failures().empty();
        failed += ok ? 0 : 1;
        std::cout << (ok ? "PASS" : "FAIL") << "  " << name << "  (" << c.count() - c.failures().size()
                  << "/" << c.count() << " checks)\n";
        for (const auto& f : c.failures()) std::cout << "        fail: " << f << '\n';
        for (const auto& n : c.notes()) std::cout << "        note: " << n << '\n';
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << '\n';
    return failed ? 1 : 0;
}
