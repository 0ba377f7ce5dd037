#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cbci/clustering.hpp"
#include "cbci/data_model.hpp"
#include "cbci/mapping.hpp"

namespace cbci {

struct RankedDonor {
    RecordId donor_id = 0;
    double difference = 0.0;
};

/// Every complete record ranked by |Map(donor) - Map(target)|, ascending,
/// ties by lowest donor id.
struct DonorMatch {
    RecordId target_id = 0;
    std::vector<RankedDonor> ranked_donors;

    const RankedDonor& chosen() const { return ranked_donors.front(); }
};

namespace fill {
struct CopyDonor {};
/// Numeric cells: mean of the top-k donors. Categorical cells: modal value,
/// ties to the value of the best-ranked donor among the tied values.
struct TopK {
    std::size_t k = 1;
};
/// Numeric cells: mean over complete records of the chosen donor's class.
/// Categorical cells: that class's mode, ties to the lowest level index.
struct ClassMean {};
}  // namespace fill

using FillStrategy = std::variant<fill::CopyDonor, fill::TopK, fill::ClassMean>;

std::string describe(const FillStrategy& strategy);

DonorMatch match_nearest(const MappingEntry& target, std::span<const MappingEntry> donors);

/// Fills every missing cell of `target`; present cells are left untouched.
Record fill_record(const Record& target, const DonorMatch& match, std::span<const Record> group,
                   const Schema& schema, const FillStrategy& strategy);

/// Modal label among the top_k best-ranked labelled donors. Ties go to the
/// tied class whose best-ranked donor has the lowest id.
std::string predict_class(const DonorMatch& match, std::span<const Record> group, std::size_t top_k);

struct ImputeConfig {
    std::optional<std::size_t> k;               // AUTO when empty
    InitStrategy init = init::FarthestFirst{};
    std::size_t max_iter = 100;
    std::optional<std::size_t> neighbor_count;  // AUTO (= k) when empty
    FillStrategy fill = fill::CopyDonor{};
    /// Donors consulted for class prediction.
    std::size_t class_top_k = 1;
    /// Assign predicted labels to records whose label is absent.
    bool predict_labels = false;
    bool scale = false;
};

struct FilledCell {
    std::size_t column = 0;
    double encoded = 0.0;  // in the units of the output dataset
    std::string decoded;
};

struct TargetReport {
    RecordId target_id = 0;
    std::string name;
    std::optional<MappingEntry> mapping;
    std::optional<DonorMatch> match;
    std::vector<FilledCell> filled;
    std::optional<std::string> predicted_class;
    bool label_assigned = false;
    /// Set when the record could not be processed; the rest still runs.
    std::optional<std::string> error;
};

struct ImputationReport {
    std::size_t k = 0;
    std::size_t neighbor_count = 0;
    std::vector<TargetReport> targets;  // ascending target id
    std::vector<std::string> warnings;

    std::size_t failures() const;
};

/// Intermediate state of one run, kept for traces.
struct PipelineState {
    GroupSplit split;
    ClusterModel model;
    std::vector<MappingEntry> complete_mappings;    // G1 order
    std::vector<MappingEntry> incomplete_mappings;  // G2 order, processed records only
};

struct ImputationResult {
    Dataset imputed;  // in input (unscaled) units
    ImputationReport report;
    PipelineState state;  // in working (possibly scaled) units
};

/// Split, cluster, map, match and fill. Each incomplete record is handled
/// against the original complete group; all-missing records are reported
/// and left as they are.
ImputationResult impute_dataset(const Dataset& dataset, const ImputeConfig& config);

/// Predicts labels for records whose label is absent. Complete unlabelled
/// records are matched against the other complete records; incomplete
/// ones go through the usual mapping. Cells are not modified.
ImputationResult classify_dataset(const Dataset& dataset, const ImputeConfig& config);

}  // namespace cbci
