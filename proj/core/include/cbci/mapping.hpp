#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cbci/clustering.hpp"
#include "cbci/data_model.hpp"

namespace cbci {

struct Neighbor {
    RecordId id = 0;
    double distance = 0.0;
};

/// A record reduced to one scalar: the sum of its distances to every cluster
/// mean plus the distances to its nearest neighbours.
struct MappingEntry {
    RecordId record_id = 0;
    /// Distance to each cluster mean, ascending cluster index.
    std::vector<double> cluster_distances;
    double cluster_sum = 0.0;
    /// Nearest first.
    std::vector<Neighbor> neighbors;
    double total = 0.0;
};

struct MappingConfig {
    std::size_t neighbor_count = 1;
};

/// Euclidean distance between two complete vectors of equal length.
double distance_full(std::span<const double> a, std::span<const double> b);

/// Euclidean distance over the positions present in `a`; missing positions
/// are skipped in both operands, with no rescaling.
double distance_masked(std::span<const Cell> a, std::span<const double> b);

double type1_sum(std::span<const double> record, std::span<const Vector> means);
double type2_sum(std::span<const Cell> record, std::span<const Vector> means);

/// The `count` nearest other members of the record's own cluster. Appends a
/// message to `warnings` when fewer than `count` are available.
std::vector<Neighbor> intra_cluster_neighbors(const Record& record, const ClusterModel& model,
                                              std::span<const Record> group, std::size_t count,
                                              std::vector<std::string>* warnings = nullptr);

/// The `count` nearest complete records by masked distance.
std::vector<Neighbor> cross_group_neighbors(const Record& record, std::span<const Record> group,
                                            std::size_t count,
                                            std::vector<std::string>* warnings = nullptr);

MappingEntry map_complete(const Record& record, const ClusterModel& model,
                          std::span<const Record> group, const MappingConfig& config,
                          std::vector<std::string>* warnings = nullptr);

MappingEntry map_missing(const Record& record, const ClusterModel& model,
                         std::span<const Record> group, const MappingConfig& config,
                         std::vector<std::string>* warnings = nullptr);

/// All-pairs distances between `ids` (a cluster's members), row-major.
std::vector<double> pairwise_distances(std::span<const RecordId> ids, std::span<const Record> group);

}  // namespace cbci
