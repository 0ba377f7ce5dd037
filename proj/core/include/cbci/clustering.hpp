#pragma once

#include <cstddef>
#include <istream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cbci/data_model.hpp"

namespace cbci {

using Vector = std::vector<double>;

namespace init {
/// Caller-supplied initial means, one per cluster.
struct Fixed {
    std::vector<Vector> means;
};
/// Initial means are the centroids of each labelled class, classes taken in
/// lexicographic order.
struct ClassSeeded {};
/// Seeds start at `start_id` and greedily add the record that maximises the
/// minimum distance to the seeds chosen so far. start_id 0 means the lowest
/// record id in the group.
struct FarthestFirst {
    RecordId start_id = 0;
};
}  // namespace init

using InitStrategy = std::variant<init::Fixed, init::ClassSeeded, init::FarthestFirst>;

std::string describe(const InitStrategy& strategy);

struct ClusterModel {
    std::size_t k = 0;
    std::vector<Vector> means;
    /// Cluster index (0-based) of each group record, in group order.
    std::vector<std::size_t> assignment;
    /// Record ids per cluster, ascending.
    std::vector<std::vector<RecordId>> members;
    std::size_t iterations = 0;
    bool converged = false;
    std::size_t empty_repairs = 0;
    /// Within-cluster sum of squares after every assignment and every mean
    /// update, in execution order.
    std::vector<double> wcss_history;

    /// 0-based cluster of a record id; throws if the id is not clustered.
    std::size_t cluster_of(RecordId id) const;
};

/// Number of distinct labels among the labelled records of `group`.
std::size_t infer_k(std::span<const Record> group);

/// Deterministic Lloyd iterations over complete records.
ClusterModel kmeans(std::span<const Record> group, std::size_t k,
                    const InitStrategy& init, std::size_t max_iter = 100);

/// Per-attribute means of each cluster, summed in ascending member id order.
std::vector<Vector> cluster_means(const ClusterModel& model, std::span<const Record> group);

double wcss(std::span<const Record> group, std::span<const std::size_t> assignment,
            std::span<const Vector> means);

/// Reads FIXED initial means: one comma-separated vector per line, blank
/// lines and `#` comments ignored.
std::vector<Vector> parse_means(std::istream& in);
std::vector<Vector> read_means_file(const std::string& path);

}  // namespace cbci
