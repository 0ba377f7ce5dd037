#include "cbci/mapping.hpp"

#include <algorithm>
#include <cmath>

#include "cbci/error.hpp"

namespace cbci {
namespace {

void check_lengths(std::size_t a, std::size_t b) {
    if (a != b) {
        fail(ErrorKind::Validation, "distance between sequences of length " + std::to_string(a) + " and " +
                                        std::to_string(b));
    }
}

/// Masked distance where `b` comes from a complete record.
double masked_to_record(std::span<const Cell> a, std::span<const Cell> b) {
    check_lengths(a.size(), b.size());
    double sum = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        const double d = *a[i] - *b[i];
        sum += d * d;
        any = true;
    }
    if (!any) fail(ErrorKind::Validation, "masked distance: every position is missing");
    return std::sqrt(sum);
}

double full_between_records(std::span<const Cell> a, std::span<const Cell> b) {
    check_lengths(a.size(), b.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = *a[i] - *b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

const Record& find_record(std::span<const Record> group, RecordId id) {
    auto it = std::lower_bound(group.begin(), group.end(), id,
                               [](const Record& r, RecordId v) { return r.id < v; });
    if (it != group.end() && it->id == id) return *it;
    // Not sorted by id: fall back to a scan.
    auto scan = std::find_if(group.begin(), group.end(), [&](const Record& r) { return r.id == id; });
    if (scan == group.end()) fail(ErrorKind::Validation, "record " + std::to_string(id) + " not in group");
    return *scan;
}

bool nearer(const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
}

std::vector<Neighbor> take_nearest(std::vector<Neighbor> all, std::size_t count) {
    const std::size_t keep = std::min(count, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), nearer);
    all.resize(keep);
    return all;
}

void require_complete(const Record& record) {
    if (!record.is_complete()) {
        fail(ErrorKind::Validation, "record " + record.display_name() + " is not complete");
    }
}

}  // namespace

double distance_full(std::span<const double> a, std::span<const double> b) {
    check_lengths(a.size(), b.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

double distance_masked(std::span<const Cell> a, std::span<const double> b) {
    check_lengths(a.size(), b.size());
    double sum = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        const double d = *a[i] - b[i];
        sum += d * d;
        any = true;
    }
    if (!any) fail(ErrorKind::Validation, "masked distance: every position is missing");
    return std::sqrt(sum);
}

double type1_sum(std::span<const double> record, std::span<const Vector> means) {
    double sum = 0.0;
    for (const auto& m : means) sum += distance_full(record, m);
    return sum;
}

double type2_sum(std::span<const Cell> record, std::span<const Vector> means) {
    double sum = 0.0;
    for (const auto& m : means) sum += distance_masked(record, m);
    return sum;
}

std::vector<Neighbor> intra_cluster_neighbors(const Record& record, const ClusterModel& model,
                                              std::span<const Record> group, std::size_t count,
                                              std::vector<std::string>* warnings) {
    require_complete(record);
    const auto& members = model.members[model.cluster_of(record.id)];
    std::vector<Neighbor> all;
    all.reserve(members.size());
    for (RecordId id : members) {
        if (id == record.id) continue;
        const Record& other = find_record(group, id);
        all.push_back({id, full_between_records(record.values, other.values)});
    }
    if (all.size() < count && warnings) {
        warnings->push_back("record " + record.display_name() + ": only " + std::to_string(all.size()) +
                            " intra-cluster neighbours for neighbour count " + std::to_string(count));
    }
    return take_nearest(std::move(all), count);
}

std::vector<Neighbor> cross_group_neighbors(const Record& record, std::span<const Record> group,
                                            std::size_t count, std::vector<std::string>* warnings) {
    if (group.empty()) fail(ErrorKind::Pipeline, "no complete records to search for neighbours");
    std::vector<Neighbor> all;
    all.reserve(group.size());
    for (const auto& g : group) {
        if (g.id == record.id) continue;
        all.push_back({g.id, masked_to_record(record.values, g.values)});
    }
    if (all.size() < count && warnings) {
        warnings->push_back("record " + record.display_name() + ": only " + std::to_string(all.size()) +
                            " neighbours for neighbour count " + std::to_string(count));
    }
    return take_nearest(std::move(all), count);
}

MappingEntry map_complete(const Record& record, const ClusterModel& model, std::span<const Record> group,
                          const MappingConfig& config, std::vector<std::string>* warnings) {
    if (config.neighbor_count == 0) fail(ErrorKind::Validation, "neighbour count must be positive");
    const auto values = record.complete_values();
    MappingEntry entry;
    entry.record_id = record.id;
    for (const auto& m : model.means) {
        entry.cluster_distances.push_back(distance_full(values, m));
        entry.cluster_sum += entry.cluster_distances.back();
    }
    entry.neighbors = intra_cluster_neighbors(record, model, group, config.neighbor_count, warnings);
    entry.total = entry.cluster_sum;
    for (const auto& nb : entry.neighbors) entry.total += nb.distance;
    return entry;
}

MappingEntry map_missing(const Record& record, const ClusterModel& model, std::span<const Record> group,
                         const MappingConfig& config, std::vector<std::string>* warnings) {
    if (config.neighbor_count == 0) fail(ErrorKind::Validation, "neighbour count must be positive");
    MappingEntry entry;
    entry.record_id = record.id;
    for (const auto& m : model.means) {
        entry.cluster_distances.push_back(distance_masked(record.values, m));
        entry.cluster_sum += entry.cluster_distances.back();
    }
    entry.neighbors = cross_group_neighbors(record, group, config.neighbor_count, warnings);
    entry.total = entry.cluster_sum;
    for (const auto& nb : entry.neighbors) entry.total += nb.distance;
    return entry;
}

std::vector<double> pairwise_distances(std::span<const RecordId> ids, std::span<const Record> group) {
    std::vector<const Record*> rows;
    rows.reserve(ids.size());
    for (RecordId id : ids) {
        rows.push_back(&find_record(group, id));
        require_complete(*rows.back());
    }
    std::vector<double> out(ids.size() * ids.size(), 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = i + 1; j < rows.size(); ++j) {
            const double d = full_between_records(rows[i]->values, rows[j]->values);
            out[i * ids.size() + j] = d;
            out[j * ids.size() + i] = d;
        }
    }
    return out;
}

}  // namespace cbci
