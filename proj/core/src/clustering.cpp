#include "cbci/clustering.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "cbci/error.hpp"

namespace cbci {
namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

/// Nearest mean for every point; equal distances go to the lowest index.
std::vector<std::size_t> assign(const std::vector<Vector>& points, const std::vector<Vector>& means) {
    std::vector<std::size_t> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::size_t best = 0;
        double best_d = squared_distance(points[i], means[0]);
        for (std::size_t c = 1; c < means.size(); ++c) {
            const double d = squared_distance(points[i], means[c]);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        out[i] = best;
    }
    return out;
}

/// Centroids of the current assignment. `order` lists point indices by
/// ascending record id so sums are accumulated in a fixed order.
std::vector<Vector> centroids(const std::vector<Vector>& points, std::span<const std::size_t> assignment,
                              std::size_t k, std::span<const std::size_t> order) {
    const std::size_t n = points.front().size();
    std::vector<Vector> sums(k, Vector(n, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i : order) {
        auto& s = sums[assignment[i]];
        for (std::size_t a = 0; a < n; ++a) s[a] += points[i][a];
        ++counts[assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) fail(ErrorKind::Pipeline, "cluster " + std::to_string(c + 1) + " is empty");
        for (auto& v : sums[c]) v /= static_cast<double>(counts[c]);
    }
    return sums;
}

/// Moves the point farthest from its own mean into each empty cluster.
std::size_t repair_empty(const std::vector<Vector>& points, std::vector<std::size_t>& assignment,
                         const std::vector<Vector>& means, std::span<const std::size_t> order) {
    const std::size_t k = means.size();
    std::vector<std::size_t> counts(k, 0);
    for (auto c : assignment) ++counts[c];
    std::vector<bool> moved(points.size(), false);
    std::size_t repairs = 0;
    for (std::size_t empty = 0; empty < k; ++empty) {
        if (counts[empty] != 0) continue;
        std::optional<std::size_t> pick;
        double pick_d = -1.0;
        for (std::size_t i : order) {
            if (moved[i] || counts[assignment[i]] < 2) continue;
            const double d = squared_distance(points[i], means[assignment[i]]);
            if (d > pick_d) {
                pick_d = d;
                pick = i;
            }
        }
        if (!pick) fail(ErrorKind::Pipeline, "cannot repair empty cluster: too few records");
        --counts[assignment[*pick]];
        assignment[*pick] = empty;
        ++counts[empty];
        moved[*pick] = true;
        ++repairs;
    }
    return repairs;
}

std::vector<Vector> initial_means(const InitStrategy& init, std::span<const Record> group,
                                  const std::vector<Vector>& points, std::size_t k,
                                  std::span<const std::size_t> order) {
    const std::size_t n = points.front().size();
    if (const auto* fixed = std::get_if<init::Fixed>(&init)) {
        if (fixed->means.size() != k) {
            fail(ErrorKind::Validation, "FIXED init provides " + std::to_string(fixed->means.size()) +
                                            " means for k = " + std::to_string(k));
        }
        for (const auto& m : fixed->means) {
            if (m.size() != n) {
                fail(ErrorKind::Validation, "FIXED init mean has " + std::to_string(m.size()) +
                                                " values, records have " + std::to_string(n));
            }
        }
        return fixed->means;
    }
    if (std::holds_alternative<init::ClassSeeded>(init)) {
        std::set<std::string> labels;
        for (const auto& r : group) {
            if (r.label) labels.insert(*r.label);
        }
        if (labels.size() != k) {
            fail(ErrorKind::Validation, "CLASS_SEEDED init needs k equal to the number of classes (" +
                                            std::to_string(labels.size()) + "), got " + std::to_string(k));
        }
        const std::vector<std::string> ordered(labels.begin(), labels.end());
        std::vector<std::size_t> assignment(points.size(), k);
        std::vector<std::size_t> labelled;
        for (std::size_t i : order) {
            if (!group[i].label) continue;
            assignment[i] = static_cast<std::size_t>(
                std::lower_bound(ordered.begin(), ordered.end(), *group[i].label) - ordered.begin());
            labelled.push_back(i);
        }
        return centroids(points, assignment, k, labelled);
    }
    const auto& ff = std::get<init::FarthestFirst>(init);
    std::size_t start = order.front();
    if (ff.start_id != 0) {
        auto it = std::find_if(order.begin(), order.end(), [&](std::size_t i) { return group[i].id == ff.start_id; });
        if (it == order.end()) {
            fail(ErrorKind::Validation, "FARTHEST_FIRST start id " + std::to_string(ff.start_id) +
                                            " is not a complete record");
        }
        start = *it;
    }
    std::vector<Vector> means{points[start]};
    std::vector<double> nearest(points.size(), std::numeric_limits<double>::infinity());
    std::vector<bool> chosen(points.size(), false);
    chosen[start] = true;
    std::size_t last = start;
    while (means.size() < k) {
        std::optional<std::size_t> pick;
        double pick_d = -1.0;
        for (std::size_t i : order) {
            nearest[i] = std::min(nearest[i], squared_distance(points[i], points[last]));
            if (!chosen[i] && nearest[i] > pick_d) {
                pick_d = nearest[i];
                pick = i;
            }
        }
        chosen[*pick] = true;
        last = *pick;
        means.push_back(points[last]);
    }
    return means;
}

}  // namespace

std::string describe(const InitStrategy& strategy) {
    if (const auto* f = std::get_if<init::Fixed>(&strategy)) {
        return "fixed(" + std::to_string(f->means.size()) + " means)";
    }
    if (std::holds_alternative<init::ClassSeeded>(strategy)) return "class_seeded";
    const auto& ff = std::get<init::FarthestFirst>(strategy);
    return ff.start_id == 0 ? "farthest_first(lowest id)" : "farthest_first(" + std::to_string(ff.start_id) + ")";
}

std::size_t ClusterModel::cluster_of(RecordId id) const {
    for (std::size_t c = 0; c < members.size(); ++c) {
        if (std::binary_search(members[c].begin(), members[c].end(), id)) return c;
    }
    fail(ErrorKind::Validation, "record " + std::to_string(id) + " is not in the cluster model");
}

std::size_t infer_k(std::span<const Record> group) {
    std::set<std::string_view> labels;
    for (const auto& r : group) {
        if (r.label) labels.insert(*r.label);
    }
    if (labels.empty()) fail(ErrorKind::Pipeline, "cannot infer k: no labelled complete records");
    return labels.size();
}

ClusterModel kmeans(std::span<const Record> group, std::size_t k, const InitStrategy& init,
                    std::size_t max_iter) {
    if (group.empty()) fail(ErrorKind::Pipeline, "kmeans: no complete records");
    if (k == 0) fail(ErrorKind::Validation, "kmeans: k must be positive");
    if (group.size() < k) {
        fail(ErrorKind::Pipeline, "kmeans: " + std::to_string(group.size()) + " complete records for k = " +
                                      std::to_string(k));
    }
    if (max_iter == 0) fail(ErrorKind::Validation, "kmeans: max_iter must be positive");

    std::vector<Vector> points;
    points.reserve(group.size());
    for (const auto& r : group) points.push_back(r.complete_values());
    const std::size_t n = points.front().size();
    for (const auto& p : points) {
        if (p.size() != n) fail(ErrorKind::Validation, "kmeans: records differ in length");
    }

    std::vector<std::size_t> order(group.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return group[a].id < group[b].id; });

    ClusterModel model;
    model.k = k;
    model.means = initial_means(init, group, points, k, order);
    model.assignment = assign(points, model.means);
    model.wcss_history.push_back(wcss(group, model.assignment, model.means));

    for (std::size_t iter = 1; iter <= max_iter; ++iter) {
        model.empty_repairs += repair_empty(points, model.assignment, model.means, order);
        model.means = centroids(points, model.assignment, k, order);
        model.wcss_history.push_back(wcss(group, model.assignment, model.means));
        model.iterations = iter;

        auto next = assign(points, model.means);
        model.wcss_history.push_back(wcss(group, next, model.means));
        if (next == model.assignment) {
            model.converged = true;
            break;
        }
        model.assignment = std::move(next);
    }
    if (!model.converged) {
        // The last reassignment has not been folded into the means yet.
        model.empty_repairs += repair_empty(points, model.assignment, model.means, order);
        model.means = centroids(points, model.assignment, k, order);
        model.wcss_history.push_back(wcss(group, model.assignment, model.means));
    }

    model.members.assign(k, {});
    for (std::size_t i : order) model.members[model.assignment[i]].push_back(group[i].id);
    return model;
}

std::vector<Vector> cluster_means(const ClusterModel& model, std::span<const Record> group) {
    std::unordered_map<RecordId, const Record*> by_id;
    for (const auto& r : group) by_id.emplace(r.id, &r);
    std::vector<Vector> means;
    means.reserve(model.members.size());
    for (std::size_t c = 0; c < model.members.size(); ++c) {
        const auto& ids = model.members[c];
        if (ids.empty()) fail(ErrorKind::Pipeline, "cluster " + std::to_string(c + 1) + " is empty");
        Vector sum;
        for (RecordId id : ids) {  // ids are ascending
            auto it = by_id.find(id);
            if (it == by_id.end()) fail(ErrorKind::Validation, "cluster member " + std::to_string(id) + " not in group");
            const auto values = it->second->complete_values();
            if (sum.empty()) sum.assign(values.size(), 0.0);
            for (std::size_t a = 0; a < values.size(); ++a) sum[a] += values[a];
        }
        for (auto& v : sum) v /= static_cast<double>(ids.size());
        means.push_back(std::move(sum));
    }
    return means;
}

double wcss(std::span<const Record> group, std::span<const std::size_t> assignment,
            std::span<const Vector> means) {
    double total = 0.0;
    for (std::size_t i = 0; i < group.size(); ++i) {
        const auto& values = group[i].values;
        const auto& m = means[assignment[i]];
        for (std::size_t a = 0; a < m.size(); ++a) {
            const double d = *values[a] - m[a];
            total += d * d;
        }
    }
    return total;
}

std::vector<Vector> parse_means(std::istream& in) {
    std::vector<Vector> means;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Vector v;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto first = item.find_first_not_of(" \t\r");
            const auto last = item.find_last_not_of(" \t\r");
            if (first == std::string::npos) {
                fail(ErrorKind::Parse, "means line " + std::to_string(lineno) + ": empty value");
            }
            const std::string_view text(item.data() + first, last - first + 1);
            // Accepts plain decimals and exact fractions such as 7/3.
            auto parse = [&](std::string_view t) {
                double x = 0.0;
                const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
                if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(x)) {
                    fail(ErrorKind::Parse, "means line " + std::to_string(lineno) + ": bad number '" +
                                               std::string(text) + "'");
                }
                return x;
            };
            const auto slash = text.find('/');
            if (slash == std::string_view::npos) {
                v.push_back(parse(text));
            } else {
                const double den = parse(text.substr(slash + 1));
                if (den == 0.0) fail(ErrorKind::Parse, "means line " + std::to_string(lineno) + ": zero denominator");
                v.push_back(parse(text.substr(0, slash)) / den);
            }
        }
        if (!means.empty() && v.size() != means.front().size()) {
            fail(ErrorKind::Parse, "means line " + std::to_string(lineno) + ": inconsistent length");
        }
        means.push_back(std::move(v));
    }
    if (means.empty()) fail(ErrorKind::Parse, "means file has no vectors");
    return means;
}

std::vector<Vector> read_means_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot read means file '" + path + "'");
    return parse_means(in);
}

}  // namespace cbci
