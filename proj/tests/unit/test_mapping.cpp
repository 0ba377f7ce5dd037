#include <doctest.h>

#include <algorithm>
#include <random>

#include "cbci/error.hpp"
#include "cbci/mapping.hpp"
#include "support/fixtures.hpp"

using namespace cbci;

namespace {

struct CaseStudy {
    Dataset ds = fixtures::case_study();
    GroupSplit split = split_groups(ds);
    ClusterModel model = kmeans(split.complete, 2, fixtures::case_study_means());

    const Record& record(RecordId id) const { return fixtures::by_id(ds, id); }
    // The printed "first cluster" is the {MR2, MR7, MR8} cluster.
    const Vector& mean_mr2() const { return model.means[1]; }
    const Vector& mean_mr1() const { return model.means[0]; }
};

constexpr double kPrinted = 1e-5;  // reference tables print six decimals

}  // namespace

TEST_CASE("distance_full") {
    const CaseStudy cs;
    CHECK(std::abs(distance_full(cs.record(1).complete_values(), cs.mean_mr2()) - 5.312459) < kPrinted);
    const std::vector<double> x{1.0, 2.0, 3.0};
    CHECK(distance_full(x, x) == 0.0);
    CHECK(distance_full(std::vector<double>{0, 0}, std::vector<double>{3, 4}) == 5.0);
    CHECK_THROWS_AS(distance_full(std::vector<double>{0, 0}, std::vector<double>{3}), Error);
}

TEST_CASE("distance tables for the complete group") {
    const CaseStudy cs;
    // distance to the {MR2,MR7,MR8} mean, then to the {MR1,MR4,MR6,MR9} mean
    const std::vector<std::tuple<RecordId, double, double, double>> rows{
        {1, 5.312459, 1.47902, 6.791479},  {2, 1.374369, 5.214163, 6.588532}, {4, 5.153208, 1.299038, 6.452246},
        {6, 5.878397, 2.772634, 8.651031}, {7, 2.624669, 7.189402, 9.814071}, {8, 2.134375, 3.344772, 5.479147},
        {9, 5.022173, 0.829156, 5.851329}};
    for (const auto& [id, first, second, type1] : rows) {
        CAPTURE(id);
        const auto v = cs.record(id).complete_values();
        CHECK(std::abs(distance_full(v, cs.mean_mr2()) - first) < kPrinted);
        CHECK(std::abs(distance_full(v, cs.mean_mr1()) - second) < kPrinted);
        CHECK(std::abs(type1_sum(v, cs.model.means) - type1) < kPrinted);
    }
}

TEST_CASE("distance_masked") {
    const CaseStudy cs;
    CHECK(std::abs(distance_masked(cs.record(3).values, cs.mean_mr2()) - 2.603417) < kPrinted);
    CHECK(std::abs(distance_masked(cs.record(3).values, cs.mean_mr1()) - 3.181981) < kPrinted);
    CHECK(std::abs(distance_masked(cs.record(5).values, cs.mean_mr2()) - 3.091206) < kPrinted);
    CHECK(std::abs(distance_masked(cs.record(5).values, cs.mean_mr1()) - 3.561952) < kPrinted);

    const auto& r1 = cs.record(1);
    CHECK(distance_masked(r1.values, cs.mean_mr2()) == distance_full(r1.complete_values(), cs.mean_mr2()));

    const std::vector<Cell> none{std::nullopt, std::nullopt};
    CHECK_THROWS_AS(distance_masked(none, std::vector<double>{1, 2}), Error);
    CHECK_THROWS_AS(distance_masked(r1.values, std::vector<double>{1, 2}), Error);
}

TEST_CASE("type2_sum follows the per-cluster sum") {
    const CaseStudy cs;
    // Oracle: sum of the two masked distances (brute-force test oracle).
    CHECK(type2_sum(cs.record(3).values, cs.model.means) == doctest::Approx(5.785397074).epsilon(1e-9));
    CHECK(type2_sum(cs.record(5).values, cs.model.means) == doctest::Approx(6.653157877).epsilon(1e-9));
    // and these differ from the printed type-2 table, which repeats type-1 rows
    CHECK(std::abs(type2_sum(cs.record(3).values, cs.model.means) - 6.791479) > 1.0);
    CHECK(std::abs(type2_sum(cs.record(5).values, cs.model.means) - 6.588532) > 0.05);

    const std::vector<Vector> means{{1, 2, 3}, {1, 2, 9}};
    const std::vector<Cell> matching{1.0, 2.0, std::nullopt};
    CHECK(type2_sum(matching, means) == 0.0);
    CHECK(type1_sum(std::vector<double>{1, 2, 3}, std::vector<Vector>{{1, 2, 3}}) == 0.0);
}

TEST_CASE("intra_cluster_neighbors") {
    const CaseStudy cs;
    const auto& g1 = cs.split.complete;
    auto n1 = intra_cluster_neighbors(cs.record(1), cs.model, g1, 2);
    REQUIRE(n1.size() == 2);
    CHECK(n1[0].id == 4);
    CHECK(n1[0].distance == 1.0);
    CHECK(n1[1].id == 9);
    CHECK(std::abs(n1[1].distance - 1.732051) < kPrinted);

    auto n6 = intra_cluster_neighbors(cs.record(6), cs.model, g1, 2);
    CHECK(n6[0].id == 9);
    CHECK(std::abs(n6[0].distance - 3.162278) < kPrinted);
    CHECK(n6[1].id == 4);
    CHECK(n6[1].distance == 4.0);

    // singleton cluster: no neighbours, and a warning
    std::vector<Record> group{{1, "", {0.0}, {}}, {2, "", {10.0}, {}}};
    const auto model = kmeans(group, 2, init::FarthestFirst{});
    std::vector<std::string> warnings;
    CHECK(intra_cluster_neighbors(group[0], model, group, 2, &warnings).empty());
    CHECK(warnings.size() == 1);
}

TEST_CASE("pairwise distance tables") {
    const CaseStudy cs;
    const auto& g1 = cs.split.complete;
    // pairwise rows for {MR1,MR4,MR6,MR9}; some entries are printed rounded
    const std::vector<RecordId> ids{1, 4, 6, 9};
    // Entries are checked to half a unit of the precision they are printed at.
    const char* table[4][4] = {{"0", "1", "4.123106", "1.732051"}, {"1", "0", "4", "1.414214"},
                               {"4.1231", "4", "0", "3.162278"}, {"1.732", "1.414", "3.16", "0"}};
    const auto d = pairwise_distances(ids, g1);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            const std::string printed = table[i][j];
            const auto dot = printed.find('.');
            const int decimals = dot == std::string::npos ? 6 : static_cast<int>(printed.size() - dot - 1);
            CAPTURE(printed);
            CHECK(std::abs(d[i * 4 + j] - std::stod(printed)) <= 0.5 * std::pow(10.0, -decimals) + 1e-12);
        }
    }
    const std::vector<RecordId> ids2{2, 7, 8};
    const double table2[3][3] = {{0, 3.605551, 2.44949}, {3.605551, 0, 4.582576}, {2.44949, 4.582576, 0}};
    const auto d2 = pairwise_distances(ids2, g1);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) CHECK(std::abs(d2[i * 3 + j] - table2[i][j]) < kPrinted);
    }
}

TEST_CASE("cross_group_neighbors") {
    const CaseStudy cs;
    const auto& g1 = cs.split.complete;
    // brute-force over all seven complete records, frozen
    auto n3 = cross_group_neighbors(cs.record(3), g1, 2);
    CHECK(n3[0].id == 8);
    CHECK(n3[0].distance == doctest::Approx(std::sqrt(5.0)));
    CHECK(n3[1].id == 2);
    CHECK(n3[1].distance == doctest::Approx(std::sqrt(8.0)));
    auto n5 = cross_group_neighbors(cs.record(5), g1, 2);
    CHECK(n5[0].id == 4);
    CHECK(n5[0].distance == doctest::Approx(std::sqrt(6.0)));
    CHECK(n5[1].id == 7);
    CHECK(n5[1].distance == doctest::Approx(std::sqrt(8.0)));

    Record copy = cs.record(1);
    copy.id = 100;
    copy.values[0].reset();
    auto nc = cross_group_neighbors(copy, g1, 1);
    CHECK(nc[0].id == 1);
    CHECK(nc[0].distance == 0.0);

    CHECK_THROWS_AS(cross_group_neighbors(cs.record(3), std::span<const Record>{}, 2), Error);
}

TEST_CASE("map_complete matches the final mapping table") {
    const CaseStudy cs;
    const auto& g1 = cs.split.complete;
    const MappingConfig config{2};
    const auto e1 = map_complete(cs.record(1), cs.model, g1, config);
    CHECK(std::abs(e1.total - 9.52353) < kPrinted);
    CHECK(e1.total == e1.cluster_sum + e1.neighbors[0].distance + e1.neighbors[1].distance);
    const auto e4 = map_complete(cs.record(4), cs.model, g1, config);
    CHECK(std::abs(e4.total - 8.86646) < kPrinted);

    // frozen from the straight-line oracle
    const std::vector<std::pair<RecordId, double>> oracle_totals{
        {1, 9.523529904}, {2, 12.643572964}, {4, 8.866459946}, {6, 15.813309150},
        {7, 18.002198184}, {8, 12.511212224}, {9, 8.997593625}};
    for (const auto& [id, total] : oracle_totals) {
        CAPTURE(id);
        CHECK(map_complete(cs.record(id), cs.model, g1, config).total == doctest::Approx(total).epsilon(1e-9));
    }

    std::vector<Record> group{{1, "", {0.0}, {}}, {2, "", {10.0}, {}}};
    const auto model = kmeans(group, 2, init::FarthestFirst{});
    const auto lone = map_complete(group[0], model, group, config);
    CHECK(lone.total == lone.cluster_sum);
}

TEST_CASE("map_missing uses the masked cluster sum") {
    const CaseStudy cs;
    const auto& g1 = cs.split.complete;
    const MappingConfig config{2};
    const auto e3 = map_missing(cs.record(3), cs.model, g1, config);
    CHECK(e3.total == doctest::Approx(10.849892176).epsilon(1e-9));
    CHECK(std::abs(e3.total - 10.849893) < kPrinted);
    const auto e5 = map_missing(cs.record(5), cs.model, g1, config);
    CHECK(e5.total == doctest::Approx(11.931074745).epsilon(1e-9));

    // all means and a neighbour equal on the present cells
    std::vector<Record> group{{1, "", {1.0, 5.0}, {}}, {2, "", {1.0, 5.0}, {}}};
    const auto model = kmeans(group, 1, init::FarthestFirst{});
    const Record target{3, "", {1.0, std::nullopt}, {}};
    CHECK(map_missing(target, model, group, MappingConfig{2}).total == 0.0);
}

TEST_CASE("mapping properties on random data") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t m = 6 + rng() % 10;
        const std::size_t n = 2 + rng() % 4;
        std::vector<Record> group;
        for (std::size_t i = 0; i < m; ++i) {
            Record r;
            r.id = i + 1;
            for (std::size_t a = 0; a < n; ++a) r.values.emplace_back(u(rng));
            group.push_back(r);
        }
        const std::size_t k = 1 + rng() % 3;
        init::Fixed seeds;
        for (std::size_t i = 0; i < k; ++i) seeds.means.push_back(group[i].complete_values());
        const auto model = kmeans(group, k, seeds);
        const MappingConfig config{1 + rng() % 3};

        for (const auto& r : group) {
            // type2 on a complete record is type1, bit for bit
            CHECK(type2_sum(r.values, model.means) == type1_sum(r.complete_values(), model.means));
            const auto e = map_complete(r, model, group, config);
            CHECK(e.total >= 0.0);
            CHECK(std::is_sorted(e.neighbors.begin(), e.neighbors.end(),
                                 [](const Neighbor& a, const Neighbor& b) { return a.distance < b.distance; }));
            CHECK(e.neighbors.size() <= config.neighbor_count);
        }

        // scaling every value and mean by c scales every total by c
        const double c = 0.5 + u(rng);
        auto scaled = group;
        for (auto& r : scaled) {
            for (auto& v : r.values) *v *= c;
        }
        auto scaled_seeds = seeds;
        for (auto& mean : scaled_seeds.means) {
            for (auto& v : mean) v *= c;
        }
        const auto scaled_model = kmeans(scaled, k, scaled_seeds);
        for (std::size_t i = 0; i < m; ++i) {
            const auto a = map_complete(group[i], model, group, config);
            const auto b = map_complete(scaled[i], scaled_model, scaled, config);
            CHECK(b.total == doctest::Approx(c * a.total).epsilon(1e-9));
            CHECK(b.cluster_sum == doctest::Approx(c * a.cluster_sum).epsilon(1e-9));
        }

        // removing a non-neighbour leaves a cross-group neighbour list alone
        Record target = group[0];
        target.id = 1000;
        target.values[0].reset();
        const auto before = cross_group_neighbors(target, group, 2);
        std::vector<Record> reduced;
        bool dropped = false;
        for (const auto& r : group) {
            if (!dropped && r.id != before[0].id && r.id != before[1].id) {
                dropped = true;
                continue;
            }
            reduced.push_back(r);
        }
        const auto after = cross_group_neighbors(target, reduced, 2);
        CHECK(after[0].id == before[0].id);
        CHECK(after[1].id == before[1].id);
    }
}
