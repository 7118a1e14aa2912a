#include <doctest.h>

#include "../oracles.hpp"
#include "odflow/clustering.hpp"
#include "odflow/random.hpp"

#include <array>
#include <cmath>

using namespace odflow;

namespace {

FeatureFrame frame_of(const Eigen::MatrixXd& values) {
    FeatureFrame f;
    for (Eigen::Index i = 0; i < values.rows(); ++i) f.ids.push_back("p" + std::to_string(i));
    for (Eigen::Index j = 0; j < values.cols(); ++j) f.columns.push_back("v" + std::to_string(j));
    f.values = values;
    return f;
}

Eigen::MatrixXd blobs(std::size_t groups, std::size_t per_group, std::uint64_t seed) {
    SplitMix64 rng(seed);
    const std::array<std::array<double, 2>, 3> centers{{{0, 0}, {10, 0}, {5, 9}}};
    Eigen::MatrixXd x(static_cast<Eigen::Index>(groups * per_group), 2);
    for (std::size_t g = 0; g < groups; ++g)
        for (std::size_t i = 0; i < per_group; ++i) {
            const auto r = static_cast<Eigen::Index>(g * per_group + i);
            const auto& c = centers[groups == 2 ? 2 * g : g];
            x(r, 0) = rng.normal(c[0], 0.5);
            x(r, 1) = rng.normal(c[1], 0.5);
        }
    return x;
}

oracle::Linkage linkage_of(ClusterMethod m) {
    switch (m) {
    case ClusterMethod::Single: return oracle::Linkage::Single;
    case ClusterMethod::Complete: return oracle::Linkage::Complete;
    case ClusterMethod::Average: return oracle::Linkage::Average;
    case ClusterMethod::Ward: return oracle::Linkage::Ward;
    case ClusterMethod::Centroid: return oracle::Linkage::Centroid;
    case ClusterMethod::Median: return oracle::Linkage::Median;
    default: return oracle::Linkage::Mcquitty;
    }
}

} // namespace

TEST_CASE("standardization uses the sample deviation") {
    Eigen::MatrixXd x(4, 2);
    x << 1, 5, 2, 5, 3, 7, 4, 7;
    const auto z = standardize(frame_of(x));
    CHECK(z.standardized);
    for (Eigen::Index j = 0; j < 2; ++j) {
        CHECK(std::abs(z.values.col(j).mean()) < 1e-12);
        const double var = (z.values.col(j).array() - z.values.col(j).mean()).square().sum() / 3.0;
        CHECK(var == doctest::Approx(1.0));
    }
    CHECK(z.values(0, 0) == doctest::Approx(-1.5 / std::sqrt(5.0 / 3.0)));

    Eigen::MatrixXd c(3, 2);
    c << 1, 2, 1, 3, 1, 4;
    auto f = frame_of(c);
    f.columns = {"flat", "ok"};
    try {
        standardize(f);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("flat") != std::string::npos);
    }
    CHECK_THROWS_AS(hierarchical(frame_of(x), ClusterMethod::Ward, 2), Error);
}

TEST_CASE("single linkage on a line") {
    Eigen::MatrixXd x(3, 1);
    x << 0, 1, 10;
    const auto tree = agglomerate(x, ClusterMethod::Single);
    REQUIRE(tree.merges.size() == 2);
    CHECK(tree.merges[0].left == 0);
    CHECK(tree.merges[0].right == 1);
    CHECK(tree.merges[0].height == doctest::Approx(1.0));
    CHECK(tree.merges[1].left == 0);
    CHECK(tree.merges[1].right == 2);
    CHECK(tree.merges[1].height == doctest::Approx(9.0));
    CHECK(tree.merges[1].size == 3);
    CHECK(cut_tree(tree, 2) == std::vector<int>{0, 0, 1});
    CHECK(cut_tree(tree, 3) == std::vector<int>{0, 1, 2});
    CHECK(cut_tree(tree, 1) == std::vector<int>{0, 0, 0});
    CHECK_THROWS_AS(cut_tree(tree, 4), Error);
    CHECK_THROWS_AS(agglomerate(x, ClusterMethod::KMeans), Error);
}

TEST_CASE("silhouette and purity by hand") {
    Eigen::MatrixXd x(4, 1);
    x << 0, 1, 10, 11;
    const std::vector<int> labels{0, 0, 1, 1};
    const auto s = silhouette(x, labels);
    const double a = 1.0 - 1.0 / 10.5;
    const double b = 1.0 - 1.0 / 9.5;
    CHECK(s.overall == doctest::Approx((a + b) / 2.0).epsilon(1e-12));
    CHECK(s.overall == doctest::Approx(0.8997).epsilon(1e-4));
    CHECK(s.per_point[0] == doctest::Approx(a));

    const std::vector<int> singleton{0, 0, 0, 1};
    CHECK(silhouette(x, singleton).per_point[3] == 0.0);
    const std::vector<int> one{0, 0, 0, 0};
    CHECK_THROWS_AS(silhouette(x, one), Error);

    const std::map<std::string, int> assignment{{"a", 0}, {"b", 0}, {"c", 1}, {"d", 1}, {"e", 1}};
    const std::map<std::string, std::string> same{{"a", "X"}, {"b", "X"}, {"c", "Y"}, {"d", "Y"}, {"e", "Y"}};
    const std::map<std::string, std::string> mixed{{"a", "X"}, {"b", "Y"}, {"c", "Y"}, {"d", "X"}, {"e", "Z"}};
    CHECK(purity(assignment, same) == 1.0);
    CHECK(purity(assignment, mixed) == doctest::Approx(0.4));
    const std::map<std::string, std::string> short_ref{{"a", "X"}};
    CHECK_THROWS_AS(purity(assignment, short_ref), Error);
}

TEST_CASE("Lance-Williams updates agree with the naive definitions") {
    const ClusterMethod methods[] = {ClusterMethod::Single,   ClusterMethod::Complete, ClusterMethod::Average,
                                     ClusterMethod::Ward,     ClusterMethod::Centroid, ClusterMethod::Median,
                                     ClusterMethod::Mcquitty};
    SplitMix64 rng(77);
    for (int rep = 0; rep < 25; ++rep) {
        const auto n = static_cast<Eigen::Index>(3 + rng.below(6));
        Eigen::MatrixXd x(n, 3);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < 3; ++j) x(i, j) = rng.normal();
        for (auto m : methods) {
            const auto tree = agglomerate(x, m);
            const auto ref = oracle::agglomerate(x, linkage_of(m));
            REQUIRE(tree.merges.size() == ref.size());
            for (std::size_t s = 0; s < ref.size(); ++s) {
                CHECK(tree.merges[s].left == ref[s].left);
                CHECK(tree.merges[s].right == ref[s].right);
                CHECK(std::abs(tree.merges[s].height - ref[s].height) <= 1e-10);
            }
        }
    }
}

TEST_CASE("k-means reaches the exhaustive optimum on separable data") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto x = blobs(3, 3, seed);
        auto f = frame_of(x);
        f.standardized = true;
        const auto s = kmeans(f, 3, seed);
        REQUIRE(s.inertia.has_value());
        CHECK(*s.inertia == doctest::Approx(oracle::best_partition_wcss(x, 3)).epsilon(1e-9));
        CHECK(*s.inertia == doctest::Approx(within_cluster_sum_of_squares(x, s.labels)));
        for (std::size_t t = 1; t < s.inertia_trace.size(); ++t)
            CHECK(s.inertia_trace[t] <= s.inertia_trace[t - 1] + 1e-12);
    }
    SplitMix64 rng(3);
    Eigen::MatrixXd noise(8, 2);
    for (Eigen::Index i = 0; i < 8; ++i) noise.row(i) << rng.normal(), rng.normal();
    auto f = frame_of(noise);
    f.standardized = true;
    const auto s = kmeans(f, 2, 11);
    CHECK(*s.inertia >= oracle::best_partition_wcss(noise, 2) - 1e-9);
    const auto again = kmeans(f, 2, 11);
    CHECK(again.labels == s.labels);
}

TEST_CASE("selection recovers the planted number of groups") {
    const ClusterMethod methods[] = {ClusterMethod::Ward, ClusterMethod::KMeans};
    const std::vector<std::size_t> ks{2, 3, 4, 5, 6};
    for (std::size_t groups : {3, 2}) {
        const auto f = standardize(frame_of(blobs(groups, 15, 40 + groups)));
        std::map<std::string, std::string> reference;
        for (std::size_t i = 0; i < f.ids.size(); ++i) reference[f.ids[i]] = "g" + std::to_string(i / 15);
        const auto rows = select_k(f, methods, ks, &reference);
        CHECK(rows.size() == 10);
        for (const auto& r : rows) {
            REQUIRE(r.purity.has_value());
            if (r.selected) {
                CHECK(r.k == groups);
                CHECK(*r.purity == 1.0);
            }
        }
    }
}

TEST_CASE("cluster naming picks the best one-to-one mapping") {
    Eigen::MatrixXd x(6, 1);
    x << 0, 0.1, 5, 5.1, 10, 10.1;
    auto f = frame_of(x);
    f.standardized = true;
    const auto s = hierarchical(f, ClusterMethod::Ward, 3);
    CHECK(s.labels == std::vector<int>{0, 0, 1, 1, 2, 2});
    const std::map<std::string, std::string> reference{{"p0", "Mountain"},    {"p1", "Mountain"},
                                                       {"p2", "NotSpecific"}, {"p3", "NotSpecific"},
                                                       {"p4", "CulturalLake"}, {"p5", "Mountain"}};
    const std::vector<std::string> names{"NotSpecific", "CulturalLake", "Mountain"};
    CHECK(name_clusters(s, reference, names) == std::vector<std::string>{"Mountain", "NotSpecific", "CulturalLake"});
    CHECK(s.assignment().at("p3") == 1);
}
