#include <doctest.h>

#include "../oracles.hpp"
#include "odflow/error.hpp"
#include "odflow/gravity.hpp"
#include "odflow/random.hpp"
#include "odflow/synth.hpp"

#include <cmath>
#include <sstream>

using namespace odflow;

namespace {

struct Region {
    NodeSet nodes;
    TravelTimeMatrix tt;
    AttractionTable attractions;
};

Region three_nodes() {
    NodeSet nodes({"O", "A", "D"});
    TravelTimeMatrix tt(nodes);
    tt.set(0, 1, 10);
    tt.set(0, 2, 20);
    tt.set(1, 0, 10);
    tt.set(1, 2, 15);
    tt.set(2, 0, 20);
    tt.set(2, 1, 15);
    std::vector<std::array<double, 7>> counts(3);
    counts[1][0] = 3;
    return {nodes, tt, AttractionTable(nodes, counts)};
}

} // namespace

TEST_CASE("travel time matrix") {
    auto r = three_nodes();
    CHECK(r.tt.at("O", "A") == 10.0);
    CHECK(r.tt.at(1, 1) == 0.0);
    CHECK(r.tt.complete());
    CHECK(r.tt.symmetric());
    CHECK_THROWS_AS(r.tt.set(0, 1, 0.0), Error);
    CHECK_THROWS_AS(r.tt.set(0, 0, 3.0), Error);
    TravelTimeMatrix partial(r.nodes);
    partial.set(0, 1, 5.0);
    CHECK_FALSE(partial.complete());
    CHECK_THROWS_AS(partial.require_complete(), Error);
    CHECK_THROWS_AS(partial.at(1, 0), Error);
}

TEST_CASE("inside feature with a single intermediate node") {
    const auto r = three_nodes();
    CHECK(inside_attraction("O", "D", "museums", r.tt, r.attractions) == 30.0);
    CHECK(inside_attraction(0, 2, AttractionKind::SkiRoutes, r.tt, r.attractions) == 0.0);
    CHECK(inside_attraction("O", "A", "museums", r.tt, r.attractions) == 0.0);
    CHECK_THROWS_AS(inside_attraction("O", "D", "castles", r.tt, r.attractions), Error);
}

TEST_CASE("inside features match filter-and-sum on random instances") {
    SplitMix64 rng(6);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t n = 6;
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < n; ++i) ids.push_back("n" + std::to_string(i));
        NodeSet nodes(ids);
        TravelTimeMatrix tt(nodes);
        std::vector<std::vector<double>> plain(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) {
                    plain[i][j] = 1.0 + static_cast<double>(rng.below(10));
                    tt.set(i, j, plain[i][j]);
                }
        std::vector<std::array<double, 7>> counts(n);
        std::vector<std::vector<double>> by_kind(7, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t a = 0; a < 7; ++a) counts[i][a] = by_kind[a][i] = static_cast<double>(rng.below(5));
        const AttractionTable table(nodes, counts);
        for (std::size_t o = 0; o < n; ++o)
            for (std::size_t d = 0; d < n; ++d) {
                if (o == d) continue;
                const auto all = inside_attractions(o, d, tt, table);
                for (std::size_t a = 0; a < 7; ++a) CHECK(all[a] == oracle::inside(o, d, plain, by_kind[a]));
            }
    }
}

TEST_CASE("log policy") {
    const LogPolicy p{1.0};
    CHECK(p.zeroable(0.0) == 0.0);
    CHECK(p.zeroable(std::exp(2.0) - 1.0) == doctest::Approx(2.0));
    CHECK(LogPolicy::strict(std::exp(1.0), "x") == doctest::Approx(1.0));
    CHECK_THROWS_AS(LogPolicy::strict(0.0, "population"), Error);
    CHECK_THROWS_AS(LogPolicy{0.0}.zeroable(0.0), Error);
}

TEST_CASE("term roster") {
    const auto& names = gravity_term_names();
    REQUIRE(names.size() == 28);
    CHECK(names.front() == "origin_log_income");
    CHECK(names[10] == "destination_log_income");
    CHECK(names[20] == "log_travel_time");
    CHECK(names.back() == "log_inside_festivals");
    CHECK(parse_cluster_category("CulturalLake") == ClusterCategory::CulturalLake);
}

TEST_CASE("assembled columns match straight recomputation") {
    auto spec = SynthSpec::defaults();
    spec.node_count = 25;
    const auto region = generate_region(spec);
    const auto month = generate_month(spec, region, 6);
    const GravityContext ctx{region.nodes, region.municipalities, region.categories, region.travel_times,
                             region.attractions, LogPolicy{1.0}};
    const auto obs = assemble_gravity(month.tourists, month.visitor_centralities, ctx);
    REQUIRE(obs.size() == month.tourists.edge_count());
    for (const auto& o : obs) {
        const auto i = region.nodes.index_of(o.origin);
        const auto j = region.nodes.index_of(o.destination);
        const auto& ri = region.municipalities[i];
        const auto& rj = region.municipalities[j];
        const auto x = o.regressors();
        CHECK(o.log_flow == doctest::Approx(std::log(month.tourists.weight(i, j))));
        CHECK(x[0] == doctest::Approx(std::log(ri.income_pc)));
        CHECK(x[1] == doctest::Approx(std::log(ri.population)));
        CHECK(x[11] == doctest::Approx(std::log(rj.population)));
        for (std::size_t m = 0; m < 6; ++m) {
            CHECK(x[2 + m] == doctest::Approx(std::log(month.visitor_centralities[m].values[i] + 1.0)));
            CHECK(x[12 + m] == doctest::Approx(std::log(month.visitor_centralities[m].values[j] + 1.0)));
        }
        const auto ci = region.categories.at(o.origin);
        CHECK(x[8] == (ci == ClusterCategory::CulturalLake ? 1.0 : 0.0));
        CHECK(x[9] == (ci == ClusterCategory::Mountain ? 1.0 : 0.0));
        CHECK(x[20] == doctest::Approx(std::log(region.travel_times.at(i, j))));
        std::vector<std::vector<double>> plain(region.nodes.size(), std::vector<double>(region.nodes.size()));
        for (std::size_t a = 0; a < plain.size(); ++a)
            for (std::size_t b = 0; b < plain.size(); ++b) plain[a][b] = region.travel_times.at(a, b);
        std::vector<double> museums;
        for (const auto& r : region.municipalities) museums.push_back(r.attractions[0]);
        CHECK(x[21] == doctest::Approx(std::log(oracle::inside(i, j, plain, museums) + 1.0)));
        break;
    }
}

TEST_CASE("single positive flow gives one observation") {
    auto spec = SynthSpec::defaults();
    spec.node_count = 12;
    const auto region = generate_region(spec);
    const auto month = generate_month(spec, region, 1);
    FlowNetwork one(region.nodes, Behaviour::Tourists, Period::month(1));
    one.add_flow(0, 5, 17);
    const GravityContext ctx{region.nodes, region.municipalities, region.categories, region.travel_times,
                             region.attractions, LogPolicy{1.0}};
    CHECK(assemble_gravity(one, month.visitor_centralities, ctx).size() == 1);

    std::map<std::string, ClusterCategory> no_clusters;
    const GravityContext bad{region.nodes, region.municipalities, no_clusters, region.travel_times,
                             region.attractions, LogPolicy{1.0}};
    try {
        assemble_gravity(one, month.visitor_centralities, bad);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("cluster") != std::string::npos);
        CHECK(std::string(e.what()).find(region.nodes.id(0)) != std::string::npos);
    }
}

TEST_CASE("noiseless flows are recovered exactly and doubling shifts the intercept") {
    auto spec = SynthSpec::defaults();
    spec.noise_sigma = 0.0;
    spec.round_flows = false;
    const auto region = generate_region(spec);
    const auto month = generate_month(spec, region, 4);
    const GravityContext ctx{region.nodes, region.municipalities, region.categories, region.travel_times,
                             region.attractions, LogPolicy{spec.log_offset}};
    const auto obs = assemble_gravity(month.tourists, month.visitor_centralities, ctx);
    const auto fit = fit_gravity(obs, Period::month(4));
    const auto truth = spec.tourist_truth(4);
    for (const auto& t : fit.terms) CHECK(std::abs(t.estimate - truth.at(t.name)) <= 1e-8);

    const auto doubled = assemble_gravity(month.tourists.scaled(2.0), month.visitor_centralities, ctx);
    const auto fit2 = fit_gravity(doubled, Period::month(4));
    CHECK(fit2.terms[0].estimate - fit.terms[0].estimate == doctest::Approx(std::log(2.0)).epsilon(1e-9));
    for (std::size_t j = 1; j < fit.terms.size(); ++j)
        CHECK(std::abs(fit2.terms[j].estimate - fit.terms[j].estimate) <= 1e-9);

    CHECK_THROWS_AS(fit_gravity(obs, Period::month(5)), Error);
    std::ostringstream out;
    write_gravity_long_csv(out, Period::month(4), fit, true);
    CHECK(out.str().rfind("period,term,estimate,ci_low,ci_high,stars\n04,(Intercept),", 0) == 0);
}
