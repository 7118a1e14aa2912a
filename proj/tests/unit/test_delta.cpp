#include <doctest.h>

#include "odflow/delta.hpp"
#include "odflow/error.hpp"
#include "odflow/random.hpp"
#include "odflow/synth.hpp"

#include <sstream>

using namespace odflow;

namespace {

CentralityVector vec(Behaviour b, std::vector<double> values, Metric m = Metric::Instrength, int month = 1) {
    return {m, b, Period::month(month), NodeSet({"A", "B", "C"}), std::move(values)};
}

std::map<std::string, DeltaDrivers> drivers_for(std::span<const MunicipalityRecord> records) {
    std::map<std::string, DeltaDrivers> out;
    for (const auto& r : records) out.emplace(r.id, DeltaDrivers::from(r));
    return out;
}

} // namespace

TEST_CASE("delta of a single node") {
    const auto t = vec(Behaviour::Tourists, {10, 4, 0});
    const auto v = vec(Behaviour::Visitors, {5, 4, 3});
    CHECK(*delta_metric(t, v, "A") == doctest::Approx(0.5));
    CHECK(*delta_metric(t, v, "B") == 0.0);
    CHECK_FALSE(delta_metric(t, v, "C").has_value());
    CHECK_THROWS_AS(delta_metric(t, v, "Z"), Error);
    CHECK_THROWS_AS(delta_metric(t, vec(Behaviour::Visitors, {1, 1, 1}, Metric::Betweenness), "A"), Error);
    CHECK_THROWS_AS(delta_metric(t, vec(Behaviour::Visitors, {1, 1, 1}, Metric::Instrength, 2), "A"), Error);
}

TEST_CASE("drivers follow the documented column order") {
    MunicipalityRecord r;
    r.income_pc = 20000;
    r.accommodation_beds = 0.7;
    r.book_shops = 2e-4;
    r.dummies = {1, 0, 1, 0, 1, 0, 1};
    const auto row = DeltaDrivers::from(r).row();
    CHECK(row[0] == 20000);
    CHECK(row[1] == 0.7);
    CHECK(row[2] == 1);
    CHECK(row[3] == 0);
    CHECK(row[4] == 2e-4);
    CHECK(row[5] == 1);
    CHECK(row[9] == 1);
    CHECK(kDeltaDriverNames.size() == 10);
}

TEST_CASE("fitted delta tables list ten drivers") {
    auto spec = SynthSpec::defaults();
    spec.node_count = 40;
    const auto region = generate_region(spec);
    const auto month = generate_month(spec, region, 5);
    const auto visitors = derive_visitors(month.tourists, region.municipalities, {}, 9);
    const auto obs = build_delta_observations(instrength(month.tourists), instrength(visitors),
                                              drivers_for(region.municipalities));
    const auto r = fit_delta_model(obs, Metric::Instrength, 5);
    REQUIRE(r.terms.size() == 11);
    for (std::size_t j = 0; j < 10; ++j) CHECK(r.terms[j + 1].name == kDeltaDriverNames[j]);
    CHECK(r.term("accommodation_beds").estimate > 0.0);

    std::ostringstream out;
    write_delta_long_csv(out, Metric::Instrength, 5, r, true);
    CHECK(out.str().rfind("metric,month,term,estimate,ci_low,ci_high,p_value,stars\n", 0) == 0);
    CHECK(out.str().find("instrength,5,accommodation_beds,") != std::string::npos);
}

TEST_CASE("zero deltas give zero coefficients") {
    auto spec = SynthSpec::defaults();
    spec.node_count = 30;
    const auto region = generate_region(spec);
    const auto month = generate_month(spec, region, 2);
    auto t = instrength(month.tourists);
    auto v = t;
    v.behaviour = Behaviour::Visitors;
    const auto obs = build_delta_observations(t, v, drivers_for(region.municipalities));
    const auto r = fit_delta_model(obs, Metric::Instrength, 2);
    for (const auto& term : r.terms) CHECK(std::abs(term.estimate) < 1e-12);
}

TEST_CASE("delta fits need enough observations and a matching slice") {
    auto spec = SynthSpec::defaults();
    spec.node_count = 30;
    const auto region = generate_region(spec);
    const auto month = generate_month(spec, region, 3);
    const auto visitors = derive_visitors(month.tourists, region.municipalities, {}, 1);
    const auto obs = build_delta_observations(instrength(month.tourists), instrength(visitors),
                                              drivers_for(region.municipalities));
    CHECK_THROWS_AS(fit_delta_model(obs, Metric::Instrength, 3, 1000), Error);
    CHECK_THROWS_AS(fit_delta_model(obs, Metric::Betweenness, 3), Error);
    const auto trajectory = fit_delta_trajectory(obs, Metric::Instrength);
    REQUIRE(trajectory.size() == 1);
    CHECK(trajectory[0].first == 3);

    std::map<std::string, DeltaDrivers> missing;
    CHECK_THROWS_AS(build_delta_observations(instrength(month.tourists), instrength(visitors), missing), Error);
}
