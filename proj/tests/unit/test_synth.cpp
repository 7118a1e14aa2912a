#include <doctest.h>

#include "odflow/digest.hpp"
#include "odflow/error.hpp"
#include "odflow/gravity.hpp"
#include "odflow/synth.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace odflow;

namespace {

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("odflow_synth_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

RegressionResult fit_month(const SynthSpec& spec, const SynthRegion& region, int m) {
    const auto month = generate_month(spec, region, m);
    const GravityContext ctx{region.nodes, region.municipalities, region.categories, region.travel_times,
                             region.attractions, LogPolicy{spec.log_offset}};
    return fit_gravity(assemble_gravity(month.tourists, month.visitor_centralities, ctx), Period::month(m));
}

} // namespace

TEST_CASE("spec text round-trips") {
    auto spec = SynthSpec::defaults();
    spec.set("nodes", "37");
    spec.set("gravity.log_travel_time", "-1.25");
    spec.set("range.population", "100:2000");
    spec.set("blobs.counts", "10,12,15");
    std::istringstream in(spec.to_config());
    const auto back = SynthSpec::parse(in, "x");
    CHECK(back.node_count == 37);
    CHECK(back.gravity_coefficients.at("log_travel_time") == -1.25);
    CHECK(back.to_config() == spec.to_config());
    CHECK_THROWS_AS(spec.set("colour", "blue"), Error);
    CHECK_THROWS_AS(spec.set("gravity.unknown_term", "1"), Error);
    spec.set("nodes", "1");
    CHECK_THROWS_AS(spec.validate(), Error);
    CHECK(SynthSpec::defaults().gravity_coefficients.size() == gravity_term_names().size() + 1);
}

TEST_CASE("a fixed seed reproduces the bundle byte for byte") {
    auto spec = SynthSpec::defaults();
    spec.node_count = 30;
    std::vector<std::string> digests[2];
    const auto base = scratch("determinism");
    for (int run = 0; run < 2; ++run) {
        const auto dir = base / std::to_string(run);
        const auto region = generate_region(spec);
        write_bundle(dir, spec, region, generate_flows(spec, region));
        for (const auto* name : {"municipalities.csv", "flows.csv", "travel_times.csv", "reference_presences.csv",
                                 "reference_classes.csv", "synth.conf", "odflow.conf"})
            digests[run].push_back(sha256_file(dir / name));
    }
    CHECK(digests[0] == digests[1]);
    spec.seed = 2;
    const auto other = generate_region(spec);
    CHECK(other.municipalities[0].population != generate_region(SynthSpec::defaults()).municipalities[0].population);
    std::filesystem::remove_all(base);
}

TEST_CASE("default region shape") {
    const auto spec = SynthSpec::defaults();
    const auto region = generate_region(spec);
    CHECK(region.municipalities.size() == 163);
    CHECK(region.nodes.id(0) == "M001");
    CHECK(region.nodes.id(162) == "M163");
    CHECK(region.travel_times.complete());
    CHECK(region.travel_times.symmetric());
    const auto n = region.nodes.size();
    std::size_t violations = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                if (region.travel_times.at(i, j) > region.travel_times.at(i, k) + region.travel_times.at(k, j) + 1e-9)
                    ++violations;
    CHECK(violations == 0);
    for (const auto& r : region.municipalities)
        for (std::size_t a = 0; a < 7; ++a) CHECK(r.attractions[a] == std::floor(r.attractions[a]));
}

TEST_CASE("bundle honours the node count") {
    auto spec = SynthSpec::defaults();
    spec.node_count = 10;
    const auto dir = scratch("ten");
    const auto region = generate_region(spec);
    write_bundle(dir, spec, region, generate_flows(spec, region));
    std::ifstream in(dir / "municipalities.csv");
    std::string line;
    std::size_t rows = 0;
    std::getline(in, line);
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 10);
    std::filesystem::remove_all(dir);
}

TEST_CASE("zero coefficients without noise give unit flows") {
    auto spec = SynthSpec::defaults();
    spec.node_count = 20;
    spec.noise_sigma = 0.0;
    spec.seasonal_amplitude = 0.0;
    for (auto& [k, v] : spec.gravity_coefficients) v = 0.0;
    const auto region = generate_region(spec);
    const auto month = generate_month(spec, region, 3);
    CHECK(month.tourists.edge_count() > 0);
    for (const auto& [key, w] : month.tourists.edges()) CHECK(w == 1.0);
}

TEST_CASE("generate_month equals the matching slice of generate_flows") {
    auto spec = SynthSpec::defaults();
    spec.node_count = 25;
    const auto region = generate_region(spec);
    const auto all = generate_flows(spec, region);
    REQUIRE(all.size() == 24);
    const auto may = generate_month(spec, region, 5);
    CHECK(all[4].edges() == may.tourists.edges());
    CHECK(all[16].edges() == may.visitors.edges());
    CHECK(all[16].behaviour() == Behaviour::Visitors);
    CHECK_FALSE(all[4].edges() == all[16].edges());
}

TEST_CASE("rounding barely moves the log-log slopes") {
    auto spec = SynthSpec::defaults();
    const auto region = generate_region(spec);
    auto exact = spec;
    exact.round_flows = false;
    for (int m : {1, 7}) {
        const auto rounded = fit_month(spec, region, m);
        const auto smooth = fit_month(exact, region, m);
        for (std::size_t j = 1; j < rounded.terms.size(); ++j) {
            const auto& name = rounded.terms[j].name;
            if (name.find("cluster") != std::string::npos) continue;
            CHECK_MESSAGE(std::abs(rounded.terms[j].estimate - smooth.terms[j].estimate) <= 0.05, name);
        }
    }
}

TEST_CASE("derived visitors follow the delta scenario") {
    auto spec = SynthSpec::defaults();
    spec.node_count = 40;
    const auto region = generate_region(spec);
    const auto month = generate_month(spec, region, 8);
    const DeltaScenario noiseless{0.1, 0.3, 0.0};
    const auto visitors = derive_visitors(month.tourists, region.municipalities, noiseless, 4);
    CHECK(visitors.behaviour() == Behaviour::Visitors);
    for (const auto& [key, w] : visitors.edges()) {
        const double y = 0.1 + 0.3 * region.municipalities[key.second].accommodation_beds;
        CHECK(w == doctest::Approx(month.tourists.weight(key.first, key.second) * (1.0 - y)));
    }
    const auto yearly = yearly_presences(generate_flows(spec, region));
    CHECK(yearly.size() == 40);
}
