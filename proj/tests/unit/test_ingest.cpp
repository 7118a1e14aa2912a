#include <doctest.h>

#include "odflow/csv.hpp"
#include "odflow/ingest.hpp"
#include "odflow/synth.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

using namespace odflow;

namespace {

NodeSet abc() { return NodeSet({"A", "B", "C"}); }

FlowLoad flows_from(const std::string& text) {
    std::istringstream in(text);
    return parse_flows(in, "flows.csv", abc());
}

} // namespace

TEST_CASE("bundled municipality list has 162 names") {
    const auto ids = load_municipality_ids(std::filesystem::path(ODFLOW_SOURCE_DIR) / "data/table_a1_municipalities.csv");
    CHECK(ids.size() == 162);
    CHECK(ids.id(0) == "A001");
    CHECK(ids.id(161) == "A162");
}

TEST_CASE("empty flow files") {
    for (const std::string text : {"", "month,origin_id,destination_id,behaviour,count\n"}) {
        const auto load = flows_from(text);
        CHECK(load.networks.size() == 24);
        for (const auto& n : load.networks) CHECK(n.edge_count() == 0);
        REQUIRE(load.warnings.size() == 1);
        CHECK(load.warnings[0].find("empty flow file") != std::string::npos);
        CHECK(load.at(Behaviour::Visitors, 12).period() == Period::month(12));
    }
}

TEST_CASE("rejected rows carry their line numbers") {
    const auto load = flows_from("month,origin_id,destination_id,behaviour,count\n"
                                 "1,A,B,tourists,5\n"
                                 "1,A,B,tourists,7\n"
                                 "13,A,B,tourists,1\n"
                                 "2,A,A,tourists,1\n"
                                 "2,A,Z,visitors,1\n"
                                 "2,A,B,visitors,-1\n"
                                 "2,A,B,visitors,x\n"
                                 "2,A,B,hikers,1\n"
                                 "3,B,C,visitors,0\n"
                                 "3,B,C,visitors,0\n");
    REQUIRE(load.rejected.size() == 8);
    CHECK(load.rejected[0].line == 3);
    CHECK(load.rejected[0].message.find("duplicate") != std::string::npos);
    CHECK(load.rejected[0].to_string().rfind("flows.csv:3: ", 0) == 0);
    CHECK(load.rejected[1].line == 4);
    CHECK(load.rejected[2].line == 5);
    CHECK(load.rejected[3].message.find("'Z'") != std::string::npos);
    CHECK(load.rejected[7].line == 11);
    CHECK(load.accepted_rows == 2);
    CHECK(load.accepted_total == 5.0);
    CHECK(load.at(Behaviour::Tourists, 1).weight(0, 1) == 5.0);
    CHECK(load.at(Behaviour::Visitors, 3).edge_count() == 0);

    std::istringstream bad("month,origin,destination,behaviour,count\n");
    CHECK_THROWS_AS(parse_flows(bad, "flows.csv", abc()), IngestError);
}

TEST_CASE("shuffled rows give identical networks and no mass is lost") {
    auto spec = SynthSpec::defaults();
    spec.node_count = 20;
    const auto region = generate_region(spec);
    const auto networks = generate_flows(spec, region);
    std::ostringstream out;
    write_flows_csv(out, networks);
    const auto text = out.str();

    std::istringstream in(text);
    const auto load = parse_flows(in, "a", region.nodes);
    CHECK(load.rejected.empty());

    std::vector<std::string> lines;
    std::istringstream split(text);
    std::string line;
    std::getline(split, line);
    const auto header = line;
    while (std::getline(split, line)) lines.push_back(line);
    std::mt19937 gen(5);
    std::shuffle(lines.begin(), lines.end(), gen);
    std::string shuffled = header + "\n";
    for (const auto& l : lines) shuffled += l + "\n";
    std::istringstream in2(shuffled);
    const auto load2 = parse_flows(in2, "b", region.nodes);

    double expected = 0.0;
    for (std::size_t i = 0; i < 24; ++i) {
        CHECK(load.networks[i].edges() == networks[i].edges());
        CHECK(load2.networks[i].edges() == networks[i].edges());
        expected += networks[i].total_weight();
    }
    CHECK(load.accepted_total == expected);
    CHECK(load2.accepted_total == expected);
}

TEST_CASE("municipality records round-trip and reject bad rows") {
    auto spec = SynthSpec::defaults();
    spec.node_count = 8;
    const auto region = generate_region(spec);
    std::ostringstream out;
    write_municipalities_csv(out, region.municipalities);
    std::istringstream in(out.str());
    const auto load = parse_municipalities(in, "m.csv");
    CHECK(load.rejected.empty());
    REQUIRE(load.records.size() == 8);
    CHECK(load.records[3].population == region.municipalities[3].population);
    CHECK(load.records[3].cluster_variables == region.municipalities[3].cluster_variables);
    CHECK(load.ids() == region.nodes);

    auto text = out.str();
    const auto second_line = text.find('\n', text.find('\n') + 1) + 1;
    const auto comma = text.find(',', text.find(',', second_line) + 1);
    text.replace(comma + 1, text.find(',', comma + 1) - comma - 1, "abc");
    std::istringstream broken(text);
    const auto bad = parse_municipalities(broken, "m.csv");
    REQUIRE(bad.rejected.size() == 1);
    CHECK(bad.rejected[0].line == 3);
    CHECK(bad.rejected[0].message.find("population") != std::string::npos);
}

TEST_CASE("travel times") {
    std::istringstream in("origin_id,destination_id,minutes\nA,B,10\nB,A,12\nA,A,0\nA,C,0\nA,B,3\n");
    const auto load = parse_travel_times(in, "tt.csv", abc());
    CHECK(load.matrix.at("A", "B") == 10.0);
    CHECK(load.matrix.at("B", "A") == 12.0);
    REQUIRE(load.rejected.size() == 2);
    CHECK(load.rejected[0].line == 5);
    CHECK(load.rejected[1].line == 6);
    CHECK_FALSE(load.matrix.complete());
}

TEST_CASE("reference checks") {
    const std::map<std::string, double> ref{{"A", 10}, {"B", 30}, {"C", 20}, {"D", 40}};
    const auto self = validate_against_reference(ref, ref);
    CHECK(self.r == doctest::Approx(1.0));
    CHECK(self.coverage_ratio == doctest::Approx(1.0));
    CHECK(self.common == 4);

    const std::map<std::string, double> half{{"A", 5}, {"B", 15}, {"C", 10}, {"D", 20}};
    const auto h = validate_against_reference(half, ref);
    CHECK(h.coverage_ratio == doctest::Approx(0.5));
    CHECK(h.r == doctest::Approx(1.0));

    const std::map<std::string, double> subset{{"B", 30}, {"C", 20}, {"D", 40}, {"Z", 99}};
    const auto s = validate_against_reference(subset, ref);
    CHECK(s.common == 3);
    CHECK(s.coverage_ratio == doctest::Approx(0.9));

    const std::map<std::string, std::string> classes{
        {"a", "Cultural"}, {"b", "Lake"}, {"c", "Metropolies"}, {"d", "Mountain"}, {"e", "NotSpecific"}};
    const auto merged = remap_reference_classes(classes, true);
    CHECK(merged.at("a") == "CulturalLake");
    CHECK(merged.at("b") == "CulturalLake");
    CHECK(merged.at("c") == "NotSpecific");
    CHECK(merged.at("d") == "Mountain");
    CHECK(remap_reference_classes(classes, false).at("b") == "Lake");
}

TEST_CASE("monthly series sums each month") {
    const auto load = flows_from("month,origin_id,destination_id,behaviour,count\n"
                                 "1,A,B,tourists,5\n1,B,C,tourists,2\n7,A,C,visitors,4\n12,C,A,tourists,1\n");
    const auto series = monthly_series(load.networks);
    CHECK(series.tourists[0] == 7.0);
    CHECK(series.tourists[11] == 1.0);
    CHECK(series.visitors[6] == 4.0);
    CHECK(series.visitors[0] == 0.0);
}
