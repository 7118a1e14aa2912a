#include <doctest.h>

#include "odflow/digest.hpp"
#include "odflow/ingest.hpp"
#include "odflow/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace odflow;
namespace fs = std::filesystem;

namespace {

fs::path bundle(const std::string& name, std::size_t nodes = 30) {
    const auto dir = fs::temp_directory_path() / ("odflow_pipeline_" + name);
    fs::remove_all(dir);
    auto spec = SynthSpec::defaults();
    spec.node_count = nodes;
    const auto r = run_synth(spec, dir / "in");
    REQUIRE(r.exit_code == kExitOk);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

bool mentions(const CommandResult& r, const std::string& needle) {
    for (const auto& m : r.messages)
        if (m.find(needle) != std::string::npos) return true;
    return false;
}

} // namespace

TEST_CASE("month parsing") {
    CHECK(parse_months("all").size() == 12);
    CHECK(parse_months("1-3,7") == std::vector<int>{1, 2, 3, 7});
    CHECK(parse_months("7,3,3") == std::vector<int>{3, 7});
    CHECK_THROWS_AS(parse_months("0"), ConfigError);
    CHECK_THROWS_AS(parse_months("5-2"), ConfigError);
    CHECK_THROWS_AS(parse_months(""), ConfigError);
}

TEST_CASE("configuration files") {
    std::istringstream in("# comment\nflows = data/f.csv\nmin_correlation=0.7\ncluster_methods = ward,kmeans\n");
    const auto c = RunConfig::parse(in, "c.conf", "/base");
    CHECK(c.flows == fs::path("/base/data/f.csv"));
    CHECK(c.min_correlation == 0.7);
    CHECK(c.cluster_methods.size() == 2);
    std::istringstream bad("flows\n");
    CHECK_THROWS_AS(RunConfig::parse(bad, "c.conf", "/"), ConfigError);
    std::istringstream unknown("colour = red\n");
    CHECK_THROWS_AS(RunConfig::parse(unknown, "c.conf", "/"), ConfigError);
    RunConfig range;
    range.k_min = 5;
    range.k_max = 3;
    CHECK_THROWS_AS(range.validate(), ConfigError);
}

TEST_CASE("validate accepts a fresh synthetic bundle") {
    const auto dir = bundle("validate");
    auto config = RunConfig::load(dir / "in/odflow.conf");
    config.output = dir / "out";
    const auto r = run_command("validate", config);
    CHECK(r.exit_code == kExitOk);
    CHECK(fs::exists(dir / "out/validation.json"));
    CHECK(fs::exists(dir / "out/manifest_validate.json"));
    CHECK_FALSE(fs::exists(dir / "out/.staging-validate"));
    CHECK(mentions(r, "coverage = 1"));
    fs::remove_all(dir);
}

TEST_CASE("a single month gives a single gravity table") {
    const auto dir = bundle("months");
    auto config = RunConfig::load(dir / "in/odflow.conf");
    config.output = dir / "out";
    config.months = {3};
    const auto r = run_command("gravity", config);
    REQUIRE(r.exit_code == kExitOk);
    std::size_t tables = 0;
    for (const auto& e : fs::directory_iterator(dir / "out")) {
        const auto name = e.path().filename().string();
        if (name.rfind("gravity_", 0) == 0 && name != "gravity_coefficients.csv" && name != "gravity_models.json")
            ++tables;
    }
    CHECK(tables == 1);
    CHECK(fs::exists(dir / "out/gravity_03.csv"));
    CHECK_FALSE(fs::exists(dir / "out/gravity_year.csv"));
    fs::remove_all(dir);
}

TEST_CASE("reruns are byte-identical") {
    const auto dir = bundle("rerun");
    auto config = RunConfig::load(dir / "in/odflow.conf");
    std::map<std::string, std::string> digests[2];
    for (int run = 0; run < 2; ++run) {
        config.output = dir / ("out" + std::to_string(run));
        const auto r = run_command("report", config);
        REQUIRE(r.exit_code == kExitOk);
        for (const auto& e : fs::directory_iterator(config.output))
            digests[run][e.path().filename().string()] = sha256_file(e.path());
    }
    CHECK(digests[0].size() > 10);
    CHECK(digests[0] == digests[1]);
    fs::remove_all(dir);
}

TEST_CASE("a corrupted numeric cell is a schema error with a line number") {
    const auto dir = bundle("corrupt");
    const auto flows = dir / "in/flows.csv";
    auto text = slurp(flows);
    const auto third = text.find('\n', text.find('\n', text.find('\n') + 1) + 1) + 1;
    const auto last_comma = text.rfind(',', text.find('\n', third));
    text.replace(last_comma + 1, text.find('\n', third) - last_comma - 1, "12x");
    spit(flows, text);
    auto config = RunConfig::load(dir / "in/odflow.conf");
    config.output = dir / "out";
    const auto r = run_command("validate", config);
    CHECK(r.exit_code == kExitSchemaError);
    CHECK(mentions(r, "flows.csv:4:"));
    CHECK(mentions(r, "12x"));
    CHECK_FALSE(fs::exists(dir / "out/validation.json"));
    fs::remove_all(dir);
}

TEST_CASE("known coverage is reported and thresholds decide the exit code") {
    const auto dir = bundle("coverage");
    auto config = RunConfig::load(dir / "in/odflow.conf");
    const auto load = load_reference_presences(config.reference_presences);
    auto doubled = load.by_year.at(config.reference_year);
    for (auto& [id, v] : doubled) v *= 2.0;
    std::ofstream out(config.reference_presences, std::ios::binary);
    write_reference_presences_csv(out, config.reference_year, doubled);
    out.close();

    config.output = dir / "out";
    const auto r = run_command("validate", config);
    CHECK(r.exit_code == kExitOk);
    CHECK(mentions(r, "coverage = 0.5,"));

    config.min_coverage = 0.6;
    const auto strict = run_command("validate", config);
    CHECK(strict.exit_code == kExitReferenceMismatch);
    CHECK(fs::exists(dir / "out/validation.json"));
    const auto report = run_command("report", config);
    CHECK(report.exit_code == kExitReferenceMismatch);
    CHECK_FALSE(fs::exists(dir / "out/centrality.csv"));
    fs::remove_all(dir);
}

TEST_CASE("parallel map keeps index order and rethrows") {
    const auto squares = parallel_map<int>(20, 4, [](std::size_t i) { return static_cast<int>(i * i); });
    for (std::size_t i = 0; i < 20; ++i) CHECK(squares[i] == static_cast<int>(i * i));
    CHECK_THROWS_WITH(parallel_map<int>(10, 3,
                                        [](std::size_t i) -> int {
                                            if (i >= 4) throw std::runtime_error("at " + std::to_string(i));
                                            return 0;
                                        }),
                      "at 4");
}
