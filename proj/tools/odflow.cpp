#include "odflow/keyvalue.hpp"
#include "odflow/pipeline.hpp"
#include "odflow/synth.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct RunFlags {
    std::string config;
    std::vector<std::string> sets;
    std::string out;
    std::string months;
    std::optional<std::size_t> threads;
};

struct SynthFlags {
    std::string spec;
    std::vector<std::string> sets;
    std::optional<std::size_t> nodes;
    std::optional<std::uint64_t> seed;
    std::string out;
};

odflow::RunConfig build_config(const RunFlags& flags) {
    std::string path = flags.config;
    if (path.empty())
        if (const char* env = std::getenv(odflow::kConfigEnv)) path = env;
    if (path.empty())
        throw odflow::ConfigError(std::string("no configuration: pass --config or set ") + odflow::kConfigEnv);
    auto config = odflow::RunConfig::load(path);
    const auto cwd = std::filesystem::current_path();
    for (const auto& s : flags.sets) {
        const auto kv = odflow::split_assignment(s, "config");
        config.set(kv.key, kv.value, cwd);
    }
    if (!flags.out.empty()) config.set("output", flags.out, cwd);
    if (!flags.months.empty()) config.set("months", flags.months);
    if (flags.threads) config.threads = *flags.threads;
    return config;
}

odflow::SynthSpec build_spec(const SynthFlags& flags) {
    auto spec = flags.spec.empty() ? odflow::SynthSpec::defaults() : odflow::SynthSpec::load(flags.spec);
    for (const auto& s : flags.sets) {
        const auto kv = odflow::split_assignment(s, "synth");
        spec.set(kv.key, kv.value);
    }
    if (flags.nodes) spec.node_count = *flags.nodes;
    if (flags.seed) spec.seed = *flags.seed;
    spec.validate();
    return spec;
}

int report(const odflow::CommandResult& result) {
    auto& stream = result.exit_code == odflow::kExitOk || result.exit_code == odflow::kExitReferenceMismatch
                       ? std::cout
                       : std::cerr;
    for (const auto& m : result.messages) stream << m << '\n';
    for (const auto& p : result.outputs) std::cout << "wrote " << p.string() << '\n';
    return result.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Origin-destination tourism flow analytics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(odflow::kVersion));

    RunFlags run;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"validate", "Check inputs and compare presences against the reference"},
        {"centrality", "Six centralities per month and behaviour"},
        {"delta", "Tourists-versus-visitors centrality delta regressions"},
        {"gravity", "Monthly and yearly gravity models of tourist flows"},
        {"cluster", "Socio-economic clustering grid and assignments"},
        {"report", "Full run: validate, centrality, delta, cluster, gravity"}};
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config,-c", run.config,
                        std::string("Configuration file (default: $") + odflow::kConfigEnv + ")");
        sub->add_option("--set", run.sets, "Override a configuration key, key=value");
        sub->add_option("--out,-o", run.out, "Output directory");
        sub->add_option("--months", run.months, "Months filter: all, or e.g. 1-3,7");
        sub->add_option("--threads", run.threads, "Parallelism cap");
    }

    SynthFlags synth;
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic input bundle");
    synth_cmd->add_option("--spec", synth.spec, "Synthetic spec file (key=value)");
    synth_cmd->add_option("--set", synth.sets, "Override a spec key, key=value");
    synth_cmd->add_option("--nodes", synth.nodes, "Number of municipalities");
    synth_cmd->add_option("--seed", synth.seed, "Random seed");
    synth_cmd->add_option("--out,-o", synth.out, "Bundle directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : odflow::kExitSchemaError;
    }

    try {
        if (synth_cmd->parsed()) return report(odflow::run_synth(build_spec(synth), synth.out));
        for (const auto* sub : app.get_subcommands())
            return report(odflow::run_command(sub->get_name(), build_config(run)));
    } catch (const odflow::Error& e) {
        std::cerr << e.what() << '\n';
        return e.module() == "config" || e.module() == "synth" ? odflow::kExitSchemaError : odflow::kExitModuleError;
    } catch (const std::exception& e) {
        std::cerr << "odflow: " << e.what() << '\n';
        return odflow::kExitModuleError;
    }
    return odflow::kExitModuleError;
}
