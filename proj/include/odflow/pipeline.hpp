#pragma once

#include "odflow/centrality.hpp"
#include "odflow/clustering.hpp"
#include "odflow/error.hpp"
#include "odflow/synth.hpp"

#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <istream>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace odflow {

inline constexpr std::string_view kVersion = "1.0.0";
/// Environment variable naming the default configuration file.
inline constexpr const char* kConfigEnv = "ODFLOW_CONFIG";

enum ExitCode : int { kExitOk = 0, kExitModuleError = 1, kExitSchemaError = 2, kExitReferenceMismatch = 3 };

/// Bad configuration or unusable input files (exit code 2).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("config", message) {}
};

/// Reference check below the configured thresholds (exit code 3).
class ReferenceMismatch : public Error {
public:
    explicit ReferenceMismatch(const std::string& message) : Error("ingest", message) {}
};

struct RunConfig {
    std::filesystem::path flows;
    std::filesystem::path municipalities;
    std::filesystem::path travel_times;
    std::filesystem::path reference_presences;
    std::filesystem::path reference_classes;
    std::filesystem::path cluster_categories; ///< id,category; derived by clustering when empty
    int reference_year = 2022;
    double min_correlation = 0.8;
    double min_coverage = 0.5;

    WeightMap weight_map = WeightMap::InverseWeight;
    double log_offset = 1.0;
    double hits_tolerance = 1e-10;
    std::size_t hits_max_iterations = 10000;
    std::size_t min_delta_observations = 12;

    std::vector<ClusterMethod> cluster_methods{std::begin(kAllClusterMethods), std::end(kAllClusterMethods)};
    std::size_t k_min = 2;
    std::size_t k_max = 8;
    std::uint64_t cluster_seed = 42;
    bool merge_cultural_lake = true;

    std::vector<int> months{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    std::filesystem::path output = "odflow_out";
    std::size_t threads = 1;

    /// Applies one key=value setting. Relative paths resolve against `base`.
    void set(const std::string& key, const std::string& value, const std::filesystem::path& base = {});
    /// Throws ConfigError when an option is out of range.
    void validate() const;
    /// Every option except `output`, one key=value per line.
    std::string to_config() const;
    bool all_months() const;

    static RunConfig parse(std::istream& in, const std::string& source, const std::filesystem::path& base);
    static RunConfig load(const std::filesystem::path& path);
};

/// "all", or comma-separated months and ranges such as "1-3,7".
std::vector<int> parse_months(std::string_view text);

struct CommandResult {
    int exit_code = kExitOk;
    std::vector<std::string> messages;          ///< human-readable report lines
    std::vector<std::filesystem::path> outputs; ///< files written, manifest last
};

CommandResult run_validate(const RunConfig& config);
CommandResult run_centrality(const RunConfig& config);
CommandResult run_delta(const RunConfig& config);
CommandResult run_gravity(const RunConfig& config);
CommandResult run_cluster(const RunConfig& config);
/// validate, centrality, delta, cluster and gravity in one run.
CommandResult run_report(const RunConfig& config);
CommandResult run_synth(const SynthSpec& spec, const std::filesystem::path& output);

/// Dispatches by subcommand name and maps exceptions to exit codes:
/// ConfigError and IngestError give 2, ReferenceMismatch 3, any other Error 1.
CommandResult run_command(std::string_view command, const RunConfig& config);

/// Applies `fn` to 0..count-1 on up to `threads` workers. Results keep index
/// order; the exception of the lowest failing index is rethrown.
template <class R>
std::vector<R> parallel_map(std::size_t count, std::size_t threads, const std::function<R(std::size_t)>& fn) {
    std::vector<std::optional<R>> slots(count);
    std::vector<std::exception_ptr> errors(count);
    std::size_t next = 0;
    std::mutex mutex;
    auto worker = [&] {
        while (true) {
            std::size_t i;
            {
                std::lock_guard lock(mutex);
                if (next == count) return;
                i = next++;
            }
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min(threads, count));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<R> out;
    out.reserve(count);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

} // namespace odflow
