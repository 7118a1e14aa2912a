#include "odflow/pipeline.hpp"

#include "odflow/csv.hpp"
#include "odflow/delta.hpp"
#include "odflow/digest.hpp"
#include "odflow/gravity.hpp"
#include "odflow/ingest.hpp"
#include "odflow/keyvalue.hpp"
#include "odflow/stats.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <set>
#include <sstream>

namespace odflow {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::array<std::string, 3> kCategoryNames = {"NotSpecific", "CulturalLake", "Mountain"};

double config_number(const std::string& key, const std::string& value) {
    const auto v = csv::parse_double(value);
    if (!v) throw ConfigError(fmt::format("'{}' expects a number, got '{}'", key, value));
    return *v;
}

long long config_integer(const std::string& key, const std::string& value) {
    const auto v = csv::parse_integer(value);
    if (!v) throw ConfigError(fmt::format("'{}' expects an integer, got '{}'", key, value));
    return *v;
}

std::size_t config_count(const std::string& key, const std::string& value) {
    const auto v = config_integer(key, value);
    if (v < 0) throw ConfigError(fmt::format("'{}' must be non-negative, got {}", key, v));
    return static_cast<std::size_t>(v);
}

fs::path resolve(const std::string& value, const fs::path& base) {
    if (value.empty()) return {};
    fs::path p(value);
    if (p.is_relative() && !base.empty()) p = base / p;
    return p.lexically_normal();
}

std::string two_digits(int month) { return fmt::format("{:02}", month); }

// Output files collected in a staging directory and moved into place only on
// success.
class Stage {
public:
    Stage(fs::path final_dir, std::string_view command)
        : final_(std::move(final_dir)), dir_(final_ / fmt::format(".staging-{}", command)) {
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    Stage(const Stage&) = delete;
    Stage& operator=(const Stage&) = delete;
    ~Stage() {
        if (!committed_) {
            std::error_code ec;
            fs::remove_all(dir_, ec);
        }
    }

    const fs::path& dir() const noexcept { return dir_; }

    void write(const std::string& name, const std::string& content) {
        std::ofstream out(dir_ / name, std::ios::binary);
        out << content;
        if (!out) throw Error("cli", fmt::format("cannot write '{}'", (dir_ / name).string()));
    }

    std::vector<fs::path> commit(json manifest, std::string_view command) {
        std::vector<std::string> names;
        for (const auto& entry : fs::directory_iterator(dir_))
            if (entry.is_regular_file()) names.push_back(entry.path().filename().string());
        std::sort(names.begin(), names.end());
        json outputs = json::array();
        for (const auto& name : names) outputs.push_back({{"file", name}, {"sha256", sha256_file(dir_ / name)}});
        manifest["outputs"] = std::move(outputs);
        const auto manifest_name = fmt::format("manifest_{}.json", command);
        write(manifest_name, manifest.dump(2) + "\n");
        names.push_back(manifest_name);

        std::vector<fs::path> moved;
        for (const auto& name : names) {
            fs::rename(dir_ / name, final_ / name);
            moved.push_back(final_ / name);
        }
        fs::remove_all(dir_);
        committed_ = true;
        return moved;
    }

private:
    fs::path final_;
    fs::path dir_;
    bool committed_ = false;
};

void require_path(const fs::path& p, std::string_view key) {
    if (p.empty()) throw ConfigError(fmt::format("'{}' is not set", key));
    if (!fs::exists(p)) throw ConfigError(fmt::format("{} '{}' does not exist", key, p.string()));
}

void reject_if_any(const std::vector<Diagnostic>& rejected) {
    if (!rejected.empty()) throw IngestError(rejected);
}

struct Workspace {
    const RunConfig& config;
    Stage stage;
    CommandResult result;

    std::optional<MunicipalityLoad> municipalities;
    std::optional<FlowLoad> flows;
    std::optional<TravelTimeLoad> travel_times;
    std::map<std::pair<Behaviour, int>, std::vector<CentralityVector>> centralities;

    Workspace(const RunConfig& c, std::string_view command) : config(c), stage(c.output, command) {}

    const MunicipalityLoad& munis() {
        if (!municipalities) {
            require_path(config.municipalities, "municipalities");
            municipalities = load_municipalities(config.municipalities);
            reject_if_any(municipalities->rejected);
            if (municipalities->records.size() < 3) throw ConfigError("at least 3 municipalities are required");
        }
        return *municipalities;
    }

    const FlowLoad& flow_load() {
        if (!flows) {
            const auto universe = munis().ids();
            require_path(config.flows, "flows");
            flows = load_flows(config.flows, universe);
            reject_if_any(flows->rejected);
        }
        return *flows;
    }

    const TravelTimeLoad& travel() {
        if (!travel_times) {
            const auto universe = munis().ids();
            require_path(config.travel_times, "travel_times");
            travel_times = load_travel_times(config.travel_times, universe);
            reject_if_any(travel_times->rejected);
        }
        return *travel_times;
    }

    CentralityOptions centrality_options() const {
        CentralityOptions o;
        o.weight_map = config.weight_map;
        o.hits.tolerance = config.hits_tolerance;
        o.hits.max_iterations = config.hits_max_iterations;
        return o;
    }

    void ensure_centralities() {
        const auto& load = flow_load();
        std::vector<std::pair<Behaviour, int>> keys;
        for (auto b : kBehaviours)
            for (int m : config.months)
                if (!centralities.contains({b, m})) keys.emplace_back(b, m);
        const auto options = centrality_options();
        auto computed = parallel_map<std::vector<CentralityVector>>(
            keys.size(), config.threads, [&](std::size_t i) {
                return compute_centralities(load.at(keys[i].first, keys[i].second), options);
            });
        for (std::size_t i = 0; i < keys.size(); ++i) centralities.emplace(keys[i], std::move(computed[i]));
    }
};

json input_digests(const RunConfig& config) {
    json inputs = json::array();
    const std::pair<const char*, const fs::path*> paths[] = {
        {"flows", &config.flows},
        {"municipalities", &config.municipalities},
        {"travel_times", &config.travel_times},
        {"reference_presences", &config.reference_presences},
        {"reference_classes", &config.reference_classes},
        {"cluster_categories", &config.cluster_categories}};
    for (const auto& [key, path] : paths) {
        if (path->empty() || !fs::exists(*path)) continue;
        inputs.push_back({{"key", key}, {"path", path->generic_string()}, {"sha256", sha256_file(*path)}});
    }
    return inputs;
}

json base_manifest(std::string_view command, const std::string& config_text, json inputs) {
    return json{{"command", command}, {"version", kVersion}, {"config", config_text}, {"inputs", std::move(inputs)}};
}

bool do_validate(Workspace& ws) {
    const auto& config = ws.config;
    const auto& munis = ws.munis();
    const auto& flows = ws.flow_load();
    json report;
    report["municipalities"] = munis.records.size();
    report["flows"] = {{"accepted_rows", flows.accepted_rows},
                       {"accepted_total", flows.accepted_total},
                       {"warnings", flows.warnings}};
    const auto series = monthly_series(flows.networks);
    report["monthly_series"] = {{"tourists", series.tourists}, {"visitors", series.visitors}};
    ws.result.messages.push_back(fmt::format("municipalities: {}", munis.records.size()));
    ws.result.messages.push_back(
        fmt::format("flow rows: {} accepted, total {}", flows.accepted_rows, flows.accepted_total));
    for (const auto& w : flows.warnings) ws.result.messages.push_back(fmt::format("warning: {}", w));

    if (!config.travel_times.empty()) {
        const auto& tt = ws.travel().matrix;
        report["travel_times"] = {{"complete", tt.complete()}, {"symmetric", tt.symmetric()}};
    }
    if (!config.reference_classes.empty()) {
        require_path(config.reference_classes, "reference_classes");
        const auto classes = load_reference_classes(config.reference_classes);
        reject_if_any(classes.rejected);
        report["reference_classes"] = classes.classes.size();
    }

    bool passed = true;
    if (!config.reference_presences.empty()) {
        require_path(config.reference_presences, "reference_presences");
        const auto presences = load_reference_presences(config.reference_presences);
        reject_if_any(presences.rejected);
        const auto year = presences.by_year.find(config.reference_year);
        if (year == presences.by_year.end())
            throw ConfigError(fmt::format("reference_presences has no rows for year {}", config.reference_year));
        const auto check = validate_against_reference(yearly_presences(flows.networks), year->second);
        passed = check.r >= config.min_correlation && check.coverage_ratio >= config.min_coverage;
        report["reference"] = {{"year", config.reference_year},
                               {"r", check.r},
                               {"p_value", check.p_value},
                               {"coverage_ratio", check.coverage_ratio},
                               {"common", check.common},
                               {"min_correlation", config.min_correlation},
                               {"min_coverage", config.min_coverage},
                               {"passed", passed}};
        ws.result.messages.push_back(fmt::format("reference {}: r = {}, p = {}, coverage = {}, common ids = {}",
                                                 config.reference_year, check.r, check.p_value, check.coverage_ratio,
                                                 check.common));
    } else {
        report["reference"] = nullptr;
    }
    ws.stage.write("validation.json", report.dump(2) + "\n");
    if (!passed)
        ws.result.messages.push_back(fmt::format("reference check below thresholds (min_correlation {}, min_coverage {})",
                                                 config.min_correlation, config.min_coverage));
    return passed;
}

void do_centrality(Workspace& ws) {
    ws.ensure_centralities();
    std::ostringstream out;
    out << "node_id,metric,period,behaviour,value\n";
    for (auto b : kBehaviours)
        for (int m : ws.config.months) write_centrality_csv(out, ws.centralities.at({b, m}), false);
    ws.stage.write("centrality.csv", out.str());
    ws.result.messages.push_back(
        fmt::format("centrality: {} vectors", kAllMetrics.size() * 2 * ws.config.months.size()));
}

void do_delta(Workspace& ws) {
    ws.ensure_centralities();
    std::map<std::string, DeltaDrivers> drivers;
    for (const auto& r : ws.munis().records) drivers.emplace(r.id, DeltaDrivers::from(r));

    std::ostringstream coefficients;
    std::ostringstream tables;
    json models = json::array();
    bool header = true;
    std::size_t fitted = 0;
    for (auto metric : kDeltaMetrics) {
        const auto index = static_cast<std::size_t>(
            std::find(std::begin(kAllMetrics), std::end(kAllMetrics), metric) - std::begin(kAllMetrics));
        for (int m : ws.config.months) {
            const auto& tourist = ws.centralities.at({Behaviour::Tourists, m})[index];
            const auto& visitor = ws.centralities.at({Behaviour::Visitors, m})[index];
            const auto obs = build_delta_observations(tourist, visitor, drivers);
            RegressionResult result;
            try {
                result = fit_delta_model(obs, metric, m, ws.config.min_delta_observations);
            } catch (const Error& e) {
                // A slice that cannot be estimated is reported, not fatal.
                ws.result.messages.push_back(fmt::format("warning: skipped delta model {} month {}: {}",
                                                         to_string(metric), m, e.what()));
                models.push_back({{"metric", to_string(metric)}, {"month", m}, {"skipped", e.what()}});
                continue;
            }
            write_delta_long_csv(coefficients, metric, m, result, header);
            write_regression_csv(tables, fmt::format("{}_{}", to_string(metric), two_digits(m)), result, header);
            header = false;
            models.push_back({{"metric", to_string(metric)}, {"month", m}, {"model", to_json(result)}});
            ++fitted;
        }
    }
    ws.stage.write("delta_coefficients.csv", coefficients.str());
    ws.stage.write("delta_models.csv", tables.str());
    ws.stage.write("delta_models.json", models.dump(2) + "\n");
    ws.result.messages.push_back(fmt::format("delta: {} models fitted, {} skipped", fitted, models.size() - fitted));
}

FeatureFrame cluster_frame(const MunicipalityLoad& munis) {
    FeatureFrame frame;
    for (auto v : kClusterVariables) frame.columns.emplace_back(v);
    frame.values.resize(static_cast<Eigen::Index>(munis.records.size()), static_cast<Eigen::Index>(kClusterVariables.size()));
    for (std::size_t i = 0; i < munis.records.size(); ++i) {
        frame.ids.push_back(munis.records[i].id);
        for (std::size_t v = 0; v < kClusterVariables.size(); ++v)
            frame.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(v)) =
                munis.records[i].cluster_variables[v];
    }
    return standardize(frame);
}

std::optional<std::map<std::string, std::string>> reference_classes(Workspace& ws, bool merge) {
    if (ws.config.reference_classes.empty()) return std::nullopt;
    require_path(ws.config.reference_classes, "reference_classes");
    const auto load = load_reference_classes(ws.config.reference_classes);
    reject_if_any(load.rejected);
    const auto remapped = remap_reference_classes(load.classes, merge);
    std::map<std::string, std::string> out;
    for (const auto& r : ws.munis().records) {
        const auto it = remapped.find(r.id);
        if (it == remapped.end())
            throw Error("clustering", fmt::format("reference_classes has no class for '{}'", r.id));
        out.emplace(r.id, it->second);
    }
    return out;
}

// Ward with three groups named after the merged reference classes.
std::map<std::string, ClusterCategory> derive_categories(Workspace& ws, const FeatureFrame& frame) {
    const auto reference = reference_classes(ws, true);
    if (!reference)
        throw ConfigError("cluster categories need either 'cluster_categories' or 'reference_classes'");
    const auto solution = hierarchical(frame, ClusterMethod::Ward, kCategoryNames.size());
    const auto names = name_clusters(solution, *reference, kCategoryNames);
    std::map<std::string, ClusterCategory> out;
    for (std::size_t i = 0; i < solution.ids.size(); ++i)
        out.emplace(solution.ids[i], parse_cluster_category(names[static_cast<std::size_t>(solution.labels[i])]));
    return out;
}

std::string categories_csv(const std::vector<std::string>& order, const std::map<std::string, ClusterCategory>& cats) {
    std::string out = "id,category\n";
    for (const auto& id : order) out += fmt::format("{},{}\n", csv::escape(id), to_string(cats.at(id)));
    return out;
}

void do_cluster(Workspace& ws) {
    const auto& config = ws.config;
    const auto frame = cluster_frame(ws.munis());
    const auto n = frame.ids.size();
    std::vector<std::size_t> ks;
    for (std::size_t k = config.k_min; k <= config.k_max && k + 1 <= n; ++k) ks.push_back(k);
    if (ks.empty()) throw Error("clustering", fmt::format("no k in [{}, {}] fits {} municipalities", config.k_min, config.k_max, n));
    const auto reference = reference_classes(ws, config.merge_cultural_lake);
    SelectKOptions options;
    options.seed = config.cluster_seed;

    auto rows = parallel_map<std::vector<SelectKRow>>(config.cluster_methods.size(), config.threads, [&](std::size_t i) {
        const ClusterMethod method[] = {config.cluster_methods[i]};
        return select_k(frame, method, ks, reference ? &*reference : nullptr, options);
    });

    std::string grid = "method,k,silhouette,purity,selected\n";
    std::string assignments = "method,k,id,label\n";
    for (const auto& method_rows : rows) {
        for (const auto& r : method_rows) {
            grid += fmt::format("{},{},{},{},{}\n", to_string(r.method), r.k, r.silhouette,
                                r.purity ? fmt::format("{}", *r.purity) : std::string(), r.selected ? 1 : 0);
            if (!r.selected) continue;
            const auto solution = is_hierarchical(r.method) ? hierarchical(frame, r.method, r.k)
                                                            : kmeans(frame, r.k, options.seed, options.kmeans);
            for (std::size_t i = 0; i < solution.ids.size(); ++i)
                assignments += fmt::format("{},{},{},{}\n", to_string(r.method), r.k, csv::escape(solution.ids[i]),
                                           solution.labels[i]);
            ws.result.messages.push_back(
                fmt::format("cluster {}: k = {}, silhouette = {}", to_string(r.method), r.k, r.silhouette));
        }
    }
    ws.stage.write("cluster_grid.csv", grid);
    ws.stage.write("cluster_assignments.csv", assignments);
    if (!config.reference_classes.empty() && n > kCategoryNames.size())
        ws.stage.write("cluster_categories.csv", categories_csv(frame.ids, derive_categories(ws, frame)));
}

std::map<std::string, ClusterCategory> load_categories(const fs::path& path, const NodeSet& nodes) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(fmt::format("cannot open cluster_categories '{}'", path.string()));
    csv::Reader reader(in);
    csv::Row row;
    std::vector<Diagnostic> problems;
    if (!reader.next(row) || row.fields != std::vector<std::string>{"id", "category"})
        throw IngestError({{path.string(), 1, "header must be id,category"}});
    std::map<std::string, ClusterCategory> out;
    while (reader.next(row)) {
        if (row.fields.size() == 1 && row.fields[0].empty()) continue;
        try {
            if (row.fields.size() != 2) throw Error("ingest", "expected 2 fields");
            if (!nodes.contains(row.fields[0])) throw Error("ingest", fmt::format("unknown municipality id '{}'", row.fields[0]));
            if (!out.emplace(row.fields[0], parse_cluster_category(row.fields[1])).second)
                throw Error("ingest", fmt::format("duplicate id '{}'", row.fields[0]));
        } catch (const Error& e) {
            problems.push_back({path.string(), row.line, e.detail()});
        }
    }
    if (!problems.empty()) throw IngestError(std::move(problems));
    return out;
}

void do_gravity(Workspace& ws) {
    const auto& config = ws.config;
    const auto& munis = ws.munis();
    const auto nodes = munis.ids();
    const auto& tt = ws.travel().matrix;
    tt.require_complete();
    const auto& flows = ws.flow_load();
    const auto categories = config.cluster_categories.empty() ? derive_categories(ws, cluster_frame(munis))
                                                              : load_categories(config.cluster_categories, nodes);
    const auto attractions = AttractionTable::from_records(nodes, munis.records);
    const GravityContext context{nodes, munis.records, categories, tt, attractions, LogPolicy{config.log_offset}};

    std::vector<Period> periods;
    for (int m : config.months) periods.push_back(Period::month(m));
    if (config.all_months()) periods.push_back(Period::year());

    ws.ensure_centralities();
    const auto options = ws.centrality_options();
    auto results = parallel_map<RegressionResult>(periods.size(), config.threads, [&](std::size_t i) {
        const auto period = periods[i];
        if (!period.is_year()) {
            const int m = period.month_index();
            const auto obs = assemble_gravity(flows.at(Behaviour::Tourists, m),
                                              ws.centralities.at({Behaviour::Visitors, m}), context);
            return fit_gravity(obs, period);
        }
        const auto tourists = aggregate(flows.of(Behaviour::Tourists), period);
        const auto visitors = aggregate(flows.of(Behaviour::Visitors), period);
        const auto obs = assemble_gravity(tourists, compute_centralities(visitors, options), context);
        return fit_gravity(obs, period);
    });

    std::ostringstream coefficients;
    json models = json::array();
    for (std::size_t i = 0; i < periods.size(); ++i) {
        const auto label = periods[i].label();
        std::ostringstream table;
        write_regression_csv(table, label, results[i], true);
        ws.stage.write(fmt::format("gravity_{}.csv", label), table.str());
        write_gravity_long_csv(coefficients, periods[i], results[i], i == 0);
        models.push_back({{"period", label}, {"model", to_json(results[i])}});
    }
    ws.stage.write("gravity_coefficients.csv", coefficients.str());
    ws.stage.write("gravity_models.json", models.dump(2) + "\n");
    ws.result.messages.push_back(fmt::format("gravity: {} models", periods.size()));
}

CommandResult finish(Workspace& ws, std::string_view command) {
    const auto manifest = base_manifest(command, ws.config.to_config(), input_digests(ws.config));
    ws.result.outputs = ws.stage.commit(manifest, command);
    return std::move(ws.result);
}

template <class Steps>
CommandResult run_steps(const RunConfig& config, std::string_view command, Steps steps) {
    config.validate();
    fs::create_directories(config.output);
    Workspace ws(config, command);
    steps(ws);
    return finish(ws, command);
}

} // namespace

std::vector<int> parse_months(std::string_view text) {
    if (text == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    std::set<int> months;
    std::stringstream ss{std::string(text)};
    std::string part;
    auto month = [&](const std::string& s) {
        const auto v = csv::parse_integer(s);
        if (!v || *v < 1 || *v > 12) throw ConfigError(fmt::format("invalid month '{}'", s));
        return static_cast<int>(*v);
    };
    while (std::getline(ss, part, ',')) {
        const auto dash = part.find('-');
        if (dash == std::string::npos) {
            months.insert(month(part));
            continue;
        }
        const int lo = month(part.substr(0, dash));
        const int hi = month(part.substr(dash + 1));
        if (lo > hi) throw ConfigError(fmt::format("invalid month range '{}'", part));
        for (int m = lo; m <= hi; ++m) months.insert(m);
    }
    if (months.empty()) throw ConfigError("months filter is empty");
    return {months.begin(), months.end()};
}

void RunConfig::set(const std::string& key, const std::string& value, const fs::path& base) {
    if (key == "flows") {
        flows = resolve(value, base);
    } else if (key == "municipalities") {
        municipalities = resolve(value, base);
    } else if (key == "travel_times") {
        travel_times = resolve(value, base);
    } else if (key == "reference_presences") {
        reference_presences = resolve(value, base);
    } else if (key == "reference_classes") {
        reference_classes = resolve(value, base);
    } else if (key == "cluster_categories") {
        cluster_categories = resolve(value, base);
    } else if (key == "reference_year") {
        reference_year = static_cast<int>(config_integer(key, value));
    } else if (key == "min_correlation") {
        min_correlation = config_number(key, value);
    } else if (key == "min_coverage") {
        min_coverage = config_number(key, value);
    } else if (key == "weight_map") {
        try {
            weight_map = parse_weight_map(value);
        } catch (const Error&) {
            throw ConfigError(fmt::format("unknown weight_map '{}'", value));
        }
    } else if (key == "log_offset") {
        log_offset = config_number(key, value);
    } else if (key == "hits_tolerance") {
        hits_tolerance = config_number(key, value);
    } else if (key == "hits_max_iterations") {
        hits_max_iterations = config_count(key, value);
    } else if (key == "min_delta_observations") {
        min_delta_observations = config_count(key, value);
    } else if (key == "cluster_methods") {
        cluster_methods.clear();
        if (value == "all") {
            cluster_methods.assign(std::begin(kAllClusterMethods), std::end(kAllClusterMethods));
        } else {
            std::stringstream ss(value);
            std::string part;
            while (std::getline(ss, part, ',')) {
                try {
                    cluster_methods.push_back(parse_cluster_method(part));
                } catch (const Error&) {
                    throw ConfigError(fmt::format("unknown cluster method '{}'", part));
                }
            }
        }
    } else if (key == "k_min") {
        k_min = config_count(key, value);
    } else if (key == "k_max") {
        k_max = config_count(key, value);
    } else if (key == "cluster_seed") {
        cluster_seed = static_cast<std::uint64_t>(config_count(key, value));
    } else if (key == "merge_cultural_lake") {
        if (!parse_bool(value, merge_cultural_lake))
            throw ConfigError(fmt::format("'{}' expects true or false, got '{}'", key, value));
    } else if (key == "months") {
        months = parse_months(value);
    } else if (key == "output") {
        output = resolve(value, base);
    } else if (key == "threads") {
        threads = config_count(key, value);
    } else {
        throw ConfigError(fmt::format("unknown key '{}'", key));
    }
}

void RunConfig::validate() const {
    if (!(log_offset > 0.0)) throw ConfigError("log_offset must be > 0");
    if (!(hits_tolerance > 0.0)) throw ConfigError("hits_tolerance must be > 0");
    if (hits_max_iterations < 1) throw ConfigError("hits_max_iterations must be >= 1");
    if (!(min_correlation >= -1.0 && min_correlation <= 1.0)) throw ConfigError("min_correlation must lie in [-1, 1]");
    if (!(min_coverage >= 0.0)) throw ConfigError("min_coverage must be >= 0");
    if (k_min < 2 || k_min > k_max) throw ConfigError("k range must satisfy 2 <= k_min <= k_max");
    if (cluster_methods.empty()) throw ConfigError("cluster_methods is empty");
    if (months.empty()) throw ConfigError("months filter is empty");
    if (threads < 1 || threads > 256) throw ConfigError("threads must lie in [1, 256]");
    if (output.empty()) throw ConfigError("output is not set");
}

bool RunConfig::all_months() const { return months.size() == 12; }

std::string RunConfig::to_config() const {
    std::vector<std::string> methods;
    for (auto m : cluster_methods) methods.emplace_back(to_string(m));
    std::string out;
    auto line = [&](std::string_view key, const auto& value) { out += fmt::format("{} = {}\n", key, value); };
    line("flows", flows.generic_string());
    line("municipalities", municipalities.generic_string());
    line("travel_times", travel_times.generic_string());
    line("reference_presences", reference_presences.generic_string());
    line("reference_classes", reference_classes.generic_string());
    line("cluster_categories", cluster_categories.generic_string());
    line("reference_year", reference_year);
    line("min_correlation", min_correlation);
    line("min_coverage", min_coverage);
    line("weight_map", to_string(weight_map));
    line("log_offset", log_offset);
    line("hits_tolerance", hits_tolerance);
    line("hits_max_iterations", hits_max_iterations);
    line("min_delta_observations", min_delta_observations);
    line("cluster_methods", fmt::format("{}", fmt::join(methods, ",")));
    line("k_min", k_min);
    line("k_max", k_max);
    line("cluster_seed", cluster_seed);
    line("merge_cultural_lake", merge_cultural_lake ? "true" : "false");
    line("months", fmt::format("{}", fmt::join(months, ",")));
    line("threads", threads);
    return out;
}

RunConfig RunConfig::parse(std::istream& in, const std::string& source, const fs::path& base) {
    RunConfig config;
    std::vector<KeyValue> entries;
    try {
        entries = parse_key_values(in, source, "config");
    } catch (const Error& e) {
        throw ConfigError(e.detail());
    }
    for (const auto& kv : entries) {
        try {
            config.set(kv.key, kv.value, base);
        } catch (const Error& e) {
            throw ConfigError(fmt::format("{}:{}: {}", source, kv.line, e.detail()));
        }
    }
    return config;
}

RunConfig RunConfig::load(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
    return parse(in, path.string(), fs::absolute(path).parent_path());
}

CommandResult run_validate(const RunConfig& config) {
    bool passed = true;
    auto result = run_steps(config, "validate", [&](Workspace& ws) { passed = do_validate(ws); });
    if (!passed) result.exit_code = kExitReferenceMismatch;
    return result;
}

CommandResult run_centrality(const RunConfig& config) {
    return run_steps(config, "centrality", [](Workspace& ws) { do_centrality(ws); });
}

CommandResult run_delta(const RunConfig& config) {
    return run_steps(config, "delta", [](Workspace& ws) { do_delta(ws); });
}

CommandResult run_gravity(const RunConfig& config) {
    return run_steps(config, "gravity", [](Workspace& ws) { do_gravity(ws); });
}

CommandResult run_cluster(const RunConfig& config) {
    return run_steps(config, "cluster", [](Workspace& ws) { do_cluster(ws); });
}

CommandResult run_report(const RunConfig& config) {
    return run_steps(config, "report", [](Workspace& ws) {
        if (!do_validate(ws)) throw ReferenceMismatch(ws.result.messages.back());
        do_centrality(ws);
        do_delta(ws);
        do_cluster(ws);
        do_gravity(ws);
    });
}

CommandResult run_synth(const SynthSpec& spec, const fs::path& output) {
    spec.validate();
    fs::create_directories(output);
    Stage stage(output, "synth");
    const auto region = generate_region(spec);
    const auto networks = generate_flows(spec, region);
    write_bundle(stage.dir(), spec, region, networks);
    CommandResult result;
    result.messages.push_back(fmt::format("synthetic bundle: {} municipalities, seed {}", spec.node_count, spec.seed));
    result.outputs = stage.commit(base_manifest("synth", spec.to_config(), json::array()), "synth");
    return result;
}

CommandResult run_command(std::string_view command, const RunConfig& config) {
    CommandResult failed;
    try {
        if (command == "validate") return run_validate(config);
        if (command == "centrality") return run_centrality(config);
        if (command == "delta") return run_delta(config);
        if (command == "gravity") return run_gravity(config);
        if (command == "cluster") return run_cluster(config);
        if (command == "report") return run_report(config);
        throw ConfigError(fmt::format("unknown command '{}'", command));
    } catch (const IngestError& e) {
        failed.exit_code = kExitSchemaError;
        for (const auto& d : e.diagnostics()) failed.messages.push_back(fmt::format("ingest: {}", d.to_string()));
    } catch (const ConfigError& e) {
        failed.exit_code = kExitSchemaError;
        failed.messages.emplace_back(e.what());
    } catch (const ReferenceMismatch& e) {
        failed.exit_code = kExitReferenceMismatch;
        failed.messages.emplace_back(e.what());
    } catch (const Error& e) {
        failed.exit_code = kExitModuleError;
        failed.messages.emplace_back(e.what());
    } catch (const fs::filesystem_error& e) {
        failed.exit_code = kExitModuleError;
        failed.messages.push_back(fmt::format("cli: {}", e.what()));
    }
    return failed;
}

} // namespace odflow
