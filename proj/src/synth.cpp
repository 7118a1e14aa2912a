#include "odflow/synth.hpp"

#include "odflow/csv.hpp"
#include "odflow/error.hpp"
#include "odflow/ingest.hpp"
#include "odflow/keyvalue.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

namespace odflow {

namespace {

constexpr std::array<std::string_view, 7> kDummyNames = {"cultural_heritage", "ski_routes",       "methane_distributors",
                                                         "festivals",         "farm_houses",      "intermodal_nodes",
                                                         "natural_reserves"};

// Cluster means of the three socio-economic groups, kClusterVariables order:
// NotSpecific, CulturalLake, Mountain.
constexpr std::array<std::array<double, 13>, 3> kBlobCenters = {{
    {22472, 0.390, 0.740, 0.001, 0.010, 4.176e-4, 0.105, 0.001, 3.163e-4, 257.282, 1.353e-5, 1944.167, 0.076},
    {18472, 0.116, 0.706, 0.017, 0.039, 0.001, 0.119, 0.001, 4.371e-4, 366.751, 4.318e-5, 306.023, 0.084},
    {16394, 0.026, 0.597, 0.083, 0.058, 0.002, 0.312, 0.002, 0.002, 116.130, 2.472e-4, 65.388, 0.168},
}};

const std::vector<std::string> kVisitorTerms = {std::string(kInterceptName), "origin_log_population",
                                                "destination_log_population", "log_travel_time"};

int& dummy_field(DriverDummies& d, std::size_t index) {
    switch (index) {
    case 0: return d.cultural_heritage;
    case 1: return d.ski_routes;
    case 2: return d.methane_distributors;
    case 3: return d.festivals;
    case 4: return d.farm_houses;
    case 5: return d.intermodal_nodes;
    default: return d.natural_reserves;
    }
}

// Attraction kind counted only where the matching dummy is set.
std::optional<std::size_t> dummy_for(AttractionKind kind) {
    switch (kind) {
    case AttractionKind::CulturalHeritage: return 0;
    case AttractionKind::SkiRoutes: return 1;
    case AttractionKind::MethaneDistributors: return 2;
    case AttractionKind::Festivals: return 3;
    case AttractionKind::FarmHouses: return 4;
    case AttractionKind::IntermodalNodes: return 5;
    case AttractionKind::Museums: return std::nullopt;
    }
    return std::nullopt;
}

double parse_number(const std::string& key, const std::string& value) {
    const auto v = csv::parse_double(value);
    if (!v) throw Error("synth", fmt::format("'{}' expects a number, got '{}'", key, value));
    return *v;
}

std::uint64_t parse_count(const std::string& key, const std::string& value) {
    const auto v = csv::parse_integer(value);
    if (!v || *v < 0) throw Error("synth", fmt::format("'{}' expects a non-negative integer, got '{}'", key, value));
    return static_cast<std::uint64_t>(*v);
}

double seasonal_shift(const SynthSpec& spec, int month) {
    return spec.seasonal_amplitude * std::cos(2.0 * std::numbers::pi * (month - 7) / 12.0);
}

double flow_value(const SynthSpec& spec, double eta) {
    const double w = std::exp(eta);
    return spec.round_flows ? std::round(w) : w;
}

bool keep_flow(const SynthSpec& spec, double w) { return spec.round_flows ? w >= 0.5 : w > 0.0; }

} // namespace

SynthSpec SynthSpec::defaults() {
    SynthSpec s;
    s.gravity_coefficients = {
        {std::string(kInterceptName), -6.0},
        {"origin_log_income", 0.5},
        {"origin_log_population", 0.4},
        {"origin_log_instrength", 0.1},
        {"origin_log_outstrength", -0.2},
        {"origin_log_betweenness", 0.05},
        {"origin_log_authority", -0.5},
        {"origin_log_hub", 0.5},
        {"origin_log_efficiency", 0.3},
        {"origin_cluster_cultural_lake", 0.2},
        {"origin_cluster_mountain", -0.1},
        {"destination_log_income", 0.3},
        {"destination_log_population", 0.32},
        {"destination_log_instrength", 0.3},
        {"destination_log_outstrength", -0.1},
        {"destination_log_betweenness", 0.05},
        {"destination_log_authority", 0.8},
        {"destination_log_hub", -0.3},
        {"destination_log_efficiency", 0.2},
        {"destination_cluster_cultural_lake", 0.4},
        {"destination_cluster_mountain", 0.5},
        {"log_travel_time", -0.9},
        {"log_inside_museums", -0.02},
        {"log_inside_cultural_heritage", -0.03},
        {"log_inside_ski_routes", 0.02},
        {"log_inside_farm_houses", -0.02},
        {"log_inside_intermodal_nodes", 0.01},
        {"log_inside_methane_distributors", -0.01},
        {"log_inside_festivals", -0.02},
    };
    s.visitor_coefficients = {{std::string(kInterceptName), 1.0},
                              {"origin_log_population", 0.5},
                              {"destination_log_population", 0.5},
                              {"log_travel_time", -1.5}};
    s.attribute_ranges = {{"population", {1000.0, 100000.0}},
                          {"accommodation_beds", {0.01, 2.0}},
                          {"book_shops", {0.0, 0.0005}},
                          {"museums_count", {0.0, 10.0}},
                          {"cultural_heritage_count", {0.0, 30.0}},
                          {"ski_routes_count", {0.0, 15.0}},
                          {"farm_houses_count", {0.0, 20.0}},
                          {"intermodal_nodes_count", {0.0, 3.0}},
                          {"methane_distributors_count", {0.0, 5.0}},
                          {"festivals_count", {0.0, 10.0}}};
    s.dummy_probabilities = {{"cultural_heritage", 0.374}, {"ski_routes", 0.117}, {"methane_distributors", 0.294},
                             {"festivals", 0.313},         {"farm_houses", 0.595}, {"intermodal_nodes", 0.037},
                             {"natural_reserves", 0.067}};
    return s;
}

void SynthSpec::set(const std::string& key, const std::string& value) {
    auto prefixed = [&](std::string_view prefix) { return key.rfind(prefix, 0) == 0; };
    if (key == "nodes") {
        node_count = parse_count(key, value);
    } else if (key == "seed") {
        seed = parse_count(key, value);
    } else if (key == "year") {
        year = static_cast<int>(parse_count(key, value));
    } else if (key == "noise_sigma") {
        noise_sigma = parse_number(key, value);
    } else if (key == "edge_density") {
        edge_density = parse_number(key, value);
    } else if (key == "seasonal_amplitude") {
        seasonal_amplitude = parse_number(key, value);
    } else if (key == "round_flows") {
        if (!parse_bool(value, round_flows))
            throw Error("synth", fmt::format("'{}' expects true or false, got '{}'", key, value));
    } else if (key == "visitor_noise_sigma") {
        visitor_noise_sigma = parse_number(key, value);
    } else if (key == "visitor_edge_density") {
        visitor_edge_density = parse_number(key, value);
    } else if (key == "plane_minutes") {
        plane_minutes = parse_number(key, value);
    } else if (key == "base_minutes") {
        base_minutes = parse_number(key, value);
    } else if (key == "log_offset") {
        log_offset = parse_number(key, value);
    } else if (key == "weight_map") {
        try {
            weight_map = parse_weight_map(value);
        } catch (const Error&) {
            throw Error("synth", fmt::format("unknown weight_map '{}'", value));
        }
    } else if (key == "blobs.k") {
        blobs.k = parse_count(key, value);
    } else if (key == "blobs.separation") {
        blobs.separation = parse_number(key, value);
    } else if (key == "blobs.spread") {
        blobs.spread = parse_number(key, value);
    } else if (key == "blobs.counts") {
        blobs.counts.clear();
        if (!value.empty()) {
            std::stringstream ss(value);
            std::string part;
            while (std::getline(ss, part, ',')) blobs.counts.push_back(parse_count(key, part));
        }
    } else if (prefixed("gravity.")) {
        const auto term = key.substr(8);
        if (!gravity_coefficients.contains(term)) throw Error("synth", fmt::format("unknown gravity term '{}'", term));
        gravity_coefficients[term] = parse_number(key, value);
    } else if (prefixed("visitor.")) {
        const auto term = key.substr(8);
        if (!visitor_coefficients.contains(term)) throw Error("synth", fmt::format("unknown visitor term '{}'", term));
        visitor_coefficients[term] = parse_number(key, value);
    } else if (prefixed("range.")) {
        const auto field = key.substr(6);
        if (!attribute_ranges.contains(field)) throw Error("synth", fmt::format("unknown attribute range '{}'", field));
        const auto colon = value.find(':');
        if (colon == std::string::npos) throw Error("synth", fmt::format("'{}' expects lo:hi, got '{}'", key, value));
        attribute_ranges[field] = {parse_number(key, value.substr(0, colon)), parse_number(key, value.substr(colon + 1))};
    } else if (prefixed("dummy.")) {
        const auto field = key.substr(6);
        if (!dummy_probabilities.contains(field)) throw Error("synth", fmt::format("unknown dummy '{}'", field));
        dummy_probabilities[field] = parse_number(key, value);
    } else {
        throw Error("synth", fmt::format("unknown key '{}'", key));
    }
}

void SynthSpec::validate() const {
    if (node_count < 3) throw Error("synth", "nodes must be at least 3");
    if (!(noise_sigma >= 0.0) || !(visitor_noise_sigma >= 0.0)) throw Error("synth", "noise sigma must be >= 0");
    for (double d : {edge_density, visitor_edge_density})
        if (!(d > 0.0 && d <= 1.0)) throw Error("synth", "edge densities must lie in (0, 1]");
    if (!(plane_minutes > 0.0) || !(base_minutes > 0.0)) throw Error("synth", "plane_minutes and base_minutes must be > 0");
    if (!(log_offset > 0.0)) throw Error("synth", "log_offset must be > 0");
    if (blobs.k < 1 || blobs.k > kBlobCenters.size()) throw Error("synth", "blobs.k must be between 1 and 3");
    if (!(blobs.separation >= 0.0) || !(blobs.spread >= 0.0))
        throw Error("synth", "blobs.separation and blobs.spread must be >= 0");
    if (!blobs.counts.empty()) {
        if (blobs.counts.size() != blobs.k) throw Error("synth", "blobs.counts must list one size per blob");
        if (std::accumulate(blobs.counts.begin(), blobs.counts.end(), std::size_t{0}) != node_count)
            throw Error("synth", "blobs.counts must sum to nodes");
    }
    for (const auto& [field, r] : attribute_ranges) {
        if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi || r.lo < 0.0)
            throw Error("synth", fmt::format("range.{} must satisfy 0 <= lo <= hi", field));
    }
    if (!(attribute_ranges.at("population").lo > 0.0)) throw Error("synth", "range.population must be positive");
    for (const auto& [field, p] : dummy_probabilities)
        if (!(p >= 0.0 && p <= 1.0)) throw Error("synth", fmt::format("dummy.{} must lie in [0, 1]", field));
    for (const auto& [term, b] : gravity_coefficients)
        if (!std::isfinite(b)) throw Error("synth", fmt::format("gravity.{} must be finite", term));
    for (const auto& [term, b] : visitor_coefficients)
        if (!std::isfinite(b)) throw Error("synth", fmt::format("visitor.{} must be finite", term));
}

std::string SynthSpec::to_config() const {
    std::string out;
    auto line = [&](std::string_view key, const auto& value) { out += fmt::format("{} = {}\n", key, value); };
    line("nodes", node_count);
    line("seed", seed);
    line("year", year);
    line("noise_sigma", noise_sigma);
    line("edge_density", edge_density);
    line("seasonal_amplitude", seasonal_amplitude);
    line("round_flows", round_flows ? "true" : "false");
    line("visitor_noise_sigma", visitor_noise_sigma);
    line("visitor_edge_density", visitor_edge_density);
    line("plane_minutes", plane_minutes);
    line("base_minutes", base_minutes);
    line("log_offset", log_offset);
    line("weight_map", to_string(weight_map));
    line("blobs.k", blobs.k);
    line("blobs.separation", blobs.separation);
    line("blobs.spread", blobs.spread);
    line("blobs.counts", fmt::format("{}", fmt::join(blobs.counts, ",")));
    for (const auto& [field, r] : attribute_ranges) line(fmt::format("range.{}", field), fmt::format("{}:{}", r.lo, r.hi));
    for (const auto& [field, p] : dummy_probabilities) line(fmt::format("dummy.{}", field), p);
    line(fmt::format("gravity.{}", kInterceptName), gravity_coefficients.at(std::string(kInterceptName)));
    for (const auto& term : gravity_term_names()) line(fmt::format("gravity.{}", term), gravity_coefficients.at(term));
    for (const auto& term : kVisitorTerms) line(fmt::format("visitor.{}", term), visitor_coefficients.at(term));
    return out;
}

SynthSpec SynthSpec::parse(std::istream& in, const std::string& source) {
    auto spec = defaults();
    for (const auto& kv : parse_key_values(in, source, "synth")) {
        try {
            spec.set(kv.key, kv.value);
        } catch (const Error& e) {
            throw Error("synth", fmt::format("{}:{}: {}", source, kv.line, e.detail()));
        }
    }
    spec.validate();
    return spec;
}

SynthSpec SynthSpec::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("synth", fmt::format("cannot open spec '{}'", path.string()));
    return parse(in, path.string());
}

std::map<std::string, double> SynthSpec::tourist_truth(int month) const {
    auto truth = gravity_coefficients;
    truth[std::string(kInterceptName)] += seasonal_shift(*this, month);
    return truth;
}

SynthRegion generate_region(const SynthSpec& spec) {
    spec.validate();
    const std::size_t n = spec.node_count;
    SplitMix64 rng(stream_seed(spec.seed, 0));

    std::vector<std::string> ids(n);
    const int width = std::max(3, static_cast<int>(std::to_string(n).size()));
    for (std::size_t i = 0; i < n; ++i) ids[i] = fmt::format("M{:0{}}", i + 1, width);
    NodeSet nodes(ids);

    // Blob membership: sizes first, then a random permutation of the nodes.
    std::vector<std::size_t> counts = spec.blobs.counts;
    if (counts.empty()) {
        counts.assign(spec.blobs.k, n / spec.blobs.k);
        for (std::size_t b = 0; b < n % spec.blobs.k; ++b) ++counts[b];
    }
    std::vector<std::size_t> blob;
    for (std::size_t b = 0; b < counts.size(); ++b) blob.insert(blob.end(), counts[b], b);
    for (std::size_t i = n; i > 1; --i) std::swap(blob[i - 1], blob[rng.below(i)]);

    std::array<double, 13> geometric{};
    for (std::size_t v = 0; v < 13; ++v) {
        double s = 0.0;
        for (const auto& c : kBlobCenters) s += std::log(c[v]);
        geometric[v] = std::exp(s / static_cast<double>(kBlobCenters.size()));
    }

    auto range = [&](const std::string& field) { return spec.attribute_ranges.at(field); };
    std::vector<MunicipalityRecord> records(n);
    std::vector<std::array<double, 2>> coords(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& r = records[i];
        r.id = ids[i];
        r.name = fmt::format("Synthetic {}", i + 1);
        coords[i] = {rng.uniform(0.0, spec.plane_minutes), rng.uniform(0.0, spec.plane_minutes)};
        const auto pop = range("population");
        r.population = std::round(std::exp(rng.uniform(std::log(pop.lo), std::log(pop.hi))));
        const auto beds = range("accommodation_beds");
        r.accommodation_beds = rng.uniform(beds.lo, beds.hi);
        const auto shops = range("book_shops");
        r.book_shops = rng.uniform(shops.lo, shops.hi);
        for (std::size_t v = 0; v < 13; ++v) {
            const double center =
                geometric[v] * std::pow(kBlobCenters[blob[i]][v] / geometric[v], spec.blobs.separation);
            r.cluster_variables[v] = center * std::exp(spec.blobs.spread * rng.normal());
        }
        r.income_pc = r.cluster_variables[0];
        for (std::size_t d = 0; d < kDummyNames.size(); ++d)
            dummy_field(r.dummies, d) = rng.bernoulli(spec.dummy_probabilities.at(std::string(kDummyNames[d]))) ? 1 : 0;
    }
    // Every dummy takes both values so that it can enter a regression.
    for (std::size_t d = 0; d < kDummyNames.size(); ++d) {
        std::size_t ones = 0;
        for (auto& r : records) ones += static_cast<std::size_t>(dummy_field(r.dummies, d));
        if (ones == 0) dummy_field(records[rng.below(n)].dummies, d) = 1;
        if (ones == n) dummy_field(records[rng.below(n)].dummies, d) = 0;
    }
    for (auto& r : records) {
        for (std::size_t a = 0; a < kAttractionKinds.size(); ++a) {
            const auto kind = kAttractionKinds[a];
            const auto bound = range(fmt::format("{}_count", to_string(kind)));
            const auto lo = static_cast<std::uint64_t>(std::ceil(bound.lo));
            const auto hi = static_cast<std::uint64_t>(std::floor(bound.hi));
            const auto d = dummy_for(kind);
            if (d && dummy_field(r.dummies, *d) == 0) {
                r.attractions[a] = 0.0;
                continue;
            }
            const auto floor_count = d ? std::max<std::uint64_t>(lo, 1) : lo;
            const auto top = std::max(hi, floor_count);
            r.attractions[a] = static_cast<double>(floor_count + rng.below(top - floor_count + 1));
        }
    }

    TravelTimeMatrix tt(nodes);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double minutes =
                spec.base_minutes + std::hypot(coords[i][0] - coords[j][0], coords[i][1] - coords[j][1]);
            tt.set(i, j, minutes);
            tt.set(j, i, minutes);
        }

    std::map<std::string, ClusterCategory> categories;
    std::map<std::string, std::string> classes;
    constexpr std::array<ClusterCategory, 3> kCategory = {ClusterCategory::NotSpecific, ClusterCategory::CulturalLake,
                                                          ClusterCategory::Mountain};
    for (std::size_t i = 0; i < n; ++i) {
        categories.emplace(ids[i], kCategory[blob[i]]);
        std::string cls;
        switch (blob[i]) {
        case 0: cls = rng.bernoulli(0.2) ? "Metropolies" : "NotSpecific"; break;
        case 1: cls = rng.bernoulli(0.5) ? "Cultural" : "Lake"; break;
        default: cls = "Mountain"; break;
        }
        classes.emplace(ids[i], std::move(cls));
    }

    auto attractions = AttractionTable::from_records(nodes, records);
    return SynthRegion{std::move(nodes), std::move(records), std::move(coords), std::move(tt), std::move(attractions),
                       std::move(blob),  std::move(categories), std::move(classes)};
}

SynthMonth generate_month(const SynthSpec& spec, const SynthRegion& region, int month) {
    if (month < 1 || month > 12) throw Error("synth", fmt::format("month {} out of range", month));
    const auto& nodes = region.nodes;
    const std::size_t n = nodes.size();
    const auto period = Period::month(month);
    const double season = seasonal_shift(spec, month);

    FlowNetwork visitors(nodes, Behaviour::Visitors, period);
    {
        SplitMix64 rng(stream_seed(spec.seed, 1000 + static_cast<std::uint64_t>(month)));
        const auto& c = spec.visitor_coefficients;
        const double b0 = c.at(std::string(kInterceptName));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j || !rng.bernoulli(spec.visitor_edge_density)) continue;
                const double eta = b0 + season + c.at("origin_log_population") * std::log(region.municipalities[i].population) +
                                   c.at("destination_log_population") * std::log(region.municipalities[j].population) +
                                   c.at("log_travel_time") * std::log(region.travel_times.at(i, j)) +
                                   spec.visitor_noise_sigma * rng.normal();
                const double w = flow_value(spec, eta);
                if (keep_flow(spec, w)) visitors.add_flow(i, j, w);
            }
    }
    CentralityOptions options;
    options.weight_map = spec.weight_map;
    auto centralities = compute_centralities(visitors, options);

    FlowNetwork skeleton(nodes, Behaviour::Tourists, period);
    SplitMix64 rng(stream_seed(spec.seed, 2000 + static_cast<std::uint64_t>(month)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && rng.bernoulli(spec.edge_density)) skeleton.add_flow(i, j, 1.0);

    const GravityContext context{nodes,
                                 region.municipalities,
                                 region.categories,
                                 region.travel_times,
                                 region.attractions,
                                 LogPolicy{spec.log_offset}};
    const auto observations = assemble_gravity(skeleton, centralities, context);
    const auto& names = gravity_term_names();
    std::vector<double> beta(names.size());
    for (std::size_t t = 0; t < names.size(); ++t) beta[t] = spec.gravity_coefficients.at(names[t]);
    const double intercept = spec.gravity_coefficients.at(std::string(kInterceptName)) + season;

    FlowNetwork tourists(nodes, Behaviour::Tourists, period);
    for (const auto& obs : observations) {
        const auto x = obs.regressors();
        double eta = intercept;
        for (std::size_t t = 0; t < x.size(); ++t) eta += beta[t] * x[t];
        eta += spec.noise_sigma * rng.normal();
        const double w = flow_value(spec, eta);
        if (keep_flow(spec, w)) tourists.add_flow(obs.origin, obs.destination, w);
    }
    return SynthMonth{std::move(tourists), std::move(visitors), std::move(centralities)};
}

std::vector<FlowNetwork> generate_flows(const SynthSpec& spec, const SynthRegion& region) {
    std::vector<FlowNetwork> tourists;
    std::vector<FlowNetwork> visitors;
    for (int m = 1; m <= 12; ++m) {
        auto month = generate_month(spec, region, m);
        tourists.push_back(std::move(month.tourists));
        visitors.push_back(std::move(month.visitors));
    }
    std::move(visitors.begin(), visitors.end(), std::back_inserter(tourists));
    return tourists;
}

FlowNetwork derive_visitors(const FlowNetwork& tourists, std::span<const MunicipalityRecord> municipalities,
                            const DeltaScenario& scenario, std::uint64_t seed) {
    const auto& nodes = tourists.nodes();
    if (municipalities.size() != nodes.size()) throw Error("synth", "one municipality record per node required");
    SplitMix64 rng(seed);
    std::vector<double> keep(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        if (municipalities[j].id != nodes.id(j)) throw Error("synth", "municipality records must follow node order");
        const double y = scenario.intercept + scenario.beds_slope * municipalities[j].accommodation_beds +
                         scenario.noise_sigma * rng.normal();
        if (!(y < 1.0)) throw Error("synth", fmt::format("delta {} for node '{}' leaves no visitors", y, nodes.id(j)));
        keep[j] = 1.0 - y;
    }
    FlowNetwork visitors(nodes, Behaviour::Visitors, tourists.period());
    for (const auto& [key, w] : tourists.edges()) visitors.add_flow(key.first, key.second, w * keep[key.second]);
    return visitors;
}

std::map<std::string, double> yearly_presences(std::span<const FlowNetwork> networks) {
    std::map<std::string, double> out;
    for (const auto& net : networks) {
        if (net.behaviour() != Behaviour::Tourists) continue;
        const auto in = instrength(net);
        for (std::size_t i = 0; i < in.values.size(); ++i) out[in.nodes.id(i)] += in.values[i];
    }
    return out;
}

void write_bundle(const std::filesystem::path& dir, const SynthSpec& spec, const SynthRegion& region,
                  std::span<const FlowNetwork> networks) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw Error("synth", fmt::format("cannot write '{}'", (dir / name).string()));
        return out;
    };
    {
        auto out = open("municipalities.csv");
        write_municipalities_csv(out, region.municipalities);
    }
    {
        auto out = open("flows.csv");
        write_flows_csv(out, networks);
    }
    {
        auto out = open("travel_times.csv");
        write_travel_times_csv(out, region.travel_times);
    }
    {
        auto out = open("reference_presences.csv");
        write_reference_presences_csv(out, spec.year, yearly_presences(networks));
    }
    {
        auto out = open("reference_classes.csv");
        write_reference_classes_csv(out, region.reference_classes, region.nodes.ids());
    }
    {
        auto out = open("synth.conf");
        out << spec.to_config();
    }
    {
        auto out = open("odflow.conf");
        out << "flows = flows.csv\n"
               "municipalities = municipalities.csv\n"
               "travel_times = travel_times.csv\n"
               "reference_presences = reference_presences.csv\n"
               "reference_classes = reference_classes.csv\n"
            << fmt::format("reference_year = {}\n", spec.year) << fmt::format("log_offset = {}\n", spec.log_offset)
            << fmt::format("weight_map = {}\n", to_string(spec.weight_map));
    }
}

} // namespace odflow
