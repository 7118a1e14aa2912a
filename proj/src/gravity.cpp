#include "odflow/gravity.hpp"

#include "odflow/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <optional>
#include <ostream>

namespace odflow {

namespace {

std::string lower(std::string_view text) {
    std::string out(text);
    std::ranges::transform(out, out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

} // namespace

std::string_view to_string(AttractionKind kind) noexcept {
    switch (kind) {
    case AttractionKind::Museums: return "museums";
    case AttractionKind::CulturalHeritage: return "cultural_heritage";
    case AttractionKind::SkiRoutes: return "ski_routes";
    case AttractionKind::FarmHouses: return "farm_houses";
    case AttractionKind::IntermodalNodes: return "intermodal_nodes";
    case AttractionKind::MethaneDistributors: return "methane_distributors";
    case AttractionKind::Festivals: return "festivals";
    }
    return "unknown";
}

AttractionKind parse_attraction_kind(std::string_view text) {
    const auto key = lower(text);
    for (auto k : kAttractionKinds)
        if (key == to_string(k)) return k;
    throw Error("gravity", fmt::format("unknown attraction kind '{}'", text));
}

TravelTimeMatrix::TravelTimeMatrix(NodeSet nodes)
    : nodes_(std::move(nodes)), minutes_(nodes_.size() * nodes_.size(), kMissing) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) minutes_[i * nodes_.size() + i] = 0.0;
}

void TravelTimeMatrix::set(std::size_t origin, std::size_t destination, double minutes) {
    if (origin >= size() || destination >= size()) throw Error("gravity", "travel time endpoint outside node set");
    if (origin == destination) throw Error("gravity", "travel time from a node to itself is fixed at 0");
    if (!std::isfinite(minutes) || minutes <= 0.0)
        throw Error("gravity", fmt::format("travel time {} -> {} must be positive, got {}", nodes_.id(origin),
                                           nodes_.id(destination), minutes));
    minutes_[origin * size() + destination] = minutes;
}

bool TravelTimeMatrix::has(std::size_t origin, std::size_t destination) const {
    return !std::isnan(minutes_.at(origin * size() + destination));
}

double TravelTimeMatrix::at(std::size_t origin, std::size_t destination) const {
    const double m = minutes_.at(origin * size() + destination);
    if (std::isnan(m))
        throw Error("gravity",
                    fmt::format("missing travel time {} -> {}", nodes_.id(origin), nodes_.id(destination)));
    return m;
}

double TravelTimeMatrix::at(std::string_view origin, std::string_view destination) const {
    return at(nodes_.index_of(origin), nodes_.index_of(destination));
}

bool TravelTimeMatrix::complete() const {
    return std::ranges::none_of(minutes_, [](double m) { return std::isnan(m); });
}

bool TravelTimeMatrix::symmetric() const {
    const auto n = size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = minutes_[i * n + j];
            const double b = minutes_[j * n + i];
            if (!(a == b) && !(std::isnan(a) && std::isnan(b))) return false;
        }
    return true;
}

void TravelTimeMatrix::require_complete() const {
    const auto n = size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (std::isnan(minutes_[i * n + j]))
                throw Error("gravity", fmt::format("travel time matrix is incomplete: missing {} -> {}",
                                                   nodes_.id(i), nodes_.id(j)));
}

AttractionTable::AttractionTable(NodeSet nodes, std::vector<std::array<double, 7>> counts)
    : nodes_(std::move(nodes)), counts_(std::move(counts)) {
    if (counts_.size() != nodes_.size()) throw Error("gravity", "attraction table size mismatch");
    for (std::size_t i = 0; i < counts_.size(); ++i)
        for (double c : counts_[i])
            if (!(c >= 0.0) || std::floor(c) != c)
                throw Error("gravity",
                            fmt::format("attraction counts of '{}' must be non-negative integers", nodes_.id(i)));
}

AttractionTable AttractionTable::from_records(const NodeSet& nodes, std::span<const MunicipalityRecord> records) {
    std::vector<std::array<double, 7>> counts(nodes.size());
    std::vector<bool> seen(nodes.size(), false);
    for (const auto& r : records) {
        const auto i = nodes.find(r.id);
        if (!i) continue;
        counts[*i] = r.attractions;
        seen[*i] = true;
    }
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (!seen[i]) throw Error("gravity", fmt::format("missing attraction counts for '{}'", nodes.id(i)));
    return AttractionTable(nodes, std::move(counts));
}

std::array<double, 7> inside_attractions(std::size_t origin, std::size_t destination, const TravelTimeMatrix& tt,
                                         const AttractionTable& attractions) {
    const std::size_t n = tt.size();
    if (attractions.nodes().size() != n) throw Error("gravity", "attraction table and travel times differ in size");
    const double limit = tt.at(origin, destination);
    double time_sum = 0.0;
    std::size_t members = 0;
    std::array<double, 7> totals{};
    for (std::size_t k = 0; k < n; ++k) {
        if (k == origin || k == destination) continue;
        const double t = tt.at(origin, k);
        if (!(t < limit)) continue;
        time_sum += t;
        ++members;
        for (std::size_t a = 0; a < totals.size(); ++a) totals[a] += attractions.count(k, kAttractionKinds[a]);
    }
    std::array<double, 7> out{};
    if (members == 0) return out;
    const double mean_time = time_sum / static_cast<double>(members);
    for (std::size_t a = 0; a < out.size(); ++a) out[a] = mean_time * totals[a];
    return out;
}

double inside_attraction(std::size_t origin, std::size_t destination, AttractionKind kind,
                         const TravelTimeMatrix& tt, const AttractionTable& attractions) {
    return inside_attractions(origin, destination, tt, attractions)[static_cast<std::size_t>(kind)];
}

double inside_attraction(std::string_view origin, std::string_view destination, std::string_view kind,
                         const TravelTimeMatrix& tt, const AttractionTable& attractions) {
    const auto k = parse_attraction_kind(kind);
    return inside_attraction(tt.nodes().index_of(origin), tt.nodes().index_of(destination), k, tt, attractions);
}

std::string_view to_string(ClusterCategory c) noexcept {
    switch (c) {
    case ClusterCategory::NotSpecific: return "NotSpecific";
    case ClusterCategory::CulturalLake: return "CulturalLake";
    case ClusterCategory::Mountain: return "Mountain";
    }
    return "NotSpecific";
}

ClusterCategory parse_cluster_category(std::string_view text) {
    const auto key = lower(text);
    if (key == "notspecific" || key == "not_specific") return ClusterCategory::NotSpecific;
    if (key == "culturallake" || key == "cultural_lake") return ClusterCategory::CulturalLake;
    if (key == "mountain") return ClusterCategory::Mountain;
    throw Error("gravity", fmt::format("unknown cluster category '{}'", text));
}

double LogPolicy::zeroable(double x) const {
    const double v = std::log(x + zero_offset);
    if (!std::isfinite(v))
        throw Error("gravity", fmt::format("log({} + {}) is not finite; raise the zero offset", x, zero_offset));
    return v;
}

double LogPolicy::strict(double x, std::string_view what) {
    if (!(x > 0.0) || !std::isfinite(x)) throw Error("gravity", fmt::format("{} must be positive, got {}", what, x));
    return std::log(x);
}

std::array<double, 28> GravityObservation::regressors() const {
    std::array<double, 28> r{};
    std::size_t i = 0;
    for (const auto* block : {&origin_block, &destination_block}) {
        r[i++] = block->log_income;
        r[i++] = block->log_population;
        for (double c : block->log_centrality) r[i++] = c;
        r[i++] = block->category == ClusterCategory::CulturalLake ? 1.0 : 0.0;
        r[i++] = block->category == ClusterCategory::Mountain ? 1.0 : 0.0;
    }
    r[i++] = log_travel_time;
    for (double v : log_inside) r[i++] = v;
    return r;
}

const std::vector<std::string>& gravity_term_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (std::string_view side : {"origin", "destination"}) {
            out.push_back(fmt::format("{}_log_income", side));
            out.push_back(fmt::format("{}_log_population", side));
            for (auto m : kAllMetrics) out.push_back(fmt::format("{}_log_{}", side, to_string(m)));
            out.push_back(fmt::format("{}_cluster_cultural_lake", side));
            out.push_back(fmt::format("{}_cluster_mountain", side));
        }
        out.emplace_back("log_travel_time");
        for (auto k : kAttractionKinds) out.push_back(fmt::format("log_inside_{}", to_string(k)));
        return out;
    }();
    return names;
}

std::vector<GravityObservation> assemble_gravity(const FlowNetwork& tourists,
                                                 std::span<const CentralityVector> visitor_centralities,
                                                 const GravityContext& context) {
    if (tourists.behaviour() != Behaviour::Tourists) throw Error("gravity", "response network must be tourists");
    const auto& nodes = tourists.nodes();

    std::array<const CentralityVector*, 6> metrics{};
    for (const auto& v : visitor_centralities) {
        if (v.behaviour != Behaviour::Visitors) throw Error("gravity", "centralities must come from visitors networks");
        if (v.period != tourists.period())
            throw Error("gravity", fmt::format("centrality period {} does not match flow period {}", v.period.label(),
                                               tourists.period().label()));
        metrics[static_cast<std::size_t>(v.metric)] = &v;
    }
    for (std::size_t m = 0; m < metrics.size(); ++m)
        if (!metrics[m]) throw Error("gravity", fmt::format("missing visitor centrality '{}'", to_string(kAllMetrics[m])));

    std::map<std::string_view, const MunicipalityRecord*> records;
    for (const auto& r : context.municipalities) records.emplace(r.id, &r);

    // Per-node blocks are built lazily and reused for every flow touching the node.
    std::vector<std::optional<EndpointBlock>> blocks(nodes.size());
    auto block_of = [&](std::size_t i) -> const EndpointBlock& {
        if (blocks[i]) return *blocks[i];
        const auto& id = nodes.id(i);
        const auto rec = records.find(id);
        if (rec == records.end())
            throw Error("gravity", fmt::format("node '{}' is missing field 'municipality record'", id));
        EndpointBlock b;
        try {
            b.log_income = LogPolicy::strict(rec->second->income_pc, "income_pc");
            b.log_population = LogPolicy::strict(rec->second->population, "population");
        } catch (const Error& e) {
            throw Error("gravity", fmt::format("node '{}': {}", id, e.detail()));
        }
        for (std::size_t m = 0; m < metrics.size(); ++m) {
            const auto idx = metrics[m]->nodes.find(id);
            if (!idx)
                throw Error("gravity", fmt::format("node '{}' is missing field '{}'", id, to_string(kAllMetrics[m])));
            b.log_centrality[m] = context.log_policy.zeroable(metrics[m]->values[*idx]);
        }
        const auto cat = context.clusters.find(id);
        if (cat == context.clusters.end()) throw Error("gravity", fmt::format("node '{}' is missing field 'cluster'", id));
        b.category = cat->second;
        blocks[i] = b;
        return *blocks[i];
    };

    const auto& tt_nodes = context.travel_times.nodes();
    if (!(context.attractions.nodes() == tt_nodes))
        throw Error("gravity", "attraction table and travel times use different nodes");
    std::vector<GravityObservation> out;
    out.reserve(tourists.edge_count());
    for (const auto& [key, flow] : tourists.edges()) {
        const auto& origin = nodes.id(key.first);
        const auto& destination = nodes.id(key.second);
        const auto to = tt_nodes.find(origin);
        const auto td = tt_nodes.find(destination);
        if (!to || !td)
            throw Error("gravity", fmt::format("node '{}' is missing field 'travel_time'", !to ? origin : destination));

        GravityObservation obs;
        obs.origin = origin;
        obs.destination = destination;
        obs.period = tourists.period();
        obs.log_flow = LogPolicy::strict(flow, "flow");
        obs.origin_block = block_of(key.first);
        obs.destination_block = block_of(key.second);
        obs.log_travel_time = LogPolicy::strict(context.travel_times.at(*to, *td), "travel time");
        const auto inside = inside_attractions(*to, *td, context.travel_times, context.attractions);
        for (std::size_t a = 0; a < inside.size(); ++a) obs.log_inside[a] = context.log_policy.zeroable(inside[a]);
        out.push_back(std::move(obs));
    }
    return out;
}

RegressionResult fit_gravity(std::span<const GravityObservation> observations, Period period) {
    DesignBuilder builder(gravity_term_names());
    for (const auto& obs : observations) {
        if (obs.period != period)
            throw Error("gravity", fmt::format("observation period {} differs from fit period {}", obs.period.label(),
                                               period.label()));
        const auto row = obs.regressors();
        builder.add_row(obs.log_flow, row);
    }
    try {
        return ols_fit(builder.build());
    } catch (const Error& e) {
        throw Error("gravity", fmt::format("period {}: {}", period.label(), e.what()));
    }
}

void write_gravity_long_csv(std::ostream& out, Period period, const RegressionResult& result, bool header) {
    if (header) out << "period,term,estimate,ci_low,ci_high,stars\n";
    for (const auto& t : result.terms)
        out << fmt::format("{},{},{},{},{},{}\n", period.label(), t.name, t.estimate, t.ci_low, t.ci_high, t.stars);
}

} // namespace odflow
