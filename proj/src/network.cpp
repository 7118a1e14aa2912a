#include "odflow/network.hpp"

#include "odflow/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fmt/format.h>

namespace odflow {

namespace {

std::string lower(std::string_view text) {
    std::string out(text);
    std::ranges::transform(out, out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

} // namespace

std::string_view to_string(Behaviour b) noexcept {
    return b == Behaviour::Tourists ? "tourists" : "visitors";
}

Behaviour parse_behaviour(std::string_view text) {
    const auto key = lower(text);
    if (key == "tourists") return Behaviour::Tourists;
    if (key == "visitors") return Behaviour::Visitors;
    throw Error("flownet", fmt::format("unknown behaviour '{}'", text));
}

Period Period::month(int m) {
    if (m < 1 || m > 12) throw Error("flownet", fmt::format("month {} out of range 1-12", m));
    Period p;
    p.month_ = m;
    return p;
}

std::string Period::label() const {
    return is_year() ? std::string("year") : fmt::format("{:02d}", month_);
}

Period parse_period(std::string_view text) {
    if (lower(text) == "year") return Period::year();
    int m = 0;
    for (char c : text) {
        if (c < '0' || c > '9') throw Error("flownet", fmt::format("invalid period '{}'", text));
        m = m * 10 + (c - '0');
        if (m > 12) break;
    }
    if (text.empty()) throw Error("flownet", "empty period");
    return Period::month(m);
}

NodeSet::NodeSet(std::vector<std::string> ids) : ids_(std::move(ids)) {
    index_.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (!index_.emplace(ids_[i], i).second)
            throw Error("flownet", fmt::format("duplicate node id '{}'", ids_[i]));
    }
}

std::optional<std::size_t> NodeSet::find(std::string_view id) const {
    const auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t NodeSet::index_of(std::string_view id) const {
    if (auto i = find(id)) return *i;
    throw Error("flownet", fmt::format("unknown node '{}'", id));
}

FlowNetwork::FlowNetwork(NodeSet nodes, Behaviour behaviour, Period period)
    : nodes_(std::move(nodes)), behaviour_(behaviour), period_(period) {}

void FlowNetwork::add_flow(std::size_t origin, std::size_t destination, double weight) {
    if (origin >= node_count() || destination >= node_count())
        throw Error("flownet", "edge endpoint outside node set");
    if (origin == destination)
        throw Error("flownet", fmt::format("self-loop on node '{}'", nodes_.id(origin)));
    if (!std::isfinite(weight) || weight < 0.0)
        throw Error("flownet", fmt::format("invalid weight {} on edge {} -> {}", weight, nodes_.id(origin),
                                           nodes_.id(destination)));
    if (weight == 0.0) return;
    edges_[{origin, destination}] += weight;
}

void FlowNetwork::add_flow(std::string_view origin, std::string_view destination, double weight) {
    add_flow(nodes_.index_of(origin), nodes_.index_of(destination), weight);
}

double FlowNetwork::weight(std::size_t origin, std::size_t destination) const {
    const auto it = edges_.find({origin, destination});
    return it == edges_.end() ? 0.0 : it->second;
}

double FlowNetwork::total_weight() const {
    double total = 0.0;
    for (const auto& [key, w] : edges_) total += w;
    return total;
}

std::vector<std::vector<Arc>> FlowNetwork::out_arcs() const {
    std::vector<std::vector<Arc>> arcs(node_count());
    for (const auto& [key, w] : edges_) arcs[key.first].push_back({key.second, w});
    return arcs;
}

std::vector<std::vector<Arc>> FlowNetwork::in_arcs() const {
    std::vector<std::vector<Arc>> arcs(node_count());
    for (const auto& [key, w] : edges_) arcs[key.second].push_back({key.first, w});
    return arcs;
}

FlowNetwork FlowNetwork::scaled(double factor) const {
    if (!(factor > 0.0) || !std::isfinite(factor)) throw Error("flownet", "scale factor must be positive");
    FlowNetwork out(nodes_, behaviour_, period_);
    for (const auto& [key, w] : edges_) out.edges_.emplace(key, w * factor);
    return out;
}

FlowNetwork FlowNetwork::permuted(std::span<const std::size_t> permutation) const {
    if (permutation.size() != node_count()) throw Error("flownet", "permutation size mismatch");
    std::vector<std::string> ids(node_count());
    std::vector<bool> seen(node_count(), false);
    for (std::size_t i = 0; i < node_count(); ++i) {
        const auto target = permutation[i];
        if (target >= node_count() || seen[target]) throw Error("flownet", "invalid permutation");
        seen[target] = true;
        ids[target] = nodes_.id(i);
    }
    FlowNetwork out(NodeSet(std::move(ids)), behaviour_, period_);
    for (const auto& [key, w] : edges_) out.edges_.emplace(EdgeKey{permutation[key.first], permutation[key.second]}, w);
    return out;
}

FlowNetwork aggregate(std::span<const FlowNetwork> networks, Period period) {
    if (networks.empty()) throw Error("flownet", "nothing to aggregate");
    FlowNetwork out(networks.front().nodes(), networks.front().behaviour(), period);
    for (const auto& net : networks) {
        if (!(net.nodes() == out.nodes()) || net.behaviour() != out.behaviour())
            throw Error("flownet", "cannot aggregate networks with different nodes or behaviour");
        for (const auto& [key, w] : net.edges()) out.add_flow(key.first, key.second, w);
    }
    return out;
}

} // namespace odflow
