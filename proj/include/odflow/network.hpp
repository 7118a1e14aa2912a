#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace odflow {

enum class Behaviour { Tourists, Visitors };

std::string_view to_string(Behaviour b) noexcept;
/// Accepts "tourists" / "visitors" (case-insensitive).
Behaviour parse_behaviour(std::string_view text);

inline constexpr Behaviour kBehaviours[] = {Behaviour::Tourists, Behaviour::Visitors};

/// A calendar month (1-12) or the whole-year aggregate.
class Period {
public:
    static Period month(int m);
    static constexpr Period year() noexcept { return Period{}; }

    bool is_year() const noexcept { return month_ == 0; }
    int month_index() const noexcept { return month_; }
    /// "01".."12" or "year".
    std::string label() const;

    auto operator<=>(const Period&) const = default;

private:
    constexpr Period() noexcept = default;
    int month_ = 0;
};

Period parse_period(std::string_view text);

/// Ordered set of municipality ids. Ids are opaque strings.
class NodeSet {
public:
    NodeSet() = default;
    explicit NodeSet(std::vector<std::string> ids);

    std::size_t size() const noexcept { return ids_.size(); }
    bool empty() const noexcept { return ids_.empty(); }
    const std::string& id(std::size_t index) const { return ids_.at(index); }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    std::optional<std::size_t> find(std::string_view id) const;
    bool contains(std::string_view id) const { return find(id).has_value(); }
    /// Throws Error("flownet", "unknown node ...") when absent.
    std::size_t index_of(std::string_view id) const;

    bool operator==(const NodeSet& other) const { return ids_ == other.ids_; }

private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct Arc {
    std::size_t target;
    double weight;
};

/// Directed weighted flow graph for one (behaviour, period) pair.
///
/// Invariants: no self-loops, weights are finite and strictly positive
/// (zero-weight edges are never stored), every endpoint is a node.
class FlowNetwork {
public:
    using EdgeKey = std::pair<std::size_t, std::size_t>;

    FlowNetwork(NodeSet nodes, Behaviour behaviour, Period period);

    /// Accumulates `weight` onto the (origin, destination) edge.
    void add_flow(std::size_t origin, std::size_t destination, double weight);
    void add_flow(std::string_view origin, std::string_view destination, double weight);

    double weight(std::size_t origin, std::size_t destination) const;

    const NodeSet& nodes() const noexcept { return nodes_; }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    Behaviour behaviour() const noexcept { return behaviour_; }
    Period period() const noexcept { return period_; }
    const std::map<EdgeKey, double>& edges() const noexcept { return edges_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    double total_weight() const;

    std::vector<std::vector<Arc>> out_arcs() const;
    std::vector<std::vector<Arc>> in_arcs() const;

    FlowNetwork scaled(double factor) const;
    /// Relabels node i as permutation[i]; node ids travel with their edges.
    FlowNetwork permuted(std::span<const std::size_t> permutation) const;

private:
    NodeSet nodes_;
    Behaviour behaviour_;
    Period period_;
    std::map<EdgeKey, double> edges_;
};

/// Sums the edge weights of networks that share a node set and behaviour.
FlowNetwork aggregate(std::span<const FlowNetwork> networks, Period period);

} // namespace odflow
