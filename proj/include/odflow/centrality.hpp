#pragma once

#include "odflow/network.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace odflow {

enum class Metric { Instrength, Outstrength, Betweenness, Authority, Hub, LocalEfficiency };

inline constexpr std::array<Metric, 6> kAllMetrics = {Metric::Instrength,  Metric::Outstrength,
                                                      Metric::Betweenness, Metric::Authority,
                                                      Metric::Hub,         Metric::LocalEfficiency};

std::string_view to_string(Metric m) noexcept;
Metric parse_metric(std::string_view text);

/// One value per network node for a single metric.
struct CentralityVector {
    Metric metric;
    Behaviour behaviour;
    Period period;
    NodeSet nodes;
    std::vector<double> values;

    double at(std::string_view node) const { return values.at(nodes.index_of(node)); }
};

/// How edge flows become path lengths.
enum class WeightMap {
    InverseWeight, ///< cost = 1 / flow, heavier flows are closer
    UnitLength,    ///< cost = 1 per hop
};

std::string_view to_string(WeightMap w) noexcept;
WeightMap parse_weight_map(std::string_view text);

/// Relative tolerance used to decide that two path costs are equal.
inline constexpr double kPathTieTolerance = 1e-12;

bool same_cost(double a, double b) noexcept;

/// All-pairs shortest path distances and shortest path counts.
class ShortestPathSummary {
public:
    ShortestPathSummary(std::size_t n, std::vector<double> distances, std::vector<double> counts);

    std::size_t node_count() const noexcept { return n_; }
    bool reachable(std::size_t from, std::size_t to) const { return std::isfinite(distance(from, to)); }
    /// +infinity when unreachable.
    double distance(std::size_t from, std::size_t to) const { return distances_[from * n_ + to]; }
    /// Number of distinct minimal-cost paths; 0 when unreachable, 1 on the diagonal.
    double path_count(std::size_t from, std::size_t to) const { return counts_[from * n_ + to]; }
    /// Number of minimal-cost from->to paths that visit `via` as an interior node.
    double through_count(std::size_t from, std::size_t to, std::size_t via) const;

private:
    std::size_t n_;
    std::vector<double> distances_;
    std::vector<double> counts_;
};

ShortestPathSummary shortest_paths(const FlowNetwork& net, WeightMap weight_map);

CentralityVector instrength(const FlowNetwork& net);
CentralityVector outstrength(const FlowNetwork& net);

/// Unnormalized betweenness: sum over ordered pairs (j, k), both distinct
/// from i, of the fraction of shortest j->k paths passing through i.
CentralityVector betweenness(const FlowNetwork& net, const ShortestPathSummary& sp);

struct HitsOptions {
    double tolerance = 1e-10;
    std::size_t max_iterations = 10000;
};

struct HitsResult {
    CentralityVector authority;
    CentralityVector hub;
    double principal_eigenvalue = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

/// Power iteration for hub and authority scores (authority ~ W^T hub,
/// hub ~ W authority, unit Euclidean norm). Throws on an edgeless network.
HitsResult hits(const FlowNetwork& net, const HitsOptions& options = {});

/// Average nodal efficiency inside the subgraph induced by each node's
/// in- and out-neighbours. Nodes with fewer than two neighbours get 0.
CentralityVector local_efficiency(const FlowNetwork& net, WeightMap weight_map);

/// Nodal efficiency of `source` in a dense cost matrix (row-major, +inf for
/// missing arcs): mean of 1/d over the other nodes, unreachable terms 0.
double nodal_efficiency(std::span<const double> costs, std::size_t n, std::size_t source);

struct CentralityOptions {
    WeightMap weight_map = WeightMap::InverseWeight;
    HitsOptions hits;
};

/// The six metrics in kAllMetrics order.
std::vector<CentralityVector> compute_centralities(const FlowNetwork& net, const CentralityOptions& options = {});

/// Long format: node_id,metric,period,behaviour,value.
void write_centrality_csv(std::ostream& out, std::span<const CentralityVector> vectors, bool header = true);

} // namespace odflow
