#include "odflow/centrality.hpp"

#include "odflow/csv.hpp"
#include "odflow/error.hpp"

#include <algorithm>
#include <cctype>
#include <fmt/format.h>
#include <functional>
#include <numeric>
#include <ostream>
#include <queue>

namespace odflow {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string lower(std::string_view text) {
    std::string out(text);
    std::ranges::transform(out, out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

double arc_cost(double weight, WeightMap map) { return map == WeightMap::InverseWeight ? 1.0 / weight : 1.0; }

CentralityVector empty_vector(const FlowNetwork& net, Metric metric) {
    return CentralityVector{metric, net.behaviour(), net.period(), net.nodes(),
                            std::vector<double>(net.node_count(), 0.0)};
}

void normalize(std::vector<double>& v) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0)
        for (double& x : v) x /= norm;
}

} // namespace

std::string_view to_string(Metric m) noexcept {
    switch (m) {
    case Metric::Instrength: return "instrength";
    case Metric::Outstrength: return "outstrength";
    case Metric::Betweenness: return "betweenness";
    case Metric::Authority: return "authority";
    case Metric::Hub: return "hub";
    case Metric::LocalEfficiency: return "efficiency";
    }
    return "unknown";
}

Metric parse_metric(std::string_view text) {
    const auto key = lower(text);
    for (auto m : kAllMetrics)
        if (key == to_string(m)) return m;
    if (key == "local_efficiency" || key == "localefficiency") return Metric::LocalEfficiency;
    throw Error("flownet", fmt::format("unknown metric '{}'", text));
}

std::string_view to_string(WeightMap w) noexcept { return w == WeightMap::InverseWeight ? "inverse" : "unit"; }

WeightMap parse_weight_map(std::string_view text) {
    const auto key = lower(text);
    if (key == "inverse" || key == "inverseweight" || key == "inverse_weight") return WeightMap::InverseWeight;
    if (key == "unit" || key == "unitlength" || key == "unit_length") return WeightMap::UnitLength;
    throw Error("flownet", fmt::format("unknown weight map '{}'", text));
}

bool same_cost(double a, double b) noexcept {
    if (a == b) return true;
    return std::abs(a - b) <= kPathTieTolerance * std::max(std::abs(a), std::abs(b));
}

ShortestPathSummary::ShortestPathSummary(std::size_t n, std::vector<double> distances, std::vector<double> counts)
    : n_(n), distances_(std::move(distances)), counts_(std::move(counts)) {
    if (distances_.size() != n * n || counts_.size() != n * n)
        throw Error("flownet", "shortest path summary size mismatch");
}

double ShortestPathSummary::through_count(std::size_t from, std::size_t to, std::size_t via) const {
    if (via == from || via == to || from == to) return 0.0;
    if (!reachable(from, via) || !reachable(via, to)) return 0.0;
    if (!same_cost(distance(from, via) + distance(via, to), distance(from, to))) return 0.0;
    return path_count(from, via) * path_count(via, to);
}

ShortestPathSummary shortest_paths(const FlowNetwork& net, WeightMap weight_map) {
    const std::size_t n = net.node_count();
    const auto out = net.out_arcs();
    const auto in = net.in_arcs();
    std::vector<double> dist_all(n * n, kInf);
    std::vector<double> count_all(n * n, 0.0);

    using Item = std::pair<double, std::size_t>;
    std::vector<double> dist(n);
    std::vector<bool> done(n);
    std::vector<std::size_t> order;
    order.reserve(n);

    for (std::size_t s = 0; s < n; ++s) {
        std::ranges::fill(dist, kInf);
        std::fill(done.begin(), done.end(), false);
        order.clear();
        std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
        dist[s] = 0.0;
        queue.emplace(0.0, s);
        while (!queue.empty()) {
            const auto [d, u] = queue.top();
            queue.pop();
            if (done[u]) continue;
            done[u] = true;
            order.push_back(u);
            for (const auto& arc : out[u]) {
                const double nd = d + arc_cost(arc.weight, weight_map);
                if (nd < dist[arc.target]) {
                    dist[arc.target] = nd;
                    queue.emplace(nd, arc.target);
                }
            }
        }
        // Settled order is non-decreasing in distance, so every predecessor of
        // v is counted before v.
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return dist[a] < dist[b]; });
        double* counts = &count_all[s * n];
        counts[s] = 1.0;
        for (auto v : order) {
            if (v == s) continue;
            double sigma = 0.0;
            for (const auto& arc : in[v]) {
                const auto u = arc.target;
                if (!done[u] || u == v) continue;
                if (same_cost(dist[u] + arc_cost(arc.weight, weight_map), dist[v])) sigma += counts[u];
            }
            counts[v] = sigma;
        }
        std::copy(dist.begin(), dist.end(), dist_all.begin() + static_cast<std::ptrdiff_t>(s * n));
    }
    return ShortestPathSummary(n, std::move(dist_all), std::move(count_all));
}

CentralityVector instrength(const FlowNetwork& net) {
    auto v = empty_vector(net, Metric::Instrength);
    for (const auto& [key, w] : net.edges()) v.values[key.second] += w;
    return v;
}

CentralityVector outstrength(const FlowNetwork& net) {
    auto v = empty_vector(net, Metric::Outstrength);
    for (const auto& [key, w] : net.edges()) v.values[key.first] += w;
    return v;
}

CentralityVector betweenness(const FlowNetwork& net, const ShortestPathSummary& sp) {
    const std::size_t n = net.node_count();
    if (sp.node_count() != n) throw Error("flownet", "shortest path summary does not match network");
    auto v = empty_vector(net, Metric::Betweenness);
    for (std::size_t i = 0; i < n; ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || !sp.reachable(j, i)) continue;
            const double dji = sp.distance(j, i);
            const double nji = sp.path_count(j, i);
            for (std::size_t k = 0; k < n; ++k) {
                if (k == i || k == j || !sp.reachable(i, k)) continue;
                if (!same_cost(dji + sp.distance(i, k), sp.distance(j, k))) continue;
                total += nji * sp.path_count(i, k) / sp.path_count(j, k);
            }
        }
        v.values[i] = total;
    }
    return v;
}

HitsResult hits(const FlowNetwork& net, const HitsOptions& options) {
    if (!(options.tolerance > 0.0)) throw Error("flownet", "HITS tolerance must be positive");
    if (net.node_count() == 0) throw Error("flownet", "HITS on an empty network");
    if (net.edge_count() == 0) throw Error("flownet", "degenerate network");

    const std::size_t n = net.node_count();
    struct Entry {
        std::size_t from, to;
        double w;
    };
    std::vector<Entry> entries;
    entries.reserve(net.edge_count());
    for (const auto& [key, w] : net.edges()) entries.push_back({key.first, key.second, w});

    auto times_w = [&](const std::vector<double>& x) { // (W x)_i = sum_j w_ij x_j
        std::vector<double> y(n, 0.0);
        for (const auto& e : entries) y[e.from] += e.w * x[e.to];
        return y;
    };
    auto times_wt = [&](const std::vector<double>& x) { // (W^T x)_j = sum_i w_ij x_i
        std::vector<double> y(n, 0.0);
        for (const auto& e : entries) y[e.to] += e.w * x[e.from];
        return y;
    };
    auto max_change = [](const std::vector<double>& a, const std::vector<double>& b) {
        double m = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
        return m;
    };

    std::vector<double> authority(n, 1.0 / std::sqrt(static_cast<double>(n)));
    std::vector<double> hub = times_w(authority);
    normalize(hub);

    HitsResult result{empty_vector(net, Metric::Authority), empty_vector(net, Metric::Hub), 0.0, 0, false};
    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
        auto next_authority = times_wt(hub);
        normalize(next_authority);
        auto next_hub = times_w(next_authority);
        normalize(next_hub);
        const double change = std::max(max_change(next_authority, authority), max_change(next_hub, hub));
        authority = std::move(next_authority);
        hub = std::move(next_hub);
        result.iterations = it;
        if (change <= options.tolerance) {
            result.converged = true;
            break;
        }
    }
    const auto wa = times_w(authority);
    double lambda = 0.0;
    for (double x : wa) lambda += x * x;
    result.principal_eigenvalue = lambda;
    result.authority.values = std::move(authority);
    result.hub.values = std::move(hub);
    return result;
}

double nodal_efficiency(std::span<const double> costs, std::size_t n, std::size_t source) {
    if (n < 2) return 0.0;
    std::vector<double> dist(n, kInf);
    std::vector<bool> done(n, false);
    dist[source] = 0.0;
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t u = n;
        double best = kInf;
        for (std::size_t v = 0; v < n; ++v)
            if (!done[v] && dist[v] < best) {
                best = dist[v];
                u = v;
            }
        if (u == n) break;
        done[u] = true;
        const double* row = &costs[u * n];
        for (std::size_t v = 0; v < n; ++v) {
            const double nd = best + row[v];
            if (nd < dist[v]) dist[v] = nd;
        }
    }
    double total = 0.0;
    for (std::size_t v = 0; v < n; ++v)
        if (v != source && std::isfinite(dist[v])) total += 1.0 / dist[v];
    return total / static_cast<double>(n - 1);
}

CentralityVector local_efficiency(const FlowNetwork& net, WeightMap weight_map) {
    const std::size_t n = net.node_count();
    const auto out = net.out_arcs();
    const auto in = net.in_arcs();
    auto v = empty_vector(net, Metric::LocalEfficiency);

    std::vector<std::size_t> position(n, n);
    std::vector<double> costs;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> neighbours;
        for (const auto& arc : out[i]) neighbours.push_back(arc.target);
        for (const auto& arc : in[i]) neighbours.push_back(arc.target);
        std::ranges::sort(neighbours);
        const auto [first, last] = std::ranges::unique(neighbours);
        neighbours.erase(first, last);
        const std::size_t k = neighbours.size();
        if (k < 2) continue;

        for (std::size_t a = 0; a < k; ++a) position[neighbours[a]] = a;
        costs.assign(k * k, kInf);
        for (std::size_t a = 0; a < k; ++a)
            for (const auto& arc : out[neighbours[a]]) {
                const auto b = position[arc.target];
                if (b < k && arc.target != i) costs[a * k + b] = arc_cost(arc.weight, weight_map);
            }
        double total = 0.0;
        for (std::size_t a = 0; a < k; ++a) total += nodal_efficiency(costs, k, a);
        v.values[i] = total / static_cast<double>(k);
        for (auto u : neighbours) position[u] = n;
    }
    return v;
}

std::vector<CentralityVector> compute_centralities(const FlowNetwork& net, const CentralityOptions& options) {
    std::vector<CentralityVector> out;
    out.reserve(kAllMetrics.size());
    out.push_back(instrength(net));
    out.push_back(outstrength(net));
    out.push_back(betweenness(net, shortest_paths(net, options.weight_map)));
    auto h = hits(net, options.hits);
    out.push_back(std::move(h.authority));
    out.push_back(std::move(h.hub));
    out.push_back(local_efficiency(net, options.weight_map));
    return out;
}

void write_centrality_csv(std::ostream& out, std::span<const CentralityVector> vectors, bool header) {
    if (header) out << "node_id,metric,period,behaviour,value\n";
    for (const auto& vec : vectors)
        for (std::size_t i = 0; i < vec.values.size(); ++i)
            out << fmt::format("{},{},{},{},{}\n", csv::escape(vec.nodes.id(i)), to_string(vec.metric), vec.period.label(),
                               to_string(vec.behaviour), vec.values[i]);
}

} // namespace odflow
