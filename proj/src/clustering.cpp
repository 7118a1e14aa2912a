#include "odflow/clustering.hpp"

#include "odflow/random.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numeric>

namespace odflow {

namespace {

std::string lower(std::string_view text) {
    std::string out(text);
    std::ranges::transform(out, out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool uses_squared_distances(ClusterMethod m) {
    return m == ClusterMethod::Ward || m == ClusterMethod::Median || m == ClusterMethod::Centroid;
}

std::vector<int> relabel_by_first_appearance(std::span<const int> labels) {
    std::map<int, int> mapping;
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto [it, inserted] = mapping.emplace(labels[i], static_cast<int>(mapping.size()));
        out[i] = it->second;
    }
    return out;
}

std::size_t count_labels(std::span<const int> labels) {
    std::set<int> distinct(labels.begin(), labels.end());
    return distinct.size();
}

void require_standardized(const FeatureFrame& frame) {
    if (!frame.standardized) throw Error("clustering", "frame must be standardized before clustering");
    if (static_cast<std::size_t>(frame.values.rows()) != frame.ids.size())
        throw Error("clustering", "frame ids and rows differ");
}

} // namespace

std::string_view to_string(ClusterMethod m) noexcept {
    switch (m) {
    case ClusterMethod::Ward: return "ward";
    case ClusterMethod::Single: return "single";
    case ClusterMethod::Complete: return "complete";
    case ClusterMethod::Average: return "average";
    case ClusterMethod::Mcquitty: return "mcquitty";
    case ClusterMethod::Median: return "median";
    case ClusterMethod::Centroid: return "centroid";
    case ClusterMethod::KMeans: return "kmeans";
    }
    return "unknown";
}

ClusterMethod parse_cluster_method(std::string_view text) {
    const auto key = lower(text);
    for (auto m : kAllClusterMethods)
        if (key == to_string(m)) return m;
    if (key == "k-means") return ClusterMethod::KMeans;
    throw Error("clustering", fmt::format("unknown clustering method '{}'", text));
}

bool is_hierarchical(ClusterMethod m) noexcept { return m != ClusterMethod::KMeans; }

FeatureFrame standardize(const FeatureFrame& frame) {
    const auto n = frame.values.rows();
    if (n < 2) throw Error("clustering", "standardization needs at least two rows");
    FeatureFrame out = frame;
    for (Eigen::Index j = 0; j < frame.values.cols(); ++j) {
        const auto col = frame.values.col(j);
        const double mean = col.mean();
        const double var = (col.array() - mean).square().sum() / static_cast<double>(n - 1);
        const auto name = j < static_cast<Eigen::Index>(frame.columns.size())
                              ? frame.columns[static_cast<std::size_t>(j)]
                              : fmt::format("column {}", j);
        if (!(var > 0.0) || (col.array() == col(0)).all())
            throw Error("clustering", fmt::format("constant column '{}'", name));
        out.values.col(j) = (col.array() - mean) / std::sqrt(var);
    }
    out.standardized = true;
    return out;
}

Dendrogram agglomerate(const Eigen::MatrixXd& points, ClusterMethod method) {
    if (!is_hierarchical(method)) throw Error("clustering", "k-means has no dendrogram");
    const auto n = static_cast<std::size_t>(points.rows());
    if (n < 2) throw Error("clustering", "agglomeration needs at least two points");
    const bool squared = uses_squared_distances(method);

    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double sq = (points.row(static_cast<Eigen::Index>(i)) - points.row(static_cast<Eigen::Index>(j)))
                                  .squaredNorm();
            d[i * n + j] = d[j * n + i] = squared ? sq : std::sqrt(sq);
        }

    std::vector<std::size_t> size(n, 1);
    std::vector<bool> active(n, true);
    Dendrogram tree{method, n, {}};
    tree.merges.reserve(n - 1);

    for (std::size_t step = 0; step + 1 < n; ++step) {
        std::size_t bi = n, bj = n;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!active[j]) continue;
                if (d[i * n + j] < best) {
                    best = d[i * n + j];
                    bi = i;
                    bj = j;
                }
            }
        }
        if (bi == n) throw Error("clustering", "non-finite dissimilarities");

        const double ni = static_cast<double>(size[bi]);
        const double nj = static_cast<double>(size[bj]);
        const double dij = best;
        for (std::size_t h = 0; h < n; ++h) {
            if (!active[h] || h == bi || h == bj) continue;
            const double nh = static_cast<double>(size[h]);
            const double dih = d[bi * n + h];
            const double djh = d[bj * n + h];
            double v = 0.0;
            switch (method) {
            case ClusterMethod::Single: v = std::min(dih, djh); break;
            case ClusterMethod::Complete: v = std::max(dih, djh); break;
            case ClusterMethod::Average: v = (ni * dih + nj * djh) / (ni + nj); break;
            case ClusterMethod::Mcquitty: v = 0.5 * dih + 0.5 * djh; break;
            case ClusterMethod::Median: v = 0.5 * dih + 0.5 * djh - 0.25 * dij; break;
            case ClusterMethod::Centroid: {
                const double s = ni + nj;
                v = (ni * dih + nj * djh) / s - ni * nj * dij / (s * s);
                break;
            }
            case ClusterMethod::Ward: {
                const double s = ni + nj + nh;
                v = ((ni + nh) * dih + (nj + nh) * djh - nh * dij) / s;
                break;
            }
            case ClusterMethod::KMeans: break;
            }
            d[bi * n + h] = d[h * n + bi] = v;
        }
        active[bj] = false;
        size[bi] += size[bj];
        const double height = squared ? std::sqrt(std::max(dij, 0.0)) : dij;
        tree.merges.push_back({bi, bj, height, size[bi]});
    }
    return tree;
}

std::vector<int> cut_tree(const Dendrogram& tree, std::size_t k) {
    const auto n = tree.n;
    if (k < 1 || k > n) throw Error("clustering", fmt::format("cannot cut {} points into {} clusters", n, k));
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t m = 0; m < n - k; ++m) {
        const auto a = find(tree.merges[m].left);
        const auto b = find(tree.merges[m].right);
        parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<int> roots(n);
    for (std::size_t i = 0; i < n; ++i) roots[i] = static_cast<int>(find(i));
    return relabel_by_first_appearance(roots);
}

std::map<std::string, int> ClusterSolution::assignment() const {
    std::map<std::string, int> out;
    for (std::size_t i = 0; i < ids.size(); ++i) out.emplace(ids[i], labels[i]);
    return out;
}

ClusterSolution hierarchical(const FeatureFrame& frame, ClusterMethod method, std::size_t k) {
    require_standardized(frame);
    const auto n = frame.ids.size();
    if (k < 2 || k + 1 > n) throw Error("clustering", fmt::format("k = {} outside [2, {}]", k, n - 1));
    const auto tree = agglomerate(frame.values, method);
    ClusterSolution s;
    s.method = method;
    s.k = k;
    s.ids = frame.ids;
    s.labels = cut_tree(tree, k);
    s.silhouette = silhouette(frame.values, s.labels).overall;
    return s;
}

double within_cluster_sum_of_squares(const Eigen::MatrixXd& points, std::span<const int> labels) {
    std::map<int, std::pair<Eigen::VectorXd, std::size_t>> sums;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto& [sum, count] = sums[labels[i]];
        if (count == 0) sum = Eigen::VectorXd::Zero(points.cols());
        sum += points.row(static_cast<Eigen::Index>(i)).transpose();
        ++count;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto& [sum, count] = sums[labels[i]];
        total += (points.row(static_cast<Eigen::Index>(i)).transpose() - sum / static_cast<double>(count)).squaredNorm();
    }
    return total;
}

namespace {

struct LloydRun {
    std::vector<int> labels;
    double inertia = 0.0;
    std::vector<double> trace;
};

LloydRun lloyd(const Eigen::MatrixXd& x, std::size_t k, std::size_t first, std::size_t max_iterations) {
    const auto n = static_cast<std::size_t>(x.rows());
    const auto row = [&](std::size_t i) { return x.row(static_cast<Eigen::Index>(i)); };

    // Farthest-point seeding.
    std::vector<std::size_t> seeds{first};
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    while (seeds.size() < k) {
        const auto last = seeds.back();
        std::size_t pick = 0;
        double far = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], (row(i) - row(last)).squaredNorm());
            if (nearest[i] > far) {
                far = nearest[i];
                pick = i;
            }
        }
        seeds.push_back(pick);
    }
    Eigen::MatrixXd centroids(static_cast<Eigen::Index>(k), x.cols());
    for (std::size_t c = 0; c < k; ++c) centroids.row(static_cast<Eigen::Index>(c)) = row(seeds[c]);

    LloydRun run;
    run.labels.assign(n, -1);
    for (std::size_t it = 0; it < max_iterations; ++it) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double dd = (row(i) - centroids.row(static_cast<Eigen::Index>(c))).squaredNorm();
                if (dd < best_d) {
                    best_d = dd;
                    best = static_cast<int>(c);
                }
            }
            if (run.labels[i] != best) {
                run.labels[i] = best;
                changed = true;
            }
        }
        // Re-seed empty clusters at the point farthest from its centroid.
        std::vector<std::size_t> counts(k, 0);
        for (int l : run.labels) ++counts[static_cast<std::size_t>(l)];
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            std::size_t pick = n;
            double far = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const auto l = static_cast<std::size_t>(run.labels[i]);
                if (counts[l] < 2) continue;
                const double dd = (row(i) - centroids.row(static_cast<Eigen::Index>(l))).squaredNorm();
                if (dd > far) {
                    far = dd;
                    pick = i;
                }
            }
            if (pick == n) throw Error("clustering", "k-means cannot fill an empty cluster");
            --counts[static_cast<std::size_t>(run.labels[pick])];
            run.labels[pick] = static_cast<int>(c);
            counts[c] = 1;
            changed = true;
        }
        centroids.setZero();
        for (std::size_t i = 0; i < n; ++i) centroids.row(run.labels[i]) += row(i);
        for (std::size_t c = 0; c < k; ++c)
            centroids.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(counts[c]);
        run.trace.push_back(within_cluster_sum_of_squares(x, run.labels));
        if (!changed) break;
    }
    run.inertia = run.trace.back();
    return run;
}

} // namespace

ClusterSolution kmeans(const FeatureFrame& frame, std::size_t k, std::uint64_t seed, const KMeansOptions& options) {
    require_standardized(frame);
    const auto n = frame.ids.size();
    if (k < 1 || k > n) throw Error("clustering", fmt::format("k = {} outside [1, {}]", k, n));
    if (options.restarts == 0) throw Error("clustering", "k-means needs at least one restart");

    SplitMix64 rng(seed);
    std::optional<LloydRun> best;
    for (std::size_t r = 0; r < options.restarts; ++r) {
        const auto first = static_cast<std::size_t>(rng.below(n));
        auto run = lloyd(frame.values, k, first, options.max_iterations);
        if (!best || run.inertia < best->inertia) best = std::move(run);
    }

    ClusterSolution s;
    s.method = ClusterMethod::KMeans;
    s.k = k;
    s.ids = frame.ids;
    s.labels = relabel_by_first_appearance(best->labels);
    s.inertia = best->inertia;
    s.inertia_trace = best->trace;
    s.silhouette = k >= 2 && count_labels(s.labels) >= 2 ? silhouette(frame.values, s.labels).overall : 0.0;
    return s;
}

SilhouetteResult silhouette(const Eigen::MatrixXd& points, std::span<const int> labels) {
    const auto n = labels.size();
    if (static_cast<std::size_t>(points.rows()) != n) throw Error("clustering", "labels and points differ in length");
    std::map<int, std::size_t> sizes;
    for (int l : labels) ++sizes[l];
    if (sizes.size() < 2) throw Error("clustering", "silhouette undefined");

    SilhouetteResult result;
    result.per_point.resize(n, 0.0);
    std::map<int, double> sum_to;
    for (std::size_t i = 0; i < n; ++i) {
        if (sizes[labels[i]] == 1) continue;
        sum_to.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            sum_to[labels[j]] +=
                (points.row(static_cast<Eigen::Index>(i)) - points.row(static_cast<Eigen::Index>(j))).norm();
        }
        const double a = sum_to[labels[i]] / static_cast<double>(sizes[labels[i]] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (const auto& [label, total] : sum_to)
            if (label != labels[i]) b = std::min(b, total / static_cast<double>(sizes[label]));
        const double denom = std::max(a, b);
        result.per_point[i] = denom > 0.0 ? (b - a) / denom : 0.0;
    }
    double total = 0.0;
    for (double s : result.per_point) total += s;
    result.overall = total / static_cast<double>(n);
    return result;
}

std::vector<SelectKRow> select_k(const FeatureFrame& frame, std::span<const ClusterMethod> methods,
                                 std::span<const std::size_t> k_values,
                                 const std::map<std::string, std::string>* reference, const SelectKOptions& options) {
    require_standardized(frame);
    const auto n = frame.ids.size();
    for (auto k : k_values)
        if (k < 2 || k + 1 > n) throw Error("clustering", fmt::format("k = {} outside [2, {}]", k, n - 1));

    std::vector<SelectKRow> rows;
    for (auto method : methods) {
        std::optional<Dendrogram> tree;
        if (is_hierarchical(method)) tree = agglomerate(frame.values, method);
        const auto first = rows.size();
        for (auto k : k_values) {
            ClusterSolution s;
            if (tree) {
                s.ids = frame.ids;
                s.labels = cut_tree(*tree, k);
                s.silhouette = silhouette(frame.values, s.labels).overall;
            } else {
                s = kmeans(frame, k, options.seed, options.kmeans);
            }
            SelectKRow row{method, k, s.silhouette, std::nullopt, false};
            if (reference) row.purity = purity(s.assignment(), *reference);
            rows.push_back(row);
        }
        if (rows.size() > first) {
            auto best = rows.begin() + static_cast<std::ptrdiff_t>(first);
            for (auto it = best; it != rows.end(); ++it)
                if (it->silhouette > best->silhouette || (it->silhouette == best->silhouette && it->k < best->k))
                    best = it;
            best->selected = true;
        }
    }
    return rows;
}

std::vector<std::string> name_clusters(const ClusterSolution& solution,
                                       const std::map<std::string, std::string>& reference,
                                       std::span<const std::string> names) {
    const auto k = static_cast<std::size_t>(count_labels(solution.labels));
    if (k > names.size()) throw Error("clustering", fmt::format("{} clusters but only {} names", k, names.size()));
    // overlap[label][name index]
    std::vector<std::vector<std::size_t>> overlap(k, std::vector<std::size_t>(names.size(), 0));
    for (std::size_t i = 0; i < solution.ids.size(); ++i) {
        const auto it = reference.find(solution.ids[i]);
        if (it == reference.end())
            throw Error("clustering", fmt::format("no reference class for '{}'", solution.ids[i]));
        for (std::size_t m = 0; m < names.size(); ++m)
            if (names[m] == it->second) ++overlap[static_cast<std::size_t>(solution.labels[i])][m];
    }
    std::vector<std::size_t> perm(names.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::size_t> best_perm = perm;
    std::size_t best_score = 0;
    bool first = true;
    do {
        std::size_t score = 0;
        for (std::size_t l = 0; l < k; ++l) score += overlap[l][perm[l]];
        if (first || score > best_score) {
            best_score = score;
            best_perm = perm;
            first = false;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::vector<std::string> out(k);
    for (std::size_t l = 0; l < k; ++l) out[l] = names[best_perm[l]];
    return out;
}

} // namespace odflow
