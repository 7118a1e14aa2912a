#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "odflow/error.hpp"

namespace odflow {

/// Municipalities x variables table.
struct FeatureFrame {
    std::vector<std::string> ids;
    std::vector<std::string> columns;
    Eigen::MatrixXd values; ///< rows = ids, cols = columns
    bool standardized = false;
};

/// Column z-scores using the sample standard deviation. Throws on a
/// constant column, naming it.
FeatureFrame standardize(const FeatureFrame& frame);

enum class ClusterMethod { Ward, Single, Complete, Average, Mcquitty, Median, Centroid, KMeans };

inline constexpr ClusterMethod kAllClusterMethods[] = {
    ClusterMethod::Ward,     ClusterMethod::Single, ClusterMethod::Complete, ClusterMethod::Average,
    ClusterMethod::Mcquitty, ClusterMethod::Median, ClusterMethod::Centroid, ClusterMethod::KMeans};

std::string_view to_string(ClusterMethod m) noexcept;
ClusterMethod parse_cluster_method(std::string_view text);
bool is_hierarchical(ClusterMethod m) noexcept;

struct Merge {
    std::size_t left;  ///< smallest member index of the first cluster
    std::size_t right; ///< smallest member index of the second cluster
    double height;
    std::size_t size; ///< size of the merged cluster
};

/// Full agglomeration history, n - 1 merges.
struct Dendrogram {
    ClusterMethod method;
    std::size_t n = 0;
    std::vector<Merge> merges;
};

/// Lance-Williams agglomeration on Euclidean distances. Ward, Median and
/// Centroid update squared distances and report heights as their square
/// root. Ties are broken by the lowest (i, j) cluster pair.
Dendrogram agglomerate(const Eigen::MatrixXd& points, ClusterMethod method);

/// Labels 0..k-1 after replaying the first n - k merges, numbered by first
/// appearance in row order.
std::vector<int> cut_tree(const Dendrogram& tree, std::size_t k);

struct ClusterSolution {
    ClusterMethod method = ClusterMethod::Ward;
    std::size_t k = 0;
    std::vector<std::string> ids;
    std::vector<int> labels;
    double silhouette = 0.0;
    std::optional<double> inertia;     ///< k-means only
    std::vector<double> inertia_trace; ///< k-means only, per Lloyd iteration of the best restart
    std::vector<std::string> label_names;

    std::map<std::string, int> assignment() const;
};

ClusterSolution hierarchical(const FeatureFrame& frame, ClusterMethod method, std::size_t k);

struct KMeansOptions {
    std::size_t restarts = 10;
    std::size_t max_iterations = 300;
};

/// Lloyd's algorithm from farthest-point seeding; the first seed of each
/// restart is drawn from a generator seeded with `seed`. A cluster that
/// empties is re-seeded at the point farthest from its assigned centroid.
/// Returns the restart with the smallest within-cluster sum of squares.
ClusterSolution kmeans(const FeatureFrame& frame, std::size_t k, std::uint64_t seed, const KMeansOptions& options = {});

double within_cluster_sum_of_squares(const Eigen::MatrixXd& points, std::span<const int> labels);

struct SilhouetteResult {
    double overall = 0.0;
    std::vector<double> per_point;
};

/// Mean silhouette on Euclidean distances. Singleton clusters score 0.
SilhouetteResult silhouette(const Eigen::MatrixXd& points, std::span<const int> labels);

/// (1/N) * sum over clusters of the largest overlap with a reference class.
template <class Label, class Class>
double purity(const std::map<std::string, Label>& assignment, const std::map<std::string, Class>& reference) {
    if (assignment.empty()) throw Error("clustering", "purity of an empty assignment");
    if (assignment.size() != reference.size()) throw Error("clustering", "assignment and reference cover different ids");
    std::map<Label, std::map<Class, std::size_t>> overlap;
    for (const auto& [id, label] : assignment) {
        const auto it = reference.find(id);
        if (it == reference.end()) throw Error("clustering", "assignment id '" + id + "' missing from reference");
        ++overlap[label][it->second];
    }
    std::size_t total = 0;
    for (const auto& [label, classes] : overlap) {
        std::size_t best = 0;
        for (const auto& [cls, count] : classes) best = std::max(best, count);
        total += best;
    }
    return static_cast<double>(total) / static_cast<double>(assignment.size());
}

struct SelectKRow {
    ClusterMethod method;
    std::size_t k;
    double silhouette;
    std::optional<double> purity;
    bool selected = false; ///< argmax silhouette for the method (smallest k on ties)
};

struct SelectKOptions {
    std::uint64_t seed = 42;
    KMeansOptions kmeans;
};

/// Silhouette (and purity when `reference` is given) for every (method, k).
std::vector<SelectKRow> select_k(const FeatureFrame& frame, std::span<const ClusterMethod> methods,
                                 std::span<const std::size_t> k_values,
                                 const std::map<std::string, std::string>* reference = nullptr,
                                 const SelectKOptions& options = {});

/// Names clusters with the one-to-one mapping onto `names` that maximizes
/// agreement with `reference` (k <= names.size()). Ties resolve to the
/// lexicographically first permutation.
std::vector<std::string> name_clusters(const ClusterSolution& solution,
                                       const std::map<std::string, std::string>& reference,
                                       std::span<const std::string> names);

} // namespace odflow
