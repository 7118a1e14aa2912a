#pragma once

#include "odflow/centrality.hpp"
#include "odflow/municipality.hpp"
#include "odflow/network.hpp"
#include "odflow/stats.hpp"

#include <array>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace odflow {

/// Complete or partial matrix of origin->destination travel times in minutes.
class TravelTimeMatrix {
public:
    explicit TravelTimeMatrix(NodeSet nodes);

    const NodeSet& nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    /// Sets a distinct-pair time; must be finite and > 0.
    void set(std::size_t origin, std::size_t destination, double minutes);
    bool has(std::size_t origin, std::size_t destination) const;
    /// 0 on the diagonal; throws for a missing pair.
    double at(std::size_t origin, std::size_t destination) const;
    double at(std::string_view origin, std::string_view destination) const;

    bool complete() const;
    bool symmetric() const;
    /// Throws Error("gravity", ...) naming the first missing pair.
    void require_complete() const;

private:
    NodeSet nodes_;
    std::vector<double> minutes_; // NaN marks a missing pair
};

/// Attraction counts per node, indexed like kAttractionKinds.
class AttractionTable {
public:
    AttractionTable(NodeSet nodes, std::vector<std::array<double, 7>> counts);
    static AttractionTable from_records(const NodeSet& nodes, std::span<const MunicipalityRecord> records);

    const NodeSet& nodes() const noexcept { return nodes_; }
    double count(std::size_t node, AttractionKind kind) const {
        return counts_.at(node)[static_cast<std::size_t>(kind)];
    }

private:
    NodeSet nodes_;
    std::vector<std::array<double, 7>> counts_;
};

/// Intervening-opportunity feature for one origin/destination pair.
///
/// S holds every node k other than origin and destination with
/// tt(origin, k) < tt(origin, destination). The value is the mean of
/// tt(origin, k) over S times the summed attraction count over S, or 0 when
/// S is empty.
double inside_attraction(std::size_t origin, std::size_t destination, AttractionKind kind,
                         const TravelTimeMatrix& tt, const AttractionTable& attractions);
double inside_attraction(std::string_view origin, std::string_view destination, std::string_view kind,
                         const TravelTimeMatrix& tt, const AttractionTable& attractions);
/// All seven kinds in one pass, kAttractionKinds order.
std::array<double, 7> inside_attractions(std::size_t origin, std::size_t destination, const TravelTimeMatrix& tt,
                                         const AttractionTable& attractions);

enum class ClusterCategory { NotSpecific, CulturalLake, Mountain };

std::string_view to_string(ClusterCategory c) noexcept;
ClusterCategory parse_cluster_category(std::string_view text);

/// log(x + zero_offset) for quantities that may be zero; plain log elsewhere.
struct LogPolicy {
    double zero_offset = 1.0;

    double zeroable(double x) const;
    static double strict(double x, std::string_view what);
};

struct EndpointBlock {
    double log_income = 0.0;
    double log_population = 0.0;
    std::array<double, 6> log_centrality{}; ///< kAllMetrics order
    ClusterCategory category = ClusterCategory::NotSpecific;
};

struct GravityObservation {
    std::string origin;
    std::string destination;
    Period period = Period::year();
    double log_flow = 0.0;
    EndpointBlock origin_block;
    EndpointBlock destination_block;
    double log_travel_time = 0.0;
    std::array<double, 7> log_inside{}; ///< kAttractionKinds order

    /// The 28 non-intercept regressors in gravity_term_names() order.
    std::array<double, 28> regressors() const;
};

/// origin block (10), destination block (10), log travel time, 7 inside terms.
const std::vector<std::string>& gravity_term_names();

/// Immutable inputs shared across periods.
struct GravityContext {
    const NodeSet& nodes;
    std::span<const MunicipalityRecord> municipalities;
    const std::map<std::string, ClusterCategory>& clusters;
    const TravelTimeMatrix& travel_times;
    const AttractionTable& attractions;
    LogPolicy log_policy;
};

/// One observation per positive tourist flow. `visitor_centralities` must hold
/// all six metrics computed on the visitors network of the same period.
std::vector<GravityObservation> assemble_gravity(const FlowNetwork& tourists,
                                                 std::span<const CentralityVector> visitor_centralities,
                                                 const GravityContext& context);

/// OLS fit of the log-linear gravity model; all observations must share `period`.
RegressionResult fit_gravity(std::span<const GravityObservation> observations, Period period);

/// Plot-ready long format: period,term,estimate,ci_low,ci_high,stars
void write_gravity_long_csv(std::ostream& out, Period period, const RegressionResult& result, bool header = false);

} // namespace odflow
