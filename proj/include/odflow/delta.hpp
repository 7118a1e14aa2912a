#pragma once

#include "odflow/centrality.hpp"
#include "odflow/municipality.hpp"
#include "odflow/stats.hpp"

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace odflow {

/// Regressor names of the centrality-delta model, in column order.
inline constexpr std::array<std::string_view, 10> kDeltaDriverNames = {
    "income_pc",    "accommodation_beds", "cultural_heritage", "ski_routes",       "book_shops",
    "methane_distributors", "festivals",  "farm_houses",       "intermodal_nodes", "natural_reserves"};

/// Metrics whose tourists-vs-visitors variation is modelled.
inline constexpr std::array<Metric, 3> kDeltaMetrics = {Metric::Instrength, Metric::Betweenness,
                                                        Metric::LocalEfficiency};

inline constexpr std::size_t kDefaultMinDeltaObservations = 12;

struct DeltaDrivers {
    double income_pc = 0.0;
    double accommodation_beds = 0.0;
    double book_shops = 0.0;
    DriverDummies dummies;

    static DeltaDrivers from(const MunicipalityRecord& m);
    /// Values in kDeltaDriverNames order.
    std::array<double, 10> row() const;
};

struct DeltaObservation {
    std::string node;
    int month = 0;
    Metric metric = Metric::Instrength;
    double y = 0.0; ///< (tourists - visitors) / tourists, as a proportion
    DeltaDrivers drivers;
};

/// (T - V) / T for one node; nullopt when T == 0.
std::optional<double> delta_metric(const CentralityVector& tourist, const CentralityVector& visitor,
                                   std::string_view node);

/// One observation per node with a defined delta. Nodes missing from
/// `drivers` raise an error.
std::vector<DeltaObservation> build_delta_observations(const CentralityVector& tourist,
                                                       const CentralityVector& visitor,
                                                       const std::map<std::string, DeltaDrivers>& drivers);

/// OLS of the delta on an intercept and the ten drivers for one
/// (metric, month) slice of `observations`.
RegressionResult fit_delta_model(std::span<const DeltaObservation> observations, Metric metric, int month,
                                 std::size_t min_observations = kDefaultMinDeltaObservations);

/// Per-month fits for every month present in `observations`, ascending.
std::vector<std::pair<int, RegressionResult>> fit_delta_trajectory(
    std::span<const DeltaObservation> observations, Metric metric,
    std::size_t min_observations = kDefaultMinDeltaObservations);

/// Plot-ready long format: metric,month,term,estimate,ci_low,ci_high,p_value,stars
void write_delta_long_csv(std::ostream& out, Metric metric, int month, const RegressionResult& result,
                          bool header = false);

} // namespace odflow
