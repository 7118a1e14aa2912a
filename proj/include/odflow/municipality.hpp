#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace odflow {

/// Attraction counts used for the intervening-opportunity features.
enum class AttractionKind {
    Museums,
    CulturalHeritage,
    SkiRoutes,
    FarmHouses,
    IntermodalNodes,
    MethaneDistributors,
    Festivals,
};

inline constexpr std::array<AttractionKind, 7> kAttractionKinds = {
    AttractionKind::Museums,         AttractionKind::CulturalHeritage,    AttractionKind::SkiRoutes,
    AttractionKind::FarmHouses,      AttractionKind::IntermodalNodes,     AttractionKind::MethaneDistributors,
    AttractionKind::Festivals};

std::string_view to_string(AttractionKind kind) noexcept;
/// Throws Error("gravity", "unknown attraction kind ...").
AttractionKind parse_attraction_kind(std::string_view text);

/// Socio-economic clustering variables, in the order of the clustering frame.
inline constexpr std::array<std::string_view, 13> kClusterVariables = {
    "income_pc",    "soil_usage",      "waste_sorting",      "landslide_risk",
    "flood_risk",   "bank_offices",    "drinking_water",     "schools",
    "pharmacies",   "social_services", "healthcare_infrastructures",
    "population_density", "firms"};

/// Presence/absence drivers of the centrality-delta regression.
struct DriverDummies {
    int cultural_heritage = 0;
    int ski_routes = 0;
    int methane_distributors = 0;
    int festivals = 0;
    int farm_houses = 0;
    int intermodal_nodes = 0;
    int natural_reserves = 0;
};

/// Everything the pipeline knows about one municipality.
struct MunicipalityRecord {
    std::string id;
    std::string name;
    double population = 0.0;
    double income_pc = 0.0;          ///< income per contribuent
    double accommodation_beds = 0.0; ///< beds per inhabitant
    double book_shops = 0.0;         ///< book shops per inhabitant
    std::array<double, 7> attractions{}; ///< counts, indexed like kAttractionKinds
    DriverDummies dummies;
    /// Indexed like kClusterVariables; entry 0 mirrors income_pc.
    std::array<double, 13> cluster_variables{};

    double attraction(AttractionKind kind) const { return attractions[static_cast<std::size_t>(kind)]; }
};

} // namespace odflow
