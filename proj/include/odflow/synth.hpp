#pragma once

#include "odflow/centrality.hpp"
#include "odflow/gravity.hpp"
#include "odflow/municipality.hpp"
#include "odflow/network.hpp"
#include "odflow/random.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace odflow {

struct AttributeRange {
    double lo = 0.0;
    double hi = 0.0;
};

/// Socio-economic blobs used for the clustering variables and the
/// reference classes. Blob 0 is NotSpecific, 1 CulturalLake, 2 Mountain.
struct ClusterBlobSpec {
    std::size_t k = 3;               ///< 1..3
    double separation = 1.0;         ///< 0 collapses all blobs onto one center
    double spread = 0.15;            ///< lognormal noise around each center
    std::vector<std::size_t> counts; ///< per-blob sizes; empty means an even split
};

struct SynthSpec {
    std::size_t node_count = 163;
    std::uint64_t seed = 1;
    int year = 2022;

    /// Tourist model, keyed by gravity_term_names() plus "(Intercept)".
    std::map<std::string, double> gravity_coefficients;
    double noise_sigma = 0.3;
    double edge_density = 0.12;
    /// Month m shifts the tourist intercept by amplitude * cos(2 pi (m - 7) / 12).
    double seasonal_amplitude = 0.3;
    bool round_flows = true;

    /// Visitor model keys: (Intercept), origin_log_population,
    /// destination_log_population, log_travel_time.
    std::map<std::string, double> visitor_coefficients;
    double visitor_noise_sigma = 0.3;
    double visitor_edge_density = 0.15;

    /// Keys: population, accommodation_beds, book_shops and
    /// <attraction kind>_count (upper bound of the count).
    std::map<std::string, AttributeRange> attribute_ranges;
    /// Keyed like the DriverDummies fields.
    std::map<std::string, double> dummy_probabilities;
    ClusterBlobSpec blobs;

    double plane_minutes = 100.0; ///< side of the square holding the coordinates
    double base_minutes = 5.0;    ///< added to every Euclidean distance
    double log_offset = 1.0;
    WeightMap weight_map = WeightMap::InverseWeight;

    static SynthSpec defaults();
    /// Applies one key=value setting; throws Error("synth", ...) on an unknown
    /// key or a malformed value.
    void set(const std::string& key, const std::string& value);
    /// Throws Error("synth", ...) when a field is out of range.
    void validate() const;
    /// Complete key=value text; parse(to_config()) reproduces the spec.
    std::string to_config() const;

    static SynthSpec parse(std::istream& in, const std::string& source);
    static SynthSpec load(const std::filesystem::path& path);

    /// Coefficients of the month's tourist model: intercept includes the
    /// seasonal shift.
    std::map<std::string, double> tourist_truth(int month) const;
};

struct SynthRegion {
    NodeSet nodes;
    std::vector<MunicipalityRecord> municipalities;
    std::vector<std::array<double, 2>> coordinates;
    TravelTimeMatrix travel_times;
    AttractionTable attractions;
    std::vector<std::size_t> blob; ///< blob index per node
    std::map<std::string, ClusterCategory> categories;
    std::map<std::string, std::string> reference_classes;
};

SynthRegion generate_region(const SynthSpec& spec);

struct SynthMonth {
    FlowNetwork tourists;
    FlowNetwork visitors;
    std::vector<CentralityVector> visitor_centralities;
};

/// One month of flows. Each month draws from its own stream, so a single
/// month equals the same month of generate_flows.
SynthMonth generate_month(const SynthSpec& spec, const SynthRegion& region, int month);

/// Tourists months 1-12, then visitors months 1-12.
std::vector<FlowNetwork> generate_flows(const SynthSpec& spec, const SynthRegion& region);

/// Visitors derived from tourists so that a node's instrength delta is
/// intercept + beds_slope * accommodation_beds + N(0, noise_sigma): every
/// inflow of node j is scaled by (1 - y_j).
struct DeltaScenario {
    double intercept = 0.2;
    double beds_slope = 0.2;
    double noise_sigma = 0.05;
};

FlowNetwork derive_visitors(const FlowNetwork& tourists, std::span<const MunicipalityRecord> municipalities,
                            const DeltaScenario& scenario, std::uint64_t seed);

/// Yearly tourist instrength per node.
std::map<std::string, double> yearly_presences(std::span<const FlowNetwork> networks);

/// Writes municipalities.csv, flows.csv, travel_times.csv,
/// reference_presences.csv, reference_classes.csv, synth.conf and an
/// odflow.conf pointing at them with relative paths.
void write_bundle(const std::filesystem::path& dir, const SynthSpec& spec, const SynthRegion& region,
                  std::span<const FlowNetwork> networks);

} // namespace odflow
