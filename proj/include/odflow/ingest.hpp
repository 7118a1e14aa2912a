#pragma once

#include "odflow/error.hpp"
#include "odflow/gravity.hpp"
#include "odflow/municipality.hpp"
#include "odflow/network.hpp"

#include <array>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace odflow {

/// One rejected row (or file-level problem) with provenance.
struct Diagnostic {
    std::string file;
    std::size_t line = 0; ///< 0 for file-level problems
    std::string message;

    std::string to_string() const;
};

/// Raised when an input cannot be used at all (missing file, wrong header).
class IngestError : public Error {
public:
    explicit IngestError(std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

// Exact header rows of the input files.
inline constexpr std::string_view kFlowsHeader = "month,origin_id,destination_id,behaviour,count";
inline constexpr std::string_view kTravelTimesHeader = "origin_id,destination_id,minutes";
inline constexpr std::string_view kReferencePresencesHeader = "id,year,presences";
inline constexpr std::string_view kReferenceClassesHeader = "id,class";
/// Column names of municipalities.csv, in order.
const std::vector<std::string>& municipality_columns();

struct FlowRecord {
    int month = 0;
    std::string origin;
    std::string destination;
    Behaviour behaviour = Behaviour::Tourists;
    long long count = 0;
};

/// Monthly networks for both behaviours plus everything rejected on the way.
struct FlowLoad {
    std::vector<FlowNetwork> networks; ///< tourists months 1-12, then visitors months 1-12
    std::vector<Diagnostic> rejected;
    std::vector<std::string> warnings;
    std::size_t accepted_rows = 0;
    double accepted_total = 0.0;

    const FlowNetwork& at(Behaviour behaviour, int month) const;
    std::span<const FlowNetwork> of(Behaviour behaviour) const;
};

/// Rows with an unknown id, a duplicate (month, origin, destination,
/// behaviour) key, malformed numbers, a self-loop, an out-of-range month or
/// a negative count are rejected with one diagnostic each.
FlowLoad parse_flows(std::istream& in, const std::string& source, const NodeSet& universe);
FlowLoad load_flows(const std::filesystem::path& path, const NodeSet& universe);

struct MunicipalityLoad {
    std::vector<MunicipalityRecord> records;
    std::vector<Diagnostic> rejected;

    NodeSet ids() const;
};

MunicipalityLoad parse_municipalities(std::istream& in, const std::string& source);
MunicipalityLoad load_municipalities(const std::filesystem::path& path);

/// Reads only the leading id,name columns of a municipality list.
NodeSet load_municipality_ids(const std::filesystem::path& path);

struct TravelTimeLoad {
    TravelTimeMatrix matrix;
    std::vector<Diagnostic> rejected;
};

TravelTimeLoad parse_travel_times(std::istream& in, const std::string& source, const NodeSet& universe);
TravelTimeLoad load_travel_times(const std::filesystem::path& path, const NodeSet& universe);

struct PresenceLoad {
    std::map<int, std::map<std::string, double>> by_year;
    std::vector<Diagnostic> rejected;
};

PresenceLoad load_reference_presences(const std::filesystem::path& path);

struct ClassLoad {
    std::map<std::string, std::string> classes;
    std::vector<Diagnostic> rejected;
};

/// Accepted classes: Cultural, Mountain, Lake, NotSpecific, Metropolies.
ClassLoad load_reference_classes(const std::filesystem::path& path);

/// Metropolies always becomes NotSpecific. With `merge_cultural_lake`,
/// Cultural and Lake become CulturalLake.
std::map<std::string, std::string> remap_reference_classes(const std::map<std::string, std::string>& classes,
                                                           bool merge_cultural_lake);

struct ReferenceCheck {
    double r = 0.0;
    double p_value = 1.0;
    double coverage_ratio = 0.0;
    std::size_t common = 0;
};

/// Pearson correlation over the shared ids and the share of the reference
/// total captured by `presences` on those ids.
ReferenceCheck validate_against_reference(const std::map<std::string, double>& presences,
                                          const std::map<std::string, double>& reference);

struct MonthlySeries {
    std::array<double, 12> tourists{};
    std::array<double, 12> visitors{};
};

MonthlySeries monthly_series(std::span<const FlowNetwork> networks);

// Writers emitting the exact input schemas.
void write_flows_csv(std::ostream& out, std::span<const FlowNetwork> networks);
void write_municipalities_csv(std::ostream& out, std::span<const MunicipalityRecord> records);
void write_travel_times_csv(std::ostream& out, const TravelTimeMatrix& tt);
void write_reference_presences_csv(std::ostream& out, int year, const std::map<std::string, double>& presences);
void write_reference_classes_csv(std::ostream& out, const std::map<std::string, std::string>& classes,
                                 std::span<const std::string> order);

} // namespace odflow
