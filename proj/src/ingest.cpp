#include "odflow/ingest.hpp"

#include "odflow/csv.hpp"
#include "odflow/stats.hpp"

#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <set>
#include <tuple>

namespace odflow {

namespace {

constexpr std::array<std::string_view, 7> kDummyColumns = {
    "has_cultural_heritage", "has_ski_routes",        "has_methane_distributors", "has_festivals",
    "has_farm_houses",       "has_intermodal_nodes", "has_natural_reserves"};

std::vector<std::string> split_header(std::string_view header) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = header.find(',', start);
        out.emplace_back(header.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError({{path.string(), 0, "cannot open file"}});
    return in;
}

/// Reads the header row and checks it. Returns false on an empty stream.
bool expect_header(csv::Reader& reader, const std::string& source, const std::vector<std::string>& expected) {
    csv::Row row;
    if (!reader.next(row)) return false;
    if (row.fields != expected)
        throw IngestError({{source, row.line,
                            fmt::format("unexpected header '{}', expected '{}'", csv::join(row.fields),
                                        csv::join(expected))}});
    return true;
}

bool blank(const csv::Row& row) { return row.fields.size() == 1 && row.fields[0].empty(); }

} // namespace

std::string Diagnostic::to_string() const {
    if (line == 0) return fmt::format("{}: {}", file, message);
    return fmt::format("{}:{}: {}", file, line, message);
}

namespace {
std::string summarize(const std::vector<Diagnostic>& diagnostics) {
    if (diagnostics.empty()) return "invalid input";
    auto msg = diagnostics.front().to_string();
    if (diagnostics.size() > 1) msg += fmt::format(" (and {} more)", diagnostics.size() - 1);
    return msg;
}
} // namespace

IngestError::IngestError(std::vector<Diagnostic> diagnostics)
    : Error("ingest", summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

const std::vector<std::string>& municipality_columns() {
    static const std::vector<std::string> columns = [] {
        std::vector<std::string> c = {"id", "name", "population", "income_pc", "accommodation_beds", "book_shops"};
        for (auto k : kAttractionKinds) c.push_back(fmt::format("{}_count", to_string(k)));
        for (auto d : kDummyColumns) c.emplace_back(d);
        for (std::size_t v = 1; v < kClusterVariables.size(); ++v) c.emplace_back(kClusterVariables[v]);
        return c;
    }();
    return columns;
}

const FlowNetwork& FlowLoad::at(Behaviour behaviour, int month) const {
    if (month < 1 || month > 12) throw Error("ingest", fmt::format("month {} out of range", month));
    const std::size_t offset = behaviour == Behaviour::Tourists ? 0 : 12;
    return networks.at(offset + static_cast<std::size_t>(month - 1));
}

std::span<const FlowNetwork> FlowLoad::of(Behaviour behaviour) const {
    const std::size_t offset = behaviour == Behaviour::Tourists ? 0 : 12;
    return std::span<const FlowNetwork>(networks).subspan(offset, 12);
}

FlowLoad parse_flows(std::istream& in, const std::string& source, const NodeSet& universe) {
    FlowLoad load;
    for (auto b : kBehaviours)
        for (int m = 1; m <= 12; ++m) load.networks.emplace_back(universe, b, Period::month(m));

    csv::Reader reader(in);
    if (!expect_header(reader, source, split_header(kFlowsHeader))) {
        load.warnings.push_back(fmt::format("{}: empty flow file", source));
        return load;
    }
    std::set<std::tuple<int, std::size_t, std::size_t, Behaviour>> seen;
    csv::Row row;
    while (reader.next(row)) {
        if (blank(row)) continue;
        auto reject = [&](std::string message) { load.rejected.push_back({source, row.line, std::move(message)}); };
        if (row.fields.size() != 5) {
            reject(fmt::format("expected 5 fields, found {}", row.fields.size()));
            continue;
        }
        const auto month = csv::parse_integer(row.fields[0]);
        if (!month) {
            reject(fmt::format("malformed month '{}'", row.fields[0]));
            continue;
        }
        if (*month < 1 || *month > 12) {
            reject(fmt::format("month {} out of range 1-12", *month));
            continue;
        }
        const auto origin = universe.find(row.fields[1]);
        const auto destination = universe.find(row.fields[2]);
        if (!origin || !destination) {
            reject(fmt::format("unknown municipality id '{}'", !origin ? row.fields[1] : row.fields[2]));
            continue;
        }
        if (*origin == *destination) {
            reject(fmt::format("origin equals destination '{}'", row.fields[1]));
            continue;
        }
        Behaviour behaviour;
        try {
            behaviour = parse_behaviour(row.fields[3]);
        } catch (const Error&) {
            reject(fmt::format("unknown behaviour '{}'", row.fields[3]));
            continue;
        }
        const auto count = csv::parse_integer(row.fields[4]);
        if (!count) {
            reject(fmt::format("malformed count '{}'", row.fields[4]));
            continue;
        }
        if (*count < 0) {
            reject(fmt::format("negative count {}", *count));
            continue;
        }
        if (!seen.emplace(static_cast<int>(*month), *origin, *destination, behaviour).second) {
            reject(fmt::format("duplicate row for month {}, {} -> {}, {}", *month, row.fields[1], row.fields[2],
                               to_string(behaviour)));
            continue;
        }
        const std::size_t offset = behaviour == Behaviour::Tourists ? 0 : 12;
        load.networks[offset + static_cast<std::size_t>(*month - 1)].add_flow(*origin, *destination,
                                                                              static_cast<double>(*count));
        ++load.accepted_rows;
        load.accepted_total += static_cast<double>(*count);
    }
    if (load.accepted_rows == 0 && load.rejected.empty())
        load.warnings.push_back(fmt::format("{}: empty flow file", source));
    return load;
}

FlowLoad load_flows(const std::filesystem::path& path, const NodeSet& universe) {
    auto in = open_input(path);
    return parse_flows(in, path.string(), universe);
}

NodeSet MunicipalityLoad::ids() const {
    std::vector<std::string> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.id);
    return NodeSet(std::move(out));
}

MunicipalityLoad parse_municipalities(std::istream& in, const std::string& source) {
    MunicipalityLoad load;
    csv::Reader reader(in);
    const auto& columns = municipality_columns();
    if (!expect_header(reader, source, columns)) throw IngestError({{source, 0, "empty municipality file"}});

    std::set<std::string> seen;
    csv::Row row;
    while (reader.next(row)) {
        if (blank(row)) continue;
        auto reject = [&](std::string message) { load.rejected.push_back({source, row.line, std::move(message)}); };
        if (row.fields.size() != columns.size()) {
            reject(fmt::format("expected {} fields, found {}", columns.size(), row.fields.size()));
            continue;
        }
        MunicipalityRecord rec;
        rec.id = row.fields[0];
        rec.name = row.fields[1];
        if (rec.id.empty()) {
            reject("empty municipality id");
            continue;
        }
        std::vector<double> numbers;
        std::string problem;
        for (std::size_t c = 2; c < columns.size(); ++c) {
            const auto v = csv::parse_double(row.fields[c]);
            if (!v) {
                problem = fmt::format("malformed {} '{}'", columns[c], row.fields[c]);
                break;
            }
            if (*v < 0.0) {
                problem = fmt::format("negative {} {}", columns[c], *v);
                break;
            }
            numbers.push_back(*v);
        }
        if (!problem.empty()) {
            reject(problem);
            continue;
        }
        std::size_t i = 0;
        rec.population = numbers[i++];
        rec.income_pc = numbers[i++];
        rec.accommodation_beds = numbers[i++];
        rec.book_shops = numbers[i++];
        for (auto& a : rec.attractions) a = numbers[i++];
        std::array<int, 7> dummies{};
        for (auto& d : dummies) {
            const double v = numbers[i++];
            if (v != 0.0 && v != 1.0) problem = fmt::format("dummy {} must be 0 or 1, got {}", columns[i + 1], v);
            d = static_cast<int>(v);
        }
        rec.dummies = {dummies[0], dummies[1], dummies[2], dummies[3], dummies[4], dummies[5], dummies[6]};
        rec.cluster_variables[0] = rec.income_pc;
        for (std::size_t v = 1; v < rec.cluster_variables.size(); ++v) rec.cluster_variables[v] = numbers[i++];

        if (problem.empty() && !(rec.population > 0.0)) problem = "population must be positive";
        if (problem.empty())
            for (std::size_t a = 0; a < rec.attractions.size(); ++a)
                if (std::floor(rec.attractions[a]) != rec.attractions[a])
                    problem = fmt::format("{}_count must be an integer", to_string(kAttractionKinds[a]));
        if (problem.empty() && !seen.insert(rec.id).second) problem = fmt::format("duplicate id '{}'", rec.id);
        if (!problem.empty()) {
            reject(problem);
            continue;
        }
        load.records.push_back(std::move(rec));
    }
    return load;
}

MunicipalityLoad load_municipalities(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_municipalities(in, path.string());
}

NodeSet load_municipality_ids(const std::filesystem::path& path) {
    auto in = open_input(path);
    csv::Reader reader(in);
    csv::Row row;
    if (!reader.next(row) || row.fields.size() < 2 || row.fields[0] != "id" || row.fields[1] != "name")
        throw IngestError({{path.string(), 1, "header must start with id,name"}});
    std::vector<std::string> ids;
    std::set<std::string> seen;
    std::vector<Diagnostic> problems;
    while (reader.next(row)) {
        if (blank(row)) continue;
        if (row.fields[0].empty() || !seen.insert(row.fields[0]).second) {
            problems.push_back({path.string(), row.line, fmt::format("empty or duplicate id '{}'", row.fields[0])});
            continue;
        }
        ids.push_back(row.fields[0]);
    }
    if (!problems.empty()) throw IngestError(std::move(problems));
    return NodeSet(std::move(ids));
}

TravelTimeLoad parse_travel_times(std::istream& in, const std::string& source, const NodeSet& universe) {
    TravelTimeLoad load{TravelTimeMatrix(universe), {}};
    csv::Reader reader(in);
    if (!expect_header(reader, source, split_header(kTravelTimesHeader)))
        throw IngestError({{source, 0, "empty travel time file"}});
    std::set<std::pair<std::size_t, std::size_t>> seen;
    csv::Row row;
    while (reader.next(row)) {
        if (blank(row)) continue;
        auto reject = [&](std::string message) { load.rejected.push_back({source, row.line, std::move(message)}); };
        if (row.fields.size() != 3) {
            reject(fmt::format("expected 3 fields, found {}", row.fields.size()));
            continue;
        }
        const auto o = universe.find(row.fields[0]);
        const auto d = universe.find(row.fields[1]);
        if (!o || !d) {
            reject(fmt::format("unknown municipality id '{}'", !o ? row.fields[0] : row.fields[1]));
            continue;
        }
        const auto minutes = csv::parse_double(row.fields[2]);
        if (!minutes) {
            reject(fmt::format("malformed minutes '{}'", row.fields[2]));
            continue;
        }
        if (*o == *d) {
            if (*minutes != 0.0) reject("travel time from a municipality to itself must be 0");
            continue;
        }
        if (!(*minutes > 0.0)) {
            reject(fmt::format("travel time must be positive, got {}", *minutes));
            continue;
        }
        if (!seen.emplace(*o, *d).second) {
            reject(fmt::format("duplicate pair {} -> {}", row.fields[0], row.fields[1]));
            continue;
        }
        load.matrix.set(*o, *d, *minutes);
    }
    return load;
}

TravelTimeLoad load_travel_times(const std::filesystem::path& path, const NodeSet& universe) {
    auto in = open_input(path);
    return parse_travel_times(in, path.string(), universe);
}

PresenceLoad load_reference_presences(const std::filesystem::path& path) {
    auto in = open_input(path);
    const auto source = path.string();
    PresenceLoad load;
    csv::Reader reader(in);
    if (!expect_header(reader, source, split_header(kReferencePresencesHeader)))
        throw IngestError({{source, 0, "empty reference presences file"}});
    csv::Row row;
    while (reader.next(row)) {
        if (blank(row)) continue;
        auto reject = [&](std::string message) { load.rejected.push_back({source, row.line, std::move(message)}); };
        if (row.fields.size() != 3) {
            reject(fmt::format("expected 3 fields, found {}", row.fields.size()));
            continue;
        }
        const auto year = csv::parse_integer(row.fields[1]);
        const auto presences = csv::parse_double(row.fields[2]);
        if (!year || !presences) {
            reject(fmt::format("malformed {} '{}'", !year ? "year" : "presences", !year ? row.fields[1] : row.fields[2]));
            continue;
        }
        if (*presences < 0.0) {
            reject("presences must be non-negative");
            continue;
        }
        if (!load.by_year[static_cast<int>(*year)].emplace(row.fields[0], *presences).second)
            reject(fmt::format("duplicate id '{}' for year {}", row.fields[0], *year));
    }
    return load;
}

ClassLoad load_reference_classes(const std::filesystem::path& path) {
    static const std::set<std::string> kClasses = {"Cultural", "Mountain", "Lake", "NotSpecific", "Metropolies"};
    auto in = open_input(path);
    const auto source = path.string();
    ClassLoad load;
    csv::Reader reader(in);
    if (!expect_header(reader, source, split_header(kReferenceClassesHeader)))
        throw IngestError({{source, 0, "empty reference classes file"}});
    csv::Row row;
    while (reader.next(row)) {
        if (blank(row)) continue;
        auto reject = [&](std::string message) { load.rejected.push_back({source, row.line, std::move(message)}); };
        if (row.fields.size() != 2) {
            reject(fmt::format("expected 2 fields, found {}", row.fields.size()));
            continue;
        }
        if (!kClasses.contains(row.fields[1])) {
            reject(fmt::format("unknown class '{}'", row.fields[1]));
            continue;
        }
        if (!load.classes.emplace(row.fields[0], row.fields[1]).second)
            reject(fmt::format("duplicate id '{}'", row.fields[0]));
    }
    return load;
}

std::map<std::string, std::string> remap_reference_classes(const std::map<std::string, std::string>& classes,
                                                           bool merge_cultural_lake) {
    std::map<std::string, std::string> out;
    for (const auto& [id, cls] : classes) {
        std::string mapped = cls;
        if (cls == "Metropolies") mapped = "NotSpecific";
        if (merge_cultural_lake && (cls == "Cultural" || cls == "Lake")) mapped = "CulturalLake";
        out.emplace(id, std::move(mapped));
    }
    return out;
}

ReferenceCheck validate_against_reference(const std::map<std::string, double>& presences,
                                          const std::map<std::string, double>& reference) {
    std::vector<double> x, y;
    double captured = 0.0;
    for (const auto& [id, value] : presences) {
        const auto it = reference.find(id);
        if (it == reference.end()) continue;
        x.push_back(value);
        y.push_back(it->second);
        captured += value;
    }
    if (x.empty()) throw Error("ingest", "presences and reference share no ids");
    double reference_total = 0.0;
    for (const auto& [id, value] : reference) reference_total += value;
    if (!(reference_total > 0.0)) throw Error("ingest", "reference total is zero");

    const auto c = pearson(x, y);
    return {c.r, c.p_value, captured / reference_total, x.size()};
}

MonthlySeries monthly_series(std::span<const FlowNetwork> networks) {
    MonthlySeries s;
    for (const auto& net : networks) {
        if (net.period().is_year()) continue;
        auto& series = net.behaviour() == Behaviour::Tourists ? s.tourists : s.visitors;
        series[static_cast<std::size_t>(net.period().month_index() - 1)] += net.total_weight();
    }
    return s;
}

void write_flows_csv(std::ostream& out, std::span<const FlowNetwork> networks) {
    out << kFlowsHeader << '\n';
    for (const auto& net : networks) {
        if (net.period().is_year()) throw Error("ingest", "flow files hold monthly networks only");
        for (const auto& [key, w] : net.edges()) {
            if (std::floor(w) != w) throw Error("ingest", "flow counts must be integers to be written");
            out << fmt::format("{},{},{},{},{}\n", net.period().month_index(), csv::escape(net.nodes().id(key.first)),
                               csv::escape(net.nodes().id(key.second)), to_string(net.behaviour()),
                               static_cast<long long>(w));
        }
    }
}

void write_municipalities_csv(std::ostream& out, std::span<const MunicipalityRecord> records) {
    out << csv::join(municipality_columns()) << '\n';
    for (const auto& r : records) {
        std::vector<std::string> f = {r.id, r.name};
        f.push_back(fmt::format("{}", r.population));
        f.push_back(fmt::format("{}", r.income_pc));
        f.push_back(fmt::format("{}", r.accommodation_beds));
        f.push_back(fmt::format("{}", r.book_shops));
        for (double a : r.attractions) f.push_back(fmt::format("{}", a));
        const auto& d = r.dummies;
        for (int v : {d.cultural_heritage, d.ski_routes, d.methane_distributors, d.festivals, d.farm_houses,
                      d.intermodal_nodes, d.natural_reserves})
            f.push_back(fmt::format("{}", v));
        for (std::size_t v = 1; v < r.cluster_variables.size(); ++v)
            f.push_back(fmt::format("{}", r.cluster_variables[v]));
        out << csv::join(f) << '\n';
    }
}

void write_travel_times_csv(std::ostream& out, const TravelTimeMatrix& tt) {
    out << kTravelTimesHeader << '\n';
    const auto& nodes = tt.nodes();
    for (std::size_t i = 0; i < tt.size(); ++i)
        for (std::size_t j = 0; j < tt.size(); ++j)
            if (i != j && tt.has(i, j))
                out << fmt::format("{},{},{}\n", csv::escape(nodes.id(i)), csv::escape(nodes.id(j)), tt.at(i, j));
}

void write_reference_presences_csv(std::ostream& out, int year, const std::map<std::string, double>& presences) {
    out << kReferencePresencesHeader << '\n';
    for (const auto& [id, value] : presences) out << fmt::format("{},{},{}\n", csv::escape(id), year, value);
}

void write_reference_classes_csv(std::ostream& out, const std::map<std::string, std::string>& classes,
                                 std::span<const std::string> order) {
    out << kReferenceClassesHeader << '\n';
    for (const auto& id : order) {
        const auto it = classes.find(id);
        if (it == classes.end()) continue;
        out << fmt::format("{},{}\n", csv::escape(id), it->second);
    }
}

} // namespace odflow
