#include "odflow/delta.hpp"

#include "odflow/error.hpp"

#include <fmt/format.h>
#include <ostream>
#include <set>

namespace odflow {

DeltaDrivers DeltaDrivers::from(const MunicipalityRecord& m) {
    return DeltaDrivers{m.income_pc, m.accommodation_beds, m.book_shops, m.dummies};
}

std::array<double, 10> DeltaDrivers::row() const {
    const auto& d = dummies;
    return {income_pc,
            accommodation_beds,
            static_cast<double>(d.cultural_heritage),
            static_cast<double>(d.ski_routes),
            book_shops,
            static_cast<double>(d.methane_distributors),
            static_cast<double>(d.festivals),
            static_cast<double>(d.farm_houses),
            static_cast<double>(d.intermodal_nodes),
            static_cast<double>(d.natural_reserves)};
}

std::optional<double> delta_metric(const CentralityVector& tourist, const CentralityVector& visitor,
                                   std::string_view node) {
    if (tourist.metric != visitor.metric || tourist.period != visitor.period)
        throw Error("deltamodel", "tourist and visitor vectors differ in metric or period");
    const auto ti = tourist.nodes.find(node);
    const auto vi = visitor.nodes.find(node);
    if (!ti || !vi) throw Error("deltamodel", fmt::format("unknown node '{}'", node));
    const double t = tourist.values[*ti];
    const double v = visitor.values[*vi];
    if (t == 0.0) return std::nullopt;
    return (t - v) / t;
}

std::vector<DeltaObservation> build_delta_observations(const CentralityVector& tourist,
                                                       const CentralityVector& visitor,
                                                       const std::map<std::string, DeltaDrivers>& drivers) {
    if (tourist.period.is_year()) throw Error("deltamodel", "delta observations are monthly");
    std::vector<DeltaObservation> out;
    for (const auto& id : tourist.nodes.ids()) {
        const auto y = delta_metric(tourist, visitor, id);
        if (!y) continue;
        const auto it = drivers.find(id);
        if (it == drivers.end()) throw Error("deltamodel", fmt::format("no driver values for node '{}'", id));
        out.push_back({id, tourist.period.month_index(), tourist.metric, *y, it->second});
    }
    return out;
}

RegressionResult fit_delta_model(std::span<const DeltaObservation> observations, Metric metric, int month,
                                 std::size_t min_observations) {
    DesignBuilder builder(std::vector<std::string>(kDeltaDriverNames.begin(), kDeltaDriverNames.end()));
    for (const auto& obs : observations) {
        if (obs.metric != metric || obs.month != month) continue;
        const auto row = obs.drivers.row();
        builder.add_row(obs.y, row);
    }
    if (builder.rows() < min_observations)
        throw Error("deltamodel", fmt::format("{} month {}: {} observations, at least {} required",
                                              to_string(metric), month, builder.rows(), min_observations));
    try {
        return ols_fit(builder.build());
    } catch (const Error& e) {
        throw Error("deltamodel", fmt::format("{} month {}: {}", to_string(metric), month, e.what()));
    }
}

std::vector<std::pair<int, RegressionResult>> fit_delta_trajectory(std::span<const DeltaObservation> observations,
                                                                   Metric metric, std::size_t min_observations) {
    std::set<int> months;
    for (const auto& obs : observations)
        if (obs.metric == metric) months.insert(obs.month);
    std::vector<std::pair<int, RegressionResult>> out;
    for (int m : months) out.emplace_back(m, fit_delta_model(observations, metric, m, min_observations));
    return out;
}

void write_delta_long_csv(std::ostream& out, Metric metric, int month, const RegressionResult& result, bool header) {
    if (header) out << "metric,month,term,estimate,ci_low,ci_high,p_value,stars\n";
    for (const auto& t : result.terms)
        out << fmt::format("{},{},{},{},{},{},{},{}\n", to_string(metric), month, t.name, t.estimate, t.ci_low,
                           t.ci_high, t.p_value, t.stars);
}

} // namespace odflow
