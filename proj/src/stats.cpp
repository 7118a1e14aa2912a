#include "odflow/stats.hpp"

#include "odflow/csv.hpp"
#include "odflow/distributions.hpp"
#include "odflow/error.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>
#include <ostream>

namespace odflow {

DesignBuilder::DesignBuilder(std::vector<std::string> regressors, bool intercept)
    : regressors_(std::move(regressors)), intercept_(intercept) {}

void DesignBuilder::add_row(double response, std::span<const double> regressors) {
    if (regressors.size() != regressors_.size())
        throw Error("stats", fmt::format("row has {} regressors, expected {}", regressors.size(), regressors_.size()));
    response_.push_back(response);
    values_.insert(values_.end(), regressors.begin(), regressors.end());
}

DesignMatrix DesignBuilder::build() const {
    DesignMatrix d;
    d.intercept = intercept_;
    if (intercept_) d.columns.emplace_back(kInterceptName);
    d.columns.insert(d.columns.end(), regressors_.begin(), regressors_.end());
    const auto n = static_cast<Eigen::Index>(response_.size());
    const auto k = static_cast<Eigen::Index>(regressors_.size());
    const Eigen::Index offset = intercept_ ? 1 : 0;
    d.x.resize(n, k + offset);
    d.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d.y(i) = response_[static_cast<std::size_t>(i)];
        if (intercept_) d.x(i, 0) = 1.0;
        for (Eigen::Index j = 0; j < k; ++j) d.x(i, j + offset) = values_[static_cast<std::size_t>(i * k + j)];
    }
    return d;
}

const RegressionTerm& RegressionResult::term(std::string_view name) const {
    for (const auto& t : terms)
        if (t.name == name) return t;
    throw Error("stats", fmt::format("no term named '{}'", name));
}

std::string significance_stars(double p_value) {
    if (p_value < 0.01) return "***";
    if (p_value < 0.05) return "**";
    if (p_value < 0.1) return "*";
    return "";
}

namespace {

void check_design(const DesignMatrix& d) {
    const auto n = d.x.rows();
    const auto p = d.x.cols();
    if (static_cast<std::size_t>(p) != d.columns.size())
        throw Error("stats", "column names do not match design width");
    if (d.y.size() != n) throw Error("stats", "response length does not match design rows");
    if (p == 0) throw Error("stats", "design has no columns");
    if (n <= p) throw Error("stats", fmt::format("insufficient observations ({} rows for {} parameters)", n, p));
    if (!d.x.allFinite() || !d.y.allFinite()) throw Error("stats", "design contains non-finite values");

    const Eigen::Index first = d.intercept ? 1 : 0;
    for (Eigen::Index j = first; j < p; ++j) {
        const double v0 = d.x(0, j);
        if ((d.x.col(j).array() == v0).all())
            throw Error("stats", fmt::format("constant regressor '{}'", d.columns[static_cast<std::size_t>(j)]));
    }
    for (Eigen::Index a = 0; a < p; ++a)
        for (Eigen::Index b = a + 1; b < p; ++b)
            if (d.x.col(a) == d.x.col(b))
                throw Error("stats", fmt::format("identical regressors '{}' and '{}'",
                                                 d.columns[static_cast<std::size_t>(a)],
                                                 d.columns[static_cast<std::size_t>(b)]));
}

} // namespace

RegressionResult ols_fit(const DesignMatrix& design) {
    check_design(design);
    const auto n = design.x.rows();
    const auto p = design.x.cols();

    // Equilibrate columns so the conditioning check is scale-free.
    const Eigen::VectorXd scale = design.x.colwise().norm().transpose();
    const Eigen::MatrixXd xs = design.x * scale.cwiseInverse().asDiagonal();

    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xs);
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double ratio = sv(p - 1) / sv(0);
    const double rcond = ratio * ratio;
    if (!(rcond > kMinReciprocalCondition)) {
        const Eigen::VectorXd null_dir = qr.colsPermutation() * svd.matrixV().col(p - 1);
        std::vector<std::string> involved;
        for (Eigen::Index j = 0; j < p; ++j)
            if (std::abs(null_dir(j)) > 1e-6) involved.push_back(design.columns[static_cast<std::size_t>(j)]);
        std::string list;
        for (const auto& c : involved) list += (list.empty() ? "" : ", ") + c;
        throw Error("stats", fmt::format("rank-deficient design; collinear columns: {}", list));
    }

    const Eigen::VectorXd beta_scaled = qr.solve(design.y);
    const Eigen::VectorXd beta = beta_scaled.cwiseQuotient(scale);
    const Eigen::VectorXd residuals = design.y - design.x * beta;
    const double rss = residuals.squaredNorm();
    const double dof = static_cast<double>(n - p);
    const double sigma2 = rss / dof;

    const Eigen::MatrixXd r_inv = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::MatrixXd cov_perm = r_inv * r_inv.transpose();
    const Eigen::MatrixXd cov_scaled = qr.colsPermutation() * cov_perm * qr.colsPermutation().transpose();
    const Eigen::VectorXd inv_scale = scale.cwiseInverse();

    const double t_crit = dist::student_t_quantile(0.975, dof);

    RegressionResult result;
    result.n_obs = static_cast<std::size_t>(n);
    result.n_params = static_cast<std::size_t>(p);
    result.sigma2 = sigma2;
    for (Eigen::Index j = 0; j < p; ++j) {
        RegressionTerm t;
        t.name = design.columns[static_cast<std::size_t>(j)];
        t.estimate = beta(j);
        const double var = sigma2 * cov_scaled(j, j) * inv_scale(j) * inv_scale(j);
        t.std_error = std::sqrt(std::max(var, 0.0));
        if (t.std_error > 0.0) {
            t.t_value = t.estimate / t.std_error;
            t.p_value = dist::student_t_two_sided_p(t.t_value, dof);
        } else if (t.estimate == 0.0) {
            t.t_value = 0.0;
            t.p_value = 1.0;
        } else {
            t.t_value = std::copysign(std::numeric_limits<double>::infinity(), t.estimate);
            t.p_value = 0.0;
        }
        t.ci_low = t.estimate - t_crit * t.std_error;
        t.ci_high = t.estimate + t_crit * t.std_error;
        t.stars = significance_stars(t.p_value);
        result.terms.push_back(std::move(t));
    }

    double tss = 0.0;
    if (design.intercept) {
        const double mean = design.y.mean();
        tss = (design.y.array() - mean).square().sum();
    } else {
        tss = design.y.squaredNorm();
    }
    result.r_squared = tss > 0.0 ? std::clamp(1.0 - rss / tss, 0.0, 1.0) : 1.0;
    const double nn = static_cast<double>(n);
    const double base = design.intercept ? nn - 1.0 : nn;
    result.adj_r_squared = 1.0 - (1.0 - result.r_squared) * base / dof;

    constexpr double kLog2Pi = 1.8378770664093454836; // ln(2 pi)
    result.log_likelihood = rss > 0.0 ? -0.5 * nn * (kLog2Pi + std::log(rss / nn) + 1.0)
                                      : std::numeric_limits<double>::infinity();
    const double k = static_cast<double>(p + 1);
    result.aic = -2.0 * result.log_likelihood + 2.0 * k;
    result.bic = -2.0 * result.log_likelihood + k * std::log(nn);
    return result;
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error("stats", "pearson inputs differ in length");
    if (x.size() < 3) throw Error("stats", "pearson needs at least 3 observations");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) throw Error("stats", "zero variance");

    Correlation c;
    c.n = x.size();
    c.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    const double df = n - 2.0;
    if (std::abs(c.r) == 1.0) {
        c.p_value = 0.0;
    } else {
        const double t = c.r * std::sqrt(df / (1.0 - c.r * c.r));
        c.p_value = dist::student_t_two_sided_p(t, df);
    }
    return c;
}

ModelComparison compare_models(std::span<const RegressionResult> results) {
    if (results.size() < 2) throw Error("stats", "model comparison needs at least two results");
    for (const auto& r : results)
        if (r.n_obs != results.front().n_obs)
            throw Error("stats", fmt::format("models fit on different observation counts ({} vs {})",
                                             results.front().n_obs, r.n_obs));

    auto rank = [&](auto criterion) {
        std::vector<ModelRank> out;
        for (std::size_t i = 0; i < results.size(); ++i) out.push_back({i, criterion(results[i]), 0.0});
        std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
        const double best = out.front().value;
        for (auto& e : out) e.delta = e.value == best ? 0.0 : e.value - best;
        return out;
    };
    return {rank([](const RegressionResult& r) { return r.aic; }),
            rank([](const RegressionResult& r) { return r.bic; })};
}

void write_regression_csv(std::ostream& out, std::string_view model_id, const RegressionResult& result,
                          bool header) {
    if (header) out << "model_id,term,estimate,std_error,t_value,p_value,ci_low,ci_high,stars\n";
    for (const auto& t : result.terms)
        out << fmt::format("{},{},{},{},{},{},{},{},{}\n", csv::escape(model_id), csv::escape(t.name), t.estimate,
                           t.std_error, t.t_value, t.p_value, t.ci_low, t.ci_high, t.stars);
}

nlohmann::json to_json(const RegressionResult& result) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : result.terms)
        terms.push_back({{"term", t.name},
                         {"estimate", t.estimate},
                         {"std_error", t.std_error},
                         {"t_value", t.t_value},
                         {"p_value", t.p_value},
                         {"ci_low", t.ci_low},
                         {"ci_high", t.ci_high},
                         {"stars", t.stars}});
    return {{"terms", terms},
            {"n_obs", result.n_obs},
            {"n_params", result.n_params},
            {"r_squared", result.r_squared},
            {"adj_r_squared", result.adj_r_squared},
            {"sigma2", result.sigma2},
            {"log_likelihood", result.log_likelihood},
            {"aic", result.aic},
            {"bic", result.bic}};
}

} // namespace odflow
