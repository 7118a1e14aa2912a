#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace odflow {

inline constexpr std::string_view kInterceptName = "(Intercept)";

/// Regressor matrix plus response. When `intercept` is set, column 0 is the
/// constant column named kInterceptName.
struct DesignMatrix {
    std::vector<std::string> columns;
    bool intercept = true;
    Eigen::MatrixXd x;
    Eigen::VectorXd y;

    std::size_t rows() const noexcept { return static_cast<std::size_t>(x.rows()); }
    std::size_t cols() const noexcept { return static_cast<std::size_t>(x.cols()); }
};

/// Row-by-row DesignMatrix construction.
class DesignBuilder {
public:
    DesignBuilder(std::vector<std::string> regressors, bool intercept = true);

    void add_row(double response, std::span<const double> regressors);
    std::size_t rows() const noexcept { return response_.size(); }
    DesignMatrix build() const;

private:
    std::vector<std::string> regressors_;
    bool intercept_;
    std::vector<double> values_;
    std::vector<double> response_;
};

struct RegressionTerm {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
    double t_value = 0.0;
    double p_value = 1.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::string stars;
};

struct RegressionResult {
    std::vector<RegressionTerm> terms;
    std::size_t n_obs = 0;
    std::size_t n_params = 0;
    double r_squared = 0.0;
    double adj_r_squared = 0.0;
    double sigma2 = 0.0;
    double log_likelihood = 0.0;
    double aic = 0.0;
    double bic = 0.0;

    /// Throws Error("stats", ...) when the term is absent.
    const RegressionTerm& term(std::string_view name) const;
};

/// "***" for p < 0.01, "**" for p < 0.05, "*" for p < 0.1, otherwise "".
std::string significance_stars(double p_value);

/// Smallest reciprocal condition number of the column-equilibrated X^T X
/// accepted by ols_fit.
inline constexpr double kMinReciprocalCondition = 1e-12;

/// Ordinary least squares through a column-pivoted QR factorization.
///
/// Standard errors come from sigma^2 (X^T X)^-1 with sigma^2 = RSS / (N - p);
/// p-values and 95% intervals use Student-t with N - p degrees of freedom.
/// AIC and BIC use the Gaussian log-likelihood with sigma counted as a
/// parameter. Throws on N <= p, constant or duplicated regressors, and
/// (near) rank deficiency.
RegressionResult ols_fit(const DesignMatrix& design);

struct Correlation {
    double r = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

/// Sample Pearson correlation with a two-sided Student-t(N-2) p-value.
Correlation pearson(std::span<const double> x, std::span<const double> y);

struct ModelRank {
    std::size_t index = 0;
    double value = 0.0;
    double delta = 0.0;
};

struct ModelComparison {
    std::vector<ModelRank> by_aic;
    std::vector<ModelRank> by_bic;
};

/// Ascending AIC and BIC orderings with deltas from the best model. Ties keep
/// input order. All results must share the observation count.
ModelComparison compare_models(std::span<const RegressionResult> results);

/// model_id,term,estimate,std_error,t_value,p_value,ci_low,ci_high,stars
void write_regression_csv(std::ostream& out, std::string_view model_id, const RegressionResult& result,
                          bool header = true);

/// JSON document with the coefficient table and fit statistics.
nlohmann::json to_json(const RegressionResult& result);

} // namespace odflow
