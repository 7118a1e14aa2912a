#pragma once

namespace odflow::dist {

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

double student_t_cdf(double t, double df);

/// P(|T| >= |t|) for T ~ Student-t(df).
double student_t_two_sided_p(double t, double df);

/// Inverse CDF, 0 < probability < 1.
double student_t_quantile(double probability, double df);

} // namespace odflow::dist
