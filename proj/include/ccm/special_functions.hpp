#ifndef CCM_SPECIAL_FUNCTIONS_HPP
#define CCM_SPECIAL_FUNCTIONS_HPP

namespace ccm {

/// Regularized upper incomplete gamma function Q(a,x) = Gamma(a,x)/Gamma(a),
/// a > 0, x >= 0. Series for x < a+1, continued fraction otherwise;
/// relative accuracy ~1e-14.
double gamma_q(double a, double x);

/// Regularized lower incomplete gamma function P(a,x) = 1 - Q(a,x).
double gamma_p(double a, double x);

}  // namespace ccm

#endif
