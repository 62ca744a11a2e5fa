#ifndef CCM_ANALYSIS_HPP
#define CCM_ANALYSIS_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "ccm/maps.hpp"

namespace ccm {

/// Decoding-safe sphere radius for cell iota: (1/2) sqrt(sum_j Gamma_j^2
/// (F^-1(iota/2^n + 2^-j-1) - F^-1(iota/2^n - 2^-j-1))^2), Gamma_j =
/// gamma0 * 2^j, j = n .. n+d-1. Requires 1 <= iota <= 2^n - 1.
double rho_bar(int n, int d, std::uint64_t iota, const MapModel& map, double gamma0);

/// Radius for the cell containing a prefix: one-sided at the boundary
/// cells, min of the two neighbouring radii in the interior.
double rho_for_cell(int n, int d, std::uint64_t iota, const MapModel& map, double gamma0);
double rho_min(int n, int d, const BitPrefix& bits, const MapModel& map, double gamma0);

struct TsbResult {
  double value = 0.0;
  std::optional<double> std_error;  // present in sampled mode
};

/// Tangential-sphere bound on the delay-d error probability of bit n.
/// Exact cell enumeration for n <= exact_limit, uniform sampling above
/// (with a standard-error estimate).
TsbResult tsb(int n, int d, double sigma2, const MapModel& map, double gamma0,
              int exact_limit = 12, int n_samples = 10000, std::uint64_t seed = 1);

/// Worst-case squared-radius slope for the adaptive-size scheme with
/// Gamma_j = lambda * 2^j: min over n, j, iota of (lambda^2/4) times the
/// squared difference quotient of F^-1 at the dyadic points. Empty when
/// the map's inverse CDF has a vanishing derivative (logistic).
std::optional<double> beta_size(const MapModel& map, double lambda,
                                int max_n = 10, int extra_depth = 30);

/// Anytime-exponent lower bound (1/2)(beta/sigma2 - ln(2 beta d0 e /
/// ((d0-2) sigma2))); positive iff sigma2 < sigma2_sup(beta, d0).
double gamma_bar_size(double beta, double sigma2, int d0);

/// Largest noise variance for which gamma_bar_size is positive: beta/x*
/// where x* > 1 solves x - ln x = ln(2 d0 e / (d0 - 2)).
double sigma2_sup(double beta, int d0);

/// Trajectory-separation constant for the adaptive-bandwidth scheme on
/// BSM-conjugate maps with run length m_r (g = inverse invariant CDF).
double beta_bw_bsm(int m_r, const MapModel& map);

/// Same for tent-conjugate maps: inf over x in [1/6, 1/2) of
/// (g(x) - g(x + 1/3))^2, by dense grid plus golden-section refinement.
double beta_bw_tent(const MapModel& map, int grid_points = 100000);

/// Anytime-exponent lower bound beta / (8 sigma2).
double gamma_bar_bw(double beta, double sigma2);

/// Tail bound on the modulation-efficiency distribution:
/// K (1 + e^-2g/(1 - e^-g)) e^-gd.
double efficiency_tail(double K, double gamma, int d);

/// Mean m-th symbol-energy moment bound for Gamma_d = Gamma_0 2^d;
/// empty (diverges) when gamma <= m ln 4.
std::optional<double> energy_bound_size(double K, double gamma, double gamma0,
                                        int d0, double e0, int m = 1);

/// Mean bandwidth / energy bounds for the adaptive-bandwidth scheme.
double bandwidth_bound_bw(double K, double gamma, double delta_f, int d0, double b0);
double energy_bound_bw(double K, double gamma, int d0, double e0);

/// Stabilization threshold 2 ln rho(|A|) via power iteration on the
/// entrywise absolute matrix.
double required_exponent(const std::vector<std::vector<double>>& A,
                         int max_iter = 1000, double rel_tol = 1e-12);

}  // namespace ccm

#endif
