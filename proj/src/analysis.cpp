#include "ccm/analysis.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ccm/special_functions.hpp"

namespace ccm {

namespace {

double cdf_inv_gap(const MapModel& map, double x, double h) {
  return invariant_cdf_inv(map, x + h) - invariant_cdf_inv(map, x - h);
}

// Numeric check of inf dF^-1/dx > 0, probing dyadically close to both
// endpoints where a vanishing derivative would show up.
bool derivative_bounded_away_from_zero(const MapModel& map) {
  for (int k = 2; k <= 40; ++k) {
    const double x = std::ldexp(1.0, -k);
    const double h = x / 4.0;
    const double q_lo = cdf_inv_gap(map, x, h) / (2.0 * h);
    const double q_hi = cdf_inv_gap(map, 1.0 - x, h) / (2.0 * h);
    if (q_lo < 1e-6 || q_hi < 1e-6) return false;
  }
  return true;
}

double geometric_prefactor(double gamma) {
  return 1.0 + std::exp(-2.0 * gamma) / (1.0 - std::exp(-gamma));
}

}  // namespace

double rho_bar(int n, int d, std::uint64_t iota, const MapModel& map, double gamma0) {
  if (n < 1 || n > 62) throw std::invalid_argument("rho_bar: bad n");
  if (d < 1) throw std::invalid_argument("rho_bar: d must be >= 1");
  if (iota < 1 || iota > (std::uint64_t{1} << n) - 1)
    throw std::out_of_range("rho_bar: iota out of range");
  const double x = static_cast<double>(iota) * std::ldexp(1.0, -n);
  double sum = 0.0;
  for (int j = n; j <= n + d - 1; ++j) {
    const double gamma_j = gamma0 * std::ldexp(1.0, j);
    const double gap = cdf_inv_gap(map, x, std::ldexp(1.0, -(j + 1)));
    sum += gamma_j * gamma_j * gap * gap;
  }
  return 0.5 * std::sqrt(sum);
}

double rho_for_cell(int n, int d, std::uint64_t iota, const MapModel& map, double gamma0) {
  const std::uint64_t last = std::uint64_t{1} << n;
  if (iota < 1 || iota > last) throw std::out_of_range("rho_for_cell: iota out of range");
  if (iota == 1) return rho_bar(n, d, 1, map, gamma0);
  if (iota == last) return rho_bar(n, d, last - 1, map, gamma0);
  return std::min(rho_bar(n, d, iota, map, gamma0),
                  rho_bar(n, d, iota - 1, map, gamma0));
}

double rho_min(int n, int d, const BitPrefix& bits, const MapModel& map, double gamma0) {
  if (static_cast<int>(bits.size()) != n)
    throw std::invalid_argument("rho_min: prefix length must equal n");
  return rho_for_cell(n, d, cell_index(map, bits), map, gamma0);
}

TsbResult tsb(int n, int d, double sigma2, const MapModel& map, double gamma0,
              int exact_limit, int n_samples, std::uint64_t seed) {
  if (n < 1 || d < 1 || sigma2 <= 0.0) throw std::invalid_argument("tsb: bad arguments");
  const double a = 0.5 * d;
  const auto term = [&](std::uint64_t iota) {
    const double rho = rho_for_cell(n, d, iota, map, gamma0);
    return gamma_q(a, rho * rho / (2.0 * sigma2));
  };

  TsbResult res;
  if (n <= exact_limit) {
    const std::uint64_t cells = std::uint64_t{1} << n;
    double sum = 0.0;
    for (std::uint64_t iota = 1; iota <= cells; ++iota) sum += term(iota);
    res.value = sum / static_cast<double>(cells);
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> pick(1, std::uint64_t{1} << n);
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n_samples; ++i) {
      const double t = term(pick(rng));
      sum += t;
      sum2 += t * t;
    }
    const double mean = sum / n_samples;
    res.value = mean;
    res.std_error = std::sqrt(std::max(0.0, sum2 / n_samples - mean * mean) /
                              std::max(1, n_samples - 1));
  }
  res.value = std::min(res.value, 1.0);
  return res;
}

std::optional<double> beta_size(const MapModel& map, double lambda, int max_n,
                                int extra_depth) {
  if (lambda <= 0.0) throw std::invalid_argument("beta_size: lambda must be positive");
  if (!derivative_bounded_away_from_zero(map)) return std::nullopt;

  double min_quot2 = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= max_n; ++n) {
    const std::uint64_t cells = std::uint64_t{1} << n;
    for (std::uint64_t iota = 1; iota <= cells - 1; ++iota) {
      const double x = static_cast<double>(iota) * std::ldexp(1.0, -n);
      for (int j = n; j <= n + extra_depth; ++j) {
        const double width = std::ldexp(1.0, -j);
        const double quot = cdf_inv_gap(map, x, 0.5 * width) / width;
        min_quot2 = std::min(min_quot2, quot * quot);
      }
    }
  }
  return 0.25 * lambda * lambda * min_quot2;
}

double gamma_bar_size(double beta, double sigma2, int d0) {
  if (d0 <= 2) throw std::invalid_argument("gamma_bar_size: d0 must be > 2");
  if (beta <= 0.0 || sigma2 <= 0.0)
    throw std::invalid_argument("gamma_bar_size: beta and sigma2 must be positive");
  return 0.5 * (beta / sigma2 -
                std::log(2.0 * beta * d0 * std::numbers::e / ((d0 - 2) * sigma2)));
}

double sigma2_sup(double beta, int d0) {
  if (d0 <= 2) throw std::invalid_argument("sigma2_sup: d0 must be > 2");
  if (beta <= 0.0) throw std::invalid_argument("sigma2_sup: beta must be positive");
  const double rhs = std::log(2.0 * d0 / (d0 - 2.0)) + 1.0;
  // x - ln x is increasing on (1, inf); unique root there
  double lo = 1.0, hi = 1e6;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid - std::log(mid) - rhs < 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-10) break;
  }
  return beta / (0.5 * (lo + hi));
}

double beta_bw_bsm(int m_r, const MapModel& map) {
  if (m_r < 0) throw std::invalid_argument("beta_bw_bsm: m_r must be >= 0");
  const double delta = std::ldexp(1.0, -(m_r + 2));
  const double gap = cdf_inv_gap(map, 0.5, delta);
  return gap * gap;
}

double beta_bw_tent(const MapModel& map, int grid_points) {
  if (grid_points < 3) throw std::invalid_argument("beta_bw_tent: too few grid points");
  const double lo = 1.0 / 6.0;
  const double hi = 0.5 - 1e-12;
  const auto objective = [&](double x) {
    const double diff = invariant_cdf_inv(map, x) - invariant_cdf_inv(map, x + 1.0 / 3.0);
    return diff * diff;
  };

  double best_x = lo, best = objective(lo);
  for (int i = 1; i < grid_points; ++i) {
    const double x = lo + (hi - lo) * i / (grid_points - 1);
    const double v = objective(x);
    if (v < best) {
      best = v;
      best_x = x;
    }
  }

  // golden-section refinement around the grid minimum
  const double step = (hi - lo) / (grid_points - 1);
  double a = std::max(lo, best_x - step), b = std::min(hi, best_x + step);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = objective(c), fd = objective(d);
  while (b - a > 1e-13) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
    }
  }
  return std::min(best, std::min(fc, fd));
}

double gamma_bar_bw(double beta, double sigma2) {
  if (beta < 0.0 || sigma2 <= 0.0) throw std::invalid_argument("gamma_bar_bw: bad arguments");
  return beta / (8.0 * sigma2);
}

double efficiency_tail(double K, double gamma, int d) {
  if (gamma <= 0.0) throw std::invalid_argument("efficiency_tail: gamma must be positive");
  return K * geometric_prefactor(gamma) * std::exp(-gamma * d);
}

std::optional<double> energy_bound_size(double K, double gamma, double gamma0,
                                        int d0, double e0, int m) {
  if (gamma <= 0.0 || gamma0 <= 0.0 || m < 1)
    throw std::invalid_argument("energy_bound_size: bad arguments");
  const double log4m = m * std::log(4.0);
  if (gamma <= log4m) return std::nullopt;  // geometric series diverges
  const double ratio = std::exp(log4m - gamma);
  return e0 + K * std::pow(gamma0, 2.0 * m) * geometric_prefactor(gamma) *
                  std::pow(ratio, d0) / (1.0 - ratio);
}

namespace {

double bw_tail_factor(double K, double gamma, int d0) {
  const double eg = std::exp(-gamma);
  const double prefactor = 1.0 + std::exp(-2.0 * gamma) / (1.0 + eg);
  const double series = std::exp(-gamma * d0) * (d0 - (d0 - 1) * eg) /
                        ((1.0 - eg) * (1.0 - eg));
  return K * prefactor * series;
}

}  // namespace

double bandwidth_bound_bw(double K, double gamma, double delta_f, int d0, double b0) {
  if (gamma <= 0.0 || delta_f < 0.0)
    throw std::invalid_argument("bandwidth_bound_bw: bad arguments");
  return b0 + delta_f * bw_tail_factor(K, gamma, d0);
}

double energy_bound_bw(double K, double gamma, int d0, double e0) {
  if (gamma <= 0.0) throw std::invalid_argument("energy_bound_bw: bad arguments");
  return e0 + bw_tail_factor(K, gamma, d0);
}

double required_exponent(const std::vector<std::vector<double>>& A, int max_iter,
                         double rel_tol) {
  const std::size_t n = A.size();
  if (n == 0) throw std::invalid_argument("required_exponent: empty matrix");
  for (const auto& row : A)
    if (row.size() != n) throw std::invalid_argument("required_exponent: matrix not square");

  // power iteration on |A| + I (shift removes periodicity)
  std::vector<std::vector<double>> M(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      M[i][j] = std::abs(A[i][j]) + (i == j ? 1.0 : 0.0);

  std::vector<double> v(n, 1.0), w(n);
  double lambda = 1.0;
  for (int it = 0; it < max_iter; ++it) {
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += M[i][j] * v[j];
      w[i] = s;
      norm = std::max(norm, std::abs(s));
    }
    for (std::size_t i = 0; i < n; ++i) w[i] /= norm;
    const double prev = lambda;
    lambda = norm;
    v.swap(w);
    if (it > 0 && std::abs(lambda - prev) <= rel_tol * std::abs(lambda)) break;
  }
  const double rho = lambda - 1.0;
  if (rho <= 0.0) return -std::numeric_limits<double>::infinity();
  return 2.0 * std::log(rho);
}

}  // namespace ccm
