#include "ccm/maps.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ccm {

namespace {

void check_unit_interval(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error(std::string(what) + " outside [0,1]");
}

// Tent-map Gray mapper: 1/2 + 1/4 * sum_l (-1/2)^(l-1) prod_m (2 b_m - 1),
// over the zero-padded sequence. Terms decay as 2^-l, so 64 terms reach
// machine precision.
double tent_mapper(std::span<const std::uint8_t> prefix) {
  constexpr int kTerms = 64;
  double sum = 0.0;
  double coeff = 1.0;  // (-1/2)^(l-1)
  double prod = 1.0;   // running product of (2 b_m - 1)
  for (int l = 1; l <= kTerms; ++l) {
    const int b = (static_cast<std::size_t>(l) <= prefix.size()) ? prefix[l - 1] : 0;
    prod *= (2 * b - 1);
    sum += coeff * prod;
    coeff *= -0.5;
  }
  return 0.5 + 0.25 * sum;
}

}  // namespace

const char* map_name(MapKind kind) {
  switch (kind) {
    case MapKind::BSM: return "bsm";
    case MapKind::Tent: return "tent";
    case MapKind::Logistic: return "logistic";
  }
  return "?";
}

double apply_map_once(const MapModel& map, double z) {
  check_unit_interval(z, "map input");
  switch (map.kind) {
    case MapKind::BSM: return z < 0.5 ? 2.0 * z : 2.0 * z - 1.0;
    case MapKind::Tent: return 1.0 - std::abs(2.0 * z - 1.0);
    case MapKind::Logistic: return 4.0 * z * (1.0 - z);
  }
  return 0.0;
}

double invariant_cdf_inv(const MapModel& map, double x) {
  check_unit_interval(x, "cdf argument");
  if (map.kind != MapKind::Logistic) return x;
  const double c = std::cos(std::numbers::pi / 2.0 * (1.0 - x));
  return c * c;
}

double forward_cdf(const MapModel& map, double z) {
  check_unit_interval(z, "cdf argument");
  if (map.kind != MapKind::Logistic) return z;
  return 2.0 / std::numbers::pi * std::asin(std::sqrt(z));
}

double map_bits_to_sample(const MapModel& map, std::span<const std::uint8_t> prefix) {
  switch (map.kind) {
    case MapKind::BSM: {
      // binary expansion, summed LSB-first for accuracy
      double v = 0.0;
      for (std::size_t i = prefix.size(); i-- > 0;) v = 0.5 * (v + prefix[i]);
      return v;
    }
    case MapKind::Tent:
      return tent_mapper(prefix);
    case MapKind::Logistic:
      return invariant_cdf_inv(map, tent_mapper(prefix));
  }
  return 0.0;
}

std::uint64_t cell_index(const MapModel& map, std::span<const std::uint8_t> prefix) {
  const std::size_t q = prefix.size();
  if (q == 0 || q > 62) throw std::invalid_argument("cell_index: bad prefix length");
  std::uint64_t v = 0;
  if (map.kind == MapKind::BSM) {
    for (std::uint8_t b : prefix) v = (v << 1) | (b & 1u);
  } else {
    std::uint64_t a = 0;  // Gray decode: a_j = a_{j-1} xor b_j
    for (std::uint8_t b : prefix) {
      a ^= (b & 1u);
      v = (v << 1) | a;
    }
  }
  return v + 1;
}

double quantized_level(const MapModel& map, std::uint64_t iota, int q) {
  if (q < 1 || q > 62) throw std::invalid_argument("quantized_level: bad q");
  if (iota < 1 || iota > (std::uint64_t{1} << q))
    throw std::out_of_range("quantized_level: iota out of range");
  const double x = static_cast<double>(2 * iota - 1) * std::ldexp(1.0, -(q + 1));
  return invariant_cdf_inv(map, x);
}

BitPrefix demap_index_to_bits(const MapModel& map, std::uint64_t iota, int q) {
  if (q < 1 || q > 62) throw std::invalid_argument("demap_index_to_bits: bad q");
  if (iota < 1 || iota > (std::uint64_t{1} << q))
    throw std::out_of_range("demap_index_to_bits: iota out of range");
  std::uint64_t v = iota - 1;
  if (map.kind != MapKind::BSM) v ^= (v >> 1);  // Gray encode
  BitPrefix bits(static_cast<std::size_t>(q));
  for (int j = 0; j < q; ++j)
    bits[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>((v >> (q - 1 - j)) & 1u);
  return bits;
}

double trajectory_sample(const MapModel& map, std::span<const std::uint8_t> u,
                         std::size_t j) {
  const auto w = static_cast<std::size_t>(map.eval_width);
  if (j + w > u.size())
    throw std::out_of_range("trajectory_sample: insufficient remaining bits");
  return map_bits_to_sample(map, u.subspan(j, w));
}

}  // namespace ccm
