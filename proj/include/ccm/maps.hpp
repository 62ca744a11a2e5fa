#ifndef CCM_MAPS_HPP
#define CCM_MAPS_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace ccm {

enum class MapKind { BSM, Tent, Logistic };

/// A chaotic map on [0,1] together with the evaluation width used when a
/// mapper is applied to a (conceptually infinite) bit sequence.
struct MapModel {
  MapKind kind = MapKind::BSM;
  int eval_width = 20;  // bits of prefix used for trajectory evaluation
};

using BitPrefix = std::vector<std::uint8_t>;

const char* map_name(MapKind kind);

/// One exact application of the map recurrence. Valid for a single step
/// only; iterating it destroys accuracy after ~50 steps.
double apply_map_once(const MapModel& map, double z);

/// Inverse invariant CDF. Identity for BSM/Tent, cos^2((pi/2)(1-x)) for
/// the logistic map.
double invariant_cdf_inv(const MapModel& map, double x);

/// Invariant CDF (functional inverse of invariant_cdf_inv).
double forward_cdf(const MapModel& map, double z);

/// Mapper value of the prefix zero-padded to infinity. Truncation error
/// relative to an infinite sequence sharing the prefix is <= 2^-q.
double map_bits_to_sample(const MapModel& map, std::span<const std::uint8_t> prefix);

/// Cell index iota in {1,...,2^q}: natural binary for BSM, Gray-decoded
/// for Tent/Logistic (tent cylinder sets are ordered by reflected Gray
/// code). Requires 1 <= q <= 62.
std::uint64_t cell_index(const MapModel& map, std::span<const std::uint8_t> prefix);

/// Mid-cell quantizer representative F^-1((2*iota-1)/2^(q+1)).
double quantized_level(const MapModel& map, std::uint64_t iota, int q);

/// Inverse of cell_index.
BitPrefix demap_index_to_bits(const MapModel& map, std::uint64_t iota, int q);

/// f^(j)(M_f(u)) evaluated symbolically from the j-shifted bit sequence
/// using eval_width bits. Requires j + eval_width <= u.size().
double trajectory_sample(const MapModel& map, std::span<const std::uint8_t> u,
                         std::size_t j);

}  // namespace ccm

#endif
