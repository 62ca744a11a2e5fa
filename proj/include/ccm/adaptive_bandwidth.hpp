#ifndef CCM_ADAPTIVE_BANDWIDTH_HPP
#define CCM_ADAPTIVE_BANDWIDTH_HPP

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "ccm/maps.hpp"

namespace ccm {

/// The two precomputed reference chaotic trajectories. u1 is the bitwise
/// complement of u0; for BSM, u0 contains no run of identical bits longer
/// than m_r. Trajectories are evaluated symbolically, never by float
/// iteration.
struct RefTrajectories {
  MapModel map;
  int n_bits = 1000;
  int m_r = 5;
  bool normalized = true;  // transmit 2z-1 in [-1,1]
  BitPrefix u0, u1;
  std::vector<double> traj0, traj1;  // raw [0,1] samples, index = age-1

  int usable() const { return static_cast<int>(traj0.size()); }

  /// Transmitted value for reference b at age j (1-based).
  double tx(int b, int j) const {
    const double z = (b ? traj1 : traj0)[static_cast<std::size_t>(j - 1)];
    return normalized ? 2.0 * z - 1.0 : z;
  }

  /// Squared Euclidean distance between the two trajectories over the
  /// first d ages, in transmitted units.
  double squared_distance(int d) const;
};

/// Draw a reference pair. The BSM run-length constraint is enforced by
/// flipping any bit that would extend a run past m_r; other maps accept
/// any sequence (force_run_limit applies it anyway).
RefTrajectories gen_initial_conditions(const MapModel& map, int n_bits, int m_r,
                                       std::mt19937_64& rng, bool normalized = true,
                                       bool force_run_limit = false);

/// Per-step encoder: component i of the transmitted vector carries the
/// pending bit of age i via its reference trajectory.
class BwEncoder {
 public:
  explicit BwEncoder(const RefTrajectories* ref) : ref_(ref) {}

  /// Push a bit (age 1) and emit the symbol vector, components ordered
  /// by age 1..q. Returns false on trajectory exhaustion (block failure).
  bool encode_step(int bit, std::vector<double>& out);

  /// Retransmission of the current queue with ages advanced (flush).
  bool flush_step(std::vector<double>& out);

  void release(int count);
  int pending() const { return static_cast<int>(bits_.size()); }

 private:
  bool emit(std::vector<double>& out);

  const RefTrajectories* ref_;
  std::vector<std::uint8_t> bits_;  // front = oldest
  std::vector<int> ages_;           // parallel to bits_
};

/// Per-bit correlation decoder with distance accumulators.
class BwDecoder {
 public:
  BwDecoder(const RefTrajectories* ref, double sigma2, double pe_res = 1e-5);

  /// Incorporate a received vector (one component per pending bit,
  /// ordered by age). new_bit adds an age-1 accumulator first.
  const std::vector<double>& update(std::span<const double> r, bool new_bit);

  struct PruneResult {
    std::vector<std::uint8_t> released;
  };
  PruneResult prune();

  const std::vector<double>& llr() const { return llr_; }
  int pending() const { return static_cast<int>(acc_.size()); }
  int estimate(int j) const { return llr_[static_cast<std::size_t>(j)] > 0.0 ? 1 : 0; }

 private:
  struct Acc {
    double d0 = 0.0, d1 = 0.0;
    int age = 0;
  };

  const RefTrajectories* ref_;
  double sigma2_;
  double llr_threshold_;
  std::vector<Acc> acc_;  // front = oldest
  std::vector<double> llr_;
};

/// Exact single-bit error probability (1/2) erfc(d_E / (2 sqrt(2 sigma2)))
/// for squared trajectory distance dE2.
double error_prob_exact(double dE2, double sigma2);

}  // namespace ccm

#endif
