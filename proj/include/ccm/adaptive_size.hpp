#ifndef CCM_ADAPTIVE_SIZE_HPP
#define CCM_ADAPTIVE_SIZE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "ccm/maps.hpp"

namespace ccm {

/// Encoder with a feedback-driven pending-bit queue. The transmitted
/// symbol is Gamma_q * (mid-cell level of the queue - 1/2), Gamma_q =
/// gamma0 * 2^q.
class SizeEncoder {
 public:
  SizeEncoder(MapModel map, double gamma0, int q_max = 20);

  /// Push a bit and transmit. Returns nullopt when the queue would
  /// exceed q_max (flush failure); the encoder is then stuck.
  std::optional<double> encode_step(int bit);

  /// Retransmission symbol for the current queue (flush phase).
  double current_symbol() const;

  /// Drop count released bits from the front of the queue.
  void release(int count);

  int pending() const { return static_cast<int>(queue_.size()); }
  bool overflowed() const { return overflowed_; }
  const BitPrefix& queue() const { return queue_; }

 private:
  MapModel map_;
  double gamma0_;
  int q_max_;
  BitPrefix queue_;
  bool overflowed_ = false;
};

/// Exact ML decoder over the growing cell tree, with per-pending-bit
/// posterior LLRs (log P(b=1)/P(b=0), sum over leaves).
class SizeDecoder {
 public:
  SizeDecoder(MapModel map, double gamma0, double sigma2, double pe_res = 1e-5);

  /// Incorporate a received sample. new_bit doubles the leaf set first
  /// (matching an encoder push); false is the flush phase. Returns the
  /// per-pending-bit LLR array.
  const std::vector<double>& update(double r, bool new_bit);

  struct PruneResult {
    std::vector<std::uint8_t> released;  // decisions for the released prefix
  };

  /// Release the maximal prefix of reliable bits (error estimate
  /// 1/(1+e^|LLR|) <= pe_res), re-root the tree on the decisions and
  /// rebase metrics.
  PruneResult prune();

  const std::vector<double>& llr() const { return llr_; }
  int pending() const { return q_; }

  /// Current hard estimate of pending bit j (0-based within the queue);
  /// LLR tie decodes to 0.
  int estimate(int j) const { return llr_[static_cast<std::size_t>(j)] > 0.0 ? 1 : 0; }

  /// Accumulated path metric of leaf iota (1-based), for oracle tests.
  const std::vector<double>& metrics() const { return metrics_; }

 private:
  void recompute_llr();

  MapModel map_;
  double gamma0_;
  double sigma2_;
  double pe_res_;
  double llr_threshold_;  // |LLR| at which a bit becomes reliable
  int q_ = 0;
  std::vector<double> metrics_;  // 2^q leaf metrics, index iota-1
  std::vector<double> llr_;      // one per pending bit, oldest first
};

/// Leaf bit pattern as a q-bit word (MSB = oldest bit): iota-1 for BSM,
/// Gray-encoded iota-1 otherwise.
std::uint64_t leaf_bits_word(const MapModel& map, std::uint64_t iota, int q);

}  // namespace ccm

#endif
