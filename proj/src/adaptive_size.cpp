#include "ccm/adaptive_size.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ccm {

namespace {

double queue_symbol(const MapModel& map, const BitPrefix& queue, double gamma0) {
  const int q = static_cast<int>(queue.size());
  const double gamma_q = gamma0 * std::ldexp(1.0, q);
  const std::uint64_t iota = cell_index(map, queue);
  return gamma_q * (quantized_level(map, iota, q) - 0.5);
}

std::uint64_t gray_decode(std::uint64_t w) {
  for (int s = 1; s < 64; s <<= 1) w ^= w >> s;
  return w;
}

}  // namespace

std::uint64_t leaf_bits_word(const MapModel& map, std::uint64_t iota, int q) {
  (void)q;
  const std::uint64_t v = iota - 1;
  return map.kind == MapKind::BSM ? v : (v ^ (v >> 1));
}

SizeEncoder::SizeEncoder(MapModel map, double gamma0, int q_max)
    : map_(map), gamma0_(gamma0), q_max_(q_max) {
  if (gamma0 <= 0.0) throw std::invalid_argument("SizeEncoder: gamma0 must be positive");
  if (q_max < 1) throw std::invalid_argument("SizeEncoder: q_max must be >= 1");
}

std::optional<double> SizeEncoder::encode_step(int bit) {
  if (overflowed_) return std::nullopt;
  if (pending() + 1 > q_max_) {
    overflowed_ = true;
    return std::nullopt;
  }
  queue_.push_back(static_cast<std::uint8_t>(bit & 1));
  return queue_symbol(map_, queue_, gamma0_);
}

double SizeEncoder::current_symbol() const {
  if (queue_.empty()) throw std::logic_error("SizeEncoder: empty queue");
  return queue_symbol(map_, queue_, gamma0_);
}

void SizeEncoder::release(int count) {
  if (count < 0 || count > pending())
    throw std::invalid_argument("SizeEncoder: bad release count");
  queue_.erase(queue_.begin(), queue_.begin() + count);
}

SizeDecoder::SizeDecoder(MapModel map, double gamma0, double sigma2, double pe_res)
    : map_(map),
      gamma0_(gamma0),
      sigma2_(sigma2),
      pe_res_(pe_res),
      llr_threshold_(std::log(1.0 / pe_res - 1.0)),
      metrics_(1, 0.0) {
  if (sigma2 <= 0.0) throw std::invalid_argument("SizeDecoder: sigma2 must be positive");
  if (!(pe_res > 0.0 && pe_res < 0.5))
    throw std::invalid_argument("SizeDecoder: pe_res must be in (0, 0.5)");
}

const std::vector<double>& SizeDecoder::update(double r, bool new_bit) {
  if (!std::isfinite(r)) throw std::invalid_argument("SizeDecoder: non-finite sample");
  if (new_bit) {
    // leaf iota at level q+1 descends from leaf ceil(iota/2) at level q
    const std::size_t n = metrics_.size();
    std::vector<double> grown(2 * n);
    for (std::size_t i = 0; i < 2 * n; ++i) grown[i] = metrics_[i >> 1];
    metrics_ = std::move(grown);
    ++q_;
  }
  if (q_ == 0) throw std::logic_error("SizeDecoder: update with empty queue");

  const double gamma_q = gamma0_ * std::ldexp(1.0, q_);
  const std::uint64_t n_leaves = std::uint64_t{1} << q_;
  for (std::uint64_t iota = 1; iota <= n_leaves; ++iota) {
    const double s = gamma_q * (quantized_level(map_, iota, q_) - 0.5);
    const double diff = r - s;
    metrics_[iota - 1] += diff * diff;
  }
  recompute_llr();
  return llr_;
}

void SizeDecoder::recompute_llr() {
  // per-bit, per-side log-sum-exp with independent max shifts so that a
  // lopsided posterior still yields a finite LLR
  const std::uint64_t n_leaves = std::uint64_t{1} << q_;
  const double inv2s2 = 1.0 / (2.0 * sigma2_);
  const std::size_t q = static_cast<std::size_t>(q_);
  std::vector<double> best1(q, std::numeric_limits<double>::infinity()), best0 = best1;
  for (std::uint64_t iota = 1; iota <= n_leaves; ++iota) {
    const std::uint64_t word = leaf_bits_word(map_, iota, q_);
    const double m = metrics_[iota - 1];
    for (int j = 0; j < q_; ++j) {
      double& b = ((word >> (q_ - 1 - j)) & 1u) ? best1[static_cast<std::size_t>(j)]
                                                : best0[static_cast<std::size_t>(j)];
      b = std::min(b, m);
    }
  }
  std::vector<double> sum1(q, 0.0), sum0(q, 0.0);
  for (std::uint64_t iota = 1; iota <= n_leaves; ++iota) {
    const std::uint64_t word = leaf_bits_word(map_, iota, q_);
    const double m = metrics_[iota - 1];
    for (int j = 0; j < q_; ++j) {
      const std::size_t js = static_cast<std::size_t>(j);
      if ((word >> (q_ - 1 - j)) & 1u)
        sum1[js] += std::exp((best1[js] - m) * inv2s2);
      else
        sum0[js] += std::exp((best0[js] - m) * inv2s2);
    }
  }
  llr_.resize(q);
  for (std::size_t j = 0; j < q; ++j)
    llr_[j] = (std::log(sum1[j]) - best1[j] * inv2s2) -
              (std::log(sum0[j]) - best0[j] * inv2s2);
}

SizeDecoder::PruneResult SizeDecoder::prune() {
  PruneResult res;
  int k = 0;
  while (k < q_ && std::abs(llr_[static_cast<std::size_t>(k)]) >= llr_threshold_) {
    res.released.push_back(static_cast<std::uint8_t>(estimate(k)));
    ++k;
  }
  if (k == 0) return res;

  if (k == q_) {
    q_ = 0;
    metrics_.assign(1, 0.0);
    llr_.clear();
    return res;
  }

  // keep the subtree matching the released decisions and re-root it
  std::uint64_t decided = 0;
  for (int j = 0; j < k; ++j) decided = (decided << 1) | res.released[static_cast<std::size_t>(j)];

  const int new_q = q_ - k;
  const std::uint64_t n_leaves = std::uint64_t{1} << q_;
  const std::uint64_t suffix_mask = (std::uint64_t{1} << new_q) - 1;
  std::vector<double> kept(std::uint64_t{1} << new_q);
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t iota = 1; iota <= n_leaves; ++iota) {
    const std::uint64_t word = leaf_bits_word(map_, iota, q_);
    if ((word >> new_q) != decided) continue;
    const std::uint64_t suffix = word & suffix_mask;
    const std::uint64_t new_iota =
        map_.kind == MapKind::BSM ? suffix + 1 : gray_decode(suffix) + 1;
    kept[new_iota - 1] = metrics_[iota - 1];
    best = std::min(best, metrics_[iota - 1]);
  }
  for (double& m : kept) m -= best;
  metrics_ = std::move(kept);
  q_ = new_q;
  recompute_llr();
  return res;
}

}  // namespace ccm
